// Runs the ten acceptance criteria; one PASS/FAIL line each. Full per-check deltas go to
// acceptance_report.json in the working directory.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "hadamard_kit/verify.hpp"

using namespace hadamard_kit;

int main(int argc, char** argv) {
    VerifyOptions opts;
    if (const char* t = std::getenv("HADAMARD_KIT_THREADS")) opts.threads = static_cast<unsigned>(std::max(1, std::atoi(t)));
    std::string only = argc > 1 ? argv[1] : "";

    json all = json::array();
    int failed = 0, index = 0;
    for (const auto& s : suites()) {
        ++index;
        if (!only.empty() && only != s.name) continue;
        SuiteReport r = run_suite(s.name, opts);
        all.push_back(to_json(r));
        std::string worst;
        for (const auto& c : r.checks)
            if (!c.passed) {
                worst = c.name + (c.note.empty() ? "" : " [" + c.note + "]") + " delta=" + format_real(c.delta);
                break;
            }
        std::printf("%s criterion %2d (%s): %zu checks, %.1fs%s%s\n", r.passed ? "PASS" : "FAIL", index,
                    s.title.c_str(), r.checks.size(), r.seconds, worst.empty() ? "" : "; first failure: ",
                    worst.c_str());
        std::fflush(stdout);
        failed += !r.passed;
    }
    std::ofstream("acceptance_report.json") << all.dump(2) << '\n';
    std::printf("%d criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
