#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hadamard_kit/serialize.hpp"

using namespace hadamard_kit;
namespace fs = std::filesystem;

namespace {

const std::string kCli = HADAMARD_CLI_PATH;
const fs::path kData = HADAMARD_TEST_DATA;
const fs::path kWork = HADAMARD_TEST_WORK;

struct Run {
    int code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Run run(const std::string& args, const std::string& env = {}) {
    fs::create_directories(kWork);
    fs::path out = kWork / "stdout.txt", err = kWork / "stderr.txt";
    std::string cmd = env + (env.empty() ? "" : " ") + "\"" + kCli + "\" " + args + " > \"" + out.string() + "\" 2> \"" +
                      err.string() + "\"";
    int status = std::system(cmd.c_str());
    int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return {code, slurp(out), slurp(err)};
}

std::string data(const char* name) { return "\"" + (kData / name).string() + "\""; }
std::string work(const char* name) { return "\"" + (kWork / name).string() + "\""; }

struct Row {
    cplx z, value;
    double err;
};

std::vector<Row> read_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "re_z,im_z,re_val,im_val,err_est");
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        double v[5];
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &v[0], &v[1], &v[2], &v[3], &v[4]) == 5);
        rows.push_back({{v[0], v[1]}, {v[2], v[3]}, v[4]});
    }
    return rows;
}

json trailer(const Run& r) {
    auto start = r.err.rfind("{\"error\"");
    REQUIRE(start != std::string::npos);
    return json::parse(r.err.substr(start));
}

}  // namespace

TEST_CASE("eval dilog writes CSV, manifest and cycles") {
    auto r = run("eval --config " + data("dilog.json") + " --out " + work("vals.csv") + " --dump-cycle " +
                 work("cyc.json"));
    REQUIRE(r.code == 0);
    auto rows = read_csv(slurp(kWork / "vals.csv"));
    REQUIRE(rows.size() == 6);
    for (const auto& row : rows) CHECK(std::abs(row.value - li2(row.z)) < 1e-7);
    json manifest = json::parse(slurp(kWork / "vals.csv.manifest.json"));
    CHECK(manifest["options"]["tol"] == 1e-10);
    CHECK(manifest["options"].contains("margin"));
    CHECK(manifest["cycle_hashes"].size() == 6);
    CHECK(manifest["eps_used"].size() == 6);
    CHECK(manifest.contains("seconds"));
    json cyc = json::parse(slurp(kWork / "cyc.json"));
    REQUIRE(cyc["cycles"].size() == 6);
    Cycle c = cycle_from_json(cyc["cycles"][0]);
    CHECK(hash_hex(cycle_hash(c)) == manifest["cycle_hashes"][0].get<std::string>());
}

TEST_CASE("eval is deterministic across thread counts") {
    auto a = run("eval --config " + data("dilog_grid.json") + " --threads 1");
    auto b = run("eval --config " + data("dilog_grid.json") + " --threads 4");
    auto c = run("eval --config " + data("dilog_grid.json"), "HADAMARD_KIT_THREADS=3");
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
    for (const auto& row : read_csv(a.out)) CHECK(std::abs(row.value - li2(row.z)) < 1e-7);
}

TEST_CASE("eval pohlen and localized modes") {
    auto p = run("eval --config " + data("pohlen.json"));
    REQUIRE(p.code == 0);
    for (const auto& row : read_csv(p.out)) CHECK(std::abs(row.value - 1.0 / (1.0 - row.z / 6.0)) < 1e-9);
    auto l = run("eval --config " + data("localized.json"));
    REQUIRE(l.code == 0);
    for (const auto& row : read_csv(l.out)) CHECK(std::abs(row.value - li2(row.z)) < 1e-8);
}

TEST_CASE("eval domain errors exit 2 with a JSON trailer") {
    auto r = run("eval --config " + data("in_product.json"));
    CHECK(r.code == 2);
    CHECK(trailer(r)["error"] == "PointInProduct");
    auto t = run("eval --config " + data("bad_tol.json"));
    CHECK(t.code == 2);
    CHECK(trailer(t)["error"] == "ConfigError");
    auto missing = run("eval --config " + work("does-not-exist.json"));
    CHECK(missing.code == 2);
    auto flag = run("eval --config " + data("dilog.json") + " --tol 0.5");
    CHECK(flag.code == 2);
}

TEST_CASE("star verdicts") {
    auto r = run("star --config " + data("star_dilog.json"));
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["strongly_convolvable"] == true);
    CHECK(approx_equal(star_set_from_json(j["product"]), presets::ray(0.0, 1.0)));
    auto d = run("star --config " + data("star_disks.json"));
    REQUIRE(d.code == 0);
    StarSet p = star_set_from_json(json::parse(d.out)["product"]);
    CHECK(approx_equal(p, presets::disk_complement(6.0)));
    auto f = run("star --config " + data("star_factorial.json"));
    CHECK(f.code == 2);
    CHECK(trailer(f)["error"] == "UnrepresentableSet");
}

TEST_CASE("cycle synthesis, certification and dump") {
    auto r = run("cycle --config " + data("cycle_dilog.json") + " --dump-cycle " + work("c2.json"));
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["certified"] == true);
    CHECK(j["violations"].empty());
    Cycle c = cycle_from_json(json::parse(slurp(kWork / "c2.json")));
    CHECK(hash_hex(cycle_hash(c)) == j["cycle_hash"].get<std::string>());
}

TEST_CASE("oracle series product") {
    auto r = run("oracle --config " + data("oracle_geo.json"));
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    for (const auto& v : j["values"]) {
        cplx z = complex_from_json(v["z"]);
        CHECK(std::abs(complex_from_json(v["value"]) - 1.0 / (1.0 - z / 6.0)) < 1e-9);
    }
}

TEST_CASE("verify suites and usage errors") {
    auto s = run("verify series-oracle");
    CHECK(s.code == 0);
    CHECK(json::parse(s.out)["passed"] == true);
    auto d = run("verify defect --out " + work("defect.json"));
    CHECK(d.code == 0);
    json rep = json::parse(slurp(kWork / "defect.json"));
    REQUIRE(rep["reports"].size() == 1);
    for (const auto& c : rep["reports"][0]["checks"]) CHECK(c.contains("delta"));
    auto u = run("verify unknown");
    CHECK(u.code == 64);
    CHECK(trailer(u)["exit_code"] == 64);
    CHECK(run("").code == 64);
    CHECK(run("eval").code == 64);
    CHECK(run("frobnicate").code == 64);
}
