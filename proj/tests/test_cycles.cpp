#include <catch_amalgamated.hpp>

#include <random>

#include "hadamard_kit/cycles.hpp"
#include "hadamard_kit/quadrature.hpp"

using namespace hadamard_kit;

namespace {

Cycle unit_square(int mult = 1) {
    Cycle c;
    c.add(Path({cplx(1, -1), cplx(1, 1), cplx(-1, 1), cplx(-1, -1)}), mult);
    return c;
}

StarSet neg_ray() { return presets::ray(kPi, 1.0); }

int required_at(const WindingSpec& s, const std::string& tag) {
    for (const auto& p : s.probes)
        if (p.tag == tag) return p.required;
    FAIL("missing probe " << tag);
    return 0;
}

int region_winding(const WindingSpec& s, std::size_t i) { return s.regions.at(i).winding; }

bool same_spec(const WindingSpec& a, const WindingSpec& b) {
    if (a.winding_at_zero != b.winding_at_zero || a.probes.size() != b.probes.size()) return false;
    for (std::size_t i = 0; i < a.probes.size(); ++i)
        if (std::abs(a.probes[i].point - b.probes[i].point) > 1e-12 || a.probes[i].required != b.probes[i].required)
            return false;
    return true;
}

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::ConfigError;
}

}  // namespace

TEST_CASE("winding number examples") {
    CHECK(winding_number(unit_square(), 0.0) == 1);
    CHECK(winding_number(unit_square(), 3.0) == 0);
    CHECK(winding_number(unit_square(-1), 0.0) == -1);
    CHECK(kind_of([] { winding_number(unit_square(), cplx(1.0, 0.5)); }) == ErrorKind::PointOnCycle);
}

TEST_CASE("path validation") {
    CHECK_THROWS_AS(Path({cplx(1, 0), cplx(2, 0)}), Error);
    CHECK_THROWS_AS(Path({cplx(1, 0), cplx(1, 0), cplx(2, 1)}), Error);
    CHECK_THROWS_AS(Path({cplx(0, 0), cplx(1, 0), cplx(2, 1)}), Error);
}

TEST_CASE("winding additivity and reversal") {
    Cycle a = unit_square();
    Cycle b;
    b.add(circle_path(cplx(0.5, 0.0), 3.0, 1), 2);
    Cycle ab = a + b;
    Cycle rev;
    rev.add(a.terms[0].path.reversed(), 1);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int k = 0; k < 200; ++k) {
        cplx w(u(rng), u(rng));
        if (distance_to_support(ab, w) < 1e-6) continue;
        CHECK(winding_number(ab, w) == winding_number(a, w) + winding_number(b, w));
        CHECK(winding_number(rev, w) == -winding_number(a, w));
    }
}

TEST_CASE("rounding residual stays small") {
    Cycle c = synthesize_cycle(hadamard_winding_spec(neg_ray(), neg_ray(), 0.5));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    int n = 0;
    while (n < 1000) {
        cplx w(u(rng), u(rng));
        if (distance_to_support(c, w) < 1e-6) continue;
        ++n;
        double t = winding_turns(c, w);
        CHECK(std::abs(t - std::round(t)) < 0.25);
    }
}

TEST_CASE("generalized Hadamard winding data") {
    SECTION("points") {
        auto s = hadamard_winding_spec(presets::point(2.0), presets::point(3.0), 1.0);
        CHECK(region_winding(s, 0) == -1);
        CHECK(region_winding(s, 1) == 0);
        CHECK(required_at(s, "zero-proxy") == 0);
        CHECK(required_at(s, "far-field") == 0);
    }
    SECTION("dilogarithm") {
        auto s = hadamard_winding_spec(neg_ray(), neg_ray(), 0.5);
        CHECK(region_winding(s, 0) == 0);
        CHECK(region_winding(s, 1) == 1);
        CHECK(required_at(s, "zero-proxy") == 1);
        CHECK(required_at(s, "far-field") == 0);
    }
    SECTION("disk complements") {
        auto s = hadamard_winding_spec(presets::disk_complement(2.0), presets::disk_complement(3.0), cplx(1.0, 2.0));
        CHECK(region_winding(s, 0) == 0);
        CHECK(region_winding(s, 1) == 1);
        CHECK(required_at(s, "zero-proxy") == 1);
    }
    SECTION("errors") {
        CHECK(kind_of([] { hadamard_winding_spec(presets::point(2.0), presets::point(3.0), 6.0); }) ==
              ErrorKind::PointInProduct);
        StarSet a({LogPolarBox(-kInf, 0.0, Arc::full())}), b({LogPolarBox(0.0, kInf, Arc::full())});
        CHECK(kind_of([&] { hadamard_winding_spec(a, b, 1.0); }) == ErrorKind::NotStronglyConvolvable);
    }
}

TEST_CASE("Hadamard-cycle table") {
    StarSet compact1 = presets::point(2.0), compact2 = presets::point(3.0);
    StarSet to_inf1 = presets::ray(0.5, 2.0), to_inf2 = presets::ray(1.0, 3.0);
    StarSet to_zero1 = presets::segment0(0.5, 0.3), to_zero2 = presets::segment0(1.0, 0.2);

    CHECK(pohlen_kind(compact1, compact2) == PohlenKind::CauchyPlus);
    CHECK(pohlen_kind(compact1, compact2, true) == PohlenKind::AntiCauchyMinus);
    CHECK(pohlen_kind(to_zero1, to_zero2) == PohlenKind::AntiCauchyMinus);
    CHECK(pohlen_kind(to_inf1, compact2) == PohlenKind::CauchyPlus);
    CHECK(pohlen_kind(to_zero1, compact2) == PohlenKind::AntiCauchyMinus);
    CHECK(pohlen_kind(compact1, to_inf2) == PohlenKind::CauchyPlus);
    CHECK(pohlen_kind(compact1, to_zero2) == PohlenKind::AntiCauchyMinus);
    CHECK(kind_of([&] { pohlen_kind(to_inf1, to_zero2); }) == ErrorKind::TableCaseImpossible);

    auto s = pohlen_winding_spec(compact1, compact2, 1.0);
    CHECK(region_winding(s, 1) == 1);
    CHECK(region_winding(s, 0) == 0);
    CHECK(required_at(s, "zero-proxy") == 1);
    auto t = pohlen_winding_spec(to_zero1, to_zero2, 1.0);
    CHECK(region_winding(t, 1) == 0);
    CHECK(region_winding(t, 0) == -1);
    CHECK(required_at(t, "zero-proxy") == -1);
}

TEST_CASE("table consistency with the generalized cycle") {
    std::vector<StarSet> s1_inf = {presets::ray(0.5, 2.0), presets::disk_complement(2.0)};
    std::vector<StarSet> s2_ok = {presets::point(3.0), presets::ray(1.0, 3.0)};
    for (const auto& s1 : s1_inf)
        for (const auto& s2 : s2_ok)
            CHECK(same_spec(hadamard_winding_spec(s1, s2, 0.5), pohlen_winding_spec(s1, s2, 0.5)));
    std::vector<StarSet> s1_zero = {presets::segment0(0.5, 0.3), presets::punctured_disk(0.3)};
    std::vector<StarSet> s2_ok0 = {presets::point(3.0), presets::segment0(1.0, 0.2)};
    for (const auto& s1 : s1_zero)
        for (const auto& s2 : s2_ok0)
            CHECK(same_spec(hadamard_winding_spec(s1, s2, 2.0), pohlen_winding_spec(s1, s2, 2.0)));
}

TEST_CASE("synthesis examples") {
    SECTION("point with winding -1") {
        auto spec = make_winding_spec({{presets::point(2.0), -1}}, 0);
        Cycle c = synthesize_cycle(spec, 0.1);
        REQUIRE(c.terms.size() == 1);
        CHECK(winding_number(c, 2.0) == -1);
        CHECK(winding_number(c, 0.0) == 0);
        CHECK(distance_to_support(c, 2.0) > 0.1);
        CHECK(distance_to_support(c, 2.0) < 0.5);
    }
    SECTION("disk interior") {
        double s = 2.0, eps = 0.1;
        auto spec = make_winding_spec({{presets::disk_complement(s), 0}}, 1);
        Cycle c = synthesize_cycle(spec, eps);
        REQUIRE(c.terms.size() == 1);
        for (cplx v : c.terms[0].path.vertices()) CHECK(std::abs(v) == Catch::Approx(std::exp(std::log(s) - eps)));
        CHECK(winding_number(c, 0.0) == 1);
    }
    SECTION("winding only at zero") {
        auto spec = make_winding_spec({}, 1);
        Cycle c = synthesize_cycle(spec, 0.1);
        REQUIRE(c.terms.size() == 1);
        for (cplx v : c.terms[0].path.vertices()) CHECK(std::abs(v) == Catch::Approx(0.1));
        CHECK(winding_number(c, 0.0) == 1);
    }
    SECTION("margin violations") {
        auto spec = hadamard_winding_spec(presets::point(2.0), presets::point(3.0), 1.0);
        CHECK(kind_of([&] { synthesize_cycle(spec, spec.margin); }) == ErrorKind::NoMargin);
        CHECK(kind_of([&] { make_winding_spec({{presets::ray(0.0, 1.0), 1}}, 0); }) == ErrorKind::InvalidSpec);
    }
}

TEST_CASE("certify") {
    Cycle c;
    c.add(circle_path(2.0, 0.3, 1), 1);
    auto plus = make_winding_spec({{presets::point(2.0), 1}}, 0);
    auto minus = make_winding_spec({{presets::point(2.0), -1}}, 0);
    CHECK(certify(c, plus).ok);
    auto rep = certify(c, minus);
    CHECK_FALSE(rep.ok);
    CHECK(rep.probes_checked >= 64);
    bool at_two = false;
    for (const auto& v : rep.violations) at_two = at_two || std::abs(v.point - cplx(2.0)) < 1e-12;
    CHECK(at_two);
    auto dspec = hadamard_winding_spec(neg_ray(), neg_ray(), 0.5);
    CHECK(certify(synthesize_cycle(dspec), dspec).ok);
}

TEST_CASE("shared cycle") {
    StarSet s1 = presets::point(2.0), s2 = presets::point(3.0);
    StarSet k = presets::annulus(0.5, 1.0);
    Cycle c = shared_cycle(s1, s2, k);
    for (int j = 0; j < 20; ++j) {
        cplx z = std::polar(0.5 + 0.5 * j / 19.0, 0.3 * j);
        CHECK(certify(c, hadamard_winding_spec(s1, s2, z)).ok);
    }
    cplx z0(0.7, 0.2);
    Cycle single = shared_cycle(s1, s2, presets::point(z0));
    CHECK(certify(single, hadamard_winding_spec(s1, s2, z0)).ok);
    CHECK(kind_of([&] { shared_cycle(s1, s2, presets::annulus(1.0, 6.0)); }) == ErrorKind::NoMargin);
}

TEST_CASE("homology principle: integrals depend only on winding data") {
    auto spec = hadamard_winding_spec(neg_ray(), neg_ray(), 0.5);
    double eps = auto_eps(spec);
    Cycle c1 = synthesize_cycle(spec, eps), c2 = synthesize_cycle(spec, eps / 2);
    cplx a = -0.25;  // inside the winding-1 region z [-1, 0)
    for (int k = -2; k <= 2; ++k) {
        auto g = [&](cplx w) { return std::pow(w, k) / (w - a); };
        cplx i1 = integrate_cycle(g, c1).value, i2 = integrate_cycle(g, c2).value;
        CHECK(std::abs(i1 - i2) < 1e-8 * (1.0 + std::abs(i1)));
    }
}
