#include <catch_amalgamated.hpp>

#include <random>

#include "hadamard_kit/set_difference.hpp"
#include "hadamard_kit/sphere_sets.hpp"

using namespace hadamard_kit;
using Catch::Approx;

namespace {

StarSet neg_ray() { return presets::ray(kPi, 1.0); }  // (-inf, -1]

// Brute-force coverage of the cylinder window on an n x n raster.
bool raster_proper(const StarSet& s, int n) {
    for (int i = 0; i < n; ++i) {
        double rho = -12.0 + 24.0 * (i + 0.5) / n;
        for (int j = 0; j < n; ++j) {
            double theta = kTwoPi * (j + 0.5) / n;
            bool hit = false;
            for (const auto& b : s.boxes)
                if (b.distance(rho, theta) <= 0.0) {
                    hit = true;
                    break;
                }
            if (!hit) return true;
        }
    }
    return false;
}

}  // namespace

TEST_CASE("extended multiplication on the sphere") {
    auto inf = SpherePoint::infinity();
    CHECK(ext_mul(inf, SpherePoint(3.0)).is_infinity());
    CHECK(ext_mul(SpherePoint(2.0), SpherePoint(3.0)).value() == cplx(6.0));
    try {
        ext_mul(SpherePoint(0.0), inf);
        FAIL("expected UndefinedProduct");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UndefinedProduct);
    }
    CHECK(sphere_inv(SpherePoint(0.0)).is_infinity());
    CHECK(sphere_inv(inf).value() == cplx(0.0));
    CHECK(sphere_inv(SpherePoint(2.0)).value() == cplx(0.5));
}

TEST_CASE("arc membership and saturation") {
    Arc a = Arc::interval(-0.1, 0.2);
    CHECK(a.contains(0.05));
    CHECK(a.contains(kTwoPi - 0.05));
    CHECK_FALSE(a.contains(0.2));
    CHECK((Arc::interval(0.0, 4.0) + Arc::interval(1.0, 3.0)).is_full());
    CHECK_THROWS_AS(Arc::interval(0.0, -1.0), Error);
}

TEST_CASE("set product examples") {
    StarSet p = set_product(neg_ray(), neg_ray());
    REQUIRE(p.boxes.size() == 1);
    CHECK(p.boxes[0].rho_lo == 0.0);
    CHECK(p.boxes[0].rho_hi == kInf);
    CHECK(p.boxes[0].arc.width() == 0.0);
    CHECK(p.boxes[0].arc.distance(0.0) < 1e-12);

    StarSet six = set_product(presets::point(2.0), presets::point(3.0));
    CHECK(set_contains(six, 6.0));
    CHECK_FALSE(set_contains(six, 6.1));

    StarSet dc = set_product(presets::disk_complement(2.0), presets::disk_complement(3.0));
    CHECK(approx_equal(dc, presets::disk_complement(6.0), 1e-12));

    CHECK_THROWS_AS(set_product(presets::segment0(0.0, 1.0), presets::ray(0.0, 1.0)), Error);
}

TEST_CASE("inverse and scale examples") {
    StarSet inv = set_inverse(presets::ray(0.0, 1.0));
    REQUIRE(inv.boxes.size() == 1);
    CHECK(inv.boxes[0].rho_lo == -kInf);
    CHECK(inv.boxes[0].rho_hi == Approx(0.0).margin(1e-15));
    CHECK(set_contains(set_inverse(presets::point(2.0)), 0.5));
    StarSet ni = set_inverse(neg_ray());
    CHECK(set_contains(ni, -0.5));
    CHECK_FALSE(set_contains(ni, -2.0));

    CHECK(set_contains(set_scale(2.0, presets::point(3.0)), 6.0));
    StarSet rot = set_scale(cplx(0.0, 1.0), presets::ray(0.0, 1.0));
    CHECK(set_contains(rot, cplx(0.0, 5.0)));
    StarSet half = set_scale(0.5, set_inverse(neg_ray()));
    CHECK(set_contains(half, -0.5));
    CHECK(set_contains(half, -0.01));
    CHECK_FALSE(set_contains(half, -0.6));
}

TEST_CASE("set_contains examples") {
    CHECK(set_contains(neg_ray(), -2.0));
    CHECK_FALSE(set_contains(neg_ray(), -0.5));
    CHECK(set_contains(presets::ray(0.0, 1.0), 1.0));
}

TEST_CASE("properness by slab sweep") {
    CHECK(is_proper(neg_ray()));
    CHECK_FALSE(is_proper(StarSet({LogPolarBox(-kInf, kInf, Arc::full())})));
    CHECK_FALSE(is_proper(StarSet({LogPolarBox(-kInf, 0.0, Arc::full()), LogPolarBox(0.0, kInf, Arc::full())})));
    CHECK(is_proper(StarSet({LogPolarBox(-kInf, 0.0, Arc::full()), LogPolarBox(0.1, kInf, Arc::full())})));
    // arcs that jointly wrap
    StarSet wrap({LogPolarBox(-kInf, kInf, Arc::interval(0.0, 4.0)), LogPolarBox(-kInf, kInf, Arc::interval(3.5, 3.0))});
    CHECK_FALSE(is_proper(wrap));
    CHECK(raster_proper(wrap, 200) == is_proper(wrap));
}

TEST_CASE("eligibility predicates") {
    CHECK(star_eligible(neg_ray(), neg_ray()));
    CHECK_FALSE(star_eligible(presets::segment0(0.0, 1.0), presets::ray(0.0, 1.0)));
    CHECK(star_eligible(presets::point(2.0), presets::point(3.0)));
    CHECK(convolvable(presets::disk_complement(2.0), presets::disk_complement(3.0)));
    CHECK_FALSE(convolvable(presets::ray(0.0, 1.0), presets::segment0(0.0, 1.0)));
    CHECK(strongly_convolvable(neg_ray(), neg_ray()));
    CHECK(strongly_convolvable(presets::point(2.0), presets::point(3.0)));
    CHECK_FALSE(strongly_convolvable(StarSet({LogPolarBox(-kInf, 0.0, Arc::full())}),
                                     StarSet({LogPolarBox(0.0, kInf, Arc::full())})));
}

TEST_CASE("thicken") {
    StarSet t = thicken(presets::point(2.0), 0.1);
    REQUIRE(t.boxes.size() == 1);
    CHECK(t.boxes[0].rho_lo == Approx(std::log(2.0) - 0.1));
    CHECK(t.boxes[0].rho_hi == Approx(std::log(2.0) + 0.1));
    CHECK(t.boxes[0].arc.width() == Approx(0.2));
    CHECK(t.boxes[0].arc.contains(-0.1 + 1e-9));
    for (double d : {0.1, 1.0, 3.0}) CHECK(is_proper(thicken(neg_ray(), d)));
    StarSet a = thicken(neg_ray(), 0.1), b = thicken(neg_ray(), 0.2);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 500; ++k) CHECK(set_contains(b, box_sample(a.boxes[0], u(rng), u(rng))));
}

TEST_CASE("algebraic properties by sampling") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    StarSet s1({LogPolarBox(0.2, 1.0, Arc::interval(0.5, 0.7)), LogPolarBox(-1.0, -0.5, Arc::point(2.0))}, "s1");
    StarSet s2({LogPolarBox(0.0, 0.3, Arc::interval(4.0, 2.9)), LogPolarBox(1.0, kInf, Arc::point(1.0))}, "s2");
    StarSet prod = set_product(s1, s2);
    for (int k = 0; k < 2000; ++k) {
        const auto& b1 = s1.boxes[k % 2];
        const auto& b2 = s2.boxes[(k / 2) % 2];
        cplx z1 = box_sample(b1, u(rng), u(rng)), z2 = box_sample(b2, u(rng), u(rng));
        CHECK(set_contains(prod, z1 * z2, 1e-9));
    }
    CHECK(approx_equal(set_inverse(set_inverse(s1)), s1, 1e-12));
    cplx z1(0.3, 1.2), z2(-2.0, 0.4);
    CHECK(approx_equal(set_scale(z1, set_scale(z2, s2)), set_scale(z1 * z2, s2), 1e-12));
    // thickening product bound
    StarSet lhs = set_product(thicken(s1, 0.05), thicken(s2, 0.05));
    StarSet rhs = thicken(prod, 0.1);
    for (int k = 0; k < 1000; ++k) {
        const auto& b = lhs.boxes[k % lhs.boxes.size()];
        CHECK(set_contains(rhs, box_sample(b, u(rng), u(rng)), 1e-9));
    }
}

TEST_CASE("duality of the star product") {
    StarSet s1({LogPolarBox(0.0, 0.5, Arc::interval(0.2, 0.4))});
    StarSet s2({LogPolarBox(0.3, 0.6, Arc::interval(1.0, 0.3))});
    StarSet prod = set_product(s1, s2);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> rr(-1.0, 2.0), th(0.0, kTwoPi);
    int tested = 0;
    while (tested < 20) {
        cplx z = std::polar(std::exp(rr(rng)), th(rng));
        if (set_contains(prod, z)) continue;
        ++tested;
        bool found = false;
        for (int i = 0; i < 200 && !found; ++i)
            for (int j = 0; j < 200 && !found; ++j) {
                cplx zeta = box_sample(s1.boxes[0], i / 199.0, j / 199.0);
                found = set_contains(s2, z / zeta, 1e-6);
            }
        CHECK_FALSE(found);
    }
}

TEST_CASE("symmetry of predicates") {
    std::vector<StarSet> sets = {neg_ray(), presets::point(2.0), presets::disk_complement(2.0),
                                 presets::punctured_disk(0.5), presets::segment0(1.0, 1.0)};
    for (const auto& a : sets)
        for (const auto& b : sets) {
            CHECK(star_eligible(a, b) == star_eligible(b, a));
            CHECK(convolvable(a, b) == convolvable(b, a));
        }
}

TEST_CASE("set difference") {
    StarSet u = presets::annulus(0.1, 3.0);
    StarSet v = thicken(presets::ray(0.0, 1.0), 0.2);
    StarSet d = set_difference(u, v);
    CHECK(set_contains(d, 2.0 * std::polar(1.0, 0.5)));
    CHECK(set_contains(d, 0.5));
    CHECK_FALSE(set_contains(d, 5.0));
    // interior of V is removed
    CHECK(set_distance(d, 2.0) > 0.1);
}

TEST_CASE("normalize keeps boxes whose arcs differ by rounding") {
    double lo = 0.875 * kPi;
    double lo2 = std::nextafter(lo, 10.0);
    StarSet s({LogPolarBox(5.0, 7.5, Arc::interval(lo, 2.0)), LogPolarBox(1.0, 3.0, Arc::interval(lo2, 2.0))});
    StarSet n = normalize(s);
    CHECK(n.boxes.size() == 2);
    CHECK(set_contains(n, std::polar(std::exp(2.0), lo + 1.0)));
    CHECK(set_contains(n, std::polar(std::exp(6.0), lo + 1.0)));
    StarSet m = normalize(StarSet({LogPolarBox(2.0, 4.0, Arc::full()), LogPolarBox(1.0, 2.5, Arc::full())}));
    REQUIRE(m.boxes.size() == 1);
    CHECK(m.boxes[0].rho_lo == 1.0);
    CHECK(m.boxes[0].rho_hi == 4.0);
}
