#include <catch_amalgamated.hpp>

#include <sstream>

#include "hadamard_kit/serialize.hpp"

using namespace hadamard_kit;

namespace {

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

TEST_CASE("extended reals") {
    CHECK(ext_real_from_json(json("-inf")) == -kInf);
    CHECK(ext_real_from_json(json("+inf")) == kInf);
    CHECK(ext_real_from_json(json(1.5)) == 1.5);
    CHECK(kind_of([] { ext_real_from_json(json("abc")); }) == ErrorKind::ConfigError);
    CHECK(ext_real_to_json(-kInf) == json("-inf"));
    CHECK(complex_from_json(json::array({1.0, -2.0})) == cplx(1.0, -2.0));
    CHECK(complex_from_json(json(3)) == cplx(3.0, 0.0));
}

TEST_CASE("set records round trip") {
    StarSet s({LogPolarBox(-kInf, 0.5, Arc::full()), LogPolarBox(1.0, kInf, Arc::interval(0.2, 0.7)),
               LogPolarBox(0.3, 0.3, Arc::point(-1.0))},
              "mixed");
    json j = to_json(s);
    CHECK(j["boxes"][0]["rho"][0] == "-inf");
    CHECK(j["boxes"][0]["arc"] == "full");
    StarSet back = star_set_from_json(json::parse(j.dump()));
    CHECK(back.label == "mixed");
    CHECK(approx_equal(back, s, 0.0));
    CHECK(kind_of([] { box_from_json(json::parse(R"J({"rho":[2,1],"arc":"full"})J")); }) == ErrorKind::ConfigError);
    CHECK(kind_of([] { box_from_json(json::parse(R"J({"rho":[1,2]})J")); }) == ErrorKind::ConfigError);
}

TEST_CASE("set presets") {
    CHECK(approx_equal(set_preset("ray(pi, 1)"), presets::ray(kPi, 1.0)));
    CHECK(approx_equal(set_preset("preset:ray(-pi/2, 2)"), presets::ray(-kPi / 2, 2.0)));
    CHECK(approx_equal(set_preset("segment0(0.5, 3)"), presets::segment0(0.5, 3.0)));
    CHECK(approx_equal(set_preset("point(2, -1)"), presets::point(cplx(2.0, -1.0))));
    CHECK(approx_equal(set_preset("point(3)"), presets::point(3.0)));
    CHECK(approx_equal(set_preset("disk_complement(2)"), presets::disk_complement(2.0)));
    CHECK(approx_equal(set_preset("punctured_disk(0.25)"), presets::punctured_disk(0.25)));
    CHECK(approx_equal(set_preset("annulus(0.5, 2)"), presets::annulus(0.5, 2.0)));
    CHECK(approx_equal(set_preset("log1p"), builtin_singular_set("log1p")));
    CHECK(set_preset("empty").empty());
    CHECK(approx_equal(set_preset("ray(3*pi/4, 1)"), presets::ray(0.75 * kPi, 1.0)));
    CHECK(kind_of([] { set_preset("factorial"); }) == ErrorKind::UnrepresentableSet);
    CHECK(kind_of([] { set_preset("factorial(2)"); }) == ErrorKind::UnrepresentableSet);
    CHECK(kind_of([] { set_preset("blob(1)"); }) == ErrorKind::ConfigError);
    CHECK(kind_of([] { set_preset("ray(1)"); }) == ErrorKind::ConfigError);
    CHECK(kind_of([] { set_preset("ray(0, -1)"); }) == ErrorKind::ConfigError);
    NamedSets named{{"cut", presets::ray(0.0, 1.0)}};
    CHECK(approx_equal(star_set_from_json(json("set:cut"), &named), presets::ray(0.0, 1.0)));
    CHECK(kind_of([&] { star_set_from_json(json("set:nope"), &named); }) == ErrorKind::ConfigError);
}

TEST_CASE("function records") {
    auto f = function_from_json(json::parse(R"J({"expr":"log1p(z)","singular":"preset:log1p","vanishes_at_inf":false})J"));
    CHECK(std::abs(eval(f, 0.5) - std::log(1.5)) < 1e-15);
    auto g = function_from_json(
        json::parse(R"J({"expr":"1/(1-z/2)","singular":{"label":"p","boxes":[{"rho":[0.6931471805599453,0.6931471805599453],"arc":[0,0]}]},"vanishes_at_inf":true})J"));
    CHECK(std::abs(eval(g, 1.0) - 2.0) < 1e-15);
    auto back = function_from_json(json::parse(to_json(g).dump()));
    CHECK(std::abs(eval(back, cplx(0.3, 0.4)) - eval(g, cplx(0.3, 0.4))) < 1e-15);
    CHECK(kind_of([] { function_from_json(json::parse(R"J({"expr":"1/(z-2)","singular":"point(2)","vanishes_at_inf":false})J")); }) ==
          ErrorKind::InvalidFunctionDef);
    CHECK(kind_of([] { function_from_json(json::parse(R"J({"expr":"z+","singular":"empty"})J")); }) == ErrorKind::ParseError);
    CHECK(kind_of([] { function_from_json(json::parse(R"J({"singular":"empty"})J")); }) == ErrorKind::ConfigError);
}

TEST_CASE("cycle records and hash") {
    Cycle c;
    c.add(circle_path(0.0, 2.0, 1, kPi / 16), 1);
    c.add(circle_path(0.0, 0.5, -1, kPi / 16), 2);
    Cycle back = cycle_from_json(json::parse(to_json(c).dump()));
    REQUIRE(back.terms.size() == 2);
    CHECK(back.terms[1].multiplicity == 2);
    CHECK(back.terms[0].path.vertices() == c.terms[0].path.vertices());
    CHECK(cycle_hash(back) == cycle_hash(c));
    Cycle d = c;
    d.terms[1].multiplicity = 1;
    CHECK(cycle_hash(d) != cycle_hash(c));
    CHECK(hash_hex(0x1234).size() == 16);
}

TEST_CASE("grid csv") {
    GridResult g;
    g.points = {cplx(1.0, 0.5)};
    g.values = {cplx(0.25, -1.0)};
    g.error_estimates = {1e-12};
    std::ostringstream os;
    write_grid_csv(os, g);
    CHECK(os.str() == "re_z,im_z,re_val,im_val,err_est\n1,0.5,0.25,-1,9.9999999999999998e-13\n");
}
