#include <cmath>
#include <random>
#include <string>

#include "doctest.h"
#include "wpdiag/errors.hpp"
#include "wpdiag/report.hpp"
#include "wpdiag/spec_parser.hpp"

using namespace wpdiag;

namespace {

void same_map(const CircleHomeo& a, const CircleHomeo& b) {
    for (int i = 0; i <= 64; ++i) {
        const double x = -kPi + 2.0 * kPi * i / 64;
        CHECK(a(x) == doctest::Approx(b(x)).epsilon(1e-14));
    }
}

ErrorCode code_of(const std::string& spec) {
    try {
        parse_homeo(spec);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error for " << spec);
    return ErrorCode::InvalidSpec;
}

}  // namespace

TEST_CASE("real literals") {
    CHECK(parse_real("0.5") == 0.5);
    CHECK(parse_real(" -0.25 ") == -0.25);
    CHECK(parse_real("1e-3") == 1e-3);
    CHECK(parse_real("pi") == kPi);
    CHECK(parse_real("-pi/3") == -kPi / 3.0);
    CHECK(parse_real("2pi/5") == 2.0 * kPi / 5.0);
    CHECK(parse_real("3*pi/4") == 3.0 * kPi / 4.0);
    const std::vector<double> list = parse_real_list("0,pi/3,-pi/3");
    REQUIRE(list.size() == 3);
    CHECK(list[1] == kPi / 3.0);
    CHECK(list[2] == -kPi / 3.0);
    for (const char* bad : {"", "abc", "1/0", "2*", "pi pi", "1..2", "--1"}) CHECK_THROWS_AS(parse_real(bad), Error);
}

TEST_CASE("homeomorphism specs match their constructors") {
    same_map(parse_homeo("rot:0.5"), CircleHomeo::rotation(0.5));
    same_map(parse_homeo("trig:0.3"), CircleHomeo::trig(0.3));
    same_map(parse_homeo("mobius:2,0.5,0.3,0.575"),
             CircleHomeo::from_mobius(MobiusMap::from_coefficients(2, 0.5, 0.3, 0.575)));
    same_map(parse_homeo("mobius:P=1,Q=1,R=1"), CircleHomeo::from_mobius(MobiusMap::hyperbola(1, 1, 1)));
    same_map(parse_homeo("pwl:;1.5,0.5"), CircleHomeo::piecewise_equal(CircleHomeo::default_kink_base(), {1.5, 0.5}));
    same_map(parse_homeo("pwl:0.1;1.5,0.5"), CircleHomeo::piecewise_equal(0.1, {1.5, 0.5}));
    same_map(parse_homeo("pwl:0,pi/2;1.5,0.5"), CircleHomeo::piecewise_linear({0, kPi / 2}, {1.5, 0.5}));
    same_map(parse_homeo("compose:rot:0.5|trig:0.3"),
             CircleHomeo::compose(CircleHomeo::rotation(0.5), CircleHomeo::trig(0.3)));
    // Composition is right to left.
    const CircleHomeo c = parse_homeo("compose:trig:0.3|rot:0.5");
    CHECK(c(0.2) == doctest::Approx(CircleHomeo::trig(0.3)(0.7)).epsilon(1e-15));
    CHECK(parse_homeo("mobius:1,0,0,1").mobius().has_value());
    CHECK_FALSE(parse_homeo("trig:0.3").mobius().has_value());
}

TEST_CASE("malformed specs") {
    for (const char* bad : {"rot", "spin:1", "mobius:1,2,3", "mobius:P=1,Q=1", "mobius:P=1,Q=1,S=1", "pwl:1.5,0.5",
                            "compose:rot:1", "trig:x"}) {
        CHECK(code_of(bad) == ErrorCode::InvalidSpec);
    }
    CHECK_THROWS_AS(parse_homeo("pwl:;1.5,-0.5"), Error);
}

TEST_CASE("shortest round-trip formatting") {
    CHECK(format_real(0.1) == "0.1");
    CHECK(format_real(0.0) == "0");
    CHECK(format_real(-2.5) == "-2.5");
    CHECK(format_real(1e-24) == "1e-24");
    std::mt19937_64 rng(97);
    std::uniform_real_distribution<double> mant(-1.0, 1.0);
    std::uniform_int_distribution<int> ex(-300, 300);
    for (int i = 0; i < 10000; ++i) {
        const double x = std::ldexp(mant(rng), ex(rng));
        CHECK(std::stod(format_real(x)) == x);
    }
}

TEST_CASE("csv and json tables") {
    Table t{{"name", "n", "x", "ok", "empty"}, {}};
    t.add({"a,b", 3, 0.25, true, nullptr});
    t.add({"say \"hi\"", -1, 1.0 / 3.0, false, nullptr});
    CHECK(to_csv(t) ==
          "name,n,x,ok,empty\n"
          "\"a,b\",3,0.25,1,\n"
          "\"say \"\"hi\"\"\",-1,0.3333333333333333,0,\n");
    const auto j = to_json(t);
    REQUIRE(j.size() == 2);
    CHECK(j[0]["name"] == "a,b");
    CHECK(j[1]["n"] == -1);
    CHECK_THROWS_AS(t.add({1, 2}), Error);
}
