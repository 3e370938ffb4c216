#include "doctest.h"
#include "droplet/damping.hpp"
#include "droplet/errors.hpp"
#include "oracles.hpp"

#include <cmath>

using droplet::invalid_input;
using droplet::piecewise::PiecewiseFn;
using namespace droplet::damping;

TEST_SUITE("damping") {

TEST_CASE("spec validation") {
    DampingSpec bad;
    bad.alpha = PiecewiseFn::constant(1.0);
    bad.horizon = 0.0;
    CHECK_THROWS_AS(bad.validate(), invalid_input);
    bad.horizon = 2.0;
    CHECK_NOTHROW(bad.validate());
    CHECK_THROWS_AS(build_warp(bad, 1), invalid_input);
}

TEST_CASE("constant friction matches the closed form") {
    DampingSpec spec;
    spec.alpha = PiecewiseFn::constant(1.0);
    spec.horizon = 2.0;
    auto w = build_warp(spec, 4096);
    CHECK(w.tau_max == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-7));
    for (double t = 0.0; t <= 2.0; t += 0.1093) {
        CHECK(w.A(t) == doctest::Approx(std::exp(t)).epsilon(1e-14));
        CHECK(w.tau(t) == doctest::Approx(1.0 - std::exp(-t)).epsilon(1e-7));
        CHECK(w.t_of(w.tau(t)) == doctest::Approx(t).epsilon(1e-12));
    }
}

TEST_CASE("zero friction leaves time alone") {
    DampingSpec spec;
    spec.alpha = PiecewiseFn::constant(0.0);
    spec.horizon = 3.0;
    auto w = build_warp(spec, 64);
    CHECK(w.tau_max == 3.0);
    for (double t = 0.0; t <= 3.0; t += 0.37) {
        CHECK(w.A(t) == 1.0);
        CHECK(w.tau(t) == doctest::Approx(t).epsilon(1e-15));
    }
}

TEST_CASE("ramped friction agrees with quadrature of the inverse growth") {
    DampingSpec spec;
    spec.alpha = PiecewiseFn::parse("linear 0:0, 2:2");
    spec.horizon = 2.0;
    auto w = build_warp(spec, 8192);
    for (double t = 0.2; t <= 2.0; t += 0.3) {
        // growth factor integrates the ramp exactly
        CHECK(w.A(t) == doctest::Approx(std::exp(0.5 * t * t)).epsilon(1e-13));
        double ref = oracles::adaptive_simpson(
            [](double s) { return std::exp(-0.5 * s * s); }, 0.0, t, 1e-13);
        CHECK(w.tau(t) == doctest::Approx(ref).epsilon(1e-8));
    }
    // clock error shrinks with the table resolution
    auto wf = build_warp(spec, 65536);
    double ref1 = oracles::adaptive_simpson(
        [](double s) { return std::exp(-0.5 * s * s); }, 0.0, 2.0, 1e-14);
    CHECK(std::abs(wf.tau(2.0) - ref1) <= 1e-9);
}

TEST_CASE("stepwise friction compounds exactly at the breakpoints") {
    DampingSpec spec;
    spec.alpha = PiecewiseFn::parse("steps 2, 0.5:0, 1:1");
    spec.horizon = 2.0;
    auto w = build_warp(spec, 4096);
    CHECK(w.A(0.5) == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
    CHECK(w.A(1.0) == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
    CHECK(w.A(2.0) == doctest::Approx(std::exp(2.0)).epsilon(1e-14));
}

TEST_CASE("negative friction grows the field instead") {
    DampingSpec spec;
    spec.alpha = PiecewiseFn::constant(-0.5);
    spec.horizon = 1.0;
    auto w = build_warp(spec, 4096);
    CHECK(w.A(1.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-13));
    CHECK(w.tau(1.0) ==
          doctest::Approx(2.0 * (std::exp(0.5) - 1.0)).epsilon(1e-8));
}

TEST_CASE("warp rejects queries outside its range") {
    DampingSpec spec;
    spec.alpha = PiecewiseFn::constant(1.0);
    spec.horizon = 1.0;
    auto w = build_warp(spec, 256);
    CHECK_THROWS_AS(w.A(-0.1), invalid_input);
    CHECK_THROWS_AS(w.tau(1.5), invalid_input);
    CHECK_THROWS_AS(w.t_of(w.tau_max * 1.01), invalid_input);
}

TEST_CASE("pushed boundary data carries the growth factor") {
    DampingSpec spec;
    spec.alpha = PiecewiseFn::constant(1.0);
    spec.horizon = 1.0;
    auto w = build_warp(spec, 2048);
    auto uB = PiecewiseFn::parse("steps 1, 0.4:0.5");
    auto vB = PiecewiseFn::constant(0.25);
    auto pushed = push_data(uB, vB, w);
    REQUIRE(pushed.tau.size() == pushed.pB.size());
    REQUIRE(pushed.tau.size() == pushed.qB.size());
    CHECK(pushed.tau.front() == 0.0);
    CHECK(pushed.tau.back() == doctest::Approx(w.tau_max).epsilon(1e-12));
    for (size_t i = 0; i < pushed.tau.size(); ++i) {
        double t = w.t_of(pushed.tau[i]);
        CHECK(pushed.pB[i] == doctest::Approx(w.A(t) * uB(t)).epsilon(1e-10));
        CHECK(pushed.qB[i] == doctest::Approx(0.25).epsilon(1e-12));
    }
}

TEST_CASE("pull back rescales velocities and relabels times") {
    DampingSpec spec;
    spec.alpha = PiecewiseFn::constant(2.0);
    spec.horizon = 1.0;
    auto w = build_warp(spec, 2048);
    droplet::hopflax::Solution warped;
    droplet::hopflax::Slice sl;
    double tv = w.tau(0.5);
    sl.time = tv;
    sl.p.grid = {0.0, 1.0};
    sl.p.values = {2.0, 4.0};
    sl.p.jumps.push_back({0.5, 2.0, 4.0});
    sl.V.grid = sl.p.grid;
    sl.V.values = {-1.0, 0.0};
    warped.slices.push_back(sl);
    auto phys = pull_back(warped, w);
    REQUIRE(phys.slices.size() == 1);
    double inv = 1.0 / w.A(0.5);
    CHECK(phys.slices[0].time == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(phys.slices[0].p.values[0] == doctest::Approx(2.0 * inv).epsilon(1e-14));
    CHECK(phys.slices[0].p.jumps[0].right ==
          doctest::Approx(4.0 * inv).epsilon(1e-14));
    // the mass potential is unchanged by the transform
    CHECK(phys.slices[0].V.values[0] == -1.0);
}

} // TEST_SUITE
