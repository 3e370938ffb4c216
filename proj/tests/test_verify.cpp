#include "doctest.h"
#include "droplet/errors.hpp"
#include "droplet/verify.hpp"

#include <cmath>
#include <vector>

using droplet::invalid_input;
using droplet::piecewise::PiecewiseFn;
using namespace droplet::verify;
namespace hl = droplet::hopflax;
namespace bv = droplet::bv;

namespace {

// a slice holding a single moving atom of mass m at xi, with velocity traces
// p_left / p_right meeting there
hl::Slice atom_slice(double time, double xi, double m, double pl, double pr) {
    hl::Slice sl;
    for (int i = 0; i <= 100; ++i) sl.p.grid.push_back(i * 0.01);
    // a node sitting exactly on the jump carries the left trace; the jump
    // itself is claimed by the cell to its right, so the density stays zero
    auto pick = [&](double x, double lo, double hi) {
        if (std::abs(x - xi) <= 1e-12) return lo;
        return x < xi ? lo : hi;
    };
    for (double x : sl.p.grid) sl.p.values.push_back(pick(x, pl, pr));
    sl.p.jumps.push_back({xi, pl, pr});
    sl.V.grid = sl.p.grid;
    for (double x : sl.V.grid) sl.V.values.push_back(pick(x, -m, 0.0));
    sl.V.jumps.push_back({xi, -m, 0.0});
    sl.q = bv::distributional_derivative(sl.V);
    sl.time = time;
    return sl;
}

} // namespace

TEST_SUITE("verify") {

TEST_CASE("window vanishes at its edges and peaks in the middle") {
    TestFunction phi{1.0, 3.0};
    CHECK(phi(1.0) == 0.0);
    CHECK(phi(3.0) == 0.0);
    CHECK(phi(0.5) == 0.0);
    CHECK(phi(2.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(phi.deriv(1.0) == 0.0);
    CHECK(phi.deriv(3.0) == 0.0);
    // centered finite differences confirm the analytic derivative
    for (double x = 1.05; x < 3.0; x += 0.13) {
        double fd = (phi(x + 1e-6) - phi(x - 1e-6)) / 2e-6;
        CHECK(phi.deriv(x) == doctest::Approx(fd).epsilon(1e-7).scale(1.0));
    }
}

TEST_CASE("dyadic windows cover the span at every level") {
    auto windows = dyadic_windows(0.0, 2.0, 3);
    REQUIRE(!windows.empty());
    // level 0 spans everything once
    CHECK(windows.front().a == 0.0);
    CHECK(windows.front().b == 2.0);
    double narrow = 2.0;
    for (const auto& w : windows) {
        CHECK(w.b > w.a);
        CHECK(w.a >= -1e-12);
        CHECK(w.b <= 2.0 + 1e-12);
        narrow = std::min(narrow, w.b - w.a);
    }
    CHECK(narrow == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("an exactly damped uniform stream leaves no residual") {
    // space-constant velocity decaying like exp(-t) solves the balance law
    // with unit friction; the discrete residual is pure time quadrature
    double c = 0.8, t0 = 0.3, t1 = 0.4;
    hl::Solution sol;
    for (double t : {t0, t1}) {
        hl::Slice sl;
        for (int i = 0; i <= 80; ++i) sl.p.grid.push_back(i * 0.025);
        for (size_t i = 0; i < sl.p.grid.size(); ++i)
            sl.p.values.push_back(c * std::exp(-t));
        sl.V.grid = sl.p.grid;
        sl.V.values.assign(sl.p.grid.size(), 0.0);
        sl.q = bv::distributional_derivative(sl.V);
        sl.time = t;
        sol.slices.push_back(sl);
    }
    auto windows = dyadic_windows(0.0, 2.0, 2);
    auto one = [](double) { return 1.0; };
    auto rep = interior_residual(sol, one, windows);
    CHECK(rep.velocity <= 1e-3);
    CHECK(rep.mass <= 1e-12);
    // dropping the friction term must leave the decay unexplained
    auto zero = [](double) { return 0.0; };
    auto bad = interior_residual(sol, zero, windows);
    CHECK(bad.velocity >= 0.1);
}

TEST_CASE("a transported atom balances when it moves at the trace average") {
    double m = 2.0, pl = 1.0, pr = 0.0;
    double speed = 0.5 * (pl + pr);
    double t0 = 0.1, dt = 0.02;
    hl::Solution sol;
    sol.slices.push_back(atom_slice(t0, 0.4, m, pl, pr));
    sol.slices.push_back(atom_slice(t0 + dt, 0.4 + speed * dt, m, pl, pr));
    auto windows = std::vector<TestFunction>{TestFunction{0.1, 0.9}};
    auto zero = [](double) { return 0.0; };
    auto rep = interior_residual(sol, zero, windows);
    CHECK(rep.mass <= 5e-3);

    // the same pair with a wrong travel speed fails loudly
    hl::Solution off;
    off.slices.push_back(atom_slice(t0, 0.4, m, pl, pr));
    off.slices.push_back(atom_slice(t0 + dt, 0.4 + (speed + 0.4) * dt, m, pl, pr));
    auto bad = interior_residual(off, zero, windows);
    CHECK(bad.mass >= 0.02);
}

TEST_CASE("interior residual needs at least two slices") {
    hl::Solution sol;
    sol.slices.push_back(atom_slice(0.1, 0.4, 1.0, 1.0, 0.0));
    auto zero = [](double) { return 0.0; };
    CHECK_THROWS_AS(interior_residual(sol, zero, dyadic_windows(0.0, 1.0, 1)),
                    invalid_input);
}

TEST_CASE("data residual vanishes on an exact copy and sees an offset") {
    auto u0 = PiecewiseFn::parse("steps 1, 0.5:0");
    auto v0 = PiecewiseFn::parse("steps 0, 0.2:1, 0.7:0");
    hl::Slice sl;
    for (int i = 0; i <= 200; ++i) sl.p.grid.push_back(i * 0.005);
    for (double x : sl.p.grid) sl.p.values.push_back(u0(x));
    sl.V.grid = sl.p.grid;
    for (double x : sl.V.grid) sl.V.values.push_back(-v0.integral(x, 0.7));
    sl.q = bv::distributional_derivative(sl.V);
    auto exact = data_residual(sl, u0, v0);
    CHECK(exact.u_l1 <= 1e-12);
    CHECK(exact.V_sup <= 1e-12);

    for (auto& v : sl.p.values) v += 0.25;
    auto off = data_residual(sl, u0, v0);
    CHECK(off.u_l1 == doctest::Approx(0.25).epsilon(0.02));
}

TEST_CASE("entropy audit counts only increasing jumps") {
    bv::SampledBV u;
    u.grid = {0.0, 1.0, 2.0, 3.0};
    u.values = {1.0, 0.0, 0.0, 1.0};
    u.jumps.push_back({0.5, 1.0, 0.0});   // admissible drop
    u.jumps.push_back({2.5, 0.0, 1.0});   // inadmissible rise
    CHECK(entropy_audit(u) == 1);
    CHECK(entropy_audit(u, 2.0) == 0);    // tolerance swallows the rise
}

TEST_CASE("boundary audit accepts the two admissible trace branches") {
    hl::Solution sol;
    // trace equal to the inflow value
    {
        hl::Slice sl;
        for (int i = 0; i <= 50; ++i) sl.p.grid.push_back(i * 0.02);
        sl.p.values.assign(sl.p.grid.size(), 1.0);
        sl.V.grid = sl.p.grid;
        sl.V.values.assign(sl.p.grid.size(), 0.0);
        sl.q = bv::distributional_derivative(sl.V);
        sl.time = 0.5;
        sol.slices.push_back(sl);
    }
    auto rows = boundary_audit(sol, [](double) { return 1.0; }, 1e-6);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].trace == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rows[0].admissible);

    // an interior value far from the inflow branch is flagged
    auto flagged = boundary_audit(sol, [](double) { return 2.0; }, 1e-6);
    CHECK_FALSE(flagged[0].admissible);

    // a fast outgoing stream sits in the tail branch of the same data
    hl::Solution out;
    {
        hl::Slice sl;
        for (int i = 0; i <= 50; ++i) sl.p.grid.push_back(i * 0.02);
        sl.p.values.assign(sl.p.grid.size(), -3.0);
        sl.V.grid = sl.p.grid;
        sl.V.values.assign(sl.p.grid.size(), 0.0);
        sl.q = bv::distributional_derivative(sl.V);
        sl.time = 0.5;
        out.slices.push_back(sl);
    }
    auto outflow = boundary_audit(out, [](double) { return 2.0; }, 1e-6);
    CHECK(outflow[0].admissible);
}

TEST_CASE("shock transport matches atoms across slices") {
    double m = 1.5, pl = 1.0, pr = 0.0;
    double speed = 0.5;
    hl::Solution sol;
    sol.slices.push_back(atom_slice(0.2, 0.3, m, pl, pr));
    sol.slices.push_back(atom_slice(0.24, 0.3 + speed * 0.04, m, pl, pr));
    auto rows = shock_transport_check(sol);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].matched);
    CHECK(rows[0].speed == doctest::Approx(speed).epsilon(1e-10));
    CHECK(rows[0].volpert_speed == doctest::Approx(speed).epsilon(1e-12));
    CHECK(rows[0].residual <= 1e-10);
    CHECK(rows[0].mass == doctest::Approx(m).epsilon(1e-12));

    // remove the second atom: nothing to match
    hl::Solution gone;
    gone.slices.push_back(atom_slice(0.2, 0.3, m, pl, pr));
    hl::Slice flat;
    flat.time = 0.24;
    flat.p.grid = gone.slices[0].p.grid;
    flat.p.values.assign(flat.p.grid.size(), 0.0);
    flat.V.grid = flat.p.grid;
    flat.V.values.assign(flat.p.grid.size(), 0.0);
    flat.q = bv::distributional_derivative(flat.V);
    gone.slices.push_back(flat);
    auto none = shock_transport_check(gone);
    for (const auto& r : none) CHECK_FALSE(r.matched);
}

} // TEST_SUITE
