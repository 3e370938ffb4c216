#include "doctest.h"
#include "droplet/damping.hpp"
#include "droplet/errors.hpp"
#include "droplet/hopf_lax.hpp"
#include "droplet/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using droplet::invalid_input;
using namespace droplet;

namespace {

scenario::Scenario delta_shock_sc() {
    return scenario::Scenario::parse(
        "domain = initial_value\n"
        "horizon = 1\n"
        "initial.u = steps 1, 0:-1\n"
        "initial.v = steps 0, -1:1, 1:0\n"
        "grid.x0 = -2\n"
        "grid.x1 = 2\n"
        "grid.cells = 200\n"
        "times = 0.25, 0.5\n");
}

scenario::Scenario inflow_sc() {
    return scenario::Scenario::parse(
        "horizon = 1\n"
        "boundary.u = const 1\n"
        "boundary.v = const 1\n"
        "grid.x1 = 2\n"
        "grid.cells = 200\n"
        "times = 0.5, 1\n");
}

scenario::Scenario viscous_sc(bool mollify) {
    auto sc = scenario::Scenario::parse(
        "route = viscous\n"
        "horizon = 1\n"
        "boundary.u = const 1\n"
        "boundary.v = const 1\n"
        "grid.x1 = 2\n"
        "grid.cells = 100\n"
        "times = 0.4, 1\n"
        "viscous.epsilon = 0.05\n"
        "viscous.length = 3\n"
        "viscous.cells = 160\n"
        "viscous.steps = 120\n"
        "viscous.mode = mass\n");
    sc.set("viscous.mollify", mollify ? "1" : "0");
    return sc;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(bool(f));
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag)
        : path(std::filesystem::temp_directory_path() / ("droplet_runner_" + tag)) {
        std::filesystem::remove_all(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

} // namespace

TEST_SUITE("runner") {

TEST_CASE("execute relabels whole line slices to physical times") {
    auto rr = runner::execute(delta_shock_sc());
    REQUIRE(rr.physical.slices.size() == 2);
    CHECK(std::fabs(rr.physical.slices[0].time - 0.25) <= 1e-9);
    CHECK(std::fabs(rr.physical.slices[1].time - 0.5) <= 1e-9);
    CHECK(rr.mass.empty());
    CHECK(rr.steplog.empty());
    // the standing shock carries mass 2t at the origin
    REQUIRE(rr.physical.slices[1].q.atoms.size() == 1);
    CHECK(rr.physical.slices[1].q.atoms[0].location == 0.0);
    CHECK(std::fabs(rr.physical.slices[1].q.atoms[0].mass - 1.0) <= 1e-5);
}

TEST_CASE("execute with friction matches the hand-wired composition") {
    auto sc = delta_shock_sc();
    sc.set("alpha.value", "1");
    sc.set("warp.resolution", "16384");
    auto rr = runner::execute(sc);
    REQUIRE(rr.physical.slices.size() == 2);

    auto c = sc.compile();
    auto warp = damping::build_warp(c.damp, c.warp_resolution);
    auto grid = hopflax::uniform_grid(c.x0, c.x1, c.cells);
    std::vector<double> taus = {warp.tau(0.25), warp.tau(0.5)};
    auto warped = hopflax::solve_ivp(c.u0, c.v0, grid, taus, c.search);

    for (size_t s = 0; s < 2; ++s) {
        const auto& got = rr.physical.slices[s];
        const auto& raw = warped.slices[s];
        CHECK(std::fabs(got.time - c.times[s]) <= 1e-6);
        const double scale = 1.0 / warp.A(c.times[s]);
        for (size_t i = 0; i < got.p.values.size(); ++i) {
            CHECK(std::fabs(got.p.values[i] - scale * raw.p.values[i]) <= 1e-12);
            CHECK(got.V.values[i] == raw.V.values[i]);
        }
    }
}

TEST_CASE("quarter-plane execute reports mass rows only from the wall") {
    auto rr = runner::execute(inflow_sc());
    REQUIRE(rr.mass.size() == 2);
    for (const auto& row : rr.mass) {
        CHECK(row.prescribed);
        CHECK(std::fabs(-row.trace_V - row.expected) <= 1e-6);
        CHECK(row.residual <= 1e-6);
    }

    auto off = inflow_sc();
    off.set("grid.x0", "0.25");
    CHECK(runner::execute(off).mass.empty());
}

TEST_CASE("viscous execute converts slices and the step log") {
    auto rr = runner::execute(viscous_sc(false));
    REQUIRE(rr.physical.slices.size() == 2);
    CHECK(rr.mass.empty());
    REQUIRE(rr.steplog.size() == 121);
    CHECK(rr.steplog.front().time == 0.0);
    CHECK(std::fabs(rr.steplog.back().time - 1.0) <= 1e-9);
    for (const auto& row : rr.steplog) CHECK(row.S_min > 0.0);

    const auto& sl = rr.physical.slices[0];
    CHECK(sl.p.grid.size() == 161);
    CHECK(std::fabs(sl.time - 0.4) <= 1e-9);
    CHECK(sl.q.density.grid.size() + 1 == sl.p.grid.size());

    // smoothing the boundary ramp delays the inflow, so the early sup is lower
    auto rm = runner::execute(viscous_sc(true));
    CHECK(rm.steplog[1].sup_p < rr.steplog[1].sup_p);
}

TEST_CASE("run writes the manifest and per-slice artifacts") {
    TempDir dir("artifacts");
    auto sc = inflow_sc();
    auto rr = runner::run(sc, dir.path.string());

    REQUIRE(!rr.files.empty());
    CHECK(rr.files.front() == "manifest.cfg");
    CHECK(slurp(dir.path / "manifest.cfg") == sc.canonical());

    std::vector<std::string> expect = {"manifest.cfg",    "slice_000.csv",
                                       "density_000.csv", "slice_001.csv",
                                       "density_001.csv", "atoms.csv",
                                       "boundary.csv",    "diagnostics.csv"};
    CHECK(rr.files == expect);
    for (const auto& name : rr.files)
        CHECK(std::filesystem::exists(dir.path / name));

    auto slice = slurp(dir.path / "slice_000.csv");
    CHECK(slice.rfind("x,u,V\n", 0) == 0);
    size_t rows = 0;
    for (char ch : slice) rows += ch == '\n';
    CHECK(rows == 202);  // header plus one row per node

    auto diag = slurp(dir.path / "diagnostics.csv");
    CHECK(diag.find("entropy_violations,0") != std::string::npos);
    CHECK(diag.find("minimizers_ordered,1") != std::string::npos);
}

TEST_CASE("run omits the boundary file when the grid leaves the wall") {
    TempDir dir("nowall");
    auto sc = inflow_sc();
    sc.set("grid.x0", "0.25");
    auto rr = runner::run(sc, dir.path.string());
    for (const auto& name : rr.files) CHECK(name != "boundary.csv");
    CHECK(!std::filesystem::exists(dir.path / "boundary.csv"));
}

TEST_CASE("run is deterministic byte for byte") {
    TempDir a("det_a");
    TempDir b("det_b");
    auto sc = delta_shock_sc();
    auto ra = runner::run(sc, a.path.string());
    auto rb = runner::run(sc, b.path.string());
    REQUIRE(ra.files == rb.files);
    for (const auto& name : ra.files)
        CHECK(slurp(a.path / name) == slurp(b.path / name));
}

TEST_CASE("run refuses unusable output directories") {
    CHECK_THROWS_AS(runner::run(delta_shock_sc(), ""), invalid_input);
    auto blocker = std::filesystem::temp_directory_path() / "droplet_runner_blocker";
    { std::ofstream f(blocker); f << "x"; }
    CHECK_THROWS_AS(
        runner::run(delta_shock_sc(), (blocker / "sub").string()), invalid_input);
    std::filesystem::remove(blocker);
}

TEST_CASE("converge validates its cell ladder") {
    auto sc = delta_shock_sc();
    CHECK_THROWS_AS(runner::converge(sc, {100}, ""), invalid_input);
    CHECK_THROWS_AS(runner::converge(sc, {200, 100}, ""), invalid_input);
    CHECK_THROWS_AS(runner::converge(sc, {0, 100}, ""), invalid_input);
}

TEST_CASE("converge tightens along the ladder and logs a table") {
    TempDir dir("conv");
    auto rows = runner::converge(inflow_sc(), {100, 200, 400}, dir.path.string());
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].cells == 100);
    CHECK(std::isnan(rows[0].distance));
    CHECK(rows[1].distance > 0);
    CHECK(rows[2].distance < rows[1].distance);

    auto csv = slurp(dir.path / "convergence.csv");
    CHECK(csv.rfind("cells,distance\n", 0) == 0);
    CHECK(csv.find("\n100,\n") != std::string::npos);  // first level has no distance
}

TEST_CASE("verify_run passes its own solutions and scales tolerances") {
    CHECK_THROWS_AS(runner::verify_run(delta_shock_sc(), 0.0), invalid_input);
    CHECK_THROWS_AS(runner::verify_run(delta_shock_sc(), -1.0), invalid_input);

    auto rep = runner::verify_run(inflow_sc());
    CHECK(rep.all_passed);
    REQUIRE(!rep.checks.empty());
    bool saw_entropy = false, saw_mass = false;
    for (const auto& ck : rep.checks) {
        CHECK(!ck.name.empty());
        CHECK(ck.passed);
        if (ck.name == "entropy.downward_jumps") saw_entropy = true;
        if (ck.name == "boundary.mass_condition") saw_mass = true;
    }
    CHECK(saw_entropy);
    CHECK(saw_mass);

    auto rep2 = runner::verify_run(delta_shock_sc());
    CHECK(rep2.all_passed);

    auto rep3 = runner::verify_run(viscous_sc(true));
    CHECK(rep3.all_passed);
    bool saw_sup = false;
    for (const auto& ck : rep3.checks)
        if (ck.name == "bounds.velocity_sup") saw_sup = true;
    CHECK(saw_sup);
}

} // TEST_SUITE
