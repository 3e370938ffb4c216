#include "doctest.h"
#include "droplet/errors.hpp"
#include "droplet/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <string>

using droplet::invalid_input;
using namespace droplet::scenario;

namespace {

const char* kMinimalIvp =
    "domain = initial_value\n"
    "horizon = 1\n"
    "initial.u = steps 1, 0:-1\n"
    "initial.v = steps 0, -1:1, 1:0\n"
    "grid.x0 = -2\n"
    "grid.x1 = 2\n"
    "grid.cells = 100\n"
    "times = 0.5\n";

const char* kMinimalQuarter =
    "horizon = 1\n"
    "boundary.u = const 1\n"
    "boundary.v = const 1\n"
    "grid.x1 = 2\n"
    "grid.cells = 100\n"
    "times = 0.5, 1\n";

std::string drop_line(const std::string& text, const std::string& key) {
    std::string out;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(pos, end - pos);
        if (line.find(key) == std::string::npos) out += line + "\n";
        pos = end + 1;
    }
    return out;
}

} // namespace

TEST_SUITE("scenario") {

TEST_CASE("parse skips comments and blanks and trims spaces") {
    auto sc = Scenario::parse(
        "# a comment\n"
        "\n"
        "name = demo\n"
        "  horizon =  2.5 \n");
    CHECK(sc.kv.at("name") == "demo");
    CHECK(sc.kv.at("horizon") == "2.5");
}

TEST_CASE("parse rejects malformed lines") {
    CHECK_THROWS_AS(Scenario::parse("name demo\n"), invalid_input);
    CHECK_THROWS_AS(Scenario::parse("= value\n"), invalid_input);
    CHECK_THROWS_AS(Scenario::parse("a = 1\na = 2\n"), invalid_input);
}

TEST_CASE("minimal whole line setup compiles with defaults") {
    auto c = Scenario::parse(kMinimalIvp).compile();
    CHECK(c.domain == Domain::initial_value);
    CHECK(c.route == Route::characteristic);
    CHECK(c.name == "scenario");
    CHECK(c.x0 == -2.0);
    CHECK(c.cells == 100);
    CHECK(c.times.size() == 1);
    CHECK(c.damp.alpha(0.3) == 0.0);
}

TEST_CASE("minimal quarter plane setup compiles") {
    auto c = Scenario::parse(kMinimalQuarter).compile();
    CHECK(c.domain == Domain::quarter_plane);
    CHECK(c.x0 == 0.0);
    CHECK(c.uB(0.5) == 1.0);
    CHECK(c.vB(0.5) == 1.0);
    CHECK(c.times.size() == 2);
}

TEST_CASE("unknown keys are refused by compile") {
    auto sc = Scenario::parse(kMinimalIvp);
    sc.kv["grid.size"] = "10";
    CHECK_THROWS_WITH_AS(sc.compile(),
                         doctest::Contains("grid.size"), invalid_input);
}

TEST_CASE("required keys are each enforced") {
    for (const char* key : {"horizon", "grid.x1", "grid.cells", "times"}) {
        auto text = drop_line(kMinimalQuarter, key);
        CHECK_THROWS_AS(Scenario::parse(text).compile(), invalid_input);
    }
}

TEST_CASE("domain rules police the boundary data") {
    // quarter plane needs both boundary functions
    auto text = drop_line(kMinimalQuarter, "boundary.v");
    CHECK_THROWS_AS(Scenario::parse(text).compile(), invalid_input);
    // the whole line must not have any
    auto sc = Scenario::parse(kMinimalIvp);
    sc.kv["boundary.u"] = "const 1";
    CHECK_THROWS_AS(sc.compile(), invalid_input);
    // quarter plane lives on x >= 0
    auto neg = Scenario::parse(kMinimalQuarter);
    neg.kv["grid.x0"] = "-1";
    CHECK_THROWS_AS(neg.compile(), invalid_input);
}

TEST_CASE("mass data must be nonnegative with compact initial support") {
    auto sc = Scenario::parse(kMinimalIvp);
    sc.set("initial.v", "const 1");
    CHECK_THROWS_AS(sc.compile(), invalid_input);
    sc.set("initial.v", "steps 0, 0:-0.5, 1:0");
    CHECK_THROWS_AS(sc.compile(), invalid_input);
    sc.set("initial.v", "steps 0, 0:0.5, 1:0");
    CHECK_NOTHROW(sc.compile());
}

TEST_CASE("times must ascend and stay inside the horizon") {
    auto sc = Scenario::parse(kMinimalIvp);
    sc.kv["times"] = "0.5, 0.25";
    CHECK_THROWS_AS(sc.compile(), invalid_input);
    sc.kv["times"] = "0";
    CHECK_THROWS_AS(sc.compile(), invalid_input);
    sc.kv["times"] = "0.5, 1.5";
    CHECK_THROWS_AS(sc.compile(), invalid_input);
    sc.kv["times"] = "0.25, 1";
    CHECK_NOTHROW(sc.compile());
}

TEST_CASE("viscous keys demand the viscous route") {
    auto sc = Scenario::parse(kMinimalQuarter);
    sc.kv["viscous.mode"] = "mass";
    CHECK_THROWS_AS(sc.compile(), invalid_input);
    sc.kv["route"] = "viscous";
    CHECK_NOTHROW(sc.compile());
    sc.kv["viscous.mode"] = "sticky";
    CHECK_THROWS_AS(sc.compile(), invalid_input);
}

TEST_CASE("the viscous route will not run the whole line") {
    auto sc = Scenario::parse(kMinimalIvp);
    sc.kv["route"] = "viscous";
    CHECK_THROWS_AS(sc.compile(), invalid_input);
}

TEST_CASE("friction variants parse into the damping spec") {
    auto sc = Scenario::parse(kMinimalIvp);
    sc.kv["alpha.kind"] = "steps";
    sc.kv["alpha.samples"] = "1, 0.5:0";
    auto c = sc.compile();
    CHECK(c.damp.alpha(0.25) == 1.0);
    CHECK(c.damp.alpha(0.75) == 0.0);
    sc.kv["alpha.kind"] = "constant";
    CHECK_THROWS_AS(sc.compile(), invalid_input);  // samples without steps
}

TEST_CASE("set stores trimmed text for the next compile to judge") {
    auto sc = Scenario::parse(kMinimalIvp);
    sc.set(" grid.cells ", " 64 ");
    CHECK(sc.kv.at("grid.cells") == "64");
    CHECK(sc.compile().cells == 64);
    sc.set("grid.cells", "0");
    CHECK_THROWS_AS(sc.compile(), invalid_input);
}

TEST_CASE("canonical text is byte stable and equivalent") {
    auto sc = Scenario::parse(kMinimalQuarter);
    sc.kv["name"] = "stability";
    auto canon = sc.canonical();
    auto again = Scenario::parse(canon).canonical();
    CHECK(canon == again);
    auto c1 = sc.compile();
    auto c2 = Scenario::parse(canon).compile();
    CHECK(c1.cells == c2.cells);
    CHECK(c1.times == c2.times);
    for (double x = 0.0; x <= 1.0; x += 0.17) CHECK(c1.uB(x) == c2.uB(x));
}

TEST_CASE("load reads a file and complains when it is missing") {
    std::string path = "/tmp/droplet_scenario_test.cfg";
    {
        std::ofstream out(path);
        out << kMinimalIvp;
    }
    auto sc = Scenario::load(path);
    CHECK(sc.compile().cells == 100);
    std::remove(path.c_str());
    CHECK_THROWS_AS(Scenario::load(path), invalid_input);
}

TEST_CASE("scenario names are plain identifiers") {
    auto sc = Scenario::parse(kMinimalIvp);
    sc.kv["name"] = "has spaces";
    CHECK_THROWS_AS(sc.compile(), invalid_input);
    sc.kv["name"] = "ok_name-3";
    CHECK(sc.compile().name == "ok_name-3");
}

} // TEST_SUITE
