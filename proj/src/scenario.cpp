#include "droplet/scenario.hpp"
#include "droplet/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace droplet::scenario {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double to_number(const std::string& key, const std::string& s) {
    try {
        size_t used = 0;
        double v = std::stod(s, &used);
        while (used < s.size() && std::isspace((unsigned char)s[used])) used++;
        if (used != s.size()) throw std::invalid_argument("trailing text");
        return v;
    } catch (const std::exception&) {
        throw invalid_input("key '" + key + "': cannot read number from '" + s + "'");
    }
}

int to_int(const std::string& key, const std::string& s) {
    double v = to_number(key, s);
    if (v != std::floor(v) || std::fabs(v) > 1e9)
        throw invalid_input("key '" + key + "': expected an integer, got '" + s + "'");
    return (int)v;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char* kKnownKeys[] = {
    "name",          "domain",         "route",
    "horizon",       "alpha.kind",     "alpha.value",
    "alpha.samples", "initial.u",      "initial.v",
    "boundary.u",    "boundary.v",     "grid.x0",
    "grid.x1",       "grid.cells",     "times",
    "search.y_fill", "search.tau_cells", "search.refine_rounds",
    "search.jump_threshold",           "warp.resolution",
    "viscous.epsilon", "viscous.length", "viscous.cells",
    "viscous.steps", "viscous.mode",   "viscous.mollify",
};

} // namespace

Scenario Scenario::parse(const std::string& text) {
    Scenario sc;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw invalid_input("line " + std::to_string(lineno) +
                                ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw invalid_input("line " + std::to_string(lineno) + ": empty key");
        if (sc.kv.count(key))
            throw invalid_input("duplicate key '" + key + "'");
        sc.kv[key] = value;
    }
    return sc;
}

Scenario Scenario::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw invalid_input("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

void Scenario::set(const std::string& key, const std::string& value) {
    kv[trim(key)] = trim(value);
}

Compiled Scenario::compile() const {
    for (const auto& [k, v] : kv) {
        bool known = false;
        for (const char* name : kKnownKeys)
            if (k == name) known = true;
        if (!known) throw invalid_input("unknown key '" + k + "'");
    }
    auto find = [&](const std::string& k) -> const std::string* {
        auto it = kv.find(k);
        return it == kv.end() ? nullptr : &it->second;
    };
    auto need = [&](const std::string& k) -> const std::string& {
        const std::string* v = find(k);
        if (!v) throw invalid_input("missing required key '" + k + "'");
        return *v;
    };
    auto num_or = [&](const std::string& k, double d) {
        const std::string* v = find(k);
        return v ? to_number(k, *v) : d;
    };
    auto int_or = [&](const std::string& k, int d) {
        const std::string* v = find(k);
        return v ? to_int(k, *v) : d;
    };
    auto fn_of = [&](const std::string& k, const std::string& fallback) {
        const std::string* v = find(k);
        try {
            return piecewise::PiecewiseFn::parse(v ? *v : fallback);
        } catch (const invalid_input& e) {
            throw invalid_input("key '" + k + "': " + e.what());
        }
    };

    Compiled c;
    c.name = find("name") ? *find("name") : "scenario";
    for (char ch : c.name)
        if (!(std::isalnum((unsigned char)ch) || ch == '_' || ch == '-'))
            throw invalid_input("scenario name must be alphanumeric with _ or -");

    const std::string dom = find("domain") ? *find("domain") : "quarter_plane";
    if (dom == "quarter_plane")
        c.domain = Domain::quarter_plane;
    else if (dom == "initial_value")
        c.domain = Domain::initial_value;
    else
        throw invalid_input("domain must be quarter_plane or initial_value");

    const std::string rt = find("route") ? *find("route") : "characteristic";
    if (rt == "characteristic")
        c.route = Route::characteristic;
    else if (rt == "viscous")
        c.route = Route::viscous;
    else
        throw invalid_input("route must be characteristic or viscous");
    if (c.route == Route::viscous && c.domain == Domain::initial_value)
        throw invalid_input("the viscous route needs the quarter-plane domain");

    c.damp.horizon = to_number("horizon", need("horizon"));
    const std::string akind = find("alpha.kind") ? *find("alpha.kind") : "constant";
    if (akind == "constant") {
        if (find("alpha.samples"))
            throw invalid_input("alpha.samples is only for linear or steps damping");
        c.damp.alpha = piecewise::PiecewiseFn::constant(num_or("alpha.value", 0.0));
    } else if (akind == "linear" || akind == "steps") {
        if (find("alpha.value"))
            throw invalid_input("alpha.value is only for constant damping");
        c.damp.alpha = piecewise::PiecewiseFn::parse(akind + " " + need("alpha.samples"));
    } else {
        throw invalid_input("alpha.kind must be constant, linear, or steps");
    }
    c.damp.validate();

    c.u0 = fn_of("initial.u", "const 0");
    c.v0 = fn_of("initial.v", "const 0");
    if (c.domain == Domain::quarter_plane) {
        if (!find("boundary.u") || !find("boundary.v"))
            throw invalid_input("quarter-plane runs need boundary.u and boundary.v");
        c.uB = fn_of("boundary.u", "const 0");
        c.vB = fn_of("boundary.v", "const 0");
    } else if (find("boundary.u") || find("boundary.v")) {
        throw invalid_input("initial-value runs take no boundary data");
    }
    if (!c.v0.vanishes_beyond_ends())
        throw invalid_input("initial.v must have compact support");
    auto nonneg = [](const piecewise::PiecewiseFn& f, const std::string& what) {
        if (f.head < 0) throw invalid_input(what + " must be nonnegative");
        for (double v : f.vs)
            if (v < 0) throw invalid_input(what + " must be nonnegative");
    };
    nonneg(c.v0, "initial.v");
    if (c.domain == Domain::quarter_plane) nonneg(c.vB, "boundary.v");

    c.x0 = num_or("grid.x0", 0.0);
    c.x1 = to_number("grid.x1", need("grid.x1"));
    c.cells = to_int("grid.cells", need("grid.cells"));
    if (!(c.x1 > c.x0) || c.cells < 1)
        throw invalid_input("grid needs x1 > x0 and at least one cell");
    if (c.domain == Domain::quarter_plane && c.x0 < 0)
        throw invalid_input("the quarter-plane grid must not cross x = 0");

    {
        std::istringstream ts(need("times"));
        std::string piece;
        while (std::getline(ts, piece, ',')) {
            piece = trim(piece);
            if (piece.empty()) throw invalid_input("times has an empty entry");
            c.times.push_back(to_number("times", piece));
        }
        if (c.times.empty()) throw invalid_input("times must list at least one time");
        for (size_t i = 0; i < c.times.size(); ++i) {
            if (!(c.times[i] > 0))
                throw invalid_input("slice times must be positive");
            if (i && !(c.times[i] > c.times[i - 1]))
                throw invalid_input("slice times must increase");
        }
        if (c.times.back() > c.damp.horizon * (1 + 1e-12))
            throw invalid_input("slice times must stay within the horizon");
    }

    c.search.y_fill = int_or("search.y_fill", c.search.y_fill);
    c.search.tau_cells = int_or("search.tau_cells", c.search.tau_cells);
    c.search.refine_rounds = int_or("search.refine_rounds", c.search.refine_rounds);
    c.search.jump_threshold = num_or("search.jump_threshold", c.search.jump_threshold);
    if (c.search.y_fill < 8 || c.search.tau_cells < 4 || c.search.refine_rounds < 1 ||
        !(c.search.jump_threshold > 0))
        throw invalid_input("search parameters out of range");

    c.warp_resolution = int_or("warp.resolution", 4096);
    if (c.warp_resolution < 2) throw invalid_input("warp.resolution must be at least 2");

    c.visc.epsilon = num_or("viscous.epsilon", 0.02);
    c.visc.length = num_or("viscous.length", 0.0);
    c.visc.cells = int_or("viscous.cells", 2000);
    c.visc.steps = int_or("viscous.steps", 2000);
    const std::string* vm = find("viscous.mode");
    if (vm) {
        if (c.route != Route::viscous)
            throw invalid_input("viscous.mode needs route = viscous");
        if (*vm == "mass")
            c.visc.mode = viscous::BoundaryMode::mass;
        else if (*vm == "dirichlet")
            c.visc.mode = viscous::BoundaryMode::dirichlet;
        else
            throw invalid_input("viscous.mode must be mass or dirichlet");
    }
    const std::string* mo = find("viscous.mollify");
    if (mo) {
        if (*mo == "0" || *mo == "false")
            c.visc.mollify = false;
        else if (*mo == "1" || *mo == "true")
            c.visc.mollify = true;
        else
            throw invalid_input("viscous.mollify must be 0 or 1");
    }
    if (c.route == Route::viscous &&
        (!(c.visc.epsilon > 0) || c.visc.length < 0 || c.visc.cells < 8 ||
         c.visc.steps < 2))
        throw invalid_input("viscous parameters out of range");
    return c;
}

std::string Scenario::canonical() const {
    Compiled c = compile();
    std::ostringstream out;
    out << "name = " << c.name << "\n";
    out << "domain = "
        << (c.domain == Domain::quarter_plane ? "quarter_plane" : "initial_value")
        << "\n";
    out << "route = "
        << (c.route == Route::characteristic ? "characteristic" : "viscous") << "\n";
    out << "horizon = " << fmt(c.damp.horizon) << "\n";
    std::string af = c.damp.alpha.format();
    size_t sp = af.find(' ');
    std::string kind = af.substr(0, sp);
    if (kind == "const") {
        out << "alpha.kind = constant\n";
        out << "alpha.value = " << af.substr(sp + 1) << "\n";
    } else {
        out << "alpha.kind = " << kind << "\n";
        out << "alpha.samples = " << af.substr(sp + 1) << "\n";
    }
    out << "initial.u = " << c.u0.format() << "\n";
    out << "initial.v = " << c.v0.format() << "\n";
    if (c.domain == Domain::quarter_plane) {
        out << "boundary.u = " << c.uB.format() << "\n";
        out << "boundary.v = " << c.vB.format() << "\n";
    }
    out << "grid.x0 = " << fmt(c.x0) << "\n";
    out << "grid.x1 = " << fmt(c.x1) << "\n";
    out << "grid.cells = " << c.cells << "\n";
    out << "times = ";
    for (size_t i = 0; i < c.times.size(); ++i)
        out << (i ? ", " : "") << fmt(c.times[i]);
    out << "\n";
    out << "search.y_fill = " << c.search.y_fill << "\n";
    out << "search.tau_cells = " << c.search.tau_cells << "\n";
    out << "search.refine_rounds = " << c.search.refine_rounds << "\n";
    out << "search.jump_threshold = " << fmt(c.search.jump_threshold) << "\n";
    out << "warp.resolution = " << c.warp_resolution << "\n";
    if (c.route == Route::viscous) {
        out << "viscous.epsilon = " << fmt(c.visc.epsilon) << "\n";
        out << "viscous.length = " << fmt(c.visc.length) << "\n";
        out << "viscous.cells = " << c.visc.cells << "\n";
        out << "viscous.steps = " << c.visc.steps << "\n";
        out << "viscous.mode = "
            << (c.visc.mode == viscous::BoundaryMode::mass ? "mass" : "dirichlet")
            << "\n";
        out << "viscous.mollify = " << (c.visc.mollify ? 1 : 0) << "\n";
    }
    return out.str();
}

} // namespace droplet::scenario
