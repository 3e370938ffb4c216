#include "droplet/piecewise.hpp"
#include "droplet/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace droplet::piecewise {

void PiecewiseFn::validate() const {
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
        if (!(xs[i] < xs[i + 1]))
            throw invalid_input("piecewise breakpoints must be strictly increasing");
    if (kind == Kind::steps && vs.size() != xs.size())
        throw invalid_input("step table needs one value per breakpoint");
    if (kind == Kind::linear) {
        if (xs.size() < 2) throw invalid_input("linear table needs at least two nodes");
        if (vs.size() != xs.size()) throw invalid_input("linear table size mismatch");
    }
    for (double v : vs)
        if (!std::isfinite(v)) throw invalid_input("non-finite piecewise value");
    if (!std::isfinite(head)) throw invalid_input("non-finite piecewise value");
}

double PiecewiseFn::operator()(double x) const {
    switch (kind) {
    case Kind::constant:
        return head;
    case Kind::steps: {
        if (xs.empty() || x < xs.front()) return head;
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        return vs[std::size_t(it - xs.begin()) - 1];
    }
    case Kind::linear: {
        if (x <= xs.front()) return vs.front();
        if (x >= xs.back()) return vs.back();
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        const std::size_t i = std::size_t(it - xs.begin());
        const double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
        return vs[i - 1] + t * (vs[i] - vs[i - 1]);
    }
    }
    return head;
}

double PiecewiseFn::sup_abs(double lo, double hi) const {
    double s = std::fabs((*this)(lo));
    s = std::max(s, std::fabs((*this)(hi)));
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] < lo || xs[i] > hi) continue;
        if (kind == Kind::steps && i > 0) s = std::max(s, std::fabs(vs[i - 1]));
        s = std::max(s, std::fabs((*this)(xs[i])));
    }
    if (kind == Kind::steps && !xs.empty() && xs.front() > lo)
        s = std::max(s, std::fabs(head));
    return s;
}

double PiecewiseFn::sup_pos(double lo, double hi) const {
    double s = std::max(0.0, (*this)(lo));
    s = std::max(s, (*this)(hi));
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] < lo || xs[i] > hi) continue;
        if (kind == Kind::steps && i > 0) s = std::max(s, vs[i - 1]);
        s = std::max(s, (*this)(xs[i]));
    }
    if (kind == Kind::steps && !xs.empty() && xs.front() > lo)
        s = std::max(s, head);
    return s;
}

namespace {

// integral over one cell where the function is linear (or constant)
double cell_integral(const PiecewiseFn& f, double a, double b) {
    return 0.5 * (f(a) + f(std::nextafter(b, a))) * (b - a);
}

template <class CellFn>
double sweep(const PiecewiseFn& f, double a, double b, CellFn cell) {
    if (a == b) return 0;
    if (b < a) return -sweep(f, b, a, cell);
    double acc = 0;
    double lo = a;
    for (double x : f.xs) {
        if (x <= lo) continue;
        if (x >= b) break;
        acc += cell(f, lo, x);
        lo = x;
    }
    acc += cell(f, lo, b);
    return acc;
}

double cell_abs_integral(const PiecewiseFn& f, double a, double b) {
    const double fa = f(a), fb = f(std::nextafter(b, a));
    if (fa * fb >= 0) return 0.5 * std::fabs(fa + fb) * (b - a);
    // linear sign change inside the cell
    const double root = a + (b - a) * fa / (fa - fb);
    return 0.5 * std::fabs(fa) * (root - a) + 0.5 * std::fabs(fb) * (b - root);
}

} // namespace

double PiecewiseFn::integral(double a, double b) const {
    if (kind == Kind::constant) return head * (b - a);
    return sweep(*this, a, b, cell_integral);
}

double PiecewiseFn::abs_integral(double a, double b) const {
    if (kind == Kind::constant) return std::fabs(head) * (b - a);
    return sweep(*this, a, b, cell_abs_integral);
}

bool PiecewiseFn::vanishes_beyond_ends() const {
    switch (kind) {
    case Kind::constant: return head == 0;
    case Kind::steps: return head == 0 && (xs.empty() || vs.back() == 0);
    case Kind::linear: return vs.front() == 0 && vs.back() == 0;
    }
    return false;
}

PiecewiseFn PiecewiseFn::constant(double v) {
    PiecewiseFn f;
    f.kind = Kind::constant;
    f.head = v;
    return f;
}

namespace {

double parse_number(const std::string& tok) {
    std::size_t used = 0;
    double v;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception&) {
        throw invalid_input("bad number '" + tok + "' in piecewise table");
    }
    while (used < tok.size() && std::isspace((unsigned char)tok[used])) ++used;
    if (used != tok.size())
        throw invalid_input("bad number '" + tok + "' in piecewise table");
    return v;
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else
            cur += c;
    }
    out.push_back(cur);
    for (std::string& t : out) {
        const auto b = t.find_first_not_of(" \t");
        const auto e = t.find_last_not_of(" \t");
        t = (b == std::string::npos) ? "" : t.substr(b, e - b + 1);
    }
    return out;
}

} // namespace

PiecewiseFn PiecewiseFn::parse(const std::string& text) {
    std::istringstream in(text);
    std::string word;
    in >> word;
    std::string rest;
    std::getline(in, rest);
    PiecewiseFn f;
    if (word == "const") {
        f.kind = Kind::constant;
        f.head = parse_number(rest);
        return f;
    }
    const auto toks = split_commas(rest);
    auto pair_of = [](const std::string& t) {
        const auto c = t.find(':');
        if (c == std::string::npos)
            throw invalid_input("expected x:value pair, got '" + t + "'");
        return std::pair<double, double>(parse_number(t.substr(0, c)),
                                         parse_number(t.substr(c + 1)));
    };
    if (word == "steps") {
        if (toks.empty()) throw invalid_input("empty step table");
        f.kind = Kind::steps;
        f.head = parse_number(toks[0]);
        for (std::size_t i = 1; i < toks.size(); ++i) {
            auto [x, v] = pair_of(toks[i]);
            f.xs.push_back(x);
            f.vs.push_back(v);
        }
    } else if (word == "linear") {
        f.kind = Kind::linear;
        for (const auto& t : toks) {
            auto [x, v] = pair_of(t);
            f.xs.push_back(x);
            f.vs.push_back(v);
        }
    } else {
        throw invalid_input("unknown data kind '" + word + "' (const/steps/linear)");
    }
    f.validate();
    return f;
}

std::string PiecewiseFn::format() const {
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    std::string out;
    switch (kind) {
    case Kind::constant:
        out = "const " + num(head);
        break;
    case Kind::steps:
        out = "steps " + num(head);
        for (std::size_t i = 0; i < xs.size(); ++i)
            out += ", " + num(xs[i]) + ":" + num(vs[i]);
        break;
    case Kind::linear:
        out = "linear";
        for (std::size_t i = 0; i < xs.size(); ++i)
            out += std::string(i ? ", " : " ") + num(xs[i]) + ":" + num(vs[i]);
        break;
    }
    return out;
}

double CumulativeTable::operator()(double y) const {
    if (y <= nodes.front()) {
        if (y < nodes.front()) extrapolated = true;
        return P.front() + f_left.front() * (y - nodes.front());
    }
    if (y >= nodes.back()) {
        if (y > nodes.back()) extrapolated = true;
        return P.back() + f_left.back() * (y - nodes.back());
    }
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), y);
    const std::size_t i = std::size_t(it - nodes.begin()) - 1;
    const double d = y - nodes[i];
    return P[i] + f_left[i] * d + 0.5 * slope[i] * d * d;
}

CumulativeTable cumulative(const PiecewiseFn& fn, double anchor, double lo, double hi) {
    if (!(lo < hi)) throw invalid_input("cumulative table needs lo < hi");
    std::vector<double> nodes{lo};
    for (double x : fn.xs)
        if (x > lo && x < hi) nodes.push_back(x);
    nodes.push_back(hi);

    CumulativeTable t;
    t.nodes = nodes;
    t.P.resize(nodes.size());
    t.f_left.resize(nodes.size());
    t.slope.assign(nodes.size(), 0.0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        t.P[i] = fn.integral(anchor, nodes[i]);
        if (i + 1 < nodes.size()) {
            const double a = nodes[i], b = nodes[i + 1];
            const double fa = fn(a), fb = fn(std::nextafter(b, a));
            t.f_left[i] = fa;
            t.slope[i] = (fb - fa) / (b - a);
        }
    }
    t.f_left.back() = fn(std::nextafter(hi, lo + (hi - lo) * 2)); // right limit
    return t;
}

double TailTable::operator()(double y) const {
    if (y <= cum.front()) return total;
    if (y >= cum.back()) return 0;
    return total - (cum(y) - cum(cum.front()));
}

TailTable tail_integral(const PiecewiseFn& fn) {
    TailTable t;
    if (fn.kind == Kind::constant || fn.xs.empty()) {
        if (fn.kind != Kind::constant || fn.head != 0)
            if (!fn.vanishes_beyond_ends())
                throw invalid_input("tail integral needs compactly supported data");
        // identically zero
        PiecewiseFn z = PiecewiseFn::constant(0);
        t.cum = cumulative(z, 0, 0, 1);
        t.total = 0;
        return t;
    }
    if (!fn.vanishes_beyond_ends())
        throw invalid_input("tail integral needs data vanishing beyond its breakpoints");
    const double lo = fn.xs.front() - 1, hi = fn.xs.back() + 1;
    t.cum = cumulative(fn, lo, lo, hi);
    t.total = fn.integral(lo, hi);
    return t;
}

bv::SampledBV sample(const PiecewiseFn& fn, const std::vector<double>& grid) {
    bv::SampledBV out;
    out.grid = grid;
    out.values.reserve(grid.size());
    for (double x : grid) {
        double v = fn(x);
        if (fn.kind == Kind::steps) {
            // exact hit on a step: midvalue of the traces
            const auto it = std::lower_bound(fn.xs.begin(), fn.xs.end(), x);
            if (it != fn.xs.end() && *it == x) {
                const std::size_t i = std::size_t(it - fn.xs.begin());
                const double before = (i == 0) ? fn.head : fn.vs[i - 1];
                if (before != fn.vs[i]) v = 0.5 * (before + fn.vs[i]);
            }
        }
        out.values.push_back(v);
    }
    out.validate();
    // jump list from true discontinuities inside the span
    if (fn.kind == Kind::steps) {
        for (std::size_t i = 0; i < fn.xs.size(); ++i) {
            const double x = fn.xs[i];
            if (x <= grid.front() || x >= grid.back()) continue;
            const double before = (i == 0) ? fn.head : fn.vs[i - 1];
            if (before != fn.vs[i])
                out.jumps.push_back(bv::Jump{x, before, fn.vs[i]});
        }
    }
    return out;
}

} // namespace droplet::piecewise
