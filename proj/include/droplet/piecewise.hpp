#pragma once
#include "droplet/bv.hpp"

#include <string>
#include <vector>

namespace droplet::piecewise {

// Scenario data functions: constants, step functions, and continuous
// piecewise-linear interpolants. Steps are right-continuous; outside their
// breakpoints both kinds extend by the nearest value.
enum class Kind { constant, steps, linear };

struct PiecewiseFn {
    Kind kind = Kind::constant;
    double head = 0;                  // constant value / step value before xs[0]
    std::vector<double> xs;           // breakpoints, strictly increasing
    std::vector<double> vs;           // value on [xs[i], xs[i+1]) or at node

    double operator()(double x) const;
    double sup_abs(double lo, double hi) const;
    double sup_pos(double lo, double hi) const;   // sup of max(value, 0)
    double integral(double a, double b) const;    // exact
    double abs_integral(double a, double b) const;
    bool vanishes_beyond_ends() const;            // 0 outside [xs.front(), xs.back()]
    std::vector<double> breakpoints() const { return xs; }
    void validate() const;

    static PiecewiseFn constant(double v);
    // textual forms used by scenario configs: "const 1", "steps 1, 0.5:0",
    // "linear 0:0, 1:1"
    static PiecewiseFn parse(const std::string& text);
    std::string format() const;
};

// Exact antiderivative table of a piecewise-linear integrand: quadratic in
// every cell, linear extension beyond the ends. Evaluation never throws;
// out-of-range arguments use the extension (the extrapolated flag is for
// callers that care).
struct CumulativeTable {
    std::vector<double> nodes;        // strictly increasing
    std::vector<double> P;            // antiderivative at nodes
    std::vector<double> f_left;       // integrand at node (right limit)
    std::vector<double> slope;        // integrand slope within cell i
    mutable bool extrapolated = false;

    double operator()(double y) const;
    double front() const { return nodes.front(); }
    double back() const { return nodes.back(); }
};

// Antiderivative from `anchor` of fn, with cells split at breakpoints.
CumulativeTable cumulative(const PiecewiseFn& fn, double anchor, double lo, double hi);

// Tail integral y -> integral of fn over [y, +inf), reading fn as zero
// beyond its last breakpoint (and before its first).
struct TailTable {
    CumulativeTable cum;   // antiderivative over the support
    double total = 0;
    double operator()(double y) const;
};
TailTable tail_integral(const PiecewiseFn& fn);

// Sample onto a grid for the BV machinery. Nodes that land exactly on a
// step discontinuity take the trace midvalue, which keeps cumulative
// trapezoid sums exact across the jump pair; the jump list is filled from
// the breakpoints.
bv::SampledBV sample(const PiecewiseFn& fn, const std::vector<double>& grid);

} // namespace droplet::piecewise
