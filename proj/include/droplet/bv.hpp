#pragma once
#include <functional>
#include <vector>

namespace droplet::bv {

struct Jump {
    double location;   // strictly inside the grid span
    double left;       // one-sided trace from below
    double right;      // one-sided trace from above
};

// A function of bounded variation sampled on a strictly increasing grid,
// with an explicit list of detected jumps. Between consecutive nodes the
// function is read as linear; across a flagged cell the one-sided traces
// take over.
struct SampledBV {
    std::vector<double> grid;
    std::vector<double> values;
    std::vector<Jump> jumps;

    std::size_t size() const { return grid.size(); }
    void validate() const;                 // throws invalid_input
    double total_variation() const;        // sum of |increments|
    double span() const { return grid.back() - grid.front(); }
};

struct Atom {
    double location;
    double mass;       // signed
};

// Discrete measure on the grid: point masses plus an absolutely continuous
// part. The density lives on cell midpoints (one value per cell of the
// generating grid, zero on cells absorbed by an atom) so that
//   sum(atom masses) + sum(density * cell_width)
// telescopes exactly to the increment of the generating potential.
struct HalfLineMeasure {
    std::vector<Atom> atoms;
    SampledBV density;                 // grid = cell midpoints
    std::vector<double> cell_width;    // widths of the generating cells

    double total_mass() const;
    // integral of f against the measure; f sampled at atom locations and
    // cell midpoints
    double integrate(const std::function<double(double)>& f) const;
};

// Flags cells whose increment carries more than `threshold` of the total
// variation (scaled by cell width relative to the mean spacing, so smooth
// ramps on any grid stay unflagged). Returns a copy of f with the jump
// list rebuilt; traces are the adjacent node values.
SampledBV detect_jumps(const SampledBV& f, double threshold = 0.1);

// Integral over [0,1] of g((1-a)*left + a*right) da: the averaged
// superposition of g along the jump. Gauss-Legendre 16, upgraded to 32 and
// then to adaptive panel bisection if the two estimates disagree.
double averaged_superposition(const std::function<double(double)>& g,
                              double left, double right);

// The nonconservative product g(p) * dV/dx in the Volpert sense: density
// g(p) * V' on continuity cells, and one atom per common jump with mass
// averaged_superposition(g, p-, p+) * (V+ - V-).
HalfLineMeasure volpert_product(const std::function<double(double)>& g,
                                const SampledBV& p, const SampledBV& V);

// dV/dx as a measure: atoms at the jumps of V, difference quotients on the
// remaining cells.
HalfLineMeasure distributional_derivative(const SampledBV& V);

// Rankine-Hugoniot speed of a velocity jump.
double shock_speed(double p_left, double p_right);

} // namespace droplet::bv
