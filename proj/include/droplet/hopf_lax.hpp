#pragma once
#include "droplet/bv.hpp"
#include "droplet/piecewise.hpp"

#include <functional>
#include <vector>

namespace droplet::hopflax {

// Boundary action table: the running cost K(s) = int_0^s (pB^+)^2 / 2 together
// with a piecewise-linear view of pB itself. Cells are pre-split wherever pB
// changes sign, so K is evaluated from an exact per-cell antiderivative rather
// than quadrature.
struct BoundaryAction {
    std::vector<double> nodes;   // ascending, nodes.front() == 0
    std::vector<double> left;    // pB right-limit at the cell's left node
    std::vector<double> slope;   // pB slope within the cell
    std::vector<double> K;       // running cost at nodes
    double sup_plus = 0;         // sup of pB^+ over the table

    double tau_end() const { return nodes.back(); }
    double pB(double tau) const;
    double action(double tau) const;  // K(tau)
};

BoundaryAction make_boundary_action(const piecewise::PiecewiseFn& pB, double tau_end);
BoundaryAction make_boundary_action(const std::vector<double>& tau,
                                    const std::vector<double>& values);

enum class Branch { interior, boundary };

// Everything the minimization decided at one grid node. When the minimizer is
// not unique the two extreme minimizers y_minus <= y_plus are kept, each with
// the branch that realizes it; for a boundary branch the optimal switch times
// (tau1, tau2) are recorded as well.
struct MinimizerRecord {
    double x = 0, tau = 0;
    double action = 0;
    double y_minus = 0, y_plus = 0;
    Branch branch_minus = Branch::interior, branch_plus = Branch::interior;
    double tau1_minus = 0, tau2_minus = 0;
    double tau1_plus = 0, tau2_plus = 0;
    bool tie = false;
};

struct SearchParams {
    int y_fill = 257;         // uniform y candidates merged with breakpoints
    int tau_cells = 64;       // coarse grid for the (tau1, tau2) simplex
    int refine_rounds = 8;    // bracket-shrink rounds (9-point scans)
    double tie_tol = 1e-9;    // relative co-minimality tolerance
    double jump_threshold = 0.1;
};

double interior_action(double x, double y, double tau);
double boundary_path_action(double x, double y, double tau, double tau1,
                            double tau2, const BoundaryAction& act);
double initial_potential(const bv::SampledBV& p0, double y);

struct BoundaryMin {
    double value;
    double tau1, tau2;
};
// Minimize the boundary path cost over 0 <= tau1 < tau2 < tau for fixed
// (x, y). Ties resolve toward the largest tau2 and smallest tau1.
BoundaryMin min_boundary_action(double x, double y, double tau,
                                const BoundaryAction& act,
                                const SearchParams& sp = {});

// Minimize over y in [y_lo, y_hi] (and over the branch when act != nullptr).
// y_seeds are structural candidates (data breakpoints) merged with a uniform
// fill; every local minimum near the global value is refined so co-minimal
// basins surface as a tie.
MinimizerRecord minimize_potential(double x, double tau,
                                   const piecewise::CumulativeTable& P0,
                                   const BoundaryAction* act, double y_lo,
                                   double y_hi,
                                   const std::vector<double>& y_seeds,
                                   const SearchParams& sp = {});

struct VelocityTraces {
    double left, right;
    bool tie;
};
VelocityTraces velocity(const MinimizerRecord& rec, const BoundaryAction* act);

bool admissible_set_contains(double uB, double trace, double tol);

struct Slice {
    double time;            // tau in the warped frame; t once pulled back
    bv::SampledBV p;        // velocity; jump traces from minimizer ties
    bv::SampledBV V;        // cumulative mass potential
    bv::HalfLineMeasure q;  // d/dx V
    std::vector<MinimizerRecord> recs;
};

struct Diagnostics {
    int entropy_violations = 0;
    bool y_monotone = true;
    bool branches_nested = true;   // boundary region left of interior region
    bool tau2_monotone = true;     // per node, across slice times
};

struct Solution {
    std::vector<Slice> slices;
    Diagnostics diag;
};

Solution solve_ibvp(const piecewise::PiecewiseFn& p0,
                    const piecewise::PiecewiseFn& q0,
                    const BoundaryAction& act,
                    const std::function<double(double)>& qB,
                    const std::vector<double>& grid,
                    const std::vector<double>& taus,
                    const SearchParams& sp = {});

Solution solve_ivp(const piecewise::PiecewiseFn& p0,
                   const piecewise::PiecewiseFn& q0,
                   const std::vector<double>& grid,
                   const std::vector<double>& taus,
                   const SearchParams& sp = {});

struct MassCheckRow {
    double time;
    double trace_p;    // one-sided limit of p at the wall
    double trace_V;
    bool prescribed;   // inflow trace, so the mass condition applies
    double expected;   // qB at this time
    double residual;   // |(-trace_V) - expected| when prescribed, else 0
};

// limit of a slice field as x drops to the wall node. Extrapolates from the
// two innermost interior nodes, except when a detected jump sits inside that
// stencil: then the limit is read off the wall side of the jump so a shock
// hugging the boundary does not pollute the trace.
double wall_limit(const bv::SampledBV& f);

std::vector<MassCheckRow> mass_condition_check(
    const Solution& s, const std::function<double(double)>& qB,
    double trace_tol = 1e-6);

std::vector<double> uniform_grid(double a, double b, int cells);

} // namespace droplet::hopflax
