#pragma once
#include "droplet/bv.hpp"
#include "droplet/hopf_lax.hpp"
#include "droplet/piecewise.hpp"

#include <functional>
#include <vector>

namespace droplet::verify {

// compactly supported C^2 window: the cubed parabola on [a, b]
struct TestFunction {
    double a = 0, b = 1;
    double operator()(double x) const;
    double deriv(double x) const;
};

// half-overlapping windows at dyadic widths covering [lo, hi]
std::vector<TestFunction> dyadic_windows(double lo, double hi, int levels = 8);

// weak residuals of the two balance laws against every window, formed from
// centered differences of consecutive slices
struct ResidualReport {
    double velocity = 0;  // worst conservation-form residual
    double mass = 0;      // worst transport residual of the mass measure
    std::vector<double> per_window_velocity;
    std::vector<double> per_window_mass;
};
ResidualReport interior_residual(const hopflax::Solution& sol,
                                 const std::function<double(double)>& alpha,
                                 const std::vector<TestFunction>& windows);

struct DataResidual {
    double u_l1 = 0;   // L1 distance of the velocity slice to the data
    double V_sup = 0;  // sup distance of the mass potential to the data
};
DataResidual data_residual(const std::vector<double>& x,
                           const std::vector<double>& u,
                           const std::vector<double>& V,
                           const piecewise::PiecewiseFn& u0,
                           const piecewise::PiecewiseFn& v0);
DataResidual data_residual(const hopflax::Slice& sl,
                           const piecewise::PiecewiseFn& u0,
                           const piecewise::PiecewiseFn& v0);

// number of listed jumps that increase (left trace below right trace)
int entropy_audit(const bv::SampledBV& u, double tol = 1e-9);

struct BoundaryRow {
    double time;
    double trace;     // velocity extrapolated toward x = 0 from inside
    double expected;  // prescribed boundary velocity
    bool admissible;
};
std::vector<BoundaryRow> boundary_audit(const hopflax::Solution& sol,
                                        const std::function<double(double)>& uB,
                                        double tol);

// atom-by-atom transport check between consecutive slices: a moving atom
// must travel with the trace average of the velocity across it
struct ShockRow {
    double t0 = 0, t1 = 0;
    double loc0 = 0, loc1 = 0;
    double speed = 0;          // measured from the matched positions
    double volpert_speed = 0;  // trace average across the jump
    double mass = 0;           // averaged atom mass
    double residual = 0;       // |(volpert_speed - speed) * mass|
    bool matched = false;
};
std::vector<ShockRow> shock_transport_check(const hopflax::Solution& sol);

} // namespace droplet::verify
