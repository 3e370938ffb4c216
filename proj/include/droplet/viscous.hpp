#pragma once
#include "droplet/piecewise.hpp"

#include <functional>
#include <vector>

namespace droplet::viscous {

// How the mass unknown is coupled at x = 0. `mass` pins C(0) to the
// prescribed boundary mass through the solved S; `dirichlet` couples C
// through the same one-sided flux row as S.
enum class BoundaryMode { mass, dirichlet };

struct ViscousParams {
    double epsilon = 0.02;
    double length = 10;      // truncated domain [0, length]
    int cells = 2000;
    int steps = 2000;
    BoundaryMode mode = BoundaryMode::mass;
    bool mollify = false;    // smooth the data and clear a boundary collar
    double exponent_guard = 600;
};

struct ViscousSlice {
    double time;
    std::vector<double> x;
    std::vector<double> p;   // recovered velocity (warped frame)
    std::vector<double> V;   // C / S
    std::vector<double> q;   // centered derivative of V
};

struct StepLog {
    double time;
    double sup_p;
    double sup_V;
    double S_min;
};

struct ViscousSolution {
    std::vector<ViscousSlice> slices;
    std::vector<StepLog> log;   // one row per time step, including the ramp
};

// Mollified samples of f on the given nodes: f is cut off below 2*eps and
// convolved with a bump of radius eps, so the result vanishes on [0, eps]
// and agrees with f beyond 3*eps (away from breakpoints).
std::vector<double> mollify_on_grid(const piecewise::PiecewiseFn& f, double eps,
                                    const std::vector<double>& x);

// Same smoothing applied to a scalar function at one point; used for
// boundary data, whose argument is time.
double mollified_value(const std::function<double(double)>& f, double eps,
                       double t);

// Transformed initial data S(x,0), C(x,0) on the given nodes. Throws when
// the transform exponent exceeds the guard.
void initial_heat_data(const piecewise::PiecewiseFn& p0,
                       const piecewise::PiecewiseFn& q0,
                       const std::vector<double>& x, double eps, bool mollify,
                       double exponent_guard, std::vector<double>& S0,
                       std::vector<double>& C0);

// One theta-scheme step of the coupled heat pair on a uniform grid. The
// boundary rows are the one-sided second-order flux conditions; pb and qb
// are evaluated at the new time. Exposed for direct comparison against
// kernel quadrature in tests; the driver below caches factorizations.
void heat_pair_step(std::vector<double>& S, std::vector<double>& C, double h,
                    double eps, double dt, double theta, double pb, double qb,
                    BoundaryMode mode);

ViscousSolution run_viscous(const piecewise::PiecewiseFn& p0,
                            const piecewise::PiecewiseFn& q0,
                            const std::function<double(double)>& pB,
                            const std::function<double(double)>& qB,
                            double tau_max, const std::vector<double>& slice_taus,
                            const ViscousParams& par);

} // namespace droplet::viscous
