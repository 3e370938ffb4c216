#pragma once
#include "droplet/piecewise.hpp"

#include <vector>

namespace droplet::hopflax {
struct Solution;
}

namespace droplet::damping {

// Damping coefficient alpha(t) on [0, horizon]. Constant and
// piecewise-linear/tabulated coefficients share the piecewise
// representation; anything it can express is fair game.
struct DampingSpec {
    piecewise::PiecewiseFn alpha;
    double horizon = 1;

    double operator()(double t) const { return alpha(t); }
    double l1_norm() const { return alpha.abs_integral(0, horizon); }
    void validate() const;
};

// The conjugation tables: amplitude A(t) = exp(int_0^t alpha) and the
// warped clock tau(t) = int_0^t ds / A(s), with tau(0) = 0 and A(0) = 1.
// The alpha antiderivative is exact per cell (alpha is at worst piecewise
// linear), so A(t) is exact everywhere; the clock is cumulative trapezoid
// on the refined node set and second order in the resolution.
struct TimeWarp {
    double horizon = 0;
    double tau_max = 0;
    std::vector<double> t_nodes;
    std::vector<double> cum_alpha;   // exact antiderivative at nodes
    std::vector<double> alpha_node;  // alpha right-limit at node
    std::vector<double> alpha_slope; // within cell
    std::vector<double> clock;       // tau at nodes

    double A(double t) const;
    double tau(double t) const;
    double t_of(double tau) const;
};

TimeWarp build_warp(const DampingSpec& spec, int resolution = 4096);

// Boundary data carried into the warped frame: p_B(tau) = A(t(tau)) u_B(t(tau))
// and q_B(tau) = v_B(t(tau)), tabulated on the clock nodes. Initial data are
// not rescaled (A(0) = 1).
struct PushedBoundary {
    std::vector<double> tau;
    std::vector<double> pB;
    std::vector<double> qB;
};
PushedBoundary push_data(const piecewise::PiecewiseFn& uB,
                         const piecewise::PiecewiseFn& vB, const TimeWarp& w);

// Undo the conjugation on a solved family of slices: each slice at warped
// time tau is relabeled to t with tau(t) = tau, velocity values and traces
// are divided by A(t), and the mass fields are carried over unchanged.
hopflax::Solution pull_back(const hopflax::Solution& warped, const TimeWarp& w);

} // namespace droplet::damping
