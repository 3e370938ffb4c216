#include "droplet/damping.hpp"
#include "droplet/errors.hpp"
#include "droplet/hopf_lax.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace droplet::damping {

void DampingSpec::validate() const {
    alpha.validate();
    if (!(horizon > 0) || !std::isfinite(horizon))
        throw invalid_input("damping horizon must be positive and finite");
    for (double v : alpha.vs)
        if (!std::isfinite(v)) throw invalid_input("damping coefficient has a non-finite sample");
}

TimeWarp build_warp(const DampingSpec& spec, int resolution) {
    spec.validate();
    if (resolution < 2) throw invalid_input("warp resolution must be at least 2");
    const double T = spec.horizon;

    std::vector<double> nodes;
    nodes.reserve(resolution + 8);
    for (int i = 0; i <= resolution; ++i) nodes.push_back(T * i / resolution);
    for (double b : spec.alpha.breakpoints())
        if (b > 0 && b < T) nodes.push_back(b);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end(),
                            [&](double a, double b) { return b - a < 1e-15 * T; }),
                nodes.end());
    nodes.back() = T;

    TimeWarp w;
    w.horizon = T;
    w.t_nodes = nodes;
    const size_t n = nodes.size();
    w.cum_alpha.resize(n);
    w.alpha_node.resize(n);
    w.alpha_slope.assign(n, 0.0);
    w.clock.resize(n);

    w.cum_alpha[0] = 0;
    for (size_t i = 0; i + 1 < n; ++i)
        w.cum_alpha[i + 1] = spec.alpha.integral(0, nodes[i + 1]);
    for (size_t i = 0; i < n; ++i) {
        double probe = (i + 1 < n) ? std::nextafter(nodes[i], nodes[i + 1]) : nodes[i];
        w.alpha_node[i] = spec.alpha(probe);
        if (i + 1 < n) {
            double d = nodes[i + 1] - nodes[i];
            double right = spec.alpha(std::nextafter(nodes[i + 1], nodes[i]));
            w.alpha_slope[i] = (right - w.alpha_node[i]) / d;
        }
    }

    w.clock[0] = 0;
    for (size_t i = 0; i + 1 < n; ++i) {
        double d = nodes[i + 1] - nodes[i];
        double inv0 = std::exp(-w.cum_alpha[i]);
        double inv1 = std::exp(-w.cum_alpha[i + 1]);
        w.clock[i + 1] = w.clock[i] + 0.5 * d * (inv0 + inv1);
        if (!(w.clock[i + 1] > w.clock[i]))
            throw numeric_error("warped clock failed to advance near t = " + std::to_string(nodes[i]));
    }
    w.tau_max = w.clock.back();
    return w;
}

namespace {

size_t cell_of(const std::vector<double>& xs, double x) {
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    size_t i = it - xs.begin();
    if (i == 0) return 0;
    if (i >= xs.size()) return xs.size() - 2;
    return i - 1;
}

} // namespace

double TimeWarp::A(double t) const {
    if (t < -1e-12 || t > horizon * (1 + 1e-12))
        throw invalid_input("time " + std::to_string(t) + " outside [0, horizon]");
    t = std::clamp(t, 0.0, horizon);
    size_t i = cell_of(t_nodes, t);
    double d = t - t_nodes[i];
    double c = cum_alpha[i] + alpha_node[i] * d + 0.5 * alpha_slope[i] * d * d;
    return std::exp(c);
}

double TimeWarp::tau(double t) const {
    if (t < -1e-12 || t > horizon * (1 + 1e-12))
        throw invalid_input("time " + std::to_string(t) + " outside [0, horizon]");
    t = std::clamp(t, 0.0, horizon);
    size_t i = cell_of(t_nodes, t);
    double d = t_nodes[i + 1] - t_nodes[i];
    double w = (t - t_nodes[i]) / d;
    return clock[i] * (1 - w) + clock[i + 1] * w;
}

double TimeWarp::t_of(double tv) const {
    if (tv < -1e-12 * (1 + tau_max) || tv > tau_max * (1 + 1e-12))
        throw invalid_input("warped time " + std::to_string(tv) + " outside [0, tau_max]");
    tv = std::clamp(tv, 0.0, tau_max);
    size_t i = cell_of(clock, tv);
    double d = clock[i + 1] - clock[i];
    double w = (tv - clock[i]) / d;
    return t_nodes[i] * (1 - w) + t_nodes[i + 1] * w;
}

PushedBoundary push_data(const piecewise::PiecewiseFn& uB,
                         const piecewise::PiecewiseFn& vB, const TimeWarp& w) {
    uB.validate();
    vB.validate();
    PushedBoundary out;
    out.tau = w.clock;
    out.pB.reserve(w.clock.size());
    out.qB.reserve(w.clock.size());
    for (size_t i = 0; i < w.t_nodes.size(); ++i) {
        double t = w.t_nodes[i];
        out.pB.push_back(std::exp(w.cum_alpha[i]) * uB(t));
        out.qB.push_back(vB(t));
    }
    return out;
}

hopflax::Solution pull_back(const hopflax::Solution& warped, const TimeWarp& w) {
    hopflax::Solution out = warped;
    for (auto& sl : out.slices) {
        double t = w.t_of(sl.time);
        double inv = 1.0 / w.A(t);
        sl.time = t;
        for (auto& v : sl.p.values) v *= inv;
        for (auto& j : sl.p.jumps) {
            j.left *= inv;
            j.right *= inv;
        }
    }
    return out;
}

} // namespace droplet::damping
