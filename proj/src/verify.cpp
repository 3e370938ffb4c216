#include "droplet/verify.hpp"
#include "droplet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace droplet::verify {

double TestFunction::operator()(double x) const {
    if (x <= a || x >= b) return 0;
    double g = 4 * (x - a) * (b - x) / ((b - a) * (b - a));
    return g * g * g;
}

double TestFunction::deriv(double x) const {
    if (x <= a || x >= b) return 0;
    double w = (b - a) * (b - a);
    double g = 4 * (x - a) * (b - x) / w;
    double gp = 4 * (a + b - 2 * x) / w;
    return 3 * g * g * gp;
}

std::vector<TestFunction> dyadic_windows(double lo, double hi, int levels) {
    if (!(hi > lo) || levels < 1) throw invalid_input("bad window family request");
    std::vector<TestFunction> out;
    for (int l = 0; l < levels; ++l) {
        double w = (hi - lo) / (1 << l);
        for (int k = 0;; ++k) {
            double a = lo + k * w / 2;
            if (a + w > hi + 1e-12 * (hi - lo)) break;
            out.push_back({a, std::min(a + w, hi)});
        }
    }
    return out;
}

namespace {

constexpr double kG5x[5] = {-0.906179845938664, -0.538469310105683, 0.0,
                            0.538469310105683, 0.906179845938664};
constexpr double kG5w[5] = {0.236926885056189, 0.478628670499366,
                            0.568888888888889, 0.478628670499366,
                            0.236926885056189};

// integrate T(f(x)) * w(x) over the window support, where f is the sampled
// field with its listed traces and the integrand is taken piecewise linear
// between nodes and traces
double pair_against(const bv::SampledBV& f, const TestFunction& phi,
                    const std::function<double(double)>& T, bool use_deriv) {
    const auto& g = f.grid;
    double acc = 0;
    for (size_t i = 0; i + 1 < g.size(); ++i) {
        double lo = std::max(g[i], phi.a), hi = std::min(g[i + 1], phi.b);
        if (hi <= lo) continue;
        // linear pieces of the field inside this cell, traces included
        struct Pt {
            double x, v;
        };
        std::vector<Pt> pts{{g[i], f.values[i]}};
        for (const auto& j : f.jumps) {
            bool claims = j.location >= g[i] && j.location < g[i + 1];
            if (j.location == g[i + 1] && i + 2 == g.size()) claims = true;
            if (!claims) continue;
            pts.push_back({j.location, j.left});
            pts.push_back({j.location, j.right});
        }
        pts.push_back({g[i + 1], f.values[i + 1]});
        for (size_t s = 0; s + 1 < pts.size(); ++s) {
            double a = std::max(pts[s].x, lo), b = std::min(pts[s + 1].x, hi);
            if (b <= a) continue;
            double dx = pts[s + 1].x - pts[s].x;
            for (int k = 0; k < 5; ++k) {
                double x = 0.5 * (a + b) + 0.5 * (b - a) * kG5x[k];
                double w = dx > 0 ? (x - pts[s].x) / dx : 0.0;
                double v = pts[s].v * (1 - w) + pts[s + 1].v * w;
                double ph = use_deriv ? phi.deriv(x) : phi(x);
                acc += 0.5 * (b - a) * kG5w[k] * T(v) * ph;
            }
        }
    }
    return acc;
}

} // namespace

ResidualReport interior_residual(const hopflax::Solution& sol,
                                 const std::function<double(double)>& alpha,
                                 const std::vector<TestFunction>& windows) {
    if (sol.slices.size() < 2)
        throw invalid_input("interior residual needs at least two slices");
    auto id = [](double v) { return v; };
    auto half_sq = [](double v) { return v * v / 2; };

    ResidualReport rep;
    rep.per_window_velocity.assign(windows.size(), 0.0);
    rep.per_window_mass.assign(windows.size(), 0.0);
    for (size_t k = 0; k + 1 < sol.slices.size(); ++k) {
        const auto& s0 = sol.slices[k];
        const auto& s1 = sol.slices[k + 1];
        double dt = s1.time - s0.time;
        double am = alpha ? alpha(0.5 * (s0.time + s1.time)) : 0.0;
        bv::HalfLineMeasure flux0 = bv::volpert_product(id, s0.p, s0.V);
        bv::HalfLineMeasure flux1 = bv::volpert_product(id, s1.p, s1.V);
        for (size_t w = 0; w < windows.size(); ++w) {
            const auto& phi = windows[w];
            double a0 = pair_against(s0.p, phi, id, false);
            double a1 = pair_against(s1.p, phi, id, false);
            double b0 = pair_against(s0.p, phi, half_sq, true);
            double b1 = pair_against(s1.p, phi, half_sq, true);
            double r1 = (a1 - a0) / dt - 0.5 * (b0 + b1) + am * 0.5 * (a0 + a1);
            rep.per_window_velocity[w] = std::max(rep.per_window_velocity[w], std::fabs(r1));

            auto pf = [&](double z) { return phi(z); };
            auto pd = [&](double z) { return phi.deriv(z); };
            double m0 = s0.q.integrate(pf);
            double m1 = s1.q.integrate(pf);
            double f0 = flux0.integrate(pd);
            double f1 = flux1.integrate(pd);
            double r2 = (m1 - m0) / dt - 0.5 * (f0 + f1);
            rep.per_window_mass[w] = std::max(rep.per_window_mass[w], std::fabs(r2));
        }
    }
    for (double v : rep.per_window_velocity) rep.velocity = std::max(rep.velocity, v);
    for (double v : rep.per_window_mass) rep.mass = std::max(rep.mass, v);
    return rep;
}

DataResidual data_residual(const std::vector<double>& x,
                           const std::vector<double>& u,
                           const std::vector<double>& V,
                           const piecewise::PiecewiseFn& u0,
                           const piecewise::PiecewiseFn& v0) {
    if (x.size() != u.size() || x.size() != V.size() || x.size() < 2)
        throw invalid_input("data residual needs matching columns");
    piecewise::TailTable tail = piecewise::tail_integral(v0);
    DataResidual r;
    for (size_t i = 0; i + 1 < x.size(); ++i) {
        double d0 = std::fabs(u[i] - u0(x[i]));
        double d1 = std::fabs(u[i + 1] - u0(x[i + 1]));
        r.u_l1 += 0.5 * (d0 + d1) * (x[i + 1] - x[i]);
    }
    for (size_t i = 0; i < x.size(); ++i)
        r.V_sup = std::max(r.V_sup, std::fabs(V[i] - (-tail(x[i]))));
    return r;
}

DataResidual data_residual(const hopflax::Slice& sl,
                           const piecewise::PiecewiseFn& u0,
                           const piecewise::PiecewiseFn& v0) {
    return data_residual(sl.p.grid, sl.p.values, sl.V.values, u0, v0);
}

int entropy_audit(const bv::SampledBV& u, double tol) {
    int bad = 0;
    for (const auto& j : u.jumps)
        if (j.left < j.right - tol * (1 + std::fabs(j.left) + std::fabs(j.right)))
            bad++;
    return bad;
}

std::vector<BoundaryRow> boundary_audit(const hopflax::Solution& sol,
                                        const std::function<double(double)>& uB,
                                        double tol) {
    if (!uB) throw invalid_input("boundary audit needs the prescribed velocity");
    std::vector<BoundaryRow> rows;
    for (const auto& sl : sol.slices) {
        BoundaryRow r;
        r.time = sl.time;
        r.trace = hopflax::wall_limit(sl.p);
        r.expected = uB(sl.time);
        r.admissible = hopflax::admissible_set_contains(r.expected, r.trace, tol);
        rows.push_back(r);
    }
    return rows;
}

std::vector<ShockRow> shock_transport_check(const hopflax::Solution& sol) {
    std::vector<ShockRow> rows;
    auto interp = [](const bv::SampledBV& f, double x) {
        const auto& g = f.grid;
        auto it = std::upper_bound(g.begin(), g.end(), x);
        size_t i = it == g.begin() ? 0 : (it - g.begin()) - 1;
        if (i + 1 >= g.size()) i = g.size() - 2;
        double w = (x - g[i]) / (g[i + 1] - g[i]);
        w = std::clamp(w, 0.0, 1.0);
        return f.values[i] * (1 - w) + f.values[i + 1] * w;
    };
    auto volpert_speed_at = [&](const hopflax::Slice& s, double loc) {
        for (const auto& j : s.p.jumps)
            if (std::fabs(j.location - loc) <= 1e-9 * (1 + std::fabs(loc)))
                return bv::shock_speed(j.left, j.right);
        return interp(s.p, loc);
    };

    for (size_t k = 0; k + 1 < sol.slices.size(); ++k) {
        const auto& s0 = sol.slices[k];
        const auto& s1 = sol.slices[k + 1];
        double dt = s1.time - s0.time;
        double h = s0.p.span() / (s0.p.grid.size() - 1);
        for (const auto& a0 : s0.q.atoms) {
            ShockRow r;
            r.t0 = s0.time;
            r.t1 = s1.time;
            r.loc0 = a0.location;
            double vs0 = volpert_speed_at(s0, a0.location);
            double predicted = a0.location + vs0 * dt;
            const bv::Atom* best = nullptr;
            for (const auto& a1 : s1.q.atoms)
                if (!best || std::fabs(a1.location - predicted) <
                                 std::fabs(best->location - predicted))
                    best = &a1;
            if (!best || std::fabs(best->location - predicted) >
                             3 * h + 1e-9 * (1 + std::fabs(predicted))) {
                rows.push_back(r);  // unmatched: born or absorbed between slices
                continue;
            }
            r.matched = true;
            r.loc1 = best->location;
            r.speed = (r.loc1 - r.loc0) / dt;
            double vs1 = volpert_speed_at(s1, best->location);
            r.volpert_speed = 0.5 * (vs0 + vs1);
            r.mass = 0.5 * (a0.mass + best->mass);
            r.residual = std::fabs((r.volpert_speed - r.speed) * r.mass);
            rows.push_back(r);
        }
    }
    return rows;
}

} // namespace droplet::verify
