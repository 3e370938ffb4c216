#include "droplet/runner.hpp"
#include "droplet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>

namespace droplet::runner {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double sup_over_support(const piecewise::PiecewiseFn& f) {
    auto b = f.breakpoints();
    double lo = b.empty() ? 0.0 : b.front();
    double hi = b.empty() ? 0.0 : b.back();
    return f.sup_abs(lo - 1, hi + 1);
}

double variation_of(const piecewise::PiecewiseFn& f) {
    double tv = 0;
    double prev = f.head;
    for (double v : f.vs) {
        tv += std::abs(v - prev);
        prev = v;
    }
    return tv;
}

// the truncated viscous domain: data support plus a diffusion margin
double viscous_length(const scenario::Compiled& c, double tau_total) {
    if (c.visc.length > 0) return c.visc.length;
    double support = c.x1;
    for (double b : c.u0.breakpoints()) support = std::max(support, b);
    for (double b : c.v0.breakpoints()) support = std::max(support, b);
    return support + 6 * std::sqrt(c.visc.epsilon * std::max(tau_total, 1e-12)) + 1;
}

std::function<double(double)> lift(const piecewise::PiecewiseFn& f, bool mollify,
                                   double eps) {
    std::function<double(double)> g = [f](double t) { return f(t); };
    if (mollify) {
        std::function<double(double)> base = g;
        g = [base, eps](double t) { return viscous::mollified_value(base, eps, t); };
    }
    return g;
}

} // namespace

RunResult execute(const scenario::Scenario& sc) {
    const scenario::Compiled c = sc.compile();
    const damping::TimeWarp warp = damping::build_warp(c.damp, c.warp_resolution);
    std::vector<double> taus(c.times.size());
    for (size_t i = 0; i < c.times.size(); ++i) taus[i] = warp.tau(c.times[i]);

    RunResult rr;
    if (c.route == scenario::Route::characteristic) {
        const std::vector<double> grid = hopflax::uniform_grid(c.x0, c.x1, c.cells);
        hopflax::Solution warped;
        if (c.domain == scenario::Domain::quarter_plane) {
            damping::PushedBoundary pushed = damping::push_data(c.uB, c.vB, warp);
            hopflax::BoundaryAction act =
                hopflax::make_boundary_action(pushed.tau, pushed.pB);
            auto qB = [vB = c.vB, warp](double tv) { return vB(warp.t_of(tv)); };
            warped = hopflax::solve_ibvp(c.u0, c.v0, act, qB, grid, taus, c.search);
        } else {
            warped = hopflax::solve_ivp(c.u0, c.v0, grid, taus, c.search);
        }
        rr.physical = damping::pull_back(warped, warp);
        if (c.domain == scenario::Domain::quarter_plane && c.x0 == 0 && c.cells >= 2)
            rr.mass = hopflax::mass_condition_check(
                rr.physical, [vB = c.vB](double t) { return vB(t); });
    } else {
        viscous::ViscousParams par = c.visc;
        par.length = viscous_length(c, warp.tau_max);
        auto uBs = lift(c.uB, par.mollify, par.epsilon);
        auto vBs = lift(c.vB, par.mollify, par.epsilon);
        auto pB = [uBs, warp](double tv) {
            double t = warp.t_of(tv);
            return warp.A(t) * uBs(t);
        };
        auto qB = [vBs, warp](double tv) { return vBs(warp.t_of(tv)); };
        viscous::ViscousSolution vs =
            viscous::run_viscous(c.u0, c.v0, pB, qB, warp.tau_max, taus, par);

        rr.steplog.reserve(vs.log.size());
        for (const auto& row : vs.log) {
            double t = warp.t_of(row.time);
            rr.steplog.push_back({t, row.sup_p / warp.A(t), row.sup_V, row.S_min});
        }
        for (auto& sl : vs.slices) {
            hopflax::Slice s;
            double t = warp.t_of(sl.time);
            double scale = 1.0 / warp.A(t);
            s.time = t;
            s.p.grid = sl.x;
            s.p.values = std::move(sl.p);
            for (double& v : s.p.values) v *= scale;
            s.V.grid = std::move(sl.x);
            s.V.values = std::move(sl.V);
            s.q = bv::distributional_derivative(s.V);
            rr.physical.slices.push_back(std::move(s));
        }
    }
    return rr;
}

RunResult run(const scenario::Scenario& sc, const std::string& out_dir) {
    if (out_dir.empty()) throw invalid_input("output directory must not be empty");
    RunResult rr = execute(sc);

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw invalid_input("cannot create output directory '" + out_dir +
                            "': " + ec.message());
    auto open = [&](const std::string& name) {
        std::ofstream f(fs::path(out_dir) / name, std::ios::binary);
        if (!f) throw invalid_input("cannot write '" + name + "' under '" + out_dir + "'");
        rr.files.push_back(name);
        return f;
    };

    {
        std::ofstream f = open("manifest.cfg");
        f << sc.canonical();
    }

    char name[40];
    for (size_t i = 0; i < rr.physical.slices.size(); ++i) {
        const hopflax::Slice& sl = rr.physical.slices[i];
        std::snprintf(name, sizeof name, "slice_%03zu.csv", i);
        {
            std::ofstream f = open(name);
            f << "x,u,V\n";
            for (size_t k = 0; k < sl.p.grid.size(); ++k)
                f << fmt(sl.p.grid[k]) << ',' << fmt(sl.p.values[k]) << ','
                  << fmt(sl.V.values[k]) << '\n';
        }
        std::snprintf(name, sizeof name, "density_%03zu.csv", i);
        {
            std::ofstream f = open(name);
            f << "x_mid,width,density\n";
            for (size_t k = 0; k < sl.q.density.grid.size(); ++k)
                f << fmt(sl.q.density.grid[k]) << ',' << fmt(sl.q.cell_width[k]) << ','
                  << fmt(sl.q.density.values[k]) << '\n';
        }
    }
    {
        std::ofstream f = open("atoms.csv");
        f << "time,location,mass\n";
        for (const auto& sl : rr.physical.slices)
            for (const auto& a : sl.q.atoms)
                f << fmt(sl.time) << ',' << fmt(a.location) << ',' << fmt(a.mass)
                  << '\n';
    }
    if (!rr.mass.empty()) {
        std::ofstream f = open("boundary.csv");
        f << "time,trace_u,trace_V,prescribed,expected_mass,residual\n";
        for (const auto& r : rr.mass)
            f << fmt(r.time) << ',' << fmt(r.trace_p) << ',' << fmt(r.trace_V) << ','
              << (r.prescribed ? 1 : 0) << ',' << fmt(r.expected) << ','
              << fmt(r.residual) << '\n';
    }
    {
        std::ofstream f = open("diagnostics.csv");
        f << "metric,value\n";
        f << "slices," << rr.physical.slices.size() << '\n';
        size_t atoms = 0;
        for (const auto& sl : rr.physical.slices) atoms += sl.q.atoms.size();
        f << "atoms," << atoms << '\n';
        if (rr.steplog.empty()) {
            const auto& d = rr.physical.diag;
            f << "entropy_violations," << d.entropy_violations << '\n';
            f << "minimizers_ordered," << (d.y_monotone ? 1 : 0) << '\n';
            f << "branches_nested," << (d.branches_nested ? 1 : 0) << '\n';
            f << "switch_times_ordered," << (d.tau2_monotone ? 1 : 0) << '\n';
            if (!rr.mass.empty()) {
                double worst = 0;
                for (const auto& r : rr.mass) worst = std::max(worst, r.residual);
                f << "mass_residual_max," << fmt(worst) << '\n';
            }
        } else {
            f << "steps," << (rr.steplog.size() - 1) << '\n';
            double wu = 0, wV = 0, smin = std::numeric_limits<double>::infinity();
            for (const auto& row : rr.steplog) {
                wu = std::max(wu, row.sup_p);
                wV = std::max(wV, row.sup_V);
                smin = std::min(smin, row.S_min);
            }
            f << "sup_velocity," << fmt(wu) << '\n';
            f << "sup_mass_potential," << fmt(wV) << '\n';
            f << "transform_min," << fmt(smin) << '\n';
        }
    }
    return rr;
}

namespace {

double interp_nodal(const std::vector<double>& g, const std::vector<double>& v,
                    double x) {
    if (x <= g.front()) return v.front();
    if (x >= g.back()) return v.back();
    size_t i = std::upper_bound(g.begin(), g.end(), x) - g.begin() - 1;
    double w = (x - g[i]) / (g[i + 1] - g[i]);
    return v[i] * (1 - w) + v[i + 1] * w;
}

// L1 distance of the velocity fields over the common span, trapezoid on the
// union of both grids with midpoints added
double l1_distance(const hopflax::Slice& a, const hopflax::Slice& b) {
    double lo = std::max(a.p.grid.front(), b.p.grid.front());
    double hi = std::min(a.p.grid.back(), b.p.grid.back());
    if (!(hi > lo)) throw invalid_input("convergence slices do not overlap");
    std::vector<double> xs;
    xs.reserve(a.p.grid.size() + b.p.grid.size());
    for (double x : a.p.grid)
        if (x >= lo && x <= hi) xs.push_back(x);
    for (double x : b.p.grid)
        if (x >= lo && x <= hi) xs.push_back(x);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::vector<double> fine;
    fine.reserve(2 * xs.size());
    for (size_t i = 0; i < xs.size(); ++i) {
        fine.push_back(xs[i]);
        if (i + 1 < xs.size()) fine.push_back(0.5 * (xs[i] + xs[i + 1]));
    }
    double acc = 0;
    double prev_x = fine.front();
    double prev_d = std::abs(interp_nodal(a.p.grid, a.p.values, prev_x) -
                             interp_nodal(b.p.grid, b.p.values, prev_x));
    for (size_t i = 1; i < fine.size(); ++i) {
        double d = std::abs(interp_nodal(a.p.grid, a.p.values, fine[i]) -
                            interp_nodal(b.p.grid, b.p.values, fine[i]));
        acc += 0.5 * (prev_d + d) * (fine[i] - prev_x);
        prev_x = fine[i];
        prev_d = d;
    }
    return acc;
}

} // namespace

std::vector<ConvergenceRow> converge(const scenario::Scenario& sc,
                                     const std::vector<int>& cell_counts,
                                     const std::string& out_dir) {
    if (cell_counts.size() < 2)
        throw invalid_input("convergence needs at least two cell counts");
    for (size_t i = 0; i < cell_counts.size(); ++i) {
        if (cell_counts[i] < 1) throw invalid_input("cell counts must be positive");
        if (i && cell_counts[i] <= cell_counts[i - 1])
            throw invalid_input("cell counts must increase");
    }
    const scenario::Compiled c = sc.compile();
    const char* key =
        c.route == scenario::Route::viscous ? "viscous.cells" : "grid.cells";

    std::vector<ConvergenceRow> rows;
    hopflax::Slice prev;
    for (size_t i = 0; i < cell_counts.size(); ++i) {
        scenario::Scenario variant = sc;
        variant.set(key, std::to_string(cell_counts[i]));
        RunResult rr = execute(variant);
        const hopflax::Slice& last = rr.physical.slices.back();
        ConvergenceRow row;
        row.cells = cell_counts[i];
        row.distance = i ? l1_distance(prev, last)
                         : std::numeric_limits<double>::quiet_NaN();
        rows.push_back(row);
        prev = last;
    }

    if (!out_dir.empty()) {
        namespace fs = std::filesystem;
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (ec)
            throw invalid_input("cannot create output directory '" + out_dir +
                                "': " + ec.message());
        std::ofstream f(fs::path(out_dir) / "convergence.csv", std::ios::binary);
        if (!f)
            throw invalid_input("cannot write 'convergence.csv' under '" + out_dir +
                                "'");
        f << "cells,distance\n";
        for (const auto& row : rows) {
            f << row.cells << ',';
            if (!std::isnan(row.distance)) f << fmt(row.distance);
            f << '\n';
        }
    }
    return rows;
}

CheckReport verify_run(const scenario::Scenario& sc, double tol_scale) {
    if (!(tol_scale > 0)) throw invalid_input("tolerance scale must be positive");
    const scenario::Compiled c = sc.compile();
    RunResult rr = execute(sc);

    CheckReport rep;
    auto add = [&](const std::string& name, double value, double bound) {
        bool ok = value <= bound;
        rep.checks.push_back({name, ok, value, bound});
        rep.all_passed = rep.all_passed && ok;
    };

    const bool quarter = c.domain == scenario::Domain::quarter_plane;
    const double M = sup_over_support(c.u0) + (quarter ? sup_over_support(c.uB) : 0.0);
    double Mv = quarter ? sup_over_support(c.vB) : 0.0;
    {
        auto b = c.v0.breakpoints();
        if (!b.empty()) Mv += c.v0.abs_integral(b.front(), b.back());
    }
    const double alpha_sup = c.damp.alpha.sup_abs(0, c.damp.horizon);

    if (c.route == scenario::Route::characteristic) {
        const double h = (c.x1 - c.x0) / c.cells;
        int entropy = 0;
        for (const auto& sl : rr.physical.slices) entropy += verify::entropy_audit(sl.p);
        add("entropy.downward_jumps", entropy, 0);
        add("structure.minimizers_ordered", rr.physical.diag.y_monotone ? 0 : 1, 0);
        if (quarter) {
            add("structure.branches_nested",
                rr.physical.diag.branches_nested ? 0 : 1, 0);
            add("structure.switch_times_ordered",
                rr.physical.diag.tau2_monotone ? 0 : 1, 0);
        }
        if (quarter && c.x0 == 0 && c.cells >= 2) {
            double btol = tol_scale * std::max(3 * h * (1 + M), 2e-4);
            auto rows = verify::boundary_audit(
                rr.physical, [uB = c.uB](double t) { return uB(t); }, btol);
            int bad = 0;
            for (const auto& r : rows) bad += r.admissible ? 0 : 1;
            add("boundary.trace_admissible", bad, 0);
            double worst = 0;
            for (const auto& r : rr.mass) worst = std::max(worst, r.residual);
            add("boundary.mass_condition", worst,
                tol_scale * (5 * h * h * (1 + Mv) + 1e-6));
        }
        if (rr.physical.slices.size() >= 2) {
            double dtmax = 0;
            double dtmin = std::numeric_limits<double>::infinity();
            for (size_t i = 0; i + 1 < rr.physical.slices.size(); ++i) {
                double dt = rr.physical.slices[i + 1].time - rr.physical.slices[i].time;
                dtmax = std::max(dtmax, dt);
                dtmin = std::min(dtmin, dt);
            }
            double span = c.x1 - c.x0;
            int levels = 1;
            while (levels < 6 && span / (1 << levels) > 24 * h) levels++;
            auto windows = verify::dyadic_windows(c.x0, c.x1, levels);
            double wmin = span / (1 << (levels - 1));
            auto rrep = verify::interior_residual(
                rr.physical, [a = c.damp.alpha](double t) { return a(t); }, windows);
            double speed = (1 + alpha_sup) * (1 + M) * (1 + M);
            double rtol = tol_scale * (2.0 * dtmax * dtmax * speed * (1 + M) / wmin +
                                       40 * h * h * (1 + M) * (1 + M) / wmin + 1e-8);
            add("interior.velocity_residual", rrep.velocity, rtol);
            add("interior.mass_residual", rrep.mass, rtol * (1 + Mv));

            auto srows = verify::shock_transport_check(rr.physical);
            double worst = 0;
            for (const auto& r : srows)
                if (r.matched) worst = std::max(worst, r.residual);
            add("shock.transport_residual", worst,
                tol_scale * ((2 * h / dtmin) * (Mv + 1) + 1e-9));
        }
    } else {
        const damping::TimeWarp warp = damping::build_warp(c.damp, c.warp_resolution);
        const double length = viscous_length(c, warp.tau_max);
        const double hv = length / c.visc.cells;
        const double ratio = hv / c.visc.epsilon;
        const double slack = tol_scale * 0.5 * ratio * ratio + 1e-10;

        double bound_u =
            std::exp(c.damp.l1_norm()) * (sup_over_support(c.u0) + sup_over_support(c.uB));
        double wu = 0, wV = 0;
        double smin = std::numeric_limits<double>::infinity();
        for (const auto& row : rr.steplog) {
            wu = std::max(wu, row.sup_p);
            wV = std::max(wV, row.sup_V);
            smin = std::min(smin, row.S_min);
        }
        add("bounds.velocity_sup", wu, bound_u * (1 + slack) + 1e-10);
        add("bounds.mass_potential_sup", wV, Mv * (1 + slack) + 1e-10);
        add("transform.positivity", smin > 0 ? 0 : 1, 0);

        const auto& first = rr.physical.slices.front();
        verify::DataResidual dr = verify::data_residual(first, c.u0, c.v0);
        double t1 = first.time;
        double smear = c.visc.epsilon + std::sqrt(c.visc.epsilon * t1);
        double tv_u = variation_of(c.u0) + std::abs(c.u0.head);
        double tv_v = variation_of(c.v0) + std::abs(c.v0.head);
        add("data.velocity_l1", dr.u_l1,
            tol_scale * ((1 + M) * (1 + alpha_sup) * (tv_u + 1) * t1 +
                         4 * smear * (tv_u + 1) + 1e-9));
        add("data.mass_potential_sup", dr.V_sup,
            tol_scale * ((1 + M) * (tv_v + Mv + 1) * t1 + 4 * smear * (tv_v + 1) +
                         1e-9));
    }
    return rep;
}

} // namespace droplet::runner
