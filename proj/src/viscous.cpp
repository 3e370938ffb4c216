#include "droplet/viscous.hpp"
#include "droplet/errors.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <string>

namespace droplet::viscous {

namespace {

// composite Simpson samples of the standard bump on [-1, 1]; the same rule
// normalizes and convolves, so a constant survives to a few ulp away from
// the cutoff collar
constexpr int kBumpPanels = 64;

const std::vector<double>& bump_nodes() {
    static const std::vector<double> n = [] {
        std::vector<double> v(2 * kBumpPanels + 1);
        for (int i = 0; i < (int)v.size(); ++i)
            v[i] = -1.0 + 2.0 * i / (2 * kBumpPanels);
        return v;
    }();
    return n;
}

const std::vector<double>& bump_weights() {
    static const std::vector<double> w = [] {
        std::vector<double> v(2 * kBumpPanels + 1, 0.0);
        double h = 1.0 / kBumpPanels;
        for (int i = 0; i < (int)v.size(); ++i) {
            double c = (i == 0 || i + 1 == (int)v.size()) ? 1 : (i % 2 ? 4 : 2);
            v[i] = c * h / 3;
        }
        double norm = 0;
        for (int i = 0; i < (int)v.size(); ++i) {
            double s = -1.0 + 2.0 * i / (2 * kBumpPanels);
            double b = std::abs(s) < 1 ? std::exp(-1 / (1 - s * s)) : 0.0;
            v[i] *= b;
            norm += v[i];
        }
        for (double& x : v) x /= norm;
        return v;
    }();
    return w;
}

} // namespace

std::vector<double> mollify_on_grid(const piecewise::PiecewiseFn& f, double eps,
                                    const std::vector<double>& x) {
    f.validate();
    if (!(eps > 0)) throw invalid_input("mollification radius must be positive");
    const auto& s = bump_nodes();
    const auto& w = bump_weights();
    std::vector<double> out(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        double acc = 0;
        for (size_t j = 0; j < s.size(); ++j) {
            double z = x[i] - eps * s[j];
            if (z >= 2 * eps) acc += w[j] * f(z);
        }
        out[i] = acc;
    }
    return out;
}

double mollified_value(const std::function<double(double)>& f, double eps,
                       double t) {
    if (!(eps > 0)) throw invalid_input("mollification radius must be positive");
    const auto& s = bump_nodes();
    const auto& w = bump_weights();
    double acc = 0;
    for (size_t j = 0; j < s.size(); ++j) {
        double z = t - eps * s[j];
        if (z >= 2 * eps) acc += w[j] * f(z);
    }
    return acc;
}

void initial_heat_data(const piecewise::PiecewiseFn& p0,
                       const piecewise::PiecewiseFn& q0,
                       const std::vector<double>& x, double eps, bool mollify,
                       double exponent_guard, std::vector<double>& S0,
                       std::vector<double>& C0) {
    p0.validate();
    q0.validate();
    if (!(eps > 0)) throw invalid_input("viscosity must be positive");
    if (x.size() < 5) throw invalid_input("heat grid needs at least five nodes");
    const size_t n = x.size();
    std::vector<double> P(n), Vm(n);
    if (!mollify) {
        piecewise::TailTable tail = piecewise::tail_integral(q0);
        for (size_t i = 0; i < n; ++i) {
            P[i] = p0.integral(0, x[i]);
            Vm[i] = -tail(x[i]);
        }
    } else {
        std::vector<double> pm = mollify_on_grid(p0, eps, x);
        std::vector<double> qm = mollify_on_grid(q0, eps, x);
        P[0] = 0;
        for (size_t i = 0; i + 1 < n; ++i)
            P[i + 1] = P[i] + 0.5 * (pm[i] + pm[i + 1]) * (x[i + 1] - x[i]);
        std::vector<double> tail(n, 0.0);
        for (size_t i = n - 1; i-- > 0;)
            tail[i] = tail[i + 1] + 0.5 * (qm[i] + qm[i + 1]) * (x[i + 1] - x[i]);
        for (size_t i = 0; i < n; ++i) Vm[i] = -tail[i];
    }
    S0.resize(n);
    C0.resize(n);
    for (size_t i = 0; i < n; ++i) {
        double e = P[i] / (2 * eps);
        if (std::abs(e) > exponent_guard)
            throw numeric_error("transform exponent " + std::to_string(std::abs(e)) +
                                " exceeds the guard of " +
                                std::to_string(exponent_guard) +
                                "; increase epsilon or trim the data support");
        S0[i] = std::exp(-e);
        C0[i] = Vm[i] * S0[i];
    }
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;

SpMat scheme_matrix(int n, double h, double eps, double dt, double theta,
                    double pb, bool identity_row0) {
    std::vector<Eigen::Triplet<double>> tr;
    tr.reserve(3 * n);
    if (identity_row0) {
        tr.emplace_back(0, 0, 1.0);
    } else {
        // one-sided second-order flux: 2 eps u_x(0) + pb u(0) = rhs
        tr.emplace_back(0, 0, -3 * eps / h + pb);
        tr.emplace_back(0, 1, 4 * eps / h);
        tr.emplace_back(0, 2, -eps / h);
    }
    double r = eps * dt * theta / (h * h);
    for (int i = 1; i + 1 < n; ++i) {
        tr.emplace_back(i, i - 1, -r);
        tr.emplace_back(i, i, 1 + 2 * r);
        tr.emplace_back(i, i + 1, -r);
    }
    // zero flux at the truncated far end
    tr.emplace_back(n - 1, n - 3, 1.0);
    tr.emplace_back(n - 1, n - 2, -4.0);
    tr.emplace_back(n - 1, n - 1, 3.0);
    SpMat M(n, n);
    M.setFromTriplets(tr.begin(), tr.end());
    return M;
}

class PairStepper {
  public:
    PairStepper(int n, double h, double eps, BoundaryMode mode)
        : n_(n), h_(h), eps_(eps), mode_(mode) {}

    void step(std::vector<double>& S, std::vector<double>& C, double dt,
              double theta, double pb, double qb) {
        ensure(fs_, dt, theta, pb, false);
        Eigen::VectorXd rhs = explicit_part(S, dt, theta);
        rhs(0) = 0;
        rhs(n_ - 1) = 0;
        Eigen::VectorXd Snew = fs_.lu.solve(rhs);
        if (fs_.lu.info() != Eigen::Success)
            throw numeric_error("heat step solve failed");

        bool idrow = mode_ == BoundaryMode::mass;
        ensure(fc_, dt, theta, pb, idrow);
        Eigen::VectorXd rc = explicit_part(C, dt, theta);
        rc(0) = idrow ? -qb * Snew(0) : 2 * eps_ * qb * Snew(0);
        rc(n_ - 1) = 0;
        Eigen::VectorXd Cnew = fc_.lu.solve(rc);
        if (fc_.lu.info() != Eigen::Success)
            throw numeric_error("heat step solve failed");

        for (int i = 0; i < n_; ++i) {
            S[i] = Snew(i);
            C[i] = Cnew(i);
        }
    }

  private:
    struct Fact {
        double dt = -1, theta = -1, pb = 0;
        bool id = false, ready = false;
        Eigen::SparseLU<SpMat> lu;
    };

    void ensure(Fact& f, double dt, double theta, double pb, bool idrow) {
        bool same = f.ready && f.dt == dt && f.theta == theta && f.id == idrow &&
                    (idrow || std::abs(f.pb - pb) <= 1e-14 * (1 + std::abs(pb)));
        if (same) return;
        SpMat M = scheme_matrix(n_, h_, eps_, dt, theta, pb, idrow);
        f.lu.compute(M);
        if (f.lu.info() != Eigen::Success)
            throw numeric_error("heat matrix factorization failed");
        f.dt = dt;
        f.theta = theta;
        f.pb = pb;
        f.id = idrow;
        f.ready = true;
    }

    Eigen::VectorXd explicit_part(const std::vector<double>& u, double dt,
                                  double theta) const {
        Eigen::VectorXd rhs(n_);
        double r = eps_ * dt * (1 - theta) / (h_ * h_);
        rhs(0) = u[0];
        rhs(n_ - 1) = u[n_ - 1];
        for (int i = 1; i + 1 < n_; ++i)
            rhs(i) = u[i] + r * (u[i + 1] - 2 * u[i] + u[i - 1]);
        return rhs;
    }

    int n_;
    double h_, eps_;
    BoundaryMode mode_;
    Fact fs_, fc_;
};

void recover_fields(const std::vector<double>& S, const std::vector<double>& C,
                    double h, double eps, std::vector<double>& p,
                    std::vector<double>& V) {
    const size_t n = S.size();
    p.resize(n);
    V.resize(n);
    for (size_t i = 0; i < n; ++i) V[i] = C[i] / S[i];
    for (size_t i = 0; i < n; ++i) {
        double sx;
        if (i == 0)
            sx = (-3 * S[0] + 4 * S[1] - S[2]) / (2 * h);
        else if (i + 1 == n)
            sx = (3 * S[n - 1] - 4 * S[n - 2] + S[n - 3]) / (2 * h);
        else
            sx = (S[i + 1] - S[i - 1]) / (2 * h);
        p[i] = -2 * eps * sx / S[i];
    }
}

std::vector<double> centered_derivative(const std::vector<double>& V, double h) {
    const size_t n = V.size();
    std::vector<double> q(n);
    q[0] = (-3 * V[0] + 4 * V[1] - V[2]) / (2 * h);
    q[n - 1] = (3 * V[n - 1] - 4 * V[n - 2] + V[n - 3]) / (2 * h);
    for (size_t i = 1; i + 1 < n; ++i) q[i] = (V[i + 1] - V[i - 1]) / (2 * h);
    return q;
}

} // namespace

void heat_pair_step(std::vector<double>& S, std::vector<double>& C, double h,
                    double eps, double dt, double theta, double pb, double qb,
                    BoundaryMode mode) {
    if (S.size() != C.size() || S.size() < 5)
        throw invalid_input("heat step needs matching vectors with at least five nodes");
    if (!(h > 0) || !(dt > 0) || !(eps > 0) || theta < 0 || theta > 1)
        throw invalid_input("bad heat step parameters");
    PairStepper st((int)S.size(), h, eps, mode);
    st.step(S, C, dt, theta, pb, qb);
}

ViscousSolution run_viscous(const piecewise::PiecewiseFn& p0,
                            const piecewise::PiecewiseFn& q0,
                            const std::function<double(double)>& pB,
                            const std::function<double(double)>& qB,
                            double tau_max, const std::vector<double>& slice_taus,
                            const ViscousParams& par) {
    if (!pB || !qB) throw invalid_input("viscous run needs boundary data");
    if (!(tau_max > 0)) throw invalid_input("viscous run needs a positive horizon");
    if (!(par.length > 0) || par.cells < 8 || par.steps < 2 ||
        !(par.epsilon > 0) || !(par.exponent_guard > 0))
        throw invalid_input("bad viscous parameters");

    const int n = par.cells + 1;
    const double h = par.length / par.cells;
    const double dt = tau_max / par.steps;
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = h * i;
    x.back() = par.length;

    // snap each requested time to the nearest step; keep the requested label
    // when the landing is exact
    std::vector<int> target(par.steps + 1, -1);
    std::vector<double> labels(slice_taus.size());
    for (size_t j = 0; j < slice_taus.size(); ++j) {
        double t = slice_taus[j];
        if (!(t >= 0) || t > tau_max * (1 + 1e-9) + 1e-12)
            throw invalid_input("slice time outside the run horizon");
        long k = t <= 0 ? 0 : std::max(1L, (long)std::llround(t / dt));
        if (k > par.steps) k = par.steps;
        if (target[k] >= 0)
            throw invalid_input("two slice times fall on the same step");
        target[k] = (int)j;
        labels[j] = std::abs(k * dt - t) <= 1e-9 * std::max(1.0, t) ? t : k * dt;
    }

    std::vector<double> S, C;
    initial_heat_data(p0, q0, x, par.epsilon, par.mollify, par.exponent_guard, S, C);

    PairStepper stepper(n, h, par.epsilon, par.mode);
    ViscousSolution out;
    out.slices.resize(slice_taus.size());
    std::vector<double> p, V;

    recover_fields(S, C, h, par.epsilon, p, V);
    {
        double sp = 0, sV = 0;
        for (int i = 0; i < n; ++i) {
            sp = std::max(sp, std::abs(p[i]));
            sV = std::max(sV, std::abs(V[i]));
        }
        out.log.push_back({0.0, sp, sV, *std::min_element(S.begin(), S.end())});
    }
    if (target[0] >= 0) {
        ViscousSlice sl;
        sl.time = labels[target[0]];
        sl.x = x;
        sl.p = p;
        sl.V = V;
        sl.q = centered_derivative(V, h);
        out.slices[target[0]] = std::move(sl);
    }

    // an opening fan of backward Euler substeps damps the rough modes the
    // trapezoidal scheme would otherwise carry undamped
    const int ramp = 8;
    for (int step = 1; step <= par.steps; ++step) {
        double t_new = step * dt;
        if (step == 1) {
            for (int s = 1; s <= ramp; ++s) {
                double ts = dt * s / ramp;
                stepper.step(S, C, dt / ramp, 1.0, pB(ts), qB(ts));
            }
        } else {
            stepper.step(S, C, dt, 0.5, pB(t_new), qB(t_new));
        }

        double smin = *std::min_element(S.begin(), S.end());
        if (!(smin > 0))
            throw numeric_error("transformed field lost positivity at time " +
                                std::to_string(t_new) +
                                "; refine the step or increase epsilon");
        recover_fields(S, C, h, par.epsilon, p, V);
        double sp = 0, sV = 0;
        for (int i = 0; i < n; ++i) {
            sp = std::max(sp, std::abs(p[i]));
            sV = std::max(sV, std::abs(V[i]));
        }
        out.log.push_back({t_new, sp, sV, smin});

        if (target[step] >= 0) {
            ViscousSlice sl;
            sl.time = labels[target[step]];
            sl.x = x;
            sl.p = p;
            sl.V = V;
            sl.q = centered_derivative(V, h);
            out.slices[target[step]] = std::move(sl);
        }
    }
    return out;
}

} // namespace droplet::viscous
