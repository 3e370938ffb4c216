#include "droplet/bv.hpp"
#include "droplet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace droplet::bv {

void SampledBV::validate() const {
    if (grid.size() < 2) throw invalid_input("sampled function needs at least two nodes");
    if (grid.size() != values.size())
        throw invalid_input("grid/value length mismatch");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (!(grid[i] < grid[i + 1]))
            throw invalid_input("grid must be strictly increasing");
    for (double v : values)
        if (!std::isfinite(v)) throw invalid_input("non-finite sample value");
}

double SampledBV::total_variation() const {
    double tv = 0;
    for (std::size_t i = 0; i + 1 < values.size(); ++i)
        tv += std::fabs(values[i + 1] - values[i]);
    return tv;
}

double HalfLineMeasure::total_mass() const {
    double m = 0;
    for (const Atom& a : atoms) m += a.mass;
    for (std::size_t i = 0; i < density.values.size(); ++i)
        m += density.values[i] * cell_width[i];
    return m;
}

double HalfLineMeasure::integrate(const std::function<double(double)>& f) const {
    double m = 0;
    for (const Atom& a : atoms) m += a.mass * f(a.location);
    for (std::size_t i = 0; i < density.values.size(); ++i)
        m += density.values[i] * cell_width[i] * f(density.grid[i]);
    return m;
}

SampledBV detect_jumps(const SampledBV& f, double threshold) {
    f.validate();
    if (!(threshold > 0)) throw invalid_input("jump threshold must be positive");
    SampledBV out = f;
    out.jumps.clear();
    const std::size_t n = f.grid.size();
    const double tv = f.total_variation();
    if (tv <= 0) return out;
    double vmax = 0;
    for (double v : f.values) vmax = std::max(vmax, std::fabs(v));
    const double hbar = f.span() / double(n - 1);
    const double floor = 1e-14 * (1 + vmax);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double dv = f.values[i + 1] - f.values[i];
        const double dx = f.grid[i + 1] - f.grid[i];
        if (std::fabs(dv) > threshold * tv * (dx / hbar) && std::fabs(dv) > floor) {
            out.jumps.push_back(Jump{0.5 * (f.grid[i] + f.grid[i + 1]),
                                     f.values[i], f.values[i + 1]});
        }
    }
    return out;
}

namespace {

// Gauss-Legendre nodes on (0,1), weights adjusted so they sum to exactly 1:
// a constant integrand then averages to itself bit-for-bit, which the
// product rules below rely on.
struct GaussRule {
    std::vector<double> x, w;
    explicit GaussRule(int n) {
        x.resize(n);
        w.resize(n);
        // Newton on Legendre P_n over (-1,1), standard recurrence.
        for (int i = 0; i < n; ++i) {
            double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double p0 = 0, p1 = 0;
            for (int it = 0; it < 100; ++it) {
                p0 = 1;
                p1 = 0;
                for (int k = 0; k < n; ++k) {
                    const double p2 = p1;
                    p1 = p0;
                    p0 = ((2 * k + 1) * t * p1 - k * p2) / (k + 1);
                }
                const double dp = n * (t * p0 - p1) / (t * t - 1);
                const double t1 = t - p0 / dp;
                if (std::fabs(t1 - t) < 1e-16) { t = t1; break; }
                t = t1;
            }
            p0 = 1;
            p1 = 0;
            for (int k = 0; k < n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2 * k + 1) * t * p1 - k * p2) / (k + 1);
            }
            const double dp = n * (t * p0 - p1) / (t * t - 1);
            x[i] = 0.5 * (1 - t);              // map to (0,1), descending t
            w[i] = 1.0 / ((1 - t * t) * dp * dp); // weight/2 on (0,1)
        }
        double s = 0;
        for (int i = 0; i + 1 < n; ++i) s += w[i];
        w[n - 1] = 1.0 - s;
    }
};

const GaussRule& rule16() { static const GaussRule r(16); return r; }
const GaussRule& rule32() { static const GaussRule r(32); return r; }

// One panel [a,b] of the unit interval; weights scale to the panel width
// with the same exact-sum correction.
double panel(const std::function<double(double)>& g, double left, double right,
             const GaussRule& r, double a, double b) {
    const double len = b - a;
    double acc = 0;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        const double al = a + r.x[i] * len;
        acc += r.w[i] * g((1 - al) * left + al * right);
    }
    return acc * len;
}

} // namespace

double averaged_superposition(const std::function<double(double)>& g,
                              double left, double right) {
    if (left == right) return g(left);
    // constant-samples short circuit (exactness for g == const)
    {
        const GaussRule& r = rule16();
        double first = g((1 - r.x[0]) * left + r.x[0] * right);
        bool all_same = true;
        double acc = r.w[0] * first;
        for (std::size_t i = 1; i < r.x.size(); ++i) {
            const double v = g((1 - r.x[i]) * left + r.x[i] * right);
            if (v != first) all_same = false;
            acc += r.w[i] * v;
        }
        if (all_same) return first;
        const double fine = panel(g, left, right, rule32(), 0, 1);
        if (std::fabs(fine - acc) <= 1e-13 * (1 + std::fabs(fine))) return fine;
    }
    // disagreement: bisect until each panel agrees with its own refinement,
    // which corners any kink of g into panels of negligible width
    struct Frame {
        double a, b, coarse;
        int depth;
    };
    double total = 0;
    std::vector<Frame> stack;
    stack.push_back({0.0, 1.0, panel(g, left, right, rule16(), 0.0, 1.0), 48});
    while (!stack.empty()) {
        Frame f = stack.back();
        stack.pop_back();
        const double mid = 0.5 * (f.a + f.b);
        const double lo = panel(g, left, right, rule16(), f.a, mid);
        const double hi = panel(g, left, right, rule16(), mid, f.b);
        const double sum = lo + hi;
        if (f.depth <= 0 || std::fabs(sum - f.coarse) <= 1e-15 * (1 + std::fabs(sum))) {
            total += sum;
        } else {
            stack.push_back({f.a, mid, lo, f.depth - 1});
            stack.push_back({mid, f.b, hi, f.depth - 1});
        }
    }
    return total;
}

namespace {

// a cell owns the jumps in [x_i, x_{i+1}); the last cell also owns x_n, so a
// jump pinned exactly to a node is claimed by exactly one cell
bool cell_claims(const SampledBV& f, std::size_t cell, const Jump& j) {
    const double lo = f.grid[cell], hi = f.grid[cell + 1];
    if (j.location < lo || j.location > hi) return false;
    if (j.location == hi) return cell + 2 == f.grid.size();
    return true;
}

} // namespace

HalfLineMeasure distributional_derivative(const SampledBV& V) {
    V.validate();
    HalfLineMeasure out;
    const std::size_t n = V.grid.size();
    out.density.grid.reserve(n - 1);
    out.density.values.reserve(n - 1);
    out.cell_width.reserve(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double dx = V.grid[i + 1] - V.grid[i];
        const double mid = 0.5 * (V.grid[i] + V.grid[i + 1]);
        out.density.grid.push_back(mid);
        out.cell_width.push_back(dx);
        double jumped = 0;
        for (const Jump& j : V.jumps)
            if (cell_claims(V, i, j)) {
                out.atoms.push_back(Atom{j.location, j.right - j.left});
                jumped += j.right - j.left;
            }
        // whatever the listed jumps do not explain stays absolutely continuous
        out.density.values.push_back((V.values[i + 1] - V.values[i] - jumped) / dx);
    }
    return out;
}

HalfLineMeasure volpert_product(const std::function<double(double)>& g,
                                const SampledBV& p, const SampledBV& V) {
    p.validate();
    V.validate();
    if (p.grid.size() != V.grid.size())
        throw invalid_input("volpert product needs matching grids");
    for (std::size_t i = 0; i < p.grid.size(); ++i)
        if (p.grid[i] != V.grid[i])
            throw invalid_input("volpert product needs matching grids");

    HalfLineMeasure out;
    const std::size_t n = V.grid.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double dx = V.grid[i + 1] - V.grid[i];
        const double mid = 0.5 * (V.grid[i] + V.grid[i + 1]);
        const double pmid = 0.5 * (p.values[i] + p.values[i + 1]);
        out.density.grid.push_back(mid);
        out.cell_width.push_back(dx);
        double claimed = 0;
        bool p_jumps_here = false;
        for (const Jump& j : p.jumps)
            if (cell_claims(p, i, j)) p_jumps_here = true;
        for (const Jump& j : V.jumps) {
            if (!cell_claims(V, i, j)) continue;
            const Jump* match = nullptr;
            for (const Jump& c : p.jumps)
                if (std::fabs(c.location - j.location) <= 1e-9 * (1 + std::fabs(j.location))) {
                    match = &c;
                    break;
                }
            const double w = match ? averaged_superposition(g, match->left, match->right)
                                   : g(pmid);
            out.atoms.push_back(Atom{j.location, w * (j.right - j.left)});
            claimed += j.right - j.left;
        }
        const double rest = V.values[i + 1] - V.values[i] - claimed;
        const double w = p_jumps_here
                             ? averaged_superposition(g, p.values[i], p.values[i + 1])
                             : g(pmid);
        out.density.values.push_back(w * rest / dx);
    }
    return out;
}

double shock_speed(double p_left, double p_right) {
    return 0.5 * (p_left + p_right);
}

} // namespace droplet::bv
