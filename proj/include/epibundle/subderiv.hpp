#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "epibundle/moreau.hpp"
#include "epibundle/oracle.hpp"
#include "epibundle/parallel.hpp"

namespace epibundle {

// Deterministic uniform pseudo-randoms (splitmix64); direction sets and ball
// samples must be reproducible from the seed alone.
class DeterministicRng {
public:
    explicit DeterministicRng(std::uint64_t seed) : state_(seed) {}
    double uniform() {  // in [0,1)
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        z = z ^ (z >> 31);
        return static_cast<double>(z >> 11) * 0x1.0p-53;
    }
    double normal() {
        double u1 = std::max(uniform(), 1e-16);
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

private:
    std::uint64_t state_;
};

// Shrinking-window schedules for the epigraphical limit estimates.
struct EpiGrid {
    double t0 = 1e-1;
    double t_rho = 0.5;
    int t_levels = 20;
    double delta0 = 0.5;
    double delta_rho = 0.5;
    int delta_levels = 10;
    int directions = 64;
    int ball_samples = 32;
    std::uint64_t seed = 2024;

    double est_tol = 1e-3;        // window stabilization tolerance (relative)
    double cap = kDivergenceCap;  // clamp for +/-inf classification
    double blowup_floor = 50.0;   // magnitude before a trend counts as blow-up
    double blowup_ratio = 1.05;   // per-level growth declaring divergence

    std::vector<double> t_schedule() const {
        std::vector<double> t(t_levels);
        for (int i = 0; i < t_levels; ++i) t[i] = t0 * std::pow(t_rho, i);
        return t;
    }
    std::vector<double> delta_schedule() const {
        std::vector<double> d(delta_levels);
        for (int j = 0; j < delta_levels; ++j) d[j] = delta0 * std::pow(delta_rho, j);
        return d;
    }
};

// Unit directions: {-1,+1} in 1-D, equally spaced on the circle in 2-D,
// a seeded spherical point set otherwise.
inline std::vector<Vec> direction_set(int dim, const EpiGrid& grid) {
    std::vector<Vec> dirs;
    if (dim == 1) {
        Vec p(1), m(1);
        p << 1.0;
        m << -1.0;
        dirs = {p, m};
        return dirs;
    }
    if (dim == 2) {
        int count = std::max(4, grid.directions);
        for (int i = 0; i < count; ++i) {
            double a = 6.283185307179586 * i / count;
            Vec d(2);
            d << std::cos(a), std::sin(a);
            dirs.push_back(d);
        }
        return dirs;
    }
    DeterministicRng rng(grid.seed);
    int count = std::max(2 * dim, grid.directions);
    for (int i = 0; i < count; ++i) {
        Vec d(dim);
        for (int j = 0; j < dim; ++j) d(j) = rng.normal();
        if (d.norm() < 1e-12) d.setOnes();
        dirs.push_back(d.normalized());
    }
    // Coordinate axes are always probed.
    for (int j = 0; j < dim; ++j) {
        Vec e = Vec::Zero(dim);
        e(j) = 1.0;
        dirs.push_back(e);
        dirs.push_back(-e);
    }
    return dirs;
}

// Offsets with norm <= 1 used to sample a ball; the center is always first
// so that exact critical rays are never missed.
inline std::vector<Vec> ball_offsets(int dim, const EpiGrid& grid) {
    std::vector<Vec> offs;
    offs.push_back(Vec::Zero(dim));
    if (dim == 1) {
        int half = std::max(2, grid.ball_samples / 2);
        for (int i = 1; i <= half; ++i) {
            double r = static_cast<double>(i) / half;
            Vec p(1), m(1);
            p << r;
            m << -r;
            offs.push_back(p);
            offs.push_back(m);
        }
        return offs;
    }
    for (int j = 0; j < dim; ++j) {
        Vec e = Vec::Zero(dim);
        e(j) = 1.0;
        offs.push_back(e);
        offs.push_back(-e);
    }
    DeterministicRng rng(grid.seed ^ 0x5eedull);
    while (static_cast<int>(offs.size()) < grid.ball_samples) {
        Vec d(dim);
        for (int j = 0; j < dim; ++j) d(j) = rng.normal();
        if (d.norm() < 1e-12) continue;
        d.normalize();
        offs.push_back(d * (0.5 + 0.5 * rng.uniform()));
    }
    return offs;
}

// Second-order difference quotient
//   (f(x + t w) - f(x) - t <v, w>) / (t^2 / 2),
// exact as an extended real (+inf when f(x + t w) = +inf).
inline ExtReal delta2(const FunctionOracle& oracle, const Vec& x, const Vec& v,
                      double t, const Vec& w) {
    if (!(t > 0.0)) throw argument_error("delta2: t must be > 0");
    ExtReal fx = oracle.eval(x);
    if (!fx.is_finite()) throw argument_error("delta2: f(x) must be finite");
    ExtReal fwd = oracle.eval(x + t * w);
    if (fwd.is_pos_inf()) return ExtReal::pos_inf();
    double num = fwd.value() - fx.value() - t * v.dot(w);
    return ExtReal(num / (0.5 * t * t));
}

// First-order difference quotient (f(x + t w) - f(x)) / t.
inline ExtReal delta1(const FunctionOracle& oracle, const Vec& x, double t,
                      const Vec& w) {
    if (!(t > 0.0)) throw argument_error("delta1: t must be > 0");
    ExtReal fx = oracle.eval(x);
    if (!fx.is_finite()) throw argument_error("delta1: f(x) must be finite");
    ExtReal fwd = oracle.eval(x + t * w);
    if (fwd.is_pos_inf()) return ExtReal::pos_inf();
    return ExtReal((fwd.value() - fx.value()) / t);
}

enum class EstimateVerdict { finite, pos_inf, neg_inf, nonconvergent };

inline const char* to_string(EstimateVerdict v) {
    switch (v) {
        case EstimateVerdict::finite: return "finite";
        case EstimateVerdict::pos_inf: return "pos_inf";
        case EstimateVerdict::neg_inf: return "neg_inf";
        default: return "nonconvergent";
    }
}

struct SubderivEstimate {
    Vec direction;
    ExtReal lower;
    ExtReal upper;
    EstimateVerdict verdict = EstimateVerdict::nonconvergent;        // of lower
    EstimateVerdict upper_verdict = EstimateVerdict::nonconvergent;  // of upper
    std::vector<ExtReal> lower_windows;
    std::vector<ExtReal> upper_windows;
};

namespace detail {

// Detects geometric divergence over the tail of a sequence: consistent sign,
// magnitudes growing by at least `ratio` per step, final magnitude above the
// floor. Returns +1 / -1 for the divergence sign, 0 otherwise.
inline int divergence_sign(const std::vector<double>& vals, double ratio,
                           double floor_mag) {
    const int need = 4;
    if (static_cast<int>(vals.size()) < need) return 0;
    size_t b = vals.size() - need;
    double sign = vals[b] > 0 ? 1.0 : (vals[b] < 0 ? -1.0 : 0.0);
    if (sign == 0.0) return 0;
    for (size_t i = b; i < vals.size(); ++i) {
        if (vals[i] * sign <= 0) return 0;
        if (i > b && std::abs(vals[i]) < ratio * std::abs(vals[i - 1])) return 0;
    }
    if (std::abs(vals.back()) < floor_mag) return 0;
    return sign > 0 ? 1 : -1;
}

struct WindowAnalysis {
    ExtReal value;
    EstimateVerdict verdict;
};

// Classifies a window sequence E_j (one value per shrinking-ball level):
// all-infinite tail, geometric blow-up, stabilization of the
// delta-extrapolated values, or none of these. t_traces[j] holds the
// per-t-level ball minima at ball level j over the deep t-range.
inline WindowAnalysis classify_windows(
    const std::vector<ExtReal>& windows,
    const std::vector<std::vector<double>>& t_traces, const EpiGrid& grid) {
    WindowAnalysis out{ExtReal(0.0), EstimateVerdict::nonconvergent};
    size_t m = windows.size();
    if (m == 0) return out;

    auto tail_all = [&](bool pos) {
        size_t k = std::min<size_t>(3, m);
        for (size_t j = m - k; j < m; ++j) {
            if (pos && !windows[j].is_pos_inf()) return false;
            if (!pos && !windows[j].is_neg_inf()) return false;
        }
        return true;
    };
    if (tail_all(true)) return {ExtReal::pos_inf(), EstimateVerdict::pos_inf};
    if (tail_all(false)) return {ExtReal::neg_inf(), EstimateVerdict::neg_inf};

    // Downward divergence must show at every ball level to certify a -inf
    // epigraphical lower limit (the inner t-liminf dives for each fixed
    // ball radius); the magnitude floor is read where the scale is visible,
    // at the coarsest ball. Shrinking balls dampen the magnitudes near the
    // base direction, so no single trace suffices.
    {
        bool all_dive = !t_traces.empty();
        double max_tail = 0.0;
        for (const auto& trace : t_traces) {
            if (static_cast<int>(trace.size()) < 4) {
                all_dive = false;
                break;
            }
            if (divergence_sign(trace, grid.blowup_ratio, 0.0) >= 0) {
                all_dive = false;
                break;
            }
            max_tail = std::max(max_tail, std::abs(trace.back()));
        }
        if (all_dive && max_tail >= grid.blowup_floor)
            return {ExtReal::neg_inf(), EstimateVerdict::neg_inf};
    }

    // Upward divergence along the t-levels at the finest ball forces the
    // lower limit to +inf (the ball minima escape upward as t shrinks).
    if (!t_traces.empty()) {
        int ts = divergence_sign(t_traces.back(), grid.blowup_ratio,
                                 grid.blowup_floor);
        if (ts > 0) return {ExtReal::pos_inf(), EstimateVerdict::pos_inf};
    }

    std::vector<double> finite;
    for (const auto& w : windows) {
        if (!w.is_finite()) return out;  // mixed infinities: no verdict
        finite.push_back(w.value());
    }
    int ws = divergence_sign(finite, grid.blowup_ratio, grid.blowup_floor);
    if (ws > 0) return {ExtReal::pos_inf(), EstimateVerdict::pos_inf};
    if (ws < 0) return {ExtReal::neg_inf(), EstimateVerdict::neg_inf};

    // The ball min biases each window by O(delta); extrapolating the
    // geometric delta-schedule removes the linear term before the
    // stabilization test.
    double factor = grid.delta_rho / (1.0 - grid.delta_rho);
    std::vector<double> extrap;
    extrap.push_back(finite.front());
    for (size_t j = 1; j < finite.size(); ++j)
        extrap.push_back(finite[j] + factor * (finite[j] - finite[j - 1]));

    if (extrap.size() >= 3) {
        size_t b = extrap.size() - 3;
        double scale = std::max(1.0, std::abs(extrap.back()));
        bool stable = true;
        for (size_t i = b; stable && i < extrap.size(); ++i)
            for (size_t j = i + 1; j < extrap.size(); ++j)
                if (std::abs(extrap[i] - extrap[j]) > grid.est_tol * scale)
                    stable = false;
        if (stable) {
            double v = extrap.back();
            if (v > grid.cap) return {ExtReal::pos_inf(), EstimateVerdict::pos_inf};
            if (v < -grid.cap) return {ExtReal::neg_inf(), EstimateVerdict::neg_inf};
            return {ExtReal(v), EstimateVerdict::finite};
        }
    }
    out.value = windows.back();
    return out;
}

// One difference-quotient evaluation: the value and the magnitude of the
// function values that entered its numerator (the cancellation scale).
struct QuotientSample {
    ExtReal value;
    double numerator_scale = 0.0;
};

// Core window estimator shared by the first- and second-order paths.
// quotient(t, w') is evaluated on every (t-level, ball sample) cell.
inline SubderivEstimate window_estimate(
    const std::function<QuotientSample(double, const Vec&)>& quotient,
    const Vec& w, const EpiGrid& grid, double quotient_denominator_power) {
    std::vector<double> ts = grid.t_schedule();
    std::vector<double> ds = grid.delta_schedule();
    std::vector<Vec> offs = ball_offsets(static_cast<int>(w.size()), grid);

    int nt = static_cast<int>(ts.size());
    int nd = static_cast<int>(ds.size());
    std::vector<std::vector<ExtReal>> m(nt, std::vector<ExtReal>(nd));
    std::vector<std::vector<double>> noise(nt, std::vector<double>(nd, 0.0));
    parallel_for_index(static_cast<std::size_t>(nt), [&](std::size_t i) {
        for (int j = 0; j < nd; ++j) {
            ExtReal best = ExtReal::pos_inf();
            double scale = 0.0;
            for (const auto& off : offs) {
                QuotientSample q = quotient(ts[i], w + ds[j] * off);
                if (q.value < best) best = q.value;
                scale = std::max(scale, q.numerator_scale);
            }
            m[i][j] = best;
            // A priori rounding bound on the quotient: the numerator cancels
            // values of magnitude `scale` and is divided by t^p / 2.
            double denom = 0.5 * std::pow(ts[i], quotient_denominator_power);
            noise[i][j] = 32.0 * 2.2e-16 * scale / denom;
        }
    });

    // A t-level is adequate for a window when its rounding bound is well
    // below the value it contributes; deep levels lose the cancellation
    // battle once f(x) is of order one.
    auto adequate = [&](int i, int j) {
        double mag = m[i][j].is_finite() ? std::abs(m[i][j].value()) : 1e30;
        return noise[i][j] <= std::max(1e-4, 1e-3 * (1.0 + mag));
    };

    // Window j pairs ball radius ds[j] with the t-levels below ts[j+offset];
    // the offset pushes every window into the deep end of the t-schedule.
    int offset = std::max(0, nt - nd);
    SubderivEstimate est;
    est.direction = w;
    for (int j = 0; j < nd; ++j) {
        int i0 = std::min(j + offset, nt - 1);
        ExtReal lo = ExtReal::pos_inf();
        ExtReal hi = ExtReal::neg_inf();
        bool any = false;
        for (int i = i0; i < nt; ++i) {
            if (!adequate(i, j)) continue;
            lo = ext_min(lo, m[i][j]);
            hi = ext_max(hi, m[i][j]);
            any = true;
        }
        if (!any) {
            // Every level in this window is noise-dominated; fall back to
            // the deepest adequate level anywhere, else the shallowest
            // in-window level.
            int pick = i0;
            for (int i = 0; i < nt; ++i)
                if (adequate(i, j)) pick = i;
            lo = hi = m[pick][j];
        }
        est.lower_windows.push_back(lo);
        est.upper_windows.push_back(hi);
    }

    // Per-t-level traces over the whole deep range, one per ball level; the
    // min over t saturates at the schedule bottom for negative blow-ups, so
    // these traces are the only place they stay visible.
    std::vector<std::vector<double>> traces(nd);
    {
        int i0 = std::min(offset, nt - 1);
        for (int j = 0; j < nd; ++j)
            for (int i = i0; i < nt; ++i)
                if (m[i][j].is_finite()) traces[j].push_back(m[i][j].value());
    }

    auto lo = detail::classify_windows(est.lower_windows, traces, grid);
    est.lower = lo.value;
    est.verdict = lo.verdict;
    auto hi = detail::classify_windows(est.upper_windows, traces, grid);
    est.upper = hi.value;
    est.upper_verdict = hi.verdict;

    // Coherence of the surrogates: an infinite lower limit forces the upper
    // one, and a -inf upper limit forces the lower one.
    if (est.verdict == EstimateVerdict::pos_inf) {
        est.upper = ExtReal::pos_inf();
        est.upper_verdict = EstimateVerdict::pos_inf;
    }
    if (est.upper_verdict == EstimateVerdict::neg_inf) {
        est.lower = ExtReal::neg_inf();
        est.verdict = EstimateVerdict::neg_inf;
    }
    return est;
}

}  // namespace detail

// Numerical second-order subderivative at (x, v) in direction w: lower is
// the shrinking-window surrogate of the epigraphical lower limit of the
// second-order quotients, upper the matching upper surrogate.
inline SubderivEstimate d2_estimate(const FunctionOracle& oracle,
                                    const PrimalDualPair& pair, const Vec& w,
                                    const EpiGrid& grid = {}) {
    auto quotient = [&](double t, const Vec& wp) -> detail::QuotientSample {
        ExtReal fwd = oracle.eval(pair.x + t * wp);
        if (fwd.is_pos_inf()) return {ExtReal::pos_inf(), 0.0};
        double linear = t * pair.v.dot(wp);
        double num = fwd.value() - pair.fx - linear;
        double scale = std::abs(fwd.value()) + std::abs(pair.fx) + std::abs(linear);
        return {ExtReal(num / (0.5 * t * t)), scale};
    };
    return detail::window_estimate(quotient, w, grid, 2.0);
}

// Numerical first-order subderivative (lower windows only).
inline ExtReal d1_estimate(const FunctionOracle& oracle, const Vec& x,
                           const Vec& w, const EpiGrid& grid = {}) {
    ExtReal fx = oracle.eval(x);
    if (!fx.is_finite()) throw argument_error("d1_estimate: f(x) must be finite");
    double fx_val = fx.value();
    auto quotient = [&](double t, const Vec& wp) -> detail::QuotientSample {
        ExtReal fwd = oracle.eval(x + t * wp);
        if (fwd.is_pos_inf()) return {ExtReal::pos_inf(), 0.0};
        double scale = std::abs(fwd.value()) + std::abs(fx_val);
        return {ExtReal((fwd.value() - fx_val) / t), scale};
    };
    SubderivEstimate est = detail::window_estimate(quotient, w, grid, 1.0);
    if (est.verdict == EstimateVerdict::nonconvergent)
        throw numeric_error("d1_estimate: windows did not stabilize");
    return est.lower;
}

// Membership of w in the critical cone: the first subderivative matches
// <v, w> within cone_tol * (1 + |w|).
inline bool critical_cone_test(const FunctionOracle& oracle, const Vec& x,
                               const Vec& v, const Vec& w, const EpiGrid& grid = {},
                               double cone_tol = 1e-3) {
    ExtReal d1 = d1_estimate(oracle, x, w, grid);
    if (!d1.is_finite()) return false;
    return std::abs(d1.value() - v.dot(w)) <= cone_tol * (1.0 + w.norm());
}

enum class EpiDiffVerdict { yes, no, indeterminate };

inline const char* to_string(EpiDiffVerdict v) {
    switch (v) {
        case EpiDiffVerdict::yes: return "yes";
        case EpiDiffVerdict::no: return "no";
        default: return "indeterminate";
    }
}

struct EpiDiffReport {
    EpiDiffVerdict verdict = EpiDiffVerdict::indeterminate;
    std::vector<SubderivEstimate> table;  // one row per (direction, scale)
};

// Twice epi-differentiability surrogate: the lower and upper window limits
// must agree (or be infinities of the same sign) on every grid direction at
// radial scales {0.5, 1, 2}. A stabilized strict gap on some direction gives
// "no"; unresolved windows give "indeterminate".
inline EpiDiffReport twice_epi_diff_test(const FunctionOracle& oracle,
                                         const PrimalDualPair& pair,
                                         const EpiGrid& grid = {}) {
    std::vector<Vec> dirs = direction_set(oracle.dim, grid);
    const double scales[] = {0.5, 1.0, 2.0};
    EpiDiffReport report;
    bool any_gap = false;
    bool any_unresolved = false;

    std::vector<SubderivEstimate> rows(dirs.size() * 3);
    parallel_for_index(rows.size(), [&](std::size_t idx) {
        const Vec& d = dirs[idx / 3];
        double c = scales[idx % 3];
        rows[idx] = d2_estimate(oracle, pair, Vec(c * d), grid);
    });
    for (auto& est : rows) {
        bool l_res = est.verdict != EstimateVerdict::nonconvergent;
        bool u_res = est.upper_verdict != EstimateVerdict::nonconvergent;
        if (!l_res || !u_res) {
            any_unresolved = true;
        } else if (est.verdict == est.upper_verdict) {
            if (est.verdict == EstimateVerdict::finite) {
                double scale = std::max({1.0, std::abs(est.lower.value()),
                                         std::abs(est.upper.value())});
                if (std::abs(est.lower.value() - est.upper.value()) >
                    grid.est_tol * scale)
                    any_gap = true;
            }
        } else {
            any_gap = true;
        }
        report.table.push_back(std::move(est));
    }
    if (any_gap)
        report.verdict = EpiDiffVerdict::no;
    else if (any_unresolved)
        report.verdict = EpiDiffVerdict::indeterminate;
    else
        report.verdict = EpiDiffVerdict::yes;
    return report;
}

// Sampled second-order growth certificate on the ball B(x, radius):
//   f(y) >= f(x) + <v, y - x> + (kappa/2) |y - x|^2 - 1e-9.
// The slack threshold is inset by one part in 1e6 so that a model violation
// exactly equal to the slack still counts as a failure regardless of
// rounding direction.
inline bool growth_check(const FunctionOracle& oracle, const PrimalDualPair& pair,
                         double kappa, double radius, int samples = 200,
                         const EpiGrid& grid = {}) {
    if (!(radius > 0.0)) throw argument_error("growth_check: radius must be > 0");
    std::vector<Vec> dirs = direction_set(oracle.dim, grid);
    int radial = std::max(2, samples / static_cast<int>(dirs.size()));
    double slack = 1e-9 * (1.0 - 1e-6);
    for (const auto& d : dirs) {
        for (int i = 1; i <= radial; ++i) {
            double r = radius * i / radial;
            Vec y = pair.x + r * d;
            ExtReal fy = oracle.eval(y);
            if (fy.is_pos_inf()) continue;
            double rhs = pair.fx + pair.v.dot(y - pair.x) +
                         0.5 * kappa * (y - pair.x).squaredNorm();
            if (fy.value() < rhs - slack) return false;
        }
    }
    return true;
}

// Sampled certificate for the variational s-convexity inequality: for every
// sampled graph point (x, v) of the localization and every x' in
// B(center, radius),
//   f(x') >= f(x) + <v, x' - x> + (s/2) |x' - x|^2 - 1e-9.
inline bool svarconv_certificate(const FunctionOracle& oracle,
                                 const AttentiveLocalization& loc, double s,
                                 double radius,
                                 const std::vector<PrimalDualPair>& graph_samples,
                                 const EpiGrid& grid = {}) {
    for (const auto& g : graph_samples) {
        if (!localization_membership(oracle, loc, g.x, g.v))
            throw argument_error(
                "svarconv_certificate: sample outside the localization");
    }
    std::vector<Vec> dirs = direction_set(oracle.dim, grid);
    std::vector<Vec> probes;
    probes.push_back(loc.center.x);
    for (const auto& d : dirs)
        for (double r : {0.25, 0.5, 0.75, 1.0})
            probes.push_back(loc.center.x + (r * radius) * d);
    for (const auto& g : graph_samples) {
        for (const auto& xp : probes) {
            ExtReal fxp = oracle.eval(xp);
            if (fxp.is_pos_inf()) continue;
            double rhs = g.fx + g.v.dot(xp - g.x) +
                         0.5 * s * (xp - g.x).squaredNorm();
            if (fxp.value() < rhs - 1e-9) return false;
        }
    }
    return true;
}

}  // namespace epibundle
