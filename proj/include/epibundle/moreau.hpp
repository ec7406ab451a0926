#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>
#include <vector>

#include "epibundle/oracle.hpp"
#include "epibundle/parallel.hpp"

namespace epibundle {

// Divergence cap shared with the subderivative estimator: objective values
// below -kDivergenceCap flag an unbounded infimum, quotient magnitudes above
// it flag an infinite limit.
inline constexpr double kDivergenceCap = 1e6;

struct ProxOptions {
    double search_radius_factor = 10.0;  // box radius = factor * (1 + |x|)
    int grid_points_1d = 2001;           // coarse resolution per axis in 1-D
    int refine_iterations = 200;
    double cluster_tol_factor = 1e-4;    // multi-valuedness threshold scale
    double value_tol = 1e-9;             // global-minimum membership slack
    bool use_oracle_prox = true;
    std::vector<std::pair<Vec, double>>* trace = nullptr;  // coarse samples

    int grid_points_per_axis(int dim) const {
        if (dim <= 1) return grid_points_1d;
        if (dim == 2) return 101;
        if (dim == 3) return 29;
        if (dim == 4) return 15;
        return 9;
    }
};

struct SolverTrace {
    int coarse_evaluations = 0;
    int refined_candidates = 0;
    double region_radius = 0.0;
};

// Output of the proximal solver: all global minimizers of
// u -> f(u) + |u - x|^2 / (2 lambda) found in the search region.
struct ProxResult {
    std::vector<Vec> minimizers;
    ExtReal value;
    bool multi_valued = false;
    SolverTrace solver_trace;
};

namespace detail {

inline double prox_objective(const FunctionOracle& f, double lambda,
                             const Vec& x, const Vec& u) {
    ExtReal fu = f.eval(u);
    if (fu.is_pos_inf()) return std::numeric_limits<double>::infinity();
    if (fu.is_neg_inf()) return -std::numeric_limits<double>::infinity();
    return fu.value() + (u - x).squaredNorm() / (2.0 * lambda);
}

// Coordinate descent with shrinking steps; handles kinked objectives.
inline double refine_coordinate_descent(const FunctionOracle& f, double lambda,
                                        const Vec& x, Vec& u, double step,
                                        int iterations) {
    double best = prox_objective(f, lambda, x, u);
    for (int it = 0; it < iterations && step > 1e-14 * (1.0 + x.norm()); ++it) {
        bool improved = false;
        for (int j = 0; j < u.size(); ++j) {
            for (double dir : {+1.0, -1.0}) {
                Vec cand = u;
                cand(j) += dir * step;
                double val = prox_objective(f, lambda, x, cand);
                if (val < best) {
                    best = val;
                    u = cand;
                    improved = true;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    return best;
}

}  // namespace detail

// Proximal mapping P_lambda f(x). Uses the oracle's closed-form prox when
// present; otherwise a coarse uniform grid over a box of radius
// 10 (1 + |x|) around x followed by local refinement. Nonconvex inputs make
// a global grid pass mandatory; a single descent run would miss branches.
inline ProxResult prox(const FunctionOracle& oracle, double lambda, const Vec& x,
                       const ProxOptions& opts = {}) {
    if (!(lambda > 0.0)) throw argument_error("prox: lambda must be > 0");
    if (x.size() != oracle.dim) throw argument_error("prox: dimension mismatch");
    if (oracle.prox_bound && lambda > *oracle.prox_bound + 1e-12)
        throw argument_error("prox: lambda exceeds the prox-bound of '" +
                             oracle.label + "'");

    double cluster_tol = opts.cluster_tol_factor * (1.0 + x.norm());
    ProxResult result;
    result.value = ExtReal::pos_inf();

    if (opts.use_oracle_prox && oracle.has_prox()) {
        std::vector<Vec> pts = oracle.prox(lambda, x);
        if (pts.empty()) throw numeric_error("prox: oracle returned no minimizer");
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : pts)
            best = std::min(best, detail::prox_objective(oracle, lambda, x, p));
        for (const auto& p : pts) {
            bool dup = false;
            for (const auto& q : result.minimizers)
                if ((p - q).norm() <= cluster_tol) dup = true;
            if (!dup) result.minimizers.push_back(p);
        }
        result.value = ExtReal(best);
        result.multi_valued = result.minimizers.size() > 1;
        return result;
    }

    int n = oracle.dim;
    double radius = opts.search_radius_factor * (1.0 + x.norm());
    int per_axis = opts.grid_points_per_axis(n);
    std::size_t total = 1;
    for (int j = 0; j < n; ++j) total *= static_cast<std::size_t>(per_axis);

    std::vector<double> values(total);
    auto grid_point = [&](std::size_t idx) {
        Vec u(n);
        std::size_t rem = idx;
        for (int j = 0; j < n; ++j) {
            int ij = static_cast<int>(rem % per_axis);
            rem /= per_axis;
            u(j) = x(j) - radius + 2.0 * radius * ij / (per_axis - 1);
        }
        return u;
    };

    // Coarse pass, widening the box while the minimum sits on its boundary:
    // a boundary minimum means the true infimum is further out (or does not
    // exist, which the cap turns into an unbounded error).
    double coarse_best = std::numeric_limits<double>::infinity();
    for (int expansion = 0; expansion < 10; ++expansion) {
        parallel_for_index(total, [&](std::size_t idx) {
            values[idx] = detail::prox_objective(oracle, lambda, x, grid_point(idx));
        });
        coarse_best = std::numeric_limits<double>::infinity();
        std::size_t best_idx = 0;
        for (std::size_t idx = 0; idx < total; ++idx) {
            if (values[idx] < coarse_best) {
                coarse_best = values[idx];
                best_idx = idx;
            }
        }
        if (coarse_best < -kDivergenceCap)
            throw unbounded_error(
                "prox: objective diverges below -" + std::to_string(kDivergenceCap) +
                "; '" + oracle.label + "' is not prox-bounded at this lambda");
        if (!std::isfinite(coarse_best)) break;  // +inf everywhere: no escape
        double spacing = 2.0 * radius / (per_axis - 1);
        Vec best = grid_point(best_idx);
        bool on_boundary = false;
        for (int j = 0; j < n; ++j)
            if (std::abs(std::abs(best(j) - x(j)) - radius) <= 1.5 * spacing)
                on_boundary = true;
        if (!on_boundary) break;
        radius *= 4.0;
    }
    if (opts.trace) {
        for (std::size_t idx = 0; idx < total; ++idx)
            opts.trace->emplace_back(grid_point(idx), values[idx]);
    }

    // Anchor candidates the grid can miss: the query point itself and the
    // origin (domains of indicator type often consist of exactly these).
    std::vector<std::pair<Vec, double>> anchors;
    for (const Vec& cand : {x, Vec(Vec::Zero(n))}) {
        double val = detail::prox_objective(oracle, lambda, x, cand);
        if (std::isfinite(val)) {
            anchors.emplace_back(cand, val);
            coarse_best = std::min(coarse_best, val);
        }
    }
    if (!std::isfinite(coarse_best))
        throw numeric_error("prox: objective is +inf on the whole search region");

    // Candidate starts: every grid point whose value is within the coarse
    // resolution slack of the best one. The slack is the largest objective
    // change one grid cell can hide given the 1/(2 lambda) curvature.
    double spacing = 2.0 * radius / (per_axis - 1);
    double slack = spacing * spacing / lambda + 1e-7 * (1.0 + std::abs(coarse_best));
    std::vector<Vec> starts;
    for (const auto& [cand, val] : anchors)
        if (val <= coarse_best + slack) starts.push_back(cand);
    for (std::size_t idx = 0; idx < total; ++idx) {
        if (values[idx] <= coarse_best + slack) starts.push_back(grid_point(idx));
    }
    // Thin clusters of adjacent starts before the expensive refinement.
    std::vector<Vec> thinned;
    for (const auto& s : starts) {
        bool near = false;
        for (const auto& t : thinned)
            if ((s - t).norm() <= 1.5 * spacing) near = true;
        if (!near) thinned.push_back(s);
    }

    std::vector<std::pair<Vec, double>> refined(thinned.size());
    parallel_for_index(thinned.size(), [&](std::size_t i) {
        Vec u = thinned[i];
        double val = detail::refine_coordinate_descent(oracle, lambda, x, u,
                                                       spacing, opts.refine_iterations);
        refined[i] = {u, val};
    });

    double best = std::numeric_limits<double>::infinity();
    for (const auto& [u, val] : refined) best = std::min(best, val);
    if (best < -kDivergenceCap)
        throw unbounded_error("prox: refined objective diverges");

    for (const auto& [u, val] : refined) {
        if (val > best + opts.value_tol * (1.0 + std::abs(best))) continue;
        bool dup = false;
        for (const auto& q : result.minimizers)
            if ((u - q).norm() <= cluster_tol) dup = true;
        if (!dup) result.minimizers.push_back(u);
    }
    result.value = ExtReal(best);
    result.multi_valued = result.minimizers.size() > 1;
    result.solver_trace.coarse_evaluations = static_cast<int>(total);
    result.solver_trace.refined_candidates = static_cast<int>(thinned.size());
    result.solver_trace.region_radius = radius;
    return result;
}

// Moreau envelope value e_lambda f(x).
inline ExtReal envelope(const FunctionOracle& oracle, double lambda, const Vec& x,
                        const ProxOptions& opts = {}) {
    return prox(oracle, lambda, x, opts).value;
}

struct GradientOptions {
    ProxOptions prox;
    bool fd_check = true;        // cross-validate against envelope differences
    double fd_step = 1e-6;       // relative central-difference step
    double fd_cross_tol = 1e-5;  // relative mismatch tolerance
};

// Envelope gradient via the proximal point: grad e_lambda f(x) =
// (x - P_lambda f(x)) / lambda, defined where the prox is single-valued.
inline Vec envelope_gradient(const FunctionOracle& oracle, double lambda,
                             const Vec& x, const GradientOptions& opts = {}) {
    ProxResult p = prox(oracle, lambda, x, opts.prox);
    if (p.multi_valued)
        throw nondifferentiable_error(
            "envelope_gradient: proximal mapping is multi-valued at the query point");
    Vec g = (x - p.minimizers.front()) / lambda;
    if (opts.fd_check) {
        double h = opts.fd_step * (1.0 + x.norm());
        Vec fd(x.size());
        for (int j = 0; j < x.size(); ++j) {
            Vec xp = x, xm = x;
            xp(j) += h;
            xm(j) -= h;
            ExtReal ep = envelope(oracle, lambda, xp, opts.prox);
            ExtReal em = envelope(oracle, lambda, xm, opts.prox);
            fd(j) = (ep.value() - em.value()) / (2.0 * h);
        }
        if ((fd - g).norm() > opts.fd_cross_tol * (1.0 + g.norm()))
            throw numeric_error(
                "envelope_gradient: proximal formula and finite differences disagree by " +
                std::to_string((fd - g).norm()));
    }
    return g;
}

struct HessianProbeOptions {
    double h0 = 1e-2;
    double rho = 0.5;
    int levels = 8;
    double hess_tol = 1e-4;   // relative Cauchy + symmetry tolerance
    double kink_tol = 1e-2;   // relative one-sided disagreement tolerance
};

// Finite-difference Hessian probe with a twice-differentiability verdict:
// central-difference Jacobians of a gradient map at geometrically shrinking
// steps. Converged requires the trailing three centrals to be Cauchy, the
// symmetry defect to vanish at the same tolerance, and the forward/backward
// one-sided Jacobians to agree at the finest step (a kinked gradient passes
// the central Cauchy test, so the one-sided gap is what rules it out).
struct HessianProbe {
    std::vector<double> steps;
    std::vector<SymMatrix> hessians;  // symmetrized central Jacobians
    bool converged = false;
    std::optional<SymMatrix> limit;
    double symmetry_defect = 0.0;
    double onesided_gap = 0.0;
};

inline HessianProbe hessian_probe_of_gradient(
    const std::function<Vec(const Vec&)>& gradient, const Vec& z,
    const HessianProbeOptions& opts = {}) {
    int n = static_cast<int>(z.size());
    HessianProbe probe;
    std::vector<Mat> centrals;
    double last_onesided = std::numeric_limits<double>::infinity();

    Vec g0 = gradient(z);
    for (int k = 0; k < opts.levels; ++k) {
        double h = opts.h0 * std::pow(opts.rho, k);
        Mat central(n, n), forward(n, n), backward(n, n);
        for (int j = 0; j < n; ++j) {
            Vec zp = z, zm = z;
            zp(j) += h;
            zm(j) -= h;
            Vec gp = gradient(zp);
            Vec gm = gradient(zm);
            central.col(j) = (gp - gm) / (2.0 * h);
            forward.col(j) = (gp - g0) / h;
            backward.col(j) = (g0 - gm) / h;
        }
        centrals.push_back(central);
        probe.steps.push_back(h);
        probe.hessians.push_back(SymMatrix(central));
        last_onesided = (forward - backward).norm();
    }

    const Mat& last = centrals.back();
    double scale = 1.0 + last.norm();
    probe.symmetry_defect = 0.5 * (last - last.transpose()).norm();
    probe.onesided_gap = last_onesided;

    bool cauchy = centrals.size() >= 3;
    for (size_t i = centrals.size() >= 3 ? centrals.size() - 3 : 0;
         cauchy && i < centrals.size(); ++i) {
        for (size_t j = i + 1; j < centrals.size(); ++j) {
            if ((centrals[i] - centrals[j]).norm() > opts.hess_tol * scale)
                cauchy = false;
        }
    }
    probe.converged = cauchy &&
                      probe.symmetry_defect <= opts.hess_tol * scale &&
                      probe.onesided_gap <= opts.kink_tol * scale;
    if (probe.converged) probe.limit = SymMatrix(last);
    return probe;
}

// Probe of the envelope Hessian at z via the proximal-point gradient.
inline HessianProbe envelope_hessian_probe(const FunctionOracle& oracle,
                                           double lambda, const Vec& z,
                                           const HessianProbeOptions& opts = {},
                                           const ProxOptions& prox_opts = {}) {
    GradientOptions gopts;
    gopts.prox = prox_opts;
    gopts.fd_check = false;
    auto gradient = [&oracle, lambda, gopts](const Vec& p) {
        return envelope_gradient(oracle, lambda, p, gopts);
    };
    return hessian_probe_of_gradient(gradient, z, opts);
}

// Wraps c * e_lambda f as a FunctionOracle (used to estimate subderivatives
// of envelopes with the same machinery as for f itself).
inline FunctionOracle envelope_oracle(const FunctionOracle& oracle, double lambda,
                                      double scale = 1.0,
                                      const ProxOptions& prox_opts = {}) {
    FunctionOracle env;
    env.dim = oracle.dim;
    env.label = "envelope(" + oracle.label + ")";
    auto base = std::make_shared<FunctionOracle>(oracle);
    env.eval = [base, lambda, scale, prox_opts](const Vec& x) {
        return ExtReal(scale * envelope(*base, lambda, x, prox_opts).value());
    };
    env.grad = [base, lambda, scale, prox_opts](const Vec& x) {
        GradientOptions gopts;
        gopts.prox = prox_opts;
        gopts.fd_check = false;
        Vec g = envelope_gradient(*base, lambda, x, gopts);
        return Vec(scale * g);
    };
    env.prox_bound = std::nullopt;
    return env;
}

}  // namespace epibundle
