#pragma once

#include <optional>
#include <vector>

#include "epibundle/quadform.hpp"
#include "epibundle/subderiv.hpp"

namespace epibundle {

enum class GtdDecision { gtd, epi_only, not_epi, indeterminate };
enum class GtdRoute { direct_fit, moreau, both };

inline const char* to_string(GtdDecision d) {
    switch (d) {
        case GtdDecision::gtd: return "gtd";
        case GtdDecision::epi_only: return "epi_only";
        case GtdDecision::not_epi: return "not_epi";
        default: return "indeterminate";
    }
}

inline const char* to_string(GtdRoute r) {
    switch (r) {
        case GtdRoute::direct_fit: return "direct";
        case GtdRoute::moreau: return "moreau";
        default: return "both";
    }
}

// Verdict of a generalized-twice-differentiability check. When the decision
// is gtd, `form` is the recovered generalized quadratic form at bundle scale,
// i.e. form(w) = (1/2) d2f(x|v)(w); both routes produce the same object.
struct GtdVerdict {
    GtdDecision decision = GtdDecision::indeterminate;
    std::optional<GQF> form;
    GtdRoute route = GtdRoute::direct_fit;
    double residual = 0.0;
    std::vector<SubderivEstimate> evidence;
    std::optional<HessianProbe> probe;
    std::string detail;
};

struct GtdOptions {
    double fit_tol = 5e-2;        // relative quadratic-fit tolerance
    double span_tol = 1e-6;       // membership tolerance for the finite set
    HessianProbeOptions probe;    // envelope-Hessian probe configuration
    ProxOptions prox;

    GtdOptions() {
        // Envelope Hessians drift linearly in the step near the corpus
        // kinks; the default 8 levels stop short of the Cauchy tolerance.
        probe.levels = 16;
    }
};

// Direct route: estimate the second subderivative on the direction grid,
// require the epigraphical lower and upper limits to coincide, check that
// the finite directions form a linear subspace, and fit a symmetric matrix
// on it using the degree-2 homogeneity of the quotients.
inline GtdVerdict gtd_check_direct(const FunctionOracle& oracle,
                                   const PrimalDualPair& pair,
                                   const EpiGrid& grid = {},
                                   const GtdOptions& opts = {}) {
    GtdVerdict verdict;
    verdict.route = GtdRoute::direct_fit;

    EpiDiffReport epi = twice_epi_diff_test(oracle, pair, grid);
    verdict.evidence = epi.table;
    if (epi.verdict == EpiDiffVerdict::no) {
        verdict.decision = GtdDecision::not_epi;
        return verdict;
    }
    if (epi.verdict == EpiDiffVerdict::indeterminate) {
        verdict.decision = GtdDecision::indeterminate;
        return verdict;
    }

    int n = oracle.dim;
    std::vector<Vec> finite_dirs;
    std::vector<std::pair<Vec, double>> equations;  // (w, d2 value)
    bool any_neg_inf = false;
    for (const auto& row : epi.table) {
        if (row.verdict == EstimateVerdict::finite) {
            equations.emplace_back(row.direction, row.lower.value());
            if (std::abs(row.direction.norm() - 1.0) < 1e-9)
                finite_dirs.push_back(row.direction);
        } else if (row.verdict == EstimateVerdict::neg_inf) {
            any_neg_inf = true;
        }
    }
    if (any_neg_inf) {
        // The subderivative takes -inf, so it cannot be a (proper)
        // generalized quadratic form.
        verdict.decision = GtdDecision::epi_only;
        verdict.detail = "second subderivative takes -inf";
        return verdict;
    }

    // Closure of the finite set under negation.
    auto is_finite_dir = [&](const Vec& d) {
        SubderivEstimate est = d2_estimate(oracle, pair, d, grid);
        return est.verdict == EstimateVerdict::finite;
    };
    for (const auto& d : finite_dirs) {
        bool has_neg = false;
        for (const auto& e : finite_dirs)
            if ((d + e).norm() < 1e-9) has_neg = true;
        if (!has_neg && !is_finite_dir(-d)) {
            verdict.decision = GtdDecision::epi_only;
            verdict.detail = "finite directions are not closed under negation";
            return verdict;
        }
    }

    Subspace l = finite_dirs.empty()
                     ? Subspace::zero(n)
                     : Subspace::span_of(finite_dirs, n);

    // No infinite direction may lie in the span of the finite ones, and
    // sampled sums of finite directions must stay finite; both test that the
    // finite set is a genuine subspace without constructing it prematurely.
    for (const auto& row : epi.table) {
        if (row.verdict == EstimateVerdict::pos_inf &&
            l.distance(row.direction) <=
                opts.span_tol * (1.0 + row.direction.norm())) {
            verdict.decision = GtdDecision::epi_only;
            verdict.detail = "an infinite direction lies in the span of the finite set";
            return verdict;
        }
    }
    for (size_t i = 0; i + 1 < finite_dirs.size() && i < 4; ++i) {
        Vec s = finite_dirs[i] + finite_dirs[i + 1];
        if (s.norm() < 1e-9) continue;
        if (!is_finite_dir(Vec(s.normalized()))) {
            verdict.decision = GtdDecision::epi_only;
            verdict.detail = "finite directions are not closed under sums";
            return verdict;
        }
    }

    if (l.is_zero()) {
        verdict.decision = GtdDecision::gtd;
        verdict.form = GQF(SymMatrix::zero(n), l);
        verdict.residual = 0.0;
        return verdict;
    }

    // Least-squares fit of <w, A w> = d2(w) for A = C S C^T supported on L.
    const Mat& c = l.basis();
    int m = l.dim();
    int unknowns = m * (m + 1) / 2;
    Mat lhs(static_cast<Eigen::Index>(equations.size()), unknowns);
    Vec rhs(static_cast<Eigen::Index>(equations.size()));
    for (size_t r = 0; r < equations.size(); ++r) {
        Vec y = c.transpose() * equations[r].first;
        int col = 0;
        for (int k = 0; k < m; ++k)
            for (int lcol = k; lcol < m; ++lcol, ++col)
                lhs(static_cast<Eigen::Index>(r), col) =
                    (k == lcol) ? y(k) * y(k) : 2.0 * y(k) * y(lcol);
        rhs(static_cast<Eigen::Index>(r)) = equations[r].second;
    }
    Vec sol = lhs.colPivHouseholderQr().solve(rhs);
    Mat s = Mat::Zero(m, m);
    {
        int col = 0;
        for (int k = 0; k < m; ++k)
            for (int lcol = k; lcol < m; ++lcol, ++col) {
                s(k, lcol) = sol(col);
                s(lcol, k) = sol(col);
            }
    }
    Mat a = c * s * c.transpose();

    double residual = 0.0;
    for (const auto& [w, val] : equations) {
        double pred = w.dot(a * w);
        residual = std::max(residual, std::abs(pred - val) / std::max(1.0, std::abs(val)));
    }
    verdict.residual = residual;
    if (residual <= opts.fit_tol) {
        verdict.decision = GtdDecision::gtd;
        verdict.form = GQF(SymMatrix(a), l);
    } else {
        verdict.decision = GtdDecision::epi_only;
        verdict.detail = "quadratic fit residual " + std::to_string(residual);
    }
    return verdict;
}

// Moreau route: the function is generalized twice differentiable at (x, v)
// exactly when the envelope is classically twice differentiable at
// x + lambda v, in which case the form is recovered from the envelope
// Hessian. When the probe fails, the envelope's own epigraphical test
// separates epi_only from not_epi.
inline GtdVerdict gtd_check_moreau(const FunctionOracle& oracle,
                                   const PrimalDualPair& pair, double lambda,
                                   double r_level, const EpiGrid& grid = {},
                                   const GtdOptions& opts = {}) {
    GtdVerdict verdict;
    verdict.route = GtdRoute::moreau;
    if (!(lambda > 0.0) || (r_level > 0.0 && !(lambda < 1.0 / r_level)))
        throw argument_error("gtd_check_moreau: need lambda in (0, 1/r)");

    Vec z = pair.x + lambda * pair.v;
    ProxResult pr = prox(oracle, lambda, z, opts.prox);
    if (pr.multi_valued)
        throw nondifferentiable_error(
            "gtd_check_moreau: proximal mapping multi-valued at the base point; "
            "prox-regularity hypothesis is violated");

    HessianProbe probe = envelope_hessian_probe(oracle, lambda, z, opts.probe,
                                                opts.prox);
    verdict.probe = probe;
    if (probe.converged) {
        verdict.decision = GtdDecision::gtd;
        // Split at the probe's own accuracy: a Hessian within probe error of
        // 1/lambda along some direction means that direction is collapsed.
        double split = 10.0 * lambda * opts.probe.hess_tol *
                       (1.0 + probe.limit->mat().norm());
        verdict.form = gqf_from_envelope_hessian(*probe.limit, lambda, split);
        verdict.residual = probe.symmetry_defect;
        return verdict;
    }

    FunctionOracle env = envelope_oracle(oracle, lambda, 1.0, opts.prox);
    PrimalDualPair env_pair(env, z, pair.v);
    EpiDiffReport epi = twice_epi_diff_test(env, env_pair, grid);
    verdict.evidence = epi.table;
    switch (epi.verdict) {
        case EpiDiffVerdict::yes: verdict.decision = GtdDecision::epi_only; break;
        case EpiDiffVerdict::no: verdict.decision = GtdDecision::not_epi; break;
        default: verdict.decision = GtdDecision::indeterminate; break;
    }
    verdict.detail = "envelope Hessian probe did not converge";
    return verdict;
}

// Runs both routes; disagreement is reported as indeterminate with both
// evidence tables attached rather than silently tie-broken.
inline GtdVerdict gtd_check_both(const FunctionOracle& oracle,
                                 const PrimalDualPair& pair, double lambda,
                                 double r_level, const EpiGrid& grid = {},
                                 const GtdOptions& opts = {}) {
    GtdVerdict direct = gtd_check_direct(oracle, pair, grid, opts);
    GtdVerdict moreau = gtd_check_moreau(oracle, pair, lambda, r_level, grid, opts);
    GtdVerdict verdict;
    verdict.route = GtdRoute::both;
    verdict.evidence = direct.evidence;
    verdict.probe = moreau.probe;
    verdict.residual = std::max(direct.residual, moreau.residual);
    if (direct.decision == moreau.decision) {
        verdict.decision = direct.decision;
        if (direct.decision == GtdDecision::gtd) {
            double dist = gqf_graph_distance(*direct.form, *moreau.form);
            if (dist > 1e-3) {
                verdict.decision = GtdDecision::indeterminate;
                verdict.detail = "routes returned different forms (projector distance " +
                                 std::to_string(dist) + ")";
            } else {
                verdict.form = moreau.form;
            }
        }
    } else {
        verdict.decision = GtdDecision::indeterminate;
        verdict.detail = std::string("route disagreement: direct=") +
                         to_string(direct.decision) + ", moreau=" +
                         to_string(moreau.decision);
    }
    return verdict;
}

// Validates the closed-form envelope of the fitted form against the
// numerically estimated second subderivative of (1/2) e_lambda f at
// (x + lambda v | v/2). Returns the largest gap over the direction grid.
inline double envelope_identity_check(const FunctionOracle& oracle,
                                      const PrimalDualPair& pair, double lambda,
                                      double r_level, const EpiGrid& grid = {},
                                      const GtdOptions& opts = {}) {
    GtdVerdict verdict = gtd_check_direct(oracle, pair, grid, opts);
    if (verdict.decision != GtdDecision::gtd)
        throw argument_error(
            "envelope_identity_check: function is not generalized twice "
            "differentiable at the pair (direct route)");
    SymMatrix q = moreau_of_gqf(*verdict.form, lambda, r_level);

    FunctionOracle half_env = envelope_oracle(oracle, lambda, 0.5, opts.prox);
    Vec z = pair.x + lambda * pair.v;
    PrimalDualPair env_pair(half_env, z, Vec(0.5 * pair.v));

    double max_gap = 0.0;
    for (const auto& d : direction_set(oracle.dim, grid)) {
        double lhs = 0.5 * q.quad(d);
        SubderivEstimate est = d2_estimate(half_env, env_pair, d, grid);
        if (est.verdict != EstimateVerdict::finite)
            throw numeric_error("envelope_identity_check: envelope estimate "
                                "did not stabilize");
        max_gap = std::max(max_gap, std::abs(lhs - est.lower.value()));
    }
    return max_gap;
}

// Dual-norm surrogate: max of <v, x> over sampled points of the unit sphere
// of the norm given by the oracle.
inline double dual_norm_estimate(const FunctionOracle& norm_oracle, const Vec& v,
                                 const EpiGrid& grid = {}) {
    double best = 0.0;
    for (const auto& d : direction_set(norm_oracle.dim, grid)) {
        double nd = norm_oracle.eval(d).value();
        if (nd <= 0.0)
            throw argument_error("dual_norm_estimate: oracle is not a norm");
        best = std::max(best, v.dot(d) / nd);
    }
    return best;
}

// GTD test specialized to norms at the origin; the caller compares the
// outcome against the dual-norm condition |v|_* < 1. Errors when the oracle
// fails the sampled positive-homogeneity check.
inline bool norm_gtd_characterization(const FunctionOracle& norm_oracle,
                                      const Vec& v, const EpiGrid& grid = {},
                                      const GtdOptions& opts = {}) {
    DeterministicRng rng(grid.seed ^ 0x40ull);
    for (int trial = 0; trial < 16; ++trial) {
        Vec x(norm_oracle.dim);
        for (int j = 0; j < norm_oracle.dim; ++j) x(j) = rng.normal();
        double t = 0.1 + 2.0 * rng.uniform();
        double fx = norm_oracle.eval(x).value();
        double ftx = norm_oracle.eval(Vec(t * x)).value();
        if (std::abs(ftx - t * fx) > 1e-9 * (1.0 + std::abs(ftx)))
            throw argument_error(
                "norm_gtd_characterization: oracle is not positively homogeneous");
    }
    PrimalDualPair pair(norm_oracle, Vec::Zero(norm_oracle.dim), v);
    GtdVerdict verdict = gtd_check_direct(norm_oracle, pair, grid, opts);
    return verdict.decision == GtdDecision::gtd;
}

// Additivity of the second subderivative under a twice differentiable
// summand: compares d2(f+g)(x | grad f(x) + v) with
// <w, hess f(x) w> + d2 g(x|v)(w) per direction. Infinite values must match
// in sign; the return value is the largest finite gap (infinity when one
// side is finite and the other is not).
inline double sum_rule_check(const FunctionOracle& smooth, const FunctionOracle& g,
                             const PrimalDualPair& pair_g, const EpiGrid& grid = {}) {
    if (!smooth.has_grad() || !smooth.has_hess())
        throw capability_error("sum_rule_check: smooth oracle needs grad and hess");
    Vec grad_f = smooth.grad(pair_g.x);
    SymMatrix hess_f = smooth.hess(pair_g.x);

    FunctionOracle sum;
    sum.dim = g.dim;
    sum.label = smooth.label + "+" + g.label;
    auto f_eval = smooth.eval;
    auto g_eval = g.eval;
    sum.eval = [f_eval, g_eval](const Vec& x) { return f_eval(x) + g_eval(x); };

    PrimalDualPair pair_sum(sum, pair_g.x, Vec(grad_f + pair_g.v));
    double max_gap = 0.0;
    for (const auto& d : direction_set(g.dim, grid)) {
        SubderivEstimate lhs = d2_estimate(sum, pair_sum, d, grid);
        SubderivEstimate rhs_g = d2_estimate(g, pair_g, d, grid);
        if (lhs.verdict == EstimateVerdict::pos_inf ||
            rhs_g.verdict == EstimateVerdict::pos_inf) {
            if (lhs.verdict != rhs_g.verdict)
                return std::numeric_limits<double>::infinity();
            continue;
        }
        if (lhs.verdict != EstimateVerdict::finite ||
            rhs_g.verdict != EstimateVerdict::finite)
            return std::numeric_limits<double>::infinity();
        double rhs = hess_f.quad(d) + rhs_g.lower.value();
        max_gap = std::max(max_gap, std::abs(lhs.lower.value() - rhs));
    }
    return max_gap;
}

}  // namespace epibundle
