#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "epibundle/gtd.hpp"

namespace epibundle {

// Deterministic sampling plan for bundle construction. Radial paths approach
// the base point at geometric rates; 1-D oscillatory inputs additionally get
// paths pinned to level sets sin(1/x) = c, since radial paths alone miss the
// interior of a continuum bundle.
struct SequenceSchedule {
    enum class Mode { envelope_route, direct_route, both };

    Mode mode = Mode::both;
    std::vector<Vec> approach_dirs;  // defaults to the direction set when empty
    double r0 = 1e-1;
    double rho = 0.6;
    int levels = 12;
    std::uint64_t seed = 7;
    std::vector<double> oscillation_levels;  // targets c for sin(1/x) = c paths
    double cluster_eps = 2e-2;
    double attentive_rate = 10.0;

    std::vector<double> rates() const {
        std::vector<double> r(levels);
        for (int k = 0; k < levels; ++k) r[k] = r0 * std::pow(rho, k);
        return r;
    }
};

inline std::vector<Vec> schedule_directions(const SequenceSchedule& schedule,
                                            int dim) {
    if (!schedule.approach_dirs.empty()) return schedule.approach_dirs;
    EpiGrid grid;
    grid.seed = schedule.seed;
    grid.directions = dim <= 2 ? 8 : 16;
    return direction_set(dim, grid);
}

struct FormCluster {
    GQF representative;
    int members = 0;
    double spread = 0.0;  // max projector distance to the representative
};

struct HessianCluster {
    SymMatrix representative;
    int members = 0;
    double spread = 0.0;
};

struct RejectedPath {
    std::string path;
    std::string reason;  // not_gtd | attentiveness_failed | neg_inf_blowup | nonconvergent
};

struct BundleReport {
    std::vector<FormCluster> elements;
    bool attentive = true;
    std::vector<RejectedPath> rejected_paths;
    std::optional<std::pair<double, double>> coefficient_range;
    int converged_paths = 0;
};

namespace detail {

// Limit of a matrix sequence: trailing-half Cauchy, with geometric tails
// extrapolated the same way as the projector limits.
inline std::optional<Mat> matrix_sequence_limit(const std::vector<Mat>& seq,
                                                double cauchy_tol = 1e-6,
                                                double trend_floor = 0.05) {
    if (seq.empty()) return std::nullopt;
    if (seq.size() == 1) return seq.front();
    size_t start = std::max<size_t>(1, seq.size() / 2);
    std::vector<double> d;
    for (size_t k = start; k < seq.size(); ++k)
        d.push_back((seq[k] - seq[k - 1]).norm());
    double dmax = 0.0;
    for (double x : d) dmax = std::max(dmax, x);
    double scale = 1.0 + seq.back().norm();
    if (dmax <= cauchy_tol * scale) return seq.back();

    bool decaying = d.size() >= 2;
    double acc = 0.0;
    int cnt = 0;
    for (size_t i = 1; i < d.size(); ++i) {
        if (d[i] > 0.95 * d[i - 1] + cauchy_tol * scale) decaying = false;
        if (d[i - 1] > 1e-14) {
            acc += d[i] / d[i - 1];
            ++cnt;
        }
    }
    if (!decaying || d.back() > trend_floor * scale) return std::nullopt;
    double rho = cnt > 0 ? std::min(0.9, acc / cnt) : 0.5;
    Mat limit = seq.back() + (seq.back() - seq[seq.size() - 2]) * (rho / (1.0 - rho));
    return limit;
}

// Negative blow-up along a path: the smallest eigenvalues of the form
// matrices dive geometrically. Positive blow-ups are legitimate (the graphs
// rotate to delta-type limits); negative ones mean the subderivatives escape
// to -inf and the path carries no bundle element.
inline bool negative_blowup(const std::vector<double>& min_eigs) {
    std::vector<double> vals(min_eigs);
    int s = divergence_sign(vals, 1.05, 10.0);
    if (s < 0) return true;
    for (double v : vals)
        if (v < -kDivergenceCap) return true;
    return false;
}

inline std::optional<GQF> form_path_limit(const std::vector<GQF>& forms,
                                          double floor_hint) {
    EpiLimitOptions opts;
    // Path samples carry O(r_k) drift, so the geometric-trend rule does the
    // work; the split tolerance is coarse because extrapolated projectors
    // land near vertical rather than exactly on it.
    opts.split_tol = 3e-3;
    try {
        return gqf_epi_limit(forms, floor_hint, opts);
    } catch (const toolkit_error&) {
        return std::nullopt;
    }
}

}  // namespace detail

struct HessianBundleReport {
    std::vector<HessianCluster> clusters;
    std::vector<RejectedPath> rejected_paths;
};

// Hessian bundle of a C^{1,1} function at x_bar: limits of finite-difference
// Hessians along geometric approach paths, clustered in Frobenius distance.
inline HessianBundleReport hessian_bundle(const FunctionOracle& oracle,
                                          const Vec& x_bar,
                                          const SequenceSchedule& schedule = {}) {
    if (!oracle.has_grad())
        throw capability_error("hessian_bundle: oracle needs a gradient");
    HessianBundleReport report;
    std::vector<SymMatrix> limits;

    for (const auto& u : schedule_directions(schedule, static_cast<int>(x_bar.size()))) {
        std::vector<Mat> hs;
        for (double r : schedule.rates()) {
            Vec xk = x_bar + r * u;
            HessianProbeOptions popts;
            popts.h0 = 0.1 * r;
            popts.levels = 6;
            HessianProbe probe = hessian_probe_of_gradient(oracle.grad, xk, popts);
            if (probe.converged) hs.push_back(probe.limit->mat());
        }
        std::string path_id = "dir(" + std::to_string(u(0)) + (u.size() > 1 ? ",..." : "") + ")";
        if (hs.size() < 4) {
            report.rejected_paths.push_back({path_id, "nonconvergent"});
            continue;
        }
        auto limit = detail::matrix_sequence_limit(hs);
        if (!limit) {
            report.rejected_paths.push_back({path_id, "nonconvergent"});
            continue;
        }
        limits.push_back(SymMatrix(*limit));
    }

    for (const auto& h : limits) {
        bool placed = false;
        for (auto& cluster : report.clusters) {
            double eps = 1e-3 * (1.0 + cluster.representative.mat().norm());
            double dist = (h.mat() - cluster.representative.mat()).norm();
            if (dist <= eps) {
                cluster.members += 1;
                cluster.spread = std::max(cluster.spread, dist);
                placed = true;
                break;
            }
        }
        if (!placed) report.clusters.push_back({h, 1, 0.0});
    }
    return report;
}

namespace detail {

struct PathResult {
    std::string id;
    std::optional<GQF> limit;
    std::string reject_reason;
};

inline PathResult run_form_path(const std::vector<GQF>& forms,
                                const std::vector<double>& min_eigs,
                                double floor_hint, const std::string& id) {
    PathResult out;
    out.id = id;
    if (detail::negative_blowup(min_eigs)) {
        out.reject_reason = "neg_inf_blowup";
        return out;
    }
    if (forms.size() < 4) {
        out.reject_reason = forms.empty() ? "not_gtd" : "nonconvergent";
        return out;
    }
    auto limit = detail::form_path_limit(forms, floor_hint);
    if (!limit) {
        out.reject_reason = "nonconvergent";
        return out;
    }
    out.limit = limit;
    return out;
}

}  // namespace detail

// Quadratic bundle sampler. Envelope-route paths walk z_k -> x + lambda v,
// recover graph points via v_k = grad e_lambda f(z_k), x_k = z_k - lambda
// v_k, probe the envelope Hessian and pull each one back to a form;
// direct-route paths sample classical twice-differentiability points of f
// itself. With attentive=true, paths whose function values do not approach
// f(x_bar) are rejected; attentive=false is the "old" variant that skips the
// value clause.
inline BundleReport quad_bundle(const FunctionOracle& oracle,
                                const PrimalDualPair& pair, double lambda,
                                double r_level,
                                const SequenceSchedule& schedule = {},
                                bool attentive = true,
                                const ProxOptions& prox_opts = {}) {
    if (!(lambda > 0.0) || (r_level > 0.0 && !(lambda < 1.0 / r_level)))
        throw argument_error("quad_bundle: need lambda in (0, 1/r)");
    int n = oracle.dim;
    BundleReport report;
    report.attentive = attentive;
    std::vector<GQF> path_limits;
    std::vector<double> rates = schedule.rates();
    // Forms recovered along a path inherit the prox-regularity floor plus
    // sampling slack; positive coefficient blow-ups are legitimate.
    double floor_hint = std::max(r_level, 0.0) + 1.0;

    auto attentive_ok = [&](double fx, double rk) {
        return std::abs(fx - pair.fx) <=
               std::max(schedule.attentive_rate * rk, 1e-8);
    };

    bool run_envelope = schedule.mode != SequenceSchedule::Mode::direct_route;
    bool run_direct = schedule.mode != SequenceSchedule::Mode::envelope_route;

    if (run_envelope) {
        Vec z_bar = pair.x + lambda * pair.v;
        GradientOptions gopts;
        gopts.prox = prox_opts;
        gopts.fd_check = false;
        for (const auto& u : schedule_directions(schedule, n)) {
            std::vector<GQF> forms;
            std::vector<double> min_eigs;
            bool attentiveness_failed = false;
            for (double r : rates) {
                Vec zk = z_bar + r * u;
                Vec vk;
                try {
                    vk = envelope_gradient(oracle, lambda, zk, gopts);
                } catch (const nondifferentiable_error&) {
                    continue;
                }
                Vec xk = zk - lambda * vk;
                if (attentive) {
                    ExtReal fxk = oracle.eval(xk);
                    if (!fxk.is_finite() || !attentive_ok(fxk.value(), r)) {
                        attentiveness_failed = true;
                        break;
                    }
                }
                HessianProbeOptions popts;
                popts.h0 = std::min(1e-2, 0.1 * r);
                popts.levels = 8;
                HessianProbe probe =
                    envelope_hessian_probe(oracle, lambda, zk, popts, prox_opts);
                if (!probe.converged) continue;
                GQF q = gqf_from_envelope_hessian(*probe.limit, lambda);
                min_eigs.push_back(q.floor_on_subspace());
                forms.push_back(std::move(q));
            }
            std::string id = "envelope dir(" + std::to_string(u(0)) +
                             (u.size() > 1 ? ",..." : "") + ")";
            if (attentiveness_failed) {
                report.rejected_paths.push_back({id, "attentiveness_failed"});
                continue;
            }
            auto res = detail::run_form_path(forms, min_eigs, floor_hint, id);
            if (res.limit) {
                path_limits.push_back(*res.limit);
                ++report.converged_paths;
            } else {
                report.rejected_paths.push_back({id, res.reject_reason});
            }
        }
    }

    if (run_direct) {
        auto hessian_at = [&](const Vec& xk, double r) -> std::optional<SymMatrix> {
            if (oracle.has_hess()) return oracle.hess(xk);
            if (!oracle.has_grad()) return std::nullopt;
            HessianProbeOptions popts;
            popts.h0 = 0.1 * r;
            popts.levels = 6;
            HessianProbe probe = hessian_probe_of_gradient(oracle.grad, xk, popts);
            if (!probe.converged) return std::nullopt;
            return probe.limit;
        };

        auto run_points = [&](const std::vector<Vec>& points, const std::string& id) {
            std::vector<GQF> forms;
            std::vector<double> min_eigs;
            bool attentiveness_failed = false;
            double last_dual_gap = 0.0;
            for (const auto& xk : points) {
                double r = (xk - pair.x).norm();
                if (r <= 0.0) continue;
                ExtReal fxk = oracle.eval(xk);
                if (!fxk.is_finite()) continue;
                if (attentive && !attentive_ok(fxk.value(), r)) {
                    attentiveness_failed = true;
                    break;
                }
                // The dual components must approach v as well; gradients of
                // 1-homogeneous kinks stay on their sphere and belong to a
                // different base pair.
                if (oracle.has_grad()) {
                    try {
                        last_dual_gap = (oracle.grad(xk) - pair.v).norm();
                    } catch (const toolkit_error&) {
                        continue;
                    }
                }
                auto h = hessian_at(xk, r);
                if (!h) continue;
                GQF q(*h, Subspace::full(n));
                min_eigs.push_back(q.floor_on_subspace());
                forms.push_back(std::move(q));
            }
            if (attentiveness_failed) {
                report.rejected_paths.push_back({id, "attentiveness_failed"});
                return;
            }
            if (!forms.empty() && last_dual_gap > 0.1 * (1.0 + pair.v.norm())) {
                report.rejected_paths.push_back({id, "nonconvergent"});
                return;
            }
            auto res = detail::run_form_path(forms, min_eigs, floor_hint, id);
            if (res.limit) {
                path_limits.push_back(*res.limit);
                ++report.converged_paths;
            } else {
                report.rejected_paths.push_back({id, res.reject_reason});
            }
        };

        for (const auto& u : schedule_directions(schedule, n)) {
            std::vector<Vec> points;
            for (double r : rates) points.push_back(pair.x + r * u);
            run_points(points, "direct dir(" + std::to_string(u(0)) +
                                   (u.size() > 1 ? ",..." : "") + ")");
        }

        // Oscillation-aware paths: x_k solving sin(1/x) = c along
        // geometrically growing branch indices.
        if (n == 1 && !schedule.oscillation_levels.empty()) {
            for (double c : schedule.oscillation_levels) {
                double cc = std::clamp(c, -1.0, 1.0);
                for (double theta : {std::asin(cc), M_PI - std::asin(cc)}) {
                    std::vector<Vec> points;
                    double kf = 2.0;
                    for (int j = 0; j < schedule.levels; ++j) {
                        double phase = theta + 2.0 * M_PI * std::ceil(kf);
                        Vec x(1);
                        x << pair.x(0) + 1.0 / phase;
                        points.push_back(x);
                        kf *= 1.6;
                    }
                    run_points(points, "oscillation c=" + std::to_string(cc));
                }
            }
        }
    }

    // Continuum detection for 1-D bundles: enough distinct full-line
    // coefficients spread over more than 10 cluster widths are reported as a
    // range instead of a misleading cluster list.
    std::vector<double> coeffs;
    std::vector<GQF> non_full;
    for (const auto& q : path_limits) {
        if (q.dim() == 1 && q.subspace().is_full())
            coeffs.push_back(q.coefficient_1d());
        else
            non_full.push_back(q);
    }
    bool continuum = false;
    if (n == 1 && coeffs.size() >= 8) {
        std::vector<double> sorted(coeffs);
        std::sort(sorted.begin(), sorted.end());
        double width = sorted.back() - sorted.front();
        int distinct = 1;
        for (size_t i = 1; i < sorted.size(); ++i)
            if (sorted[i] - sorted[i - 1] > 1e-6) ++distinct;
        if (distinct >= 8 && width > 10.0 * schedule.cluster_eps) {
            continuum = true;
            report.coefficient_range = {sorted.front(), sorted.back()};
        }
    }

    const std::vector<GQF>& to_cluster = continuum ? non_full : path_limits;
    for (const auto& q : to_cluster) {
        bool placed = false;
        for (auto& cluster : report.elements) {
            double dist = gqf_graph_distance(q, cluster.representative);
            if (dist <= schedule.cluster_eps) {
                cluster.members += 1;
                cluster.spread = std::max(cluster.spread, dist);
                placed = true;
                break;
            }
        }
        if (!placed) report.elements.push_back({q, 1, 0.0});
    }
    // 1-D clusters get the member with the median coefficient as their
    // representative.
    if (n == 1) {
        for (auto& cluster : report.elements) {
            if (!cluster.representative.subspace().is_full()) continue;
            std::vector<double> members;
            for (const auto& q : to_cluster) {
                if (q.subspace().is_full() &&
                    gqf_graph_distance(q, cluster.representative) <=
                        schedule.cluster_eps)
                    members.push_back(q.coefficient_1d());
            }
            if (members.size() > 1) {
                std::sort(members.begin(), members.end());
                cluster.representative =
                    GQF::coefficient_form(members[members.size() / 2]);
            }
        }
    }
    return report;
}

// Membership of a verdict's form (already at bundle scale) in the report.
inline bool quad_bundle_contains_d2(const BundleReport& report,
                                    const GtdVerdict& verdict,
                                    double cluster_eps = 2e-2) {
    if (verdict.decision != GtdDecision::gtd || !verdict.form)
        throw argument_error("quad_bundle_contains_d2: verdict is not gtd");
    const GQF& form = *verdict.form;
    for (const auto& cluster : report.elements) {
        if (gqf_graph_distance(form, cluster.representative) <= cluster_eps)
            return true;
    }
    if (report.coefficient_range && form.dim() == 1 && form.subspace().is_full()) {
        double a = form.coefficient_1d();
        return a >= report.coefficient_range->first - cluster_eps &&
               a <= report.coefficient_range->second + cluster_eps;
    }
    return false;
}

// Builds f + g with whatever closed-form structure survives the sum
// (gradients and Hessians add; proximal mappings do not).
inline FunctionOracle sum_oracle(const FunctionOracle& f, const FunctionOracle& g) {
    if (f.dim != g.dim) throw argument_error("sum_oracle: dimension mismatch");
    FunctionOracle s;
    s.dim = f.dim;
    s.label = f.label + "+" + g.label;
    auto fe = f.eval, ge = g.eval;
    s.eval = [fe, ge](const Vec& x) { return fe(x) + ge(x); };
    if (f.has_grad() && g.has_grad()) {
        auto fg = f.grad, gg = g.grad;
        s.grad = [fg, gg](const Vec& x) { return Vec(fg(x) + gg(x)); };
    }
    if (f.has_hess() && g.has_hess()) {
        auto fh = f.hess, gh = g.hess;
        s.hess = [fh, gh](const Vec& x) {
            return SymMatrix(fh(x).mat() + gh(x).mat());
        };
    }
    if (f.prox_bound && g.prox_bound)
        s.prox_bound = std::min(*f.prox_bound, *g.prox_bound);
    else if (g.prox_bound && f.has_hess())
        s.prox_bound = g.prox_bound;
    return s;
}

// Sum rule for bundles: quad(f+g) at (x | grad f(x) + v) must equal quad g
// at (x | v) shifted by half the Hessian quadratic of f. Matching is
// cluster-by-cluster in projector distance, both ways.
inline bool sum_rule_bundle_check(const FunctionOracle& smooth,
                                  const FunctionOracle& g,
                                  const PrimalDualPair& pair_g, double lambda,
                                  double r_level,
                                  const SequenceSchedule& schedule = {},
                                  const ProxOptions& prox_opts = {}) {
    if (!smooth.has_grad() || !smooth.has_hess())
        throw capability_error("sum_rule_bundle_check: smooth oracle needs grad/hess");
    FunctionOracle fg = sum_oracle(smooth, g);
    Vec grad_f = smooth.grad(pair_g.x);
    Mat hess_f = smooth.hess(pair_g.x).mat();

    PrimalDualPair pair_fg(fg, pair_g.x, Vec(grad_f + pair_g.v));
    double hess_norm = hess_f.norm();
    double r_sum = r_level + hess_norm;  // curvature of f shifts the floor
    double lambda_sum = lambda;
    if (r_sum > 0.0 && lambda_sum >= 1.0 / r_sum) lambda_sum = 0.5 / r_sum;

    BundleReport left = quad_bundle(fg, pair_fg, lambda_sum, r_sum, schedule,
                                    true, prox_opts);
    BundleReport right = quad_bundle(g, pair_g, lambda, r_level, schedule,
                                     true, prox_opts);

    auto shift_form = [&](const GQF& q) {
        Mat a = q.matrix().mat() + hess_f;
        return GQF(SymMatrix(a), q.subspace());
    };

    if (left.elements.size() != right.elements.size()) return false;
    for (const auto& rc : right.elements) {
        GQF shifted = shift_form(rc.representative);
        bool found = false;
        for (const auto& lc : left.elements)
            if (gqf_graph_distance(shifted, lc.representative) <= schedule.cluster_eps)
                found = true;
        if (!found) return false;
    }
    for (const auto& lc : left.elements) {
        bool found = false;
        for (const auto& rc : right.elements)
            if (gqf_graph_distance(shift_form(rc.representative),
                                   lc.representative) <= schedule.cluster_eps)
                found = true;
        if (!found) return false;
    }
    return true;
}

// Sampled density of the generalized-twice-differentiability set inside an
// attentive localization: for each target graph point, search shrinking
// neighborhoods for a pair that passes the Moreau-route GTD check. Returns
// the fraction of targets approximated at the finest level.
inline double omega_density_probe(const FunctionOracle& oracle,
                                  const AttentiveLocalization& loc, double lambda,
                                  double r_level, int n_targets,
                                  const SequenceSchedule& schedule = {},
                                  const ProxOptions& prox_opts = {}) {
    if (n_targets <= 0) throw argument_error("omega_density_probe: n_targets must be > 0");
    int n = oracle.dim;
    Vec z_bar = loc.center.x + lambda * loc.center.v;
    GradientOptions gopts;
    gopts.prox = prox_opts;
    gopts.fd_check = false;

    DeterministicRng rng(schedule.seed ^ 0xdeull);
    int hits = 0;
    int produced = 0;
    int attempts = 0;
    while (produced < n_targets && attempts < 20 * n_targets) {
        ++attempts;
        Vec dz(n);
        for (int j = 0; j < n; ++j) dz(j) = rng.normal();
        if (dz.norm() < 1e-12) continue;
        double radius = 0.25 * loc.eps * lambda * rng.uniform();
        Vec zt = z_bar + radius * dz.normalized();
        Vec vt, xt;
        try {
            vt = envelope_gradient(oracle, lambda, zt, gopts);
        } catch (const nondifferentiable_error&) {
            continue;
        }
        xt = zt - lambda * vt;
        if (oracle.has_subgrad_graph() &&
            !localization_membership(oracle, loc, xt, vt))
            continue;
        ++produced;

        bool ok_at_finest = false;
        double d_finest = loc.eps * std::pow(0.5, 6);
        for (double scale : {0.0, 0.25, 0.5, 1.0}) {
            Vec zc = zt + (scale * d_finest * lambda) * dz.normalized();
            try {
                Vec vc = envelope_gradient(oracle, lambda, zc, gopts);
                Vec xc = zc - lambda * vc;
                if ((xc - xt).norm() + (vc - vt).norm() > d_finest && scale > 0.0)
                    continue;
                PrimalDualPair cand(oracle, xc, vc);
                GtdOptions gtd_opts;
                gtd_opts.prox = prox_opts;
                GtdVerdict v = gtd_check_moreau(oracle, cand, lambda, r_level, {},
                                                gtd_opts);
                if (v.decision == GtdDecision::gtd) {
                    ok_at_finest = true;
                    break;
                }
            } catch (const toolkit_error&) {
                continue;
            }
        }
        if (ok_at_finest) ++hits;
    }
    if (produced == 0)
        throw numeric_error("omega_density_probe: no targets could be sampled");
    return static_cast<double>(hits) / produced;
}

}  // namespace epibundle
