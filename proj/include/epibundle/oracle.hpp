#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "epibundle/extreal.hpp"
#include "epibundle/linalg.hpp"

namespace epibundle {

// Evaluation access to an extended-real-valued function together with the
// optional closed-form side information a registry entry can provide.
// Oracles must be pure: repeated calls at the same point return the same
// value, and the toolkit never mutates them.
struct FunctionOracle {
    int dim = 1;
    std::string label;

    // f(x); always present.
    std::function<ExtReal(const Vec&)> eval;

    // Gradient at differentiability points (nullptr when unavailable).
    std::function<Vec(const Vec&)> grad;

    // Hessian at classical twice-differentiability points.
    std::function<SymMatrix(const Vec&)> hess;

    // Membership test for the subgradient graph: (x, v) in gph of the
    // subdifferential.
    std::function<bool(const Vec&, const Vec&)> subgrad_graph;

    // Full set of proximal minimizers argmin_u { f(u) + |u-x|^2/(2*lambda) }.
    std::function<std::vector<Vec>(double, const Vec&)> prox;

    // A lambda for which the envelope is somewhere finite (prox-boundedness
    // hint); unset when the function is not prox-bounded.
    std::optional<double> prox_bound;

    ExtReal operator()(const Vec& x) const { return eval(x); }

    bool has_grad() const { return static_cast<bool>(grad); }
    bool has_hess() const { return static_cast<bool>(hess); }
    bool has_subgrad_graph() const { return static_cast<bool>(subgrad_graph); }
    bool has_prox() const { return static_cast<bool>(prox); }
};

// A point of gph(subdifferential) with the function value frozen at
// construction. Pairs exist only at domain points, so fx is finite.
struct PrimalDualPair {
    Vec x;
    Vec v;
    double fx = 0.0;

    PrimalDualPair() = default;
    PrimalDualPair(const FunctionOracle& oracle, Vec x_in, Vec v_in)
        : x(std::move(x_in)), v(std::move(v_in)) {
        if (x.size() != oracle.dim || v.size() != oracle.dim)
            throw argument_error("PrimalDualPair: dimension mismatch");
        ExtReal f = oracle.eval(x);
        if (!f.is_finite())
            throw argument_error("PrimalDualPair: f(x) must be finite");
        fx = f.value();
    }
};

// f-attentive eps-localization of the subdifferential graph around a center
// pair: (x, v) belongs iff |x - x0| < eps, |v - v0| < eps, f(x) < f(x0) + eps
// and (x, v) lies on the subgradient graph.
struct AttentiveLocalization {
    PrimalDualPair center;
    double eps = 0.0;

    AttentiveLocalization(PrimalDualPair c, double e)
        : center(std::move(c)), eps(e) {
        if (!(eps > 0.0))
            throw argument_error("AttentiveLocalization: eps must be > 0");
    }
};

inline bool localization_membership(const FunctionOracle& oracle,
                                    const AttentiveLocalization& loc,
                                    const Vec& x, const Vec& v) {
    if (!oracle.has_subgrad_graph())
        throw capability_error(
            "localization_membership: oracle '" + oracle.label +
            "' has no subgradient graph");
    if ((x - loc.center.x).norm() >= loc.eps) return false;
    if ((v - loc.center.v).norm() >= loc.eps) return false;
    ExtReal f = oracle.eval(x);
    if (!(f < ExtReal(loc.center.fx + loc.eps))) return false;
    return oracle.subgrad_graph(x, v);
}

// Nesting of shifted localizations: every sample inside the
// (eps1 - eps2)-localization around loc2's center must also lie in loc1,
// provided loc2's center itself sits in the eps2-localization of loc1.
inline bool localization_nesting_check(const FunctionOracle& oracle,
                                       const AttentiveLocalization& loc1,
                                       const AttentiveLocalization& loc2,
                                       const std::vector<PrimalDualPair>& samples) {
    if (!(loc2.eps < loc1.eps))
        throw argument_error("localization_nesting_check: need eps2 < eps1");
    AttentiveLocalization shifted(loc2.center, loc1.eps - loc2.eps);
    for (const auto& s : samples) {
        if (!localization_membership(oracle, shifted, s.x, s.v)) continue;
        if (!localization_membership(oracle, loc1, s.x, s.v)) return false;
    }
    return true;
}

}  // namespace epibundle
