#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "epibundle/bundle.hpp"
#include "epibundle/piecewise.hpp"

namespace epibundle {

inline Vec vec1(double a) {
    Vec v(1);
    v << a;
    return v;
}

inline Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

struct CaseFlags {
    bool prox_regular = false;
    double prox_regular_level = 0.0;  // r: the subderivative floor is -r|w|^2
    bool subdiff_continuous = false;
    bool c11 = false;
    bool c2 = false;
    bool norm = false;
    bool prox_bounded = false;
};

struct ExpectedD2Entry {
    Vec w;
    ExtReal value;
};

struct ExpectedResults {
    std::vector<ExpectedD2Entry> d2_at_base;
    std::optional<GtdDecision> gtd;
    std::vector<GQF> bundle_elements;  // attentive quadratic bundle
    std::optional<std::pair<double, double>> bundle_coefficient_range;
    std::vector<SymMatrix> hessian_bundle;
    std::vector<std::pair<double, bool>> growth_at_1e2;  // (kappa, verdict)
};

// A registered worked example: closed-form oracle, base pair, regularity
// flags, ground truths and the sampling plan its bundle runs should use.
struct ExampleCase {
    std::string name;
    std::string description;
    FunctionOracle oracle;
    PrimalDualPair base_pair;
    CaseFlags flags;
    ExpectedResults expected;
    SequenceSchedule schedule;
    double lambda = 0.1;
    double r_level = 0.0;
    std::optional<std::string> piecewise_text;
    std::function<std::vector<PrimalDualPair>(double, int, std::uint64_t)>
        graph_samples;  // (eps, count, seed) -> localization samples
};

namespace corpus_detail {

inline double sgn(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

inline std::function<bool(const Vec&, const Vec&)> gradient_graph(
    std::function<Vec(const Vec&)> grad) {
    return [grad](const Vec& x, const Vec& v) {
        Vec g = grad(x);
        return (v - g).norm() <= 1e-9 * (1.0 + v.norm());
    };
}

// Samples (x, grad f(x)) uniformly from a punctured ball around the center.
inline auto smooth_graph_sampler(FunctionOracle oracle, Vec center) {
    return [oracle, center](double eps, int count, std::uint64_t seed) {
        DeterministicRng rng(seed);
        std::vector<PrimalDualPair> out;
        int guard = 0;
        while (static_cast<int>(out.size()) < count && guard++ < 50 * count) {
            Vec x = center;
            for (int j = 0; j < x.size(); ++j)
                x(j) += 0.4 * eps * (2.0 * rng.uniform() - 1.0);
            try {
                Vec v = oracle.grad(x);
                out.emplace_back(oracle, x, v);
            } catch (const toolkit_error&) {
                continue;
            }
        }
        return out;
    };
}

inline ExampleCase make_zero() {
    ExampleCase c;
    c.name = "zero";
    c.description = "the zero function on R";
    c.oracle.dim = 1;
    c.oracle.label = "zero";
    c.oracle.eval = [](const Vec&) { return ExtReal(0.0); };
    c.oracle.grad = [](const Vec& x) { return Vec(Vec::Zero(x.size())); };
    c.oracle.hess = [](const Vec& x) {
        return SymMatrix::zero(static_cast<int>(x.size()));
    };
    c.oracle.subgrad_graph = [](const Vec&, const Vec& v) {
        return v.norm() <= 1e-9;
    };
    c.oracle.prox = [](double, const Vec& x) { return std::vector<Vec>{x}; };
    c.oracle.prox_bound = 1e9;
    c.base_pair = PrimalDualPair(c.oracle, vec1(0.0), vec1(0.0));
    c.flags = {true, 0.0, true, true, true, false, true};
    c.expected.d2_at_base = {{vec1(0.0), ExtReal(0.0)},
                             {vec1(1.0), ExtReal(0.0)},
                             {vec1(-1.0), ExtReal(0.0)}};
    c.expected.gtd = GtdDecision::gtd;
    c.expected.bundle_elements = {GQF::coefficient_form(0.0)};
    c.expected.hessian_bundle = {SymMatrix::zero(1)};
    c.graph_samples = smooth_graph_sampler(c.oracle, c.base_pair.x);
    c.piecewise_text = "0 on (-inf,inf)";
    return c;
}

inline ExampleCase make_quad(int n) {
    ExampleCase c;
    c.name = "quad_" + std::to_string(n);
    c.description = "squared Euclidean norm on R^" + std::to_string(n);
    c.oracle.dim = n;
    c.oracle.label = c.name;
    c.oracle.eval = [](const Vec& x) { return ExtReal(x.squaredNorm()); };
    c.oracle.grad = [](const Vec& x) { return Vec(2.0 * x); };
    c.oracle.hess = [](const Vec& x) {
        int m = static_cast<int>(x.size());
        return SymMatrix(Mat(2.0 * Mat::Identity(m, m)));
    };
    c.oracle.subgrad_graph = gradient_graph(c.oracle.grad);
    c.oracle.prox = [](double lambda, const Vec& x) {
        return std::vector<Vec>{Vec(x / (1.0 + 2.0 * lambda))};
    };
    c.oracle.prox_bound = 1e9;
    c.base_pair = PrimalDualPair(c.oracle, Vec(Vec::Zero(n)), Vec(Vec::Zero(n)));
    c.flags = {true, 0.0, true, true, true, false, true};
    Vec e1 = Vec::Zero(n);
    e1(0) = 1.0;
    c.expected.d2_at_base = {{Vec(Vec::Zero(n)), ExtReal(0.0)},
                             {e1, ExtReal(2.0)},
                             {Vec(-e1), ExtReal(2.0)}};
    c.expected.gtd = GtdDecision::gtd;
    c.expected.bundle_elements = {
        GQF(SymMatrix(Mat(2.0 * Mat::Identity(n, n))), Subspace::full(n))};
    c.expected.hessian_bundle = {SymMatrix(Mat(2.0 * Mat::Identity(n, n)))};
    c.expected.growth_at_1e2 = {{1.0, true}, {3.0, false}};
    c.graph_samples = smooth_graph_sampler(c.oracle, c.base_pair.x);
    if (n == 1) c.piecewise_text = "x^2 on (-inf,inf)";
    return c;
}

inline ExampleCase make_abs_3_2() {
    ExampleCase c;
    c.name = "abs_3_2";
    c.description = "|x|^(3/2): C^1 but not C^{1,1} at the origin";
    c.oracle.dim = 1;
    c.oracle.label = c.name;
    c.oracle.eval = [](const Vec& x) {
        return ExtReal(std::pow(std::abs(x(0)), 1.5));
    };
    c.oracle.grad = [](const Vec& x) {
        return vec1(1.5 * std::sqrt(std::abs(x(0))) * sgn(x(0)));
    };
    c.oracle.hess = [](const Vec& x) {
        if (x(0) == 0.0)
            throw nondifferentiable_error("abs_3_2: no Hessian at 0");
        Mat h(1, 1);
        h << 0.75 / std::sqrt(std::abs(x(0)));
        return SymMatrix(h);
    };
    c.oracle.subgrad_graph = gradient_graph(c.oracle.grad);
    c.oracle.prox = [](double lambda, const Vec& z) {
        // Convex: the unique stationary point of s^2 + (3 lambda/2) s = |z|
        // in s = sqrt(|u|).
        if (z(0) == 0.0) return std::vector<Vec>{vec1(0.0)};
        double b = 1.5 * lambda;
        double s = 0.5 * (-b + std::sqrt(b * b + 4.0 * std::abs(z(0))));
        return std::vector<Vec>{vec1(sgn(z(0)) * s * s)};
    };
    c.oracle.prox_bound = 1e9;
    c.base_pair = PrimalDualPair(c.oracle, vec1(0.0), vec1(0.0));
    c.flags = {true, 0.0, true, false, false, false, true};
    c.expected.d2_at_base = {{vec1(0.0), ExtReal(0.0)},
                             {vec1(1.0), ExtReal::pos_inf()},
                             {vec1(-1.0), ExtReal::pos_inf()}};
    c.expected.gtd = GtdDecision::gtd;
    c.expected.bundle_elements = {GQF::indicator_origin(1)};
    c.graph_samples = smooth_graph_sampler(c.oracle, c.base_pair.x);
    c.piecewise_text = "abs(x)^(3/2) on (-inf,inf)";
    return c;
}

inline ExampleCase make_sq_sgn() {
    ExampleCase c;
    c.name = "sq_sgn";
    c.description = "x^2 sgn(x): C^{1,1}, twice epi-differentiable at 0 but "
                    "with a sign-asymmetric second subderivative";
    c.oracle.dim = 1;
    c.oracle.label = c.name;
    c.oracle.eval = [](const Vec& x) { return ExtReal(x(0) * x(0) * sgn(x(0))); };
    c.oracle.grad = [](const Vec& x) { return vec1(2.0 * std::abs(x(0))); };
    c.oracle.hess = [](const Vec& x) {
        if (x(0) == 0.0)
            throw nondifferentiable_error("sq_sgn: no Hessian at 0");
        Mat h(1, 1);
        h << 2.0 * sgn(x(0));
        return SymMatrix(h);
    };
    c.oracle.subgrad_graph = gradient_graph(c.oracle.grad);
    c.oracle.prox = [](double lambda, const Vec& z) {
        if (!(lambda < 0.5))
            throw argument_error("sq_sgn prox: needs lambda < 1/2");
        if (z(0) > 0.0) return std::vector<Vec>{vec1(z(0) / (1.0 + 2.0 * lambda))};
        if (z(0) < 0.0) return std::vector<Vec>{vec1(z(0) / (1.0 - 2.0 * lambda))};
        return std::vector<Vec>{vec1(0.0)};
    };
    c.oracle.prox_bound = 0.49;
    c.base_pair = PrimalDualPair(c.oracle, vec1(0.0), vec1(0.0));
    c.flags = {true, 2.0, true, true, false, false, true};
    c.r_level = 2.0;
    c.expected.d2_at_base = {{vec1(1.0), ExtReal(2.0)}, {vec1(-1.0), ExtReal(-2.0)}};
    c.expected.gtd = GtdDecision::epi_only;
    c.expected.bundle_elements = {GQF::coefficient_form(1.0),
                                  GQF::coefficient_form(-1.0)};
    c.expected.hessian_bundle = {SymMatrix(Mat(2.0 * Mat::Identity(1, 1))),
                                 SymMatrix(Mat(-2.0 * Mat::Identity(1, 1)))};
    c.graph_samples = smooth_graph_sampler(c.oracle, c.base_pair.x);
    c.piecewise_text = "x^2 on [0,inf); -(x^2) on (-inf,0)";
    return c;
}

inline ExampleCase make_cubic_shift(double kappa = 1.0) {
    ExampleCase c;
    c.name = "cubic_shift";
    c.description = "x^3 + (kappa/2) x^2: curvature kappa at 0 without "
                    "second-order growth";
    c.oracle.dim = 1;
    c.oracle.label = c.name;
    c.oracle.eval = [kappa](const Vec& x) {
        return ExtReal(x(0) * x(0) * x(0) + 0.5 * kappa * x(0) * x(0));
    };
    c.oracle.grad = [kappa](const Vec& x) {
        return vec1(3.0 * x(0) * x(0) + kappa * x(0));
    };
    c.oracle.hess = [kappa](const Vec& x) {
        Mat h(1, 1);
        h << 6.0 * x(0) + kappa;
        return SymMatrix(h);
    };
    c.oracle.subgrad_graph = gradient_graph(c.oracle.grad);
    // Cubic decay on the left: not prox-bounded, so no prox oracle.
    c.base_pair = PrimalDualPair(c.oracle, vec1(0.0), vec1(0.0));
    c.flags = {true, 0.0, true, true, true, false, false};
    c.schedule.mode = SequenceSchedule::Mode::direct_route;
    c.expected.d2_at_base = {{vec1(1.0), ExtReal(kappa)},
                             {vec1(-1.0), ExtReal(kappa)}};
    c.expected.gtd = GtdDecision::gtd;
    c.expected.bundle_elements = {GQF::coefficient_form(0.5 * kappa)};
    c.expected.growth_at_1e2 = {{kappa, false}, {kappa - 0.1, true}};
    c.graph_samples = smooth_graph_sampler(c.oracle, c.base_pair.x);
    c.piecewise_text = "x^3 + 0.5*x^2 on (-inf,inf)";
    return c;
}

inline ExampleCase make_step_quad() {
    ExampleCase c;
    c.name = "step_quad";
    c.description = "x^2 for x >= 0, 1 for x < 0: variationally strongly "
                    "convex at (0,0) but not subdifferentially continuous";
    c.oracle.dim = 1;
    c.oracle.label = c.name;
    c.oracle.eval = [](const Vec& x) {
        return x(0) >= 0.0 ? ExtReal(x(0) * x(0)) : ExtReal(1.0);
    };
    c.oracle.grad = [](const Vec& x) {
        if (x(0) == 0.0)
            throw nondifferentiable_error("step_quad: not differentiable at 0");
        return vec1(x(0) > 0.0 ? 2.0 * x(0) : 0.0);
    };
    c.oracle.hess = [](const Vec& x) {
        if (x(0) == 0.0)
            throw nondifferentiable_error("step_quad: no Hessian at 0");
        Mat h(1, 1);
        h << (x(0) > 0.0 ? 2.0 : 0.0);
        return SymMatrix(h);
    };
    c.oracle.subgrad_graph = [](const Vec& x, const Vec& v) {
        double tol = 1e-9;
        if (x(0) > tol) return std::abs(v(0) - 2.0 * x(0)) <= tol * (1.0 + v.norm());
        if (x(0) < -tol) return std::abs(v(0)) <= tol;
        if (std::abs(x(0)) <= tol) return v(0) <= tol;
        return false;
    };
    c.oracle.prox = [](double lambda, const Vec& z) {
        if (z(0) >= 0.0)
            return std::vector<Vec>{vec1(z(0) / (1.0 + 2.0 * lambda))};
        double at_zero = z(0) * z(0) / (2.0 * lambda);  // u = 0 branch
        if (std::abs(at_zero - 1.0) <= 1e-12)
            return std::vector<Vec>{vec1(0.0), vec1(z(0))};
        if (at_zero < 1.0) return std::vector<Vec>{vec1(0.0)};
        return std::vector<Vec>{vec1(z(0))};
    };
    c.oracle.prox_bound = 1e9;
    c.base_pair = PrimalDualPair(c.oracle, vec1(0.0), vec1(0.0));
    c.flags = {true, 0.0, false, false, false, false, true};
    c.expected.d2_at_base = {{vec1(0.0), ExtReal(0.0)},
                             {vec1(1.0), ExtReal(2.0)},
                             {vec1(-1.0), ExtReal::pos_inf()}};
    c.expected.gtd = GtdDecision::epi_only;
    c.expected.bundle_elements = {GQF::coefficient_form(1.0),
                                  GQF::indicator_origin(1)};
    c.graph_samples = [oracle = c.oracle](double eps, int count,
                                          std::uint64_t seed) {
        DeterministicRng rng(seed);
        std::vector<PrimalDualPair> out;
        for (int i = 0; i < count; ++i) {
            if (rng.uniform() < 0.5) {
                double u = 0.45 * eps * rng.uniform();
                if (u > 0.0 && 2.0 * u < eps && u * u < eps)
                    out.emplace_back(oracle, vec1(u), vec1(2.0 * u));
            } else {
                double v = -0.9 * eps * rng.uniform();
                out.emplace_back(oracle, vec1(0.0), vec1(v));
            }
        }
        return out;
    };
    c.piecewise_text = "x^2 on [0,inf); 1 on (-inf,0)";
    return c;
}

inline ExampleCase make_osc_quartic() {
    ExampleCase c;
    c.name = "osc_quartic";
    c.description = "x^4 sin(1/x): twice differentiable at 0 with a continuum "
                    "quadratic bundle";
    c.oracle.dim = 1;
    c.oracle.label = c.name;
    c.oracle.eval = [](const Vec& x) {
        if (x(0) == 0.0) return ExtReal(0.0);
        double t = x(0);
        return ExtReal(t * t * t * t * std::sin(1.0 / t));
    };
    c.oracle.grad = [](const Vec& x) {
        if (x(0) == 0.0) return vec1(0.0);
        double t = x(0);
        return vec1(4.0 * t * t * t * std::sin(1.0 / t) - t * t * std::cos(1.0 / t));
    };
    c.oracle.hess = [](const Vec& x) {
        Mat h(1, 1);
        if (x(0) == 0.0) {
            h << 0.0;
        } else {
            double t = x(0);
            h << (12.0 * t * t - 1.0) * std::sin(1.0 / t) - 6.0 * t * std::cos(1.0 / t);
        }
        return SymMatrix(h);
    };
    c.oracle.subgrad_graph = gradient_graph(c.oracle.grad);
    // Cubic decay on the left for large |x|: not prox-bounded.
    c.base_pair = PrimalDualPair(c.oracle, vec1(0.0), vec1(0.0));
    c.flags = {true, 2.0, true, true, false, false, false};
    c.r_level = 2.0;
    c.schedule.mode = SequenceSchedule::Mode::direct_route;
    for (int i = 0; i <= 16; ++i)
        c.schedule.oscillation_levels.push_back(-1.0 + 0.125 * i);
    c.expected.d2_at_base = {{vec1(1.0), ExtReal(0.0)}, {vec1(-1.0), ExtReal(0.0)}};
    c.expected.gtd = GtdDecision::gtd;
    c.expected.bundle_coefficient_range = {-0.5, 0.5};
    c.graph_samples = smooth_graph_sampler(c.oracle, c.base_pair.x);
    return c;
}

inline ExampleCase make_mixed_power() {
    ExampleCase c;
    c.name = "mixed_power";
    c.description = "x^2 for x < 0, x^(3/2) for x >= 0: strictly convex and "
                    "C^1 with a strict Hessian-bundle inclusion at 0";
    c.oracle.dim = 1;
    c.oracle.label = c.name;
    c.oracle.eval = [](const Vec& x) {
        return x(0) < 0.0 ? ExtReal(x(0) * x(0))
                          : ExtReal(std::pow(x(0), 1.5));
    };
    c.oracle.grad = [](const Vec& x) {
        return vec1(x(0) < 0.0 ? 2.0 * x(0) : 1.5 * std::sqrt(x(0)));
    };
    c.oracle.hess = [](const Vec& x) {
        if (x(0) == 0.0)
            throw nondifferentiable_error("mixed_power: no Hessian at 0");
        Mat h(1, 1);
        h << (x(0) < 0.0 ? 2.0 : 0.75 / std::sqrt(x(0)));
        return SymMatrix(h);
    };
    c.oracle.subgrad_graph = gradient_graph(c.oracle.grad);
    c.oracle.prox = [](double lambda, const Vec& z) {
        if (z(0) == 0.0) return std::vector<Vec>{vec1(0.0)};
        if (z(0) < 0.0)
            return std::vector<Vec>{vec1(z(0) / (1.0 + 2.0 * lambda))};
        double b = 1.5 * lambda;
        double s = 0.5 * (-b + std::sqrt(b * b + 4.0 * z(0)));
        return std::vector<Vec>{vec1(s * s)};
    };
    c.oracle.prox_bound = 1e9;
    c.base_pair = PrimalDualPair(c.oracle, vec1(0.0), vec1(0.0));
    c.flags = {true, 0.0, true, false, false, false, true};
    c.expected.d2_at_base = {{vec1(-1.0), ExtReal(2.0)},
                             {vec1(1.0), ExtReal::pos_inf()}};
    c.expected.gtd = GtdDecision::epi_only;
    c.expected.bundle_elements = {GQF::indicator_origin(1),
                                  GQF::coefficient_form(1.0)};
    c.expected.hessian_bundle = {SymMatrix(Mat(2.0 * Mat::Identity(1, 1)))};
    c.graph_samples = smooth_graph_sampler(c.oracle, c.base_pair.x);
    c.piecewise_text = "x^2 on (-inf,0); x^(3/2) on [0,inf)";
    return c;
}

inline ExampleCase make_neg_abs_3_2() {
    ExampleCase c;
    c.name = "neg_abs_3_2";
    c.description = "-|x|^(3/2): C^1 but not prox-regular at 0; its quadratic "
                    "bundle is empty";
    c.oracle.dim = 1;
    c.oracle.label = c.name;
    c.oracle.eval = [](const Vec& x) {
        return ExtReal(-std::pow(std::abs(x(0)), 1.5));
    };
    c.oracle.grad = [](const Vec& x) {
        return vec1(-1.5 * std::sqrt(std::abs(x(0))) * sgn(x(0)));
    };
    c.oracle.hess = [](const Vec& x) {
        if (x(0) == 0.0)
            throw nondifferentiable_error("neg_abs_3_2: no Hessian at 0");
        Mat h(1, 1);
        h << -0.75 / std::sqrt(std::abs(x(0)));
        return SymMatrix(h);
    };
    c.oracle.subgrad_graph = gradient_graph(c.oracle.grad);
    c.oracle.prox = [](double lambda, const Vec& z) {
        // Stationary points satisfy s^2 - (3 lambda/2) s = |z| in s =
        // sqrt(|u|) on the branch carrying the sign of z; at z = 0 both
        // branches tie.
        double b = 1.5 * lambda;
        double s = 0.5 * (b + std::sqrt(b * b + 4.0 * std::abs(z(0))));
        if (z(0) == 0.0)
            return std::vector<Vec>{vec1(s * s), vec1(-s * s)};
        return std::vector<Vec>{vec1(sgn(z(0)) * s * s)};
    };
    c.oracle.prox_bound = 1e9;
    c.base_pair = PrimalDualPair(c.oracle, vec1(0.0), vec1(0.0));
    c.flags = {false, 0.0, true, false, false, false, true};
    c.schedule.mode = SequenceSchedule::Mode::direct_route;
    c.expected.d2_at_base = {{vec1(1.0), ExtReal::neg_inf()},
                             {vec1(-1.0), ExtReal::neg_inf()}};
    c.graph_samples = smooth_graph_sampler(c.oracle, c.base_pair.x);
    c.piecewise_text = "-(abs(x)^(3/2)) on (-inf,inf)";
    return c;
}

inline ExampleCase make_euclid_norm() {
    ExampleCase c;
    c.name = "euclid_norm";
    c.description = "Euclidean norm on R^2";
    c.oracle.dim = 2;
    c.oracle.label = c.name;
    c.oracle.eval = [](const Vec& x) { return ExtReal(x.norm()); };
    c.oracle.grad = [](const Vec& x) {
        if (x.norm() == 0.0)
            throw nondifferentiable_error("euclid_norm: not differentiable at 0");
        return Vec(x / x.norm());
    };
    c.oracle.subgrad_graph = [](const Vec& x, const Vec& v) {
        double tol = 1e-9;
        if (x.norm() > tol) return (v - x / x.norm()).norm() <= tol;
        return v.norm() <= 1.0 + tol;
    };
    c.oracle.prox = [](double lambda, const Vec& z) {
        double nz = z.norm();
        if (nz <= lambda) return std::vector<Vec>{Vec(Vec::Zero(z.size()))};
        return std::vector<Vec>{Vec(z * (1.0 - lambda / nz))};
    };
    c.oracle.prox_bound = 1e9;
    c.base_pair = PrimalDualPair(c.oracle, Vec(Vec::Zero(2)), Vec(Vec::Zero(2)));
    c.flags = {true, 0.0, true, false, false, true, true};
    c.expected.gtd = GtdDecision::gtd;  // at (0, 0): interior subgradient
    c.expected.bundle_elements = {GQF::indicator_origin(2)};
    c.graph_samples = [oracle = c.oracle](double eps, int count,
                                          std::uint64_t seed) {
        DeterministicRng rng(seed);
        std::vector<PrimalDualPair> out;
        for (int i = 0; i < count; ++i) {
            if (rng.uniform() < 0.5) {
                Vec v(2);
                v << rng.uniform() - 0.5, rng.uniform() - 0.5;
                out.emplace_back(oracle, Vec(Vec::Zero(2)), Vec(0.9 * v));
            } else {
                Vec x(2);
                x << rng.normal(), rng.normal();
                if (x.norm() < 1e-6) continue;
                x *= (0.4 * eps * rng.uniform()) / x.norm();
                out.emplace_back(oracle, x, Vec(x / x.norm()));
            }
        }
        return out;
    };
    return c;
}

// Euclidean projection onto the l1 unit ball (small n).
inline Vec project_l1_ball(const Vec& y) {
    double l1 = y.cwiseAbs().sum();
    if (l1 <= 1.0) return y;
    std::vector<double> mags(static_cast<size_t>(y.size()));
    for (int i = 0; i < y.size(); ++i) mags[static_cast<size_t>(i)] = std::abs(y(i));
    std::sort(mags.begin(), mags.end(), std::greater<>());
    double cum = 0.0;
    double theta = 0.0;
    for (size_t k = 0; k < mags.size(); ++k) {
        cum += mags[k];
        double t = (cum - 1.0) / static_cast<double>(k + 1);
        if (k + 1 == mags.size() || t >= mags[k + 1]) {
            theta = t;
            break;
        }
    }
    Vec out(y.size());
    for (int i = 0; i < y.size(); ++i)
        out(i) = corpus_detail::sgn(y(i)) * std::max(0.0, std::abs(y(i)) - theta);
    return out;
}

inline ExampleCase make_linf_norm() {
    ExampleCase c;
    c.name = "linf_norm";
    c.description = "max-norm on R^2 (dual norm is l1)";
    c.oracle.dim = 2;
    c.oracle.label = c.name;
    c.oracle.eval = [](const Vec& x) { return ExtReal(x.cwiseAbs().maxCoeff()); };
    c.oracle.subgrad_graph = [](const Vec& x, const Vec& v) {
        double tol = 1e-9;
        if (v.cwiseAbs().sum() > 1.0 + tol) return false;
        return std::abs(v.dot(x) - x.cwiseAbs().maxCoeff()) <= tol * (1.0 + x.norm());
    };
    c.oracle.prox = [](double lambda, const Vec& z) {
        // Infimal-convolution duality with the l1 ball.
        return std::vector<Vec>{Vec(z - lambda * project_l1_ball(Vec(z / lambda)))};
    };
    c.oracle.prox_bound = 1e9;
    c.base_pair = PrimalDualPair(c.oracle, Vec(Vec::Zero(2)), Vec(Vec::Zero(2)));
    c.flags = {true, 0.0, true, false, false, true, true};
    c.expected.gtd = GtdDecision::gtd;
    c.expected.bundle_elements = {GQF::indicator_origin(2)};
    return c;
}

inline ExampleCase make_indicator_origin() {
    ExampleCase c;
    c.name = "indicator_origin";
    c.description = "indicator of the origin on R";
    c.oracle.dim = 1;
    c.oracle.label = c.name;
    c.oracle.eval = [](const Vec& x) {
        return x.norm() <= 1e-13 ? ExtReal(0.0) : ExtReal::pos_inf();
    };
    c.oracle.subgrad_graph = [](const Vec& x, const Vec&) {
        return x.norm() <= 1e-13;
    };
    c.oracle.prox = [](double, const Vec& z) {
        return std::vector<Vec>{Vec(Vec::Zero(z.size()))};
    };
    c.oracle.prox_bound = 1e9;
    c.base_pair = PrimalDualPair(c.oracle, vec1(0.0), vec1(0.0));
    c.flags = {true, 0.0, true, false, false, false, true};
    c.expected.d2_at_base = {{vec1(0.0), ExtReal(0.0)},
                             {vec1(1.0), ExtReal::pos_inf()},
                             {vec1(-1.0), ExtReal::pos_inf()}};
    c.expected.gtd = GtdDecision::gtd;
    c.expected.bundle_elements = {GQF::indicator_origin(1)};
    c.graph_samples = [oracle = c.oracle](double eps, int count,
                                          std::uint64_t seed) {
        DeterministicRng rng(seed);
        std::vector<PrimalDualPair> out;
        for (int i = 0; i < count; ++i)
            out.emplace_back(oracle, vec1(0.0),
                             vec1(0.9 * eps * (2.0 * rng.uniform() - 1.0)));
        return out;
    };
    return c;
}

}  // namespace corpus_detail

inline const std::map<std::string, ExampleCase>& corpus_registry() {
    static const std::map<std::string, ExampleCase> registry = [] {
        std::map<std::string, ExampleCase> r;
        auto add = [&r](ExampleCase c) { r.emplace(c.name, std::move(c)); };
        add(corpus_detail::make_zero());
        add(corpus_detail::make_quad(1));
        add(corpus_detail::make_quad(2));
        add(corpus_detail::make_quad(3));
        add(corpus_detail::make_quad(4));
        add(corpus_detail::make_abs_3_2());
        add(corpus_detail::make_sq_sgn());
        add(corpus_detail::make_cubic_shift());
        add(corpus_detail::make_step_quad());
        add(corpus_detail::make_osc_quartic());
        add(corpus_detail::make_mixed_power());
        add(corpus_detail::make_neg_abs_3_2());
        add(corpus_detail::make_euclid_norm());
        add(corpus_detail::make_linf_norm());
        add(corpus_detail::make_indicator_origin());
        return r;
    }();
    return registry;
}

inline const ExampleCase& corpus_get(const std::string& name) {
    const auto& reg = corpus_registry();
    auto it = reg.find(name);
    if (it == reg.end())
        throw lookup_error("corpus: unknown case '" + name + "'");
    return it->second;
}

inline std::vector<std::string> corpus_names() {
    std::vector<std::string> names;
    for (const auto& [name, _] : corpus_registry()) names.push_back(name);
    return names;
}

}  // namespace epibundle
