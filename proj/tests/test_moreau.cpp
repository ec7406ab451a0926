#include <catch2/catch_amalgamated.hpp>

#include "epibundle/corpus.hpp"
#include "epibundle/moreau.hpp"

using namespace epibundle;

namespace {

// |x| with closed-form prox (soft threshold).
FunctionOracle abs_oracle(bool with_prox) {
    FunctionOracle f;
    f.dim = 1;
    f.label = "abs";
    f.eval = [](const Vec& x) { return ExtReal(std::abs(x(0))); };
    if (with_prox) {
        f.prox = [](double lambda, const Vec& z) {
            double u = 0.0;
            if (z(0) > lambda) u = z(0) - lambda;
            if (z(0) < -lambda) u = z(0) + lambda;
            return std::vector<Vec>{vec1(u)};
        };
    }
    f.prox_bound = 1e9;
    return f;
}

// Hand-solved envelope of |x|: quadratic cap inside |x| <= lambda, the
// shifted absolute value outside.
double huber(double lambda, double x) {
    if (std::abs(x) <= lambda) return x * x / (2.0 * lambda);
    return std::abs(x) - 0.5 * lambda;
}

}  // namespace

TEST_CASE("envelope closed forms") {
    const auto& quad = corpus_get("quad_1");
    // min_u u^2 + (u-1)^2 at lambda = 1/2: value 1/2.
    CHECK(envelope(quad.oracle, 0.5, vec1(1.0)).value() == Catch::Approx(0.5));

    const auto& zero = corpus_get("zero");
    for (double x : {-2.0, 0.0, 3.7})
        CHECK(envelope(zero.oracle, 0.3, vec1(x)).value() == Catch::Approx(0.0));

    FunctionOracle abs = abs_oracle(true);
    for (double x : {-2.0, -0.05, 0.0, 0.08, 1.5})
        CHECK(envelope(abs, 0.1, vec1(x)).value() ==
              Catch::Approx(huber(0.1, x)).margin(1e-12));
}

TEST_CASE("grid engine reproduces the Huber envelope without a prox oracle") {
    FunctionOracle abs = abs_oracle(false);
    double lambda = 0.25;
    for (int i = 0; i <= 100; ++i) {
        double x = -3.0 + 6.0 * i / 100.0;
        double value = envelope(abs, lambda, vec1(x)).value();
        CHECK(std::abs(value - huber(lambda, x)) <= 1e-6);
    }
}

TEST_CASE("grid engine matches closed-form prox in two dimensions") {
    const auto& quad = corpus_get("quad_2");
    FunctionOracle no_prox = quad.oracle;
    no_prox.prox = nullptr;
    double lambda = 0.2;
    Vec x = vec2(1.0, -0.5);
    double expected = envelope(quad.oracle, lambda, x).value();
    CHECK(std::abs(envelope(no_prox, lambda, x).value() - expected) <= 1e-6);
}

TEST_CASE("prox closed forms") {
    FunctionOracle abs = abs_oracle(true);
    ProxResult soft = prox(abs, 0.5, vec1(2.0));
    REQUIRE(soft.minimizers.size() == 1);
    CHECK(soft.minimizers[0](0) == Catch::Approx(1.5));
    CHECK_FALSE(soft.multi_valued);

    const auto& quad = corpus_get("quad_1");
    for (double lambda : {0.1, 0.5}) {
        ProxResult p = prox(quad.oracle, lambda, vec1(0.8));
        CHECK(p.minimizers[0](0) == Catch::Approx(0.8 / (1.0 + 2.0 * lambda)));
    }

    const auto& ind = corpus_get("indicator_origin");
    ProxResult pi = prox(ind.oracle, 0.3, vec1(5.0));
    REQUIRE(pi.minimizers.size() == 1);
    CHECK(pi.minimizers[0].norm() == 0.0);
    CHECK(pi.value.value() == Catch::Approx(25.0 / 0.6));
}

TEST_CASE("prox detects multi-valuedness and bounds minimizer values") {
    const auto& c = corpus_get("neg_abs_3_2");
    double lambda = 0.2;
    ProxResult p = prox(c.oracle, lambda, vec1(0.0));
    CHECK(p.multi_valued);
    REQUIRE(p.minimizers.size() == 2);
    double expected = std::pow(1.5 * lambda, 2.0);  // stationary |u| at z = 0
    CHECK(std::abs(std::abs(p.minimizers[0](0)) - expected) <= 1e-9);
    for (const auto& u : p.minimizers) {
        double val = c.oracle.eval(u).value() + u.squaredNorm() / (2.0 * lambda);
        CHECK(val <= p.value.value() + 1e-9);
    }

    // The grid engine finds both branches too.
    FunctionOracle no_prox = c.oracle;
    no_prox.prox = nullptr;
    ProxResult pg = prox(no_prox, lambda, vec1(0.0));
    CHECK(pg.multi_valued);
}

TEST_CASE("envelope diverges for functions with cubic decay") {
    const auto& cubic = corpus_get("cubic_shift");
    CHECK_THROWS_AS(envelope(cubic.oracle, 0.5, vec1(0.0)), unbounded_error);
}

TEST_CASE("envelope gradient via the proximal point") {
    FunctionOracle abs = abs_oracle(true);
    CHECK(envelope_gradient(abs, 0.5, vec1(2.0))(0) == Catch::Approx(1.0));

    const auto& zero = corpus_get("zero");
    CHECK(envelope_gradient(zero.oracle, 0.3, vec1(1.7)).norm() <= 1e-12);

    const auto& quad = corpus_get("quad_1");
    CHECK(envelope_gradient(quad.oracle, 0.5, vec1(1.0))(0) == Catch::Approx(1.0));

    const auto& neg = corpus_get("neg_abs_3_2");
    CHECK_THROWS_AS(envelope_gradient(neg.oracle, 0.2, vec1(0.0)),
                    nondifferentiable_error);
}

TEST_CASE("gradient identity against central differences on corpus entries") {
    for (const char* name : {"quad_1", "abs_3_2", "mixed_power", "euclid_norm"}) {
        const auto& c = corpus_get(name);
        DeterministicRng rng(3);
        for (int trial = 0; trial < 10; ++trial) {
            Vec z(c.oracle.dim);
            for (int j = 0; j < z.size(); ++j) z(j) = 0.7 * rng.normal() + 0.3;
            GradientOptions opts;  // fd_check on: throws on mismatch
            CHECK_NOTHROW(envelope_gradient(c.oracle, 0.2, z, opts));
        }
    }
}

TEST_CASE("proximal point of x + lambda v recovers x on convex graph samples") {
    for (const char* name : {"abs_3_2", "mixed_power", "quad_1", "quad_2", "zero"}) {
        const auto& c = corpus_get(name);
        auto samples = c.graph_samples(0.5, 20, 17);
        for (double lambda : {0.1, 0.3}) {
            for (const auto& s : samples) {
                ProxResult p = prox(c.oracle, lambda, Vec(s.x + lambda * s.v));
                REQUIRE_FALSE(p.multi_valued);
                CHECK((p.minimizers[0] - s.x).norm() <= 1e-7 * (1.0 + s.x.norm()));
            }
        }
    }
}

TEST_CASE("envelope lower bound and lambda monotonicity on the corpus") {
    for (const auto& name : corpus_names()) {
        const auto& c = corpus_get(name);
        if (!c.flags.prox_bounded || !c.oracle.has_prox()) continue;
        DeterministicRng rng(5);
        for (int trial = 0; trial < 8; ++trial) {
            Vec x(c.oracle.dim);
            for (int j = 0; j < x.size(); ++j) x(j) = rng.normal();
            ExtReal fx = c.oracle.eval(x);
            double e1 = envelope(c.oracle, 0.1, x).value();
            double e2 = envelope(c.oracle, 0.3, x).value();
            if (fx.is_finite()) CHECK(e1 <= fx.value() + 1e-9);
            CHECK(e2 <= e1 + 1e-9);
        }
    }
}

TEST_CASE("Hessian probe: smooth quadratic converges to 2/(1+2 lambda)") {
    const auto& quad = corpus_get("quad_1");
    double lambda = 0.25;
    HessianProbe probe = envelope_hessian_probe(quad.oracle, lambda, vec1(0.0));
    REQUIRE(probe.converged);
    CHECK((*probe.limit)(0, 0) ==
          Catch::Approx(2.0 / (1.0 + 2.0 * lambda)).epsilon(1e-6));
}

TEST_CASE("Hessian probe: |x|^{3/2} at the origin gives 1/lambda") {
    const auto& c = corpus_get("abs_3_2");
    double lambda = 0.1;
    HessianProbeOptions opts;
    opts.levels = 16;
    HessianProbe probe = envelope_hessian_probe(c.oracle, lambda, vec1(0.0), opts);
    REQUIRE(probe.converged);
    CHECK(std::abs((*probe.limit)(0, 0) - 1.0 / lambda) <= 1e-3 / lambda);
}

TEST_CASE("Hessian probe: x^2 sgn(x) fails at the origin") {
    const auto& c = corpus_get("sq_sgn");
    HessianProbeOptions opts;
    opts.levels = 16;
    HessianProbe probe = envelope_hessian_probe(c.oracle, 0.1, vec1(0.0), opts);
    CHECK_FALSE(probe.converged);
    // The one-sided second derivatives of the envelope differ by an O(1)
    // amount; the central quotients alone would look convergent.
    CHECK(probe.onesided_gap > 1.0);
}

TEST_CASE("envelope second quotients respect the sampled Lipschitz bound") {
    const auto& c = corpus_get("abs_3_2");
    double lambda = 0.1;
    FunctionOracle env = envelope_oracle(c.oracle, lambda);

    DeterministicRng rng(9);
    double lhat = 0.0;
    std::vector<double> zs;
    for (int i = 0; i < 40; ++i) zs.push_back(0.6 * rng.normal());
    for (size_t i = 0; i + 1 < zs.size(); ++i) {
        double num =
            std::abs(env.grad(vec1(zs[i]))(0) - env.grad(vec1(zs[i + 1]))(0));
        double den = std::abs(zs[i] - zs[i + 1]);
        if (den > 1e-10) lhat = std::max(lhat, num / den);
    }
    REQUIRE(lhat > 0.0);
    for (int i = 0; i < 20; ++i) {
        double z = 0.5 * rng.normal();
        double g = env.grad(vec1(z))(0);
        for (double t : {1e-2, 1e-3}) {
            for (double w : {1.0, -1.0, 0.5}) {
                double q = (env.eval(vec1(z + t * w)).value() -
                            env.eval(vec1(z)).value() - t * g * w) /
                           (0.5 * t * t);
                CHECK(std::abs(q) <= lhat * 1.05 * w * w + 1e-6);
            }
        }
    }
}

TEST_CASE("prox trace sink records coarse samples") {
    FunctionOracle abs = abs_oracle(false);
    std::vector<std::pair<Vec, double>> trace;
    ProxOptions opts;
    opts.trace = &trace;
    prox(abs, 0.5, vec1(1.0), opts);
    CHECK(trace.size() == 2001);
}
