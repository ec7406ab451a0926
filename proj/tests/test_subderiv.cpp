#include <catch2/catch_amalgamated.hpp>

#include "epibundle/corpus.hpp"
#include "epibundle/subderiv.hpp"

using namespace epibundle;

TEST_CASE("delta2 closed forms") {
    const auto& abs32 = corpus_get("abs_3_2");
    for (double t : {0.1, 0.01}) {
        for (double w : {1.0, -0.5, 2.0}) {
            double expected = 2.0 * std::pow(std::abs(w), 1.5) / std::sqrt(t);
            CHECK(delta2(abs32.oracle, vec1(0.0), vec1(0.0), t, vec1(w)).value() ==
                  Catch::Approx(expected));
        }
    }

    const auto& sq = corpus_get("sq_sgn");
    for (double t : {0.1, 0.003}) {
        for (double w : {1.0, -1.0, 0.3}) {
            double expected = 2.0 * w * w * (w > 0 ? 1.0 : (w < 0 ? -1.0 : 0.0));
            CHECK(delta2(sq.oracle, vec1(0.0), vec1(0.0), t, vec1(w)).value() ==
                  Catch::Approx(expected));
        }
    }

    CHECK(delta2(abs32.oracle, vec1(0.0), vec1(0.0), 0.05, vec1(0.0)).value() == 0.0);

    const auto& ind = corpus_get("indicator_origin");
    CHECK(delta2(ind.oracle, vec1(0.0), vec1(0.0), 0.1, vec1(1.0)).is_pos_inf());
    CHECK_THROWS_AS(delta2(ind.oracle, vec1(1.0), vec1(0.0), 0.1, vec1(1.0)),
                    argument_error);
    CHECK_THROWS_AS(delta2(abs32.oracle, vec1(0.0), vec1(0.0), 0.0, vec1(1.0)),
                    argument_error);
}

TEST_CASE("d2_estimate: |x|^{3/2} blows up off the origin direction") {
    const auto& c = corpus_get("abs_3_2");
    SubderivEstimate plus = d2_estimate(c.oracle, c.base_pair, vec1(1.0));
    SubderivEstimate minus = d2_estimate(c.oracle, c.base_pair, vec1(-1.0));
    CHECK(plus.verdict == EstimateVerdict::pos_inf);
    CHECK(minus.verdict == EstimateVerdict::pos_inf);

    SubderivEstimate zero = d2_estimate(c.oracle, c.base_pair, vec1(0.0));
    REQUIRE(zero.verdict == EstimateVerdict::finite);
    CHECK(std::abs(zero.lower.value()) <= 1e-3);
    CHECK(std::abs(zero.upper.value()) <= 1e-3);
}

TEST_CASE("d2_estimate: smooth cubic recovers the curvature") {
    const auto& c = corpus_get("cubic_shift");
    for (double w : {1.0, -1.0}) {
        SubderivEstimate est = d2_estimate(c.oracle, c.base_pair, vec1(w));
        REQUIRE(est.verdict == EstimateVerdict::finite);
        CHECK(std::abs(est.lower.value() - 1.0) <= 2e-2);
    }
}

TEST_CASE("d2_estimate: -|x|^{3/2} dives to -inf") {
    const auto& c = corpus_get("neg_abs_3_2");
    for (double w : {1.0, -1.0, 0.0}) {
        SubderivEstimate est = d2_estimate(c.oracle, c.base_pair, vec1(w));
        CHECK(est.verdict == EstimateVerdict::neg_inf);
    }
}

TEST_CASE("d2_estimate: smooth reduction to the Hessian quadratic") {
    const auto& c = corpus_get("quad_2");
    EpiGrid grid;
    grid.directions = 8;
    for (const auto& d : direction_set(2, grid)) {
        SubderivEstimate est = d2_estimate(c.oracle, c.base_pair, d, grid);
        REQUIRE(est.verdict == EstimateVerdict::finite);
        double expected = 2.0 * d.squaredNorm();
        CHECK(std::abs(est.lower.value() - expected) <= 2e-2 * expected);
    }
}

TEST_CASE("d2_estimate: x^2 sgn(x) has sign-asymmetric but exact quotients") {
    const auto& c = corpus_get("sq_sgn");
    SubderivEstimate plus = d2_estimate(c.oracle, c.base_pair, vec1(1.0));
    SubderivEstimate minus = d2_estimate(c.oracle, c.base_pair, vec1(-1.0));
    REQUIRE(plus.verdict == EstimateVerdict::finite);
    REQUIRE(minus.verdict == EstimateVerdict::finite);
    CHECK(std::abs(plus.lower.value() - 2.0) <= 2e-2);
    CHECK(std::abs(minus.lower.value() + 2.0) <= 2e-2);
}

TEST_CASE("lower windows are nondecreasing: shrinking windows raise the inf") {
    const auto& c = corpus_get("cubic_shift");
    SubderivEstimate est = d2_estimate(c.oracle, c.base_pair, vec1(1.0));
    for (size_t j = 1; j < est.lower_windows.size(); ++j) {
        REQUIRE(est.lower_windows[j].is_finite());
        CHECK(est.lower_windows[j].value() >=
              est.lower_windows[j - 1].value() - 1e-12);
    }
}

TEST_CASE("scaling law: degree-2 homogeneity of the estimates") {
    for (const char* name : {"cubic_shift", "sq_sgn", "quad_1"}) {
        const auto& c = corpus_get(name);
        SubderivEstimate base = d2_estimate(c.oracle, c.base_pair, vec1(1.0));
        REQUIRE(base.verdict == EstimateVerdict::finite);
        for (double s : {0.5, 2.0}) {
            SubderivEstimate scaled = d2_estimate(c.oracle, c.base_pair, vec1(s));
            REQUIRE(scaled.verdict == EstimateVerdict::finite);
            CHECK(std::abs(scaled.lower.value() - s * s * base.lower.value()) <=
                  2e-3 * std::max(1.0, s * s * std::abs(base.lower.value())));
        }
    }
}

TEST_CASE("d1_estimate closed forms") {
    const auto& norm = corpus_get("euclid_norm");
    for (auto w : {vec2(1.0, 0.0), vec2(0.6, -0.8), vec2(-2.0, 1.0)}) {
        ExtReal d1 = d1_estimate(norm.oracle, Vec(Vec::Zero(2)), w);
        REQUIRE(d1.is_finite());
        CHECK(std::abs(d1.value() - w.norm()) <= 1e-3 * (1.0 + w.norm()));
    }

    const auto& quad = corpus_get("quad_1");
    ExtReal smooth = d1_estimate(quad.oracle, vec1(0.7), vec1(1.0));
    CHECK(std::abs(smooth.value() - 1.4) <= 1e-3);

    const auto& ind = corpus_get("indicator_origin");
    CHECK(d1_estimate(ind.oracle, vec1(0.0), vec1(1.0)).is_pos_inf());
}

TEST_CASE("critical cone membership") {
    const auto& norm = corpus_get("euclid_norm");
    Vec zero2 = Vec::Zero(2);
    Vec e1 = vec2(1.0, 0.0);

    // Interior subgradient: only the origin is critical.
    CHECK_FALSE(critical_cone_test(norm.oracle, zero2, Vec(0.5 * e1), e1));
    CHECK(critical_cone_test(norm.oracle, zero2, Vec(0.5 * e1), zero2));

    // Boundary subgradient: the ray through it is critical.
    CHECK(critical_cone_test(norm.oracle, zero2, e1, e1));
    CHECK_FALSE(critical_cone_test(norm.oracle, zero2, e1, Vec(-e1)));

    // Smooth: every direction is critical at v = grad f(x).
    const auto& quad = corpus_get("quad_1");
    CHECK(critical_cone_test(quad.oracle, vec1(0.7), vec1(1.4), vec1(1.0)));
    CHECK(critical_cone_test(quad.oracle, vec1(0.7), vec1(1.4), vec1(-2.0)));
}

TEST_CASE("twice epi-differentiability verdicts") {
    CHECK(twice_epi_diff_test(corpus_get("sq_sgn").oracle,
                              corpus_get("sq_sgn").base_pair)
              .verdict == EpiDiffVerdict::yes);
    CHECK(twice_epi_diff_test(corpus_get("abs_3_2").oracle,
                              corpus_get("abs_3_2").base_pair)
              .verdict == EpiDiffVerdict::yes);
    CHECK(twice_epi_diff_test(corpus_get("step_quad").oracle,
                              corpus_get("step_quad").base_pair)
              .verdict == EpiDiffVerdict::yes);

    const auto& norm = corpus_get("euclid_norm");
    for (auto v : {vec2(0.0, 0.0), vec2(1.0, 0.0)}) {
        PrimalDualPair pair(norm.oracle, Vec(Vec::Zero(2)), v);
        EpiGrid grid;
        grid.directions = 16;
        CHECK(twice_epi_diff_test(norm.oracle, pair, grid).verdict ==
              EpiDiffVerdict::yes);
    }
}

TEST_CASE("growth certificates") {
    const auto& cubic = corpus_get("cubic_shift");
    for (double radius : {1e-1, 1e-2, 1e-3})
        CHECK_FALSE(growth_check(cubic.oracle, cubic.base_pair, 1.0, radius));
    CHECK(growth_check(cubic.oracle, cubic.base_pair, 0.9, 1e-2));

    const auto& quad = corpus_get("quad_1");
    CHECK(growth_check(quad.oracle, quad.base_pair, 1.0, 1.0));
    CHECK(growth_check(quad.oracle, quad.base_pair, 2.0, 1.0));
    CHECK_FALSE(growth_check(quad.oracle, quad.base_pair, 3.0, 1.0));
}

TEST_CASE("growth passing implies the subderivative floor") {
    for (const char* name : {"quad_1", "cubic_shift"}) {
        const auto& c = corpus_get(name);
        for (auto [kappa, expected] : c.expected.growth_at_1e2) {
            if (!growth_check(c.oracle, c.base_pair, kappa, 1e-2)) continue;
            for (double w : {1.0, -1.0}) {
                SubderivEstimate est = d2_estimate(c.oracle, c.base_pair, vec1(w));
                REQUIRE(est.verdict == EstimateVerdict::finite);
                CHECK(est.lower.value() >= kappa * w * w - 2e-2);
            }
        }
    }
}

TEST_CASE("variational convexity certificate") {
    const auto& quad = corpus_get("quad_1");
    AttentiveLocalization loc_q(quad.base_pair, 0.5);
    auto samples_q = quad.graph_samples(0.5, 30, 3);
    CHECK(svarconv_certificate(quad.oracle, loc_q, 2.0, 0.4, samples_q));

    const auto& step = corpus_get("step_quad");
    AttentiveLocalization loc_s(step.base_pair, 0.25);
    auto samples_s = step.graph_samples(0.25, 40, 7);
    CHECK(svarconv_certificate(step.oracle, loc_s, 2.0, 0.2, samples_s));

    FunctionOracle concave;
    concave.dim = 1;
    concave.label = "neg_quad";
    concave.eval = [](const Vec& x) { return ExtReal(-x(0) * x(0)); };
    concave.subgrad_graph = [](const Vec& x, const Vec& v) {
        return std::abs(v(0) + 2.0 * x(0)) <= 1e-9;
    };
    PrimalDualPair center(concave, vec1(0.0), vec1(0.0));
    AttentiveLocalization loc_c(center, 0.5);
    std::vector<PrimalDualPair> center_only = {center};
    CHECK_FALSE(svarconv_certificate(concave, loc_c, 0.0, 0.3, center_only));

    // Samples outside the localization are rejected.
    PrimalDualPair far(quad.oracle, vec1(2.0), vec1(4.0));
    CHECK_THROWS_AS(
        svarconv_certificate(quad.oracle, loc_q, 2.0, 0.4, {far}),
        argument_error);
}

TEST_CASE("prox-regularity floor along localized graph samples") {
    const auto& c = corpus_get("sq_sgn");  // r-level 2
    auto samples = c.graph_samples(0.3, 12, 21);
    for (const auto& s : samples) {
        for (double w : {1.0, -1.0}) {
            SubderivEstimate est = d2_estimate(c.oracle, s, vec1(w));
            REQUIRE(est.verdict == EstimateVerdict::finite);
            CHECK(est.lower.value() >= -2.0 * w * w - 2e-2);
        }
    }
}
