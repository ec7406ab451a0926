#include <catch2/catch_amalgamated.hpp>

#include "epibundle/corpus.hpp"
#include "epibundle/gtd.hpp"

using namespace epibundle;

TEST_CASE("direct route: |x|^{3/2} is gtd with the origin indicator") {
    const auto& c = corpus_get("abs_3_2");
    GtdVerdict v = gtd_check_direct(c.oracle, c.base_pair);
    REQUIRE(v.decision == GtdDecision::gtd);
    REQUIRE(v.form.has_value());
    CHECK(v.form->subspace().is_zero());
}

TEST_CASE("direct route: x^2 sgn(x) is epi only") {
    const auto& c = corpus_get("sq_sgn");
    GtdVerdict v = gtd_check_direct(c.oracle, c.base_pair);
    CHECK(v.decision == GtdDecision::epi_only);
    CHECK(v.residual > 5e-2);
}

TEST_CASE("direct route: smooth entries recover half the Hessian quadratic") {
    const auto& c = corpus_get("cubic_shift");
    GtdVerdict v = gtd_check_direct(c.oracle, c.base_pair);
    REQUIRE(v.decision == GtdDecision::gtd);
    CHECK(gqf_graph_distance(*v.form, GQF::coefficient_form(0.5)) <= 2e-2);
}

TEST_CASE("direct route: step_quad and mixed_power fail the subspace check") {
    for (const char* name : {"step_quad", "mixed_power"}) {
        const auto& c = corpus_get(name);
        GtdVerdict v = gtd_check_direct(c.oracle, c.base_pair);
        CHECK(v.decision == GtdDecision::epi_only);
    }
}

TEST_CASE("direct route: -|x|^{3/2} is rejected through its -inf values") {
    const auto& c = corpus_get("neg_abs_3_2");
    GtdVerdict v = gtd_check_direct(c.oracle, c.base_pair);
    CHECK(v.decision == GtdDecision::epi_only);
    CHECK_FALSE(v.form.has_value());
}

TEST_CASE("moreau route: |x|^{3/2} via the envelope Hessian") {
    const auto& c = corpus_get("abs_3_2");
    GtdVerdict v = gtd_check_moreau(c.oracle, c.base_pair, 0.1, 0.0);
    REQUIRE(v.decision == GtdDecision::gtd);
    CHECK(v.form->subspace().is_zero());
}

TEST_CASE("moreau route: x^2 sgn(x) probe fails, envelope stays epi") {
    const auto& c = corpus_get("sq_sgn");
    GtdVerdict v = gtd_check_moreau(c.oracle, c.base_pair, 0.1, 2.0);
    CHECK(v.decision == GtdDecision::epi_only);
    REQUIRE(v.probe.has_value());
    CHECK_FALSE(v.probe->converged);
}

TEST_CASE("moreau route: quadratic recovers the coefficient-1 form") {
    const auto& c = corpus_get("quad_1");
    double lambda = 0.25;
    GtdVerdict v = gtd_check_moreau(c.oracle, c.base_pair, lambda, 0.0);
    REQUIRE(v.decision == GtdDecision::gtd);
    REQUIRE(v.probe.has_value());
    CHECK((*v.probe->limit)(0, 0) ==
          Catch::Approx(2.0 / (1.0 + 2.0 * lambda)).epsilon(1e-5));
    CHECK(gqf_graph_distance(*v.form, GQF::coefficient_form(1.0)) <= 1e-6);
}

TEST_CASE("moreau route rejects multi-valued prox at the base point") {
    const auto& c = corpus_get("neg_abs_3_2");
    CHECK_THROWS_AS(gtd_check_moreau(c.oracle, c.base_pair, 0.1, 0.0),
                    nondifferentiable_error);
    CHECK_THROWS_AS(gtd_check_moreau(c.oracle, c.base_pair, 0.5, 4.0),
                    argument_error);
}

TEST_CASE("route agreement on prox-regular corpus entries") {
    for (const char* name : {"zero", "quad_1", "quad_2", "abs_3_2", "sq_sgn",
                             "step_quad", "mixed_power", "euclid_norm",
                             "indicator_origin"}) {
        INFO(name);
        const auto& c = corpus_get(name);
        GtdVerdict direct = gtd_check_direct(c.oracle, c.base_pair);
        GtdVerdict moreau =
            gtd_check_moreau(c.oracle, c.base_pair, c.lambda, c.r_level);
        CHECK(direct.decision == moreau.decision);
        if (direct.decision == GtdDecision::gtd &&
            moreau.decision == GtdDecision::gtd) {
            CHECK(gqf_graph_distance(*direct.form, *moreau.form) <= 1e-3);
        }
        GtdVerdict both =
            gtd_check_both(c.oracle, c.base_pair, c.lambda, c.r_level);
        CHECK(both.decision == direct.decision);
    }
}

TEST_CASE("envelope identity on gtd corpus entries") {
    for (const char* name :
         {"abs_3_2", "quad_1", "quad_2", "zero", "indicator_origin"}) {
        const auto& c = corpus_get(name);
        for (double lambda : {0.1, 0.3}) {
            INFO(name << " lambda=" << lambda);
            double gap =
                envelope_identity_check(c.oracle, c.base_pair, lambda, c.r_level);
            CHECK(gap <= 1e-2);
        }
    }
}

TEST_CASE("envelope identity refuses non-gtd pairs") {
    const auto& c = corpus_get("sq_sgn");
    CHECK_THROWS_AS(
        envelope_identity_check(c.oracle, c.base_pair, 0.1, 2.0),
        argument_error);
}

TEST_CASE("norm characterization against the dual-norm condition") {
    const auto& e2 = corpus_get("euclid_norm");
    EpiGrid grid;
    grid.directions = 32;

    CHECK(norm_gtd_characterization(e2.oracle, vec2(0.0, 0.0), grid));
    CHECK(norm_gtd_characterization(e2.oracle, vec2(0.5, 0.0), grid));
    CHECK_FALSE(norm_gtd_characterization(e2.oracle, vec2(1.0, 0.0), grid));

    const auto& linf = corpus_get("linf_norm");
    CHECK(norm_gtd_characterization(linf.oracle, vec2(0.5, 0.0), grid));
    CHECK(dual_norm_estimate(linf.oracle, vec2(0.5, 0.0), grid) ==
          Catch::Approx(0.5).margin(1e-6));
    CHECK(dual_norm_estimate(e2.oracle, vec2(1.0, 0.0), grid) ==
          Catch::Approx(1.0).margin(1e-3));

    FunctionOracle not_norm;
    not_norm.dim = 1;
    not_norm.label = "shifted";
    not_norm.eval = [](const Vec& x) { return ExtReal(std::abs(x(0)) + 1.0); };
    CHECK_THROWS_AS(norm_gtd_characterization(not_norm, vec1(0.0)),
                    argument_error);
}

TEST_CASE("sum rule for second subderivatives") {
    const auto& quad = corpus_get("quad_1");
    const auto& abs32 = corpus_get("abs_3_2");
    CHECK(sum_rule_check(quad.oracle, abs32.oracle, abs32.base_pair) <= 2e-2);

    const auto& zero = corpus_get("zero");
    const auto& sq = corpus_get("sq_sgn");
    CHECK(sum_rule_check(zero.oracle, sq.oracle, sq.base_pair) <= 2e-2);

    const auto& ind = corpus_get("indicator_origin");
    CHECK(sum_rule_check(quad.oracle, ind.oracle, ind.base_pair) <= 2e-2);
}

TEST_CASE("C^{1,1} entries: gtd coincides with classical twice differentiability") {
    const auto& sq = corpus_get("sq_sgn");
    // Off the kink f is C^2, so the pair (x, grad f(x)) must be gtd with the
    // local Hessian coefficient.
    PrimalDualPair off(sq.oracle, vec1(0.3), vec1(0.6));
    GtdVerdict v = gtd_check_direct(sq.oracle, off);
    REQUIRE(v.decision == GtdDecision::gtd);
    CHECK(gqf_graph_distance(*v.form, GQF::coefficient_form(1.0)) <= 2e-2);

    // At the kink f is not classically twice differentiable: not gtd.
    CHECK(gtd_check_direct(sq.oracle, sq.base_pair).decision ==
          GtdDecision::epi_only);

    // osc_quartic is twice differentiable at 0 despite f'' being
    // discontinuous there.
    const auto& osc = corpus_get("osc_quartic");
    GtdVerdict vo = gtd_check_direct(osc.oracle, osc.base_pair);
    REQUIRE(vo.decision == GtdDecision::gtd);
    CHECK(gqf_graph_distance(*vo.form, GQF::coefficient_form(0.0)) <= 2e-2);
}

TEST_CASE("C^{1,1} bound caps finite second subderivatives") {
    const auto& c = corpus_get("sq_sgn");
    DeterministicRng rng(13);
    double lhat = 0.0;
    for (int i = 0; i < 60; ++i) {
        double a = 0.8 * rng.normal();
        double b = 0.8 * rng.normal();
        if (std::abs(a - b) < 1e-10) continue;
        lhat = std::max(lhat, std::abs(c.oracle.grad(vec1(a))(0) -
                                       c.oracle.grad(vec1(b))(0)) /
                                  std::abs(a - b));
    }
    REQUIRE(lhat >= 2.0 - 1e-6);
    for (double x : {0.0, 0.2, -0.4}) {
        PrimalDualPair pair(c.oracle, vec1(x), c.oracle.grad(vec1(x)));
        for (double w : {1.0, -1.0, 2.0}) {
            SubderivEstimate est = d2_estimate(c.oracle, pair, vec1(w));
            REQUIRE(est.verdict == EstimateVerdict::finite);
            CHECK(std::abs(est.lower.value()) <= lhat * 1.01 * w * w + 1e-6);
        }
    }
}
