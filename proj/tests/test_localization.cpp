#include <catch2/catch_amalgamated.hpp>

#include "epibundle/corpus.hpp"
#include "epibundle/oracle.hpp"

using namespace epibundle;

TEST_CASE("center always belongs to its own localization") {
    const ExampleCase& c = corpus_get("zero");
    AttentiveLocalization loc(c.base_pair, 1.0);
    CHECK(localization_membership(c.oracle, loc, c.base_pair.x, c.base_pair.v));
}

TEST_CASE("attentiveness clause excludes the high branch of step_quad") {
    const ExampleCase& c = corpus_get("step_quad");
    AttentiveLocalization loc(c.base_pair, 0.25);

    // f(-0.1) = 1 >= f(0) + 1/4: fails the value clause even though the
    // graph clauses hold.
    CHECK_FALSE(localization_membership(c.oracle, loc, vec1(-0.1), vec1(0.0)));

    // Right branch: f(0.1) = 0.01 < 1/4 and v = 2x there.
    CHECK(localization_membership(c.oracle, loc, vec1(0.1), vec1(0.2)));

    // Off-graph point.
    CHECK_FALSE(localization_membership(c.oracle, loc, vec1(0.1), vec1(0.3)));
}

TEST_CASE("membership needs a subgradient graph") {
    FunctionOracle bare;
    bare.dim = 1;
    bare.label = "bare";
    bare.eval = [](const Vec&) { return ExtReal(0.0); };
    PrimalDualPair center(bare, vec1(0.0), vec1(0.0));
    AttentiveLocalization loc(center, 1.0);
    CHECK_THROWS_AS(localization_membership(bare, loc, vec1(0.0), vec1(0.0)),
                    capability_error);
}

TEST_CASE("membership is monotone in eps") {
    const ExampleCase& c = corpus_get("step_quad");
    auto samples = c.graph_samples(0.5, 60, 99);
    for (double eps : {0.1, 0.2, 0.4}) {
        AttentiveLocalization small(c.base_pair, eps);
        AttentiveLocalization large(c.base_pair, eps * 2.0);
        for (const auto& s : samples) {
            if (localization_membership(c.oracle, small, s.x, s.v))
                CHECK(localization_membership(c.oracle, large, s.x, s.v));
        }
    }
}

TEST_CASE("nesting: identical centers") {
    const ExampleCase& c = corpus_get("quad_1");
    AttentiveLocalization loc1(c.base_pair, 1.0);
    AttentiveLocalization loc2(c.base_pair, 0.5);
    auto samples = c.graph_samples(1.0, 100, 5);
    CHECK(localization_nesting_check(c.oracle, loc1, loc2, samples));
}

TEST_CASE("nesting: shifted center inside step_quad") {
    const ExampleCase& c = corpus_get("step_quad");
    AttentiveLocalization loc1(c.base_pair, 0.25);
    PrimalDualPair shifted(c.oracle, vec1(0.05), vec1(0.1));
    AttentiveLocalization loc2(shifted, 0.05);

    // Grid-enumerated graph points near the center.
    std::vector<PrimalDualPair> samples;
    for (int i = 0; i < 100; ++i) {
        double u = 1e-3 + 0.12 * i / 100.0;
        samples.emplace_back(c.oracle, vec1(u), vec1(2.0 * u));
    }
    CHECK(localization_nesting_check(c.oracle, loc1, loc2, samples));
}

TEST_CASE("nesting rejects eps2 >= eps1 and adversarial samples") {
    const ExampleCase& c = corpus_get("step_quad");
    AttentiveLocalization loc1(c.base_pair, 0.25);
    AttentiveLocalization loc2(c.base_pair, 0.1);
    CHECK_THROWS_AS(
        localization_nesting_check(c.oracle, loc2, loc1, {}),
        argument_error);

    // A graph point of the high branch: attentive w.r.t. the shifted center
    // (whose value is 1) but not w.r.t. the base localization.
    PrimalDualPair high(c.oracle, vec1(-0.05), vec1(0.0));
    AttentiveLocalization loc_high(high, 0.1);
    std::vector<PrimalDualPair> adversarial = {
        PrimalDualPair(c.oracle, vec1(-0.02), vec1(0.0))};
    CHECK_FALSE(
        localization_nesting_check(c.oracle, loc1, loc_high, adversarial));
}
