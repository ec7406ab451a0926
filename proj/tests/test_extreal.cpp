#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <vector>

#include "epibundle/extreal.hpp"

using namespace epibundle;

TEST_CASE("ordering is total: -inf < finite < +inf") {
    ExtReal ninf = ExtReal::neg_inf();
    ExtReal pinf = ExtReal::pos_inf();
    ExtReal a(-3.0), b(0.0), c(7.5);

    CHECK(ninf < a);
    CHECK(a < b);
    CHECK(b < c);
    CHECK(c < pinf);
    CHECK(ninf < pinf);
    CHECK_FALSE(pinf < pinf);
    CHECK_FALSE(ninf < ninf);
    CHECK(pinf == ExtReal::pos_inf());
}

TEST_CASE("sorting a mixed sample is idempotent") {
    std::vector<ExtReal> xs = {ExtReal(2.0),  ExtReal::pos_inf(), ExtReal(-1.0),
                               ExtReal::neg_inf(), ExtReal(0.5),  ExtReal(2.0)};
    auto lt = [](const ExtReal& a, const ExtReal& b) { return a < b; };
    std::sort(xs.begin(), xs.end(), lt);
    std::vector<ExtReal> once = xs;
    std::sort(xs.begin(), xs.end(), lt);
    CHECK(xs == once);
    CHECK(xs.front().is_neg_inf());
    CHECK(xs.back().is_pos_inf());
}

TEST_CASE("addition with infinities") {
    CHECK((ExtReal::pos_inf() + ExtReal(5.0)).is_pos_inf());
    CHECK((ExtReal(5.0) + ExtReal::pos_inf()).is_pos_inf());
    CHECK((ExtReal::neg_inf() + ExtReal(5.0)).is_neg_inf());
    CHECK((ExtReal(1.0) + ExtReal(2.0)).value() == Catch::Approx(3.0));

    CHECK_THROWS_AS(ExtReal::pos_inf() + ExtReal::neg_inf(), argument_error);
    CHECK_THROWS_AS(ExtReal::neg_inf() + ExtReal::pos_inf(), argument_error);
}

TEST_CASE("negation and scaling") {
    CHECK((-ExtReal::pos_inf()).is_neg_inf());
    CHECK((-ExtReal(4.0)).value() == Catch::Approx(-4.0));
    CHECK(ExtReal::neg_inf().scaled(0.5).is_neg_inf());
    CHECK(ExtReal(4.0).scaled(0.25).value() == Catch::Approx(1.0));
    CHECK_THROWS_AS(ExtReal(1.0).scaled(-1.0), argument_error);
}

TEST_CASE("IEEE infinities map onto tags, NaN is rejected") {
    double inf = std::numeric_limits<double>::infinity();
    CHECK(ExtReal(inf).is_pos_inf());
    CHECK(ExtReal(-inf).is_neg_inf());
    CHECK_THROWS_AS(ExtReal(std::numeric_limits<double>::quiet_NaN()),
                    argument_error);
    CHECK_THROWS_AS(ExtReal::pos_inf().value(), argument_error);
    CHECK(ExtReal::pos_inf().as_double() == inf);
}

TEST_CASE("min and max helpers") {
    CHECK(ext_min(ExtReal(1.0), ExtReal::neg_inf()).is_neg_inf());
    CHECK(ext_max(ExtReal(1.0), ExtReal::pos_inf()).is_pos_inf());
    CHECK(ext_min(ExtReal(1.0), ExtReal(2.0)).value() == Catch::Approx(1.0));
}
