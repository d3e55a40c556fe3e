#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "mwradar/special.hpp"
#include "support/marcum_oracle.hpp"

using namespace mwradar;

TEST_CASE("chi2 survival with 2 dof") {
    CHECK(chi2_survival_2dof(0.0) == 1.0);
    // x = -2 ln(1e-4) maps back to 1e-4 by construction
    CHECK_THAT(chi2_survival_2dof(18.420680743952367),
               Catch::Matchers::WithinRel(1e-4, 1e-12));
    // median of chi^2_2 at 2 ln 2
    CHECK_THAT(chi2_survival_2dof(2.0 * std::log(2.0)), Catch::Matchers::WithinAbs(0.5, 1e-15));

    CHECK_THROWS_AS(chi2_survival_2dof(-0.1), std::domain_error);
    CHECK_THROWS_AS(chi2_survival_2dof(std::nan("")), std::domain_error);
    CHECK_THROWS_AS(chi2_survival_2dof(std::numeric_limits<double>::infinity()),
                    std::domain_error);
}

TEST_CASE("threshold from pfa") {
    CHECK_THAT(threshold_from_pfa(1e-4),
               Catch::Matchers::WithinRel(18.420680743952367, 1e-14));
    CHECK_THAT(threshold_from_pfa(std::exp(-1.0)), Catch::Matchers::WithinRel(2.0, 1e-14));
    // no-rejection limit
    CHECK(threshold_from_pfa(1.0 - 1e-12) < 1e-10);

    CHECK_THROWS_AS(threshold_from_pfa(0.0), std::domain_error);
    CHECK_THROWS_AS(threshold_from_pfa(1.0), std::domain_error);
    CHECK_THROWS_AS(threshold_from_pfa(1.5), std::domain_error);
    CHECK_THROWS_AS(threshold_from_pfa(-0.2), std::domain_error);
}

TEST_CASE("threshold/survival round trip") {
    for (double p : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8}) {
        CHECK(std::abs(chi2_survival_2dof(threshold_from_pfa(p)) - p) < 1e-12);
    }
}

TEST_CASE("marcum q1 closed-form edges") {
    // a = 0: central chi-squared reduction
    for (double b : {0.5, 1.0, 3.0, 10.0}) {
        CHECK_THAT(marcum_q1(0.0, b), Catch::Matchers::WithinRel(std::exp(-0.5 * b * b), 1e-13));
    }
    // b = 0: full support
    for (double a : {0.0, 1.0, 7.0, 33.0}) CHECK(marcum_q1(a, 0.0) == 1.0);

    CHECK_THROWS_AS(marcum_q1(-1.0, 2.0), std::domain_error);
    CHECK_THROWS_AS(marcum_q1(2.0, -1.0), std::domain_error);
    CHECK_THROWS_AS(marcum_q1(std::nan(""), 1.0), std::domain_error);
}

TEST_CASE("marcum q1 frozen oracle values") {
    // computed to 1e-12+ with the independent quadrature oracle before the
    // production series was written
    CHECK_THAT(marcum_q1(2.0, 2.0), Catch::Matchers::WithinAbs(0.60350096061199335, 1e-12));
    const double r = std::sqrt(18.4207);
    CHECK_THAT(marcum_q1(r, r), Catch::Matchers::WithinAbs(0.54680141779374301, 1e-12));
}

TEST_CASE("marcum q1 against the quadrature oracle") {
    // coarse sub-grid here; the acceptance suite runs the full 20x20 grid
    for (int i = 0; i < 9; ++i) {
        for (int j = 0; j < 9; ++j) {
            const double a = 40.0 * i / 8.0;
            const double b = 40.0 * j / 8.0;
            const double got = marcum_q1(a, b);
            const double want = testsupport::marcum_q1_quadrature(a, b);
            CHECK(std::abs(got - want) <= 1e-10);
        }
    }
}

TEST_CASE("marcum q1 monotonicity") {
    // strictly increasing in a, strictly decreasing in b (up to roundoff)
    std::mt19937 gen(20240517);
    std::uniform_real_distribution<double> u(0.0, 25.0);
    const double delta = 1e-3;
    for (int i = 0; i < 1000; ++i) {
        const double a = u(gen);
        const double b = u(gen);
        const double q = marcum_q1(a, b);
        CHECK(marcum_q1(a + delta, b) >= q - 1e-12);
        CHECK(marcum_q1(a, b + delta) <= q + 1e-12);
    }
}
