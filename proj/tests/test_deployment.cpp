#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "risidd/deployment.hpp"

using namespace risidd;

namespace {

SisoScenario paper_noise_scenario() {
    SisoScenario sc;
    sc.sigma_v2 = dbm_to_linear(-95.0);
    sc.sigma_n2 = dbm_to_linear(-95.0);
    return sc;
}

}  // namespace

TEST_CASE("passive SNR is symmetric and endpoint-dominated", "[deployment]") {
    const SisoScenario sc = paper_noise_scenario();

    SECTION("exact mirror symmetry") {
        for (double d = 1.0; d <= 199.0; d += 7.0)
            CHECK(passive_snr(d, sc) == passive_snr(sc.L - d, sc));
    }

    SECTION("endpoints beat the whole interior third") {
        const double edge = std::min(passive_snr(1.0, sc), passive_snr(399.0, sc));
        double interior_max = 0.0;
        for (double d = 133.0; d <= 267.0; d += 1.0)
            interior_max = std::max(interior_max, passive_snr(d, sc));
        CHECK(edge > interior_max);
    }

    SECTION("no surface leaves only the direct term") {
        SisoScenario bare = sc;
        bare.N = 0;
        const double expect = path_gain_strong(bare.L) * bare.sigma_x2 / bare.sigma_n2;
        CHECK(passive_snr(123.0, bare) == Catch::Approx(expect).epsilon(1e-14));
    }

    SECTION("domain is clamped to the span") {
        CHECK_THROWS_AS(passive_snr(0.5, sc), std::domain_error);
        CHECK_THROWS_AS(passive_snr(399.5, sc), std::domain_error);
    }
}

TEST_CASE("optimal passive placement is the feasible endpoints", "[deployment]") {
    const SisoScenario sc = paper_noise_scenario();
    const auto best = passive_optimal_d(sc);
    CHECK(best[0] == 1.0);
    CHECK(best[1] == 399.0);
    CHECK(best[0] + best[1] == Catch::Approx(sc.L).epsilon(1e-15));  // symmetric about L/2

    // grid search at 1 m steps agrees
    double best_snr = 0.0;
    std::vector<double> argmax;
    for (double d = 1.0; d <= 399.0; d += 1.0) {
        const double s = passive_snr(d, sc);
        if (s > best_snr) {
            best_snr = s;
            argmax = {d};
        } else if (s == best_snr) {
            argmax.push_back(d);
        }
    }
    REQUIRE(argmax.size() == 2);
    CHECK(argmax[0] == best[0]);
    CHECK(argmax[1] == best[1]);

    // the midpoint is strictly the worst point of the three
    CHECK(passive_snr(200.0, sc) < passive_snr(1.0, sc));
    CHECK(passive_snr(200.0, sc) < passive_snr(399.0, sc));
}

TEST_CASE("active SNR favors the AP side and honors its limit", "[deployment]") {
    const SisoScenario sc = paper_noise_scenario();

    SECTION("near-AP placement beats midspan and far side") {
        CHECK(active_snr(1.0, sc) > active_snr(200.0, sc));
        CHECK(active_snr(1.0, sc) > active_snr(399.0, sc));
    }

    SECTION("strictly decreasing over the first half of the span") {
        double prev = active_snr(1.0, sc);
        for (double d = 2.0; d <= 200.0; d += 1.0) {
            const double cur = active_snr(d, sc);
            CHECK(cur < prev);
            prev = cur;
        }
    }

    SECTION("matched gains and noise floors hit the limit at every forward gain") {
        // with equal reflected/direct gains and equal noise floors the
        // numerator and denominator share a common factor, so the ratio
        // equals the limit identically, not just asymptotically
        const double ah = path_gain_strong(sc.L);
        const double limit = active_near_user_limit(ah, sc);
        for (double af : {1e-6, 1.0, 1e6, 1e12})
            CHECK(std::abs(active_snr_terms(ah, ah, af, sc) - limit) <= 1e-12 * limit);
    }

    SECTION("approach to the closed-form limit is monotone") {
        // distinct noise floors break the exact cancellation, leaving a
        // gap that shrinks like 1/af; sweep where it is still well above
        // double-precision rounding
        SisoScenario asym = sc;
        asym.sigma_n2 = dbm_to_linear(-100.0);
        const double ah = path_gain_strong(asym.L);
        const double limit = active_near_user_limit(ah, asym);
        double af = 1e-6;
        double prev_gap = std::abs(active_snr_terms(ah, ah, af, asym) - limit);
        for (int step = 0; step < 5; ++step) {
            af *= 10.0;
            const double gap = std::abs(active_snr_terms(ah, ah, af, asym) - limit);
            CHECK(gap < prev_gap);
            prev_gap = gap;
        }
        CHECK(std::abs(active_snr_terms(ah, ah, 1e12, asym) - limit) <= 1e-6 * limit);
    }

    SECTION("vanishing surface noise keeps the expression finite and positive") {
        SisoScenario quiet = sc;
        quiet.sigma_v2 = 0.0;
        const double s = active_snr(123.0, quiet);
        CHECK(std::isfinite(s));
        CHECK(s > 0.0);
    }
}

TEST_CASE("deployment curves report points and monotone segments", "[deployment]") {
    const SisoScenario sc = paper_noise_scenario();

    SECTION("single-point grid") {
        const DeploymentCurve c = deployment_curve(RisMode::passive, sc, {77.0});
        REQUIRE(c.points.size() == 1);
        CHECK(c.points[0].d == 77.0);
        CHECK(c.points[0].snr == passive_snr(77.0, sc));
        CHECK(c.segments.empty());
    }

    SECTION("passive curve is valley-shaped: one fall, one rise") {
        std::vector<double> grid;
        for (double d = 1.0; d <= 399.0; d += 1.0) grid.push_back(d);
        const DeploymentCurve c = deployment_curve(RisMode::passive, sc, grid);
        REQUIRE(c.segments.size() == 2);
        CHECK(c.segments[0].direction == -1);
        CHECK(c.segments[0].first == 0);
        CHECK(c.segments[1].direction == +1);
        CHECK(c.segments[1].last == grid.size() - 1);

        // curve symmetry under d <-> L-d
        for (std::size_t i = 0; i < grid.size(); ++i)
            CHECK(c.points[i].snr == c.points[grid.size() - 1 - i].snr);
    }

    SECTION("active curve starts with a long descent") {
        std::vector<double> grid;
        for (double d = 1.0; d <= 399.0; d += 1.0) grid.push_back(d);
        const DeploymentCurve c = deployment_curve(RisMode::active, sc, grid);
        REQUIRE_FALSE(c.segments.empty());
        CHECK(c.segments[0].direction == -1);
        CHECK(c.segments[0].first == 0);
        CHECK(c.segments[0].last >= 199);  // covers at least [1, 200]
        CHECK(c.points.front().snr > c.points.back().snr);
    }
}

TEST_CASE("scenario validation guards the model domain", "[deployment]") {
    SisoScenario sc = paper_noise_scenario();
    CHECK_NOTHROW(sc.validate());

    SECTION("span too short") {
        sc.L = 1.5;
        CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
    }
    SECTION("non-positive powers") {
        sc.sigma_n2 = 0.0;
        CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
    }
    SECTION("power fraction out of range") {
        sc.p_ris_fraction = 1.0;
        CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
    }
}
