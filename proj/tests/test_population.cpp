#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "counterfact/config.hpp"
#include "counterfact/domain.hpp"
#include "counterfact/errors.hpp"
#include "counterfact/population.hpp"

using namespace counterfact;

namespace {

std::string config_path(const char* name) {
    return std::string(COUNTERFACT_CONFIG_DIR) + "/" + name;
}

std::vector<PopulationStratum> msm_strata() {
    return load_study_config(config_path("msm.cfg")).strata;
}

}  // namespace

TEST_CASE("pooled nine-stratum mix matches the independent goldens") {
    const DesignContext ctx = pool_strata(msm_strata(), 0.85, 1.0, 0.25, 2.0);
    CHECK(ctx.lambda0 == doctest::Approx(0.0436793207).epsilon(1e-9));
    CHECK(ctx.prevalence_p == doctest::Approx(0.1532967033).epsilon(1e-9));
    CHECK(ctx.assay.mdri ==
          doctest::Approx(141.0514970 / days_per_year).epsilon(1e-9));
    CHECK(ctx.assay.mdri_rse == doctest::Approx(0.09881437).epsilon(1e-7));
    CHECK(ctx.assay.frr == doctest::Approx(0.014802395).epsilon(1e-7));
    CHECK(ctx.assay.frr_rse == 0.25);
    CHECK(ctx.assay.cutoff_T == 2.0);
    CHECK(ctx.enroll_rate_r == 0.85);
    CHECK(ctx.followup_tau == 1.0);
}

TEST_CASE("full-precision prevalence matters downstream") {
    // At N = 2000 the expected positive count is 2000 p = 306.59; pooling
    // that rounds p to 0.15 would predict 300 and miss by more than six
    // subjects. Guards against any intermediate rounding creeping in.
    const DesignContext ctx = pool_strata(msm_strata(), 0.85, 1.0, 0.25, 2.0);
    CHECK(std::fabs(2000.0 * ctx.prevalence_p - 306.59) < 0.01);
    CHECK(std::fabs(2000.0 * 0.15 - 306.59) > 6.0);
}

TEST_CASE("single stratum pools to itself") {
    const AssayProperties assay(2.0, 119.0 / days_per_year, 0.086, 0.0146, 0.0);
    const std::vector<PopulationStratum> one = {
        PopulationStratum("women", 1.0, 0.035, 0.25, "C", assay)};
    const DesignContext ctx = pool_strata(one, 0.85, 1.0, 0.25, 2.0);
    CHECK(ctx.lambda0 == doctest::Approx(0.035).epsilon(1e-15));
    CHECK(ctx.prevalence_p == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(ctx.assay.mdri == doctest::Approx(assay.mdri).epsilon(1e-15));
    CHECK(ctx.assay.mdri_rse == doctest::Approx(0.086).epsilon(1e-15));
    CHECK(ctx.assay.frr == doctest::Approx(0.0146).epsilon(1e-15));
    // The population-level FRR RSE wins over the per-stratum one.
    CHECK(ctx.assay.frr_rse == 0.25);
}

TEST_CASE("two identical strata pool to the common value") {
    const AssayProperties assay(2.0, 0.38, 0.1, 0.015, 0.0);
    const std::vector<PopulationStratum> pair = {
        PopulationStratum("a", 0.5, 0.05, 0.2, "B", assay),
        PopulationStratum("b", 0.5, 0.05, 0.2, "B", assay)};
    const DesignContext ctx = pool_strata(pair, 0.9, 1.0, 0.3, 2.0);
    CHECK(ctx.lambda0 == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(ctx.prevalence_p == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(ctx.assay.mdri == doctest::Approx(0.38).epsilon(1e-15));
}

TEST_CASE("pooling is invariant to stratum order") {
    std::vector<PopulationStratum> strata = msm_strata();
    const DesignContext base = pool_strata(strata, 0.85, 1.0, 0.25, 2.0);

    std::vector<PopulationStratum> reversed(strata.rbegin(), strata.rend());
    const DesignContext rev = pool_strata(reversed, 0.85, 1.0, 0.25, 2.0);
    CHECK(rev.lambda0 == doctest::Approx(base.lambda0).epsilon(1e-13));
    CHECK(rev.prevalence_p == doctest::Approx(base.prevalence_p).epsilon(1e-13));
    CHECK(rev.assay.mdri == doctest::Approx(base.assay.mdri).epsilon(1e-13));
    CHECK(rev.assay.frr == doctest::Approx(base.assay.frr).epsilon(1e-13));

    std::vector<PopulationStratum> rotated(strata.begin() + 4, strata.end());
    rotated.insert(rotated.end(), strata.begin(), strata.begin() + 4);
    const DesignContext rot = pool_strata(rotated, 0.85, 1.0, 0.25, 2.0);
    CHECK(rot.lambda0 == doctest::Approx(base.lambda0).epsilon(1e-13));
    CHECK(rot.prevalence_p == doctest::Approx(base.prevalence_p).epsilon(1e-13));
}

TEST_CASE("pooled values are convex combinations of the inputs") {
    const std::vector<PopulationStratum> strata = msm_strata();
    const DesignContext ctx = pool_strata(strata, 0.85, 1.0, 0.25, 2.0);

    double lo_inc = 1.0, hi_inc = 0.0, lo_prev = 1.0, hi_prev = 0.0;
    double lo_mdri = 10.0, hi_mdri = 0.0;
    for (const auto& s : strata) {
        lo_inc = std::min(lo_inc, s.incidence);
        hi_inc = std::max(hi_inc, s.incidence);
        lo_prev = std::min(lo_prev, s.prevalence);
        hi_prev = std::max(hi_prev, s.prevalence);
        if (s.assay) {
            lo_mdri = std::min(lo_mdri, s.assay->mdri);
            hi_mdri = std::max(hi_mdri, s.assay->mdri);
        }
    }
    CHECK(ctx.lambda0 >= lo_inc);
    CHECK(ctx.lambda0 <= hi_inc);
    CHECK(ctx.prevalence_p >= lo_prev);
    CHECK(ctx.prevalence_p <= hi_prev);
    CHECK(ctx.assay.mdri >= lo_mdri);
    CHECK(ctx.assay.mdri <= hi_mdri);
}

TEST_CASE("assay pooling renormalizes over assay-bearing strata only") {
    // 60% of the population carries assay A, 20% assay B, 20% nothing; the
    // pooled MDRI weights A and B as 3:1, ignoring the bare stratum.
    const AssayProperties a(2.0, 0.40, 0.10, 0.016, 0.0);
    const AssayProperties b(2.0, 0.32, 0.06, 0.008, 0.0);
    const std::vector<PopulationStratum> strata = {
        PopulationStratum("with_a", 0.6, 0.05, 0.2, "B", a),
        PopulationStratum("with_b", 0.2, 0.04, 0.18, "C", b),
        PopulationStratum("bare", 0.2, 0.06, 0.22, "AE", std::nullopt)};
    const DesignContext ctx = pool_strata(strata, 0.85, 1.0, 0.25, 2.0);

    CHECK(ctx.assay.mdri ==
          doctest::Approx((0.6 * 0.40 + 0.2 * 0.32) / 0.8).epsilon(1e-14));
    CHECK(ctx.assay.mdri_rse ==
          doctest::Approx((0.6 * 0.10 + 0.2 * 0.06) / 0.8).epsilon(1e-14));
    CHECK(ctx.assay.frr ==
          doctest::Approx((0.6 * 0.016 + 0.2 * 0.008) / 0.8).epsilon(1e-14));
    // Incidence and prevalence still average over everything.
    CHECK(ctx.lambda0 ==
          doctest::Approx(0.6 * 0.05 + 0.2 * 0.04 + 0.2 * 0.06).epsilon(1e-14));
    CHECK(ctx.prevalence_p ==
          doctest::Approx(0.6 * 0.2 + 0.2 * 0.18 + 0.2 * 0.22).epsilon(1e-14));
}

TEST_CASE("validation failures") {
    const AssayProperties assay(2.0, 0.38, 0.1, 0.015, 0.0);
    CHECK_THROWS_AS((void)pool_strata({}, 0.85, 1.0, 0.25, 2.0), ValidationError);

    // Proportions that do not reach 1.
    const std::vector<PopulationStratum> short_sum = {
        PopulationStratum("a", 0.5, 0.05, 0.2, "B", assay),
        PopulationStratum("b", 0.4, 0.05, 0.2, "B", assay)};
    CHECK_THROWS_AS((void)pool_strata(short_sum, 0.85, 1.0, 0.25, 2.0),
                    ValidationError);
    try {
        (void)pool_strata(short_sum, 0.85, 1.0, 0.25, 2.0);
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("proportions sum") != std::string::npos);
        CHECK(msg.find("0.9") != std::string::npos);
    }

    // No stratum with assay data.
    const std::vector<PopulationStratum> bare = {
        PopulationStratum("a", 0.5, 0.05, 0.2, "B", std::nullopt),
        PopulationStratum("b", 0.5, 0.05, 0.2, "C", std::nullopt)};
    CHECK_THROWS_AS((void)pool_strata(bare, 0.85, 1.0, 0.25, 2.0),
                    ValidationError);

    // A hair inside the tolerance is accepted.
    const std::vector<PopulationStratum> near = {
        PopulationStratum("a", 0.5, 0.05, 0.2, "B", assay),
        PopulationStratum("b", 0.5 + 5e-10, 0.05, 0.2, "B", assay)};
    CHECK_NOTHROW((void)pool_strata(near, 0.85, 1.0, 0.25, 2.0));
}
