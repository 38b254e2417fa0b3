#include "counterfact/design.hpp"

#include <cmath>
#include <string>

#include "counterfact/errors.hpp"
#include "counterfact/normal.hpp"

namespace counterfact {

namespace {

struct DesignPieces {
    GammaComponents gamma;
    double vr1;
    double delta;       // log r1 - log r0, negative
    double z_crit;      // z_{1 - alpha/2}
    double z_power;     // z_beta
};

DesignPieces pieces_for(const DesignContext& ctx, const HypothesisSpec& hyp) {
    const double lambda1 = ctx.lambda0 * hyp.r1;
    return {gamma_components(ctx, lambda1), v_r1(ctx, hyp),
            std::log(hyp.r1) - std::log(hyp.r0),
            standard_normal_quantile(1.0 - hyp.alpha / 2.0),
            standard_normal_quantile(hyp.power_beta)};
}

}  // namespace

DesignReport design_report_at(const DesignContext& ctx,
                              const HypothesisSpec& hyp, double n_screened) {
    if (!(n_screened >= 1.0))
        throw ValidationError("screening size must be at least 1");
    const double p = ctx.prevalence_p;
    const double pr = p_recent(ctx);
    const double lambda1 = ctx.lambda0 * hyp.r1;
    const double enrolled = n_screened * (1.0 - p) * ctx.enroll_rate_r;
    return {n_screened,
            n_screened * p,
            n_screened * p * pr,
            enrolled,
            ctx.followup_tau * lambda1 * enrolled,
            true,
            v_r1(ctx, hyp),
            expected_z_mean(ctx, hyp, n_screened)};
}

DesignReport sample_size(const DesignContext& ctx, const HypothesisSpec& hyp) {
    const DesignPieces k = pieces_for(ctx, hyp);
    const double spread = k.z_crit + std::sqrt(k.vr1) * k.z_power;
    const double ratio = k.delta / spread;
    const double denominator = ratio * ratio - k.gamma.gamma01;
    if (denominator <= 0.0) {
        const double floor_log_r1 =
            std::log(hyp.r0) - std::sqrt(k.gamma.gamma01) * spread;
        throw InfeasibleDesignError(
            "no screening size reaches the requested power: the assay "
            "uncertainty floor exceeds the target effect (log r1 = " +
                std::to_string(std::log(hyp.r1)) +
                " is not below the detectability boundary " +
                std::to_string(floor_log_r1) + ")",
            floor_log_r1);
    }
    const double n_real = (k.gamma.gamma00 + k.gamma.gamma1) / denominator;
    const double n = std::ceil(n_real);
    DesignReport report = design_report_at(ctx, hyp, n);
    report.feasible = true;
    return report;
}

double detectability_floor(const DesignContext& ctx, const HypothesisSpec& hyp) {
    const DesignPieces k = pieces_for(ctx, hyp);
    const double spread = k.z_crit + std::sqrt(k.vr1) * k.z_power;
    return std::log(hyp.r0) - std::sqrt(k.gamma.gamma01) * spread;
}

double power_at_n(const DesignContext& ctx, const HypothesisSpec& hyp,
                  double n_screened) {
    if (!(n_screened >= 1.0))
        throw ValidationError("screening size must be at least 1");
    const DesignPieces k = pieces_for(ctx, hyp);
    const double v = k.gamma.gamma00 / n_screened + k.gamma.gamma01 +
                     k.gamma.gamma1 / n_screened;
    const double shifted =
        (std::fabs(k.delta) / std::sqrt(v) - k.z_crit) / std::sqrt(k.vr1);
    return normal_cdf(shifted);
}

}  // namespace counterfact
