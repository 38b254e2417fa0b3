#include "counterfact/estimators.hpp"

#include <cmath>

#include "counterfact/errors.hpp"
#include "counterfact/normal.hpp"

namespace counterfact {

namespace {

void require_counts_usable(const ScreeningCounts& counts) {
    if (counts.n_positive <= 0.0)
        throw DegenerateEstimateError(
            "screening counts degenerate: no HIV-positive subjects");
    if (counts.n_negative() <= 0.0)
        throw DegenerateEstimateError(
            "screening counts degenerate: no HIV-negative subjects");
}

}  // namespace

IncidenceEstimate lambda0_perfect(const ScreeningCounts& counts,
                                  double cutoff_t_years) {
    if (!(cutoff_t_years > 0.0))
        throw ValidationError("recency cutoff must be positive");
    if (counts.n_negative() <= 0.0)
        throw DegenerateEstimateError(
            "screening counts degenerate: no HIV-negative subjects");
    if (counts.n_recent <= 0.0)
        throw DegenerateEstimateError(
            "zero recent count: log-scale estimate undefined");
    const double value = counts.n_recent / (counts.n_negative() * cutoff_t_years);
    return {value, std::nullopt, EstimatorMethod::perfect};
}

IncidenceEstimate lambda0_snapshot(const ScreeningCounts& counts,
                                   const AssayProperties& assay) {
    if (counts.n_negative() <= 0.0)
        throw DegenerateEstimateError(
            "screening counts degenerate: no HIV-negative subjects");
    if (counts.n_recent <= 0.0)
        throw DegenerateEstimateError(
            "zero recent count: log-scale estimate undefined");
    // Same operand grouping as the kassanjee value so the beta_T = 0
    // reduction is an exact floating-point identity, not an approximate one.
    const double value = counts.n_recent / (counts.n_negative() * assay.mdri);
    return {value, std::nullopt, EstimatorMethod::snapshot};
}

IncidenceEstimate lambda0_kassanjee(const ScreeningCounts& counts,
                                    const AssayProperties& assay,
                                    VarianceConvention convention) {
    require_counts_usable(counts);

    const double n = counts.n_total;
    const double n_pos = counts.n_positive;
    const double n_rec = counts.n_recent;
    const double n_neg = counts.n_negative();

    // adj = N_R - beta_T N_+, the recents in excess of expected false recents.
    const double adj = n_rec - assay.frr * n_pos;
    if (adj <= 0.0)
        throw DegenerateEstimateError(
            "nonpositive adjusted recent count: recents do not exceed "
            "expected false recents");

    const double window = assay.adjusted_window();  // Omega_T - beta_T T
    const double value = adj / (n_neg * window);

    // Delta-method variance of log lambda0, term by term:
    //   recency binomial:  N_R (N_+ - N_R) / (N_+ adj^2)
    //   prevalence:        N / (N_+ N_-)
    //   FRR x counts:      sigma_beta^2 N_+ (N - N_+) / (N adj^2)
    //   MDRI:              sigma_Omega^2 / window^2
    //   FRR x window:      sigma_beta^2 ((N_+ Omega_T - N_R T) / (adj window))^2
    const double s_beta = assay.sigma_frr();
    const double s_omega = assay.sigma_mdri();
    double v0 = n_rec * (n_pos - n_rec) / (n_pos * adj * adj)
              + n / (n_pos * n_neg)
              + s_omega * s_omega / (window * window);
    const double cross = (n_pos * assay.mdri - n_rec * assay.cutoff_T) / (adj * window);
    v0 += s_beta * s_beta * cross * cross;
    if (convention == VarianceConvention::full)
        v0 += s_beta * s_beta * n_pos * (n - n_pos) / (n * adj * adj);

    return {value, v0, EstimatorMethod::kassanjee};
}

IncidenceEstimate lambda1_active_arm(const TrialCounts& trial) {
    if (trial.n_events <= 0.0)
        throw DegenerateEstimateError(
            "zero trial events: log-scale inference undefined");
    const double value = trial.n_events / (trial.followup_tau * trial.n_enrolled);
    return {value, 1.0 / trial.n_events, EstimatorMethod::active_arm};
}

EfficacyResult efficacy_test(const IncidenceEstimate& control,
                             const IncidenceEstimate& active,
                             const HypothesisSpec& hyp, double confidence) {
    if (!(control.value > 0.0) || !(active.value > 0.0))
        throw ValidationError("efficacy test needs positive incidence estimates");
    if (!control.log_variance || !active.log_variance ||
        !std::isfinite(*control.log_variance) || !std::isfinite(*active.log_variance))
        throw ValidationError(
            "efficacy test needs estimates carrying a finite log-variance");
    if (!(confidence > 0.0 && confidence < 1.0))
        throw ValidationError("confidence level must lie in (0, 1)");

    const double v = *control.log_variance + *active.log_variance;
    if (v <= 0.0)
        throw DegenerateEstimateError(
            "degenerate variance: V0 + V1 is zero, Z undefined");

    const double ratio = active.value / control.value;
    const double sd = std::sqrt(v);
    const double z = (std::log(ratio) - std::log(hyp.r0)) / sd;
    const double z_crit = standard_normal_quantile(1.0 - hyp.alpha / 2.0);
    const double z_conf = standard_normal_quantile((1.0 + confidence) / 2.0);

    // rho = 1 - R is decreasing in R, so the upper rho endpoint comes from
    // the lower R endpoint and vice versa.
    const std::pair<double, double> ci{1.0 - ratio * std::exp(z_conf * sd),
                                       1.0 - ratio * std::exp(-z_conf * sd)};

    return {ratio, 1.0 - ratio, v,    ci,
            z,     std::fabs(z) > z_crit, confidence};
}

}  // namespace counterfact
