#pragma once

#include <optional>
#include <utility>

#include "counterfact/domain.hpp"

namespace counterfact {

// ---------------------------------------------------------------------------
// Point estimators for the two incidence rates and the efficacy contrast.
//
// lambda0 comes from cross-sectional screening counts (three variants of
// increasing realism), lambda1 from active-arm follow-up. The efficacy
// test combines one of each on the log scale.
// ---------------------------------------------------------------------------

enum class EstimatorMethod { perfect, snapshot, kassanjee, active_arm };

// Which terms enter the kassanjee log-variance. `full` keeps the complete
// five-term estimator; `legacy_inctools` drops the FRR-variance count term
// for cross-validation against older software that neglects it.
enum class VarianceConvention { full, legacy_inctools };

// A positive rate plus, when the method provides one, the delta-method
// variance of its logarithm.
struct IncidenceEstimate {
    double value;                         // events per person-year
    std::optional<double> log_variance;   // var of log(value), >= 0
    EstimatorMethod method;
};

// Efficacy test output: ratio scale, reduction scale, and the log-scale
// Z-statistic with its confidence interval for rho = 1 - R.
struct EfficacyResult {
    double ratio_hat;                     // R = lambda1 / lambda0
    double rho_hat;                       // 1 - R
    double log_ratio_variance;            // V0 + V1
    std::pair<double, double> ci_rho;     // interval for rho at `confidence`
    double z_value;                       // (log R - log r0) / sqrt(V0 + V1)
    bool reject_h0;                       // |Z| > z_{1 - alpha/2}
    double confidence;
};

// lambda0 = N_R / (N_- * T): every infection in the last T years tests
// recent, none older does. No variance attached; the method exists as the
// idealized baseline the other two reduce to.
IncidenceEstimate lambda0_perfect(const ScreeningCounts& counts,
                                  double cutoff_t_years);

// lambda0 = N_R / (Omega_T * N_-): FRR-free recency estimator. No variance
// attached.
IncidenceEstimate lambda0_snapshot(const ScreeningCounts& counts,
                                   const AssayProperties& assay);

// lambda0 = (N_R - beta_T N_+) / (N_- (Omega_T - beta_T T)) with the full
// delta-method log-variance. `assay` carries the point estimates and RSEs
// of MDRI and FRR used for both the adjustment and the variance.
IncidenceEstimate lambda0_kassanjee(
    const ScreeningCounts& counts, const AssayProperties& assay,
    VarianceConvention convention = VarianceConvention::full);

// lambda1 = N_event / (tau * N_enroll), log-variance 1 / N_event.
IncidenceEstimate lambda1_active_arm(const TrialCounts& trial);

// Z = (log(lambda1/lambda0) - log r0) / sqrt(V0 + V1), rejected two-sided
// at level hyp.alpha; rho CI from exponentiating the symmetric log-scale
// interval at `confidence`.
EfficacyResult efficacy_test(const IncidenceEstimate& control,
                             const IncidenceEstimate& active,
                             const HypothesisSpec& hyp,
                             double confidence = 0.95);

}  // namespace counterfact
