#include "counterfact/domain.hpp"

#include <cmath>
#include <utility>

#include "counterfact/errors.hpp"

namespace counterfact {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw ValidationError(what);
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

AssayProperties::AssayProperties(double cutoff_t_years, double mdri_years,
                                 double mdri_rse_, double frr_, double frr_rse_)
    : cutoff_T(cutoff_t_years),
      mdri(mdri_years),
      mdri_rse(mdri_rse_),
      frr(frr_),
      frr_rse(frr_rse_) {
    require(finite(cutoff_T) && cutoff_T > 0.0, "AssayProperties: cutoff_T must be > 0");
    require(finite(mdri) && mdri > 0.0 && mdri < cutoff_T,
            "AssayProperties: mdri must lie in (0, cutoff_T)");
    require(finite(frr) && frr >= 0.0 && frr < 1.0,
            "AssayProperties: frr must lie in [0, 1)");
    require(finite(mdri_rse) && mdri_rse >= 0.0, "AssayProperties: mdri_rse must be >= 0");
    require(finite(frr_rse) && frr_rse >= 0.0, "AssayProperties: frr_rse must be >= 0");
    require(mdri - frr * cutoff_T > 0.0,
            "AssayProperties: mdri - frr*cutoff_T must be > 0");
}

PopulationStratum::PopulationStratum(std::string name_, double proportion_,
                                     double incidence_, double prevalence_,
                                     std::string subtype_,
                                     std::optional<AssayProperties> assay_)
    : name(std::move(name_)),
      proportion(proportion_),
      incidence(incidence_),
      prevalence(prevalence_),
      subtype(std::move(subtype_)),
      assay(std::move(assay_)) {
    require(!name.empty(), "PopulationStratum: name must not be empty");
    require(finite(proportion) && proportion > 0.0 && proportion <= 1.0,
            "PopulationStratum: proportion must lie in (0, 1]");
    require(finite(incidence) && incidence > 0.0,
            "PopulationStratum: incidence must be > 0");
    require(finite(prevalence) && prevalence > 0.0 && prevalence < 1.0,
            "PopulationStratum: prevalence must lie in (0, 1)");
}

DesignContext::DesignContext(double lambda0_, double prevalence_p_,
                             double enroll_rate_r_, double followup_tau_,
                             AssayProperties assay_)
    : lambda0(lambda0_),
      prevalence_p(prevalence_p_),
      enroll_rate_r(enroll_rate_r_),
      followup_tau(followup_tau_),
      assay(std::move(assay_)) {
    require(finite(lambda0) && lambda0 > 0.0, "DesignContext: lambda0 must be > 0");
    require(finite(prevalence_p) && prevalence_p > 0.0 && prevalence_p < 1.0,
            "DesignContext: prevalence_p must lie in (0, 1)");
    require(finite(enroll_rate_r) && enroll_rate_r > 0.0 && enroll_rate_r <= 1.0,
            "DesignContext: enroll_rate_r must lie in (0, 1]");
    require(finite(followup_tau) && followup_tau > 0.0,
            "DesignContext: followup_tau must be > 0");
}

DesignContext DesignContext::with_zero_rse() const {
    AssayProperties a(assay.cutoff_T, assay.mdri, 0.0, assay.frr, 0.0);
    return DesignContext(lambda0, prevalence_p, enroll_rate_r, followup_tau, a);
}

ScreeningCounts::ScreeningCounts(double n_total_, double n_positive_,
                                 double n_recent_)
    : n_total(n_total_), n_positive(n_positive_), n_recent(n_recent_) {
    require(finite(n_total) && finite(n_positive) && finite(n_recent),
            "ScreeningCounts: counts must be finite");
    require(n_recent >= 0.0 && n_positive >= n_recent && n_total >= n_positive,
            "ScreeningCounts: need 0 <= n_recent <= n_positive <= n_total");
}

TrialCounts::TrialCounts(double n_enrolled_, double n_events_, double followup_tau_)
    : n_enrolled(n_enrolled_), n_events(n_events_), followup_tau(followup_tau_) {
    require(finite(n_enrolled) && n_enrolled >= 1.0,
            "TrialCounts: n_enrolled must be >= 1");
    require(finite(n_events) && n_events >= 0.0, "TrialCounts: n_events must be >= 0");
    require(finite(followup_tau) && followup_tau > 0.0,
            "TrialCounts: followup_tau must be > 0");
}

HypothesisSpec::HypothesisSpec(double r0_, double r1_, double alpha_,
                               double power_beta_)
    : r0(r0_), r1(r1_), alpha(alpha_), power_beta(power_beta_) {
    require(finite(r0) && finite(r1) && r1 > 0.0 && r1 < r0,
            "HypothesisSpec: need 0 < r1 < r0");
    require(finite(alpha) && alpha > 0.0 && alpha < 1.0,
            "HypothesisSpec: alpha must lie in (0, 1)");
    require(finite(power_beta) && power_beta > 0.0 && power_beta < 1.0,
            "HypothesisSpec: power_beta must lie in (0, 1)");
}

}  // namespace counterfact
