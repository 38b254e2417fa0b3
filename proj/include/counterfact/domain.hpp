#pragma once

#include <optional>
#include <string>

#include "counterfact/normal.hpp"

namespace counterfact {

// ---------------------------------------------------------------------------
// Value types shared by every other module. All constructors validate and
// throw ValidationError on violated invariants; instances are immutable
// after construction and safe to share across threads.
// ---------------------------------------------------------------------------

// Recency-test summary: cutoff T, mean duration of recent infection (MDRI),
// false-recent rate (FRR), and their uncertainties as relative standard
// errors. All durations in years.
struct AssayProperties {
    AssayProperties(double cutoff_t_years, double mdri_years, double mdri_rse_,
                    double frr_, double frr_rse_);

    double cutoff_T;   // recency cutoff T
    double mdri;       // Omega_T, mean window in (0, T)
    double mdri_rse;   // sigma_Omega / Omega_T
    double frr;        // beta_T in [0, 1)
    double frr_rse;    // sigma_beta / beta_T

    // Absolute standard deviations; the RSE parameterization avoids unit
    // mistakes, these accessors give the sigmas the variance formulas need.
    double sigma_mdri() const { return mdri_rse * mdri; }
    double sigma_frr() const { return frr_rse * frr; }

    // Eq-denominator guard, positive by construction: Omega_T - beta_T * T.
    double adjusted_window() const { return mdri - frr * cutoff_T; }
};

// One region/subtype row of a population mix.
struct PopulationStratum {
    PopulationStratum(std::string name_, double proportion_, double incidence_,
                      double prevalence_, std::string subtype_,
                      std::optional<AssayProperties> assay_);

    std::string name;
    double proportion;   // fraction of the screened population, (0, 1]
    double incidence;    // lambda0 contribution, events per person-year
    double prevalence;   // p contribution, (0, 1)
    std::string subtype;
    std::optional<AssayProperties> assay;  // absent when no assay data exists
};

// Pooled design inputs for one trial setting. The prevalence at screening
// doubles as the prevalence at -T (the constant-prevalence assumption
// pi = p is hard-coded; there is no separate pi field).
struct DesignContext {
    DesignContext(double lambda0_, double prevalence_p_, double enroll_rate_r_,
                  double followup_tau_, AssayProperties assay_);

    double lambda0;       // counterfactual incidence, per person-year
    double prevalence_p;  // p, in (0, 1)
    double enroll_rate_r; // enrollment probability among HIV-negative, (0, 1]
    double followup_tau;  // active-arm follow-up, years
    AssayProperties assay;

    // Convenience copy with the assay uncertainties zeroed; several
    // asymptotic quantities are defined only for that simplified case.
    DesignContext with_zero_rse() const;
};

// Screening outcome: N total, N+ positive, N_R of those testing recent.
// Fields are real-valued so expected counts (N*p, N*p*P_R, ...) can be fed
// through the estimators for the analytic-identity checks.
struct ScreeningCounts {
    ScreeningCounts(double n_total_, double n_positive_, double n_recent_);

    double n_total;
    double n_positive;
    double n_recent;

    double n_negative() const { return n_total - n_positive; }
};

// Active-arm outcome: enrolled HIV-negative subjects and incident events
// over followup_tau years.
struct TrialCounts {
    TrialCounts(double n_enrolled_, double n_events_, double followup_tau_);

    double n_enrolled;
    double n_events;
    double followup_tau;
};

// Hypotheses for the efficacy test on the incidence ratio R = lambda1/lambda0:
// H0: R = r0 against H1: R = r1, two-sided level alpha, target power beta.
struct HypothesisSpec {
    HypothesisSpec(double r0_, double r1_, double alpha_, double power_beta_);

    double r0;
    double r1;          // strict: 0 < r1 < r0
    double alpha;
    double power_beta;
};

}  // namespace counterfact
