#pragma once

#include <istream>
#include <string>
#include <vector>

#include "counterfact/domain.hpp"
#include "counterfact/estimators.hpp"

namespace counterfact {

// ---------------------------------------------------------------------------
// Study configuration files.
//
// Line-oriented format, '#' starts a comment anywhere:
//
//   cutoff_T_years     = 2        # scalar globals, key = value
//   frr_rse_pct        = 25
//   enroll_rate        = 0.85
//   followup_tau_years = 1
//   alpha              = 0.05
//   power              = 0.9
//   r0                 = 0.5
//   r1                 = 0.15
//   legacy_inctools_variance = false   # optional
//
//   [strata]                      # then one header row and data rows
//   name proportion incidence_pct prevalence_pct subtype mdri_days mdri_rse_pct frr_pct
//   site_a 0.5 5.9 15 B 142 10 1.5
//   site_b 0.5 5.2 15 AE NA NA NA
//
// Columns suffixed _pct hold percentages and are converted to fractions
// at parse time; mdri_days converts to years; everything downstream works
// in fractions and years. The three assay columns are all present or all
// NA per row. Parse failures raise ValidationError with file:line context.
// ---------------------------------------------------------------------------

constexpr double days_per_year = 365.25;

struct StudyConfig {
    double cutoff_t_years;
    double frr_rse;      // fraction, applies to the pooled FRR
    double enroll_rate;
    double followup_tau;
    double alpha;
    double power;
    double r0;
    double r1;
    VarianceConvention convention = VarianceConvention::full;
    std::vector<PopulationStratum> strata;

    // Pooled context at the config's own follow-up.
    DesignContext make_context() const;
    // Same pooling with the follow-up overridden (design tables sweep tau).
    DesignContext make_context(double followup_tau_years) const;
    HypothesisSpec make_hypothesis() const;
};

StudyConfig parse_study_config(std::istream& in, const std::string& source_name);
StudyConfig load_study_config(const std::string& path);

}  // namespace counterfact
