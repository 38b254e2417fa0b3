#pragma once

#include <vector>

#include "counterfact/domain.hpp"

namespace counterfact {

// ---------------------------------------------------------------------------
// Collapses a multi-stratum population mix into the single DesignContext
// the analytic machinery works on.
// ---------------------------------------------------------------------------

// Proportion-weighted pooling:
//   lambda0 and p average over all strata;
//   MDRI, MDRI RSE and FRR average over only the strata that carry assay
//   properties, with those weights renormalized (strata lacking assay
//   data still shape incidence and prevalence, just not the assay);
//   the FRR RSE is a single population-level knob passed in directly.
// No intermediate rounding anywhere; downstream goldens are sensitive to
// the fourth decimal of the pooled prevalence.
DesignContext pool_strata(const std::vector<PopulationStratum>& strata,
                          double enroll_rate, double followup_tau,
                          double frr_rse_default, double cutoff_t_years);

}  // namespace counterfact
