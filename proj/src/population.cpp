#include "counterfact/population.hpp"

#include <cmath>
#include <string>

#include "counterfact/errors.hpp"

namespace counterfact {

DesignContext pool_strata(const std::vector<PopulationStratum>& strata,
                          double enroll_rate, double followup_tau,
                          double frr_rse_default, double cutoff_t_years) {
    if (strata.empty()) throw ValidationError("no population strata given");

    double weight_sum = 0.0;
    double lambda0 = 0.0;
    double prevalence = 0.0;
    double assay_weight = 0.0;
    double mdri = 0.0;
    double mdri_rse = 0.0;
    double frr = 0.0;

    for (const PopulationStratum& s : strata) {
        weight_sum += s.proportion;
        lambda0 += s.proportion * s.incidence;
        prevalence += s.proportion * s.prevalence;
        if (s.assay) {
            assay_weight += s.proportion;
            mdri += s.proportion * s.assay->mdri;
            mdri_rse += s.proportion * s.assay->mdri_rse;
            frr += s.proportion * s.assay->frr;
        }
    }

    if (std::fabs(weight_sum - 1.0) > 1e-9)
        throw ValidationError("stratum proportions sum to " +
                              std::to_string(weight_sum) + ", expected 1");
    if (assay_weight <= 0.0)
        throw ValidationError("no stratum carries assay properties; pooled "
                              "MDRI/FRR undefined");

    return DesignContext(
        lambda0, prevalence, enroll_rate, followup_tau,
        AssayProperties(cutoff_t_years, mdri / assay_weight,
                        mdri_rse / assay_weight, frr / assay_weight,
                        frr_rse_default));
}

}  // namespace counterfact
