#pragma once

#include "counterfact/asymptotics.hpp"
#include "counterfact/domain.hpp"

namespace counterfact {

// ---------------------------------------------------------------------------
// Planning half of the toolkit: how many subjects to screen so the
// log-scale efficacy test reaches target power, and what that screening
// effort is expected to yield.
// ---------------------------------------------------------------------------

// One design row. Expected counts obey the exact identities
//   E(N+) = N p,  E(N_R) = N p P_R,  E(N_enroll) = N (1-p) r,
//   E(N_event) = tau lambda1 E(N_enroll)   with lambda1 = r1 lambda0.
struct DesignReport {
    double n_screened;
    double expected_n_positive;
    double expected_n_recent;
    double expected_n_enrolled;
    double expected_n_events;
    bool feasible;
    double v_r1;        // var(Z) under the alternative
    double z_mean_h1;   // E(Z) under the alternative at this N
};

// Smallest integer N whose expected Z-mean clears the power target:
//   N = (gamma00 + gamma1) / ( (delta / (z_{1-a/2} + sqrt(V_R1) z_beta))^2
//                              - gamma01 ),  delta = log r1 - log r0,
// rounded up. Throws InfeasibleDesignError (carrying the detectability
// boundary for log r1) when the denominator is nonpositive: assay
// uncertainty alone then exceeds the detectable effect at any N.
DesignReport sample_size(const DesignContext& ctx, const HypothesisSpec& hyp);

// Report for an externally chosen N (e.g. a budget), same count identities.
DesignReport design_report_at(const DesignContext& ctx,
                              const HypothesisSpec& hyp, double n_screened);

// Boundary value of log r1: alternatives with log r1 at or above it admit
// no sample size with the requested power, because the variance floor
// gamma01 survives N -> infinity. Equals
//   log r0 - sqrt(gamma01) (z_{1-a/2} + sqrt(V_R1(r1)) z_beta),
// evaluated at the queried r1 (V_R1 itself depends on it).
double detectability_floor(const DesignContext& ctx, const HypothesisSpec& hyp);

// Power of the two-sided level-alpha test at screening size n, one-tail
// normal approximation:
//   Phi( (|delta| / sqrt(V0 + V1) - z_{1-a/2}) / sqrt(V_R1) ).
double power_at_n(const DesignContext& ctx, const HypothesisSpec& hyp,
                  double n_screened);

}  // namespace counterfact
