#pragma once

#include <array>

#include "counterfact/domain.hpp"

namespace counterfact {

// ---------------------------------------------------------------------------
// Design-time (analytic) variance machinery for the log-scale efficacy test.
//
// Everything here evaluates closed forms at true parameters; nothing is
// estimated from data. The simulation module provides the Monte Carlo
// oracles these formulas are validated against.
// ---------------------------------------------------------------------------

// Decomposition of the two log-incidence variances by how they scale with
// the screening size N:
//   var(log lambda0_hat) = gamma00 / N + gamma01
//   var(log lambda1_hat) = gamma1 / N
// gamma01 is the N-independent floor contributed by assay uncertainty.
struct GammaComponents {
    double gamma00;
    double gamma01;
    double gamma1;
};

// Probability that an HIV-positive subject at screening tests recent:
//   P_R = beta_T + (lambda0 (1-p) / p) (Omega_T - beta_T T).
// Throws InfeasibleContextError unless 0 < P_R < 1 (P_R > beta_T holds
// whenever it succeeds, since the assay window is positive).
double p_recent(const DesignContext& ctx);

// Closed-form gamma components at true parameters, with the active-arm
// rate lambda1 supplied by the caller (usually lambda0 * R).
GammaComponents gamma_components(const DesignContext& ctx, double lambda1);

// var(log lambda0_hat) = gamma00/N + gamma01 at screening size n.
double v0_analytic(const DesignContext& ctx, double n_screened);

// var(log lambda1_hat) = 1 / (lambda1 (1-p) r tau n).
double v1_analytic(const DesignContext& ctx, double lambda1, double n_screened);

// Covariance matrix (divided by N) of the count vector
//   W* = (N_R - beta_T N_+, N_+, N_event, N_enroll, N_R),
// defined for contexts with both assay RSEs zero. Construction checks
// symmetry by construction and positive semi-definiteness by Cholesky.
class WCovariance {
public:
    static constexpr int dim = 5;
    static const std::array<const char*, dim>& labels();

    explicit WCovariance(const std::array<std::array<double, dim>, dim>& m);

    double at(int i, int j) const { return m_[i][j]; }

    // d' V d for a weight vector d.
    double quadratic_form(const std::array<double, dim>& d) const;

private:
    std::array<std::array<double, dim>, dim> m_;
};

// Closed-form W-covariance at true parameters. Throws
// UnsupportedContextError when either assay RSE is nonzero; callers
// wanting the simplified-case matrix pass ctx.with_zero_rse().
WCovariance w_covariance(const DesignContext& ctx, double lambda1);

// Asymptotic variance of the Z statistic under the alternative R = r1,
// from the delta method applied to both the numerator and the estimated
// denominator of Z. Defined (like the W-covariance it is built on) for
// the zero-RSE simplification; assay RSEs in ctx are ignored by design.
// Equals 1 at r1 = r0.
double v_r1(const DesignContext& ctx, const HypothesisSpec& hyp);

// E(Z) under the alternative: (log r1 - log r0) / sqrt(V0 + V1) at
// screening size n, with lambda1 = r1 * lambda0.
double expected_z_mean(const DesignContext& ctx, const HypothesisSpec& hyp,
                       double n_screened);

}  // namespace counterfact
