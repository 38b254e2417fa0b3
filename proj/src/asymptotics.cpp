#include "counterfact/asymptotics.hpp"

#include <cmath>
#include <string>

#include "counterfact/errors.hpp"

namespace counterfact {

double p_recent(const DesignContext& ctx) {
    const AssayProperties& a = ctx.assay;
    const double p = ctx.prevalence_p;
    const double pr = a.frr + ctx.lambda0 * (1.0 - p) / p * a.adjusted_window();
    if (!(pr > 0.0 && pr < 1.0))
        throw InfeasibleContextError(
            "probability of testing recent = " + std::to_string(pr) +
            " falls outside (0, 1); incidence/prevalence combination "
            "unusable with this assay");
    return pr;
}

GammaComponents gamma_components(const DesignContext& ctx, double lambda1) {
    if (!(lambda1 > 0.0))
        throw ValidationError("active-arm incidence must be positive");
    const AssayProperties& a = ctx.assay;
    const double p = ctx.prevalence_p;
    const double q = 1.0 - p;
    const double pr = p_recent(ctx);
    const double d = pr - a.frr;              // P_R - beta_T
    const double w = a.adjusted_window();     // Omega_T - beta_T T
    const double s_om = a.sigma_mdri();
    const double s_be = a.sigma_frr();

    // gamma00 = (1/p){ P_R(1-P_R)/(P_R-beta)^2 + 1/(1-p)
    //                  + (1-p) sigma_beta^2/(P_R-beta)^2 }
    const double gamma00 =
        (pr * (1.0 - pr) / (d * d) + 1.0 / q + q * s_be * s_be / (d * d)) / p;

    // gamma01 = sigma_Omega^2/(Omega-beta T)^2
    //         + sigma_beta^2 (Omega - P_R T)^2 / ((P_R-beta)^2 (Omega-beta T)^2)
    const double num = a.mdri - pr * a.cutoff_T;
    const double gamma01 = s_om * s_om / (w * w) +
                           s_be * s_be * num * num / (d * d * w * w);

    // gamma1 = 1 / (lambda1 (1-p) r tau)
    const double gamma1 =
        1.0 / (lambda1 * q * ctx.enroll_rate_r * ctx.followup_tau);

    return {gamma00, gamma01, gamma1};
}

double v0_analytic(const DesignContext& ctx, double n_screened) {
    if (!(n_screened > 0.0))
        throw ValidationError("screening size must be positive");
    // gamma1 is not needed; any positive lambda1 gives the same gamma00/01.
    const GammaComponents g = gamma_components(ctx, 1.0);
    return g.gamma00 / n_screened + g.gamma01;
}

double v1_analytic(const DesignContext& ctx, double lambda1, double n_screened) {
    if (!(n_screened > 0.0))
        throw ValidationError("screening size must be positive");
    return gamma_components(ctx, lambda1).gamma1 / n_screened;
}

const std::array<const char*, WCovariance::dim>& WCovariance::labels() {
    static const std::array<const char*, dim> names = {
        "adjusted_recent", "positive", "events", "enrolled", "recent"};
    return names;
}

WCovariance::WCovariance(const std::array<std::array<double, dim>, dim>& m)
    : m_(m) {
    // Positive semi-definiteness via pivoted Cholesky: a pivot below
    // -tol fails outright; once all remaining pivots are ~0 the residual
    // block must vanish too.
    double scale = 1.0;
    for (int i = 0; i < dim; ++i) scale = std::max(scale, std::fabs(m_[i][i]));
    const double tol = 1e-10 * scale;

    std::array<std::array<double, dim>, dim> a = m_;
    std::array<int, dim> idx{};
    for (int i = 0; i < dim; ++i) idx[i] = i;

    for (int k = 0; k < dim; ++k) {
        int piv = k;
        for (int j = k + 1; j < dim; ++j)
            if (a[idx[j]][idx[j]] > a[idx[piv]][idx[piv]]) piv = j;
        std::swap(idx[k], idx[piv]);
        const double akk = a[idx[k]][idx[k]];
        if (akk < -tol)
            throw ValidationError("W covariance matrix is not positive "
                                  "semi-definite (negative pivot)");
        if (akk <= tol) {
            for (int i = k; i < dim; ++i)
                for (int j = k; j < dim; ++j)
                    if (std::fabs(a[idx[i]][idx[j]]) > 16.0 * tol)
                        throw ValidationError(
                            "W covariance matrix is not positive "
                            "semi-definite (nonzero residual block)");
            return;
        }
        for (int i = k + 1; i < dim; ++i)
            for (int j = k + 1; j < dim; ++j)
                a[idx[i]][idx[j]] -= a[idx[i]][idx[k]] * a[idx[j]][idx[k]] / akk;
    }
}

double WCovariance::quadratic_form(const std::array<double, dim>& d) const {
    double acc = 0.0;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) acc += d[i] * m_[i][j] * d[j];
    return acc;
}

WCovariance w_covariance(const DesignContext& ctx, double lambda1) {
    const AssayProperties& a = ctx.assay;
    if (a.sigma_mdri() != 0.0 || a.sigma_frr() != 0.0)
        throw UnsupportedContextError(
            "W covariance closed forms hold only when both assay RSEs are "
            "zero; pass ctx.with_zero_rse()");
    if (!(lambda1 >= 0.0))
        throw ValidationError("active-arm incidence must be nonnegative");

    const double p = ctx.prevalence_p;
    const double q = 1.0 - p;
    const double r = ctx.enroll_rate_r;
    const double pr = p_recent(ctx);
    const double d = pr - a.frr;
    const double mu = lambda1 * ctx.followup_tau;  // per-enrollee event mean

    std::array<std::array<double, WCovariance::dim>, WCovariance::dim> m{};
    // Indexing: 0 = adjusted recents, 1 = positives, 2 = events,
    //           3 = enrolled, 4 = raw recents.
    m[0][0] = p * (pr * (1.0 - pr) + q * d * d);
    m[1][1] = p * q;
    m[2][2] = q * r * mu * (1.0 + mu * p * r + mu * (1.0 - r));
    m[3][3] = q * r * (1.0 - r + p * r);
    m[4][4] = p * pr * (1.0 - p * pr);
    m[0][1] = p * q * d;
    m[0][2] = -p * q * d * r * mu;
    m[0][3] = -p * q * d * r;
    m[0][4] = p * pr * (1.0 - pr) + p * q * d * pr;
    m[1][2] = -p * q * r * mu;
    m[1][3] = -p * q * r;
    m[1][4] = p * q * pr;
    m[2][3] = q * r * (1.0 - r + p * r) * mu;
    m[2][4] = -p * q * pr * r * mu;
    m[3][4] = -p * q * pr * r;
    for (int i = 0; i < WCovariance::dim; ++i)
        for (int j = 0; j < i; ++j) m[i][j] = m[j][i];

    return WCovariance(m);
}

double v_r1(const DesignContext& ctx, const HypothesisSpec& hyp) {
    // Defined under the zero-RSE simplification; drop any assay RSEs the
    // caller's context carries.
    const DesignContext c = ctx.with_zero_rse();
    const AssayProperties& a = c.assay;
    const double p = c.prevalence_p;
    const double q = 1.0 - p;
    const double r = c.enroll_rate_r;
    const double tau = c.followup_tau;
    const double lambda1 = c.lambda0 * hyp.r1;
    const double pr = p_recent(c);
    const double d = pr - a.frr;

    const WCovariance vw = w_covariance(c, lambda1);

    // b = N (V0_hat + V1_hat) evaluated at expected counts; equals
    // gamma00 + gamma1 in the zero-RSE case.
    const double b = pr * (1.0 - pr) / (p * d * d) + 1.0 / (p * q) +
                     1.0 / (q * r * lambda1 * tau);

    // Gradient of log(lambda1_hat/lambda0_hat) in the per-capita counts.
    const std::array<double, 5> d_ratio = {
        -1.0 / (p * d), -1.0 / q, 1.0 / (q * r * lambda1 * tau), -1.0 / (q * r),
        0.0};

    // Gradient of the plug-in b estimator (the three-term variance with
    // counts as arguments) in the same coordinates.
    const std::array<double, 5> d_b = {
        -2.0 * pr * (1.0 - pr) / (p * p * d * d * d),
        pr * pr / (p * p * d * d) - 1.0 / (p * p) + 1.0 / (q * q),
        -1.0 / (q * q * r * r * lambda1 * lambda1 * tau * tau),
        0.0,
        (1.0 - 2.0 * pr) / (p * p * d * d)};

    // Z = sqrt(N) (log R_hat - log r0) / sqrt(b_hat): chain rule gives the
    // combined weight vector, with delta = log(r1/r0) the mean log-ratio.
    const double delta = std::log(hyp.r1) - std::log(hyp.r0);
    const double sb = std::sqrt(b);
    std::array<double, 5> dz{};
    for (int i = 0; i < 5; ++i)
        dz[i] = d_ratio[i] / sb - delta * d_b[i] / (2.0 * b * sb);

    return vw.quadratic_form(dz);
}

double expected_z_mean(const DesignContext& ctx, const HypothesisSpec& hyp,
                       double n_screened) {
    const double lambda1 = ctx.lambda0 * hyp.r1;
    const double v = v0_analytic(ctx, n_screened) +
                     v1_analytic(ctx, lambda1, n_screened);
    return (std::log(hyp.r1) - std::log(hyp.r0)) / std::sqrt(v);
}

}  // namespace counterfact
