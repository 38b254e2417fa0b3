#include "counterfact/simulation.hpp"

#include <cmath>
#include <limits>
#include <thread>

#include "counterfact/asymptotics.hpp"
#include "counterfact/errors.hpp"

namespace counterfact {

namespace degenerate_flag {
const char* label(int bit_index) {
    static const char* names[count] = {
        "nonpositive_adjusted_recents", "zero_events", "invalid_frr_draw",
        "invalid_window_draw",          "no_negatives", "no_enrolled"};
    return names[bit_index];
}
}  // namespace degenerate_flag

ReplicateRecord simulate_replicate(const SimulationConfig& cfg,
                                   RngStream& stream) {
    const DesignContext& ctx = cfg.ctx;
    const AssayProperties& assay = ctx.assay;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    const double p = ctx.prevalence_p;
    const double pr = p_recent(ctx);  // depends on true beta/Omega only
    const double lambda1 = ctx.lambda0 * cfg.true_ratio;
    const double sigma_beta = cfg.zero_rse_mode ? 0.0 : assay.sigma_frr();
    const double sigma_omega = cfg.zero_rse_mode ? 0.0 : assay.sigma_mdri();

    const std::int64_t n = static_cast<std::int64_t>(cfg.n_screened);

    ReplicateRecord rec{};
    rec.n_positive = stream.binomial(n, p);
    rec.n_recent = stream.binomial(rec.n_positive, pr);
    // sigma = 0 still consumes two uniforms and returns the mean exactly,
    // so zero_rse_mode runs replicate-match their RSE-on counterparts.
    rec.beta_hat = stream.normal(assay.frr, sigma_beta);
    rec.omega_hat = stream.normal(assay.mdri, sigma_omega);

    const std::int64_t n_negative = n - rec.n_positive;
    rec.n_enrolled = stream.binomial(n_negative, ctx.enroll_rate_r);
    rec.n_events = stream.poisson(
        ctx.followup_tau * lambda1 * static_cast<double>(rec.n_enrolled));

    rec.flags = 0;
    if (n_negative <= 0) rec.flags |= degenerate_flag::no_negatives;
    if (rec.n_enrolled <= 0) rec.flags |= degenerate_flag::no_enrolled;
    if (rec.n_events <= 0) rec.flags |= degenerate_flag::zero_events;
    if (rec.beta_hat < 0.0 || rec.beta_hat >= 1.0)
        rec.flags |= degenerate_flag::invalid_frr_draw;
    else {
        if (!(rec.omega_hat > 0.0 && rec.omega_hat < assay.cutoff_T &&
              rec.omega_hat - rec.beta_hat * assay.cutoff_T > 0.0))
            rec.flags |= degenerate_flag::invalid_window_draw;
        if (static_cast<double>(rec.n_recent) -
                rec.beta_hat * static_cast<double>(rec.n_positive) <= 0.0)
            rec.flags |= degenerate_flag::nonpositive_adjusted;
    }

    rec.lambda0_hat = rec.lambda1_hat = rec.v0_hat = rec.v1_hat = rec.z = nan;
    rec.rejected = false;
    if (rec.flags != 0) return rec;

    // The replicate's assay estimate: drawn point values, design-level
    // absolute sigmas re-expressed as RSEs of the drawn values.
    const AssayProperties assay_hat(
        assay.cutoff_T, rec.omega_hat, sigma_omega / rec.omega_hat,
        rec.beta_hat, rec.beta_hat > 0.0 ? sigma_beta / rec.beta_hat : 0.0);

    const ScreeningCounts counts(static_cast<double>(n),
                                 static_cast<double>(rec.n_positive),
                                 static_cast<double>(rec.n_recent));
    const TrialCounts trial(static_cast<double>(rec.n_enrolled),
                            static_cast<double>(rec.n_events),
                            ctx.followup_tau);

    const IncidenceEstimate l0 =
        lambda0_kassanjee(counts, assay_hat, cfg.convention);
    const IncidenceEstimate l1 = lambda1_active_arm(trial);
    const EfficacyResult eff = efficacy_test(l0, l1, cfg.hyp, cfg.confidence);

    rec.lambda0_hat = l0.value;
    rec.lambda1_hat = l1.value;
    rec.v0_hat = *l0.log_variance;
    rec.v1_hat = *l1.log_variance;
    rec.z = eff.z_value;
    rec.rejected = eff.reject_h0;
    return rec;
}

std::vector<ReplicateRecord> run_replicates(const SimulationConfig& cfg,
                                            int workers) {
    if (cfg.replicates < 1)
        throw ValidationError("replicate count must be at least 1");
    if (!(cfg.n_screened >= 1.0))
        throw ValidationError("screening size must be at least 1");
    if (!(cfg.true_ratio > 0.0))
        throw ValidationError("true incidence ratio must be positive");
    p_recent(cfg.ctx);  // fail fast on an infeasible context

    const std::int64_t total = cfg.replicates;
    std::vector<ReplicateRecord> records(static_cast<std::size_t>(total));

    int n_workers = workers > 0
                        ? workers
                        : static_cast<int>(std::thread::hardware_concurrency());
    if (n_workers < 1) n_workers = 1;
    if (static_cast<std::int64_t>(n_workers) > total)
        n_workers = static_cast<int>(total);

    auto worker = [&](std::int64_t begin, std::int64_t end) {
        for (std::int64_t i = begin; i < end; ++i) {
            RngStream stream(cfg.master_seed, static_cast<std::uint64_t>(i));
            records[static_cast<std::size_t>(i)] = simulate_replicate(cfg, stream);
        }
    };

    if (n_workers == 1) {
        worker(0, total);
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(n_workers));
        const std::int64_t chunk = (total + n_workers - 1) / n_workers;
        for (int w = 0; w < n_workers; ++w) {
            const std::int64_t begin = w * chunk;
            const std::int64_t end = std::min(total, begin + chunk);
            if (begin >= end) break;
            threads.emplace_back(worker, begin, end);
        }
        for (auto& t : threads) t.join();
    }
    return records;
}

SimulationReport summarize(const std::vector<ReplicateRecord>& records) {
    SimulationReport rep{};
    rep.replicate_count = static_cast<std::int64_t>(records.size());
    rep.flag_counts.fill(0);

    std::int64_t used = 0;
    double s_l0 = 0.0, s_l1 = 0.0, s_z = 0.0, s_v = 0.0;
    for (const ReplicateRecord& r : records) {
        if (r.degenerate()) {
            ++rep.n_degenerate;
            for (int b = 0; b < degenerate_flag::count; ++b)
                if (r.flags & (1u << b)) ++rep.flag_counts[static_cast<std::size_t>(b)];
            continue;
        }
        ++used;
        if (r.rejected) ++rep.n_rejected;
        s_l0 += std::log(r.lambda0_hat);
        s_l1 += std::log(r.lambda1_hat);
        s_z += r.z;
        s_v += r.v0_hat + r.v1_hat;
    }
    if (used == 0)
        throw DegenerateEstimateError(
            "every replicate degenerate: no usable Z statistics");

    MomentSummary& m = rep.moments;
    m.n_used = used;
    const double du = static_cast<double>(used);
    m.mean_log_lambda0 = s_l0 / du;
    m.mean_log_lambda1 = s_l1 / du;
    m.mean_z = s_z / du;
    m.mean_v_hat = s_v / du;
    m.mean_log_ratio = m.mean_log_lambda1 - m.mean_log_lambda0;

    // Second pass for central moments keeps them accurate and the
    // fixed iteration order keeps them bit-reproducible.
    double q_l0 = 0.0, q_l1 = 0.0, q_cov = 0.0, q_z = 0.0, q_lr = 0.0;
    for (const ReplicateRecord& r : records) {
        if (r.degenerate()) continue;
        const double d0 = std::log(r.lambda0_hat) - m.mean_log_lambda0;
        const double d1 = std::log(r.lambda1_hat) - m.mean_log_lambda1;
        const double dz = r.z - m.mean_z;
        const double dlr = d1 - d0;  // centered log-ratio, since means subtract
        q_l0 += d0 * d0;
        q_l1 += d1 * d1;
        q_cov += d0 * d1;
        q_z += dz * dz;
        q_lr += dlr * dlr;
    }
    const double denom = used > 1 ? du - 1.0 : 1.0;
    m.var_log_lambda0 = q_l0 / denom;
    m.var_log_lambda1 = q_l1 / denom;
    m.cov_log_lambda = q_cov / denom;
    m.var_z = q_z / denom;
    m.var_log_ratio = q_lr / denom;
    m.corr_log_lambda =
        m.var_log_lambda0 > 0.0 && m.var_log_lambda1 > 0.0
            ? m.cov_log_lambda /
                  std::sqrt(m.var_log_lambda0 * m.var_log_lambda1)
            : 0.0;

    // Normal-theory Monte Carlo standard errors.
    const double two_over = used > 1 ? std::sqrt(2.0 / (du - 1.0)) : 0.0;
    m.se_var_log_lambda0 = m.var_log_lambda0 * two_over;
    m.se_var_log_lambda1 = m.var_log_lambda1 * two_over;
    m.se_var_z = m.var_z * two_over;
    m.se_cov_log_lambda =
        used > 1 ? std::sqrt((m.var_log_lambda0 * m.var_log_lambda1 +
                              m.cov_log_lambda * m.cov_log_lambda) /
                             (du - 1.0))
                 : 0.0;

    rep.rejection_rate = static_cast<double>(rep.n_rejected) / du;
    rep.degenerate_rate = rep.replicate_count > 0
                              ? static_cast<double>(rep.n_degenerate) /
                                    static_cast<double>(rep.replicate_count)
                              : 0.0;
    rep.degenerate_rate_high = rep.degenerate_rate > 0.02;
    return rep;
}

SimulationReport run_study(const SimulationConfig& cfg, int workers) {
    return summarize(run_replicates(cfg, workers));
}

}  // namespace counterfact
