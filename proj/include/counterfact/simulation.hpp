#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "counterfact/domain.hpp"
#include "counterfact/estimators.hpp"
#include "counterfact/rng.hpp"

namespace counterfact {

// ---------------------------------------------------------------------------
// Monte Carlo engine for the screening + active-arm trial.
//
// Replicate i is a pure function of (master_seed, i): each replicate owns
// the RNG substream addressed by its index, records land in a
// preallocated slot, and aggregation walks them in index order. Worker
// count therefore never changes a single output bit.
// ---------------------------------------------------------------------------

struct SimulationConfig {
    DesignContext ctx;
    HypothesisSpec hyp;
    double true_ratio;        // R used for data generation
    double n_screened;
    std::int64_t replicates;
    std::uint64_t master_seed;
    // Forces both assay RSEs to zero in generation and estimation; the
    // normal draws are still consumed so the uniform stream lines up with
    // the RSE-on run replicate by replicate.
    bool zero_rse_mode = false;
    VarianceConvention convention = VarianceConvention::full;
    double confidence = 0.95;
};

// Reasons a replicate yields no usable Z. Bits, not an enum class, so a
// replicate can carry several at once.
namespace degenerate_flag {
constexpr std::uint32_t nonpositive_adjusted = 1u << 0;  // N_R <= beta_hat N_+
constexpr std::uint32_t zero_events = 1u << 1;
constexpr std::uint32_t invalid_frr_draw = 1u << 2;      // beta_hat outside [0, 1)
constexpr std::uint32_t invalid_window_draw = 1u << 3;   // MDRI draw vs cutoff/FRR
constexpr std::uint32_t no_negatives = 1u << 4;          // N_+ = N
constexpr std::uint32_t no_enrolled = 1u << 5;
constexpr int count = 6;
const char* label(int bit_index);
}  // namespace degenerate_flag

struct ReplicateRecord {
    std::int64_t n_positive;
    std::int64_t n_recent;
    std::int64_t n_enrolled;
    std::int64_t n_events;
    double beta_hat;
    double omega_hat;
    // NaN when the degenerate flags are nonzero.
    double lambda0_hat;
    double lambda1_hat;
    double v0_hat;
    double v1_hat;
    double z;
    bool rejected;
    std::uint32_t flags;

    bool degenerate() const { return flags != 0; }
};

// Moments over the usable (flag-free) replicates, two-pass in index order.
// Standard errors are normal-theory approximations, good enough for
// "within k Monte Carlo SEs" oracle checks.
struct MomentSummary {
    std::int64_t n_used;
    double mean_log_lambda0, var_log_lambda0, se_var_log_lambda0;
    double mean_log_lambda1, var_log_lambda1, se_var_log_lambda1;
    double cov_log_lambda, se_cov_log_lambda;
    double corr_log_lambda;
    double mean_z, var_z, se_var_z;
    double mean_log_ratio, var_log_ratio;
    double mean_v_hat;  // mean of V0_hat + V1_hat, plug-in variance diagnostic
};

struct SimulationReport {
    std::int64_t replicate_count;
    std::int64_t n_degenerate;
    std::array<std::int64_t, degenerate_flag::count> flag_counts;
    std::int64_t n_rejected;
    double rejection_rate;       // over usable replicates only
    double degenerate_rate;      // n_degenerate / replicate_count
    bool degenerate_rate_high;   // > 2%, worth a caller-side warning
    MomentSummary moments;
};

// One replicate: screening counts, assay draws, enrollment, events, then
// the estimator pipeline. Degeneracies set flags instead of throwing.
ReplicateRecord simulate_replicate(const SimulationConfig& cfg,
                                   RngStream& stream);

// Runs all replicates (workers <= 0 picks hardware concurrency) and
// aggregates. Throws DegenerateEstimateError if no replicate is usable.
SimulationReport run_study(const SimulationConfig& cfg, int workers = 0);

// Same engine, exposing the records for callers that need more than the
// aggregate (replicate dumps, custom statistics).
std::vector<ReplicateRecord> run_replicates(const SimulationConfig& cfg,
                                            int workers = 0);

// Aggregation of externally produced records, index order, deterministic.
SimulationReport summarize(const std::vector<ReplicateRecord>& records);

}  // namespace counterfact
