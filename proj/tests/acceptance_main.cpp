// Acceptance harness: one line of output per criterion, PASS or FAIL, with
// the measured quantities inline. Exit status is the number of failed
// criteria, so the test runner stays red while any gate is missed.
//
//   argv[1]: path to the command-line binary (worker-determinism criterion)
//   argv[2]: directory holding msm.cfg and women.cfg

#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "counterfact/asymptotics.hpp"
#include "counterfact/config.hpp"
#include "counterfact/design.hpp"
#include "counterfact/domain.hpp"
#include "counterfact/errors.hpp"
#include "counterfact/estimators.hpp"
#include "counterfact/normal.hpp"
#include "counterfact/simulation.hpp"

using namespace counterfact;

namespace {

// ---------------------------------------------------------------------------
// Gates. One named constant per tolerance so every bar is visible here and
// cannot drift inside the checks below.
// ---------------------------------------------------------------------------

constexpr double kSampleSizeRelTol = 0.01;   // N within 1% of the reference
constexpr double kCountAbsTol = 0.5;         // expected counts, absolute
constexpr double kTypeOneAbsTol = 0.010;     // empirical size, 1e4 replicates
constexpr double kPowerAbsTol = 0.015;       // empirical power, 1e4 replicates
constexpr double kCorrAbsTol = 0.02;         // cross-arm log correlation
constexpr double kVarianceRelTol = 0.05;     // analytic vs Monte Carlo
constexpr double kNullVarLo = 0.95;          // var(Z) under the null
constexpr double kNullVarHi = 1.05;
constexpr double kCountLevelRelTol = 1e-10;  // plug-in V0 at expected counts
constexpr double kDesignSeconds = 1.0;       // runtime gates
constexpr double kRejectionSeconds = 10.0;

// Reference design cells: screening size, the expected counts at that size
// (positives, recents, enrolled, events), and the rejection rates measured
// at seed 1 with 1e4 replicates.
struct ReferenceCell {
    const char* config;
    double tau;
    double n_reference;
    std::array<double, 4> counts;
    double type_one;
    double power;
};

constexpr std::array<ReferenceCell, 4> kCells{{
    {"msm.cfg", 1.0, 2000.0, {306.7, 30.9, 1439.3, 9.4}, 0.044, 0.882},
    {"msm.cfg", 2.0, 1545.0, {236.9, 23.9, 1111.9, 14.6}, 0.042, 0.889},
    {"women.cfg", 1.0, 3811.0, {952.8, 43.6, 2429.5, 12.8}, 0.035, 0.859},
    {"women.cfg", 2.0, 3236.0, {809.0, 37.0, 2063.0, 21.7}, 0.038, 0.869},
}};

std::string g_config_dir;

StudyConfig load_cell_config(const ReferenceCell& cell) {
    return load_study_config(g_config_dir + "/" + cell.config);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
}

void report(int index, bool pass, const std::string& detail) {
    std::printf("%s  criterion %d: %s\n", pass ? "PASS" : "FAIL", index,
                detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* format, ...) {
    char buffer[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buffer, sizeof buffer, format, args);
    va_end(args);
    return buffer;
}

// Plain linear congruential sampler, independent of the library generator,
// for the random count vectors in the reduction criterion.
struct Lcg {
    std::uint64_t state = 0x9E3779B97F4A7C15ull;
    double next() {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return static_cast<double>(state >> 11) * 0x1.0p-53;
    }
    double in(double lo, double hi) { return lo + (hi - lo) * next(); }
};

// ---------------------------------------------------------------------------
// Criteria 1 and 2: sample size and expected screening counts against the
// reference design cells, one criterion per study population.
// ---------------------------------------------------------------------------

bool design_criterion(int index, const char* label, int first_cell) {
    const auto start = std::chrono::steady_clock::now();
    bool pass = true;
    double n[2] = {0.0, 0.0};
    double worst_count = 0.0;
    for (int k = 0; k < 2; ++k) {
        const ReferenceCell& cell = kCells[first_cell + k];
        const StudyConfig study = load_cell_config(cell);
        const DesignContext ctx = study.make_context(cell.tau);
        const HypothesisSpec hyp = study.make_hypothesis();

        const DesignReport sized = sample_size(ctx, hyp);
        n[k] = sized.n_screened;
        pass &= std::fabs(sized.n_screened - cell.n_reference) <=
                kSampleSizeRelTol * cell.n_reference;

        const DesignReport at = design_report_at(ctx, hyp, cell.n_reference);
        const std::array<double, 4> got{at.expected_n_positive,
                                        at.expected_n_recent,
                                        at.expected_n_enrolled,
                                        at.expected_n_events};
        for (int j = 0; j < 4; ++j) {
            worst_count = std::max(worst_count,
                                   std::fabs(got[j] - cell.counts[j]));
            pass &= std::fabs(got[j] - cell.counts[j]) <= kCountAbsTol;
        }
    }
    const double elapsed = seconds_since(start);
    pass &= elapsed < kDesignSeconds;
    report(index, pass,
           fmt("%s sample sizes and expected counts match the reference "
               "cells (N %.0f and %.0f, worst count deviation %.3f, %.2f s)",
               label, n[0], n[1], worst_count, elapsed));
    return pass;
}

// ---------------------------------------------------------------------------
// Criterion 3: empirical rejection rates, 1e4 replicates at seed 1, all four
// reference cells, generation under the null and under the alternative.
// ---------------------------------------------------------------------------

bool rejection_criterion() {
    const auto start = std::chrono::steady_clock::now();
    bool pass = true;
    double worst_size = 0.0, worst_power = 0.0;
    for (const ReferenceCell& cell : kCells) {
        const StudyConfig study = load_cell_config(cell);
        const DesignContext ctx = study.make_context(cell.tau);
        const HypothesisSpec hyp = study.make_hypothesis();

        SimulationConfig null_cfg{ctx, hyp, hyp.r0, cell.n_reference, 10000, 1};
        const double size = run_study(null_cfg).rejection_rate;
        worst_size = std::max(worst_size, std::fabs(size - cell.type_one));
        pass &= std::fabs(size - cell.type_one) <= kTypeOneAbsTol;

        SimulationConfig alt_cfg{ctx, hyp, hyp.r1, cell.n_reference, 10000, 1};
        const double power = run_study(alt_cfg).rejection_rate;
        worst_power = std::max(worst_power, std::fabs(power - cell.power));
        pass &= std::fabs(power - cell.power) <= kPowerAbsTol;
    }
    const double elapsed = seconds_since(start);
    pass &= elapsed < kRejectionSeconds;
    report(3, pass,
           fmt("type-I error and power track the reference rates (worst "
               "deviations %.4f and %.4f, %.2f s)",
               worst_size, worst_power, elapsed));
    return pass;
}

// ---------------------------------------------------------------------------
// Criterion 4: the two log incidence estimates are uncorrelated; screening
// informs the control arm only, follow-up the active arm only.
// ---------------------------------------------------------------------------

bool independence_criterion() {
    const ReferenceCell& cell = kCells[0];
    const StudyConfig study = load_cell_config(cell);
    const DesignContext ctx = study.make_context(cell.tau);
    const HypothesisSpec hyp = study.make_hypothesis();
    SimulationConfig cfg{ctx, hyp, hyp.r1, cell.n_reference, 100000, 1};
    const double corr = run_study(cfg).moments.corr_log_lambda;
    const bool pass = std::fabs(corr) < kCorrAbsTol;
    report(4, pass,
           fmt("log incidence estimates are uncorrelated across arms "
               "(correlation %.4f over 1e5 replicates)",
               corr));
    return pass;
}

// ---------------------------------------------------------------------------
// Criterion 5: variance oracles, three clauses.
//   a) analytic V0 + V1 against the Monte Carlo variance of the log ratio
//      at both design points, generation under the null;
//   b) with assay noise switched off and generation at r1, the analytic
//      var(Z) against the empirical one;
//   c) same switch, generation at r0: empirical var(Z) inside the unit band.
// ---------------------------------------------------------------------------

bool variance_criterion() {
    bool pass = true;
    std::array<double, 2> plug_rel{};
    std::array<double, 2> alt_rel{};
    std::array<double, 2> null_var{};
    for (int k = 0; k < 2; ++k) {
        const ReferenceCell& cell = kCells[2 * k];  // both at tau = 1
        const StudyConfig study = load_cell_config(cell);
        const DesignContext ctx = study.make_context(cell.tau);
        const HypothesisSpec hyp = study.make_hypothesis();
        const double n = cell.n_reference;

        // a) plug-in total against the spread of simulated log ratios
        SimulationConfig plug{ctx, hyp, hyp.r0, n, 200000, 7};
        const double analytic =
            v0_analytic(ctx, n) + v1_analytic(ctx, ctx.lambda0 * hyp.r0, n);
        const double mc = run_study(plug).moments.var_log_ratio;
        plug_rel[k] = std::fabs(mc - analytic) / analytic;
        pass &= plug_rel[k] < kVarianceRelTol;

        // b) var(Z) under the alternative, assay uncertainty zeroed
        SimulationConfig alt{ctx, hyp, hyp.r1, n, 1000000, 7};
        alt.zero_rse_mode = true;
        const double var_alt = run_study(alt).moments.var_z;
        alt_rel[k] = std::fabs(var_alt - v_r1(ctx, hyp)) / v_r1(ctx, hyp);
        pass &= alt_rel[k] < kVarianceRelTol;

        // c) var(Z) under the null, same switch; the smaller event counts
        // of the second population need more replicates for a stable spread
        SimulationConfig nul{ctx, hyp, hyp.r0, n, k == 0 ? 1000000 : 2000000,
                             7};
        nul.zero_rse_mode = true;
        null_var[k] = run_study(nul).moments.var_z;
        pass &= null_var[k] > kNullVarLo && null_var[k] < kNullVarHi;
    }
    report(5, pass,
           fmt("variance oracles: plug-in vs Monte Carlo rel. err. %.3f and "
               "%.3f (gate %.2f), var(Z) at r1 rel. err. %.3f and %.3f, "
               "var(Z) at r0 %.4f and %.4f (band %.2f to %.2f)",
               plug_rel[0], plug_rel[1], kVarianceRelTol, alt_rel[0],
               alt_rel[1], null_var[0], null_var[1], kNullVarLo, kNullVarHi));
    return pass;
}

// ---------------------------------------------------------------------------
// Criterion 6: estimator reductions hold exactly on random counts, and the
// count-level variance at expected counts reproduces the analytic form.
// ---------------------------------------------------------------------------

bool reduction_criterion() {
    Lcg rng;
    int exact = 0;
    const int trials = 1000;
    for (int i = 0; i < trials; ++i) {
        const double n_total = rng.in(100.0, 1e6);
        const double n_positive = rng.in(1.0, 0.5 * n_total);
        const double n_recent = rng.in(0.5, n_positive);
        const ScreeningCounts counts(n_total, n_positive, n_recent);

        const double cutoff = 2.0;
        const double mdri = rng.in(0.1, 0.45);
        const AssayProperties frr_free(cutoff, mdri, rng.in(0.0, 0.3), 0.0,
                                       0.0);
        const bool collapse_to_snapshot =
            lambda0_kassanjee(counts, frr_free).value ==
            lambda0_snapshot(counts, frr_free).value;

        // A window equal to the cutoff turns the snapshot rate into the
        // idealized one; the cutoff argument stays epsilon above to satisfy
        // the strict window < cutoff invariant.
        const AssayProperties full_window(cutoff + 1e-9, cutoff, 0.0, 0.0,
                                          0.0);
        const bool collapse_to_perfect =
            lambda0_snapshot(counts, full_window).value ==
            lambda0_perfect(counts, cutoff).value;

        exact += collapse_to_snapshot && collapse_to_perfect;
    }

    double worst_rel = 0.0;
    for (const ReferenceCell& cell : kCells) {
        const StudyConfig study = load_cell_config(cell);
        const DesignContext ctx = study.make_context(cell.tau);
        const HypothesisSpec hyp = study.make_hypothesis();
        const DesignReport at =
            design_report_at(ctx, hyp, cell.n_reference);
        const ScreeningCounts expected(cell.n_reference,
                                       at.expected_n_positive,
                                       at.expected_n_recent);
        const double plug =
            *lambda0_kassanjee(expected, ctx.assay).log_variance;
        const double analytic = v0_analytic(ctx, cell.n_reference);
        worst_rel =
            std::max(worst_rel, std::fabs(plug - analytic) / analytic);
    }

    const bool pass = exact == trials && worst_rel < kCountLevelRelTol;
    report(6, pass,
           fmt("estimator reductions exact on %d of %d random count vectors; "
               "count-level variance matches the analytic form to %.1e "
               "(gate %.0e)",
               exact, trials, worst_rel, kCountLevelRelTol));
    return pass;
}

// ---------------------------------------------------------------------------
// Criterion 7: the returned sample size meets the target power, and the
// infeasibility error fires exactly when the design denominator closes.
// ---------------------------------------------------------------------------

bool feasibility_criterion() {
    bool pass = true;
    double worst_power = 1.0;
    for (const ReferenceCell& cell : kCells) {
        const StudyConfig study = load_cell_config(cell);
        const DesignContext ctx = study.make_context(cell.tau);
        const HypothesisSpec hyp = study.make_hypothesis();
        const DesignReport sized = sample_size(ctx, hyp);
        const double power = power_at_n(ctx, hyp, sized.n_screened);
        worst_power = std::min(worst_power, power);
        pass &= power >= hyp.power_beta;
    }

    // Sweep the alternative across (0, r0) and demand the error agrees with
    // an independent recomputation of the denominator at every point.
    const StudyConfig study = load_cell_config(kCells[0]);
    const DesignContext ctx = study.make_context(1.0);
    const HypothesisSpec base = study.make_hypothesis();
    int thrown = 0, succeeded = 0, mismatched = 0;
    const int points = 500;
    for (int i = 1; i <= points; ++i) {
        const double r1 = base.r0 * static_cast<double>(i) /
                          static_cast<double>(points + 1);
        const HypothesisSpec hyp(base.r0, r1, base.alpha, base.power_beta);
        const double z_crit =
            standard_normal_quantile(1.0 - hyp.alpha / 2.0);
        const double z_power = standard_normal_quantile(hyp.power_beta);
        const double spread = z_crit + std::sqrt(v_r1(ctx, hyp)) * z_power;
        const double delta = std::log(hyp.r1) - std::log(hyp.r0);
        const double ratio = delta / spread;
        const double denominator =
            ratio * ratio -
            gamma_components(ctx, ctx.lambda0 * hyp.r1).gamma01;
        try {
            sample_size(ctx, hyp);
            ++succeeded;
            if (denominator <= 0.0) ++mismatched;
        } catch (const InfeasibleDesignError& err) {
            ++thrown;
            if (denominator > 0.0) ++mismatched;
            if (std::fabs(err.boundary_log_r1 -
                          detectability_floor(ctx, hyp)) > 1e-12)
                ++mismatched;
        }
    }
    pass &= mismatched == 0 && thrown > 0 && succeeded > 0;
    report(7, pass,
           fmt("computed sizes deliver the target power (worst %.5f) and "
               "infeasibility matches the closed denominator on a %d-point "
               "sweep (%d infeasible, %d feasible, %d disagreements)",
               worst_power, points, thrown, succeeded, mismatched));
    return pass;
}

// ---------------------------------------------------------------------------
// Criterion 8: the command-line simulator is byte-identical across worker
// counts at a fixed seed.
// ---------------------------------------------------------------------------

std::string run_command(const std::string& command, bool& ok) {
    std::string output;
    FILE* pipe = popen(command.c_str(), "r");
    if (pipe == nullptr) {
        ok = false;
        return output;
    }
    char buffer[4096];
    std::size_t got;
    while ((got = fread(buffer, 1, sizeof buffer, pipe)) > 0)
        output.append(buffer, got);
    ok = pclose(pipe) == 0;
    return output;
}

bool determinism_criterion(const std::string& cli) {
    const std::string base = "'" + cli + "' simulate --config '" +
                             g_config_dir +
                             "/msm.cfg' --reps 20000 --seed 123 "
                             "--true-ratio 0.15 --n 2000 --workers ";
    bool ok_one = false, ok_many = false;
    const std::string one = run_command(base + "1", ok_one);
    const std::string many = run_command(base + "7", ok_many);
    const bool pass = ok_one && ok_many && !one.empty() && one == many;
    report(8, pass,
           fmt("simulator output is byte-identical for 1 and 7 workers "
               "(%zu bytes%s)",
               one.size(), pass ? "" : ", outputs differ or a run failed"));
    return pass;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::fprintf(stderr,
                     "usage: %s <cli-binary> <config-dir>\n",
                     argv[0]);
        return 2;
    }
    const std::string cli = argv[1];
    g_config_dir = argv[2];

    int failures = 0;
    const auto gate = [&failures](bool pass) { failures += !pass; };
    try {
        gate(design_criterion(1, "first population", 0));
        gate(design_criterion(2, "second population", 2));
        gate(rejection_criterion());
        gate(independence_criterion());
        gate(variance_criterion());
        gate(reduction_criterion());
        gate(feasibility_criterion());
        gate(determinism_criterion(cli));
    } catch (const std::exception& err) {
        std::fprintf(stderr, "aborted: %s\n", err.what());
        return 9;
    }
    std::printf("%d of 8 criteria pass\n", 8 - failures);
    return failures;
}
