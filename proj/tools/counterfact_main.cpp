// Command-line front end: design (sample-size tables), simulate (Monte
// Carlo operating characteristics), estimate (one analysis from observed
// counts). Exit codes: 0 ok, 1 validation, 2 infeasible design, 3
// degenerate data at run time.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "counterfact/config.hpp"
#include "counterfact/design.hpp"
#include "counterfact/errors.hpp"
#include "counterfact/estimators.hpp"
#include "counterfact/report.hpp"
#include "counterfact/simulation.hpp"

namespace cf = counterfact;

namespace {

struct CommonOutput {
    std::string format = "table";
    int precision = 4;
};

void add_output_flags(CLI::App* cmd, CommonOutput& out) {
    cmd->add_option("--format", out.format,
                    "Output format: table, csv, or json")
        ->default_val("table");
    cmd->add_option("--precision", out.precision,
                    "Significant digits for printed numbers")
        ->default_val(4)
        ->check(CLI::Range(1, 17));
}

int run_design(const std::string& config_path, std::vector<double> taus,
               const CommonOutput& out) {
    const cf::StudyConfig cfg = cf::load_study_config(config_path);
    if (taus.empty()) taus.push_back(cfg.followup_tau);

    cf::ReportSection section;
    section.name = "design";
    section.columns = {"tau",
                       "n_screened",
                       "expected_n_positive",
                       "expected_n_recent",
                       "expected_n_enrolled",
                       "expected_n_events"};
    for (double tau : taus) {
        const cf::DesignContext ctx = cfg.make_context(tau);
        const cf::DesignReport rep = cf::sample_size(ctx, cfg.make_hypothesis());
        section.rows.push_back(
            {cf::number_value(tau, out.precision),
             cf::integer_value(static_cast<std::int64_t>(rep.n_screened)),
             cf::number_value(rep.expected_n_positive, out.precision),
             cf::number_value(rep.expected_n_recent, out.precision),
             cf::number_value(rep.expected_n_enrolled, out.precision),
             cf::number_value(rep.expected_n_events, out.precision)});
    }

    cf::ReportDocument doc;
    doc.sections.push_back(std::move(section));
    cf::render(doc, cf::parse_output_format(out.format), std::cout);
    return 0;
}

void dump_replicates(const std::string& path,
                     const std::vector<cf::ReplicateRecord>& records) {
    std::ofstream f(path);
    if (!f) throw cf::ValidationError("cannot open dump file '" + path + "'");
    f << "replicate,n_positive,n_recent,beta_hat,omega_hat,n_enrolled,"
         "n_events,lambda0_hat,lambda1_hat,v0_hat,v1_hat,z,rejected,flags\n";
    char buf[64];
    auto full = [&buf](double x) -> std::string {
        if (std::isnan(x)) return "NA";
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return buf;
    };
    for (std::size_t i = 0; i < records.size(); ++i) {
        const cf::ReplicateRecord& r = records[i];
        f << i << ',' << r.n_positive << ',' << r.n_recent << ','
          << full(r.beta_hat) << ',' << full(r.omega_hat) << ','
          << r.n_enrolled << ',' << r.n_events << ',' << full(r.lambda0_hat)
          << ',' << full(r.lambda1_hat) << ',' << full(r.v0_hat) << ','
          << full(r.v1_hat) << ',' << full(r.z) << ',' << (r.rejected ? 1 : 0)
          << ',' << r.flags << '\n';
    }
}

int run_simulate(const std::string& config_path, std::int64_t reps,
                 std::uint64_t seed, double true_ratio, bool have_true_ratio,
                 double n_screened, bool have_n, double tau, bool have_tau,
                 int workers, bool zero_rse, bool legacy_variance,
                 const std::string& dump_path, const CommonOutput& out) {
    const cf::StudyConfig cfg = cf::load_study_config(config_path);
    const double tau_used = have_tau ? tau : cfg.followup_tau;
    const cf::DesignContext ctx = cfg.make_context(tau_used);
    const cf::HypothesisSpec hyp = cfg.make_hypothesis();

    cf::SimulationConfig sim{ctx,
                             hyp,
                             have_true_ratio ? true_ratio : cfg.r1,
                             have_n ? n_screened
                                    : cf::sample_size(ctx, hyp).n_screened,
                             reps,
                             seed,
                             zero_rse,
                             legacy_variance ? cf::VarianceConvention::legacy_inctools
                                             : cfg.convention,
                             0.95};

    const std::vector<cf::ReplicateRecord> records =
        cf::run_replicates(sim, workers);
    if (!dump_path.empty()) dump_replicates(dump_path, records);
    const cf::SimulationReport rep = cf::summarize(records);

    if (rep.degenerate_rate_high)
        std::cerr << "warning: degenerate replicate rate "
                  << cf::format_significant(rep.degenerate_rate, 3)
                  << " exceeds 0.02\n";

    cf::ReportDocument doc;
    const int prec = out.precision;

    cf::ReportSection run;
    run.name = "simulation";
    run.columns = {"replicates", "n_used",     "n_degenerate",
                   "n_rejected", "rejection_rate", "degenerate_rate",
                   "n_screened", "true_ratio", "tau", "seed", "zero_rse"};
    run.rows.push_back(
        {cf::integer_value(rep.replicate_count),
         cf::integer_value(rep.moments.n_used),
         cf::integer_value(rep.n_degenerate), cf::integer_value(rep.n_rejected),
         cf::number_value(rep.rejection_rate, prec),
         cf::number_value(rep.degenerate_rate, prec),
         cf::integer_value(static_cast<std::int64_t>(sim.n_screened)),
         cf::number_value(sim.true_ratio, prec), cf::number_value(tau_used, prec),
         cf::integer_value(static_cast<std::int64_t>(seed)),
         cf::integer_value(zero_rse ? 1 : 0)});
    doc.sections.push_back(std::move(run));

    cf::ReportSection degen;
    degen.name = "degenerate_breakdown";
    degen.columns = {"reason", "count"};
    for (int b = 0; b < cf::degenerate_flag::count; ++b)
        degen.rows.push_back(
            {cf::text_value(cf::degenerate_flag::label(b)),
             cf::integer_value(rep.flag_counts[static_cast<std::size_t>(b)])});
    doc.sections.push_back(std::move(degen));

    const cf::MomentSummary& m = rep.moments;
    cf::ReportSection mom;
    mom.name = "moments";
    mom.columns = {"quantity", "value", "mc_se"};
    auto row = [&](const char* name, double v, double se, bool has_se) {
        mom.rows.push_back({cf::text_value(name), cf::number_value(v, prec),
                            has_se ? cf::number_value(se, prec)
                                   : cf::text_value("")});
    };
    row("mean_log_lambda0", m.mean_log_lambda0, 0, false);
    row("var_log_lambda0", m.var_log_lambda0, m.se_var_log_lambda0, true);
    row("mean_log_lambda1", m.mean_log_lambda1, 0, false);
    row("var_log_lambda1", m.var_log_lambda1, m.se_var_log_lambda1, true);
    row("cov_log_lambda", m.cov_log_lambda, m.se_cov_log_lambda, true);
    row("corr_log_lambda", m.corr_log_lambda, 0, false);
    row("mean_log_ratio", m.mean_log_ratio, 0, false);
    row("var_log_ratio", m.var_log_ratio, 0, false);
    row("mean_z", m.mean_z, 0, false);
    row("var_z", m.var_z, m.se_var_z, true);
    row("mean_v_hat", m.mean_v_hat, 0, false);
    doc.sections.push_back(std::move(mom));

    cf::render(doc, cf::parse_output_format(out.format), std::cout);
    return 0;
}

int run_estimate(double n, double n_positive, double n_recent, double enrolled,
                 double events, double tau, double mdri_days,
                 double mdri_rse_pct, double frr_pct, double frr_rse_pct,
                 double cutoff_years, double r0, double alpha,
                 double confidence, bool legacy_variance,
                 const CommonOutput& out) {
    const cf::AssayProperties assay(cutoff_years, mdri_days / cf::days_per_year,
                                    mdri_rse_pct / 100.0, frr_pct / 100.0,
                                    frr_rse_pct / 100.0);
    const cf::ScreeningCounts counts(n, n_positive, n_recent);
    const cf::TrialCounts trial(enrolled, events, tau);
    // r1 below r0 is immaterial here; the test only uses r0 and alpha.
    const cf::HypothesisSpec hyp(r0, r0 / 2.0, alpha, 0.9);

    const cf::IncidenceEstimate l0 = cf::lambda0_kassanjee(
        counts, assay,
        legacy_variance ? cf::VarianceConvention::legacy_inctools
                        : cf::VarianceConvention::full);
    const cf::IncidenceEstimate l1 = cf::lambda1_active_arm(trial);
    const cf::EfficacyResult eff = cf::efficacy_test(l0, l1, hyp, confidence);

    const int prec = out.precision;
    cf::ReportSection s;
    s.name = "estimate";
    s.columns = {"lambda0_hat", "v0_hat",   "lambda1_hat", "v1_hat",
                 "ratio_hat",   "rho_hat",  "rho_ci_lower", "rho_ci_upper",
                 "z_value",     "reject_h0"};
    s.rows.push_back({cf::number_value(l0.value, prec),
                      cf::number_value(*l0.log_variance, prec),
                      cf::number_value(l1.value, prec),
                      cf::number_value(*l1.log_variance, prec),
                      cf::number_value(eff.ratio_hat, prec),
                      cf::number_value(eff.rho_hat, prec),
                      cf::number_value(eff.ci_rho.first, prec),
                      cf::number_value(eff.ci_rho.second, prec),
                      cf::number_value(eff.z_value, prec),
                      cf::integer_value(eff.reject_h0 ? 1 : 0)});

    cf::ReportDocument doc;
    doc.sections.push_back(std::move(s));
    cf::render(doc, cf::parse_output_format(out.format), std::cout);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Trial-design toolkit for counterfactual-placebo HIV "
                 "incidence comparisons from recency-assay screening"};
    app.require_subcommand(1);

    // design
    auto* design = app.add_subcommand(
        "design", "Screening sample size and expected counts");
    std::string d_config;
    std::vector<double> d_taus;
    CommonOutput d_out;
    design->add_option("--config", d_config, "Study configuration file")
        ->required();
    design->add_option("--tau", d_taus,
                       "Follow-up durations in years (default: config value)")
        ->delimiter(',');
    add_output_flags(design, d_out);

    // simulate
    auto* simulate = app.add_subcommand(
        "simulate", "Monte Carlo rejection rates and moment oracles");
    std::string s_config, s_dump;
    std::int64_t s_reps = 10000;
    std::uint64_t s_seed = 1;
    double s_true_ratio = 0.0, s_n = 0.0, s_tau = 0.0;
    int s_workers = 0;
    bool s_zero_rse = false, s_legacy = false;
    CommonOutput s_out;
    simulate->add_option("--config", s_config, "Study configuration file")
        ->required();
    simulate->add_option("--reps", s_reps, "Number of replicates")
        ->default_val(10000)
        ->check(CLI::PositiveNumber);
    simulate->add_option("--seed", s_seed, "Master seed")->default_val(1);
    auto* opt_ratio = simulate->add_option(
        "--true-ratio", s_true_ratio,
        "Incidence ratio used for data generation (default: config r1)");
    auto* opt_n = simulate->add_option(
        "--n", s_n, "Screening size (default: computed sample size)");
    auto* opt_tau = simulate->add_option(
        "--tau", s_tau, "Follow-up in years (default: config value)");
    simulate->add_option("--workers", s_workers,
                         "Worker threads, 0 = hardware concurrency")
        ->default_val(0);
    simulate->add_flag("--zero-rse", s_zero_rse,
                       "Treat both assay RSEs as zero in generation and "
                       "estimation");
    simulate->add_flag("--legacy-variance", s_legacy,
                       "Drop the FRR-variance count term from V0_hat");
    simulate->add_option("--dump", s_dump,
                         "Write per-replicate CSV to this file");
    add_output_flags(simulate, s_out);

    // estimate
    auto* estimate = app.add_subcommand(
        "estimate", "Efficacy analysis from observed counts");
    double e_n = 0, e_npos = 0, e_nrec = 0, e_enrolled = 0, e_events = 0;
    double e_tau = 1.0, e_mdri_days = 0, e_mdri_rse = 0, e_frr = 0,
           e_frr_rse = 0, e_cutoff = 2.0, e_r0 = 0.5, e_alpha = 0.05,
           e_confidence = 0.95;
    bool e_legacy = false;
    CommonOutput e_out;
    estimate->add_option("--n", e_n, "Subjects screened")->required();
    estimate->add_option("--n-positive", e_npos, "HIV-positive at screening")
        ->required();
    estimate->add_option("--n-recent", e_nrec, "Recent among positives")
        ->required();
    estimate->add_option("--enrolled", e_enrolled, "Enrolled HIV-negative")
        ->required();
    estimate->add_option("--events", e_events, "Incident events on follow-up")
        ->required();
    estimate->add_option("--tau", e_tau, "Follow-up in years")->default_val(1.0);
    estimate->add_option("--mdri-days", e_mdri_days, "MDRI in days")
        ->required();
    estimate->add_option("--mdri-rse-pct", e_mdri_rse, "MDRI RSE in percent")
        ->default_val(0.0);
    estimate->add_option("--frr-pct", e_frr, "False-recent rate in percent")
        ->required();
    estimate->add_option("--frr-rse-pct", e_frr_rse, "FRR RSE in percent")
        ->default_val(0.0);
    estimate->add_option("--cutoff-years", e_cutoff, "Recency cutoff T in years")
        ->default_val(2.0);
    estimate->add_option("--r0", e_r0, "Null incidence ratio")->default_val(0.5);
    estimate->add_option("--alpha", e_alpha, "Two-sided test level")
        ->default_val(0.05);
    estimate->add_option("--confidence", e_confidence,
                         "Confidence level for the rho interval")
        ->default_val(0.95);
    estimate->add_flag("--legacy-variance", e_legacy,
                       "Drop the FRR-variance count term from V0_hat");
    add_output_flags(estimate, e_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (design->parsed()) return run_design(d_config, d_taus, d_out);
        if (simulate->parsed())
            return run_simulate(s_config, s_reps, s_seed, s_true_ratio,
                                opt_ratio->count() > 0, s_n, opt_n->count() > 0,
                                s_tau, opt_tau->count() > 0, s_workers,
                                s_zero_rse, s_legacy, s_dump, s_out);
        if (estimate->parsed())
            return run_estimate(e_n, e_npos, e_nrec, e_enrolled, e_events,
                                e_tau, e_mdri_days, e_mdri_rse, e_frr,
                                e_frr_rse, e_cutoff, e_r0, e_alpha,
                                e_confidence, e_legacy, e_out);
    } catch (const cf::InfeasibleDesignError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const cf::InfeasibleContextError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const cf::DegenerateEstimateError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const cf::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const cf::UnsupportedContextError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
