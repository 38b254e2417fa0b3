#include "counterfact/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "counterfact/errors.hpp"
#include "counterfact/population.hpp"

namespace counterfact {

namespace {

const char* const kStratumColumns[] = {
    "name",      "proportion", "incidence_pct", "prevalence_pct",
    "subtype",   "mdri_days",  "mdri_rse_pct",  "frr_pct"};
constexpr int kStratumColumnCount = 8;

[[noreturn]] void fail(const std::string& source, int line,
                       const std::string& msg) {
    throw ValidationError(source + ":" + std::to_string(line) + ": " + msg);
}

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream iss(line);
    std::string tok;
    while (iss >> tok) out.push_back(tok);
    return out;
}

double parse_number(const std::string& source, int line, const std::string& key,
                    const std::string& token) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(token, &used);
    } catch (const std::exception&) {
        fail(source, line, "field '" + key + "': '" + token + "' is not a number");
    }
    if (used != token.size() || !std::isfinite(value))
        fail(source, line, "field '" + key + "': '" + token + "' is not a number");
    return value;
}

bool parse_bool(const std::string& source, int line, const std::string& key,
                const std::string& token) {
    if (token == "true" || token == "1" || token == "yes") return true;
    if (token == "false" || token == "0" || token == "no") return false;
    fail(source, line, "field '" + key + "': expected true/false, got '" +
                           token + "'");
}

}  // namespace

StudyConfig parse_study_config(std::istream& in, const std::string& source) {
    std::map<std::string, std::pair<double, int>> globals;
    std::optional<bool> legacy;
    std::vector<std::vector<std::string>> stratum_rows;
    std::vector<int> stratum_lines;
    bool in_strata = false;
    bool header_seen = false;

    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::size_t hash = raw.find('#');
        std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
        const auto tokens = tokenize(line);
        if (tokens.empty()) continue;

        if (tokens.size() == 1 && tokens[0] == "[strata]") {
            if (in_strata) fail(source, line_no, "duplicate [strata] section");
            in_strata = true;
            continue;
        }

        if (!in_strata) {
            // key = value, with '=' either free-standing or glued.
            std::string joined;
            for (const auto& t : tokens) joined += t;
            const std::size_t eq = joined.find('=');
            if (eq == std::string::npos || eq == 0 || eq + 1 >= joined.size())
                fail(source, line_no, "expected 'key = value'");
            const std::string key = joined.substr(0, eq);
            const std::string value = joined.substr(eq + 1);
            if (key == "legacy_inctools_variance") {
                if (legacy) fail(source, line_no, "duplicate key '" + key + "'");
                legacy = parse_bool(source, line_no, key, value);
                continue;
            }
            if (globals.count(key))
                fail(source, line_no, "duplicate key '" + key + "'");
            globals[key] = {parse_number(source, line_no, key, value), line_no};
            continue;
        }

        if (!header_seen) {
            if (tokens.size() != kStratumColumnCount)
                fail(source, line_no,
                     "stratum header must list " +
                         std::to_string(kStratumColumnCount) + " columns");
            for (int i = 0; i < kStratumColumnCount; ++i)
                if (tokens[static_cast<std::size_t>(i)] != kStratumColumns[i])
                    fail(source, line_no,
                         "stratum column " + std::to_string(i + 1) +
                             " must be '" + kStratumColumns[i] + "', got '" +
                             tokens[static_cast<std::size_t>(i)] + "'");
            header_seen = true;
            continue;
        }

        if (tokens.size() != kStratumColumnCount)
            fail(source, line_no,
                 "stratum row has " + std::to_string(tokens.size()) +
                     " fields, expected " + std::to_string(kStratumColumnCount));
        stratum_rows.push_back(tokens);
        stratum_lines.push_back(line_no);
    }

    static const char* const required[] = {
        "cutoff_T_years", "frr_rse_pct", "enroll_rate", "followup_tau_years",
        "alpha",          "power",       "r0",          "r1"};
    for (const char* key : required)
        if (!globals.count(key))
            throw ValidationError(source + ": missing required key '" +
                                  std::string(key) + "'");
    for (const auto& [key, entry] : globals) {
        bool known = false;
        for (const char* k : required) known = known || key == k;
        if (!known) fail(source, entry.second, "unknown key '" + key + "'");
    }
    if (!header_seen)
        throw ValidationError(source + ": missing [strata] section");
    if (stratum_rows.empty())
        throw ValidationError(source + ": [strata] section has no rows");

    StudyConfig cfg{};
    cfg.cutoff_t_years = globals["cutoff_T_years"].first;
    cfg.frr_rse = globals["frr_rse_pct"].first / 100.0;
    cfg.enroll_rate = globals["enroll_rate"].first;
    cfg.followup_tau = globals["followup_tau_years"].first;
    cfg.alpha = globals["alpha"].first;
    cfg.power = globals["power"].first;
    cfg.r0 = globals["r0"].first;
    cfg.r1 = globals["r1"].first;
    cfg.convention = legacy.value_or(false) ? VarianceConvention::legacy_inctools
                                            : VarianceConvention::full;

    for (std::size_t i = 0; i < stratum_rows.size(); ++i) {
        const auto& row = stratum_rows[i];
        const int at = stratum_lines[i];
        const std::string& name = row[0];
        const double proportion = parse_number(source, at, "proportion", row[1]);
        const double incidence =
            parse_number(source, at, "incidence_pct", row[2]) / 100.0;
        const double prevalence =
            parse_number(source, at, "prevalence_pct", row[3]) / 100.0;
        const std::string& subtype = row[4];

        const bool na[3] = {row[5] == "NA", row[6] == "NA", row[7] == "NA"};
        std::optional<AssayProperties> assay;
        if (na[0] != na[1] || na[1] != na[2])
            fail(source, at,
                 "stratum '" + name +
                     "': assay columns (mdri_days, mdri_rse_pct, frr_pct) "
                     "must be all NA or all numeric");
        if (!na[0]) {
            const double mdri_days = parse_number(source, at, "mdri_days", row[5]);
            const double mdri_rse =
                parse_number(source, at, "mdri_rse_pct", row[6]) / 100.0;
            const double frr = parse_number(source, at, "frr_pct", row[7]) / 100.0;
            try {
                assay.emplace(cfg.cutoff_t_years, mdri_days / days_per_year,
                              mdri_rse, frr, cfg.frr_rse);
            } catch (const ValidationError& e) {
                fail(source, at, "stratum '" + name + "': " + e.what());
            }
        }
        try {
            cfg.strata.emplace_back(name, proportion, incidence, prevalence,
                                    subtype, std::move(assay));
        } catch (const ValidationError& e) {
            fail(source, at, "stratum '" + name + "': " + e.what());
        }
    }

    // Cross-field checks that only make sense once everything is read.
    try {
        (void)cfg.make_hypothesis();
        (void)cfg.make_context();
    } catch (const ValidationError& e) {
        throw ValidationError(source + ": " + e.what());
    }
    return cfg;
}

StudyConfig load_study_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open config file '" + path + "'");
    return parse_study_config(in, path);
}

DesignContext StudyConfig::make_context() const {
    return make_context(followup_tau);
}

DesignContext StudyConfig::make_context(double followup_tau_years) const {
    DesignContext pooled = pool_strata(strata, enroll_rate, followup_tau_years,
                                       frr_rse, cutoff_t_years);
    return pooled;
}

HypothesisSpec StudyConfig::make_hypothesis() const {
    return HypothesisSpec(r0, r1, alpha, power);
}

}  // namespace counterfact
