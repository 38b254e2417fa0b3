#pragma once

#include <stdexcept>
#include <string>

namespace counterfact {

// ---------------------------------------------------------------------------
// Error hierarchy
//
// Every failure mode maps onto one of four families, which the CLI turns
// into exit codes: validation (1), infeasible design/context (2),
// degenerate data at estimation or simulation time (3).
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad inputs: type invariants violated, config files that do not parse,
// misuse of the library API.
struct ValidationError : Error {
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

// A context whose derived quantities leave their domain, e.g. P_R outside
// (0,1). The design parameters themselves are self-consistent but no
// analysis can be built on them.
struct InfeasibleContextError : Error {
    explicit InfeasibleContextError(const std::string& msg) : Error(msg) {}
};

// Requested operating characteristics are unreachable at any sample size:
// the sample-size denominator is nonpositive. Carries the detectability
// floor (a bound on log R1) so callers can report how far away the
// requested alternative is.
struct InfeasibleDesignError : Error {
    InfeasibleDesignError(const std::string& msg, double floor_log_r1)
        : Error(msg), boundary_log_r1(floor_log_r1) {}
    double boundary_log_r1;
};

// An operation defined only for a restricted context was called outside it
// (e.g. the W-covariance closed forms, which require zero assay RSEs).
struct UnsupportedContextError : Error {
    explicit UnsupportedContextError(const std::string& msg) : Error(msg) {}
};

// Observed (or simulated) counts on which the requested estimate is
// undefined: zero events, recents not exceeding expected false recents, …
struct DegenerateEstimateError : Error {
    explicit DegenerateEstimateError(const std::string& msg) : Error(msg) {}
};

}  // namespace counterfact
