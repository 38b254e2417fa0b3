#pragma once

namespace counterfact {

// Standard normal CDF, accurate to ~1e-16 relative via erfc.
double normal_cdf(double x);

// Standard normal quantile (inverse CDF) for c in (0,1).
// Wichura's PPND16 rational approximations plus one Newton polish, so
// |normal_cdf(q) - c| stays below 1e-12 across the whole range.
// Throws ValidationError outside (0,1).
double standard_normal_quantile(double c);

}  // namespace counterfact
