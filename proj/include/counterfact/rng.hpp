#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace counterfact {

// ---------------------------------------------------------------------------
// Counter-based splittable random streams.
//
// Each (master_seed, index) pair addresses an independent xoshiro256++
// stream whose state is derived by hashing the pair through splitmix64.
// Replicate i of a simulation always uses stream i, so results do not
// depend on how replicates are distributed over worker threads.
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t index) {
        // Multiply-xor folds the counter into the seed far apart for
        // neighboring indices; splitmix64 then fills the state words.
        std::uint64_t h = master_seed ^ (index * 0xA0761D6478BD642FULL);
        for (auto& w : s_) w = splitmix64(h);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on [0, 1), 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1]; safe as a log() argument.
    double uniform_pos() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Box-Muller without caching: every call consumes exactly two uniforms,
    // which keeps the draw layout of a replicate independent of how many
    // normals preceded it.
    double normal(double mu, double sigma) {
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        return mu + sigma * mag * std::cos(2.0 * M_PI * u2);
    }

    std::int64_t binomial(std::int64_t n, double p);
    std::int64_t poisson(double mu);

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::int64_t binomial_inversion(std::int64_t n, double p);
    std::int64_t binomial_btrs(std::int64_t n, double p);

    std::array<std::uint64_t, 4> s_;
};

namespace detail {

// Correction term of Stirling's series for log(k!); tabulated for small k,
// asymptotic tail otherwise (same scheme as the classic BTRS references).
inline double stirling_tail(double k) {
    static const double table[16] = {
        0.08106146679532726, 0.04134069595540929, 0.02767792568499834,
        0.02079067210376509, 0.01664469118982119, 0.01387612882307075,
        0.01189670994589177, 0.01041126526197209, 0.009255462182712733,
        0.008330563433362871, 0.007573675487951841, 0.006942840107209530,
        0.006408994188004207, 0.005951370112758848, 0.005554733551962801,
        0.005207655919609640};
    if (k < 16.0) return table[static_cast<int>(k)];
    const double kp1 = k + 1.0;
    const double kp1sq = kp1 * kp1;
    return (1.0 / 12.0 - (1.0 / 360.0 - 1.0 / 1260.0 / kp1sq) / kp1sq) / kp1;
}

}  // namespace detail

// CDF inversion by sequential search; one uniform, O(np) iterations.
// Used when n*p is small enough that (1-p)^n stays well above underflow.
inline std::int64_t RngStream::binomial_inversion(std::int64_t n, double p) {
    double u = uniform();
    std::int64_t k = 0;
    double f = std::exp(static_cast<double>(n) * std::log1p(-p));  // P(X = 0)
    const double ratio = p / (1.0 - p);
    while (u > f && k < n) {
        u -= f;
        ++k;
        f *= ratio * static_cast<double>(n - k + 1) / static_cast<double>(k);
    }
    return k;
}

// Transformed-rejection sampler (BTRS, Hormann 1993) for n*p >= 10, p <= 1/2.
// Exact: candidates from a fitted triangular transform are accepted against
// the true pmf, with the cheap squeeze handling ~86% of draws.
inline std::int64_t RngStream::binomial_btrs(std::int64_t n, double p) {
    const double nd = static_cast<double>(n);
    const double q = 1.0 - p;
    const double spq = std::sqrt(nd * p * q);
    const double b = 1.15 + 2.53 * spq;
    const double a = -0.0873 + 0.0248 * b + 0.01 * p;
    const double c = nd * p + 0.5;
    const double vr = 0.92 - 4.2 / b;
    const double alpha = (2.83 + 5.1 / b) * spq;
    const double lpq = std::log(p / q);
    const double m = std::floor((nd + 1.0) * p);  // mode

    for (;;) {
        const double u = uniform() - 0.5;
        const double v = uniform();
        const double us = 0.5 - std::fabs(u);
        const double kd = std::floor((2.0 * a / us + b) * u + c);
        if (kd < 0.0 || kd > nd) continue;
        if (us >= 0.07 && v <= vr) return static_cast<std::int64_t>(kd);

        // Full acceptance test against the pmf ratio to the mode.
        const double lhs = std::log(v * alpha / (a / (us * us) + b));
        const double rhs = (m + 0.5) * std::log((m + 1.0) / ((nd - m + 1.0))) -
                           (kd + 0.5) * std::log((kd + 1.0) / ((nd - kd + 1.0))) +
                           (kd - m) * lpq +
                           (nd + 1.0) * std::log((nd - m + 1.0) / (nd - kd + 1.0)) +
                           detail::stirling_tail(m) + detail::stirling_tail(nd - m) -
                           detail::stirling_tail(kd) - detail::stirling_tail(nd - kd);
        if (lhs <= rhs) return static_cast<std::int64_t>(kd);
    }
}

inline std::int64_t RngStream::binomial(std::int64_t n, double p) {
    if (n <= 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    const double pt = p <= 0.5 ? p : 1.0 - p;
    const std::int64_t k = (static_cast<double>(n) * pt < 10.0)
                               ? binomial_inversion(n, pt)
                               : binomial_btrs(n, pt);
    return p <= 0.5 ? k : n - k;
}

inline std::int64_t RngStream::poisson(double mu) {
    if (!(mu > 0.0)) return 0;
    if (mu < 10.0) {
        // Knuth's product-of-uniforms; exact and fast for small means.
        const double limit = std::exp(-mu);
        std::int64_t k = 0;
        double prod = 1.0;
        do {
            ++k;
            prod *= uniform();
        } while (prod > limit);
        return k - 1;
    }
    // Transformed-rejection sampler (PTRS, Hormann 1993) for mu >= 10.
    const double b = 0.931 + 2.53 * std::sqrt(mu);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    const double lmu = std::log(mu);

    for (;;) {
        const double u = uniform() - 0.5;
        const double v = uniform();
        const double us = 0.5 - std::fabs(u);
        const double kd = std::floor((2.0 * a / us + b) * u + mu + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<std::int64_t>(kd);
        if (kd < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            kd * lmu - mu - std::lgamma(kd + 1.0))
            return static_cast<std::int64_t>(kd);
    }
}

}  // namespace counterfact
