// Polar code construction and encoding: bit-reversal permutation, the
// Kronecker-power transform x = u B G, and Gaussian-approximation density
// evolution for the per-channel error probabilities that drive the
// information-set selection.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace polarfec {

using BitVector = std::vector<uint8_t>;
using LlrVector = std::vector<double>;

/// Bit-reversal permutation on {0..2^n-1}: perm[i] reverses the n-bit
/// binary expansion of i. An involution.
inline std::vector<uint32_t> bit_reversal_permutation(int n) {
    if (n < 0) throw std::invalid_argument("bit_reversal_permutation: n must be >= 0");
    const uint32_t size = 1u << n;
    std::vector<uint32_t> perm(size);
    for (uint32_t i = 0; i < size; ++i) {
        uint32_t r = 0;
        for (int b = 0; b < n; ++b)
            r |= ((i >> b) & 1u) << (n - 1 - b);
        perm[i] = r;
    }
    return perm;
}

namespace ga {

// Mean-LLR transfer function of the variance-matched Gaussian family.
// Three pieces: a small-x series (the usual exponential fit exceeds 1
// there), the exponential fit, and the large-x asymptote. The fit and the
// asymptote cross near x = 14.5; switching at the crossing keeps phi
// decreasing everywhere, which the bisection inverse requires.
inline double phi(double x) {
    if (x <= 0.0) return 1.0;
    if (x < 0.3) return 1.0 - 0.5 * x + 0.25 * x * x;
    if (x < 14.5) return std::exp(-0.4527 * std::pow(x, 0.86) + 0.0218);
    return std::sqrt(M_PI / x) * std::exp(-x / 4.0) * (1.0 - 10.0 / (7.0 * x));
}

/// Inverse of phi by bisection on [0, hi], absolute tolerance 1e-9.
inline double phi_inv(double y, double hi) {
    if (y >= 1.0) return 0.0;
    double lo = 0.0;
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        if (phi(mid) > y)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Error probability of a consistent-Gaussian LLR with mean m: Q(sqrt(m/2)).
inline double mean_to_pe(double m) {
    return 0.5 * std::erfc(std::sqrt(std::max(m, 0.0)) / 2.0);
}

/// Check-node (minus) update on the mean: phi_inv(1 - (1 - phi(m))^2).
inline double mean_minus(double m) {
    if (m <= 0.0) return 0.0;
    const double p = phi(m);
    return phi_inv(p * (2.0 - p), m);
}

/// Variable-node (plus) update on the mean.
inline double mean_plus(double m) { return 2.0 * m; }

} // namespace ga

/// A polar code (N = 2^n, K, information set) with the per-channel error
/// probabilities produced at construction time.
struct PolarCode {
    int n = 0;                      ///< exponent, N = 2^n
    int N = 0;                      ///< code length
    int K = 0;                      ///< information bits
    double design_snr_db = 0.0;     ///< Eb/N0 (dB) used by construction
    std::vector<uint32_t> info_set; ///< 0-based information indices, ascending
    std::vector<double> pe;         ///< per-channel error probability, natural order
    std::vector<uint8_t> frozen;    ///< frozen[i] = 1 iff i carries a frozen zero

    double rate() const { return N > 0 ? double(K) / double(N) : 0.0; }
};

/// Gaussian-approximation density evolution over a BI-AWGN channel at
/// design_snr_db (Eb/N0 with rate K/2^n), selecting the K most reliable
/// channels. Ties prefer the larger index. Deterministic.
inline PolarCode construct_code(int n, int K, double design_snr_db) {
    if (n < 0) throw std::invalid_argument("construct_code: n must be >= 0");
    const int N = 1 << n;
    if (K < 0 || K > N) throw std::invalid_argument("construct_code: K must be in [0, N]");

    PolarCode code;
    code.n = n;
    code.N = N;
    code.K = K;
    code.design_snr_db = design_snr_db;

    const double rate = K > 0 ? double(K) / double(N) : 1.0;
    const double mean0 = 4.0 * rate * std::pow(10.0, design_snr_db / 10.0);

    // Mean-LLR recursion in natural channel order: index 2k gets the minus
    // branch, 2k+1 the plus branch, per level.
    std::vector<double> means{mean0};
    for (int level = 0; level < n; ++level) {
        std::vector<double> next(means.size() * 2);
        for (size_t k = 0; k < means.size(); ++k) {
            next[2 * k] = ga::mean_minus(means[k]);
            next[2 * k + 1] = ga::mean_plus(means[k]);
        }
        means = std::move(next);
    }

    code.pe.resize(N);
    for (int i = 0; i < N; ++i) code.pe[i] = ga::mean_to_pe(means[i]);

    std::vector<uint32_t> order(N);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        if (code.pe[a] != code.pe[b]) return code.pe[a] < code.pe[b];
        return a > b; // equal reliability: later channel wins
    });

    code.info_set.assign(order.begin(), order.begin() + K);
    std::sort(code.info_set.begin(), code.info_set.end());

    code.frozen.assign(N, 1);
    for (uint32_t i : code.info_set) code.frozen[i] = 0;
    return code;
}

/// Polar transform x = u B_N G_N over GF(2). u must have length N with
/// zeros on frozen positions.
inline BitVector encode(const BitVector& u, const PolarCode& code) {
    if (int(u.size()) != code.N)
        throw std::invalid_argument("encode: message length " + std::to_string(u.size()) +
                                    " does not match N = " + std::to_string(code.N));
    BitVector b = u;
    for (int stride = 1; stride < code.N; stride <<= 1)
        for (int base = 0; base < code.N; base += 2 * stride)
            for (int k = 0; k < stride; ++k)
                b[base + k] = uint8_t(b[base + k] ^ b[base + k + stride]);

    const auto rev = bit_reversal_permutation(code.n);
    BitVector x(code.N);
    for (int i = 0; i < code.N; ++i) x[i] = b[rev[i]];
    return x;
}

} // namespace polarfec
