// The recursive LLR / partial-sum engine on the code tree and the plain
// successive-cancellation decoder. The trellis keeps one LLR array and one
// decision array per stage; every (stage, block, symbol) slot has a unique
// writer bit, so rewinding the cursor and re-deciding a suffix reproduces a
// fresh decode of the prefix exactly.

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "polarfec/polar_code.hpp"

namespace polarfec {

/// LLRs are clamped to this magnitude before conversion to branch
/// log-probabilities, keeping path metrics finite.
constexpr double kLlrClamp = 40.0;

/// Check-node combination 2 atanh(tanh(a/2) tanh(b/2)), evaluated in the
/// exact Jacobian form, safe for large magnitudes.
inline double f_minus(double a, double b) {
    const double sign = ((a < 0.0) != (b < 0.0)) ? -1.0 : 1.0;
    const double mag = std::min(std::abs(a), std::abs(b));
    return sign * mag + std::log1p(std::exp(-std::abs(a + b))) -
           std::log1p(std::exp(-std::abs(a - b)));
}

/// Min-sum approximation of f_minus, for speed studies only: the Fano and
/// list path metrics are probability-based and need the exact rule.
inline double f_minus_minsum(double a, double b) {
    const double sign = ((a < 0.0) != (b < 0.0)) ? -1.0 : 1.0;
    return sign * std::min(std::abs(a), std::abs(b));
}

/// Variable-node combination b + (1-2u) a.
inline double g_plus(double a, double b, int u) { return u ? b - a : b + a; }

struct BranchLogProbs {
    double lp0; ///< log Pr(bit = 0)
    double lp1; ///< log Pr(bit = 1)
};

/// Log-sigmoid pair for a decision LLR, overflow-safe; exp(lp0) + exp(lp1) = 1.
inline BranchLogProbs branch_log_probs(double llr) {
    const double l = std::clamp(llr, -kLlrClamp, kLlrClamp);
    double lp0, lp1;
    if (l >= 0.0) {
        lp1 = -l - std::log1p(std::exp(-l));
        lp0 = -std::log1p(std::exp(-l));
    } else {
        lp0 = l - std::log1p(std::exp(l));
        lp1 = -std::log1p(std::exp(l));
    }
    return {lp0, lp1};
}

struct DecodeResult {
    BitVector u_hat;        ///< estimated message vector, length N
    uint64_t visits = 0;    ///< decoded-bit events
    bool truncated = false; ///< a visit cap forced a greedy finish
};

/// Rewindable SC computation: stage d holds the branch LLRs of the depth-d
/// subdecoders (d = 0 is the decision level, d = n the channel). One
/// instance serves one frame and is single-threaded.
class ScTrellis {
public:
    ScTrellis(int n, LlrVector channel, bool min_sum = false)
        : n_(n), size_(1 << n), min_sum_(min_sum), llr_(n + 1), dec_(n + 1) {
        if (int(channel.size()) != size_)
            throw std::invalid_argument("ScTrellis: channel LLR length does not match 2^n");
        for (int d = 0; d <= n_; ++d) {
            llr_[d].assign(size_, 0.0);
            dec_[d].assign(size_, 0);
        }
        llr_[n_] = std::move(channel);
    }

    int length() const { return size_; }
    int cursor() const { return cursor_; }

    /// Decision LLR log(Pr(u_i=0|..)/Pr(u_i=1|..)) for the bit at the cursor.
    double decision_llr(int i) {
        if (i != cursor_) throw std::logic_error("ScTrellis::decision_llr: cursor mismatch");
        if (n_ == 0) return llr_[0][0];
        const int dmax = (i == 0) ? n_ - 1 : std::countr_zero(uint32_t(i));
        for (int d = dmax; d >= 0; --d) {
            const int width = size_ >> d;
            const int m = i >> d;       // symbol index within each block
            const int k = m >> 1;       // child symbol index
            for (int o = 0; o < size_; o += width) {
                const double a = llr_[d + 1][o + k];
                const double b = llr_[d + 1][o + width / 2 + k];
                llr_[d][o + m] = (m & 1) ? g_plus(a, b, dec_[d][o + m - 1])
                                         : (min_sum_ ? f_minus_minsum(a, b) : f_minus(a, b));
            }
        }
        return llr_[0][i];
    }

    /// Record the decision for bit i, propagate partial sums, advance cursor.
    void decide(int i, int bit) {
        if (i != cursor_) throw std::logic_error("ScTrellis::decide: cursor mismatch");
        dec_[0][i] = uint8_t(bit);
        int m = i;
        for (int d = 0; d < n_ && (m & 1); ++d) {
            const int width = size_ >> d;
            const int k = m >> 1;
            for (int o = 0; o < size_; o += width) {
                dec_[d + 1][o + k] = uint8_t(dec_[d][o + 2 * k] ^ dec_[d][o + 2 * k + 1]);
                dec_[d + 1][o + width / 2 + k] = dec_[d][o + 2 * k + 1];
            }
            m = k;
        }
        ++cursor_;
    }

    /// Move the cursor back to bit i; re-deciding forward reproduces a fresh
    /// decode of the (unchanged) prefix.
    void rewind(int i) {
        if (i < 0 || i > cursor_) throw std::logic_error("ScTrellis::rewind: bad target");
        cursor_ = i;
    }

    /// Decisions made so far (entries at indices >= cursor are stale).
    const BitVector& decisions() const { return dec_[0]; }

    /// Re-encoded codeword; valid once all N bits are decided.
    const BitVector& codeword() const { return dec_[n_]; }

private:
    int n_;
    int size_;
    bool min_sum_ = false;
    std::vector<LlrVector> llr_;
    std::vector<BitVector> dec_;
    int cursor_ = 0;
};

/// Plain SC decoding: frozen bits read 0, information bits take the sign of
/// the decision LLR (ties to 0). Visit count is N.
inline DecodeResult sc_decode(const LlrVector& llr, const PolarCode& code) {
    if (int(llr.size()) != code.N)
        throw std::invalid_argument("sc_decode: LLR length does not match N");
    ScTrellis trellis(code.n, llr);
    DecodeResult res;
    res.u_hat.assign(code.N, 0);
    for (int i = 0; i < code.N; ++i) {
        const double l = trellis.decision_llr(i);
        const int bit = code.frozen[i] ? 0 : (l < 0.0 ? 1 : 0);
        trellis.decide(i, bit);
        res.u_hat[i] = uint8_t(bit);
    }
    res.visits = uint64_t(code.N);
    return res;
}

} // namespace polarfec
