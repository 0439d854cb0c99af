// SC-Fano decoding: successive cancellation with Fano-style forward and
// backward movement over the code tree, governed by a dynamic threshold T
// with step delta. The path metric normalizes each branch log-probability
// by log(1 - P_e,i), so a correct path hovers near zero regardless of
// length and the threshold tests stay depth-fair.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "polarfec/polar_code.hpp"
#include "polarfec/sc_decoder.hpp"

namespace polarfec {

/// One path-metric accumulation step: prev + branch_logp - log(1 - pe).
inline double metric_step(double prev, double branch_logp, double pe) {
    if (pe < 0.0 || pe >= 1.0)
        throw std::invalid_argument("metric_step: pe must be in [0, 1)");
    return prev + branch_logp - std::log1p(-pe);
}

/// Raise T in steps of delta while T + delta < tau.
inline double threshold_update(double T, double delta, double tau) {
    while (T + delta < tau) T += delta;
    return T;
}

struct BackwardResult {
    double T;
    int j;
    int B; ///< 1: re-examine the info bit just backed out of; 0: T lowered, go forward
};

/// Walk toward the root. beta and gamma are 0-based (beta[k] is the metric
/// recorded at the (k+1)-th information decision). Stops at the first
/// good-path branch (gamma = 0) it backs out of; if the parent metric falls
/// below T (or the root is reached past a bad-path first bit), lowers T by
/// delta and resumes forward.
inline BackwardResult backward_move(const std::vector<double>& beta, int j, double T,
                                    double delta, const std::vector<uint8_t>& gamma) {
    while (true) {
        const double mu = (j >= 2) ? beta[j - 2] : 0.0;
        if (j == 0 || mu < T) return {T - delta, j, 0};
        --j;
        if (gamma[j] == 0) return {T, j, 1};
    }
}

struct FanoTraceEvent {
    enum class Kind { Forward, Backward, ThresholdDown, ThresholdUp };
    Kind kind;
    int i;            ///< 1-based bit index the move concerns
    int j;            ///< information bits decided after the move
    double threshold; ///< T after the move
    double metric;    ///< path metric the move was judged on
    int bit;          ///< decided bit for forward moves, -1 otherwise
};

struct FanoOptions {
    double delta = 1.0;
    uint64_t max_visits = 0;   ///< 0 selects the default 200 N
    bool frozen_metric = true; ///< accumulate metric increments at frozen indices
    std::function<void(const FanoTraceEvent&)> trace;
};

/// SC-Fano decoding of one frame. Visit count is the number of forward
/// index advances, frozen or information, including repeats after rewinds;
/// backward steps decode nothing and cost no visits.
inline DecodeResult fano_decode(const LlrVector& llr, const PolarCode& code,
                                const FanoOptions& opt) {
    if (int(llr.size()) != code.N)
        throw std::invalid_argument("fano_decode: LLR length does not match N");
    if (!(opt.delta > 0.0)) throw std::invalid_argument("fano_decode: delta must be > 0");
    const uint64_t cap = opt.max_visits ? opt.max_visits : 200ull * uint64_t(code.N);
    if (cap < uint64_t(code.N))
        throw std::invalid_argument("fano_decode: max_visits must be at least N");

    const int N = code.N;
    const int K = code.K;
    const auto& info = code.info_set;

    ScTrellis trellis(code.n, llr);
    DecodeResult res;
    res.u_hat.assign(N, 0);

    // T lives on the lattice {-delta, -2 delta, ...} and never rises above
    // -delta: the normalized metric of a correct path hovers near 0 but can
    // sit slightly above it, and a threshold at or above 0 would chase such
    // paths and trigger root-deep unwinds on their first dip. Keeping T one
    // step below the origin makes the large-delta limit exactly plain SC.
    const double t_top = -opt.delta;
    double T = t_top;
    double cum = 0.0; // path metric of the decided prefix
    int i = 0;
    int j = 0;
    int B = 0;
    std::vector<double> beta(K, 0.0);
    std::vector<uint8_t> gamma(K, 0);
    std::vector<double> pre(K, 0.0); // metric just before each info decision
    uint64_t visits = 0;

    // One-slot memo: a threshold drop re-examines the same branch pair in
    // place, so serve it instead of recomputing.
    bool memo_valid = false;
    int memo_i = -1;
    double memo_m0 = 0.0, memo_m1 = 0.0;

    const auto emit = [&](FanoTraceEvent::Kind kind, int i1, int jj, double metric, int bit) {
        if (opt.trace) opt.trace({kind, i1, jj, T, metric, bit});
    };

    const auto greedy_finish = [&]() {
        res.truncated = true;
        while (i < N) {
            const double l = trellis.decision_llr(i);
            const int bit = code.frozen[i] ? 0 : (l < 0.0 ? 1 : 0);
            trellis.decide(i, bit);
            res.u_hat[i] = uint8_t(bit);
            ++i;
            ++visits;
        }
    };

    const auto backtrack = [&](double stuck_metric) {
        const int stuck_i = i;
        const auto mv = backward_move(beta, j, T, opt.delta, gamma);
        T = mv.T;
        j = mv.j;
        B = mv.B;
        if (j >= K) throw std::logic_error("fano_decode: info slot out of range");
        i = int(info[j]);
        trellis.rewind(i);
        cum = pre[j];
        if (i != stuck_i) memo_valid = false;
        if (mv.B == 1)
            emit(FanoTraceEvent::Kind::Backward, stuck_i + 1, j, stuck_metric, -1);
        else
            emit(FanoTraceEvent::Kind::ThresholdDown, i + 1, j, stuck_metric, -1);
    };

    // Zero-advance iterations only move T, which cannot cycle; the guard is
    // a hard stop for arithmetic pathologies.
    uint64_t iterations = 0;
    const uint64_t iteration_cap = 64 * cap + 4096;

    while (i < N) {
        if (++iterations > iteration_cap) {
            greedy_finish();
            break;
        }

        if (code.frozen[i]) {
            const double l = trellis.decision_llr(i);
            if (opt.frozen_metric) cum = metric_step(cum, branch_log_probs(l).lp0, code.pe[i]);
            trellis.decide(i, 0);
            res.u_hat[i] = 0;
            ++i;
            ++visits;
            memo_valid = false;
            emit(FanoTraceEvent::Kind::Forward, i, j, cum, 0);
            if (visits >= cap && i < N) {
                greedy_finish();
                break;
            }
            continue;
        }

        // Information index: i == info[j].
        pre[j] = cum;
        double m0, m1;
        if (memo_valid && memo_i == i) {
            m0 = memo_m0;
            m1 = memo_m1;
        } else {
            const auto lp = branch_log_probs(trellis.decision_llr(i));
            m0 = metric_step(cum, lp.lp0, code.pe[i]);
            m1 = metric_step(cum, lp.lp1, code.pe[i]);
            memo_valid = true;
            memo_i = i;
            memo_m0 = m0;
            memo_m1 = m1;
        }
        const int bmax = (m0 >= m1) ? 0 : 1;
        const double mx = (bmax == 0) ? m0 : m1;
        const double mn = (bmax == 0) ? m1 : m0;

        bool advanced = false;
        if (mx > T) {
            if (B == 0) {
                const double mu = (j == 0) ? 0.0 : beta[j - 1];
                trellis.decide(i, bmax);
                res.u_hat[i] = uint8_t(bmax);
                beta[j] = mx;
                gamma[j] = 0;
                if (mu < T + opt.delta) {
                    const double raised =
                        std::min(threshold_update(T, opt.delta, beta[j]), t_top);
                    if (raised != T) {
                        T = raised;
                        emit(FanoTraceEvent::Kind::ThresholdUp, i + 1, j + 1, beta[j], -1);
                    }
                }
                cum = mx;
                ++i;
                ++j;
                advanced = true;
                emit(FanoTraceEvent::Kind::Forward, i, j, cum, bmax);
            } else if (mn > T) {
                const int bmin = 1 - bmax;
                trellis.decide(i, bmin);
                res.u_hat[i] = uint8_t(bmin);
                beta[j] = mn;
                gamma[j] = 1;
                cum = mn;
                ++i;
                ++j;
                B = 0;
                advanced = true;
                emit(FanoTraceEvent::Kind::Forward, i, j, cum, bmin);
            } else if (j == 0) {
                T -= opt.delta;
                B = 0;
                emit(FanoTraceEvent::Kind::ThresholdDown, i + 1, j, mn, -1);
            } else {
                backtrack(mn);
            }
        } else if (j == 0) {
            T -= opt.delta;
            B = 0;
            emit(FanoTraceEvent::Kind::ThresholdDown, i + 1, j, mx, -1);
        } else {
            backtrack(mx);
        }

        if (advanced) {
            memo_valid = false;
            ++visits;
            if (visits >= cap && i < N) {
                greedy_finish();
                break;
            }
        }
    }

    res.visits = visits;
    return res;
}

inline DecodeResult fano_decode(const LlrVector& llr, const PolarCode& code, double delta,
                                uint64_t max_visits = 0) {
    FanoOptions opt;
    opt.delta = delta;
    opt.max_visits = max_visits;
    return fano_decode(llr, code, opt);
}

} // namespace polarfec
