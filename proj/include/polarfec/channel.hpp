// BPSK over AWGN: modulation, noise injection and channel LLRs, with a
// counter-based RNG (Philox4x32-10) giving per-frame substreams keyed by
// (seed, stream, frame) so simulation results do not depend on worker
// count or execution order.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "polarfec/polar_code.hpp"

namespace polarfec {

/// Philox4x32-10 counter-based generator (Random123 constants).
struct Philox4x32 {
    using Block = std::array<uint32_t, 4>;

    static Block generate(uint64_t key, Block ctr) {
        uint32_t k0 = uint32_t(key);
        uint32_t k1 = uint32_t(key >> 32);
        for (int round = 0; round < 10; ++round) {
            const uint64_t p0 = uint64_t(0xD2511F53u) * ctr[0];
            const uint64_t p1 = uint64_t(0xCD9E8D57u) * ctr[2];
            ctr = {uint32_t(p1 >> 32) ^ ctr[1] ^ k0, uint32_t(p1),
                   uint32_t(p0 >> 32) ^ ctr[3] ^ k1, uint32_t(p0)};
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        return ctr;
    }
};

/// One frame's random substream. Identical (seed, stream, frame) triples
/// replay the identical sequence of draws.
class FrameRng {
public:
    FrameRng(uint64_t seed, uint32_t stream, uint32_t frame)
        : seed_(seed), stream_(stream), frame_(frame) {}

    uint32_t next_u32() {
        if (pos_ == 4) {
            block_ = Philox4x32::generate(seed_, {counter_++, frame_, stream_, 0u});
            pos_ = 0;
        }
        return block_[pos_++];
    }

    /// Uniform draw in the open interval (0, 1).
    double next_uniform() {
        const uint64_t hi = next_u32(), lo = next_u32();
        const uint64_t bits = (hi << 32) | lo;
        return double(bits >> 11) * 0x1.0p-53 + 0x1.0p-54;
    }

    /// Standard Gaussian via Box-Muller; draws come in cached pairs.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * M_PI * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

private:
    uint64_t seed_;
    uint32_t stream_;
    uint32_t frame_;
    uint32_t counter_ = 0;
    Philox4x32::Block block_{};
    int pos_ = 4;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// Channel parameterization with unit-energy BPSK symbols.
struct ChannelParams {
    double snr_db = 0.0;  ///< as given (Eb/N0 by default)
    double rate = 1.0;    ///< K/N
    double sigma2 = 1.0;  ///< noise variance per real dimension

    static ChannelParams from_ebn0(double ebn0_db, double rate) {
        ChannelParams p;
        p.snr_db = ebn0_db;
        p.rate = rate;
        p.sigma2 = 1.0 / (2.0 * rate * std::pow(10.0, ebn0_db / 10.0));
        return p;
    }

    static ChannelParams from_esn0(double esn0_db, double rate) {
        ChannelParams p;
        p.snr_db = esn0_db;
        p.rate = rate;
        p.sigma2 = 1.0 / (2.0 * std::pow(10.0, esn0_db / 10.0));
        return p;
    }

    static ChannelParams from_sigma2(double sigma2, double rate) {
        ChannelParams p;
        p.snr_db = 10.0 * std::log10(1.0 / (2.0 * rate * sigma2));
        p.rate = rate;
        p.sigma2 = sigma2;
        return p;
    }
};

/// BPSK mapping 0 -> +1, 1 -> -1.
inline std::vector<double> modulate_bpsk(const BitVector& x) {
    std::vector<double> s(x.size());
    for (size_t i = 0; i < x.size(); ++i) s[i] = 1.0 - 2.0 * double(x[i]);
    return s;
}

/// y_i = s_i + n_i with n_i ~ N(0, sigma2), drawn from rng.
inline std::vector<double> awgn_transmit(const std::vector<double>& s,
                                         const ChannelParams& params, FrameRng& rng) {
    if (params.sigma2 <= 0.0) throw std::invalid_argument("awgn_transmit: sigma2 must be > 0");
    const double sigma = std::sqrt(params.sigma2);
    std::vector<double> y(s.size());
    for (size_t i = 0; i < s.size(); ++i) y[i] = s[i] + sigma * rng.next_gaussian();
    return y;
}

/// Channel LLRs L_i = 2 y_i / sigma2; positive favors bit 0.
inline LlrVector channel_llr(const std::vector<double>& y, const ChannelParams& params) {
    if (params.sigma2 <= 0.0) throw std::invalid_argument("channel_llr: sigma2 must be > 0");
    LlrVector llr(y.size());
    for (size_t i = 0; i < y.size(); ++i) llr[i] = 2.0 * y[i] / params.sigma2;
    return llr;
}

} // namespace polarfec
