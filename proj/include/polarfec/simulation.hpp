// Monte Carlo experiment runner: sweeps SNR x decoder x parameter cells,
// estimates FER with Wilson intervals and normalized complexity chi, and
// writes CSV or JSON tables. Frames are generated from per-frame rng
// substreams keyed by (seed, cell, frame), so results are bit-identical
// for any worker count; stopping decisions happen at fixed batch
// boundaries for the same reason.

#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "polarfec/channel.hpp"
#include "polarfec/fano_decoder.hpp"
#include "polarfec/list_decoder.hpp"
#include "polarfec/polar_code.hpp"
#include "polarfec/sc_decoder.hpp"

namespace polarfec {

struct DecoderSpec {
    enum class Kind { Sc, Fano, Scl };
    Kind kind = Kind::Sc;
    double param = 0.0; ///< delta for Fano, list size for SCL, unused for SC

    std::string name() const {
        switch (kind) {
            case Kind::Sc: return "sc";
            case Kind::Fano: return "fano";
            case Kind::Scl: return "scl";
        }
        return "?";
    }
};

/// Parse "sc", "fano:DELTA" or "scl:L".
inline DecoderSpec parse_decoder_spec(const std::string& text) {
    DecoderSpec spec;
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (kind == "sc") {
        if (!arg.empty()) throw std::invalid_argument("decoder 'sc' takes no parameter");
        spec.kind = DecoderSpec::Kind::Sc;
    } else if (kind == "fano") {
        spec.kind = DecoderSpec::Kind::Fano;
        spec.param = arg.empty() ? 1.0 : std::stod(arg);
        if (!(spec.param > 0.0)) throw std::invalid_argument("fano delta must be > 0");
    } else if (kind == "scl") {
        spec.kind = DecoderSpec::Kind::Scl;
        spec.param = arg.empty() ? 8.0 : std::stod(arg);
        if (spec.param < 1.0) throw std::invalid_argument("scl list size must be >= 1");
    } else {
        throw std::invalid_argument("unknown decoder '" + text + "'");
    }
    return spec;
}

struct SimConfig {
    int n = 7;
    int K = 64;
    std::vector<double> snr_points_db = {1.0, 1.5, 2.0, 2.5, 3.0, 3.5};
    std::vector<DecoderSpec> decoders;
    std::optional<double> construction_snr_db;
    uint64_t min_frame_errors = 100;
    uint64_t max_frames = 1000000;
    uint64_t seed = 1;
    int workers = 0; ///< 0: hardware concurrency
    std::string output_path;
    std::string output_format = "csv";
    bool esn0 = false;               ///< interpret SNR points as Es/N0
    bool fano_frozen_metric = true;  ///< ablation switch for the Fano metric
};

struct SimRecord {
    std::string decoder;
    double parameter = 0.0;
    double snr_db = 0.0;
    uint64_t frames = 0;
    uint64_t frame_errors = 0;
    double fer = 0.0;
    double avg_visits = 0.0;
    double chi = 0.0;
    double wall_seconds = 0.0;
};

struct WilsonInterval {
    double fer;
    double lo;
    double hi;
};

/// Point estimate with the 95% Wilson score interval.
inline WilsonInterval estimate_fer(uint64_t errors, uint64_t frames) {
    if (frames == 0) throw std::invalid_argument("estimate_fer: frames must be >= 1");
    if (errors > frames) throw std::invalid_argument("estimate_fer: errors exceed frames");
    const double z = 1.959963984540054;
    const double nn = double(frames);
    const double p = double(errors) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    const double lo = errors == 0 ? 0.0 : std::max(0.0, center - half);
    const double hi = errors == frames ? 1.0 : std::min(1.0, center + half);
    return {p, lo, hi};
}

inline void validate(const SimConfig& config) {
    if (config.n < 0 || config.n > 20) throw std::invalid_argument("config: n out of range");
    if (config.K < 0 || config.K > (1 << config.n))
        throw std::invalid_argument("config: K out of range");
    if (config.snr_points_db.empty()) throw std::invalid_argument("config: no SNR points");
    if (config.decoders.empty()) throw std::invalid_argument("config: no decoders");
    if (config.min_frame_errors < 1) throw std::invalid_argument("config: min_frame_errors must be >= 1");
    if (config.max_frames < config.min_frame_errors)
        throw std::invalid_argument("config: max_frames must be >= min_frame_errors");
    if (config.max_frames > 0xFFFFFFFFull)
        throw std::invalid_argument("config: max_frames exceeds the 32-bit frame keying range");
    for (const auto& d : config.decoders) {
        if (d.kind == DecoderSpec::Kind::Fano && !(d.param > 0.0))
            throw std::invalid_argument("config: fano delta must be > 0");
        if (d.kind == DecoderSpec::Kind::Scl && d.param < 1.0)
            throw std::invalid_argument("config: scl list size must be >= 1");
    }
    if (config.output_format != "csv" && config.output_format != "json")
        throw std::invalid_argument("config: format must be csv or json");
}

namespace detail {

struct CellTotals {
    uint64_t errors = 0;
    uint64_t visits = 0;
};

/// Decode frames [first, last) of one cell and accumulate error and visit
/// totals. Frame content depends only on (seed, cell, frame).
template <typename DecodeFn>
void run_frames(const PolarCode& code, const ChannelParams& params, uint64_t seed,
                uint32_t cell, uint64_t first, uint64_t last, const DecodeFn& decode,
                CellTotals& totals) {
    const int N = code.N;
    BitVector u(N, 0);
    for (uint64_t f = first; f < last; ++f) {
        FrameRng rng(seed, cell, uint32_t(f));
        std::fill(u.begin(), u.end(), 0);
        for (uint32_t idx : code.info_set) u[idx] = uint8_t(rng.next_u32() & 1u);
        const BitVector x = encode(u, code);
        const auto y = awgn_transmit(modulate_bpsk(x), params, rng);
        const LlrVector llr = channel_llr(y, params);
        const DecodeResult r = decode(llr);
        totals.visits += r.visits;
        if (r.u_hat != u) ++totals.errors;
    }
}

} // namespace detail

/// Run every (decoder, SNR) cell of the grid. Cells stop at
/// min_frame_errors errors (checked at batch boundaries) or max_frames.
inline std::vector<SimRecord> run_experiment(const SimConfig& config) {
    validate(config);

    // Fail on an unwritable output before burning simulation time.
    if (!config.output_path.empty()) {
        std::ofstream probe(config.output_path, std::ios::app);
        if (!probe) throw std::runtime_error("cannot write output path: " + config.output_path);
    }

    std::vector<double> snrs = config.snr_points_db;
    std::sort(snrs.begin(), snrs.end());

    const int workers = config.workers > 0
                            ? config.workers
                            : std::max(1u, std::thread::hardware_concurrency());
    constexpr uint64_t kBatch = 256;

    std::vector<SimRecord> records;
    uint32_t cell_id = 0;
    for (const auto& dec : config.decoders) {
        for (const double snr : snrs) {
            const double rate = double(config.K) / double(1 << config.n);
            const ChannelParams params = config.esn0 ? ChannelParams::from_esn0(snr, rate)
                                                     : ChannelParams::from_ebn0(snr, rate);
            double design_ebn0 = config.construction_snr_db.value_or(
                config.esn0 ? snr - 10.0 * std::log10(rate) : snr);
            const PolarCode code = construct_code(config.n, config.K, design_ebn0);

            auto decode = [&](const LlrVector& llr) -> DecodeResult {
                switch (dec.kind) {
                    case DecoderSpec::Kind::Sc: return sc_decode(llr, code);
                    case DecoderSpec::Kind::Fano: {
                        FanoOptions opt;
                        opt.delta = dec.param;
                        opt.frozen_metric = config.fano_frozen_metric;
                        return fano_decode(llr, code, opt);
                    }
                    case DecoderSpec::Kind::Scl: return scl_decode(llr, code, int(dec.param));
                }
                throw std::logic_error("unreachable decoder kind");
            };

            const auto t0 = std::chrono::steady_clock::now();
            uint64_t frames = 0, errors = 0, visits = 0;
            while (frames < config.max_frames && errors < config.min_frame_errors) {
                const uint64_t batch = std::min(kBatch, config.max_frames - frames);
                std::vector<detail::CellTotals> partial(workers);
                std::vector<std::thread> pool;
                const uint64_t per = (batch + workers - 1) / workers;
                for (int w = 0; w < workers; ++w) {
                    const uint64_t lo = frames + std::min(batch, uint64_t(w) * per);
                    const uint64_t hi = frames + std::min(batch, uint64_t(w + 1) * per);
                    if (lo >= hi) continue;
                    pool.emplace_back([&, lo, hi, w] {
                        detail::run_frames(code, params, config.seed, cell_id, lo, hi, decode,
                                           partial[w]);
                    });
                }
                for (auto& th : pool) th.join();
                for (const auto& p : partial) {
                    errors += p.errors;
                    visits += p.visits;
                }
                frames += batch;
            }
            const auto t1 = std::chrono::steady_clock::now();

            SimRecord rec;
            rec.decoder = dec.name();
            rec.parameter = dec.param;
            rec.snr_db = snr;
            rec.frames = frames;
            rec.frame_errors = errors;
            rec.fer = frames ? double(errors) / double(frames) : 0.0;
            rec.avg_visits = frames ? double(visits) / double(frames) : 0.0;
            rec.chi = rec.avg_visits / double(1 << config.n);
            rec.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
            records.push_back(rec);
            ++cell_id;
        }
    }
    return records;
}

inline std::string format_sig6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

inline const char* kCsvHeader =
    "decoder,parameter,snr_db,frames,frame_errors,fer,avg_visits,chi,wall_seconds";

inline std::string to_csv(const std::vector<SimRecord>& records) {
    std::ostringstream out;
    out << kCsvHeader << "\n";
    for (const auto& r : records) {
        out << r.decoder << ',' << format_sig6(r.parameter) << ',' << format_sig6(r.snr_db)
            << ',' << r.frames << ',' << r.frame_errors << ',' << format_sig6(r.fer) << ','
            << format_sig6(r.avg_visits) << ',' << format_sig6(r.chi) << ','
            << format_sig6(r.wall_seconds) << "\n";
    }
    return out.str();
}

inline std::string to_json(const std::vector<SimRecord>& records) {
    // Values are rounded to 6 significant digits first so both formats
    // carry identical numbers.
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : records) {
        nlohmann::json row;
        row["decoder"] = r.decoder;
        row["parameter"] = std::stod(format_sig6(r.parameter));
        row["snr_db"] = std::stod(format_sig6(r.snr_db));
        row["frames"] = r.frames;
        row["frame_errors"] = r.frame_errors;
        row["fer"] = std::stod(format_sig6(r.fer));
        row["avg_visits"] = std::stod(format_sig6(r.avg_visits));
        row["chi"] = std::stod(format_sig6(r.chi));
        row["wall_seconds"] = std::stod(format_sig6(r.wall_seconds));
        arr.push_back(row);
    }
    return arr.dump(2) + "\n";
}

/// Persist records as CSV or JSON at path (or stdout when path is empty).
inline void emit_results(const std::vector<SimRecord>& records, const std::string& format,
                         const std::string& path) {
    if (records.empty()) throw std::invalid_argument("emit_results: no records");
    const std::string body = format == "json" ? to_json(records) : to_csv(records);
    if (path.empty()) {
        std::fwrite(body.data(), 1, body.size(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output path: " + path);
    out << body;
    if (!out) throw std::runtime_error("write failed: " + path);
}

/// Load a SimConfig from the JSON schema used by the CLI's --config.
inline SimConfig config_from_json(const nlohmann::json& js) {
    SimConfig c;
    if (js.contains("n")) c.n = js.at("n").get<int>();
    if (js.contains("k")) c.K = js.at("k").get<int>();
    if (js.contains("snr_points_db")) c.snr_points_db = js.at("snr_points_db").get<std::vector<double>>();
    if (js.contains("decoders"))
        for (const auto& d : js.at("decoders"))
            c.decoders.push_back(parse_decoder_spec(d.get<std::string>()));
    if (js.contains("construction_snr_db"))
        c.construction_snr_db = js.at("construction_snr_db").get<double>();
    if (js.contains("min_frame_errors")) c.min_frame_errors = js.at("min_frame_errors").get<uint64_t>();
    if (js.contains("max_frames")) c.max_frames = js.at("max_frames").get<uint64_t>();
    if (js.contains("seed")) c.seed = js.at("seed").get<uint64_t>();
    if (js.contains("workers")) c.workers = js.at("workers").get<int>();
    if (js.contains("out")) c.output_path = js.at("out").get<std::string>();
    if (js.contains("format")) c.output_format = js.at("format").get<std::string>();
    if (js.contains("esn0")) c.esn0 = js.at("esn0").get<bool>();
    if (js.contains("fano_frozen_metric")) c.fano_frozen_metric = js.at("fano_frozen_metric").get<bool>();
    return c;
}

} // namespace polarfec
