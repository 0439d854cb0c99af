// polarsim: Monte Carlo FER / complexity benchmark for the polar decoders
// in this library (SC, SC-Fano, SC-List). Also hosts the built-in length-4
// worked example (--example1) and a single-frame SC-Fano event trace
// (--trace).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "polarfec/channel.hpp"
#include "polarfec/code_json.hpp"
#include "polarfec/fano_decoder.hpp"
#include "polarfec/list_decoder.hpp"
#include "polarfec/polar_code.hpp"
#include "polarfec/sc_decoder.hpp"
#include "polarfec/simulation.hpp"

namespace {

using namespace polarfec;

const char* kind_name(FanoTraceEvent::Kind kind) {
    switch (kind) {
        case FanoTraceEvent::Kind::Forward: return "forward";
        case FanoTraceEvent::Kind::Backward: return "backward";
        case FanoTraceEvent::Kind::ThresholdDown: return "threshold_down";
        case FanoTraceEvent::Kind::ThresholdUp: return "threshold_up";
    }
    return "?";
}

nlohmann::json event_to_json(const FanoTraceEvent& ev) {
    nlohmann::json js;
    js["event"] = kind_name(ev.kind);
    js["i"] = ev.i;
    js["j"] = ev.j;
    js["T"] = ev.threshold;
    js["metric"] = ev.metric;
    if (ev.kind == FanoTraceEvent::Kind::Forward) js["bit"] = ev.bit;
    return js;
}

std::string bits_to_string(const BitVector& bits) {
    std::string s = "(";
    for (size_t k = 0; k < bits.size(); ++k) {
        s += char('0' + bits[k]);
        if (k + 1 < bits.size()) s += ',';
    }
    return s + ")";
}

// The worked length-4 example: message (0,1,0,1), A = {2,3,4}, received
// y = (1.4137, -1.5069, 2.3165, 1.3098) with sigma2 = 1. Plain SC decides
// (0,0,1,0); SC-Fano with delta = 3 recovers (0,1,0,1) after one backward
// move at bit 3. The code is constructed at 8 dB, where the per-channel
// error probabilities are small enough for that trajectory.
int run_example1() {
    const PolarCode code = construct_code(2, 3, 8.0);
    const ChannelParams params = ChannelParams::from_sigma2(1.0, code.rate());
    const std::vector<double> y = {1.4137, -1.5069, 2.3165, 1.3098};
    const LlrVector llr = channel_llr(y, params);

    const DecodeResult sc = sc_decode(llr, code);
    std::printf("sc      : u_hat = %s\n", bits_to_string(sc.u_hat).c_str());

    FanoOptions opt;
    opt.delta = 3.0;
    opt.trace = [](const FanoTraceEvent& ev) {
        std::printf("  %-14s i=%d j=%d T=%.4f metric=%.4f", kind_name(ev.kind), ev.i, ev.j,
                    ev.threshold, ev.metric);
        if (ev.kind == FanoTraceEvent::Kind::Forward) std::printf(" bit=%d", ev.bit);
        std::printf("\n");
    };
    std::printf("sc-fano : delta = 3, trace:\n");
    const DecodeResult fano = fano_decode(llr, code, opt);
    std::printf("sc-fano : u_hat = %s (visits = %llu)\n", bits_to_string(fano.u_hat).c_str(),
                (unsigned long long)fano.visits);

    const bool ok = sc.u_hat == BitVector{0, 0, 1, 0} && fano.u_hat == BitVector{0, 1, 0, 1};
    std::printf("%s\n", ok ? "example1: PASS" : "example1: FAIL");
    return ok ? 0 : 1;
}

int run_trace(const SimConfig& config, const std::string& trace_path) {
    DecoderSpec fano_spec;
    bool found = false;
    for (const auto& d : config.decoders)
        if (d.kind == DecoderSpec::Kind::Fano) {
            fano_spec = d;
            found = true;
            break;
        }
    if (!found) throw std::invalid_argument("--trace requires a fano decoder (--decoder fano:DELTA)");
    if (config.snr_points_db.empty()) throw std::invalid_argument("--trace requires --snr");

    const double snr = *std::min_element(config.snr_points_db.begin(), config.snr_points_db.end());
    const double rate = double(config.K) / double(1 << config.n);
    const ChannelParams params =
        config.esn0 ? ChannelParams::from_esn0(snr, rate) : ChannelParams::from_ebn0(snr, rate);
    const double design = config.construction_snr_db.value_or(
        config.esn0 ? snr - 10.0 * std::log10(rate) : snr);
    const PolarCode code = construct_code(config.n, config.K, design);

    FrameRng rng(config.seed, 0, 0);
    BitVector u(code.N, 0);
    for (uint32_t idx : code.info_set) u[idx] = uint8_t(rng.next_u32() & 1u);
    const auto y = awgn_transmit(modulate_bpsk(encode(u, code)), params, rng);
    const LlrVector llr = channel_llr(y, params);

    std::ofstream out(trace_path);
    if (!out) throw std::runtime_error("cannot open trace path: " + trace_path);

    FanoOptions opt;
    opt.delta = fano_spec.param;
    opt.frozen_metric = config.fano_frozen_metric;
    opt.trace = [&](const FanoTraceEvent& ev) { out << event_to_json(ev).dump() << "\n"; };
    const DecodeResult r = fano_decode(llr, code, opt);

    std::printf("traced one frame at %.2f dB: %s, visits = %llu, %s\n", snr,
                r.u_hat == u ? "decoded correctly" : "frame error",
                (unsigned long long)r.visits, r.truncated ? "truncated" : "complete");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Polar-code FER and complexity benchmark (SC, SC-Fano, SC-List)"};

    std::string config_path;
    std::string snr_list;
    std::vector<std::string> decoder_args;
    std::string trace_path;
    std::string export_code_path;
    bool example1 = false;

    int n = -1, k = -1, workers = -1;
    double construction_snr = std::nan("");
    std::int64_t min_errors = -1, max_frames = -1, seed = -1;
    std::string out_path, format, snr_mode;
    bool skip_frozen_metric = false;

    app.add_option("--config", config_path, "JSON config file; explicit flags override it");
    app.add_option("--n", n, "code length exponent, N = 2^n");
    app.add_option("--k", k, "number of information bits");
    app.add_option("--snr", snr_list, "comma-separated SNR points in dB");
    app.add_option("--decoder", decoder_args, "decoder spec: sc, fano:DELTA or scl:L (repeatable)");
    app.add_option("--construction-snr", construction_snr,
                   "design Eb/N0 (dB) for code construction; default: the simulation SNR");
    app.add_option("--min-errors", min_errors, "frame errors to stop a cell at");
    app.add_option("--max-frames", max_frames, "frame cap per cell");
    app.add_option("--seed", seed, "master seed for the keyed rng substreams");
    app.add_option("--workers", workers, "worker threads (0: hardware concurrency)");
    app.add_option("--out", out_path, "output path (default: stdout)");
    app.add_option("--format", format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--snr-mode", snr_mode, "ebn0 (default) or esn0")
        ->check(CLI::IsMember({"ebn0", "esn0"}));
    app.add_flag("--fano-skip-frozen-metric", skip_frozen_metric,
                 "ablation: skip metric increments at frozen indices");
    app.add_option("--trace", trace_path, "single-frame mode: write a fano event log (JSONL)");
    app.add_option("--export-code", export_code_path,
                   "write the constructed code description as JSON and exit");
    app.add_flag("--example1", example1, "run the built-in length-4 regression and print its trace");

    CLI11_PARSE(app, argc, argv);

    try {
        if (example1) return run_example1();

        SimConfig config;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw std::runtime_error("cannot read config: " + config_path);
            nlohmann::json js;
            in >> js;
            config = polarfec::config_from_json(js);
        }
        if (n >= 0) config.n = n;
        if (k >= 0) config.K = k;
        if (!snr_list.empty()) {
            config.snr_points_db.clear();
            std::stringstream ss(snr_list);
            std::string tok;
            while (std::getline(ss, tok, ',')) config.snr_points_db.push_back(std::stod(tok));
        }
        if (!decoder_args.empty()) {
            config.decoders.clear();
            for (const auto& d : decoder_args) config.decoders.push_back(parse_decoder_spec(d));
        }
        if (!std::isnan(construction_snr)) config.construction_snr_db = construction_snr;
        if (min_errors >= 0) config.min_frame_errors = uint64_t(min_errors);
        if (max_frames >= 0) config.max_frames = uint64_t(max_frames);
        if (seed >= 0) config.seed = uint64_t(seed);
        if (workers >= 0) config.workers = workers;
        if (!out_path.empty()) config.output_path = out_path;
        if (!format.empty()) config.output_format = format;
        if (!snr_mode.empty()) config.esn0 = (snr_mode == "esn0");
        if (skip_frozen_metric) config.fano_frozen_metric = false;

        if (!export_code_path.empty()) {
            const double snr = config.snr_points_db.empty() ? 0.0 : config.snr_points_db.front();
            const double rate = double(config.K) / double(1 << config.n);
            const double design = config.construction_snr_db.value_or(
                config.esn0 ? snr - 10.0 * std::log10(rate) : snr);
            const PolarCode code = construct_code(config.n, config.K, design);
            std::ofstream outf(export_code_path);
            if (!outf) throw std::runtime_error("cannot open: " + export_code_path);
            outf << polarfec::code_to_json(code).dump(2) << "\n";
            return 0;
        }

        if (!trace_path.empty()) return run_trace(config, trace_path);

        const auto records = run_experiment(config);
        emit_results(records, config.output_format, config.output_path);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
