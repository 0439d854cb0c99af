// Successive-cancellation list decoding with the exact log-probability
// path metric. Kept deliberately simple: each surviving path owns a full
// trellis, forks are materialized by copy, and pruning is a stable sort on
// the metric. The baseline contract is output equivalence with naive
// full-copy semantics.

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "polarfec/polar_code.hpp"
#include "polarfec/sc_decoder.hpp"

namespace polarfec {

/// Called once per surviving path extension: (bit index, parent metric,
/// child metric). Used by tests to observe metric monotonicity.
using SclObserver = std::function<void(int, double, double)>;

inline DecodeResult scl_decode(const LlrVector& llr, const PolarCode& code, int list_size,
                               const SclObserver& observer = {}) {
    if (int(llr.size()) != code.N)
        throw std::invalid_argument("scl_decode: LLR length does not match N");
    if (list_size < 1) throw std::invalid_argument("scl_decode: list size must be >= 1");

    struct Path {
        ScTrellis trellis;
        double metric;
    };

    std::vector<Path> paths;
    paths.push_back({ScTrellis(code.n, llr), 0.0});
    uint64_t visits = 0;

    for (int i = 0; i < code.N; ++i) {
        if (code.frozen[i]) {
            for (auto& p : paths) {
                const auto lp = branch_log_probs(p.trellis.decision_llr(i));
                const double parent = p.metric;
                p.metric += lp.lp0;
                p.trellis.decide(i, 0);
                if (observer) observer(i, parent, p.metric);
            }
            visits += paths.size();
            continue;
        }

        struct Candidate {
            int parent;
            int bit;
            double metric;
        };
        std::vector<Candidate> cands;
        cands.reserve(paths.size() * 2);
        for (int p = 0; p < int(paths.size()); ++p) {
            const auto lp = branch_log_probs(paths[p].trellis.decision_llr(i));
            cands.push_back({p, 0, paths[p].metric + lp.lp0});
            cands.push_back({p, 1, paths[p].metric + lp.lp1});
        }
        // Ties keep candidate order: lower parent index first, bit 0 first.
        std::stable_sort(cands.begin(), cands.end(),
                         [](const Candidate& a, const Candidate& b) { return a.metric > b.metric; });
        const int keep = std::min<int>(list_size, int(cands.size()));

        std::vector<int> uses(paths.size(), 0);
        for (int c = 0; c < keep; ++c) ++uses[cands[c].parent];

        std::vector<Path> next;
        next.reserve(keep);
        for (int c = 0; c < keep; ++c) {
            const auto& cand = cands[c];
            if (--uses[cand.parent] > 0)
                next.push_back({paths[cand.parent].trellis, cand.metric}); // sibling still needs it
            else
                next.push_back({std::move(paths[cand.parent].trellis), cand.metric});
            next.back().trellis.decide(i, cand.bit);
            if (observer) observer(i, paths[cand.parent].metric, cand.metric);
        }
        paths = std::move(next);
        visits += paths.size();
    }

    int best = 0;
    for (int p = 1; p < int(paths.size()); ++p)
        if (paths[p].metric > paths[best].metric) best = p;

    DecodeResult res;
    res.u_hat.assign(paths[best].trellis.decisions().begin(),
                     paths[best].trellis.decisions().begin() + code.N);
    res.visits = visits;
    return res;
}

} // namespace polarfec
