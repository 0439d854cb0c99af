// JSON import/export of a code description:
// {n, K, design_snr_db, info_set (1-based), pe}.

#pragma once

#include <stdexcept>

#include "json.hpp"

#include "polarfec/polar_code.hpp"

namespace polarfec {

inline nlohmann::json code_to_json(const PolarCode& code) {
    nlohmann::json js;
    js["n"] = code.n;
    js["K"] = code.K;
    js["design_snr_db"] = code.design_snr_db;
    std::vector<uint32_t> one_based(code.info_set);
    for (auto& v : one_based) v += 1;
    js["info_set"] = one_based;
    js["pe"] = code.pe;
    return js;
}

inline PolarCode code_from_json(const nlohmann::json& js) {
    PolarCode code;
    code.n = js.at("n").get<int>();
    code.N = 1 << code.n;
    code.K = js.at("K").get<int>();
    code.design_snr_db = js.at("design_snr_db").get<double>();
    code.info_set = js.at("info_set").get<std::vector<uint32_t>>();
    code.pe = js.at("pe").get<std::vector<double>>();

    if (int(code.info_set.size()) != code.K)
        throw std::invalid_argument("code_from_json: info_set size does not match K");
    if (int(code.pe.size()) != code.N)
        throw std::invalid_argument("code_from_json: pe size does not match N");
    code.frozen.assign(code.N, 1);
    for (auto& v : code.info_set) {
        if (v < 1 || int(v) > code.N)
            throw std::invalid_argument("code_from_json: info_set index out of range");
        v -= 1;
        code.frozen[v] = 0;
    }
    std::sort(code.info_set.begin(), code.info_set.end());
    for (size_t k = 1; k < code.info_set.size(); ++k)
        if (code.info_set[k] == code.info_set[k - 1])
            throw std::invalid_argument("code_from_json: duplicate info_set index");
    for (double p : code.pe)
        if (p < 0.0 || p >= 1.0) throw std::invalid_argument("code_from_json: pe out of [0,1)");
    return code;
}

} // namespace polarfec
