#pragma once

#include "arat/advf.hpp"

namespace arat {

struct RfiResult {
    std::uint64_t n = 0;          // injections run
    std::uint64_t hits = 0;       // acceptable outcomes
    std::uint64_t space = 0;      // flattened (point, mask) flip space size
    double success_rate = 0.0;
    double margin = 0.0;          // 95% normal-approximation half-width
    std::uint64_t seed = 0;
};

double rfi_margin(double p_hat, std::uint64_t n);
std::uint64_t rfi_sample_size(double margin); // a priori p = 0.5

RfiResult rfi_campaign(const Program& p, const Bindings& inputs, const std::string& object,
                       std::uint64_t n, std::uint64_t seed, const AnalysisConfig& cfg,
                       bool without_replacement = false);

} // namespace arat
