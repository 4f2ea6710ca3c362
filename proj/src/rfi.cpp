#include "arat/rfi.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace arat {

double rfi_margin(double p_hat, std::uint64_t n) {
    if (n == 0) return 0.0;
    return 1.96 * std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(n));
}

std::uint64_t rfi_sample_size(double margin) {
    if (!(margin > 0.0)) throw std::invalid_argument("margin must be positive");
    // worst case p = 0.5
    double n = (1.96 / (2.0 * margin)) * (1.96 / (2.0 * margin));
    return static_cast<std::uint64_t>(std::ceil(n));
}

namespace {

// uniform draw in [0, n) by masking and rejecting; keeps the stream
// reproducible across standard library implementations
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    std::uint64_t mask = ~0ull;
    if (n & (n - 1)) {
        mask = n - 1;
        mask |= mask >> 1;
        mask |= mask >> 2;
        mask |= mask >> 4;
        mask |= mask >> 8;
        mask |= mask >> 16;
        mask |= mask >> 32;
    } else {
        mask = n - 1;
    }
    for (;;) {
        std::uint64_t v = rng() & mask;
        if (v < n) return v;
    }
}

} // namespace

RfiResult rfi_campaign(const Program& p, const Bindings& inputs, const std::string& object,
                       std::uint64_t n, std::uint64_t seed, const AnalysisConfig& cfg,
                       bool without_replacement) {
    RunOptions gopt;
    gopt.step_limit = cfg.step_limit;
    gopt.record_trace = true;
    RunResult golden = run(p, inputs, gopt);
    if (golden.outcome.kind != Outcome::Kind::Completed)
        throw std::runtime_error("golden run did not complete");
    resolve_object_refs(golden.trace, p);

    std::int32_t obj = golden.trace.objects.find(object);
    if (obj < 0) throw std::invalid_argument("unknown data object '" + object + "'");

    // flattened (point, mask) flip space
    std::vector<FaultSpec> space;
    for (const SlotPoint& sp : enumerate_candidates(golden.trace, obj)) {
        const TraceRecord& rec = golden.trace.records[sp.rec_index];
        std::uint32_t width = sp.slot == kResultSlot
                                  ? bit_width(rec.type)
                                  : bit_width(rec.operands[sp.slot].value.type);
        for (std::uint64_t mask : cfg.pattern.enumerate(width))
            space.push_back({sp.dyn_id, sp.slot, mask});
    }
    if (space.empty()) throw std::invalid_argument("object has no fault candidates");
    if (without_replacement && n > space.size())
        throw std::invalid_argument("sample exceeds the flip space");

    std::mt19937_64 rng(seed);
    std::vector<std::uint64_t> picks;
    picks.reserve(n);
    if (without_replacement) {
        // partial Fisher-Yates over the index range
        std::vector<std::uint64_t> idx(space.size());
        for (std::uint64_t i = 0; i < idx.size(); ++i) idx[i] = i;
        for (std::uint64_t i = 0; i < n; ++i) {
            std::uint64_t j = i + bounded(rng, idx.size() - i);
            std::swap(idx[i], idx[j]);
            picks.push_back(idx[i]);
        }
    } else {
        for (std::uint64_t i = 0; i < n; ++i) picks.push_back(bounded(rng, space.size()));
    }

    std::uint64_t limit = std::min<std::uint64_t>(cfg.step_limit,
                                                  4 * golden.outcome.dynamic_length);
    std::uint64_t hits = 0;
    for (std::uint64_t pick : picks) {
        Outcome o = run_with_injection(p, inputs, space[pick], limit);
        if (cfg.accept.accepts(o, golden.outcome)) ++hits;
    }

    RfiResult r;
    r.n = n;
    r.hits = hits;
    r.space = space.size();
    r.success_rate = n ? static_cast<double>(hits) / static_cast<double>(n) : 0.0;
    r.margin = rfi_margin(r.success_rate, n);
    r.seed = seed;
    return r;
}

} // namespace arat
