#pragma once

#include "arat/interp.hpp"
#include "arat/masking.hpp"

#include <optional>

namespace arat {

struct PropagationConfig {
    std::uint32_t k = 10; // tainted-operation budget, 1..50
    // optional per-object relative tolerance on float memory state equality
    std::optional<std::pair<std::string, double>> state_tolerance;
    std::uint64_t step_limit = 10'000'000;
};

struct ReplayVerdict {
    enum class Kind { Converged, Diverged, Survived };
    Kind kind = Kind::Survived;
    std::uint32_t steps = 0;                     // tainted ops executed
    MaskClass cls = MaskClass::Overwriting;      // valid when Converged
    std::vector<MaskClass> class_chain;          // classes of diff-eliminating ops
};

ReplayVerdict fork_replay(const Program& p, const Bindings& inputs, const FaultSpec& fault,
                          const PropagationConfig& cfg);

struct InjectionPoint {
    std::uint64_t dyn_id = 0;
    std::int32_t slot = 0;
    std::uint64_t bits = 0; // xor mask
    auto operator<=>(const InjectionPoint&) const = default;
};

struct PropagationOutcome {
    bool masked = false;             // masked at propagation level
    MaskClass cls = MaskClass::Overwriting;
    std::uint32_t steps = 0;
    InjectionPoint escalated;        // valid when !masked
};

struct Candidate {
    std::uint64_t dyn_id = 0;
    std::int32_t slot = 0;
    std::uint64_t bits = 0;
};

std::vector<PropagationOutcome> resolve(const Program& p, const Bindings& inputs,
                                        const std::vector<Candidate>& candidates,
                                        const PropagationConfig& cfg);

// per-(block, instruction) set of SSA values live before that instruction,
// as bitset words; used by fork_replay to drop dead register differences
std::vector<std::vector<std::vector<std::uint64_t>>> compute_live_in(const Program& p);

} // namespace arat
