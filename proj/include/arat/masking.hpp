#pragma once

#include "arat/rational.hpp"
#include "arat/trace.hpp"

#include <optional>
#include <vector>

namespace arat {

enum class MaskLevel { Operation, Propagation, Algorithm };
enum class MaskClass { Overwriting, LogicalComparison, ValueShadowing, AlgorithmSemantic };

const char* level_name(MaskLevel l);
const char* class_name(MaskClass c);

// fault pattern over the bits of one operand slot
struct FaultPattern {
    enum class Kind { SingleBit, SingleBitAt, ContiguousMultiBit };
    Kind kind = Kind::SingleBit;
    std::uint32_t bit = 0;   // SingleBitAt
    std::uint32_t width = 2; // ContiguousMultiBit

    // all xor masks for a slot of the given bit width
    std::vector<std::uint64_t> enumerate(std::uint32_t bit_width) const;
    std::string to_string() const;
    static FaultPattern parse(const std::string& text); // "single" | "multi:<w>" | "bit:<b>"
};

struct ShadowingThreshold {
    enum class Kind { AbsoluteRange, RelativeResultError };
    Kind kind = Kind::RelativeResultError;
    double lo = 0.0, hi = 0.0; // AbsoluteRange: result' must stay in [lo, hi]
    double eps = 0.0;          // RelativeResultError: |result'-result| <= eps*|result|
};

// verdict for one enumerated mask at operation level
struct BitVerdict {
    bool masked = false;
    MaskClass cls = MaskClass::Overwriting; // valid when masked
};

struct MaskingVerdict {
    std::vector<std::uint64_t> masks; // enumerated xor masks, ascending
    std::vector<BitVerdict> bits;     // one per mask
    Rational masked_fraction() const;
};

// slot index meaning store destination (the result slot of a Store)
inline constexpr std::int32_t kResultSlot = -1;

// true if this opcode's slots may appear in the aDVF candidate universe at all
bool opcode_counted(Opcode op);

// operation-level classification of a fault in `slot` of one dynamic record.
// slot == kResultSlot is only valid for Store (destination memory element).
MaskingVerdict classify(const Program& p, const TraceRecord& rec, std::int32_t slot,
                        const FaultPattern& pattern,
                        const std::optional<ShadowingThreshold>& thr);

// arithmetic-only helper: fraction of pattern positions masked by value shadowing
Rational shadowing_fraction(const Program& p, const TraceRecord& rec, std::int32_t slot,
                            const FaultPattern& pattern, const ShadowingThreshold& thr);

} // namespace arat
