#include "arat/masking.hpp"

#include <cmath>
#include <stdexcept>

namespace arat {

const char* level_name(MaskLevel l) {
    switch (l) {
    case MaskLevel::Operation: return "operation";
    case MaskLevel::Propagation: return "propagation";
    case MaskLevel::Algorithm: return "algorithm";
    }
    return "?";
}

const char* class_name(MaskClass c) {
    switch (c) {
    case MaskClass::Overwriting: return "overwriting";
    case MaskClass::LogicalComparison: return "logical_comparison";
    case MaskClass::ValueShadowing: return "value_shadowing";
    case MaskClass::AlgorithmSemantic: return "algorithm_semantic";
    }
    return "?";
}

std::vector<std::uint64_t> FaultPattern::enumerate(std::uint32_t bit_width) const {
    std::vector<std::uint64_t> out;
    switch (kind) {
    case Kind::SingleBit:
        for (std::uint32_t b = 0; b < bit_width; ++b) out.push_back(1ull << b);
        break;
    case Kind::SingleBitAt:
        if (bit < bit_width) out.push_back(1ull << bit);
        break;
    case Kind::ContiguousMultiBit: {
        if (width == 0 || width > bit_width) break;
        std::uint64_t run = width == 64 ? ~0ull : ((1ull << width) - 1);
        for (std::uint32_t s = 0; s + width <= bit_width; ++s) out.push_back(run << s);
        break;
    }
    }
    return out;
}

std::string FaultPattern::to_string() const {
    switch (kind) {
    case Kind::SingleBit: return "single";
    case Kind::SingleBitAt: return "bit:" + std::to_string(bit);
    case Kind::ContiguousMultiBit: return "multi:" + std::to_string(width);
    }
    return "?";
}

FaultPattern FaultPattern::parse(const std::string& text) {
    FaultPattern p;
    if (text == "single") {
        p.kind = Kind::SingleBit;
        return p;
    }
    if (text.rfind("bit:", 0) == 0) {
        p.kind = Kind::SingleBitAt;
        p.bit = static_cast<std::uint32_t>(std::stoul(text.substr(4)));
        return p;
    }
    if (text.rfind("multi:", 0) == 0) {
        p.kind = Kind::ContiguousMultiBit;
        p.width = static_cast<std::uint32_t>(std::stoul(text.substr(6)));
        if (p.width == 0) throw std::invalid_argument("fault pattern width must be positive");
        return p;
    }
    throw std::invalid_argument("unknown fault pattern '" + text + "'");
}

Rational MaskingVerdict::masked_fraction() const {
    if (bits.empty()) return Rational(0);
    std::int64_t m = 0;
    for (const auto& b : bits) m += b.masked ? 1 : 0;
    return Rational(m, static_cast<std::int64_t>(bits.size()));
}

bool opcode_counted(Opcode op) {
    return op != Opcode::Gep && op != Opcode::Phi && op != Opcode::Alloc;
}

namespace {

// recompute an instruction's result from recorded operand values with one
// slot flipped; nullopt when the flip makes it crash
std::optional<Value> recompute(const TraceRecord& rec, const Instruction& in, std::int32_t slot,
                               std::uint64_t mask) {
    Value a = rec.operands.size() > 0 ? rec.operands[0].value : Value{};
    Value b = rec.operands.size() > 1 ? rec.operands[1].value : Value{};
    if (slot == 0) a.bits = (a.bits ^ mask) & type_mask(a.type);
    if (slot == 1) b.bits = (b.bits ^ mask) & type_mask(b.type);

    auto canon = [](double d) {
        if (std::isnan(d)) return Value::from_bits(ValueType::F64, 0x7ff8000000000000ull);
        return Value::f64(d);
    };

    switch (rec.op) {
    case Opcode::Add: return Value::from_bits(rec.type, a.bits + b.bits);
    case Opcode::Sub: return Value::from_bits(rec.type, a.bits - b.bits);
    case Opcode::Mul: return Value::from_bits(rec.type, a.bits * b.bits);
    case Opcode::Div:
    case Opcode::Rem: {
        std::int64_t x = a.as_i64(), y = b.as_i64();
        if (y == 0) return std::nullopt;
        std::int64_t minv = rec.type == ValueType::I32 ? INT32_MIN : INT64_MIN;
        std::int64_t q, r;
        if (x == minv && y == -1) {
            q = minv;
            r = 0;
        } else {
            q = x / y;
            r = x % y;
        }
        return Value::from_bits(rec.type, static_cast<std::uint64_t>(rec.op == Opcode::Div ? q : r));
    }
    case Opcode::And: return Value::from_bits(rec.type, a.bits & b.bits);
    case Opcode::Or: return Value::from_bits(rec.type, a.bits | b.bits);
    case Opcode::Xor: return Value::from_bits(rec.type, a.bits ^ b.bits);
    case Opcode::Shl:
    case Opcode::LShr: {
        std::uint64_t amt = b.bits;
        std::uint64_t r = 0;
        if (amt < bit_width(rec.type))
            r = rec.op == Opcode::Shl ? (a.bits << amt) : (a.bits >> amt);
        return Value::from_bits(rec.type, r);
    }
    case Opcode::Trunc: return Value::from_bits(rec.type, a.bits);
    case Opcode::ZExt: return Value::from_bits(rec.type, a.bits);
    case Opcode::SExt: {
        std::uint64_t v = a.bits;
        std::uint32_t w = bit_width(a.type);
        if (w < 64 && ((v >> (w - 1)) & 1)) v |= ~((1ull << w) - 1);
        return Value::from_bits(rec.type, v);
    }
    case Opcode::ICmp: {
        std::int64_t x = a.as_i64(), y = b.as_i64();
        std::uint64_t ux = a.bits, uy = b.bits;
        bool r = false;
        switch (in.ipred) {
        case ICmpPred::Eq: r = ux == uy; break;
        case ICmpPred::Ne: r = ux != uy; break;
        case ICmpPred::Slt: r = x < y; break;
        case ICmpPred::Sle: r = x <= y; break;
        case ICmpPred::Sgt: r = x > y; break;
        case ICmpPred::Sge: r = x >= y; break;
        case ICmpPred::Ult: r = ux < uy; break;
        case ICmpPred::Ule: r = ux <= uy; break;
        case ICmpPred::Ugt: r = ux > uy; break;
        case ICmpPred::Uge: r = ux >= uy; break;
        }
        return Value::i1(r);
    }
    case Opcode::FAdd: return canon(a.as_f64() + b.as_f64());
    case Opcode::FSub: return canon(a.as_f64() - b.as_f64());
    case Opcode::FMul: return canon(a.as_f64() * b.as_f64());
    case Opcode::FDiv: return canon(a.as_f64() / b.as_f64());
    case Opcode::FCmp: {
        double x = a.as_f64(), y = b.as_f64();
        bool r = false;
        switch (in.fpred) {
        case FCmpPred::Oeq: r = x == y; break;
        case FCmpPred::One: r = x < y || x > y; break;
        case FCmpPred::Olt: r = x < y; break;
        case FCmpPred::Ole: r = x <= y; break;
        case FCmpPred::Ogt: r = x > y; break;
        case FCmpPred::Oge: r = x >= y; break;
        case FCmpPred::Une: r = !(x == y); break;
        }
        return Value::i1(r);
    }
    default: return std::nullopt;
    }
}

bool within_threshold(const Value& golden, const Value& flipped, const ShadowingThreshold& thr) {
    double r = golden.numeric();
    double rp = flipped.numeric();
    if (thr.kind == ShadowingThreshold::Kind::AbsoluteRange)
        return rp >= thr.lo && rp <= thr.hi;
    if (r == 0.0) return rp == 0.0;
    return std::fabs(rp - r) <= thr.eps * std::fabs(r);
}

enum class Rule { Overwrite, RecomputeOverwrite, RecomputeLogical, Shadowing, Deferred };

Rule rule_for(Opcode op, std::int32_t slot) {
    if (op == Opcode::Store) return slot == kResultSlot ? Rule::Overwrite : Rule::Deferred;
    switch (op) {
    case Opcode::Trunc:
        return Rule::RecomputeOverwrite;
    case Opcode::Shl:
    case Opcode::LShr:
        // discarded shifted-out bits mask; flipped shift amounts defer
        return slot == 0 ? Rule::RecomputeOverwrite : Rule::Deferred;
    case Opcode::And:
    case Opcode::Or:
    case Opcode::Xor:
    case Opcode::ICmp:
    case Opcode::FCmp:
        return Rule::RecomputeLogical;
    case Opcode::Add:
    case Opcode::Sub:
    case Opcode::Mul:
    case Opcode::Div:
    case Opcode::Rem:
    case Opcode::FAdd:
    case Opcode::FSub:
    case Opcode::FMul:
    case Opcode::FDiv:
        return Rule::Shadowing;
    default:
        return Rule::Deferred;
    }
}

} // namespace

MaskingVerdict classify(const Program& p, const TraceRecord& rec, std::int32_t slot,
                        const FaultPattern& pattern,
                        const std::optional<ShadowingThreshold>& thr) {
    MaskingVerdict out;
    std::uint32_t width;
    if (slot == kResultSlot) {
        if (rec.op != Opcode::Store)
            throw std::invalid_argument("result slot classification is store-only");
        width = bit_width(rec.type);
    } else {
        if (slot < 0 || static_cast<std::size_t>(slot) >= rec.operands.size())
            throw std::invalid_argument("operand slot out of range");
        width = bit_width(rec.operands[slot].value.type);
    }
    out.masks = pattern.enumerate(width);
    out.bits.assign(out.masks.size(), {});

    Rule rule = rule_for(rec.op, slot);
    const Instruction* in = p.find_static(rec.static_id);
    if (!in) throw std::invalid_argument("trace record without instruction");

    for (std::size_t i = 0; i < out.masks.size(); ++i) {
        BitVerdict& bv = out.bits[i];
        switch (rule) {
        case Rule::Overwrite:
            bv = {true, MaskClass::Overwriting};
            break;
        case Rule::RecomputeOverwrite:
        case Rule::RecomputeLogical: {
            auto r = recompute(rec, *in, slot, out.masks[i]);
            if (r && rec.has_result && *r == rec.result)
                bv = {true, rule == Rule::RecomputeOverwrite ? MaskClass::Overwriting
                                                             : MaskClass::LogicalComparison};
            break;
        }
        case Rule::Shadowing: {
            if (!thr) break;
            auto r = recompute(rec, *in, slot, out.masks[i]);
            if (r && rec.has_result && within_threshold(rec.result, *r, *thr))
                bv = {true, MaskClass::ValueShadowing};
            break;
        }
        case Rule::Deferred:
            break;
        }
    }
    return out;
}

Rational shadowing_fraction(const Program& p, const TraceRecord& rec, std::int32_t slot,
                            const FaultPattern& pattern, const ShadowingThreshold& thr) {
    MaskingVerdict v = classify(p, rec, slot, pattern, thr);
    if (v.bits.empty()) return Rational(0);
    std::int64_t m = 0;
    for (const auto& b : v.bits)
        m += (b.masked && b.cls == MaskClass::ValueShadowing) ? 1 : 0;
    return Rational(m, static_cast<std::int64_t>(v.bits.size()));
}

} // namespace arat
