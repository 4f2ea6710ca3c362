#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "arat/value.hpp"

namespace arat {

enum class Opcode : std::uint8_t {
    Add, Sub, Mul, Div, Rem,
    And, Or, Xor, Shl, LShr,
    Trunc, ZExt, SExt,
    ICmp,
    FAdd, FSub, FMul, FDiv,
    FCmp,
    Load, Store, Alloc, Gep, Phi,
    Br, CondBr, Call, Ret,
};

enum class ICmpPred : std::uint8_t { Eq, Ne, Slt, Sle, Sgt, Sge, Ult, Ule, Ugt, Uge };
// ordered predicates plus une, which is true on unordered operands
enum class FCmpPred : std::uint8_t { Oeq, One, Olt, Ole, Ogt, Oge, Une };
enum class Intrinsic : std::uint8_t { Sqrt, Fabs, Print };

const char* opcode_name(Opcode op);
const char* icmp_pred_name(ICmpPred p);
const char* fcmp_pred_name(FCmpPred p);
const char* intrinsic_name(Intrinsic f);

struct Operand {
    enum class Kind : std::uint8_t { Reg, Const, Global };
    Kind kind = Kind::Const;
    std::uint32_t index = 0; // reg id or allocation index
    Value constant;          // Kind::Const payload

    static Operand reg(std::uint32_t id) { return {Kind::Reg, id, {}}; }
    static Operand global(std::uint32_t alloc) { return {Kind::Global, alloc, {}}; }
    static Operand constant_of(Value v) { return {Kind::Const, 0, v}; }
};

struct Instruction {
    Opcode op = Opcode::Ret;
    ValueType type = ValueType::I64; // operand/result type token as written
    std::int32_t result = -1;        // value id, -1 when none
    ICmpPred ipred = ICmpPred::Eq;
    FCmpPred fpred = FCmpPred::Oeq;
    Intrinsic intrinsic = Intrinsic::Print;
    std::vector<Operand> operands;
    std::vector<std::uint32_t> labels;      // branch targets (block ids)
    std::vector<std::uint32_t> phi_blocks;  // per-operand incoming block ids
    std::uint32_t alloc_index = 0;          // Opcode::Alloc
    std::string source_label;               // optional !label tag
    std::uint32_t static_id = 0;
    std::uint32_t line = 0;
};

struct BasicBlock {
    std::string name;
    std::vector<Instruction> insts;
};

struct Allocation {
    std::string name;
    ValueType elem_type = ValueType::F64;
    std::uint64_t count = 0;
    std::uint64_t base = 0; // assigned address
    bool from_input = false;
};

struct InputDecl {
    std::string name;
    ValueType type = ValueType::F64;
    std::uint64_t count = 0;     // 0 = scalar
    std::int32_t value_id = -1;  // scalar inputs define an SSA value
    std::uint32_t alloc_index = 0; // array inputs fill this allocation
    // inline default: one value for scalars, a prefix for arrays with the
    // tail zero-filled; empty means zero unless bound at run time
    std::vector<Value> defaults;
};

struct Program {
    std::vector<Allocation> allocations;
    std::vector<InputDecl> inputs;
    std::vector<BasicBlock> blocks;
    std::uint32_t entry = 0;
    std::vector<std::string> value_names; // dense value id -> name
    std::vector<ValueType> value_types;

    std::uint32_t num_values() const { return static_cast<std::uint32_t>(value_names.size()); }
    const Instruction* find_static(std::uint32_t static_id) const;
    std::optional<std::uint32_t> find_allocation(const std::string& name) const;
    std::uint64_t memory_size() const; // bytes, allocations laid out from kMemoryBase
};

// objects are laid out from this base so that address 0 and small
// corrupted offsets fall outside valid memory
constexpr std::uint64_t kMemoryBase = 0x1000;

// canonical text form; parse_program(print_program(p)) is structurally p
std::string print_program(const Program& p);

// FNV-1a over the canonical text
std::uint64_t program_hash(const Program& p);

void assign_layout(Program& p); // fills Allocation::base, called by the parser

} // namespace arat
