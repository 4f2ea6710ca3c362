#pragma once

#include "arat/trace.hpp"

#include <map>
#include <string>
#include <vector>

namespace arat {

using Bindings = std::map<std::string, std::vector<Value>>;

enum class CrashReason { OutOfBounds, DivByZero };

struct Outcome {
    enum class Kind { Completed, Crash, Timeout };
    Kind kind = Kind::Completed;
    CrashReason crash = CrashReason::OutOfBounds;
    std::vector<std::pair<std::string, Value>> results; // named ret values
    std::string printed;
    std::uint64_t dynamic_length = 0;
    bool operator==(const Outcome&) const = default;
    const Value* find_result(const std::string& name) const;
};

// one planned corruption; slot >= 0 names an operand slot, kResultSlot (-1)
// the result. Semantics by opcode:
//   Load slot 0: xor the accessed memory bytes before the read (persists)
//   Store result: xor the destination bytes before the store executes
//   Store slot 0/1, other operand slots: xor the value as consumed (register
//     itself stays clean for other uses)
//   non-Store result: xor the computed result before writeback
struct FaultSpec {
    std::uint64_t dyn_id = 0;
    std::int32_t slot = 0;
    std::uint64_t xor_mask = 0;
};

struct RunOptions {
    std::uint64_t step_limit = 10'000'000;
    bool record_trace = false;
    std::vector<FaultSpec> faults;
};

struct RunResult {
    Outcome outcome;
    Trace trace;
    std::vector<std::uint8_t> final_memory;
};

class Interp {
public:
    Interp(const Program& p, const Bindings& inputs, RunOptions opt = {});

    bool halted() const { return halted_; }
    void step();
    const Outcome& outcome() const { return outcome_; } // valid once halted

    std::uint64_t dyn_count() const { return dyn_; }
    std::uint32_t cur_block() const { return block_; }
    std::uint32_t cur_ip() const { return ip_; }
    const Program& program() const { return *p_; }
    const std::vector<Value>& regs() const { return regs_; }
    std::vector<std::uint8_t>& memory() { return mem_; }
    const std::vector<std::uint8_t>& memory() const { return mem_; }
    const std::string& printed() const { return out_; }
    const Trace& trace() const { return trace_; }
    Trace take_trace() { return std::move(trace_); }

    // effects of the most recent step, for lockstep comparison
    struct Effect {
        const Instruction* inst = nullptr;
        std::uint32_t n_in = 0;
        Value in[4]; // consumed operand values (post-fault); phi: chosen value
        bool wrote_reg = false;
        std::int32_t reg = -1;
        bool wrote_mem = false, read_mem = false;
        std::uint64_t mem_addr = 0, read_addr = 0;
        std::uint32_t mem_size = 0, read_size = 0;
        std::uint64_t printed_len = 0; // total printed bytes after the step
    };
    const Effect& effect() const { return eff_; }

    // evaluates a load/store address operand without side effects
    std::uint64_t peek_address(const Instruction& in) const;

    void add_fault(const FaultSpec& f) { opt_.faults.push_back(f); }

private:
    Value eval(const Operand& o) const;
    void fail(CrashReason r);
    void finish_timeout();
    bool bounds_ok(std::uint64_t addr, std::uint32_t size) const;

    const Program* p_;
    RunOptions opt_;
    std::vector<Value> regs_;
    std::vector<std::uint8_t> mem_;
    std::string out_;
    std::uint32_t block_ = 0, ip_ = 0;
    std::int32_t pred_block_ = -1;
    std::uint64_t dyn_ = 0;
    bool halted_ = false;
    Outcome outcome_;
    Trace trace_;
    Effect eff_;
};

RunResult run(const Program& p, const Bindings& inputs, const RunOptions& opt = {});
Outcome run_with_injection(const Program& p, const Bindings& inputs, const FaultSpec& fault,
                           std::uint64_t step_limit);

// default input bindings declared inline in the program header
Bindings default_bindings(const Program& p);

} // namespace arat
