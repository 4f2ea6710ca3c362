#include "arat/interp.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace arat {

namespace {

constexpr std::uint64_t kQuietNaN = 0x7ff8000000000000ull;

Value canon_f64(double d) {
    if (std::isnan(d)) return Value::from_bits(ValueType::F64, kQuietNaN);
    return Value::f64(d);
}

void format_print(std::string& out, const Value& v) {
    char buf[32];
    switch (v.type) {
    case ValueType::F64:
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v.bits));
        break;
    case ValueType::I64:
        std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v.as_i64()));
        break;
    case ValueType::I32:
        std::snprintf(buf, sizeof buf, "%d", v.as_i32());
        break;
    case ValueType::I1:
        buf[0] = v.as_bool() ? '1' : '0';
        buf[1] = '\0';
        break;
    }
    out += buf;
    out += '\n';
}

} // namespace

const Value* Outcome::find_result(const std::string& name) const {
    for (const auto& [n, v] : results)
        if (n == name) return &v;
    return nullptr;
}

Interp::Interp(const Program& p, const Bindings& inputs, RunOptions opt)
    : p_(&p), opt_(std::move(opt)) {
    regs_.assign(p.num_values(), Value{});
    mem_.assign(p.memory_size(), 0);
    if (opt_.record_trace) {
        trace_.program_hash = program_hash(p);
        trace_.objects = DataObjectMap::from_program(p);
    }
    for (const auto& d : p.inputs) {
        auto it = inputs.find(d.name);
        const std::vector<Value>* vals = it != inputs.end() ? &it->second : nullptr;
        if (!vals && !d.defaults.empty()) vals = &d.defaults;
        if (d.count == 0) {
            Value v = Value::from_bits(d.type, 0);
            if (vals) {
                if (vals->size() != 1)
                    throw std::invalid_argument("scalar input '" + d.name + "' takes one value");
                v = Value::from_bits(d.type, (*vals)[0].bits);
            }
            regs_[d.value_id] = v;
        } else {
            if (vals && vals->size() > d.count)
                throw std::invalid_argument("too many values for input '" + d.name + "'");
            const Allocation& a = p.allocations[d.alloc_index];
            unsigned esz = element_size(a.elem_type);
            for (std::size_t i = 0; vals && i < vals->size(); ++i) {
                std::uint64_t raw = (*vals)[i].bits & type_mask(a.elem_type);
                std::memcpy(mem_.data() + (a.base - kMemoryBase) + i * esz, &raw, esz);
            }
        }
    }
    for (const auto& [name, vals] : inputs) {
        (void)vals;
        bool known = false;
        for (const auto& d : p.inputs) known = known || d.name == name;
        if (!known) throw std::invalid_argument("binding for unknown input '" + name + "'");
    }
    if (p.blocks.empty() || p.blocks[p.entry].insts.empty()) {
        halted_ = true;
        outcome_.kind = Outcome::Kind::Completed;
    }
    block_ = p.entry;
}

Value Interp::eval(const Operand& o) const {
    switch (o.kind) {
    case Operand::Kind::Reg: return regs_[o.index];
    case Operand::Kind::Const: return o.constant;
    case Operand::Kind::Global: return Value::i64(static_cast<std::int64_t>(p_->allocations[o.index].base));
    }
    return {};
}

bool Interp::bounds_ok(std::uint64_t addr, std::uint32_t size) const {
    if (addr < kMemoryBase) return false;
    std::uint64_t off = addr - kMemoryBase;
    return off <= mem_.size() && size <= mem_.size() - off;
}

void Interp::fail(CrashReason r) {
    halted_ = true;
    outcome_.kind = Outcome::Kind::Crash;
    outcome_.crash = r;
    outcome_.printed = out_;
    outcome_.dynamic_length = dyn_;
}

void Interp::finish_timeout() {
    halted_ = true;
    outcome_.kind = Outcome::Kind::Timeout;
    outcome_.printed = out_;
    outcome_.dynamic_length = dyn_;
}

std::uint64_t Interp::peek_address(const Instruction& in) const {
    if (in.op == Opcode::Load) return eval(in.operands[0]).bits;
    if (in.op == Opcode::Store) return eval(in.operands[1]).bits;
    return 0;
}

void Interp::step() {
    if (halted_) return;
    if (dyn_ >= opt_.step_limit) {
        finish_timeout();
        return;
    }
    const Instruction& in = p_->blocks[block_].insts[ip_];
    eff_ = Effect{};
    eff_.inst = &in;

    // faults scheduled for this dynamic op
    std::uint64_t slot_mask[4] = {0, 0, 0, 0};
    std::uint64_t result_mask = 0;
    bool memory_fault = false;
    std::uint64_t memory_mask = 0;
    for (const auto& f : opt_.faults) {
        if (f.dyn_id != dyn_) continue;
        if (f.slot < 0) {
            if (in.op == Opcode::Store) {
                memory_fault = true;
                memory_mask ^= f.xor_mask;
            } else {
                result_mask ^= f.xor_mask;
            }
        } else if (in.op == Opcode::Load && f.slot == 0) {
            memory_fault = true;
            memory_mask ^= f.xor_mask;
        } else if (f.slot < 4) {
            slot_mask[f.slot] ^= f.xor_mask;
        }
    }

    // consumed operand values; phi picks its own below
    Value in_v[4];
    std::uint32_t n_in = 0;
    if (in.op == Opcode::Phi) {
        for (std::size_t i = 0; i < in.phi_blocks.size(); ++i)
            if (static_cast<std::int32_t>(in.phi_blocks[i]) == pred_block_) {
                in_v[0] = eval(in.operands[i]);
                n_in = 1;
            }
        if (n_in == 0) {
            fail(CrashReason::OutOfBounds); // no incoming edge; validators reject this
            return;
        }
        in_v[0].bits = (in_v[0].bits ^ slot_mask[0]) & type_mask(in_v[0].type);
    } else {
        n_in = static_cast<std::uint32_t>(in.operands.size());
        for (std::uint32_t i = 0; i < n_in && i < 4; ++i) {
            in_v[i] = eval(in.operands[i]);
            if (slot_mask[i])
                in_v[i].bits = (in_v[i].bits ^ slot_mask[i]) & type_mask(in_v[i].type);
        }
    }
    eff_.n_in = n_in;
    for (std::uint32_t i = 0; i < n_in && i < 4; ++i) eff_.in[i] = in_v[i];

    bool has_result = in.result >= 0;
    Value result;
    std::uint32_t next_block = block_;
    std::uint32_t next_ip = ip_ + 1;
    bool jumped = false;

    auto int_width_ok = [&](Value& v) { v.bits &= type_mask(v.type); };
    (void)int_width_ok;

    switch (in.op) {
    case Opcode::Add:
        result = Value::from_bits(in.type, in_v[0].bits + in_v[1].bits);
        break;
    case Opcode::Sub:
        result = Value::from_bits(in.type, in_v[0].bits - in_v[1].bits);
        break;
    case Opcode::Mul:
        result = Value::from_bits(in.type, in_v[0].bits * in_v[1].bits);
        break;
    case Opcode::Div:
    case Opcode::Rem: {
        std::int64_t a = in_v[0].as_i64(), b = in_v[1].as_i64();
        if (b == 0) {
            fail(CrashReason::DivByZero);
            return;
        }
        std::int64_t q, r;
        std::int64_t minv = in.type == ValueType::I32 ? INT32_MIN : INT64_MIN;
        if (a == minv && b == -1) {
            q = minv;
            r = 0;
        } else {
            q = a / b;
            r = a % b;
        }
        result = Value::from_bits(in.type, static_cast<std::uint64_t>(in.op == Opcode::Div ? q : r));
        break;
    }
    case Opcode::And:
        result = Value::from_bits(in.type, in_v[0].bits & in_v[1].bits);
        break;
    case Opcode::Or:
        result = Value::from_bits(in.type, in_v[0].bits | in_v[1].bits);
        break;
    case Opcode::Xor:
        result = Value::from_bits(in.type, in_v[0].bits ^ in_v[1].bits);
        break;
    case Opcode::Shl:
    case Opcode::LShr: {
        std::uint64_t amt = in_v[1].bits;
        std::uint64_t v = in_v[0].bits;
        std::uint64_t r = 0;
        if (amt < bit_width(in.type)) r = in.op == Opcode::Shl ? (v << amt) : (v >> amt);
        result = Value::from_bits(in.type, r);
        break;
    }
    case Opcode::Trunc:
        result = Value::from_bits(in.type, in_v[0].bits);
        break;
    case Opcode::ZExt:
        result = Value::from_bits(in.type, in_v[0].bits);
        break;
    case Opcode::SExt: {
        std::uint64_t v = in_v[0].bits; // sign extends from the source width
        std::uint32_t w = bit_width(in_v[0].type);
        if (w < 64 && ((v >> (w - 1)) & 1)) v |= ~((1ull << w) - 1);
        result = Value::from_bits(in.type, v);
        break;
    }
    case Opcode::ICmp: {
        std::int64_t a = in_v[0].as_i64(), b = in_v[1].as_i64();
        std::uint64_t ua = in_v[0].bits, ub = in_v[1].bits;
        bool r = false;
        switch (in.ipred) {
        case ICmpPred::Eq: r = ua == ub; break;
        case ICmpPred::Ne: r = ua != ub; break;
        case ICmpPred::Slt: r = a < b; break;
        case ICmpPred::Sle: r = a <= b; break;
        case ICmpPred::Sgt: r = a > b; break;
        case ICmpPred::Sge: r = a >= b; break;
        case ICmpPred::Ult: r = ua < ub; break;
        case ICmpPred::Ule: r = ua <= ub; break;
        case ICmpPred::Ugt: r = ua > ub; break;
        case ICmpPred::Uge: r = ua >= ub; break;
        }
        result = Value::i1(r);
        break;
    }
    case Opcode::FAdd:
        result = canon_f64(in_v[0].as_f64() + in_v[1].as_f64());
        break;
    case Opcode::FSub:
        result = canon_f64(in_v[0].as_f64() - in_v[1].as_f64());
        break;
    case Opcode::FMul:
        result = canon_f64(in_v[0].as_f64() * in_v[1].as_f64());
        break;
    case Opcode::FDiv:
        result = canon_f64(in_v[0].as_f64() / in_v[1].as_f64());
        break;
    case Opcode::FCmp: {
        double a = in_v[0].as_f64(), b = in_v[1].as_f64();
        bool r = false;
        switch (in.fpred) {
        case FCmpPred::Oeq: r = a == b; break;
        case FCmpPred::One: r = a < b || a > b; break;
        case FCmpPred::Olt: r = a < b; break;
        case FCmpPred::Ole: r = a <= b; break;
        case FCmpPred::Ogt: r = a > b; break;
        case FCmpPred::Oge: r = a >= b; break;
        case FCmpPred::Une: r = !(a == b); break;
        }
        result = Value::i1(r);
        break;
    }
    case Opcode::Load: {
        std::uint64_t addr = in_v[0].bits;
        std::uint32_t size = element_size(in.type);
        if (!bounds_ok(addr, size)) {
            fail(CrashReason::OutOfBounds);
            return;
        }
        std::uint64_t off = addr - kMemoryBase;
        if (memory_fault)
            for (std::uint32_t k = 0; k < size; ++k)
                mem_[off + k] ^= static_cast<std::uint8_t>(memory_mask >> (8 * k));
        std::uint64_t raw = 0;
        std::memcpy(&raw, mem_.data() + off, size);
        result = Value::from_bits(in.type, raw);
        eff_.read_mem = true;
        eff_.read_addr = addr;
        eff_.read_size = size;
        break;
    }
    case Opcode::Store: {
        std::uint64_t addr = in_v[1].bits;
        std::uint32_t size = element_size(in.type);
        if (!bounds_ok(addr, size)) {
            fail(CrashReason::OutOfBounds);
            return;
        }
        std::uint64_t off = addr - kMemoryBase;
        if (memory_fault)
            for (std::uint32_t k = 0; k < size; ++k)
                mem_[off + k] ^= static_cast<std::uint8_t>(memory_mask >> (8 * k));
        std::uint64_t raw = in_v[0].bits & type_mask(in.type);
        std::memcpy(mem_.data() + off, &raw, size);
        eff_.wrote_mem = true;
        eff_.mem_addr = addr;
        eff_.mem_size = size;
        break;
    }
    case Opcode::Alloc:
        result = Value::i64(static_cast<std::int64_t>(p_->allocations[in.alloc_index].base));
        break;
    case Opcode::Gep: {
        std::int64_t idx = in_v[1].as_i64();
        std::uint64_t addr = in_v[0].bits +
                             static_cast<std::uint64_t>(idx) * element_size(in.type);
        result = Value::i64(static_cast<std::int64_t>(addr));
        break;
    }
    case Opcode::Phi:
        result = in_v[0];
        break;
    case Opcode::Br:
        next_block = in.labels[0];
        next_ip = 0;
        jumped = true;
        break;
    case Opcode::CondBr:
        next_block = in_v[0].as_bool() ? in.labels[0] : in.labels[1];
        next_ip = 0;
        jumped = true;
        break;
    case Opcode::Call:
        switch (in.intrinsic) {
        case Intrinsic::Sqrt:
            result = canon_f64(std::sqrt(in_v[0].as_f64()));
            break;
        case Intrinsic::Fabs:
            result = canon_f64(std::fabs(in_v[0].as_f64()));
            break;
        case Intrinsic::Print:
            format_print(out_, in_v[0]);
            break;
        }
        break;
    case Opcode::Ret: {
        halted_ = true;
        outcome_.kind = Outcome::Kind::Completed;
        for (std::uint32_t i = 0; i < n_in; ++i) {
            std::string name;
            if (in.operands[i].kind == Operand::Kind::Reg)
                name = p_->value_names[in.operands[i].index];
            else
                name = "ret" + std::to_string(i);
            outcome_.results.emplace_back(std::move(name), in_v[i]);
        }
        break;
    }
    }

    if (has_result && in.op != Opcode::Ret) {
        if (result_mask) result.bits = (result.bits ^ result_mask) & type_mask(result.type);
        regs_[in.result] = result;
        eff_.wrote_reg = true;
        eff_.reg = in.result;
    }

    if (opt_.record_trace) {
        TraceRecord r;
        r.dyn_id = dyn_;
        r.static_id = in.static_id;
        r.op = in.op;
        r.type = in.type;
        r.source_label = in.source_label;
        r.pred_block = in.op == Opcode::Phi ? pred_block_ : -1;
        if (in.op == Opcode::Phi) {
            OperandRecord o;
            o.value = in_v[0];
            r.operands.push_back(o);
        } else {
            for (std::uint32_t i = 0; i < n_in && i < 4; ++i) {
                OperandRecord o;
                o.value = in_v[i];
                if ((in.op == Opcode::Load && i == 0) || (in.op == Opcode::Store && i == 1)) {
                    o.has_address = true;
                    o.address = in_v[i].bits;
                }
                r.operands.push_back(o);
            }
        }
        if (has_result) {
            r.has_result = true;
            r.result = in.op == Opcode::Ret ? Value{} : regs_[in.result];
        }
        if (in.op == Opcode::Store) {
            r.result_has_address = true;
            r.result_address = in_v[1].bits;
        }
        trace_.records.push_back(std::move(r));
    }

    ++dyn_;
    eff_.printed_len = out_.size();

    if (halted_) {
        outcome_.printed = out_;
        outcome_.dynamic_length = dyn_;
        return;
    }
    if (jumped) {
        pred_block_ = static_cast<std::int32_t>(block_);
        block_ = next_block;
        ip_ = 0;
        (void)next_ip;
    } else {
        ++ip_;
    }
}

RunResult run(const Program& p, const Bindings& inputs, const RunOptions& opt) {
    Interp it(p, inputs, opt);
    while (!it.halted()) it.step();
    RunResult rr;
    rr.outcome = it.outcome();
    rr.trace = it.take_trace();
    rr.final_memory = it.memory();
    return rr;
}

Outcome run_with_injection(const Program& p, const Bindings& inputs, const FaultSpec& fault,
                           std::uint64_t step_limit) {
    RunOptions opt;
    opt.step_limit = step_limit;
    opt.faults.push_back(fault);
    Interp it(p, inputs, opt);
    while (!it.halted()) it.step();
    return it.outcome();
}

Bindings default_bindings(const Program& p) {
    Bindings b;
    for (const auto& d : p.inputs)
        if (!d.defaults.empty()) b[d.name] = d.defaults;
    return b;
}

} // namespace arat
