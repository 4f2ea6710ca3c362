#include "arat/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>

namespace arat {

namespace {

using LiveMatrix = std::vector<std::vector<std::vector<std::uint64_t>>>;

void set_bit(std::vector<std::uint64_t>& w, std::uint32_t i) { w[i >> 6] |= 1ull << (i & 63); }
void clear_bit(std::vector<std::uint64_t>& w, std::uint32_t i) { w[i >> 6] &= ~(1ull << (i & 63)); }
bool test_bit(const std::vector<std::uint64_t>& w, std::uint32_t i) {
    return (w[i >> 6] >> (i & 63)) & 1;
}

bool or_into(std::vector<std::uint64_t>& dst, const std::vector<std::uint64_t>& src) {
    bool changed = false;
    for (std::size_t i = 0; i < dst.size(); ++i) {
        std::uint64_t v = dst[i] | src[i];
        if (v != dst[i]) {
            dst[i] = v;
            changed = true;
        }
    }
    return changed;
}

} // namespace

LiveMatrix compute_live_in(const Program& p) {
    std::size_t words = (p.num_values() + 63) / 64;
    std::size_t nb = p.blocks.size();
    LiveMatrix live(nb);
    for (std::size_t b = 0; b < nb; ++b)
        live[b].assign(p.blocks[b].insts.size(), std::vector<std::uint64_t>(words, 0));

    // per-edge phi uses: value ids a successor's phis read when entered from
    // this block; conservatively also live at every point of the phi prefix
    auto block_succs = [&](const BasicBlock& bb) -> std::vector<std::uint32_t> {
        if (bb.insts.empty()) return {};
        const Instruction& t = bb.insts.back();
        return {t.labels.begin(), t.labels.end()};
    };

    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t bi = nb; bi-- > 0;) {
            const BasicBlock& bb = p.blocks[bi];
            if (bb.insts.empty()) continue;
            std::vector<std::uint64_t> out(words, 0);
            for (std::uint32_t s : block_succs(bb)) {
                // successor head liveness minus its phi defs, plus the values
                // its phis read along this edge
                std::vector<std::uint64_t> head = live[s].empty()
                                                      ? std::vector<std::uint64_t>(words, 0)
                                                      : live[s][0];
                for (const Instruction& in : p.blocks[s].insts) {
                    if (in.op != Opcode::Phi) break;
                    if (in.result >= 0) clear_bit(head, static_cast<std::uint32_t>(in.result));
                    for (std::size_t k = 0; k < in.operands.size(); ++k)
                        if (in.phi_blocks[k] == bi && in.operands[k].kind == Operand::Kind::Reg)
                            set_bit(head, in.operands[k].index);
                }
                or_into(out, head);
            }
            std::vector<std::uint64_t> cur = out;
            for (std::size_t ip = bb.insts.size(); ip-- > 0;) {
                const Instruction& in = bb.insts[ip];
                if (in.result >= 0) clear_bit(cur, static_cast<std::uint32_t>(in.result));
                for (const Operand& o : in.operands)
                    if (o.kind == Operand::Kind::Reg) set_bit(cur, o.index);
                changed |= or_into(live[bi][ip], cur);
                cur = live[bi][ip];
            }
        }
    }
    return live;
}

namespace {

MaskClass absorb_class(const Instruction& in) {
    switch (in.op) {
    case Opcode::And:
    case Opcode::Or:
    case Opcode::Xor:
    case Opcode::ICmp:
    case Opcode::FCmp:
    case Opcode::Trunc:
    case Opcode::ZExt:
    case Opcode::SExt:
    case Opcode::Shl:
    case Opcode::LShr:
    case Opcode::CondBr:
        return MaskClass::LogicalComparison;
    case Opcode::Add:
    case Opcode::Sub:
    case Opcode::Mul:
    case Opcode::Div:
    case Opcode::Rem:
    case Opcode::FAdd:
    case Opcode::FSub:
    case Opcode::FMul:
    case Opcode::FDiv:
        return MaskClass::ValueShadowing;
    case Opcode::Call:
        return in.intrinsic == Intrinsic::Print ? MaskClass::LogicalComparison
                                                : MaskClass::ValueShadowing;
    default:
        return MaskClass::LogicalComparison;
    }
}

struct ToleranceRange {
    std::uint64_t base = 0, end = 0; // f64 cells of one object
    double tau = 0.0;
    bool active = false;
};

struct LockstepState {
    std::set<std::uint64_t> bytes; // addresses where F memory differs from G
    std::set<std::int32_t> regs;   // value ids where F registers differ

    // compare [addr, addr+size) and update the byte diff set; with a
    // tolerance range, f64 cells whose values stay within tau relative
    // error count as equal
    void sync_range(const Interp& g, const Interp& f, std::uint64_t addr, std::uint64_t size,
                    const ToleranceRange& tol) {
        for (std::uint64_t a = addr; a < addr + size; ++a) {
            std::uint64_t off = a - kMemoryBase;
            if (off >= g.memory().size()) continue;
            if (g.memory()[off] != f.memory()[off]) bytes.insert(a);
            else bytes.erase(a);
        }
        if (!tol.active) return;
        std::uint64_t lo = std::max<std::uint64_t>(addr & ~7ull, tol.base);
        for (std::uint64_t cell = lo; cell < addr + size && cell < tol.end; cell += 8) {
            bool dirty = false;
            for (std::uint64_t a = cell; a < cell + 8; ++a) dirty |= bytes.count(a) != 0;
            if (!dirty) continue;
            double gv, fv;
            std::memcpy(&gv, g.memory().data() + (cell - kMemoryBase), 8);
            std::memcpy(&fv, f.memory().data() + (cell - kMemoryBase), 8);
            if (std::fabs(fv - gv) <= tol.tau * std::fabs(gv))
                for (std::uint64_t a = cell; a < cell + 8; ++a) bytes.erase(a);
        }
    }
};

bool outputs_equal(const Outcome& a, const Outcome& b) {
    return a.kind == Outcome::Kind::Completed && b.kind == Outcome::Kind::Completed &&
           a.results == b.results && a.printed == b.printed;
}

// g and f are positioned at the fault op, fault already armed (memory flips
// applied to f, register faults queued in f's options)
ReplayVerdict lockstep(Interp& g, Interp& f, const PropagationConfig& cfg, const LiveMatrix& live,
                       const ToleranceRange& tol, LockstepState st) {
    ReplayVerdict v;
    std::uint32_t tainted = 0;

    for (;;) {
        if (g.halted() || f.halted()) {
            if (g.halted() != f.halted()) {
                v.kind = ReplayVerdict::Kind::Diverged;
                v.steps = tainted;
                return v;
            }
            if (outputs_equal(g.outcome(), f.outcome())) {
                v.kind = ReplayVerdict::Kind::Converged;
                v.steps = tainted;
                v.cls = v.class_chain.empty() ? MaskClass::Overwriting : v.class_chain.back();
                return v;
            }
            v.kind = ReplayVerdict::Kind::Survived;
            v.steps = tainted;
            return v;
        }
        if (g.cur_block() != f.cur_block() || g.cur_ip() != f.cur_ip()) {
            v.kind = ReplayVerdict::Kind::Diverged;
            v.steps = tainted;
            return v;
        }

        g.step();
        f.step();

        if (f.halted() && f.outcome().kind == Outcome::Kind::Crash) {
            v.kind = ReplayVerdict::Kind::Diverged;
            v.steps = tainted;
            return v;
        }
        if (g.halted() != f.halted()) {
            v.kind = ReplayVerdict::Kind::Diverged;
            v.steps = tainted;
            return v;
        }

        const auto& eg = g.effect();
        const auto& ef = f.effect();
        if (eg.read_mem && ef.read_mem && eg.read_addr != ef.read_addr) {
            v.kind = ReplayVerdict::Kind::Diverged;
            v.steps = tainted;
            return v;
        }
        if (eg.wrote_mem && ef.wrote_mem && eg.mem_addr != ef.mem_addr) {
            v.kind = ReplayVerdict::Kind::Diverged;
            v.steps = tainted;
            return v;
        }

        bool in_differ = eg.n_in != ef.n_in;
        for (std::uint32_t i = 0; !in_differ && i < eg.n_in && i < 4; ++i)
            in_differ = eg.in[i] != ef.in[i];

        bool out_differ = false;
        bool reg_overwrote_equal = false;
        if (eg.wrote_reg) {
            bool was_dirty = st.regs.count(eg.reg) != 0;
            if (g.regs()[eg.reg] != f.regs()[eg.reg]) {
                st.regs.insert(eg.reg);
                out_differ = true;
            } else {
                st.regs.erase(eg.reg);
                if (was_dirty) reg_overwrote_equal = true;
            }
        }
        bool mem_overwrote_equal = false;
        if (eg.wrote_mem) {
            bool was_dirty = false;
            for (std::uint64_t a = eg.mem_addr; a < eg.mem_addr + eg.mem_size; ++a)
                was_dirty |= st.bytes.count(a) != 0;
            st.sync_range(g, f, eg.mem_addr, eg.mem_size, tol);
            bool now_dirty = false;
            for (std::uint64_t a = eg.mem_addr; a < eg.mem_addr + eg.mem_size; ++a)
                now_dirty |= st.bytes.count(a) != 0;
            out_differ |= now_dirty;
            if (was_dirty && !now_dirty) mem_overwrote_equal = true;
        }
        bool printed_differ = eg.printed_len != ef.printed_len || g.printed() != f.printed();
        if (printed_differ) {
            v.kind = ReplayVerdict::Kind::Survived;
            v.steps = tainted;
            return v;
        }

        bool is_tainted = in_differ || out_differ;
        if (is_tainted) {
            ++tainted;
            if (tainted > cfg.k) {
                v.kind = ReplayVerdict::Kind::Survived;
                v.steps = tainted;
                return v;
            }
        }

        // class events for this step; overwriting beats absorption when both
        bool event = false;
        if (reg_overwrote_equal || mem_overwrote_equal) {
            v.class_chain.push_back(MaskClass::Overwriting);
            event = true;
        } else if (in_differ && !out_differ) {
            v.class_chain.push_back(absorb_class(*eg.inst));
            event = true;
        }

        // convergence: same control point, no memory diffs, no live register
        // diffs; the mutual halt rule at the loop head covers the halted case
        if (st.bytes.empty() && !g.halted() && g.cur_block() == f.cur_block() &&
            g.cur_ip() == f.cur_ip()) {
            const auto& l = live[g.cur_block()][g.cur_ip()];
            bool any_live = false;
            for (std::int32_t r : st.regs)
                any_live = any_live || test_bit(l, static_cast<std::uint32_t>(r));
            if (!any_live) {
                if (!event && !st.regs.empty()) {
                    // dead differences were pruned by a control move, not by
                    // a data operation
                    v.class_chain.push_back(MaskClass::LogicalComparison);
                }
                v.kind = ReplayVerdict::Kind::Converged;
                v.steps = tainted;
                v.cls = v.class_chain.empty() ? MaskClass::Overwriting : v.class_chain.back();
                return v;
            }
        }
    }
}

ToleranceRange make_tolerance(const Program& p, const PropagationConfig& cfg) {
    ToleranceRange tol;
    if (!cfg.state_tolerance) return tol;
    auto idx = p.find_allocation(cfg.state_tolerance->first);
    if (!idx || p.allocations[*idx].elem_type != ValueType::F64) return tol;
    const Allocation& a = p.allocations[*idx];
    tol.base = a.base;
    tol.end = a.base + a.count * 8;
    tol.tau = cfg.state_tolerance->second;
    tol.active = true;
    return tol;
}

// arm the fault on f, which sits at the fault op; memory-kind faults flip
// target bytes directly and seed the diff set
void arm_fault(Interp& g, Interp& f, const FaultSpec& fault, const ToleranceRange& tol,
               LockstepState& st) {
    const Instruction& in = f.program().blocks[f.cur_block()].insts[f.cur_ip()];
    bool mem_kind = (in.op == Opcode::Load && fault.slot == 0) ||
                    (in.op == Opcode::Store && fault.slot == kResultSlot);
    if (!mem_kind) {
        f.add_fault(fault);
        return;
    }
    std::uint64_t addr = f.peek_address(in);
    std::uint32_t size = element_size(in.type);
    std::uint64_t off = addr - kMemoryBase;
    if (addr < kMemoryBase || off + size > f.memory().size()) {
        f.add_fault(fault); // will crash at the access; treated as divergence
        return;
    }
    for (std::uint32_t k = 0; k < size; ++k)
        f.memory()[off + k] ^= static_cast<std::uint8_t>(fault.xor_mask >> (8 * k));
    st.sync_range(g, f, addr, size, tol);
}

ReplayVerdict replay_from(const Interp& master, const FaultSpec& fault,
                          const PropagationConfig& cfg, const LiveMatrix& live,
                          const ToleranceRange& tol) {
    Interp g = master;
    Interp f = master;
    LockstepState st;
    arm_fault(g, f, fault, tol, st);
    return lockstep(g, f, cfg, live, tol, std::move(st));
}

} // namespace

ReplayVerdict fork_replay(const Program& p, const Bindings& inputs, const FaultSpec& fault,
                          const PropagationConfig& cfg) {
    RunOptions opt;
    opt.step_limit = cfg.step_limit;
    Interp master(p, inputs, opt);
    while (!master.halted() && master.dyn_count() < fault.dyn_id) master.step();
    LiveMatrix live = compute_live_in(p);
    return replay_from(master, fault, cfg, live, make_tolerance(p, cfg));
}

std::vector<PropagationOutcome> resolve(const Program& p, const Bindings& inputs,
                                        const std::vector<Candidate>& candidates,
                                        const PropagationConfig& cfg) {
    std::vector<PropagationOutcome> out(candidates.size());
    std::vector<std::size_t> order(candidates.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return candidates[a].dyn_id < candidates[b].dyn_id;
    });

    LiveMatrix live = compute_live_in(p);
    ToleranceRange tol = make_tolerance(p, cfg);
    RunOptions opt;
    opt.step_limit = cfg.step_limit;
    Interp master(p, inputs, opt);

    for (std::size_t oi : order) {
        const Candidate& c = candidates[oi];
        while (!master.halted() && master.dyn_count() < c.dyn_id) master.step();
        FaultSpec fs{c.dyn_id, c.slot, c.bits};
        ReplayVerdict v = replay_from(master, fs, cfg, live, tol);
        PropagationOutcome& po = out[oi];
        po.steps = v.steps;
        if (v.kind == ReplayVerdict::Kind::Converged) {
            po.masked = true;
            po.cls = v.cls;
        } else {
            po.masked = false;
            po.escalated = {c.dyn_id, c.slot, c.bits};
        }
    }
    return out;
}

} // namespace arat
