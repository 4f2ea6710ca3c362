#include "arat/parser.hpp"

#include <algorithm>
#include <set>

namespace arat {

namespace {

struct DefSite {
    bool defined = false;
    bool is_input = false;
    std::uint32_t block = 0;
    std::uint32_t index = 0; // position within block
};

// iterative dominator sets over the explicit CFG; programs are small
std::vector<std::set<std::uint32_t>> dominators(const Program& p,
                                                const std::vector<std::vector<std::uint32_t>>& preds) {
    size_t n = p.blocks.size();
    std::set<std::uint32_t> all;
    for (std::uint32_t b = 0; b < n; ++b) all.insert(b);
    std::vector<std::set<std::uint32_t>> dom(n, all);
    dom[p.entry] = {p.entry};
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::uint32_t b = 0; b < n; ++b) {
            if (b == p.entry) continue;
            std::set<std::uint32_t> nd = all;
            bool any = false;
            for (auto pr : preds[b]) {
                std::set<std::uint32_t> inter;
                std::set_intersection(nd.begin(), nd.end(), dom[pr].begin(), dom[pr].end(),
                                      std::inserter(inter, inter.begin()));
                nd = std::move(inter);
                any = true;
            }
            if (!any) nd.clear(); // unreachable
            nd.insert(b);
            if (nd != dom[b]) {
                dom[b] = std::move(nd);
                changed = true;
            }
        }
    }
    return dom;
}

bool is_terminator(Opcode op) {
    return op == Opcode::Br || op == Opcode::CondBr || op == Opcode::Ret;
}

} // namespace

std::vector<Diagnostic> validate(const Program& p) {
    std::vector<Diagnostic> out;
    auto diag = [&](const Instruction* in, const char* code, const std::string& msg) {
        out.push_back({in ? in->static_id : 0, in ? in->line : 0, code, msg});
    };

    if (p.blocks.empty()) {
        out.push_back({0, 0, "E_ENTRY", "program has no blocks"});
        return out;
    }
    for (const auto& a : p.allocations)
        if (a.count == 0)
            out.push_back({0, 0, "E_ALLOC_COUNT", "object '" + a.name + "' has zero elements"});

    // def sites
    std::vector<DefSite> defs(p.num_values());
    for (const auto& in : p.inputs)
        if (in.value_id >= 0) defs[in.value_id] = {true, true, 0, 0};
    for (std::uint32_t b = 0; b < p.blocks.size(); ++b)
        for (std::uint32_t k = 0; k < p.blocks[b].insts.size(); ++k) {
            const auto& in = p.blocks[b].insts[k];
            if (in.result >= 0) defs[in.result] = {true, false, b, k};
        }

    // terminators and phi placement
    std::vector<std::vector<std::uint32_t>> preds(p.blocks.size());
    for (std::uint32_t b = 0; b < p.blocks.size(); ++b) {
        const auto& insts = p.blocks[b].insts;
        if (insts.empty() || !is_terminator(insts.back().op)) {
            Diagnostic d{0, 0, "E_TERM", "block '" + p.blocks[b].name + "' lacks a terminator"};
            if (!insts.empty()) {
                d.static_id = insts.back().static_id;
                d.line = insts.back().line;
            }
            out.push_back(d);
        }
        bool head = true;
        for (const auto& in : insts) {
            if (is_terminator(in.op) && &in != &insts.back())
                diag(&in, "E_TERM", "terminator before end of block");
            if (in.op == Opcode::Phi && !head)
                diag(&in, "E_PHI_POSITION", "phi after non-phi instruction");
            if (in.op != Opcode::Phi) head = false;
            for (auto l : in.labels) preds[l].push_back(b);
        }
    }

    auto dom = dominators(p, preds);
    auto dominates = [&](std::uint32_t a, std::uint32_t b) { return dom[b].count(a) != 0; };

    // phi coverage: incoming list must match predecessors exactly once each
    for (std::uint32_t b = 0; b < p.blocks.size(); ++b)
        for (const auto& in : p.blocks[b].insts) {
            if (in.op != Opcode::Phi) continue;
            std::multiset<std::uint32_t> have(in.phi_blocks.begin(), in.phi_blocks.end());
            std::multiset<std::uint32_t> want(preds[b].begin(), preds[b].end());
            if (have != want) {
                std::string names;
                for (std::uint32_t w : want)
                    if (!have.count(w)) names += " '" + p.blocks[w].name + "'";
                for (std::uint32_t h : have)
                    if (!want.count(h)) names += " '" + p.blocks[h].name + "'";
                diag(&in, "E_PHI_PREDS",
                     "phi incoming blocks do not cover predecessors exactly once:" + names);
            }
        }

    // operand references: defined, typed, dominating
    auto check_use = [&](const Instruction& in, std::uint32_t b, std::uint32_t k,
                         const Operand& o, size_t slot) {
        if (o.kind != Operand::Kind::Reg) return;
        const DefSite& d = defs[o.index];
        if (!d.defined) {
            diag(&in, "E_UNDEF", "use of undefined value '%" + p.value_names[o.index] + "'");
            return;
        }
        if (d.is_input) return;
        if (in.op == Opcode::Phi) {
            std::uint32_t pred = in.phi_blocks[slot];
            if (!(d.block == pred || dominates(d.block, pred)))
                diag(&in, "E_DOM",
                     "phi input '%" + p.value_names[o.index] + "' does not dominate predecessor");
            return;
        }
        bool ok = (d.block == b && d.index < k) || (d.block != b && dominates(d.block, b));
        if (!ok)
            diag(&in, "E_DOM",
                 "use of '%" + p.value_names[o.index] + "' not dominated by its definition");
    };

    for (std::uint32_t b = 0; b < p.blocks.size(); ++b)
        for (std::uint32_t k = 0; k < p.blocks[b].insts.size(); ++k) {
            const auto& in = p.blocks[b].insts[k];
            for (size_t s = 0; s < in.operands.size(); ++s) check_use(in, b, k, in.operands[s], s);
        }

    // type rules
    auto op_type = [&](const Operand& o) -> ValueType {
        switch (o.kind) {
        case Operand::Kind::Reg: return p.value_types[o.index];
        case Operand::Kind::Global: return ValueType::I64;
        default: return o.constant.type;
        }
    };
    auto want = [&](const Instruction& in, size_t slot, ValueType ty) {
        if (slot >= in.operands.size()) return;
        const Operand& o = in.operands[slot];
        if (o.kind == Operand::Kind::Reg && !defs[o.index].defined) return; // already reported
        if (op_type(o) != ty)
            diag(&in, "E_TYPE",
                 std::string("operand ") + std::to_string(slot) + " must be " + type_name(ty));
    };

    for (const auto& blk : p.blocks)
        for (const auto& in : blk.insts) {
            switch (in.op) {
            case Opcode::Add: case Opcode::Sub: case Opcode::Mul:
            case Opcode::Div: case Opcode::Rem:
            case Opcode::Shl: case Opcode::LShr:
                if (in.type != ValueType::I32 && in.type != ValueType::I64)
                    diag(&in, "E_TYPE", "integer arithmetic requires i32 or i64");
                want(in, 0, in.type);
                want(in, 1, in.type);
                break;
            case Opcode::And: case Opcode::Or: case Opcode::Xor:
                if (in.type == ValueType::F64)
                    diag(&in, "E_TYPE", "bitwise ops take integer types");
                want(in, 0, in.type);
                want(in, 1, in.type);
                break;
            case Opcode::FAdd: case Opcode::FSub: case Opcode::FMul: case Opcode::FDiv:
                if (in.type != ValueType::F64) diag(&in, "E_TYPE", "float arithmetic requires f64");
                want(in, 0, ValueType::F64);
                want(in, 1, ValueType::F64);
                break;
            case Opcode::ICmp:
                if (in.type != ValueType::I32 && in.type != ValueType::I64)
                    diag(&in, "E_TYPE", "icmp requires i32 or i64");
                want(in, 0, in.type);
                want(in, 1, in.type);
                break;
            case Opcode::FCmp:
                want(in, 0, ValueType::F64);
                want(in, 1, ValueType::F64);
                break;
            case Opcode::Trunc: {
                ValueType src = op_type(in.operands[0]);
                bool ok = (src == ValueType::I64 &&
                           (in.type == ValueType::I32 || in.type == ValueType::I1)) ||
                          (src == ValueType::I32 && in.type == ValueType::I1);
                if (!ok) diag(&in, "E_TYPE", "trunc must narrow an integer type");
                break;
            }
            case Opcode::ZExt: case Opcode::SExt: {
                ValueType src = op_type(in.operands[0]);
                bool ok = (src == ValueType::I1 &&
                           (in.type == ValueType::I32 || in.type == ValueType::I64)) ||
                          (src == ValueType::I32 && in.type == ValueType::I64);
                if (!ok) diag(&in, "E_TYPE", "extension must widen an integer type");
                break;
            }
            case Opcode::Load:
                want(in, 0, ValueType::I64);
                break;
            case Opcode::Store:
                want(in, 0, in.type);
                want(in, 1, ValueType::I64);
                break;
            case Opcode::Gep:
                want(in, 0, ValueType::I64);
                if (op_type(in.operands[1]) == ValueType::F64 ||
                    op_type(in.operands[1]) == ValueType::I1)
                    diag(&in, "E_TYPE", "gep index must be i32 or i64");
                break;
            case Opcode::Phi:
                for (size_t s = 0; s < in.operands.size(); ++s) want(in, s, in.type);
                break;
            case Opcode::CondBr:
                want(in, 0, ValueType::I1);
                break;
            case Opcode::Call:
                if (in.intrinsic != Intrinsic::Print) {
                    if (in.operands.size() != 1) diag(&in, "E_TYPE", "intrinsic takes one argument");
                    else want(in, 0, ValueType::F64);
                    if (in.type != ValueType::F64 || in.result < 0)
                        diag(&in, "E_TYPE", "float intrinsic returns f64");
                } else if (in.operands.size() != 1) {
                    diag(&in, "E_TYPE", "print takes one argument");
                }
                break;
            default:
                break;
            }
        }

    // every load/store address must trace back to an alloc or gep result,
    // through phis if needed
    {
        std::vector<char> addrlike(p.num_values(), 0);
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& blk : p.blocks)
                for (const auto& in : blk.insts) {
                    if (in.result < 0 || addrlike[in.result]) continue;
                    bool is = false;
                    if (in.op == Opcode::Gep || in.op == Opcode::Alloc) {
                        is = true;
                    } else if (in.op == Opcode::Phi) {
                        is = !in.operands.empty();
                        for (const auto& o : in.operands) {
                            if (o.kind == Operand::Kind::Global) continue;
                            if (o.kind == Operand::Kind::Reg && addrlike[o.index]) continue;
                            is = false;
                        }
                    }
                    if (is) {
                        addrlike[in.result] = 1;
                        changed = true;
                    }
                }
        }
        auto check_addr = [&](const Instruction& in, const Operand& o) {
            if (o.kind == Operand::Kind::Global) return;
            if (o.kind == Operand::Kind::Reg && addrlike[o.index]) return;
            if (o.kind == Operand::Kind::Reg && !defs[o.index].defined) return;
            diag(&in, "E_ADDR", "memory address does not derive from an allocation");
        };
        for (const auto& blk : p.blocks)
            for (const auto& in : blk.insts) {
                if (in.op == Opcode::Load) check_addr(in, in.operands[0]);
                if (in.op == Opcode::Store) check_addr(in, in.operands[1]);
                if (in.op == Opcode::Gep) check_addr(in, in.operands[0]);
            }
    }

    std::stable_sort(out.begin(), out.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return a.static_id != b.static_id ? a.static_id < b.static_id : a.code < b.code;
    });
    return out;
}

} // namespace arat
