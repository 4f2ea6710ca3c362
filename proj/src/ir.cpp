#include "arat/ir.hpp"

#include <sstream>

namespace arat {

const char* opcode_name(Opcode op) {
    switch (op) {
    case Opcode::Add: return "add";
    case Opcode::Sub: return "sub";
    case Opcode::Mul: return "mul";
    case Opcode::Div: return "div";
    case Opcode::Rem: return "rem";
    case Opcode::And: return "and";
    case Opcode::Or: return "or";
    case Opcode::Xor: return "xor";
    case Opcode::Shl: return "shl";
    case Opcode::LShr: return "lshr";
    case Opcode::Trunc: return "trunc";
    case Opcode::ZExt: return "zext";
    case Opcode::SExt: return "sext";
    case Opcode::ICmp: return "icmp";
    case Opcode::FAdd: return "fadd";
    case Opcode::FSub: return "fsub";
    case Opcode::FMul: return "fmul";
    case Opcode::FDiv: return "fdiv";
    case Opcode::FCmp: return "fcmp";
    case Opcode::Load: return "load";
    case Opcode::Store: return "store";
    case Opcode::Alloc: return "alloc";
    case Opcode::Gep: return "gep";
    case Opcode::Phi: return "phi";
    case Opcode::Br: return "br";
    case Opcode::CondBr: return "condbr";
    case Opcode::Call: return "call";
    case Opcode::Ret: return "ret";
    }
    return "?";
}

const char* icmp_pred_name(ICmpPred p) {
    switch (p) {
    case ICmpPred::Eq: return "eq";
    case ICmpPred::Ne: return "ne";
    case ICmpPred::Slt: return "slt";
    case ICmpPred::Sle: return "sle";
    case ICmpPred::Sgt: return "sgt";
    case ICmpPred::Sge: return "sge";
    case ICmpPred::Ult: return "ult";
    case ICmpPred::Ule: return "ule";
    case ICmpPred::Ugt: return "ugt";
    case ICmpPred::Uge: return "uge";
    }
    return "?";
}

const char* fcmp_pred_name(FCmpPred p) {
    switch (p) {
    case FCmpPred::Oeq: return "oeq";
    case FCmpPred::One: return "one";
    case FCmpPred::Olt: return "olt";
    case FCmpPred::Ole: return "ole";
    case FCmpPred::Ogt: return "ogt";
    case FCmpPred::Oge: return "oge";
    case FCmpPred::Une: return "une";
    }
    return "?";
}

const char* intrinsic_name(Intrinsic f) {
    switch (f) {
    case Intrinsic::Sqrt: return "sqrt";
    case Intrinsic::Fabs: return "fabs";
    case Intrinsic::Print: return "print";
    }
    return "?";
}

const Instruction* Program::find_static(std::uint32_t static_id) const {
    for (const auto& b : blocks)
        for (const auto& in : b.insts)
            if (in.static_id == static_id) return &in;
    return nullptr;
}

std::optional<std::uint32_t> Program::find_allocation(const std::string& name) const {
    for (std::uint32_t i = 0; i < allocations.size(); ++i)
        if (allocations[i].name == name) return i;
    return std::nullopt;
}

std::uint64_t Program::memory_size() const {
    std::uint64_t end = kMemoryBase;
    for (const auto& a : allocations) {
        std::uint64_t top = a.base + a.count * element_size(a.elem_type);
        if (top > end) end = top;
    }
    return end - kMemoryBase;
}

void assign_layout(Program& p) {
    std::uint64_t addr = kMemoryBase;
    for (auto& a : p.allocations) {
        addr = (addr + 7) & ~7ull; // 8-byte aligned objects
        a.base = addr;
        addr += a.count * element_size(a.elem_type);
    }
}

namespace {

void print_operand(std::ostringstream& os, const Program& p, const Operand& o) {
    switch (o.kind) {
    case Operand::Kind::Reg: os << '%' << p.value_names[o.index]; break;
    case Operand::Kind::Global: os << '@' << p.allocations[o.index].name; break;
    case Operand::Kind::Const: os << o.constant.to_text(); break;
    }
}

void print_inst(std::ostringstream& os, const Program& p, const Instruction& in) {
    os << "  ";
    if (in.result >= 0) os << '%' << p.value_names[in.result] << " = ";
    os << opcode_name(in.op);
    switch (in.op) {
    case Opcode::ICmp: os << ' ' << icmp_pred_name(in.ipred); break;
    case Opcode::FCmp: os << ' ' << fcmp_pred_name(in.fpred); break;
    default: break;
    }
    switch (in.op) {
    case Opcode::Br:
        os << ' ' << p.blocks[in.labels[0]].name;
        break;
    case Opcode::CondBr:
        os << ' ';
        print_operand(os, p, in.operands[0]);
        os << ", " << p.blocks[in.labels[0]].name << ", " << p.blocks[in.labels[1]].name;
        break;
    case Opcode::Ret:
        for (size_t i = 0; i < in.operands.size(); ++i) {
            os << (i ? ", " : " ");
            print_operand(os, p, in.operands[i]);
        }
        break;
    case Opcode::Alloc:
        os << ' ' << type_name(in.type) << " x " << p.allocations[in.alloc_index].count;
        break;
    case Opcode::Phi:
        os << ' ' << type_name(in.type);
        for (size_t i = 0; i < in.operands.size(); ++i) {
            os << (i ? ", [" : " [");
            print_operand(os, p, in.operands[i]);
            os << ", " << p.blocks[in.phi_blocks[i]].name << ']';
        }
        break;
    case Opcode::Call:
        os << ' ' << (in.result >= 0 ? type_name(in.type) : "void") << ' '
           << intrinsic_name(in.intrinsic) << '(';
        for (size_t i = 0; i < in.operands.size(); ++i) {
            if (i) os << ", ";
            print_operand(os, p, in.operands[i]);
        }
        os << ')';
        break;
    case Opcode::Trunc:
    case Opcode::ZExt:
    case Opcode::SExt: {
        // source type token, then "to" result type
        ValueType src = in.operands[0].kind == Operand::Kind::Reg
                            ? p.value_types[in.operands[0].index]
                            : in.operands[0].constant.type;
        os << ' ' << type_name(src) << ' ';
        print_operand(os, p, in.operands[0]);
        os << " to " << type_name(in.type);
        break;
    }
    default:
        os << ' ' << type_name(in.type);
        for (size_t i = 0; i < in.operands.size(); ++i) {
            os << (i ? ", " : " ");
            print_operand(os, p, in.operands[i]);
        }
        break;
    }
    if (!in.source_label.empty()) os << " !label \"" << in.source_label << '"';
    os << '\n';
}

} // namespace

std::string print_program(const Program& p) {
    std::ostringstream os;
    for (const auto& a : p.allocations) {
        bool inst_form = false;
        for (const auto& b : p.blocks)
            for (const auto& in : b.insts)
                if (in.op == Opcode::Alloc && p.allocations[in.alloc_index].name == a.name)
                    inst_form = true;
        bool array_input = false;
        for (const auto& i : p.inputs)
            if (i.count > 0 && p.allocations[i.alloc_index].name == a.name) array_input = true;
        if (!inst_form && !array_input)
            os << "alloc " << a.name << ' ' << type_name(a.elem_type) << ' ' << a.count << '\n';
    }
    for (const auto& i : p.inputs) {
        os << "input " << i.name << ' ' << type_name(i.type);
        if (i.count > 0) os << ' ' << i.count;
        if (i.defaults.size() == 1 && i.count == 0) {
            os << " = " << i.defaults[0].to_text();
        } else if (!i.defaults.empty()) {
            os << " = [";
            for (size_t k = 0; k < i.defaults.size(); ++k)
                os << (k ? ", " : "") << i.defaults[k].to_text();
            os << ']';
        }
        os << '\n';
    }
    for (const auto& b : p.blocks) {
        os << b.name << ":\n";
        for (const auto& in : b.insts) print_inst(os, p, in);
    }
    return os.str();
}

std::uint64_t program_hash(const Program& p) {
    std::string text = print_program(p);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace arat
