#include "arat/parser.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <map>
#include <optional>

namespace arat {

namespace {

struct Token {
    std::string text;
    std::uint32_t col = 0;
    bool quoted = false;
};

// one source line split into tokens; '%x' '@a' '!label' stay single tokens,
// punctuation ,[]():= splits off
std::vector<Token> tokenize(const std::string& line, std::uint32_t lineno) {
    std::vector<Token> out;
    size_t i = 0;
    while (i < line.size()) {
        char c = line[i];
        if (c == '#' || c == ';') break;
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        std::uint32_t col = static_cast<std::uint32_t>(i + 1);
        if (c == '"') {
            size_t j = line.find('"', i + 1);
            if (j == std::string::npos)
                throw ParseError(lineno, col, "E_SYNTAX", "unterminated string");
            out.push_back({line.substr(i + 1, j - i - 1), col, true});
            i = j + 1;
            continue;
        }
        if (std::strchr(",[]():=", c)) {
            out.push_back({std::string(1, c), col, false});
            ++i;
            continue;
        }
        size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) &&
               !std::strchr(",[]():=\"#;", line[j]))
            ++j;
        // exact bit-pattern literals keep their colon: bits:0x<hex>
        if (line.compare(i, j - i, "bits") == 0 && line.compare(j, 3, ":0x") == 0) {
            j += 3;
            while (j < line.size() && std::isxdigit(static_cast<unsigned char>(line[j]))) ++j;
        }
        out.push_back({line.substr(i, j - i), col, false});
        i = j;
    }
    return out;
}

struct LineTokens {
    std::uint32_t lineno = 0;
    std::vector<Token> toks;
};

class Parser {
public:
    explicit Parser(const std::string& text) {
        std::uint32_t lineno = 0;
        size_t pos = 0;
        while (pos <= text.size()) {
            size_t nl = text.find('\n', pos);
            std::string line = text.substr(pos, nl == std::string::npos ? std::string::npos
                                                                        : nl - pos);
            ++lineno;
            auto toks = tokenize(line, lineno);
            if (!toks.empty()) lines_.push_back({lineno, std::move(toks)});
            if (nl == std::string::npos) break;
            pos = nl + 1;
        }
    }

    Program run() {
        prescan();
        for (const auto& lt : lines_) parse_line(lt);
        if (!prog_.blocks.empty()) prog_.entry = 0;
        number_statics();
        assign_layout(prog_);
        return std::move(prog_);
    }

private:
    std::vector<LineTokens> lines_;
    Program prog_;
    std::map<std::string, std::uint32_t> block_ids_;
    std::map<std::string, std::uint32_t> value_ids_;
    std::map<std::string, std::uint32_t> alloc_ids_;
    std::vector<bool> value_defined_;
    std::int32_t cur_block_ = -1;

    [[noreturn]] void fail(std::uint32_t line, std::uint32_t col, const char* code,
                           const std::string& msg) {
        throw ParseError(line, col, code, msg);
    }

    static bool is_block_label(const LineTokens& lt) {
        return lt.toks.size() == 2 && lt.toks[1].text == ":" && !lt.toks[0].quoted &&
               lt.toks[0].text[0] != '%' && lt.toks[0].text[0] != '@';
    }

    std::uint32_t add_alloc(const std::string& name, ValueType t, std::uint64_t count,
                            std::uint32_t line, std::uint32_t col) {
        if (alloc_ids_.count(name)) fail(line, col, "E_DUP_OBJECT", "duplicate object '" + name + "'");
        std::uint32_t idx = static_cast<std::uint32_t>(prog_.allocations.size());
        prog_.allocations.push_back({name, t, count, 0, false});
        alloc_ids_[name] = idx;
        return idx;
    }

    // blocks, allocations and inputs must be known before operands resolve
    void prescan() {
        for (const auto& lt : lines_) {
            const auto& t = lt.toks;
            if (is_block_label(t.empty() ? lt : lt)) {
                const std::string& name = t[0].text;
                if (block_ids_.count(name))
                    fail(lt.lineno, t[0].col, "E_DUP_BLOCK", "duplicate block '" + name + "'");
                block_ids_[name] = static_cast<std::uint32_t>(prog_.blocks.size());
                prog_.blocks.push_back({name, {}});
                continue;
            }
            if (t[0].text == "alloc" && t.size() >= 4 && t[1].text[0] != '%') {
                ValueType ty;
                if (!parse_type_name(t[2].text, ty))
                    fail(lt.lineno, t[2].col, "E_TYPE", "unknown type '" + t[2].text + "'");
                add_alloc(t[1].text, ty, parse_count(t[3], lt.lineno), lt.lineno, t[1].col);
            } else if (t[0].text == "input" && t.size() >= 3) {
                ValueType ty;
                if (!parse_type_name(t[2].text, ty))
                    fail(lt.lineno, t[2].col, "E_TYPE", "unknown type '" + t[2].text + "'");
                InputDecl d;
                d.name = t[1].text;
                d.type = ty;
                size_t j = 3;
                if (t.size() >= 4 && t[3].text != "=") {
                    d.count = parse_count(t[3], lt.lineno);
                    d.alloc_index = add_alloc(d.name, ty, d.count, lt.lineno, t[1].col);
                    j = 4;
                } else {
                    d.value_id = new_value(d.name, ty, lt.lineno, t[1].col);
                    value_defined_[d.value_id] = true;
                }
                if (j < t.size()) {
                    if (t[j].text != "=")
                        fail(lt.lineno, t[j].col, "E_SYNTAX", "expected '=' before default");
                    ++j;
                    if (j >= t.size())
                        fail(lt.lineno, t.back().col, "E_SYNTAX", "missing default value");
                    if (t[j].text == "[") {
                        ++j;
                        while (j < t.size() && t[j].text != "]") {
                            d.defaults.push_back(parse_const(t[j++], ty, lt.lineno));
                            if (j < t.size() && t[j].text == ",") ++j;
                        }
                        if (j >= t.size() || t[j].text != "]")
                            fail(lt.lineno, t.back().col, "E_SYNTAX", "unterminated default list");
                        ++j;
                    } else {
                        d.defaults.push_back(parse_const(t[j++], ty, lt.lineno));
                    }
                    if (j != t.size())
                        fail(lt.lineno, t[j].col, "E_SYNTAX", "trailing tokens after default");
                    if (d.count == 0 && d.defaults.size() != 1)
                        fail(lt.lineno, t[1].col, "E_SYNTAX", "scalar input takes one default");
                    if (d.count > 0 && d.defaults.size() > d.count)
                        fail(lt.lineno, t[1].col, "E_SYNTAX", "more defaults than elements");
                }
                prog_.inputs.push_back(d);
            } else if (t.size() >= 5 && t[0].text[0] == '%' && t[1].text == "=" &&
                       t[2].text == "alloc") {
                ValueType ty;
                if (!parse_type_name(t[3].text, ty))
                    fail(lt.lineno, t[3].col, "E_TYPE", "unknown type '" + t[3].text + "'");
                if (t.size() < 6 || t[4].text != "x")
                    fail(lt.lineno, t[4].col, "E_SYNTAX", "expected 'x <count>' in alloc");
                add_alloc(t[0].text.substr(1), ty, parse_count(t[5], lt.lineno), lt.lineno,
                          t[0].col);
            }
        }
    }

    std::uint64_t parse_count(const Token& tok, std::uint32_t line) {
        errno = 0;
        char* end = nullptr;
        unsigned long long v = std::strtoull(tok.text.c_str(), &end, 10);
        if (errno || end == tok.text.c_str() || *end)
            fail(line, tok.col, "E_SYNTAX", "bad element count '" + tok.text + "'");
        return v;
    }

    std::int32_t new_value(const std::string& name, ValueType ty, std::uint32_t line,
                           std::uint32_t col) {
        auto it = value_ids_.find(name);
        if (it != value_ids_.end()) {
            if (value_defined_[it->second])
                fail(line, col, "E_DUP_DEF", "duplicate SSA definition of '%" + name + "'");
            prog_.value_types[it->second] = ty;
            return static_cast<std::int32_t>(it->second);
        }
        std::uint32_t id = prog_.num_values();
        value_ids_[name] = id;
        prog_.value_names.push_back(name);
        prog_.value_types.push_back(ty);
        value_defined_.push_back(false);
        return static_cast<std::int32_t>(id);
    }

    std::uint32_t ref_value(const std::string& name, std::uint32_t line, std::uint32_t col) {
        (void)line;
        (void)col;
        auto it = value_ids_.find(name);
        if (it != value_ids_.end()) return it->second;
        std::uint32_t id = prog_.num_values();
        value_ids_[name] = id;
        prog_.value_names.push_back(name);
        prog_.value_types.push_back(ValueType::I64); // refined when defined
        value_defined_.push_back(false);
        return id;
    }

    Value parse_const(const Token& tok, std::optional<ValueType> expect, std::uint32_t line) {
        const std::string& s = tok.text;
        if (s.rfind("bits:0x", 0) == 0) {
            errno = 0;
            char* end = nullptr;
            std::uint64_t raw = std::strtoull(s.c_str() + 7, &end, 16);
            if (errno || *end) fail(line, tok.col, "E_SYNTAX", "bad bit literal '" + s + "'");
            return Value::from_bits(expect.value_or(ValueType::F64), raw);
        }
        bool floaty = s.find('.') != std::string::npos || s.find("inf") != std::string::npos ||
                      s.find("nan") != std::string::npos ||
                      (s.find_first_of("eE") != std::string::npos && s.rfind("0x", 0) != 0);
        ValueType ty = expect.value_or(floaty ? ValueType::F64 : ValueType::I64);
        errno = 0;
        char* end = nullptr;
        if (ty == ValueType::F64) {
            double d = std::strtod(s.c_str(), &end);
            if (end == s.c_str() || *end) fail(line, tok.col, "E_SYNTAX", "bad literal '" + s + "'");
            return Value::f64(d);
        }
        long long v = std::strtoll(s.c_str(), &end, 0);
        if (errno || end == s.c_str() || *end)
            fail(line, tok.col, "E_SYNTAX", "bad literal '" + s + "'");
        switch (ty) {
        case ValueType::I1: return Value::i1(v != 0);
        case ValueType::I32: return Value::i32(static_cast<std::int32_t>(v));
        default: return Value::i64(v);
        }
    }

    Operand parse_operand(const Token& tok, std::optional<ValueType> expect, std::uint32_t line) {
        if (tok.text.empty()) fail(line, tok.col, "E_SYNTAX", "missing operand");
        if (tok.text[0] == '%') return Operand::reg(ref_value(tok.text.substr(1), line, tok.col));
        if (tok.text[0] == '@') {
            auto it = alloc_ids_.find(tok.text.substr(1));
            if (it == alloc_ids_.end())
                fail(line, tok.col, "E_UNKNOWN_OBJECT", "unknown object '" + tok.text + "'");
            return Operand::global(it->second);
        }
        return Operand::constant_of(parse_const(tok, expect, line));
    }

    std::uint32_t block_ref(const Token& tok, std::uint32_t line) {
        auto it = block_ids_.find(tok.text);
        if (it == block_ids_.end())
            fail(line, tok.col, "E_UNKNOWN_BLOCK", "unknown block '" + tok.text + "'");
        return it->second;
    }

    void expect_tok(const LineTokens& lt, size_t i, const char* what) {
        if (i >= lt.toks.size())
            fail(lt.lineno, lt.toks.empty() ? 1 : lt.toks.back().col, "E_SYNTAX",
                 std::string("expected ") + what);
    }

    void expect_punct(const LineTokens& lt, size_t i, const char* p) {
        expect_tok(lt, i, p);
        if (lt.toks[i].text != p)
            fail(lt.lineno, lt.toks[i].col, "E_SYNTAX",
                 std::string("expected '") + p + "', got '" + lt.toks[i].text + "'");
    }

    void parse_line(const LineTokens& lt) {
        const auto& t = lt.toks;
        if (is_block_label(lt)) {
            cur_block_ = static_cast<std::int32_t>(block_ids_[t[0].text]);
            return;
        }
        if (t[0].text == "alloc" && t.size() >= 2 && t[1].text[0] != '%') return; // header, done
        if (t[0].text == "input") return;                                          // header, done
        if (cur_block_ < 0)
            fail(lt.lineno, t[0].col, "E_SYNTAX", "instruction outside of a block");
        parse_inst(lt);
    }

    ValueType type_tok(const LineTokens& lt, size_t i) {
        expect_tok(lt, i, "type");
        ValueType ty;
        if (!parse_type_name(lt.toks[i].text, ty))
            fail(lt.lineno, lt.toks[i].col, "E_TYPE", "unknown type '" + lt.toks[i].text + "'");
        return ty;
    }

    void parse_inst(const LineTokens& lt) {
        const auto& t = lt.toks;
        Instruction in;
        in.line = lt.lineno;
        size_t i = 0;
        std::string result_name;
        if (t[0].text[0] == '%') {
            result_name = t[0].text.substr(1);
            expect_punct(lt, 1, "=");
            i = 2;
        }
        expect_tok(lt, i, "opcode");
        const std::string& opname = t[i].text;
        std::uint32_t opcol = t[i].col;
        ++i;

        auto tail = [&](size_t from) {
            // trailing !label "name"
            if (from < t.size() && t[from].text == "!label") {
                expect_tok(lt, from + 1, "label string");
                in.source_label = t[from + 1].text;
                from += 2;
            }
            if (from != t.size())
                fail(lt.lineno, t[from].col, "E_SYNTAX", "trailing tokens after instruction");
        };
        auto def_result = [&](ValueType ty) {
            if (result_name.empty())
                fail(lt.lineno, t[0].col, "E_SYNTAX", opname + " requires a result");
            in.result = new_value(result_name, ty, lt.lineno, t[0].col);
            value_defined_[in.result] = true;
        };
        auto no_result = [&] {
            if (!result_name.empty())
                fail(lt.lineno, t[0].col, "E_SYNTAX", opname + " does not produce a result");
        };

        static const std::map<std::string, Opcode> simple = {
            {"add", Opcode::Add},   {"sub", Opcode::Sub},   {"mul", Opcode::Mul},
            {"div", Opcode::Div},   {"rem", Opcode::Rem},   {"and", Opcode::And},
            {"or", Opcode::Or},     {"xor", Opcode::Xor},   {"shl", Opcode::Shl},
            {"lshr", Opcode::LShr}, {"fadd", Opcode::FAdd}, {"fsub", Opcode::FSub},
            {"fmul", Opcode::FMul}, {"fdiv", Opcode::FDiv},
        };

        if (auto it = simple.find(opname); it != simple.end()) {
            in.op = it->second;
            in.type = type_tok(lt, i++);
            expect_tok(lt, i, "operand");
            in.operands.push_back(parse_operand(t[i++], in.type, lt.lineno));
            expect_punct(lt, i++, ",");
            expect_tok(lt, i, "operand");
            // shift amounts share the shifted operand's type token
            in.operands.push_back(parse_operand(t[i++], in.type, lt.lineno));
            def_result(in.type);
            tail(i);
        } else if (opname == "icmp" || opname == "fcmp") {
            in.op = opname[0] == 'i' ? Opcode::ICmp : Opcode::FCmp;
            expect_tok(lt, i, "predicate");
            bool ok = false;
            if (in.op == Opcode::ICmp) {
                for (int p = 0; p <= static_cast<int>(ICmpPred::Uge); ++p)
                    if (t[i].text == icmp_pred_name(static_cast<ICmpPred>(p))) {
                        in.ipred = static_cast<ICmpPred>(p);
                        ok = true;
                    }
            } else {
                for (int p = 0; p <= static_cast<int>(FCmpPred::Une); ++p)
                    if (t[i].text == fcmp_pred_name(static_cast<FCmpPred>(p))) {
                        in.fpred = static_cast<FCmpPred>(p);
                        ok = true;
                    }
            }
            if (!ok) fail(lt.lineno, t[i].col, "E_SYNTAX", "unknown predicate '" + t[i].text + "'");
            ++i;
            in.type = type_tok(lt, i++);
            expect_tok(lt, i, "operand");
            in.operands.push_back(parse_operand(t[i++], in.type, lt.lineno));
            expect_punct(lt, i++, ",");
            expect_tok(lt, i, "operand");
            in.operands.push_back(parse_operand(t[i++], in.type, lt.lineno));
            def_result(ValueType::I1);
            tail(i);
        } else if (opname == "trunc" || opname == "zext" || opname == "sext") {
            in.op = opname == "trunc" ? Opcode::Trunc
                    : opname == "zext" ? Opcode::ZExt
                                       : Opcode::SExt;
            ValueType src = type_tok(lt, i++);
            expect_tok(lt, i, "operand");
            in.operands.push_back(parse_operand(t[i++], src, lt.lineno));
            expect_tok(lt, i, "'to'");
            if (t[i].text != "to") fail(lt.lineno, t[i].col, "E_SYNTAX", "expected 'to'");
            ++i;
            in.type = type_tok(lt, i++);
            def_result(in.type);
            tail(i);
        } else if (opname == "load") {
            in.op = Opcode::Load;
            in.type = type_tok(lt, i++);
            expect_tok(lt, i, "address");
            in.operands.push_back(parse_operand(t[i++], ValueType::I64, lt.lineno));
            def_result(in.type);
            tail(i);
        } else if (opname == "store") {
            in.op = Opcode::Store;
            no_result();
            in.type = type_tok(lt, i++);
            expect_tok(lt, i, "value");
            in.operands.push_back(parse_operand(t[i++], in.type, lt.lineno));
            expect_punct(lt, i++, ",");
            expect_tok(lt, i, "address");
            in.operands.push_back(parse_operand(t[i++], ValueType::I64, lt.lineno));
            tail(i);
        } else if (opname == "alloc") {
            in.op = Opcode::Alloc;
            in.type = type_tok(lt, i++);
            expect_tok(lt, i, "'x'");
            if (t[i].text != "x") fail(lt.lineno, t[i].col, "E_SYNTAX", "expected 'x'");
            ++i;
            expect_tok(lt, i, "count");
            ++i; // count registered during prescan
            in.alloc_index = alloc_ids_.at(result_name);
            def_result(ValueType::I64);
            tail(i);
        } else if (opname == "gep") {
            in.op = Opcode::Gep;
            in.type = type_tok(lt, i++); // element type scales the index
            expect_tok(lt, i, "base");
            in.operands.push_back(parse_operand(t[i++], ValueType::I64, lt.lineno));
            expect_punct(lt, i++, ",");
            expect_tok(lt, i, "index");
            in.operands.push_back(parse_operand(t[i++], ValueType::I64, lt.lineno));
            def_result(ValueType::I64);
            tail(i);
        } else if (opname == "phi") {
            in.op = Opcode::Phi;
            in.type = type_tok(lt, i++);
            while (i < t.size() && t[i].text == "[") {
                ++i;
                expect_tok(lt, i, "value");
                in.operands.push_back(parse_operand(t[i++], in.type, lt.lineno));
                expect_punct(lt, i++, ",");
                expect_tok(lt, i, "block");
                in.phi_blocks.push_back(block_ref(t[i++], lt.lineno));
                expect_punct(lt, i++, "]");
                if (i < t.size() && t[i].text == ",") ++i;
            }
            if (in.operands.empty())
                fail(lt.lineno, t.back().col, "E_SYNTAX", "phi needs incoming values");
            def_result(in.type);
            tail(i);
        } else if (opname == "br") {
            in.op = Opcode::Br;
            no_result();
            expect_tok(lt, i, "target");
            in.labels.push_back(block_ref(t[i++], lt.lineno));
            tail(i);
        } else if (opname == "condbr") {
            in.op = Opcode::CondBr;
            no_result();
            expect_tok(lt, i, "condition");
            in.operands.push_back(parse_operand(t[i++], ValueType::I1, lt.lineno));
            expect_punct(lt, i++, ",");
            expect_tok(lt, i, "target");
            in.labels.push_back(block_ref(t[i++], lt.lineno));
            expect_punct(lt, i++, ",");
            expect_tok(lt, i, "target");
            in.labels.push_back(block_ref(t[i++], lt.lineno));
            tail(i);
        } else if (opname == "call") {
            in.op = Opcode::Call;
            expect_tok(lt, i, "return type");
            bool is_void = t[i].text == "void";
            if (!is_void) in.type = type_tok(lt, i);
            ++i;
            expect_tok(lt, i, "intrinsic");
            if (t[i].text == "sqrt") in.intrinsic = Intrinsic::Sqrt;
            else if (t[i].text == "fabs") in.intrinsic = Intrinsic::Fabs;
            else if (t[i].text == "print") in.intrinsic = Intrinsic::Print;
            else fail(lt.lineno, t[i].col, "E_UNKNOWN_OPCODE", "unknown intrinsic '" + t[i].text + "'");
            ++i;
            expect_punct(lt, i++, "(");
            while (i < t.size() && t[i].text != ")") {
                in.operands.push_back(parse_operand(t[i++], std::nullopt, lt.lineno));
                if (i < t.size() && t[i].text == ",") ++i;
            }
            expect_punct(lt, i++, ")");
            if (is_void) no_result();
            else def_result(in.type);
            tail(i);
        } else if (opname == "ret") {
            in.op = Opcode::Ret;
            no_result();
            while (i < t.size() && t[i].text != "!label") {
                in.operands.push_back(parse_operand(t[i++], std::nullopt, lt.lineno));
                if (i < t.size() && t[i].text == ",") ++i;
            }
            tail(i);
        } else {
            fail(lt.lineno, opcol, "E_UNKNOWN_OPCODE", "unknown opcode '" + opname + "'");
        }

        prog_.blocks[cur_block_].insts.push_back(std::move(in));
    }

    void number_statics() {
        std::uint32_t id = 0;
        for (auto& b : prog_.blocks)
            for (auto& in : b.insts) in.static_id = id++;
    }
};

} // namespace

Program parse_program(const std::string& text) { return Parser(text).run(); }

} // namespace arat
