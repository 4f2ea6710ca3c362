#include "arat/trace.hpp"

#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace arat {

ObjectRef DataObjectMap::locate(std::uint64_t address) const {
    for (std::size_t i = 0; i < objects.size(); ++i) {
        const DataObject& o = objects[i];
        std::uint64_t size = o.count * element_size(o.elem_type);
        if (address >= o.base && address < o.base + size) {
            return {static_cast<std::int32_t>(i),
                    static_cast<std::int64_t>((address - o.base) / element_size(o.elem_type))};
        }
    }
    return {};
}

std::int32_t DataObjectMap::find(const std::string& name) const {
    for (std::size_t i = 0; i < objects.size(); ++i)
        if (objects[i].name == name) return static_cast<std::int32_t>(i);
    return -1;
}

DataObjectMap DataObjectMap::from_program(const Program& p) {
    DataObjectMap m;
    for (const auto& a : p.allocations) m.objects.push_back({a.name, a.base, a.elem_type, a.count});
    return m;
}

namespace {

const char* kTextMagic = "ARAT-TRACE v1";
const char* kBinMagic = "ARAT-TRACE-BIN v1";
const char* kMapMagic = "ARAT-MAP v1";

char type_char(ValueType t) {
    switch (t) {
    case ValueType::I1: return 'b';
    case ValueType::I32: return 'w';
    case ValueType::I64: return 'q';
    case ValueType::F64: return 'd';
    }
    return '?';
}

ValueType char_type(char c) {
    switch (c) {
    case 'b': return ValueType::I1;
    case 'w': return ValueType::I32;
    case 'q': return ValueType::I64;
    case 'd': return ValueType::F64;
    }
    throw std::runtime_error("trace: bad type tag");
}

std::string hex16(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::uint64_t parse_hex(const std::string& s) {
    return std::strtoull(s.c_str(), nullptr, 16);
}

[[noreturn]] void bad(const char* what) {
    throw std::runtime_error(std::string("trace: malformed ") + what);
}

void put_u(std::ostream& out, const void* p, std::size_t n) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

template <class T> void put(std::ostream& out, T v) { put_u(out, &v, sizeof v); }

template <class T> T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) bad("binary payload");
    return v;
}

std::string get_str(std::istream& in) {
    auto n = get<std::uint16_t>(in);
    std::string s(n, '\0');
    in.read(s.data(), n);
    if (!in) bad("binary string");
    return s;
}

void put_str(std::ostream& out, const std::string& s) {
    put<std::uint16_t>(out, static_cast<std::uint16_t>(s.size()));
    put_u(out, s.data(), s.size());
}

Opcode opcode_from_name(const std::string& s) {
    for (int i = 0; i <= static_cast<int>(Opcode::Ret); ++i)
        if (s == opcode_name(static_cast<Opcode>(i))) return static_cast<Opcode>(i);
    bad("opcode");
}

} // namespace

std::uint64_t write_trace(const Trace& t, std::ostream& out, bool binary) {
    std::ostringstream os;
    if (binary) {
        os << kBinMagic << ' ' << hex16(t.program_hash) << '\n';
        put<std::uint32_t>(os, static_cast<std::uint32_t>(t.objects.objects.size()));
        for (const auto& o : t.objects.objects) {
            put_str(os, o.name);
            put<std::uint64_t>(os, o.base);
            put<std::uint8_t>(os, static_cast<std::uint8_t>(o.elem_type));
            put<std::uint64_t>(os, o.count);
        }
        put<std::uint64_t>(os, t.records.size());
        for (const auto& r : t.records) {
            put<std::uint64_t>(os, r.dyn_id);
            put<std::uint32_t>(os, r.static_id);
            put<std::uint8_t>(os, static_cast<std::uint8_t>(r.op));
            put<std::uint8_t>(os, static_cast<std::uint8_t>(r.type));
            put<std::int32_t>(os, r.pred_block);
            put_str(os, r.source_label);
            put<std::uint8_t>(os, static_cast<std::uint8_t>(r.operands.size()));
            for (const auto& o : r.operands) {
                put<std::uint8_t>(os, static_cast<std::uint8_t>(o.value.type));
                put<std::uint64_t>(os, o.value.bits);
                put<std::uint8_t>(os, o.has_address ? 1 : 0);
                if (o.has_address) put<std::uint64_t>(os, o.address);
            }
            put<std::uint8_t>(os, r.has_result ? 1 : 0);
            if (r.has_result) {
                put<std::uint8_t>(os, static_cast<std::uint8_t>(r.result.type));
                put<std::uint64_t>(os, r.result.bits);
            }
            put<std::uint8_t>(os, r.result_has_address ? 1 : 0);
            if (r.result_has_address) put<std::uint64_t>(os, r.result_address);
        }
    } else {
        os << kTextMagic << ' ' << hex16(t.program_hash) << '\n';
        os << "objects " << t.objects.objects.size() << '\n';
        for (const auto& o : t.objects.objects)
            os << "o " << o.name << ' ' << o.base << ' ' << type_name(o.elem_type) << ' '
               << o.count << '\n';
        os << "records " << t.records.size() << '\n';
        for (const auto& r : t.records) {
            os << "r " << r.dyn_id << ' ' << r.static_id << ' ' << opcode_name(r.op) << ' '
               << type_char(r.type) << ' ' << r.pred_block << ' ';
            if (r.source_label.empty()) os << '-';
            else os << '"' << r.source_label << '"';
            os << ' ' << r.operands.size();
            for (const auto& o : r.operands) {
                os << ' ' << type_char(o.value.type) << ' ' << hex16(o.value.bits) << ' '
                   << (o.has_address ? 1 : 0);
                if (o.has_address) os << ' ' << o.address;
            }
            os << ' ' << (r.has_result ? 1 : 0);
            if (r.has_result)
                os << ' ' << type_char(r.result.type) << ' ' << hex16(r.result.bits);
            os << ' ' << (r.result_has_address ? 1 : 0);
            if (r.result_has_address) os << ' ' << r.result_address;
            os << '\n';
        }
    }
    std::string s = os.str();
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
    return s.size();
}

Trace read_trace(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) bad("header");
    Trace t;
    std::istringstream hs(header);
    std::string magic1, magic2, hash;
    hs >> magic1 >> magic2 >> hash;
    std::string magic = magic1 + " " + magic2;
    if (hash.size() != 16) bad("header hash");
    t.program_hash = parse_hex(hash);

    if (magic == kBinMagic) {
        auto nobj = get<std::uint32_t>(in);
        for (std::uint32_t i = 0; i < nobj; ++i) {
            DataObject o;
            o.name = get_str(in);
            o.base = get<std::uint64_t>(in);
            o.elem_type = static_cast<ValueType>(get<std::uint8_t>(in));
            o.count = get<std::uint64_t>(in);
            t.objects.objects.push_back(std::move(o));
        }
        auto nrec = get<std::uint64_t>(in);
        t.records.reserve(nrec);
        for (std::uint64_t i = 0; i < nrec; ++i) {
            TraceRecord r;
            r.dyn_id = get<std::uint64_t>(in);
            r.static_id = get<std::uint32_t>(in);
            r.op = static_cast<Opcode>(get<std::uint8_t>(in));
            r.type = static_cast<ValueType>(get<std::uint8_t>(in));
            r.pred_block = get<std::int32_t>(in);
            r.source_label = get_str(in);
            auto nops = get<std::uint8_t>(in);
            for (unsigned k = 0; k < nops; ++k) {
                OperandRecord o;
                auto ty = static_cast<ValueType>(get<std::uint8_t>(in));
                o.value = Value::from_bits(ty, get<std::uint64_t>(in));
                o.has_address = get<std::uint8_t>(in) != 0;
                if (o.has_address) o.address = get<std::uint64_t>(in);
                r.operands.push_back(o);
            }
            r.has_result = get<std::uint8_t>(in) != 0;
            if (r.has_result) {
                auto ty = static_cast<ValueType>(get<std::uint8_t>(in));
                r.result = Value::from_bits(ty, get<std::uint64_t>(in));
            }
            r.result_has_address = get<std::uint8_t>(in) != 0;
            if (r.result_has_address) r.result_address = get<std::uint64_t>(in);
            t.records.push_back(std::move(r));
        }
        return t;
    }
    if (magic != kTextMagic) bad("magic");

    std::string tok;
    std::uint64_t n = 0;
    if (!(in >> tok >> n) || tok != "objects") bad("object count");
    for (std::uint64_t i = 0; i < n; ++i) {
        DataObject o;
        std::string ty;
        if (!(in >> tok >> o.name >> o.base >> ty >> o.count) || tok != "o") bad("object line");
        if (!parse_type_name(ty, o.elem_type)) bad("object type");
        t.objects.objects.push_back(std::move(o));
    }
    if (!(in >> tok >> n) || tok != "records") bad("record count");
    t.records.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        TraceRecord r;
        std::string op, ty, label, bits;
        std::size_t nops = 0;
        int flag = 0;
        if (!(in >> tok >> r.dyn_id >> r.static_id >> op >> ty >> r.pred_block >> label >> nops) ||
            tok != "r")
            bad("record line");
        r.op = opcode_from_name(op);
        if (ty.size() != 1) bad("record type");
        r.type = char_type(ty[0]);
        if (label != "-") {
            if (label.size() < 2 || label.front() != '"' || label.back() != '"') bad("label");
            r.source_label = label.substr(1, label.size() - 2);
        }
        for (std::size_t k = 0; k < nops; ++k) {
            OperandRecord o;
            if (!(in >> ty >> bits >> flag) || ty.size() != 1) bad("operand");
            o.value = Value::from_bits(char_type(ty[0]), parse_hex(bits));
            o.has_address = flag != 0;
            if (o.has_address && !(in >> o.address)) bad("operand address");
            r.operands.push_back(o);
        }
        if (!(in >> flag)) bad("result flag");
        r.has_result = flag != 0;
        if (r.has_result) {
            if (!(in >> ty >> bits) || ty.size() != 1) bad("result");
            r.result = Value::from_bits(char_type(ty[0]), parse_hex(bits));
        }
        if (!(in >> flag)) bad("result address flag");
        r.result_has_address = flag != 0;
        if (r.result_has_address && !(in >> r.result_address)) bad("result address");
        t.records.push_back(std::move(r));
    }
    return t;
}

void write_object_map(const DataObjectMap& m, std::ostream& out) {
    out << kMapMagic << '\n';
    for (const auto& o : m.objects)
        out << o.name << ' ' << o.base << ' ' << type_name(o.elem_type) << ' ' << o.count << '\n';
}

DataObjectMap read_object_map(std::istream& in) {
    std::string header;
    if (!std::getline(in, header) || header != kMapMagic) bad("map header");
    DataObjectMap m;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        DataObject o;
        std::string ty;
        if (!(ls >> o.name >> o.base >> ty >> o.count) || !parse_type_name(ty, o.elem_type))
            bad("map line");
        m.objects.push_back(std::move(o));
    }
    return m;
}

void resolve_object_refs(Trace& t, const Program& p) {
    // dynamic provenance: which object element each SSA register currently
    // holds; only load results carry one, everything else clears it
    std::vector<ObjectRef> prov(p.num_values());
    std::vector<const Instruction*> by_static;
    for (const auto& b : p.blocks)
        for (const auto& in : b.insts) {
            if (in.static_id >= by_static.size()) by_static.resize(in.static_id + 1, nullptr);
            by_static[in.static_id] = &in;
        }

    for (auto& r : t.records) {
        const Instruction* in = r.static_id < by_static.size() ? by_static[r.static_id] : nullptr;
        if (!in) bad("static id");
        for (std::size_t i = 0; i < r.operands.size(); ++i) {
            OperandRecord& o = r.operands[i];
            if (o.has_address) {
                o.ref = t.objects.locate(o.address);
            } else if (r.op != Opcode::Phi && i < in->operands.size() &&
                       in->operands[i].kind == Operand::Kind::Reg) {
                o.ref = prov[in->operands[i].index];
            } else {
                o.ref = {};
            }
        }
        r.result_ref = {};
        if (r.result_has_address) r.result_ref = t.objects.locate(r.result_address);
        if (in->result >= 0) {
            if (r.op == Opcode::Load && !r.operands.empty() && r.operands[0].has_address) {
                prov[in->result] = t.objects.locate(r.operands[0].address);
                r.result_ref = prov[in->result];
            } else {
                prov[in->result] = {};
            }
        }
    }
}

} // namespace arat
