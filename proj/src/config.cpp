#include "arat/config.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace arat {

namespace {

[[noreturn]] void bad(int lineno, const std::string& msg) {
    throw std::runtime_error("config line " + std::to_string(lineno) + ": " + msg);
}

double parse_double(const std::string& s, int lineno) {
    try {
        if (s == "inf" || s == "+inf") return INFINITY;
        if (s == "-inf") return -INFINITY;
        return std::stod(s);
    } catch (const std::exception&) {
        bad(lineno, "bad number '" + s + "'");
    }
}

std::uint64_t parse_u64(const std::string& s, int lineno) {
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        bad(lineno, "bad integer '" + s + "'");
    }
}

bool parse_flag(const std::string& s, int lineno) {
    if (s == "1" || s == "true" || s == "on") return true;
    if (s == "0" || s == "false" || s == "off") return false;
    bad(lineno, "bad flag '" + s + "'");
}

} // namespace

void apply_config_line(AnalysisConfig& cfg, const std::string& line, int lineno) {
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) return;
    if (key[0] == '#') return;
    std::vector<std::string> args;
    std::string tok;
    while (ls >> tok) args.push_back(tok);

    auto need = [&](std::size_t n) {
        if (args.size() != n) bad(lineno, "key '" + key + "' takes " + std::to_string(n) + " values");
    };

    if (key == "k") {
        need(1);
        std::uint64_t k = parse_u64(args[0], lineno);
        if (k < 1 || k > 50) bad(lineno, "k must be in 1..50");
        cfg.k = static_cast<std::uint32_t>(k);
    } else if (key == "pattern") {
        need(1);
        try {
            cfg.pattern = FaultPattern::parse(args[0]);
        } catch (const std::invalid_argument& e) {
            bad(lineno, e.what());
        }
    } else if (key == "accept") {
        need(1);
        try {
            cfg.accept = AcceptanceSpec::parse(args[0]);
        } catch (const std::invalid_argument& e) {
            bad(lineno, e.what());
        }
    } else if (key == "deduce") {
        need(1);
        cfg.deduce = parse_flag(args[0], lineno);
    } else if (key == "verify_deduction") {
        need(1);
        cfg.verify_deduction = parse_flag(args[0], lineno);
    } else if (key == "jobs") {
        need(1);
        std::uint64_t j = parse_u64(args[0], lineno);
        if (j < 1 || j > 256) bad(lineno, "jobs must be in 1..256");
        cfg.jobs = static_cast<std::uint32_t>(j);
    } else if (key == "seed") {
        need(1);
        cfg.seed = parse_u64(args[0], lineno);
    } else if (key == "step_limit") {
        need(1);
        cfg.step_limit = parse_u64(args[0], lineno);
        if (cfg.step_limit == 0) bad(lineno, "step_limit must be positive");
    } else if (key == "shadow") {
        if (args.size() < 2) bad(lineno, "shadow needs an object and a threshold form");
        ShadowingThreshold thr;
        if (args[1] == "abs") {
            if (args.size() != 4) bad(lineno, "shadow abs takes lo and hi");
            thr.kind = ShadowingThreshold::Kind::AbsoluteRange;
            thr.lo = parse_double(args[2], lineno);
            thr.hi = parse_double(args[3], lineno);
            if (!(thr.lo <= thr.hi)) bad(lineno, "shadow abs range is empty");
        } else if (args[1] == "rel") {
            if (args.size() != 3) bad(lineno, "shadow rel takes epsilon");
            thr.kind = ShadowingThreshold::Kind::RelativeResultError;
            thr.eps = parse_double(args[2], lineno);
            if (thr.eps < 0) bad(lineno, "shadow rel epsilon must be nonnegative");
        } else {
            bad(lineno, "shadow form must be abs or rel");
        }
        cfg.shadows[args[0]] = thr;
    } else if (key == "tolerate") {
        need(2);
        cfg.state_tolerance = {args[0], parse_double(args[1], lineno)};
    } else {
        bad(lineno, "unknown key '" + key + "'");
    }
}

AnalysisConfig parse_config(const std::string& text) {
    AnalysisConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        bool blank = true;
        for (char c : line) blank = blank && std::isspace(static_cast<unsigned char>(c));
        if (blank) continue;
        apply_config_line(cfg, line, lineno);
    }
    return cfg;
}

std::vector<std::string> config_echo(const AnalysisConfig& cfg, const std::string& object) {
    std::vector<std::string> out;
    std::ostringstream os;
    out.push_back("k " + std::to_string(cfg.k));
    out.push_back("pattern " + cfg.pattern.to_string());
    out.push_back("accept " + cfg.accept.to_string());
    out.push_back(std::string("deduce ") + (cfg.deduce ? "1" : "0"));
    if (cfg.verify_deduction) out.push_back("verify_deduction 1");
    if (auto it = cfg.shadows.find(object); it != cfg.shadows.end()) {
        os.str("");
        if (it->second.kind == ShadowingThreshold::Kind::AbsoluteRange)
            os << "shadow " << object << " abs " << it->second.lo << ' ' << it->second.hi;
        else
            os << "shadow " << object << " rel " << it->second.eps;
        out.push_back(os.str());
    }
    if (cfg.state_tolerance) {
        os.str("");
        os << "tolerate " << cfg.state_tolerance->first << ' ' << cfg.state_tolerance->second;
        out.push_back(os.str());
    }
    return out;
}

Bindings parse_inputs(const std::string& text, const Program& p) {
    Bindings b;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string name;
        if (!(ls >> name)) continue;
        if (name[0] == '#') continue;
        const InputDecl* decl = nullptr;
        for (const auto& d : p.inputs)
            if (d.name == name) decl = &d;
        if (!decl) bad(lineno, "unknown input '" + name + "'");
        std::vector<Value> vals;
        std::string tok;
        while (ls >> tok) {
            if (tok[0] == '#') break;
            Value v;
            if (tok.rfind("bits:0x", 0) == 0) {
                v = Value::from_bits(decl->type, std::strtoull(tok.c_str() + 7, nullptr, 16));
            } else if (decl->type == ValueType::F64) {
                v = Value::f64(parse_double(tok, lineno));
            } else {
                try {
                    v = Value::from_bits(decl->type,
                                         static_cast<std::uint64_t>(std::stoll(tok, nullptr, 0)));
                } catch (const std::exception&) {
                    bad(lineno, "bad integer '" + tok + "'");
                }
            }
            vals.push_back(v);
        }
        if (decl->count == 0 && vals.size() != 1)
            bad(lineno, "scalar input '" + name + "' takes one value");
        if (decl->count > 0 && vals.size() > decl->count)
            bad(lineno, "too many values for input '" + name + "'");
        if (b.count(name)) bad(lineno, "duplicate binding for '" + name + "'");
        b[name] = std::move(vals);
    }
    return b;
}

} // namespace arat
