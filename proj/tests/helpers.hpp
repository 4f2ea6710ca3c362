#pragma once

#include "arat/interp.hpp"
#include "arat/parser.hpp"

#include <cstdio>
#include <stdexcept>
#include <string>

namespace testutil {

using namespace arat;

inline Program parse_checked(const std::string& text) {
    Program p = parse_program(text);
    auto diags = validate(p);
    if (!diags.empty())
        throw std::runtime_error("validation failed: " + diags[0].code + ": " + diags[0].message);
    return p;
}

inline RunResult run_traced(const Program& p) {
    RunOptions ro;
    ro.record_trace = true;
    RunResult r = run(p, default_bindings(p), ro);
    resolve_object_refs(r.trace, p);
    return r;
}

// exact literal for embedding a value in IR text; bits form for floats so
// NaNs and denormals survive
inline std::string lit(const Value& v) {
    if (v.type == ValueType::F64) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "bits:0x%016llx",
                      static_cast<unsigned long long>(v.bits));
        return buf;
    }
    return v.to_text();
}

// ground-truth evaluation of one instruction line defining %r: wrap it in a
// minimal program and run the interpreter
inline Outcome eval_line(const std::string& line) {
    std::string text = "alloc pad i64 1\n\nentry:\n  " + line + "\n  ret %r\n";
    Program p = parse_program(text);
    auto diags = validate(p);
    if (!diags.empty())
        throw std::runtime_error("oracle program invalid: " + diags[0].message + " in: " + line);
    return run(p, {}).outcome;
}

inline const TraceRecord* find_rec(const Trace& t, Opcode op, std::size_t nth = 0) {
    for (const TraceRecord& r : t.records) {
        if (r.op != op) continue;
        if (nth == 0) return &r;
        --nth;
    }
    return nullptr;
}

// xorshift64, fixed seed per test for reproducibility
struct Rng {
    std::uint64_t s;
    explicit Rng(std::uint64_t seed) : s(seed ? seed : 0x9e3779b97f4a7c15ull) {}
    std::uint64_t next() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return s;
    }
    std::uint64_t below(std::uint64_t n) { return next() % n; }
};

} // namespace testutil
