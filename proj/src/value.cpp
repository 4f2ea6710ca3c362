#include "arat/value.hpp"

#include <bit>
#include <cinttypes>
#include <cstdio>

namespace arat {

const char* type_name(ValueType t) {
    switch (t) {
    case ValueType::I1: return "i1";
    case ValueType::I32: return "i32";
    case ValueType::I64: return "i64";
    case ValueType::F64: return "f64";
    }
    return "?";
}

bool parse_type_name(const std::string& s, ValueType& out) {
    if (s == "i1") out = ValueType::I1;
    else if (s == "i32") out = ValueType::I32;
    else if (s == "i64") out = ValueType::I64;
    else if (s == "f64") out = ValueType::F64;
    else return false;
    return true;
}

unsigned bit_width(ValueType t) {
    switch (t) {
    case ValueType::I1: return 1;
    case ValueType::I32: return 32;
    case ValueType::I64: return 64;
    case ValueType::F64: return 64;
    }
    return 0;
}

unsigned element_size(ValueType t) {
    switch (t) {
    case ValueType::I1: return 1;
    case ValueType::I32: return 4;
    case ValueType::I64: return 8;
    case ValueType::F64: return 8;
    }
    return 0;
}

std::uint64_t type_mask(ValueType t) {
    unsigned w = bit_width(t);
    return w == 64 ? ~0ull : ((1ull << w) - 1);
}

Value Value::i1(bool b) { return {ValueType::I1, b ? 1ull : 0ull}; }
Value Value::i32(std::int32_t v) { return {ValueType::I32, static_cast<std::uint32_t>(v)}; }
Value Value::i64(std::int64_t v) { return {ValueType::I64, static_cast<std::uint64_t>(v)}; }
Value Value::f64(double v) { return {ValueType::F64, std::bit_cast<std::uint64_t>(v)}; }

Value Value::from_bits(ValueType t, std::uint64_t raw) { return {t, raw & type_mask(t)}; }

std::int64_t Value::as_i64() const {
    if (type == ValueType::I32) return as_i32();
    if (type == ValueType::I1) return as_bool() ? 1 : 0;
    return static_cast<std::int64_t>(bits);
}

double Value::as_f64() const { return std::bit_cast<double>(bits); }

double Value::numeric() const {
    return type == ValueType::F64 ? as_f64() : static_cast<double>(as_i64());
}

std::string Value::to_text() const {
    char buf[40];
    switch (type) {
    case ValueType::I1:
        return as_bool() ? "1" : "0";
    case ValueType::I32:
        std::snprintf(buf, sizeof(buf), "%" PRId32, as_i32());
        return buf;
    case ValueType::I64:
        std::snprintf(buf, sizeof(buf), "%" PRId64, as_i64());
        return buf;
    case ValueType::F64:
        // %.17g round-trips every double exactly
        std::snprintf(buf, sizeof(buf), "%.17g", as_f64());
        return buf;
    }
    return "?";
}

} // namespace arat
