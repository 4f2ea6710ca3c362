#pragma once

#include <cstdint>
#include <string>

namespace arat {

enum class ValueType : std::uint8_t { I1, I32, I64, F64 };

const char* type_name(ValueType t);
bool parse_type_name(const std::string& s, ValueType& out);
unsigned bit_width(ValueType t);
unsigned element_size(ValueType t); // bytes occupied in object memory

// A typed raw bit pattern. Integers are two's complement in the low
// `bit_width` bits, float64 is the IEEE-754 binary64 pattern. Equality
// is bit equality; NaNs with different payloads are different values.
struct Value {
    ValueType type = ValueType::I64;
    std::uint64_t bits = 0;

    static Value i1(bool b);
    static Value i32(std::int32_t v);
    static Value i64(std::int64_t v);
    static Value f64(double v);
    static Value from_bits(ValueType t, std::uint64_t raw);

    bool as_bool() const { return (bits & 1) != 0; }
    std::int32_t as_i32() const { return static_cast<std::int32_t>(bits & 0xffffffffull); }
    std::int64_t as_i64() const;
    double as_f64() const;

    // signed numeric view used by shadowing bounds
    double numeric() const;

    bool operator==(const Value& o) const { return type == o.type && bits == o.bits; }
    bool operator!=(const Value& o) const { return !(*this == o); }

    std::string to_text() const; // parseable literal form
};

std::uint64_t type_mask(ValueType t);

} // namespace arat
