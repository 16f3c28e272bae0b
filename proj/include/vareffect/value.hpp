#pragma once

#include <charconv>
#include <cstdint>
#include <optional>
#include <string>

namespace vareffect {

// Numeric literal as it appears in preprocessor conditions and feature
// ranges. Integers stay exact; anything with a decimal point or exponent
// becomes a double.
struct Value {
    bool isFloat = false;
    long long i = 0;
    double d = 0.0;

    static Value ofInt(long long v) { return Value{false, v, 0.0}; }
    static Value ofFloat(double v) { return Value{true, 0, v}; }

    double asDouble() const { return isFloat ? d : static_cast<double>(i); }

    // Shortest round-trip text; this spelling is also used in pseudo-variable
    // names, so it must be stable.
    std::string str() const {
        char buf[64];
        std::to_chars_result r = isFloat
            ? std::to_chars(buf, buf + sizeof buf, d)
            : std::to_chars(buf, buf + sizeof buf, i);
        return std::string(buf, r.ptr);
    }

    bool sameNumber(const Value& o) const {
        if (isFloat || o.isFloat) return asDouble() == o.asDouble();
        return i == o.i;
    }

    bool lessThan(const Value& o) const {
        if (isFloat || o.isFloat) return asDouble() < o.asDouble();
        return i < o.i;
    }
};

// Parses a decimal/hex/octal integer or a floating literal. Accepts C
// suffixes (u, l) on integers and rejects trailing garbage.
std::optional<Value> parseValue(const std::string& text);

}  // namespace vareffect
