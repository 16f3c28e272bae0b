#include "vareffect/value.hpp"

#include <cctype>
#include <cstdlib>
#include <cstring>

namespace vareffect {

std::optional<Value> parseValue(const std::string& text) {
    if (text.empty()) return std::nullopt;
    const char* begin = text.c_str();

    bool hex = false;
    {
        const char* p = begin;
        if (*p == '+' || *p == '-') p++;
        hex = p[0] == '0' && (p[1] == 'x' || p[1] == 'X');
    }
    bool isFloat = false;
    for (const char* p = begin; *p; p++) {
        if (*p == '.') isFloat = true;
        if (!hex && (*p == 'e' || *p == 'E')) isFloat = true;
    }

    errno = 0;
    char* end = nullptr;
    if (isFloat) {
        double d = std::strtod(begin, &end);
        if (end == begin || errno == ERANGE) return std::nullopt;
        if (*end == 'f' || *end == 'F' || *end == 'l' || *end == 'L') end++;
        if (*end) return std::nullopt;
        return Value::ofFloat(d);
    }
    long long v = std::strtoll(begin, &end, 0);
    if (end == begin || errno == ERANGE) return std::nullopt;
    for (int i = 0; i < 3 && (*end == 'u' || *end == 'U' || *end == 'l' || *end == 'L'); i++)
        end++;
    if (*end) return std::nullopt;
    return Value::ofInt(v);
}

}  // namespace vareffect
