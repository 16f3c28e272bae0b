#pragma once

#include <stdexcept>
#include <string>

namespace vareffect {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct MissingVariableError : Error {
    std::string variable;
    explicit MissingVariableError(const std::string& var)
        : Error("unassigned variable: " + var), variable(var) {}
};

struct FormulaParseError : Error {
    std::size_t position;
    FormulaParseError(const std::string& msg, std::size_t pos)
        : Error(msg + " at offset " + std::to_string(pos)), position(pos) {}
};

struct ConditionParseError : Error {
    std::size_t position;
    ConditionParseError(const std::string& msg, std::size_t pos)
        : Error(msg + " at offset " + std::to_string(pos)), position(pos) {}
};

struct UnbalancedDirectivesError : Error {
    std::string file;
    int line;
    UnbalancedDirectivesError(const std::string& f, int l, const std::string& msg)
        : Error(f + ":" + std::to_string(l) + ": " + msg), file(f), line(l) {}
};

struct ModelError : Error {
    std::string code;   // DuplicateFeature, MalformedRange, ...
    int line;
    ModelError(const std::string& c, int l, const std::string& msg)
        : Error(c + " (line " + std::to_string(l) + "): " + msg), code(c), line(l) {}
};

struct UnknownFeatureError : Error {
    std::string feature;
    explicit UnknownFeatureError(const std::string& name)
        : Error("unknown feature: " + name), feature(name) {}
};

struct UnusedFeatureError : Error {
    std::string feature;
    explicit UnusedFeatureError(const std::string& name)
        : Error("feature has no observed pseudo-variables: " + name), feature(name) {}
};

struct UnknownProductError : Error {
    std::string product;
    explicit UnknownProductError(const std::string& id)
        : Error("unknown product id: " + id), product(id) {}
};

struct SchemaError : Error {
    explicit SchemaError(const std::string& msg) : Error(msg) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

}  // namespace vareffect
