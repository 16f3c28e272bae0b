#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vareffect/error.hpp"
#include "vareffect/value.hpp"

namespace vareffect {

enum class CondKind {
    IntLit,
    FloatLit,
    BoolLit,
    Ident,
    Defined,
    Opaque,  // stand-in for an unparsable condition or sub-expression
    Not,     // logical !
    Neg,     // arithmetic unary -
    Binary,
};

enum class BinOp {
    Add, Sub, Mul, Div, Mod, Shl, Shr, BitAnd, BitXor, BitOr,
    Eq, Ne, Lt, Le, Gt, Ge,
    And, Or,
};

bool isRelational(BinOp op);
bool isLogical(BinOp op);
const char* binOpText(BinOp op);

// Immutable expression tree for preprocessor conditions. Relational and
// logical nodes are Boolean-valued, everything else numeric; the factories
// enforce that operands are of the expected kind.
class ConditionExpr {
public:
    ConditionExpr();  // BoolLit(true)

    static ConditionExpr intLit(long long v);
    static ConditionExpr floatLit(double v);
    static ConditionExpr literal(const Value& v);
    static ConditionExpr boolLit(bool v);
    static ConditionExpr ident(std::string name);
    static ConditionExpr defined(std::string name);
    static ConditionExpr opaque(std::string name, bool booleanValued);
    static ConditionExpr notOp(ConditionExpr operand);
    static ConditionExpr negOp(ConditionExpr operand);
    static ConditionExpr binary(BinOp op, ConditionExpr lhs, ConditionExpr rhs);

    CondKind kind() const;
    BinOp op() const;                  // Binary
    const std::string& name() const;   // Ident/Defined/Opaque
    const Value& value() const;        // IntLit/FloatLit
    bool boolValue() const;            // BoolLit
    const ConditionExpr& operand() const;  // Not/Neg
    const ConditionExpr& lhs() const;
    const ConditionExpr& rhs() const;

    bool isBooleanValued() const;
    bool isLiteral() const { return kind() == CondKind::IntLit || kind() == CondKind::FloatLit; }

    // C-style text with minimal parentheses.
    const std::string& text() const;
    std::size_t nodeCount() const;

    bool operator==(const ConditionExpr& o) const { return text() == o.text(); }
    bool operator!=(const ConditionExpr& o) const { return !(*this == o); }

private:
    struct Node;
    explicit ConditionExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    static ConditionExpr make(Node n);
    std::shared_ptr<const Node> node_;
};

// Wraps a numeric-valued expression as `expr != 0`; Boolean-valued
// expressions pass through. This is the preprocessor's truth coercion.
ConditionExpr toBoolean(ConditionExpr e);

// Parses one #if/#elif condition with C operator precedence and coerces the
// top level (and operands of !, &&, ||) to Boolean. Throws
// ConditionParseError on malformed input.
ConditionExpr parseCondition(const std::string& text);

enum class DirectiveKind { If, Ifdef, Ifndef, Elif, Else };

// parseCondition for IF/ELIF; defined(X) / !defined(X) for IFDEF/IFNDEF.
ConditionExpr parseDirectiveCondition(DirectiveKind kind, const std::string& text);

// Arithmetic on literal values with preprocessor semantics. Returns nullopt
// for division/modulo by zero, out-of-range shifts, and bitwise/shift/modulo
// operators applied to floats.
std::optional<Value> applyArith(BinOp op, const Value& a, const Value& b);
bool applyRelation(BinOp op, const Value& a, const Value& b);

// Evaluates a numeric-valued expression under an identifier environment;
// nullopt when an identifier is unresolved or arithmetic faults.
std::optional<Value> evalNumeric(const ConditionExpr& e,
                                 const std::map<std::string, Value>& env);

// Deterministic source of fresh opaque-variable names, scoped by a hash of
// the originating file (or input) so names stay stable and collision-free
// across a run.
class OpaqueNamer {
public:
    explicit OpaqueNamer(const std::string& scope);
    std::string fresh();

private:
    std::string scopeHash_;
    int next_ = 1;
};

}  // namespace vareffect
