#include "vareffect/condition.hpp"

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstring>

namespace vareffect {

bool isRelational(BinOp op) {
    switch (op) {
        case BinOp::Eq:
        case BinOp::Ne:
        case BinOp::Lt:
        case BinOp::Le:
        case BinOp::Gt:
        case BinOp::Ge:
            return true;
        default:
            return false;
    }
}

bool isLogical(BinOp op) { return op == BinOp::And || op == BinOp::Or; }

const char* binOpText(BinOp op) {
    switch (op) {
        case BinOp::Add: return "+";
        case BinOp::Sub: return "-";
        case BinOp::Mul: return "*";
        case BinOp::Div: return "/";
        case BinOp::Mod: return "%";
        case BinOp::Shl: return "<<";
        case BinOp::Shr: return ">>";
        case BinOp::BitAnd: return "&";
        case BinOp::BitXor: return "^";
        case BinOp::BitOr: return "|";
        case BinOp::Eq: return "==";
        case BinOp::Ne: return "!=";
        case BinOp::Lt: return "<";
        case BinOp::Le: return "<=";
        case BinOp::Gt: return ">";
        case BinOp::Ge: return ">=";
        case BinOp::And: return "&&";
        case BinOp::Or: return "||";
    }
    return "?";
}

namespace {

// C binding strength; larger binds tighter.
int opPrecedence(BinOp op) {
    switch (op) {
        case BinOp::Or: return 1;
        case BinOp::And: return 2;
        case BinOp::BitOr: return 3;
        case BinOp::BitXor: return 4;
        case BinOp::BitAnd: return 5;
        case BinOp::Eq:
        case BinOp::Ne: return 6;
        case BinOp::Lt:
        case BinOp::Le:
        case BinOp::Gt:
        case BinOp::Ge: return 7;
        case BinOp::Shl:
        case BinOp::Shr: return 8;
        case BinOp::Add:
        case BinOp::Sub: return 9;
        default: return 10;  // Mul/Div/Mod
    }
}

constexpr int kUnaryPrec = 11;
constexpr int kAtomPrec = 12;

}  // namespace

struct ConditionExpr::Node {
    CondKind kind = CondKind::BoolLit;
    BinOp op = BinOp::Add;
    std::string name;
    Value value;
    bool boolValue = true;
    std::vector<ConditionExpr> children;
    std::string text;
    std::size_t count = 1;
};

namespace {

int nodePrecedence(const ConditionExpr& e) {
    switch (e.kind()) {
        case CondKind::Binary: return opPrecedence(e.op());
        case CondKind::Not:
        case CondKind::Neg: return kUnaryPrec;
        default: return kAtomPrec;
    }
}

void appendChildText(std::string& out, const ConditionExpr& child, int minPrec) {
    if (nodePrecedence(child) < minPrec) {
        out += '(';
        out += child.text();
        out += ')';
    } else {
        out += child.text();
    }
}

}  // namespace

ConditionExpr ConditionExpr::make(Node n) {
    for (const ConditionExpr& c : n.children) n.count += c.nodeCount();
    switch (n.kind) {
        case CondKind::IntLit:
        case CondKind::FloatLit:
            n.text = n.value.str();
            break;
        case CondKind::BoolLit:
            n.text = n.boolValue ? "true" : "false";
            break;
        case CondKind::Ident:
        case CondKind::Opaque:
            n.text = n.name;
            break;
        case CondKind::Defined:
            n.text = "defined(" + n.name + ")";
            break;
        case CondKind::Not:
        case CondKind::Neg:
            n.text = n.kind == CondKind::Not ? "!" : "-";
            appendChildText(n.text, n.children[0], kUnaryPrec);
            break;
        case CondKind::Binary: {
            int prec = opPrecedence(n.op);
            appendChildText(n.text, n.children[0], prec);
            n.text += ' ';
            n.text += binOpText(n.op);
            n.text += ' ';
            appendChildText(n.text, n.children[1], prec + 1);
            break;
        }
    }
    return ConditionExpr(std::make_shared<const Node>(std::move(n)));
}

ConditionExpr::ConditionExpr() {
    static ConditionExpr t = boolLit(true);
    node_ = t.node_;
}

ConditionExpr ConditionExpr::intLit(long long v) {
    Node n;
    n.kind = CondKind::IntLit;
    n.value = Value::ofInt(v);
    return make(std::move(n));
}

ConditionExpr ConditionExpr::floatLit(double v) {
    Node n;
    n.kind = CondKind::FloatLit;
    n.value = Value::ofFloat(v);
    return make(std::move(n));
}

ConditionExpr ConditionExpr::literal(const Value& v) {
    return v.isFloat ? floatLit(v.d) : intLit(v.i);
}

ConditionExpr ConditionExpr::boolLit(bool v) {
    Node n;
    n.kind = CondKind::BoolLit;
    n.boolValue = v;
    return make(std::move(n));
}

ConditionExpr ConditionExpr::ident(std::string name) {
    Node n;
    n.kind = CondKind::Ident;
    n.name = std::move(name);
    return make(std::move(n));
}

ConditionExpr ConditionExpr::defined(std::string name) {
    Node n;
    n.kind = CondKind::Defined;
    n.name = std::move(name);
    return make(std::move(n));
}

ConditionExpr ConditionExpr::opaque(std::string name, bool booleanValued) {
    Node n;
    n.kind = CondKind::Opaque;
    n.name = std::move(name);
    n.boolValue = booleanValued;
    return make(std::move(n));
}

ConditionExpr ConditionExpr::notOp(ConditionExpr operand) {
    if (!operand.isBooleanValued()) throw Error("! operand must be Boolean-valued");
    Node n;
    n.kind = CondKind::Not;
    n.children = {std::move(operand)};
    return make(std::move(n));
}

ConditionExpr ConditionExpr::negOp(ConditionExpr operand) {
    if (operand.isBooleanValued()) throw Error("unary - operand must be numeric");
    Node n;
    n.kind = CondKind::Neg;
    n.children = {std::move(operand)};
    return make(std::move(n));
}

ConditionExpr ConditionExpr::binary(BinOp op, ConditionExpr lhs, ConditionExpr rhs) {
    if (isLogical(op)) {
        if (!lhs.isBooleanValued() || !rhs.isBooleanValued())
            throw Error("logical operands must be Boolean-valued");
    } else {
        if (lhs.isBooleanValued() || rhs.isBooleanValued())
            throw Error("numeric operator applied to Boolean operand");
    }
    Node n;
    n.kind = CondKind::Binary;
    n.op = op;
    n.children = {std::move(lhs), std::move(rhs)};
    return make(std::move(n));
}

CondKind ConditionExpr::kind() const { return node_->kind; }
BinOp ConditionExpr::op() const { return node_->op; }
const std::string& ConditionExpr::name() const { return node_->name; }
const Value& ConditionExpr::value() const { return node_->value; }
bool ConditionExpr::boolValue() const { return node_->boolValue; }
const ConditionExpr& ConditionExpr::operand() const { return node_->children[0]; }
const ConditionExpr& ConditionExpr::lhs() const { return node_->children[0]; }
const ConditionExpr& ConditionExpr::rhs() const { return node_->children[1]; }
const std::string& ConditionExpr::text() const { return node_->text; }
std::size_t ConditionExpr::nodeCount() const { return node_->count; }

bool ConditionExpr::isBooleanValued() const {
    switch (kind()) {
        case CondKind::BoolLit:
        case CondKind::Defined:
        case CondKind::Not:
            return true;
        case CondKind::Opaque:
            return node_->boolValue;
        case CondKind::Binary:
            return isRelational(op()) || isLogical(op());
        default:
            return false;
    }
}

ConditionExpr toBoolean(ConditionExpr e) {
    if (e.isBooleanValued()) return e;
    return ConditionExpr::binary(BinOp::Ne, std::move(e), ConditionExpr::intLit(0));
}

namespace {

struct Token {
    enum Type { Number, Ident, Op, LParen, RParen, End } type;
    std::string text;
    Value value;
    std::size_t pos;
};

class CondLexer {
public:
    explicit CondLexer(const std::string& s) : s_(s) {}

    Token next() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) pos_++;
        std::size_t start = pos_;
        if (pos_ >= s_.size()) return {Token::End, "", {}, start};
        char c = s_[pos_];
        if (c == '(') { pos_++; return {Token::LParen, "(", {}, start}; }
        if (c == ')') { pos_++; return {Token::RParen, ")", {}, start}; }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && pos_ + 1 < s_.size() &&
             std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])))) {
            return lexNumber(start);
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                pos_++;
            return {Token::Ident, s_.substr(start, pos_ - start), {}, start};
        }
        return lexOperator(start);
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;

    Token lexNumber(std::size_t start) {
        bool hex = s_[pos_] == '0' && pos_ + 1 < s_.size() &&
                   (s_[pos_ + 1] == 'x' || s_[pos_ + 1] == 'X');
        if (hex) pos_ += 2;
        while (pos_ < s_.size()) {
            char c = s_[pos_];
            bool digitish = hex ? std::isxdigit(static_cast<unsigned char>(c))
                                : (std::isdigit(static_cast<unsigned char>(c)) || c == '.');
            if (digitish) {
                pos_++;
                continue;
            }
            if (!hex && (c == 'e' || c == 'E')) {
                pos_++;
                if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) pos_++;
                continue;
            }
            break;
        }
        while (pos_ < s_.size() && std::strchr("uUlLfF", s_[pos_])) pos_++;
        std::string text = s_.substr(start, pos_ - start);
        std::optional<Value> v = parseValue(text);
        if (!v) throw ConditionParseError("malformed numeric literal '" + text + "'", start);
        return {Token::Number, text, *v, start};
    }

    Token lexOperator(std::size_t start) {
        auto two = [&](const char* t) {
            if (s_.compare(pos_, 2, t) == 0) {
                pos_ += 2;
                return true;
            }
            return false;
        };
        static const char* twoChar[] = {"&&", "||", "==", "!=", "<=", ">=", "<<", ">>"};
        for (const char* t : twoChar)
            if (two(t)) return {Token::Op, t, {}, start};
        char c = s_[pos_];
        if (std::strchr("&|^=<>!+-*/%", c)) {
            pos_++;
            if (c == '=') return {Token::Op, "==", {}, start};  // lone '=' means equality
            return {Token::Op, std::string(1, c), {}, start};
        }
        throw ConditionParseError(std::string("unexpected character '") + c + "'", start);
    }
};

class CondParser {
public:
    explicit CondParser(const std::string& s) : lexer_(s) { advance(); }

    ConditionExpr parseTopLevel() {
        ConditionExpr e = parseBinary(1);
        if (cur_.type != Token::End)
            throw ConditionParseError("trailing input '" + cur_.text + "'", cur_.pos);
        return toBoolean(std::move(e));
    }

private:
    CondLexer lexer_;
    Token cur_;

    void advance() { cur_ = lexer_.next(); }

    static std::optional<BinOp> binOpFor(const std::string& t) {
        if (t == "||") return BinOp::Or;
        if (t == "&&") return BinOp::And;
        if (t == "|") return BinOp::BitOr;
        if (t == "^") return BinOp::BitXor;
        if (t == "&") return BinOp::BitAnd;
        if (t == "==") return BinOp::Eq;
        if (t == "!=") return BinOp::Ne;
        if (t == "<") return BinOp::Lt;
        if (t == "<=") return BinOp::Le;
        if (t == ">") return BinOp::Gt;
        if (t == ">=") return BinOp::Ge;
        if (t == "<<") return BinOp::Shl;
        if (t == ">>") return BinOp::Shr;
        if (t == "+") return BinOp::Add;
        if (t == "-") return BinOp::Sub;
        if (t == "*") return BinOp::Mul;
        if (t == "/") return BinOp::Div;
        if (t == "%") return BinOp::Mod;
        return std::nullopt;
    }

    ConditionExpr parseBinary(int minPrec) {
        ConditionExpr lhs = parseUnary();
        for (;;) {
            if (cur_.type != Token::Op) return lhs;
            std::optional<BinOp> op = binOpFor(cur_.text);
            if (!op || opPrecedence(*op) < minPrec) return lhs;
            std::size_t opPos = cur_.pos;
            advance();
            ConditionExpr rhs = parseBinary(opPrecedence(*op) + 1);
            lhs = combine(*op, std::move(lhs), std::move(rhs), opPos);
        }
    }

    ConditionExpr combine(BinOp op, ConditionExpr lhs, ConditionExpr rhs, std::size_t pos) {
        if (isLogical(op))
            return ConditionExpr::binary(op, toBoolean(std::move(lhs)), toBoolean(std::move(rhs)));
        if (lhs.isBooleanValued() || rhs.isBooleanValued())
            throw ConditionParseError(
                std::string("operator ") + binOpText(op) + " applied to Boolean operand", pos);
        return ConditionExpr::binary(op, std::move(lhs), std::move(rhs));
    }

    ConditionExpr parseUnary() {
        if (cur_.type == Token::Op) {
            std::size_t pos = cur_.pos;
            if (cur_.text == "!") {
                advance();
                return ConditionExpr::notOp(toBoolean(parseUnary()));
            }
            if (cur_.text == "-") {
                advance();
                ConditionExpr e = parseUnary();
                if (e.isBooleanValued())
                    throw ConditionParseError("unary - applied to Boolean operand", pos);
                return ConditionExpr::negOp(std::move(e));
            }
            if (cur_.text == "+") {
                advance();
                ConditionExpr e = parseUnary();
                if (e.isBooleanValued())
                    throw ConditionParseError("unary + applied to Boolean operand", pos);
                return e;
            }
        }
        return parsePrimary();
    }

    ConditionExpr parsePrimary() {
        switch (cur_.type) {
            case Token::Number: {
                Value v = cur_.value;
                advance();
                return ConditionExpr::literal(v);
            }
            case Token::LParen: {
                std::size_t pos = cur_.pos;
                advance();
                ConditionExpr e = parseBinary(1);
                if (cur_.type != Token::RParen)
                    throw ConditionParseError("unclosed '('", pos);
                advance();
                return e;
            }
            case Token::Ident: {
                std::string name = cur_.text;
                std::size_t pos = cur_.pos;
                advance();
                if (name == "defined") return parseDefinedTail(pos);
                return ConditionExpr::ident(std::move(name));
            }
            default:
                throw ConditionParseError("expected expression, got '" + cur_.text + "'",
                                          cur_.pos);
        }
    }

    ConditionExpr parseDefinedTail(std::size_t pos) {
        bool parens = false;
        if (cur_.type == Token::LParen) {
            parens = true;
            advance();
        }
        if (cur_.type != Token::Ident)
            throw ConditionParseError("expected identifier after defined", pos);
        std::string name = cur_.text;
        advance();
        if (parens) {
            if (cur_.type != Token::RParen)
                throw ConditionParseError("expected ')' after defined(", pos);
            advance();
        }
        return ConditionExpr::defined(std::move(name));
    }
};

}  // namespace

ConditionExpr parseCondition(const std::string& text) {
    CondParser p(text);
    return p.parseTopLevel();
}

namespace {

std::string trimCopy(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) b++;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) e--;
    return s.substr(b, e - b);
}

}  // namespace

ConditionExpr parseDirectiveCondition(DirectiveKind kind, const std::string& text) {
    switch (kind) {
        case DirectiveKind::If:
        case DirectiveKind::Elif:
            return parseCondition(text);
        case DirectiveKind::Ifdef:
        case DirectiveKind::Ifndef: {
            std::string name = trimCopy(text);
            for (std::size_t i = 0; i < name.size(); i++) {
                char c = name[i];
                bool ok = i == 0 ? (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
                                 : (std::isalnum(static_cast<unsigned char>(c)) || c == '_');
                if (!ok) throw ConditionParseError("malformed macro name '" + name + "'", i);
            }
            if (name.empty()) throw ConditionParseError("missing macro name", 0);
            ConditionExpr d = ConditionExpr::defined(name);
            return kind == DirectiveKind::Ifdef ? d : ConditionExpr::notOp(d);
        }
        case DirectiveKind::Else:
            throw Error("#else has no condition");
    }
    throw Error("unreachable directive kind");
}

std::optional<Value> applyArith(BinOp op, const Value& a, const Value& b) {
    bool anyFloat = a.isFloat || b.isFloat;
    switch (op) {
        case BinOp::Mod:
        case BinOp::Shl:
        case BinOp::Shr:
        case BinOp::BitAnd:
        case BinOp::BitXor:
        case BinOp::BitOr:
            if (anyFloat) return std::nullopt;
            break;
        default:
            break;
    }
    auto wrap = [](unsigned long long v) { return static_cast<long long>(v); };
    switch (op) {
        case BinOp::Add:
            if (anyFloat) return Value::ofFloat(a.asDouble() + b.asDouble());
            return Value::ofInt(wrap(static_cast<unsigned long long>(a.i) +
                                     static_cast<unsigned long long>(b.i)));
        case BinOp::Sub:
            if (anyFloat) return Value::ofFloat(a.asDouble() - b.asDouble());
            return Value::ofInt(wrap(static_cast<unsigned long long>(a.i) -
                                     static_cast<unsigned long long>(b.i)));
        case BinOp::Mul:
            if (anyFloat) return Value::ofFloat(a.asDouble() * b.asDouble());
            return Value::ofInt(wrap(static_cast<unsigned long long>(a.i) *
                                     static_cast<unsigned long long>(b.i)));
        case BinOp::Div:
            if (anyFloat) {
                if (b.asDouble() == 0.0) return std::nullopt;
                return Value::ofFloat(a.asDouble() / b.asDouble());
            }
            if (b.i == 0) return std::nullopt;
            return Value::ofInt(a.i / b.i);
        case BinOp::Mod:
            if (b.i == 0) return std::nullopt;
            return Value::ofInt(a.i % b.i);
        case BinOp::Shl:
            if (b.i < 0 || b.i > 63) return std::nullopt;
            return Value::ofInt(wrap(static_cast<unsigned long long>(a.i) << b.i));
        case BinOp::Shr:
            if (b.i < 0 || b.i > 63) return std::nullopt;
            return Value::ofInt(a.i >> b.i);
        case BinOp::BitAnd: return Value::ofInt(a.i & b.i);
        case BinOp::BitXor: return Value::ofInt(a.i ^ b.i);
        case BinOp::BitOr: return Value::ofInt(a.i | b.i);
        default:
            return std::nullopt;  // relational/logical are not arithmetic
    }
}

bool applyRelation(BinOp op, const Value& a, const Value& b) {
    switch (op) {
        case BinOp::Eq: return a.sameNumber(b);
        case BinOp::Ne: return !a.sameNumber(b);
        case BinOp::Lt: return a.lessThan(b);
        case BinOp::Le: return a.lessThan(b) || a.sameNumber(b);
        case BinOp::Gt: return b.lessThan(a);
        case BinOp::Ge: return b.lessThan(a) || a.sameNumber(b);
        default:
            throw Error("not a relational operator");
    }
}

std::optional<Value> evalNumeric(const ConditionExpr& e,
                                 const std::map<std::string, Value>& env) {
    switch (e.kind()) {
        case CondKind::IntLit:
        case CondKind::FloatLit:
            return e.value();
        case CondKind::Ident: {
            auto it = env.find(e.name());
            if (it == env.end()) return std::nullopt;
            return it->second;
        }
        case CondKind::Neg: {
            std::optional<Value> v = evalNumeric(e.operand(), env);
            if (!v) return std::nullopt;
            if (v->isFloat) return Value::ofFloat(-v->d);
            return Value::ofInt(static_cast<long long>(-static_cast<unsigned long long>(v->i)));
        }
        case CondKind::Binary: {
            if (isRelational(e.op()) || isLogical(e.op())) return std::nullopt;
            std::optional<Value> a = evalNumeric(e.lhs(), env);
            std::optional<Value> b = evalNumeric(e.rhs(), env);
            if (!a || !b) return std::nullopt;
            return applyArith(e.op(), *a, *b);
        }
        default:
            return std::nullopt;
    }
}

OpaqueNamer::OpaqueNamer(const std::string& scope) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : scope) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%08llx", static_cast<unsigned long long>(h) & 0xffffffffull);
    scopeHash_ = buf;
}

std::string OpaqueNamer::fresh() {
    return "__opaque_" + scopeHash_ + "_" + std::to_string(next_++);
}

}  // namespace vareffect
