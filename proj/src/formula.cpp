#include "vareffect/formula.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <unordered_map>

#include "vareffect/value.hpp"

namespace vareffect {

struct Formula::Node {
    FormulaKind kind;
    std::string name;               // Var
    std::vector<Formula> children;  // Not/And/Or/Xor
    std::string key;
    std::size_t count = 1;
};

namespace {

// Precedence levels of the text form: || < && < ^ < ! < atoms.
int precedence(FormulaKind k) {
    switch (k) {
        case FormulaKind::Or: return 1;
        case FormulaKind::And: return 2;
        case FormulaKind::Xor: return 3;
        case FormulaKind::Not: return 4;
        default: return 5;
    }
}

// Appends a child's key, parenthesized when its operator binds looser than
// the position requires. Child keys are final, so no recursion is needed.
void appendChildKey(std::string& out, const Formula& child, int minPrec) {
    if (precedence(child.kind()) < minPrec) {
        out += '(';
        out += child.key();
        out += ')';
    } else {
        out += child.key();
    }
}

bool isIdentStart(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool isIdentChar(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool validVarName(const std::string& name) {
    if (name.empty() || name == "true" || name == "false") return false;
    std::size_t i = 0;
    if (name.rfind("defined(", 0) == 0) {
        if (name.back() != ')') return false;
        std::string inner = name.substr(8, name.size() - 9);
        if (inner.empty() || !isIdentStart(inner[0])) return false;
        for (char c : inner)
            if (!isIdentChar(c)) return false;
        return true;
    }
    if (!isIdentStart(name[i])) return false;
    while (i < name.size() && isIdentChar(name[i])) i++;
    if (i == name.size()) return true;
    if (name[i] != '=') return false;
    return parseValue(name.substr(i + 1)).has_value();
}

}  // namespace

Formula Formula::make(FormulaKind kind, std::string name, std::vector<Formula> children) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->name = std::move(name);
    n->children = std::move(children);
    n->count = 1;
    for (const Formula& c : n->children) n->count += c.nodeCount();
    switch (kind) {
        case FormulaKind::True: n->key = "true"; break;
        case FormulaKind::False: n->key = "false"; break;
        case FormulaKind::Var: n->key = n->name; break;
        case FormulaKind::Not:
            n->key = "!";
            appendChildKey(n->key, n->children[0], 4);
            break;
        case FormulaKind::Xor:
            appendChildKey(n->key, n->children[0], 3);
            n->key += " ^ ";
            appendChildKey(n->key, n->children[1], 4);
            break;
        case FormulaKind::And:
        case FormulaKind::Or: {
            const char* sep = kind == FormulaKind::And ? " && " : " || ";
            int childMin = precedence(kind) + 1;
            bool first = true;
            for (const Formula& c : n->children) {
                if (!first) n->key += sep;
                first = false;
                appendChildKey(n->key, c, childMin);
            }
            break;
        }
    }
    return Formula(std::shared_ptr<const Node>(std::move(n)));
}

Formula::Formula() : node_(t().node_) {}

Formula Formula::t() {
    static Formula v = make(FormulaKind::True, "", {});
    return v;
}

Formula Formula::f() {
    static Formula v = make(FormulaKind::False, "", {});
    return v;
}

Formula Formula::var(std::string name) {
    if (!validVarName(name)) throw Error("invalid variable name: " + name);
    return make(FormulaKind::Var, std::move(name), {});
}

FormulaKind Formula::kind() const { return node_->kind; }
const std::string& Formula::name() const { return node_->name; }
const std::vector<Formula>& Formula::children() const { return node_->children; }
const std::string& Formula::key() const { return node_->key; }
std::size_t Formula::nodeCount() const { return node_->count; }

void Formula::collectVariables(std::set<std::string>& out) const {
    if (kind() == FormulaKind::Var) {
        out.insert(name());
        return;
    }
    for (const Formula& c : children()) c.collectVariables(out);
}

std::set<std::string> Formula::variables() const {
    std::set<std::string> out;
    collectVariables(out);
    return out;
}

Formula Formula::makeNary(FormulaKind kind, std::vector<Formula> children) {
    std::vector<Formula> flat;
    flat.reserve(children.size());
    for (Formula& c : children) {
        if (c.kind() == kind) {
            for (const Formula& g : c.children()) flat.push_back(g);
        } else {
            flat.push_back(std::move(c));
        }
    }
    if (flat.empty()) return kind == FormulaKind::And ? Formula::t() : Formula::f();
    if (flat.size() == 1) return flat[0];
    std::sort(flat.begin(), flat.end());
    return make(kind, "", std::move(flat));
}

Formula fNot(Formula child) {
    return Formula::make(FormulaKind::Not, "", {std::move(child)});
}

Formula fAnd(std::vector<Formula> children) {
    return Formula::makeNary(FormulaKind::And, std::move(children));
}

Formula fOr(std::vector<Formula> children) {
    return Formula::makeNary(FormulaKind::Or, std::move(children));
}

Formula fXor(Formula left, Formula right) {
    return Formula::make(FormulaKind::Xor, "", {std::move(left), std::move(right)});
}

Formula substitute(const Formula& f, const std::string& var, bool value) {
    switch (f.kind()) {
        case FormulaKind::True:
        case FormulaKind::False:
            return f;
        case FormulaKind::Var:
            if (f.name() == var) return value ? Formula::t() : Formula::f();
            return f;
        case FormulaKind::Not: {
            Formula c = substitute(f.children()[0], var, value);
            if (c == f.children()[0]) return f;
            return fNot(c);
        }
        case FormulaKind::Xor: {
            Formula a = substitute(f.children()[0], var, value);
            Formula b = substitute(f.children()[1], var, value);
            if (a == f.children()[0] && b == f.children()[1]) return f;
            return fXor(a, b);
        }
        case FormulaKind::And:
        case FormulaKind::Or: {
            std::vector<Formula> mapped;
            mapped.reserve(f.children().size());
            bool changed = false;
            for (const Formula& c : f.children()) {
                mapped.push_back(substitute(c, var, value));
                if (mapped.back() != c) changed = true;
            }
            if (!changed) return f;
            return f.kind() == FormulaKind::And ? fAnd(std::move(mapped))
                                                : fOr(std::move(mapped));
        }
    }
    throw Error("unreachable formula kind");
}

bool evaluate(const Formula& f, const Assignment& a) {
    switch (f.kind()) {
        case FormulaKind::True: return true;
        case FormulaKind::False: return false;
        case FormulaKind::Var: {
            auto it = a.find(f.name());
            if (it == a.end()) throw MissingVariableError(f.name());
            return it->second;
        }
        case FormulaKind::Not: return !evaluate(f.children()[0], a);
        case FormulaKind::Xor:
            return evaluate(f.children()[0], a) != evaluate(f.children()[1], a);
        case FormulaKind::And:
            for (const Formula& c : f.children())
                if (!evaluate(c, a)) return false;
            return true;
        case FormulaKind::Or:
            for (const Formula& c : f.children())
                if (evaluate(c, a)) return true;
            return false;
    }
    throw Error("unreachable formula kind");
}

namespace {

// Negation that folds only constants; used where a rewrite introduces fresh
// negations and a literal !true would be noise.
Formula negateFoldConst(const Formula& x) {
    if (x.isTrue()) return Formula::f();
    if (x.isFalse()) return Formula::t();
    return fNot(x);
}

}  // namespace

Formula eliminateXor(const Formula& f) {
    switch (f.kind()) {
        case FormulaKind::True:
        case FormulaKind::False:
        case FormulaKind::Var:
            return f;
        case FormulaKind::Not: {
            Formula c = eliminateXor(f.children()[0]);
            if (c == f.children()[0]) return f;
            return fNot(c);
        }
        case FormulaKind::And:
        case FormulaKind::Or: {
            std::vector<Formula> mapped;
            mapped.reserve(f.children().size());
            bool changed = false;
            for (const Formula& c : f.children()) {
                mapped.push_back(eliminateXor(c));
                if (mapped.back() != c) changed = true;
            }
            if (!changed) return f;
            return f.kind() == FormulaKind::And ? fAnd(std::move(mapped))
                                                : fOr(std::move(mapped));
        }
        case FormulaKind::Xor: {
            Formula a = eliminateXor(f.children()[0]);
            Formula b = eliminateXor(f.children()[1]);
            return fOr({fAnd({a, negateFoldConst(b)}), fAnd({negateFoldConst(a), b})});
        }
    }
    throw Error("unreachable formula kind");
}

namespace {

class SimplifyPass {
public:
    Formula run(const Formula& f) {
        auto it = memo_.find(f.key());
        if (it != memo_.end()) return it->second;
        Formula out = step(f);
        memo_.emplace(f.key(), out);
        return out;
    }

private:
    std::unordered_map<std::string, Formula> memo_;

    Formula negate(const Formula& x) {
        if (x.isTrue()) return Formula::f();
        if (x.isFalse()) return Formula::t();
        if (x.kind() == FormulaKind::Not) return x.children()[0];
        return fNot(x);
    }

    Formula step(const Formula& f) {
        switch (f.kind()) {
            case FormulaKind::True:
            case FormulaKind::False:
            case FormulaKind::Var:
                return f;
            case FormulaKind::Not:
                return negate(run(f.children()[0]));
            case FormulaKind::Xor: {
                Formula a = run(f.children()[0]);
                Formula b = run(f.children()[1]);
                if (a == b) return Formula::f();
                if (a.isFalse()) return b;
                if (b.isFalse()) return a;
                if (a.isTrue()) return negate(b);
                if (b.isTrue()) return negate(a);
                return fXor(a, b);
            }
            case FormulaKind::And:
                return nary(f, FormulaKind::And);
            case FormulaKind::Or:
                return nary(f, FormulaKind::Or);
        }
        throw Error("unreachable formula kind");
    }

    Formula nary(const Formula& f, FormulaKind kind) {
        const bool isAnd = kind == FormulaKind::And;
        const Formula dominant = isAnd ? Formula::f() : Formula::t();
        const Formula neutral = isAnd ? Formula::t() : Formula::f();

        std::vector<Formula> kids;
        for (const Formula& raw : f.children()) {
            Formula c = run(raw);
            if (c == dominant) return dominant;
            if (c == neutral) continue;
            if (c.kind() == kind) {
                for (const Formula& g : c.children()) kids.push_back(g);
            } else {
                kids.push_back(c);
            }
        }
        std::sort(kids.begin(), kids.end());
        kids.erase(std::unique(kids.begin(), kids.end()), kids.end());
        if (kids.empty()) return neutral;
        if (kids.size() == 1) return kids[0];

        // complement: x together with !x collapses the whole node
        {
            std::set<std::string> keys;
            for (const Formula& c : kids) keys.insert(c.key());
            for (const Formula& c : kids)
                if (c.kind() == FormulaKind::Not && keys.count(c.children()[0].key()))
                    return dominant;
        }

        // absorption: viewing each child as a set of units (the disjuncts of
        // an OR child inside AND, the conjuncts of an AND child inside OR,
        // else the child itself), a child whose set contains another child's
        // set is redundant. Bloom-style signatures keep the pairwise scan
        // cheap.
        const FormulaKind unitKind = isAnd ? FormulaKind::Or : FormulaKind::And;
        struct Entry {
            std::vector<const std::string*> units;  // sorted
            std::uint64_t sig = 0;
        };
        std::vector<Entry> entries(kids.size());
        std::hash<std::string> hasher;
        for (std::size_t i = 0; i < kids.size(); i++) {
            Entry& e = entries[i];
            if (kids[i].kind() == unitKind) {
                for (const Formula& u : kids[i].children()) e.units.push_back(&u.key());
            } else {
                e.units.push_back(&kids[i].key());
            }
            // children of a node are already key-sorted
            for (const std::string* k : e.units) e.sig |= 1ull << (hasher(*k) & 63);
        }
        auto subset = [](const Entry& a, const Entry& b) {
            if (a.units.size() >= b.units.size()) return false;
            if (a.sig & ~b.sig) return false;
            return std::includes(
                b.units.begin(), b.units.end(), a.units.begin(), a.units.end(),
                [](const std::string* x, const std::string* y) { return *x < *y; });
        };
        std::vector<bool> dead(kids.size(), false);
        for (std::size_t i = 0; i < kids.size(); i++) {
            if (dead[i]) continue;
            for (std::size_t j = 0; j < kids.size(); j++) {
                if (i == j || dead[j]) continue;
                if (subset(entries[i], entries[j])) dead[j] = true;
            }
        }
        std::vector<Formula> alive;
        for (std::size_t i = 0; i < kids.size(); i++)
            if (!dead[i]) alive.push_back(kids[i]);
        if (alive.size() == 1) return alive[0];
        return isAnd ? fAnd(std::move(alive)) : fOr(std::move(alive));
    }
};

}  // namespace

Formula simplify(const Formula& f) {
    Formula cur = f;
    for (;;) {
        SimplifyPass pass;
        Formula next = pass.run(cur);
        if (next == cur) return cur;
        cur = next;
    }
}

namespace {

class FormulaParser {
public:
    explicit FormulaParser(const std::string& text) : s_(text) {}

    Formula parse() {
        Formula f = parseOr();
        skipSpace();
        if (pos_ != s_.size()) throw FormulaParseError("trailing input", pos_);
        return f;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;

    void skipSpace() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) pos_++;
    }

    bool eat(const char* tok) {
        skipSpace();
        std::size_t n = std::strlen(tok);
        if (s_.compare(pos_, n, tok) == 0) {
            pos_ += n;
            return true;
        }
        return false;
    }

    char peek() {
        skipSpace();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    Formula parseOr() {
        Formula f = parseAnd();
        std::vector<Formula> terms{f};
        while (eat("||")) terms.push_back(parseAnd());
        return terms.size() == 1 ? terms[0] : fOr(std::move(terms));
    }

    Formula parseAnd() {
        Formula f = parseXor();
        std::vector<Formula> terms{f};
        while (eat("&&")) terms.push_back(parseXor());
        return terms.size() == 1 ? terms[0] : fAnd(std::move(terms));
    }

    Formula parseXor() {
        Formula f = parseUnary();
        while (true) {
            skipSpace();
            if (pos_ < s_.size() && s_[pos_] == '^') {
                pos_++;
                f = fXor(f, parseUnary());
            } else {
                return f;
            }
        }
    }

    Formula parseUnary() {
        skipSpace();
        if (pos_ < s_.size() && s_[pos_] == '!') {
            pos_++;
            return fNot(parseUnary());
        }
        return parsePrimary();
    }

    Formula parsePrimary() {
        skipSpace();
        if (pos_ >= s_.size()) throw FormulaParseError("unexpected end of input", pos_);
        char c = s_[pos_];
        if (c == '(') {
            pos_++;
            Formula f = parseOr();
            skipSpace();
            if (pos_ >= s_.size() || s_[pos_] != ')')
                throw FormulaParseError("expected ')'", pos_);
            pos_++;
            return f;
        }
        if (!isIdentStart(c)) throw FormulaParseError("unexpected character", pos_);
        std::size_t start = pos_;
        while (pos_ < s_.size() && isIdentChar(s_[pos_])) pos_++;
        std::string ident = s_.substr(start, pos_ - start);
        if (ident == "true") return Formula::t();
        if (ident == "false") return Formula::f();
        if (ident == "defined") {
            skipSpace();
            if (pos_ >= s_.size() || s_[pos_] != '(')
                throw FormulaParseError("expected '(' after defined", pos_);
            pos_++;
            skipSpace();
            std::size_t nameStart = pos_;
            if (pos_ >= s_.size() || !isIdentStart(s_[pos_]))
                throw FormulaParseError("expected identifier in defined()", pos_);
            while (pos_ < s_.size() && isIdentChar(s_[pos_])) pos_++;
            std::string name = s_.substr(nameStart, pos_ - nameStart);
            skipSpace();
            if (pos_ >= s_.size() || s_[pos_] != ')')
                throw FormulaParseError("expected ')'", pos_);
            pos_++;
            return Formula::var("defined(" + name + ")");
        }
        if (pos_ < s_.size() && s_[pos_] == '=') {
            pos_++;
            std::size_t valStart = pos_;
            if (pos_ < s_.size() && s_[pos_] == '-') pos_++;
            while (pos_ < s_.size()) {
                char v = s_[pos_];
                bool valChar = std::isalnum(static_cast<unsigned char>(v)) || v == '.' ||
                               v == '+' || v == '-';
                if (!valChar) break;
                pos_++;
            }
            std::string raw = s_.substr(valStart, pos_ - valStart);
            std::optional<Value> val = parseValue(raw);
            if (!val) throw FormulaParseError("malformed value literal", valStart);
            return Formula::var(ident + "=" + val->str());
        }
        return Formula::var(ident);
    }
};

}  // namespace

Formula parseFormula(const std::string& text) {
    FormulaParser p(text);
    return p.parse();
}

}  // namespace vareffect
