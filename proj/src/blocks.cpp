#include "vareffect/blocks.hpp"

#include <cctype>

#include <nlohmann/json.hpp>

namespace vareffect {

namespace {

struct LogicalLine {
    std::string text;
    int physLine;  // physical line the logical line starts on
};

// Backslash-newline splicing; keeps track of where each logical line began.
std::vector<LogicalLine> spliceLines(const std::string& src) {
    std::vector<LogicalLine> out;
    std::string cur;
    int phys = 1;
    int start = 1;
    bool open = false;
    auto flush = [&] {
        out.push_back({cur, start});
        cur.clear();
        open = false;
    };
    for (std::size_t i = 0; i < src.size(); i++) {
        char c = src[i];
        if (c == '\r' && i + 1 < src.size() && src[i + 1] == '\n') continue;
        if (c == '\n' || c == '\r') {
            if (!cur.empty() && cur.back() == '\\') {
                cur.pop_back();  // spliced: logical line continues
            } else {
                flush();
                start = phys + 1;
            }
            phys++;
            continue;
        }
        if (!open) open = true;
        cur += c;
    }
    if (open || !cur.empty()) flush();
    return out;
}

// Blanks out comments (and skips over string/char literals so their content
// cannot start one). Block comments carry state across lines, which is what
// keeps directives inside them from producing blocks.
class CommentStripper {
public:
    std::string strip(const std::string& line) {
        std::string out;
        out.reserve(line.size());
        std::size_t i = 0;
        while (i < line.size()) {
            char c = line[i];
            switch (state_) {
                case State::Code:
                    if (c == '/' && i + 1 < line.size() && line[i + 1] == '/') {
                        out.append(line.size() - i, ' ');
                        i = line.size();
                        break;
                    }
                    if (c == '/' && i + 1 < line.size() && line[i + 1] == '*') {
                        state_ = State::Block;
                        out += "  ";
                        i += 2;
                        break;
                    }
                    if (c == '"') state_ = State::Str;
                    if (c == '\'') state_ = State::Chr;
                    out += c;
                    i++;
                    break;
                case State::Block:
                    if (c == '*' && i + 1 < line.size() && line[i + 1] == '/') {
                        state_ = State::Code;
                        out += "  ";
                        i += 2;
                        break;
                    }
                    out += ' ';
                    i++;
                    break;
                case State::Str:
                case State::Chr: {
                    char quote = state_ == State::Str ? '"' : '\'';
                    if (c == '\\' && i + 1 < line.size()) {
                        out += c;
                        out += line[i + 1];
                        i += 2;
                        break;
                    }
                    if (c == quote) state_ = State::Code;
                    out += c;
                    i++;
                    break;
                }
            }
        }
        // Unterminated string/char literals do not span lines; tolerate them.
        if (state_ == State::Str || state_ == State::Chr) state_ = State::Code;
        return out;
    }

private:
    enum class State { Code, Block, Str, Chr };
    State state_ = State::Code;
};

enum class LineKind { Blank, Content, If, Ifdef, Ifndef, Elif, Else, Endif, ErrorDirective };

struct Classified {
    LineKind kind;
    std::string rest;  // condition text for the if-family
};

Classified classifyLine(const std::string& line) {
    std::size_t i = 0;
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) i++;
    if (i == line.size()) return {LineKind::Blank, ""};
    if (line[i] != '#') return {LineKind::Content, ""};
    i++;
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) i++;
    std::size_t w = i;
    while (w < line.size() &&
           (std::isalnum(static_cast<unsigned char>(line[w])) || line[w] == '_'))
        w++;
    std::string word = line.substr(i, w - i);
    std::string rest = w < line.size() ? line.substr(w) : "";
    if (word == "if") return {LineKind::If, rest};
    if (word == "ifdef") return {LineKind::Ifdef, rest};
    if (word == "ifndef") return {LineKind::Ifndef, rest};
    if (word == "elif") return {LineKind::Elif, rest};
    if (word == "else") return {LineKind::Else, ""};
    if (word == "endif") return {LineKind::Endif, ""};
    if (word == "error") return {LineKind::ErrorDirective, ""};
    return {LineKind::Content, ""};  // #define, #include, #pragma, ...
}

std::string trimCopy(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) b++;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) e--;
    return s.substr(b, e - b);
}

struct Open {
    CodeBlock block;
    std::vector<ConditionExpr> chainPriors;  // own conditions of earlier branches + this one
    bool sawElse = false;
    bool directContent = false;
    bool sawError = false;
    bool allChildrenErrorOnly = true;
};

class Scanner {
public:
    Scanner(const std::string& path, OpaqueNamer& namer) : path_(path), namer_(namer) {
        tree_.file = path;
    }

    BlockTree run(const std::string& source) {
        CommentStripper stripper;
        for (const LogicalLine& ll : spliceLines(source)) {
            std::string clean = stripper.strip(ll.text);
            handle(classifyLine(clean), clean, ll.physLine);
        }
        if (!stack_.empty())
            throw UnbalancedDirectivesError(path_, stack_.back().block.startLine,
                                            "missing #endif");
        return std::move(tree_);
    }

private:
    std::string path_;
    OpaqueNamer& namer_;
    BlockTree tree_;
    std::vector<Open> stack_;

    void handle(const Classified& c, const std::string& line, int ln) {
        switch (c.kind) {
            case LineKind::Blank:
                return;
            case LineKind::Content:
                if (!stack_.empty()) stack_.back().directContent = true;
                return;
            case LineKind::ErrorDirective:
                if (!stack_.empty()) stack_.back().sawError = true;
                return;
            case LineKind::If:
                openChain(DirectiveKind::If, c.rest, ln);
                return;
            case LineKind::Ifdef:
                openChain(DirectiveKind::Ifdef, c.rest, ln);
                return;
            case LineKind::Ifndef:
                openChain(DirectiveKind::Ifndef, c.rest, ln);
                return;
            case LineKind::Elif:
                continueChain(DirectiveKind::Elif, c.rest, ln);
                return;
            case LineKind::Else:
                continueChain(DirectiveKind::Else, "", ln);
                return;
            case LineKind::Endif:
                if (stack_.empty())
                    throw UnbalancedDirectivesError(path_, ln, "#endif without matching #if");
                closeTop(ln);
                return;
        }
        (void)line;
    }

    // Parses a branch's own condition; on failure records an opaque
    // stand-in instead of dropping the block.
    ConditionExpr ownCondition(DirectiveKind kind, const std::string& raw, bool& degraded) {
        try {
            return parseDirectiveCondition(kind, raw);
        } catch (const ConditionParseError&) {
            degraded = true;
            tree_.degradedCount++;
            return ConditionExpr::opaque(namer_.fresh(), true);
        }
    }

    static ConditionExpr effectiveOf(const std::vector<ConditionExpr>& priors,
                                     const std::optional<ConditionExpr>& own) {
        std::optional<ConditionExpr> acc;
        for (const ConditionExpr& p : priors) {
            ConditionExpr neg = ConditionExpr::notOp(p);
            acc = acc ? ConditionExpr::binary(BinOp::And, *acc, neg) : neg;
        }
        if (own) acc = acc ? ConditionExpr::binary(BinOp::And, *acc, *own) : *own;
        return *acc;
    }

    void openChain(DirectiveKind kind, const std::string& raw, int ln) {
        Open o;
        o.block.file = path_;
        o.block.kind = kind;
        o.block.startLine = ln;
        o.block.rawCondition = trimCopy(raw);
        o.block.condition = ownCondition(kind, raw, o.block.degraded);
        o.block.effective = *o.block.condition;
        o.chainPriors = {*o.block.condition};
        stack_.push_back(std::move(o));
    }

    void continueChain(DirectiveKind kind, const std::string& raw, int ln) {
        const char* what = kind == DirectiveKind::Elif ? "#elif" : "#else";
        if (stack_.empty())
            throw UnbalancedDirectivesError(path_, ln, std::string(what) + " without #if");
        if (stack_.back().sawElse)
            throw UnbalancedDirectivesError(path_, ln, std::string(what) + " after #else");
        std::vector<ConditionExpr> priors = stack_.back().chainPriors;
        closeTop(ln - 1);

        Open o;
        o.block.file = path_;
        o.block.kind = kind;
        o.block.startLine = ln;
        o.chainPriors = priors;
        if (kind == DirectiveKind::Elif) {
            o.block.rawCondition = trimCopy(raw);
            o.block.condition = ownCondition(kind, raw, o.block.degraded);
            o.chainPriors.push_back(*o.block.condition);
        } else {
            o.sawElse = true;
        }
        o.block.effective = effectiveOf(priors, o.block.condition);
        stack_.push_back(std::move(o));
    }

    void closeTop(int endLine) {
        Open o = std::move(stack_.back());
        stack_.pop_back();
        o.block.endLine = endLine;
        o.block.errorOnly = !o.directContent && o.allChildrenErrorOnly &&
                            (o.sawError || !o.block.children.empty());
        if (stack_.empty()) {
            tree_.blocks.push_back(std::move(o.block));
        } else {
            stack_.back().allChildrenErrorOnly &= o.block.errorOnly;
            stack_.back().block.children.push_back(std::move(o.block));
        }
    }
};

}  // namespace

BlockTree scanBlocks(const std::string& source, const std::string& path, OpaqueNamer& namer) {
    return Scanner(path, namer).run(source);
}

BlockTree scanBlocks(const std::string& source, const std::string& path) {
    OpaqueNamer namer(path);
    return scanBlocks(source, path, namer);
}

namespace {

void stripInto(const std::vector<CodeBlock>& in, std::vector<CodeBlock>& out) {
    for (const CodeBlock& b : in) {
        if (b.errorOnly) continue;
        CodeBlock copy = b;
        copy.children.clear();
        stripInto(b.children, copy.children);
        out.push_back(std::move(copy));
    }
}

}  // namespace

BlockTree stripConsistencyChecks(const BlockTree& tree) {
    BlockTree out;
    out.file = tree.file;
    out.degradedCount = tree.degradedCount;
    stripInto(tree.blocks, out.blocks);
    return out;
}

namespace {

void collectPresence(const CodeBlock& b, const ConditionExpr* parent,
                     std::vector<std::pair<const CodeBlock*, ConditionExpr>>& out) {
    ConditionExpr pc =
        parent ? ConditionExpr::binary(BinOp::And, *parent, b.effective) : b.effective;
    out.emplace_back(&b, pc);
    for (const CodeBlock& c : b.children) collectPresence(c, &pc, out);
}

}  // namespace

std::vector<std::pair<const CodeBlock*, ConditionExpr>> blockPresenceConditions(
    const BlockTree& tree) {
    std::vector<std::pair<const CodeBlock*, ConditionExpr>> out;
    out.emplace_back(nullptr, ConditionExpr::boolLit(true));
    for (const CodeBlock& b : tree.blocks) collectPresence(b, nullptr, out);
    return out;
}

namespace {

const char* directiveName(DirectiveKind k) {
    switch (k) {
        case DirectiveKind::If: return "if";
        case DirectiveKind::Ifdef: return "ifdef";
        case DirectiveKind::Ifndef: return "ifndef";
        case DirectiveKind::Elif: return "elif";
        case DirectiveKind::Else: return "else";
    }
    return "?";
}

nlohmann::json blockJson(const CodeBlock& b) {
    nlohmann::json j;
    j["kind"] = directiveName(b.kind);
    j["start_line"] = b.startLine;
    j["end_line"] = b.endLine;
    j["raw_condition"] = b.rawCondition;
    if (b.condition)
        j["condition"] = b.condition->text();
    else
        j["condition"] = nullptr;
    j["effective"] = b.effective.text();
    j["error_only"] = b.errorOnly;
    j["degraded"] = b.degraded;
    j["children"] = nlohmann::json::array();
    for (const CodeBlock& c : b.children) j["children"].push_back(blockJson(c));
    return j;
}

}  // namespace

std::string blockTreeJsonText(const BlockTree& tree) {
    nlohmann::json j;
    j["file"] = tree.file;
    j["degraded_count"] = tree.degradedCount;
    j["blocks"] = nlohmann::json::array();
    for (const CodeBlock& b : tree.blocks) j["blocks"].push_back(blockJson(b));
    return j.dump(2) + "\n";
}

}  // namespace vareffect
