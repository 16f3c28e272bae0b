#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vareffect/condition.hpp"

namespace vareffect {

// One conditional-compilation branch. Line numbers are 1-based physical
// lines of the original file, inclusive; a branch starts at its own
// directive line and ends just before the next branch directive (or at the
// closing #endif for the last branch of a chain).
struct CodeBlock {
    std::string file;
    DirectiveKind kind = DirectiveKind::If;
    int startLine = 0;
    int endLine = 0;
    std::string rawCondition;                // empty for ELSE
    std::optional<ConditionExpr> condition;  // absent for ELSE
    ConditionExpr effective;                 // own condition AND negated prior siblings
    std::vector<CodeBlock> children;
    bool errorOnly = false;
    bool degraded = false;  // condition unparsable, replaced by an opaque variable
};

struct BlockTree {
    std::string file;
    std::vector<CodeBlock> blocks;
    int degradedCount = 0;
};

// Extracts the nested block structure of one source file. Line
// continuations are spliced first, comments and string literals are
// neutralized so directives inside them are ignored, then every
// #if/#ifdef/#ifndef/#elif/#else/#endif is matched into a tree. Fresh names
// for unparsable conditions come from the caller's namer so later
// per-file degradations stay collision-free. Throws
// UnbalancedDirectivesError on missing #endif or stray #elif/#else/#endif.
BlockTree scanBlocks(const std::string& source, const std::string& path, OpaqueNamer& namer);
BlockTree scanBlocks(const std::string& source, const std::string& path);

// Removes every block that holds nothing but #error directives (directly
// and in all children). These are compile-time consistency checks, not
// variable code.
BlockTree stripConsistencyChecks(const BlockTree& tree);

// Pairs each block with the conjunction of effective branch conditions
// along its ancestor path. The first entry is (nullptr, true) and stands
// for top-level code outside any conditional.
std::vector<std::pair<const CodeBlock*, ConditionExpr>> blockPresenceConditions(
    const BlockTree& tree);

// Debug dump with line ranges and serialized conditions.
std::string blockTreeJsonText(const BlockTree& tree);

}  // namespace vareffect
