#include <doctest.h>

#include <random>

#include "support/corpus_gen.hpp"
#include "vareffect/blocks.hpp"

using namespace vareffect;

namespace {

const char* kListingShaped =
    "#if VAR1 > 0 && VAR2 != 0\n"
    "int shared_code;\n"
    "#if VAR3 != 1\n"
    "int var3_code;\n"
    "#endif\n"
    "#ifndef VAR3\n"
    "#error VAR3 must be defined\n"
    "#endif\n"
    "#endif\n";

int countBlocks(const std::vector<CodeBlock>& blocks) {
    int n = 0;
    for (const CodeBlock& b : blocks) n += 1 + countBlocks(b.children);
    return n;
}

}  // namespace

TEST_CASE("scanBlocks extracts the nested structure of the reference shape") {
    BlockTree t = scanBlocks(kListingShaped, "listing.c");
    REQUIRE(t.blocks.size() == 1);
    const CodeBlock& top = t.blocks[0];
    CHECK(top.kind == DirectiveKind::If);
    CHECK(top.rawCondition == "VAR1 > 0 && VAR2 != 0");
    CHECK(top.effective.text() == "VAR1 > 0 && VAR2 != 0");
    CHECK(top.startLine == 1);
    CHECK(top.endLine == 9);
    CHECK_FALSE(top.errorOnly);

    REQUIRE(top.children.size() == 2);
    CHECK(top.children[0].kind == DirectiveKind::If);
    CHECK(top.children[0].effective.text() == "VAR3 != 1");
    CHECK(top.children[0].startLine == 3);
    CHECK(top.children[0].endLine == 5);
    CHECK_FALSE(top.children[0].errorOnly);

    CHECK(top.children[1].kind == DirectiveKind::Ifndef);
    CHECK(top.children[1].effective.text() == "!defined(VAR3)");
    CHECK(top.children[1].errorOnly);
}

TEST_CASE("scanBlocks on an empty file yields zero blocks") {
    BlockTree t = scanBlocks("", "empty.c");
    CHECK(t.blocks.empty());
    CHECK(t.degradedCount == 0);
}

TEST_CASE("elif and else branches get prior siblings negated") {
    BlockTree t = scanBlocks(
        "#ifdef A\n"
        "int a;\n"
        "#elif B\n"
        "int b;\n"
        "#else\n"
        "int c;\n"
        "#endif\n",
        "chain.c");
    REQUIRE(t.blocks.size() == 3);
    CHECK(t.blocks[0].effective.text() == "defined(A)");
    CHECK(t.blocks[1].effective.text() == "!defined(A) && B != 0");
    CHECK(t.blocks[2].effective.text() == "!defined(A) && !(B != 0)");
    CHECK(t.blocks[2].kind == DirectiveKind::Else);
    CHECK_FALSE(t.blocks[2].condition.has_value());

    CHECK(t.blocks[0].startLine == 1);
    CHECK(t.blocks[0].endLine == 2);
    CHECK(t.blocks[1].startLine == 3);
    CHECK(t.blocks[1].endLine == 4);
    CHECK(t.blocks[2].startLine == 5);
    CHECK(t.blocks[2].endLine == 7);
}

TEST_CASE("line continuations splice directives") {
    BlockTree t = scanBlocks(
        "#if A \\\n"
        "  && B\n"
        "int x;\n"
        "#endif\n",
        "splice.c");
    REQUIRE(t.blocks.size() == 1);
    CHECK(t.blocks[0].effective.text() == "A != 0 && B != 0");
    CHECK(t.blocks[0].startLine == 1);
    CHECK(t.blocks[0].endLine == 4);
}

TEST_CASE("comments spanning directives neutralize them") {
    BlockTree t = scanBlocks(
        "/*\n"
        "#if A\n"
        "*/\n"
        "int x;\n",
        "comment.c");
    CHECK(t.blocks.empty());
}

TEST_CASE("comments inside and after conditions are ignored") {
    BlockTree t = scanBlocks(
        "#if A /* note */ && B // tail\n"
        "int x;\n"
        "#endif /* close */\n",
        "inline_comment.c");
    REQUIRE(t.blocks.size() == 1);
    CHECK(t.blocks[0].effective.text() == "A != 0 && B != 0");
}

TEST_CASE("directive-looking text inside string literals is content") {
    BlockTree t = scanBlocks(
        "const char* s = \"/* not a comment\";\n"
        "#if A\n"
        "const char* u = \"#endif\";\n"
        "int x;\n"
        "#endif\n",
        "strings.c");
    REQUIRE(t.blocks.size() == 1);
    CHECK(t.blocks[0].startLine == 2);
    CHECK(t.blocks[0].endLine == 5);
}

TEST_CASE("unbalanced files are rejected with the offending line") {
    CHECK_THROWS_AS(scanBlocks("#if A\nint x;\n", "a.c"), UnbalancedDirectivesError);
    try {
        scanBlocks("int x;\n#if A\n#if B\nint y;\n#endif\n", "a.c");
        FAIL("expected UnbalancedDirectivesError");
    } catch (const UnbalancedDirectivesError& e) {
        CHECK(e.file == "a.c");
        CHECK(e.line == 2);  // innermost unclosed opener
    }
    CHECK_THROWS_AS(scanBlocks("#endif\n", "a.c"), UnbalancedDirectivesError);
    CHECK_THROWS_AS(scanBlocks("#else\n", "a.c"), UnbalancedDirectivesError);
    CHECK_THROWS_AS(scanBlocks("#if A\n#else\n#elif B\n#endif\n", "a.c"),
                    UnbalancedDirectivesError);
    CHECK_THROWS_AS(scanBlocks("#if A\n#else\n#else\n#endif\n", "a.c"),
                    UnbalancedDirectivesError);
}

TEST_CASE("errorOnly marks blocks holding nothing but #error") {
    SUBCASE("plain error block") {
        BlockTree t = scanBlocks("#if A\n#error nope\n#endif\n", "e.c");
        REQUIRE(t.blocks.size() == 1);
        CHECK(t.blocks[0].errorOnly);
    }
    SUBCASE("comments and blank lines do not count as content") {
        BlockTree t = scanBlocks("#if A\n/* why */\n\n#error nope // reason\n#endif\n", "e.c");
        REQUIRE(t.blocks.size() == 1);
        CHECK(t.blocks[0].errorOnly);
    }
    SUBCASE("real content defeats errorOnly") {
        BlockTree t = scanBlocks("#if A\n#error nope\nint x;\n#endif\n", "e.c");
        CHECK_FALSE(t.blocks[0].errorOnly);
    }
    SUBCASE("empty block is not errorOnly") {
        BlockTree t = scanBlocks("#if A\n#endif\n", "e.c");
        CHECK_FALSE(t.blocks[0].errorOnly);
    }
    SUBCASE("parent of only errorOnly children is errorOnly") {
        BlockTree t = scanBlocks(
            "#if A\n#ifndef B\n#error b\n#endif\n#ifndef C\n#error c\n#endif\n#endif\n", "e.c");
        REQUIRE(t.blocks.size() == 1);
        CHECK(t.blocks[0].errorOnly);
    }
    SUBCASE("a non-error child defeats the parent") {
        BlockTree t = scanBlocks("#if A\n#ifndef B\nint x;\n#endif\n#endif\n", "e.c");
        CHECK_FALSE(t.blocks[0].errorOnly);
        CHECK_FALSE(t.blocks[0].children[0].errorOnly);
    }
    SUBCASE("#define and #pragma are content") {
        BlockTree t = scanBlocks("#if A\n#error nope\n#define X 1\n#endif\n", "e.c");
        CHECK_FALSE(t.blocks[0].errorOnly);
    }
}

TEST_CASE("stripConsistencyChecks removes error-only blocks everywhere") {
    BlockTree t = scanBlocks(kListingShaped, "listing.c");
    BlockTree s = stripConsistencyChecks(t);
    REQUIRE(s.blocks.size() == 1);
    REQUIRE(s.blocks[0].children.size() == 1);
    CHECK(s.blocks[0].children[0].effective.text() == "VAR3 != 1");

    SUBCASE("idempotent") {
        BlockTree s2 = stripConsistencyChecks(s);
        CHECK(blockTreeJsonText(s2) == blockTreeJsonText(s));
    }
    SUBCASE("no error blocks means identical tree") {
        BlockTree u = scanBlocks("#if A\nint x;\n#endif\n", "u.c");
        CHECK(blockTreeJsonText(stripConsistencyChecks(u)) == blockTreeJsonText(u));
    }
    SUBCASE("top-level error blocks are removed too") {
        BlockTree u = scanBlocks("#ifndef A\n#error a\n#endif\nint x;\n", "u.c");
        CHECK(stripConsistencyChecks(u).blocks.empty());
    }
}

TEST_CASE("blockPresenceConditions conjoins ancestor branch conditions") {
    BlockTree t = scanBlocks(kListingShaped, "listing.c");

    SUBCASE("after stripping, the inner numeric block keeps the full path") {
        BlockTree s = stripConsistencyChecks(t);
        auto pcs = blockPresenceConditions(s);
        REQUIRE(pcs.size() == 3);
        CHECK(pcs[0].first == nullptr);
        CHECK(pcs[0].second.text() == "true");
        CHECK(pcs[1].second.text() == "VAR1 > 0 && VAR2 != 0");
        CHECK(pcs[2].second.text() == "VAR1 > 0 && VAR2 != 0 && VAR3 != 1");
    }
    SUBCASE("before stripping, the ifndef branch shows definedness") {
        auto pcs = blockPresenceConditions(t);
        REQUIRE(pcs.size() == 4);
        CHECK(pcs[3].second.text() == "VAR1 > 0 && VAR2 != 0 && !defined(VAR3)");
    }
    SUBCASE("single unnested ifdef") {
        BlockTree u = scanBlocks("#ifdef A\nint x;\n#endif\n", "u.c");
        auto pcs = blockPresenceConditions(u);
        REQUIRE(pcs.size() == 2);
        CHECK(pcs[1].second.text() == "defined(A)");
    }
}

TEST_CASE("unparsable conditions degrade to opaque variables") {
    OpaqueNamer namer("weird.c");
    std::string expected = OpaqueNamer("weird.c").fresh();
    BlockTree t = scanBlocks("#if )(\nint x;\n#endif\n#if NORMAL\n#endif\n", "weird.c", namer);
    REQUIRE(t.blocks.size() == 2);
    CHECK(t.blocks[0].degraded);
    CHECK(t.blocks[0].rawCondition == ")(");
    CHECK(t.blocks[0].effective.text() == expected);
    CHECK(t.degradedCount == 1);
    CHECK_FALSE(t.blocks[1].degraded);
}

TEST_CASE("top-level #error and unknown directives do not create blocks") {
    BlockTree t = scanBlocks("#error at top\n#pragma once\n#include <x.h>\nint x;\n", "misc.c");
    CHECK(t.blocks.empty());
}

TEST_CASE("scanner round-trips generated files against ground truth") {
    std::mt19937 rng(7301);
    corpusgen::Generator gen(rng, corpusgen::makeFeatureNames(12));
    for (int i = 0; i < 50; i++) {
        corpusgen::GenFile f = gen.generate(5 + i % 20, i % 2 == 0);
        BlockTree t = scanBlocks(f.text, "gen.c");
        CHECK(countBlocks(t.blocks) == f.blockCount);
    }
}
