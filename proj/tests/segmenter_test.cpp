#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "codesum/error.hpp"
#include "codesum/segmenter.hpp"

using namespace codesum;

namespace {

std::vector<std::string> texts(const SegmentedSnippet& s) {
  std::vector<std::string> out;
  for (const auto& st : s.statements) out.push_back(st.text);
  return out;
}

}  // namespace

TEST(Segment, JavaSplitsOnSemicolonsAndBraces) {
  const auto s = segment("int add(int a, int b) {\n  int c = a + b; return c;\n}\n", Language::kJava);
  EXPECT_EQ(texts(s), (std::vector<std::string>{"int add(int a, int b) {", "int c = a + b;", "return c;", "}"}));
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(s.statements[i].position, i);
}

TEST(Segment, JavaIgnoresDelimitersInLiteralsCommentsAndParens) {
  const auto s = segment(
      "for (int i = 0; i < n; i++) {\n"
      "  s += \"a;b{\"; // tail; comment {\n"
      "  c = ';'; /* x; } */\n"
      "}\n",
      Language::kJava);
  EXPECT_EQ(texts(s), (std::vector<std::string>{"for (int i = 0; i < n; i++) {", "s += \"a;b{\";",
                                                "// tail; comment {\n  c = ';';", "/* x; } */\n}"}));
}

TEST(Segment, PythonJoinsLogicalLines) {
  const auto s = segment(
      "def f(a,\n      b):\n    x = [1,\n         2]\n    y = a + \\\n        b\n    s = \"\"\"doc\nmore\"\"\"\n"
      "    return x\n",
      Language::kPython);
  ASSERT_EQ(s.size(), 5u);
  EXPECT_EQ(s.statements[0].tokens, (TokenSequence{"def", "f", "(", "a", ",", "b", ")", ":"}));
  EXPECT_EQ(s.statements[4].text, "return x");
}

TEST(Segment, GenericUsesPhysicalLines) {
  const auto s = segment("a b\n\n  c\n", Language::kGeneric);
  EXPECT_EQ(texts(s), (std::vector<std::string>{"a b", "c"}));
  EXPECT_EQ(s.full_tokens, (TokenSequence{"a", "b", "c"}));
}

TEST(Segment, EmptySnippetThrows) {
  EXPECT_THROW(segment("   \n\t", Language::kJava), EmptySnippet);
  EXPECT_THROW(segment("", Language::kPython), EmptySnippet);
  EXPECT_THROW(parse_language("cobol"), UsageError);
  EXPECT_EQ(parse_language("java"), Language::kJava);
}

// Property over random java-ish text: statement count is bounded by
// lines + ';' + '{' + '}' (java also splits at braces), statements are
// non-empty, and positions are 0..n-1.
TEST(Segment, JavaCountBoundProperty) {
  std::mt19937_64 rng(11);
  const std::string alphabet = "ab ;{}()\n=\"'x/*";
  std::uniform_int_distribution<std::size_t> len(1, 60), pick(0, alphabet.size() - 1);
  for (int trial = 0; trial < 500; ++trial) {
    std::string code(len(rng), ' ');
    for (auto& c : code) c = alphabet[pick(rng)];
    SegmentedSnippet s;
    try {
      s = segment(code, Language::kJava);
    } catch (const EmptySnippet&) {
      continue;
    }
    const auto bound = static_cast<std::size_t>(std::count(code.begin(), code.end(), '\n') + 1 +
                                                std::count(code.begin(), code.end(), ';') +
                                                std::count(code.begin(), code.end(), '{') +
                                                std::count(code.begin(), code.end(), '}'));
    EXPECT_LE(s.size(), bound) << code;
    for (std::size_t i = 0; i < s.size(); ++i) {
      EXPECT_FALSE(s.statements[i].text.empty());
      EXPECT_EQ(s.statements[i].position, i);
    }
  }
}
