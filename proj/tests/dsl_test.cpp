#include <gtest/gtest.h>

#include "idiomgen/dsl.hpp"
#include "idiomgen/isomorphism.hpp"
#include "support.hpp"

using namespace idiomgen;
using namespace testing_support;

namespace {

const char* kHeader = R"(
type Int, [Int];
idiom read : () -> (Int) effect;
idiom print : (Int) -> () effect;
idiom read-list : (Int) -> ([Int]) effect;
)";

}  // namespace

TEST(Dsl, RunningExampleWorkspace) {
  auto ws = load({"sum_intent"});
  EXPECT_EQ(ws.diagrams.size(), 1u);
  EXPECT_EQ(ws.rule_sets.size(), 1u);
  EXPECT_EQ(ws.libraries.size(), 3u);
  const auto& d = ws.diagrams.at("sum");
  EXPECT_TRUE(validate(d).ok());
  EXPECT_TRUE(isomorphic(d, running_example()));
  EXPECT_EQ(ws.rule_sets.at("sum").alternatives.size(), 2u);
  EXPECT_EQ(ws.rule_sets.at("sum").merge_rules.size(), 2u);
  EXPECT_EQ(ws.library("default", ArtifactKind::program)->entries.at("read-list").size(), 2u);
}

TEST(Dsl, EmptyInputGivesEmptyWorkspace) {
  EXPECT_EQ(parse_workspace({}), Workspace{});
  Workspace ws;
  parse_workspace_text(ws, "  // nothing\n");
  EXPECT_EQ(ws, Workspace{});
}

TEST(Dsl, TypeMismatchCarriesLocation) {
  Workspace ws;
  std::string text = std::string(kHeader) + "impl bad {\n  box n = read;\n  box xs = read-list;\n  box p = print;\n"
                                            "  wire n.out0 -> xs.in0;\n  wire xs.out0 -> p.in0;\n}\n";
  try {
    parse_workspace_text(ws, text, "bad.idioms");
    FAIL() << "no error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.file(), "bad.idioms");
    EXPECT_EQ(e.line(), 11);
    EXPECT_NE(std::string(e.what()).find("type mismatch"), std::string::npos) << e.what();
  }
}

TEST(Dsl, Errors) {
  auto fails = [](const std::string& body) {
    Workspace ws;
    EXPECT_THROW(parse_workspace_text(ws, std::string(kHeader) + body), ParseError) << body;
  };
  fails("idiom read : () -> (Int);");
  fails("idiom f : (Real) -> ();");
  fails("impl x { box a = nope; }");
  fails("impl x { box a = read; box a = read; }");
  fails("impl x { box a = read; wire a.out3 -> out0; }");
  fails("library default;\nconcrete program read #1 { bind v; emits \"{v} <- readLn\"; silent \"{v}\"; }");
  fails("library default;\nconcrete program read #0 { emits \"unterminated; }");
  fails("grammar g { rule read { } }");
}

TEST(Dsl, FailedParseLeavesWorkspaceUntouched) {
  Workspace ws;
  parse_workspace_text(ws, kHeader);
  auto before = ws;
  EXPECT_THROW(parse_workspace_text(ws, "idiom ok : () -> (Int);\nimpl x { box a = nope; }"), ParseError);
  EXPECT_EQ(ws, before);
}

TEST(Dsl, MissingFileIsAnError) { EXPECT_THROW(parse_workspace({workspace_dir("no-such.idioms")}), ParseError); }

TEST(DslProperty, RenderParseRoundTrip) {
  for (const auto& name : {"sum_intent", "msum_intent", "list_grammar"}) {
    auto ws = load({name});
    Workspace back;
    parse_workspace_text(back, render_workspace(ws), "rendered");
    EXPECT_EQ(back, ws) << name;
    EXPECT_EQ(render_workspace(back), render_workspace(ws));
  }
}
