#include <gtest/gtest.h>

#include "goldens.hpp"
#include "idiomgen/enumerate.hpp"
#include "idiomgen/kinds.hpp"
#include "idiomgen/program/eval.hpp"
#include "support.hpp"

using namespace idiomgen;
using namespace testing_support;

namespace {

const Workspace& msum_ws() {
  static const Workspace ws = load({"msum_intent"});
  return ws;
}
const Workspace& sum_ws() {
  static const Workspace ws = load({"sum_intent"});
  return ws;
}

ConcreteIdiom idiom(std::string label, std::vector<std::string> inputs, std::string emits,
                    std::vector<OutputTemplate> outputs, std::vector<std::string> bind = {},
                    std::vector<std::string> fresh = {}) {
  return {std::move(label), std::move(inputs), std::move(fresh), std::move(bind), std::move(emits), std::move(outputs)};
}

IdiomLibrary one_per_label() {
  IdiomLibrary lib{"tiny", ArtifactKind::program, {}};
  lib.entries["read"] = {idiom("read", {}, "{v} <- readLn", {{"{v}", {}}}, {"v"})};
  lib.entries["read-list"] = {idiom("read-list", {"n"}, "{xs} <- replicateM {n} readLn", {{"{xs}", {}}}, {"xs"})};
  lib.entries["sum"] = {idiom("sum", {"xs"}, "", {{"sum {xs}", {}}})};
  lib.entries["print"] = {idiom("print", {"v"}, "print {v}", {})};
  return lib;
}

std::string render(const Diagram& d, const IdiomLibrary& lib, const Choice& c) {
  return instantiate_text(d, lib, c, canonical_linearization(d));
}

}  // namespace

TEST(Instantiate, ExplicitLoopGolden) {
  const auto& ws = msum_ws();
  auto text = render(ws.diagrams.at("msum"), *ws.library("default", ArtifactKind::program), kExplicitLoopChoice);
  EXPECT_EQ(strip_trailing_whitespace(text), strip_trailing_whitespace(kExplicitLoopProgram));
}

TEST(Instantiate, ReplicateGolden) {
  const auto& ws = msum_ws();
  auto text = render(ws.diagrams.at("msum"), *ws.library("default", ArtifactKind::program), kReplicateChoice);
  EXPECT_EQ(strip_trailing_whitespace(text), strip_trailing_whitespace(kReplicateProgram));
}

TEST(Instantiate, SilentOnlyIdiomGivesIdentity) {
  Diagram d;
  d.boundary = sig("k", {}, {"Int"});
  d.boxes = {{"k", sig("const", {}, {"Int"})}};
  d.wires = {wire("k", 0, "", 0)};
  IdiomLibrary lib{"c", ArtifactKind::program, {{"const", {idiom("const", {}, "", {{"42", {}}})}}}};
  auto inst = instantiate<ProgramKind>(d, lib, {}, {"k"});
  EXPECT_TRUE(inst.fragment.empty());
  ASSERT_EQ(inst.outputs.size(), 1u);
  EXPECT_EQ(inst.outputs[0].text, "42");
  EXPECT_EQ(ProgramKind::render(inst.fragment), "main = do\n  pure ()");
}

TEST(Instantiate, BoundaryInputsFeedTheTemplate) {
  Diagram d;
  d.boundary = sig("p", {"Int"}, {}, true);
  d.boxes = {{"p", sig("print", {"Int"}, {}, true)}};
  d.wires = {wire("", 0, "p", 0)};
  d.effect_order = {"p"};
  auto inst = instantiate<ProgramKind>(d, one_per_label(), {}, {"p"}, {Value{"a + b", {}}});
  EXPECT_EQ(ProgramKind::render(inst.fragment), "main = do\n  print $ a+b");
}

TEST(Instantiate, OneIdiomPerLabelNoRulesGivesOneArtifact) {
  auto e = enumerate_artifacts(running_example(), RuleSet{}, one_per_label());
  ASSERT_EQ(e.artifacts.size(), 1u);
  EXPECT_EQ(e.artifacts[0].text, "main = do\n  n <- readLn\n  xs <- replicateM n readLn\n  print $ sum xs");
}

TEST(Instantiate, PartialValueIsCompletedByTheConsumer) {
  // f produces a partial "{?a} * 2"; g applies it to its own fresh name.
  Diagram d;
  d.boxes = {{"f", sig("f", {}, {"Int->Int"})}, {"g", sig("g", {"Int->Int"}, {}, true)}};
  d.wires = {wire("f", 0, "g", 0)};
  d.effect_order = {"g"};
  IdiomLibrary lib{"p", ArtifactKind::program, {}};
  lib.entries["f"] = {idiom("f", {}, "", {{"{?a} * 2", {"a"}}})};
  lib.entries["g"] = {idiom("g", {"h"}, "{x} <- readLn\nprint {h(x)}", {}, {}, {"x"})};
  EXPECT_EQ(render(d, lib, {}), "main = do\n  x <- readLn\n  print $ x*2");
}

TEST(Instantiate, Errors) {
  auto lib = one_per_label();
  auto order = canonical_linearization(running_example());
  auto missing = lib;
  missing.entries.erase("sum");
  EXPECT_THROW(instantiate_text(running_example(), missing, {}, order), InstantiationError);
  EXPECT_THROW(instantiate_text(running_example(), lib, {{"r", 3}}, order), InstantiationError);
  EXPECT_THROW(instantiate_text(running_example(), lib, {}, {"p", "r", "xs", "n"}), InstantiationError);

  // a partial output used where a complete value is required
  auto partial = lib;
  partial.entries["sum"] = {idiom("sum", {"xs"}, "", {{"{?k} + sum {xs}", {"k"}}})};
  EXPECT_THROW(instantiate_text(running_example(), partial, {}, order), InstantiationError);

  // a partial value leaving through the diagram boundary
  Diagram d;
  d.boundary = sig("f", {}, {"Int->Int"});
  d.boxes = {{"f", sig("f", {}, {"Int->Int"})}};
  d.wires = {wire("f", 0, "", 0)};
  IdiomLibrary plib{"p", ArtifactKind::program, {{"f", {idiom("f", {}, "", {{"{?a} * 2", {"a"}}})}}}};
  EXPECT_THROW(instantiate<ProgramKind>(d, plib, {}, {"f"}), InstantiationError);
}

TEST(Instantiate, CheckIdiomFindsSignatureProblems) {
  auto s = sig("read-list", {"Int"}, {"[Int]"}, true);
  EXPECT_TRUE(check_idiom(idiom("read-list", {"n"}, "{xs} <- replicateM {n} readLn", {{"{xs}", {}}}, {"xs"}), s).empty());
  EXPECT_FALSE(check_idiom(idiom("read-list", {}, "", {{"{xs}", {}}}, {"xs"}), s).empty());
  EXPECT_FALSE(check_idiom(idiom("read-list", {"n"}, "{zz} <- readLn", {{"{zz}", {}}}), s).empty());
  EXPECT_FALSE(check_idiom(idiom("read-list", {"n"}, "", {{"{?h} {n}", {}}}), s).empty());
}

TEST(NameSupplyTest, IssuesSuffixedNames) {
  NameSupply names;
  EXPECT_EQ(names.fresh("x"), "x");
  EXPECT_EQ(names.fresh("x"), "x1");
  names.reserve("x2");
  EXPECT_EQ(names.fresh("x"), "x3");
  EXPECT_EQ(names.fresh(""), "v");
  EXPECT_EQ(name_base("r_fold"), "r");
  EXPECT_EQ(name_base("Xs"), "xs");
  EXPECT_EQ(name_base("_a"), "v");
}

TEST(Templates, BracesEscape) {
  Diagram d;
  d.boxes = {{"n", sig("read", {}, {"Int"}, true)}, {"p", sig("print", {"Int"}, {}, true)}};
  d.wires = {wire("n", 0, "p", 0)};
  d.effect_order = {"n", "p"};
  IdiomLibrary lib{"s", ArtifactKind::spec, {}};
  lib.entries["read"] = {idiom("read", {}, "[?{v}:Int]", {{"{v}_C", {}}}, {"v"})};
  lib.entries["print"] = {idiom("print", {"v"}, "({{{v} = 0}} E /\\ [!{v}])^L", {})};
  EXPECT_EQ(render(d, lib, {}), "[?n:Int] ({n_C = 0} E /\\ [!n_C])^L");
}

TEST(EnumerateTest, ChoiceCountWithoutRulesIsTheProduct) {
  const auto& ws = sum_ws();
  auto e = enumerate_artifacts(ws.diagrams.at("sum"), RuleSet{}, *ws.library("default", ArtifactKind::program));
  EXPECT_EQ(e.artifacts.size(), 4u);  // read-list 2 x sum 2
}

TEST(EnumerateTest, LimitAndRandomMode) {
  const auto& ws = sum_ws();
  const auto& impl = ws.diagrams.at("sum");
  const auto& rules = ws.rule_sets.at("sum");
  const auto& lib = *ws.library("default", ArtifactKind::program);
  GenerationOptions o;
  o.limit = 0;
  EXPECT_TRUE(enumerate_artifacts(impl, rules, lib, o).artifacts.empty());
  o.limit = 3;
  EXPECT_EQ(enumerate_artifacts(impl, rules, lib, o).artifacts.size(), 3u);

  auto all = enumerate_artifacts(impl, rules, lib);
  std::set<std::string> texts;
  for (const auto& a : all.artifacts) texts.insert(a.text);
  GenerationOptions r;
  r.mode = Random{5};
  r.draws = 50;
  auto a = enumerate_artifacts(impl, rules, lib, r);
  auto b = enumerate_artifacts(impl, rules, lib, r);
  ASSERT_EQ(a.artifacts.size(), b.artifacts.size());
  for (std::size_t i = 0; i < a.artifacts.size(); ++i) {
    EXPECT_EQ(a.artifacts[i].text, b.artifacts[i].text);
    EXPECT_TRUE(texts.count(a.artifacts[i].text));
  }
}

TEST(EnumerateTest, UncoveredBaseIsAnError) {
  const auto& ws = sum_ws();
  auto lib = *ws.library("default", ArtifactKind::program);
  lib.entries.erase("print");
  EXPECT_THROW(enumerate_artifacts(ws.diagrams.at("sum"), ws.rule_sets.at("sum"), lib), InstantiationError);
}

TEST(InstantiateProperty, HoleClosureAndScopeHygiene) {
  for (const auto& [ws, name] : {std::pair{&sum_ws(), "sum"}, std::pair{&msum_ws(), "msum"}}) {
    GenerationOptions o;
    o.all_orders = true;
    auto e = enumerate_artifacts(ws->diagrams.at(name), ws->rule_sets.at(name),
                                 *ws->library("default", ArtifactKind::program), o);
    EXPECT_GT(e.artifacts.size(), 0u);
    for (const auto& a : e.artifacts) {
      EXPECT_EQ(a.text.find("{?"), std::string::npos) << a.text;
      EXPECT_TRUE(program::check_scopes(program::parse_program(a.text)).empty()) << a.text;
    }
  }
}

TEST(InstantiateProperty, OrdersDoNotChangeMeaning) {
  const auto& ws = msum_ws();
  GenerationOptions o;
  o.all_orders = true;
  auto e = enumerate_artifacts(ws.diagrams.at("msum"), ws.rule_sets.at("msum"),
                               *ws.library("default", ArtifactKind::program), o);
  EXPECT_GT(e.artifacts.size(), 20u);
  Rng rng(3);
  for (int k = 0; k < 30; ++k) {
    std::vector<long long> in{pick_between(rng, 0, 5), pick_between(rng, -3, 3)};
    for (long long i = 0; i < in[0]; ++i) in.push_back(pick_between(rng, -3, 3));
    auto expected = program::run_program(program::parse_program(e.artifacts[0].text), in);
    for (const auto& a : e.artifacts) EXPECT_EQ(program::run_program(program::parse_program(a.text), in), expected);
  }
}

TEST(MonoidLaws, EveryKind) {
  Rng rng(4);
  const std::vector<std::string> stmts{"x <- readLn", "print x", "let y = x + 1", "xs <- replicateM 2 readLn",
                                       "print $ sum xs"};
  const std::vector<std::string> specs{"[?n:Int]", "[!n_C]", "({len(x_A) = n_C} E /\\ [?x:Int])^L", "[!sum(x_A)]", ""};
  const std::vector<std::string> prose{"read a number", "print it", "", "add them up"};
  for (int k = 0; k < 50; ++k) {
    auto p = [&] { return ProgramKind::parse(stmts[pick(rng, stmts.size())]); };
    auto a = p(), b = p(), c = p();
    auto pr = [](const ProgramKind::Fragment& f) { return ProgramKind::render(f); };
    EXPECT_EQ(pr(ProgramKind::combine(ProgramKind::identity(), a)), pr(a));
    EXPECT_EQ(pr(ProgramKind::combine(a, ProgramKind::identity())), pr(a));
    EXPECT_EQ(pr(ProgramKind::combine(ProgramKind::combine(a, b), c)), pr(ProgramKind::combine(a, ProgramKind::combine(b, c))));

    auto s = [&] { return SpecKind::parse(specs[pick(rng, specs.size())]); };
    auto x = s(), y = s(), z = s();
    EXPECT_EQ(SpecKind::render(SpecKind::combine(SpecKind::identity(), x)), SpecKind::render(x));
    EXPECT_EQ(SpecKind::render(SpecKind::combine(x, SpecKind::identity())), SpecKind::render(x));
    EXPECT_EQ(SpecKind::render(SpecKind::combine(SpecKind::combine(x, y), z)),
              SpecKind::render(SpecKind::combine(x, SpecKind::combine(y, z))));

    auto q = [&] { return ProseKind::parse(prose[pick(rng, prose.size())]); };
    auto u = q(), v = q(), w = q();
    EXPECT_EQ(ProseKind::combine(ProseKind::identity(), u), u);
    EXPECT_EQ(ProseKind::combine(u, ProseKind::identity()), u);
    EXPECT_EQ(ProseKind::combine(ProseKind::combine(u, v), w), ProseKind::combine(u, ProseKind::combine(v, w)));
  }
}
