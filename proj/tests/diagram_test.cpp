#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "idiomgen/diagram.hpp"
#include "support.hpp"

using namespace idiomgen;
using namespace testing_support;

TEST(Validate, EmptyDiagramIsValid) { EXPECT_TRUE(validate(Diagram{}).ok()); }

TEST(Validate, RunningExampleIsValid) {
  auto d = running_example();
  EXPECT_TRUE(validate(d).ok()) << validate(d).str();
  EXPECT_TRUE(d.is_abstract_implementation());
  EXPECT_TRUE(d.derived_effectful());
}

TEST(Validate, EffectOrderAgainstDataFlowIsCombinedCycle) {
  Diagram d;
  d.boxes = {{"x", sig("a", {}, {"Int"}, true)}, {"y", sig("b", {"Int"}, {}, true)}};
  d.wires = {wire("x", 0, "y", 0)};
  d.effect_order = {"y", "x"};
  auto r = validate(d);
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(r.mentions("combined cycle"));
  EXPECT_NE(r.str().find("combined cycle x,y"), std::string::npos) << r.str();
}

TEST(Validate, TypeMismatchIsReported) {
  auto d = running_example();
  d.boxes[1].sig.inputs = {"[Int]"};
  EXPECT_TRUE(validate(d).mentions("type mismatch"));
}

TEST(Validate, DataCycleIsReported) {
  Diagram d;
  d.boxes = {{"a", sig("f", {"Int"}, {"Int"})}, {"b", sig("f", {"Int"}, {"Int"})}};
  d.wires = {wire("a", 0, "b", 0), wire("b", 0, "a", 0)};
  EXPECT_TRUE(validate(d).mentions("data cycle"));
}

TEST(Validate, UnfedInputAndDoubleFedInputAreReported) {
  auto d = running_example();
  d.wires.erase(d.wires.begin());
  EXPECT_FALSE(validate(d).ok());
  d = running_example();
  d.wires.push_back(wire("n", 0, "xs", 0));
  EXPECT_FALSE(validate(d).ok());
}

TEST(Validate, EffectOrderMustListExactlyEffectfulBoxes) {
  auto d = running_example();
  d.effect_order = {"n", "xs"};
  EXPECT_FALSE(validate(d).ok());
  d.effect_order = {"n", "xs", "p", "r"};
  EXPECT_FALSE(validate(d).ok());
  d.effect_order = {"n", "n", "xs", "p"};
  EXPECT_FALSE(validate(d).ok());
}

TEST(Validate, FanOutIsPermitted) {
  Diagram d;
  d.boxes = {{"x", sig("read", {}, {"Int"}, true)},
             {"p", sig("print", {"Int"}, {}, true)},
             {"q", sig("print", {"Int"}, {}, true)}};
  d.wires = {wire("x", 0, "p", 0), wire("x", 0, "q", 0)};
  d.effect_order = {"x", "p", "q"};
  EXPECT_TRUE(validate(d).ok()) << validate(d).str();
}

TEST(Reach, DataReach) {
  auto d = running_example();
  EXPECT_TRUE(data_reach(d, "n", "p"));
  EXPECT_TRUE(data_reach(d, "r", "r"));
  EXPECT_FALSE(data_reach(d, "p", "n"));
  EXPECT_THROW(data_reach(d, "n", "nope"), Error);
}

TEST(Reach, EffectReach) {
  auto d = running_example();
  EXPECT_TRUE(effect_reach(d, "n", "xs"));
  EXPECT_TRUE(effect_reach(d, "p", "p"));
  EXPECT_FALSE(effect_reach(d, "p", "n"));
  EXPECT_THROW(effect_reach(d, "r", "p"), Error);
}

TEST(Linearize, RunningExampleHasTheForcedOrder) {
  auto orders = linearizations(running_example());
  ASSERT_EQ(orders.size(), 1u);
  EXPECT_EQ(orders[0], (std::vector<std::string>{"n", "xs", "r", "p"}));
}

TEST(Linearize, SingleBox) {
  Diagram d;
  d.boxes = {{"a", sig("k", {}, {"Int"})}};
  EXPECT_EQ(linearizations(d).size(), 1u);
}

TEST(Linearize, ParallelBoxesGiveBothOrders) {
  Diagram d;
  d.boxes = {{"b", sig("k", {}, {"Int"})}, {"a", sig("k", {}, {"Int"})}};
  auto orders = linearizations(d);
  ASSERT_EQ(orders.size(), 2u);
  EXPECT_EQ(orders[0], (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(orders[1], (std::vector<std::string>{"b", "a"}));
  EXPECT_EQ(canonical_linearization(d), orders[0]);
}

// Brute force over permutations against the enumerator.
TEST(LinearizeProperty, MatchesPermutationFilter) {
  Rng rng(11);
  for (int iter = 0; iter < 60; ++iter) {
    auto d = random_diagram(rng, 1 + pick(rng, 6));
    std::vector<std::string> ids;
    for (const auto& b : d.boxes) ids.push_back(b.id);
    std::sort(ids.begin(), ids.end());
    std::set<std::vector<std::string>> expected;
    do {
      bool ok = true;
      for (std::size_t i = 0; i < ids.size() && ok; ++i)
        for (std::size_t j = i + 1; j < ids.size() && ok; ++j) {
          const auto &x = ids[j], &y = ids[i];  // x placed after y
          bool x_before_y = data_reach(d, x, y) ||
                            (d.find(x)->sig.effectful && d.find(y)->sig.effectful && effect_reach(d, x, y));
          ok = !x_before_y;
        }
      if (ok) expected.insert(ids);
    } while (std::next_permutation(ids.begin(), ids.end()));
    auto got = linearizations(d);
    EXPECT_TRUE(std::is_sorted(got.begin(), got.end()));
    EXPECT_EQ(std::set<std::vector<std::string>>(got.begin(), got.end()), expected);
  }
}

TEST(ValidateProperty, BackEdgeIsRejected) {
  Rng rng(12);
  int tried = 0;
  for (int iter = 0; iter < 200; ++iter) {
    auto d = random_diagram(rng, 2 + pick(rng, 7));
    ASSERT_TRUE(validate(d).ok()) << validate(d).str();
    // Find an internal wire x -> y and add a box-to-box edge y -> x by
    // rerouting some input of x that y can feed with the same type.
    std::vector<std::pair<std::string, std::string>> reach;
    for (const auto& a : d.boxes)
      for (const auto& b : d.boxes)
        if (a.id != b.id && data_reach(d, a.id, b.id)) reach.emplace_back(a.id, b.id);
    bool done = false;
    for (const auto& [x, y] : reach) {
      const Box* bx = d.find(x);
      const Box* by = d.find(y);
      for (std::size_t in = 0; in < bx->sig.inputs.size() && !done; ++in)
        for (std::size_t out = 0; out < by->sig.outputs.size() && !done; ++out)
          if (by->sig.outputs[out] == bx->sig.inputs[in]) {
            auto mutated = d;
            for (auto& w : mutated.wires)
              if (w.target == Port{x, in}) w.source = {y, out};
            EXPECT_FALSE(validate(mutated).ok());
            done = true;
          }
      if (done) break;
    }
    tried += done;
  }
  EXPECT_GT(tried, 20);
}

TEST(ValidateProperty, RetypedWireIsRejected) {
  Rng rng(13);
  for (int iter = 0; iter < 100; ++iter) {
    auto d = random_diagram(rng, 1 + pick(rng, 7));
    if (d.wires.empty()) continue;
    auto& w = d.wires[pick(rng, d.wires.size())];
    if (w.target.on_boundary()) {
      auto& t = d.boundary.outputs[w.target.index];
      t = t == "A" ? "B" : "A";
    } else {
      for (auto& b : d.boxes)
        if (b.id == w.target.box) {
          auto& t = b.sig.inputs[w.target.index];
          t = t == "A" ? "B" : "A";
        }
    }
    EXPECT_TRUE(validate(d).mentions("type mismatch"));
  }
}

TEST(ReachProperty, DataReachIsAPreorder) {
  Rng rng(14);
  for (int iter = 0; iter < 40; ++iter) {
    auto d = random_diagram(rng, 1 + pick(rng, 8));
    for (const auto& a : d.boxes) {
      EXPECT_TRUE(data_reach(d, a.id, a.id));
      for (const auto& b : d.boxes)
        for (const auto& c : d.boxes) {
          if (data_reach(d, a.id, b.id) && data_reach(d, b.id, c.id)) {
            EXPECT_TRUE(data_reach(d, a.id, c.id));
          }
        }
    }
  }
}
