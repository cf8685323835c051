// Schema learning pipeline: generalization, abstraction, feature
// extraction, tokenization and the full learner on the stacking world.
#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "ebpd/core.hpp"
#include "ebpd/domains.hpp"
#include "ebpd/learner.hpp"
#include "ebpd/scope.hpp"
#include "oracles.hpp"

using namespace ebpd;

namespace {

Atom atom(std::string pred, std::vector<Term> args) {
  return Atom{std::move(pred), std::move(args)};
}

std::string letters(const std::vector<int>& tokens) {
  std::map<int, char> seen;
  std::string out;
  for (int t : tokens) {
    auto [it, fresh] = seen.emplace(t, static_cast<char>('a' + seen.size()));
    out += it->second;
  }
  return out;
}

}  // namespace

TEST_CASE("generalization numbers variables by first occurrence") {
  Experience e;
  e.name = "toy";
  e.task = atom("deliver", {"cup", "kitchen"});
  e.objects = {"cup", "kitchen", "bar", "spoon"};
  e.keys = {KeyProperty{Tau::Static, atom("vessel", {"cup"})},
            KeyProperty{Tau::Init, atom("at", {"cup", "bar"})},
            KeyProperty{Tau::End, atom("at", {"cup", "kitchen"})}};
  e.plan = {atom("grasp", {"cup", "bar"}), atom("carry", {"cup", "bar", "kitchen"})};

  auto g = learner::generalize(e);
  // plan first: cup, bar; then task: kitchen; then keys add nothing new;
  // then remaining objects: spoon
  CHECK(g.substitution.at("cup") == "?v1");
  CHECK(g.substitution.at("bar") == "?v2");
  CHECK(g.substitution.at("kitchen") == "?v3");
  CHECK(g.substitution.at("spoon") == "?v4");

  CHECK(g.experience.plan[0] == atom("grasp", {"?v1", "?v2"}));
  CHECK(g.experience.plan[1] == atom("carry", {"?v1", "?v2", "?v3"}));
  CHECK(g.experience.task == atom("deliver", {"?v1", "?v3"}));
  CHECK(g.experience.keys[1].atom == atom("at", {"?v1", "?v2"}));
  CHECK(g.experience.objects == std::vector<Term>{"?v1", "?v3", "?v2", "?v4"});

  // injective by construction
  std::set<Term> images;
  for (const auto& [c, v] : g.substitution) images.insert(v);
  CHECK(images.size() == g.substitution.size());

  // substituting back recovers the original plan
  std::map<Term, Term> inverse;
  for (const auto& [c, v] : g.substitution) inverse[v] = c;
  for (std::size_t i = 0; i < e.plan.size(); ++i)
    CHECK(substitute(g.experience.plan[i], inverse) == e.plan[i]);
}

TEST_CASE("abstraction maps operators and drops the nil-mapped ones") {
  auto h = domains::stacking_hierarchy();
  auto e = domains::gen_experience(1, 4, 4);
  REQUIRE(e.plan.size() == 31);  // 8 blocks: pick+move+stack each, minus one move

  auto abs = learner::abstract_experience(e, h);
  CHECK(abs.plan.size() == 16);  // moves fall away, pick/stack remain
  for (const auto& a : abs.plan) {
    CHECK(a.pred != "move");
    CHECK((a.pred == "pick" || a.pred == "stack"));
    CHECK(a.args.size() == (a.pred == "pick" ? 2 : 3));
  }
  // hoist bookkeeping drops from the keys as well
  for (const auto& k : abs.keys) {
    CHECK(k.atom.pred != "at");
    CHECK(k.atom.pred != "empty");
    CHECK(k.atom.pred != "belong");
  }
  CHECK(e.keys.size() == 46);
  CHECK(abs.keys.size() == 37);
}

TEST_CASE("feature extraction matches the brute-force scan") {
  auto h = domains::stacking_hierarchy();
  for (int cls = 1; cls <= 4; ++cls) {
    auto e = domains::gen_experience(cls, 3, 3);
    auto abs = learner::abstract_experience(learner::generalize(e).experience, h);
    auto fast = learner::extract_features(abs);
    auto slow = oracle::features_brute(abs);
    REQUIRE(fast.size() == slow.size());
    for (std::size_t i = 0; i < fast.size(); ++i) {
      CHECK(fast[i].head == slow[i].head);
      CHECK_MESSAGE(fast[i].features == slow[i].features, "class ", cls, " action ", i);
    }
  }
}

TEST_CASE("features tie actions to the task through shared variables") {
  auto h = domains::stacking_hierarchy();
  auto e = domains::gen_experience(1, 2, 2);
  auto abs = learner::abstract_experience(learner::generalize(e).experience, h);
  auto ops = learner::extract_features(abs);
  REQUIRE(ops.size() == 8);
  // every feature shares a variable with the action and one with the task
  std::set<Term> task_vars(abs.task.args.begin(), abs.task.args.end());
  for (const auto& op : ops) {
    std::set<Term> args(op.head.args.begin(), op.head.args.end());
    for (const auto& f : op.features) {
      bool with_action = false, with_task = false;
      for (const auto& t : f.atom.args) {
        with_action |= args.count(t) > 0;
        with_task |= task_vars.count(t) > 0;
      }
      CHECK(with_action);
      CHECK(with_task);
    }
  }
  // the first pick starts from the table: its ontable key is a feature
  bool found = false;
  for (const auto& f : ops[0].features)
    if (f.tau == Tau::Init && f.atom.pred == "ontable") found = true;
  CHECK(found);
}

TEST_CASE("token strings of the four experience families") {
  auto h = domains::stacking_hierarchy();
  auto expect = std::map<int, std::string>{
      {1, "abacacacdedfdfgh"},
      {2, "abacacdcefegeghi"},
      {3, "abcdefcgefcgefhgijikiklm"},
      {4, "abcdaefgaefgaehijkjklm"},
  };
  for (const auto& [cls, want] : expect) {
    auto e = domains::gen_experience(cls, 4, 4);
    auto abs = learner::abstract_experience(learner::generalize(e).experience, h);
    auto ops = learner::extract_features(abs);
    LogicalStructure s = scope::struct_of_keyprops(abs.keys, abs.task.args);
    auto tokens = learner::tokenize(ops, abs.task, s);
    CHECK_MESSAGE(letters(tokens) == want, "class ", cls);
  }
}

TEST_CASE("learned schema for the flat arrangement") {
  auto h = domains::stacking_hierarchy();
  auto e = domains::gen_experience(1, 4, 4);
  auto schema = learner::learn_schema(e, h);

  CHECK(schema.name == "exp-stack-c1-4x4");
  CHECK(schema.task.pred == "stack");
  REQUIRE(schema.plan.size() == 8);

  // two loops: blues roll three iterations, reds two (the first red pair and
  // the goal-top red stay singles)
  std::vector<const PlanElement*> loops;
  for (const auto& el : schema.plan)
    if (el.is_loop) loops.push_back(&el);
  REQUIRE(loops.size() == 2);
  CHECK(loops[0]->iterations == 3);
  CHECK(loops[1]->iterations == 2);
  CHECK(loops[0]->body.size() == 2);
  CHECK(loops[1]->body.size() == 2);

  // scope: one summary per colour, singletons for pallet, pile and table
  CHECK(schema.scope.three_valued);
  CHECK(schema.scope.nodes.size() == 5);
  int summaries = 0;
  for (const auto& n : schema.scope.nodes) summaries += n.summary;
  CHECK(summaries == 2);

  // every plan variable is bound to a scope node
  CHECK(schema.bindings.size() == 15);
  std::set<Term> plan_vars;
  std::function<void(const std::vector<PlanElement>&)> walk =
      [&](const std::vector<PlanElement>& elems) {
        for (const auto& el : elems) {
          if (el.is_loop) { walk(el.body); continue; }
          for (const auto& a : el.op.head.args)
            if (is_variable(a)) plan_vars.insert(a);
        }
      };
  walk(schema.plan);
  for (const auto& v : plan_vars) {
    const std::string* node = schema.node_of_var(v);
    REQUIRE_MESSAGE(node != nullptr, v);
    CHECK(schema.scope.node_index(*node) >= 0);
  }

  // spot checks: the task arguments land on the tagged nodes
  CHECK(*schema.node_of_var(schema.task.args[0]) == "?table-t1");
  CHECK(*schema.node_of_var(schema.task.args[1]) == "?pile-t2");
}

TEST_CASE("identity hierarchy keeps the concrete plan structure") {
  // A domain whose hierarchy maps everything to itself: learning still rolls
  // loops, but over the concrete actions.
  PlanningDomain d;
  d.name = "belt";
  d.predicates = {atom("item", {"?x"}), atom("boxed", {"?x"}), atom("box", {"?b"})};
  Operator pack;
  pack.head = atom("pack", {"?x", "?b"});
  pack.static_pre = {atom("item", {"?x"}), atom("box", {"?b"})};
  pack.pre = {};
  pack.effects = {Literal{true, atom("boxed", {"?x"})}};
  d.operators = {pack};

  AbstractionHierarchy h;
  h.predicates = {{atom("item", {"?x"}), atom("item", {"?x"}), {0}},
                  {atom("boxed", {"?x"}), atom("boxed", {"?x"}), {0}},
                  {atom("box", {"?b"}), atom("box", {"?b"}), {0}}};
  h.operators = {{pack.head, atom("pack", {"?x", "?b"}), {0, 1}}};

  Experience e;
  e.name = "belt-run";
  e.domain_name = "belt";
  e.task = atom("fill", {"crate"});
  e.objects = {"crate", "i1", "i2", "i3"};
  e.keys = {KeyProperty{Tau::Static, atom("box", {"crate"})},
            KeyProperty{Tau::Static, atom("item", {"i1"})},
            KeyProperty{Tau::Static, atom("item", {"i2"})},
            KeyProperty{Tau::Static, atom("item", {"i3"})},
            KeyProperty{Tau::End, atom("boxed", {"i1"})},
            KeyProperty{Tau::End, atom("boxed", {"i2"})},
            KeyProperty{Tau::End, atom("boxed", {"i3"})}};
  e.plan = {atom("pack", {"i1", "crate"}), atom("pack", {"i2", "crate"}),
            atom("pack", {"i3", "crate"})};

  auto schema = learner::learn_schema(e, h, "belt-schema");
  CHECK(schema.name == "belt-schema");
  REQUIRE(schema.plan.size() == 1);
  REQUIRE(schema.plan[0].is_loop);
  CHECK(schema.plan[0].iterations == 3);
  CHECK(schema.plan[0].body.size() == 1);
  CHECK(schema.plan[0].body[0].op.head.pred == "pack");
}
