// Retrieval, abstract search, refinement, validation and the baseline.
#include <string>
#include <vector>

#include "doctest.h"
#include "ebpd/core.hpp"
#include "ebpd/domains.hpp"
#include "ebpd/learner.hpp"
#include "ebpd/planner.hpp"

using namespace ebpd;

namespace {

struct Fixture {
  PlanningDomain d = domains::stacking_domain();
  PlanningDomain ad = domains::stacking_abstract_domain();
  AbstractionHierarchy h = domains::stacking_hierarchy();
  std::vector<ActivitySchema> lib;

  Fixture() {
    for (int c = 1; c <= 4; ++c)
      lib.push_back(learner::learn_schema(domains::gen_experience(c, 4, 4), h));
  }
};

// Concrete plan mapped through the operator hierarchy, dropped actions
// stripped: must reproduce the abstract plan that was refined.
std::vector<Atom> abstract_of(const std::vector<Atom>& concrete,
                              const AbstractionHierarchy& h) {
  std::vector<Atom> out;
  for (const auto& a : concrete)
    if (auto m = h.map_operator(a)) out.push_back(*m);
  return out;
}

}  // namespace

TEST_CASE("retrieval finds the matching schema and only that one") {
  Fixture f;
  for (int c = 1; c <= 4; ++c) {
    for (int n : {2, 5}) {
      auto p = domains::gen_stack(c, n, n, 3);
      auto r = planner::retrieve(f.lib, p, f.h);
      CHECK_MESSAGE(r.index == c - 1, p.name);
      CHECK(r.rejections.size() == static_cast<std::size_t>(c - 1));
      CHECK(r.retrieval_ms >= 0.0);
    }
  }
}

TEST_CASE("a problem outside every scope is rejected with reasons") {
  Fixture f;
  auto p = domains::gen_stack(1, 3, 3, 0);
  // an extra pallet changes the canonical structure of the world
  p.objects.push_back("pallet9");
  p.statics.push_back(Atom{"pallet", {"pallet9"}});
  auto r = planner::retrieve(f.lib, p, f.h);
  CHECK(r.index == -1);
  REQUIRE(r.rejections.size() == 4);
  for (const auto& why : r.rejections) CHECK(!why.empty());
}

TEST_CASE("the abstract walk reproduces the experience it was learned from") {
  Fixture f;
  for (int c = 1; c <= 4; ++c) {
    auto e = domains::gen_experience(c, 4, 4);
    auto expected = learner::abstract_experience(e, f.h).plan;
    auto p = domains::problem_of_experience(e);
    auto r = planner::retrieve(f.lib, p, f.h);
    REQUIRE(r.index == c - 1);
    auto a = planner::asbp(f.lib[static_cast<std::size_t>(r.index)], p, f.h, f.ad, r.witness);
    REQUIRE_MESSAGE(a.solved, "class ", c, ": ", a.note);
    CHECK_MESSAGE(a.plan == expected, "class ", c);
    CHECK(a.evaluated_states > 0);
  }
}

TEST_CASE("refinement produces a valid plan that projects back") {
  Fixture f;
  for (int c = 1; c <= 4; ++c) {
    auto p = domains::gen_stack(c, 5, 5, 21);
    auto r = planner::retrieve(f.lib, p, f.h);
    REQUIRE(r.index == c - 1);
    auto a = planner::asbp(f.lib[static_cast<std::size_t>(r.index)], p, f.h, f.ad, r.witness);
    REQUIRE_MESSAGE(a.solved, "class ", c, ": ", a.note);
    auto s = planner::sbp(a.plan, p, f.h, f.d);
    REQUIRE_MESSAGE(s.solved, "class ", c, ": ", s.note);
    auto v = planner::validate_plan(f.d, p, s.plan);
    CHECK_MESSAGE(v.valid, "class ", c, ": ", v.reason);
    CHECK(abstract_of(s.plan, f.h) == a.plan);
  }
}

TEST_CASE("schema plans match the breadth-first optimum on small worlds") {
  Fixture f;
  for (int c = 1; c <= 4; ++c) {
    for (int n : {2, 3}) {
      auto p = domains::gen_stack(c, n, n, 2);
      auto r = planner::retrieve(f.lib, p, f.h);
      auto a = planner::asbp(f.lib[static_cast<std::size_t>(r.index)], p, f.h, f.ad, r.witness);
      auto s = planner::sbp(a.plan, p, f.h, f.d);
      REQUIRE(s.solved);
      auto b = planner::baseline_plan(f.d, p);
      REQUIRE_MESSAGE(b.solved, "baseline class ", c);
      CHECK(planner::validate_plan(f.d, p, b.plan).valid);
      CHECK_MESSAGE(s.plan.size() == b.plan.size(), "class ", c, " n", n, ": ",
                    s.plan.size(), " vs optimal ", b.plan.size());
    }
  }
}

TEST_CASE("below the schema's reach the baseline still covers") {
  // A schema learned from four pairs keeps distinct roles for the first and
  // last element of each phase, so a one-pair world passes the scope test but
  // cannot instantiate the plan body.  The uninformed search picks up the
  // slack: the fallback path when no schema yields a plan.
  Fixture f;
  auto p = domains::gen_stack(1, 1, 1, 0);
  auto r = planner::retrieve(f.lib, p, f.h);
  REQUIRE(r.index == 0);
  auto a = planner::asbp(f.lib[0], p, f.h, f.ad, r.witness);
  CHECK(!a.solved);
  CHECK(!a.note.empty());

  auto b = planner::baseline_plan(f.d, p);
  REQUIRE(b.solved);
  CHECK(b.plan.size() == 7);
  CHECK(b.expanded > 0);
  CHECK(planner::validate_plan(f.d, p, b.plan).valid);
}

TEST_CASE("plan validation pinpoints failures") {
  Fixture f;
  auto p = domains::gen_stack(1, 1, 1, 0);

  // inapplicable second action: the hoist never moved to the pile
  std::vector<Atom> bad = {
      Atom{"pickup", {"hoist1", "bl01", "table1", "loc1"}},
      Atom{"stack", {"hoist1", "bl01", "pallet1", "pile1", "loc1"}},
  };
  auto v = planner::validate_plan(f.d, p, bad);
  CHECK(!v.valid);
  CHECK(v.failed_index == 1);

  // applicable prefix but unmet goal
  std::vector<Atom> partial = {Atom{"pickup", {"hoist1", "bl01", "table1", "loc1"}}};
  v = planner::validate_plan(f.d, p, partial);
  CHECK(!v.valid);
  CHECK(v.failed_index == -1);
  CHECK(!v.final_state.empty());

  // unknown operator name
  std::vector<Atom> unknown = {Atom{"teleport", {"bl01"}}};
  v = planner::validate_plan(f.d, p, unknown);
  CHECK(!v.valid);
  CHECK(v.failed_index == 0);
}

TEST_CASE("search budgets cut off and report") {
  Fixture f;
  auto p = domains::gen_stack(2, 6, 6, 4);
  auto r = planner::retrieve(f.lib, p, f.h);
  REQUIRE(r.index == 1);

  planner::AsbpOptions tight;
  tight.max_evaluations = 10;
  auto a = planner::asbp(f.lib[1], p, f.h, f.ad, r.witness, tight);
  CHECK(!a.solved);
  CHECK(a.note == "evaluation budget exhausted");

  planner::BaselineOptions small;
  small.max_nodes = 50;
  auto b = planner::baseline_plan(f.d, p, small);
  CHECK(!b.solved);
  CHECK(!b.note.empty());
}

TEST_CASE("refinement needs room for the dropped-action gaps") {
  Fixture f;
  auto p = domains::gen_stack(1, 2, 2, 0);
  auto r = planner::retrieve(f.lib, p, f.h);
  auto a = planner::asbp(f.lib[0], p, f.h, f.ad, r.witness);
  REQUIRE(a.solved);

  planner::SbpOptions none;
  none.depth_bound = 0;  // no fills allowed: the hoist cannot reposition
  auto s0 = planner::sbp(a.plan, p, f.h, f.d, none);
  CHECK(!s0.solved);
  CHECK(!s0.note.empty());

  planner::SbpOptions one;
  one.depth_bound = 1;  // a single move between piles is enough here
  auto s1 = planner::sbp(a.plan, p, f.h, f.d, one);
  CHECK(s1.solved);
}
