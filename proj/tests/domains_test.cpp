// The bundled stacking world: builders, generators and the problem classifier.
#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "ebpd/core.hpp"
#include "ebpd/domains.hpp"
#include "ebpd/planner.hpp"

using namespace ebpd;

namespace {

int errors_in(const std::vector<Diagnostic>& ds) {
  return static_cast<int>(std::count_if(ds.begin(), ds.end(),
                                        [](const Diagnostic& d) { return d.is_error(); }));
}

bool is_static_pred(const TaskProblem& p, const std::string& pred, const Term& t) {
  return std::any_of(p.statics.begin(), p.statics.end(), [&](const Atom& a) {
    return a.pred == pred && a.args.size() == 1 && a.args[0] == t;
  });
}

// Bottom-to-top block order of the goal chain rooted at pallet1.
std::vector<Term> goal_chain(const TaskProblem& p) {
  std::map<Term, Term> above;  // base -> block resting on it
  for (const Atom& a : p.goal)
    if (a.pred == "on") above[a.args[1]] = a.args[0];
  std::vector<Term> chain;
  for (Term t = "pallet1"; above.count(t);) {
    t = above[t];
    chain.push_back(t);
  }
  return chain;
}

TaskProblem rename_blocks(TaskProblem p, const std::string& prefix) {
  std::map<Term, Term> sub;
  for (Term& o : p.objects) {
    if (o.rfind("bl", 0) == 0 || o.rfind("rd", 0) == 0) {
      Term fresh = prefix + o;
      sub[o] = fresh;
      o = fresh;
    }
  }
  auto fix = [&](Atom& a) {
    for (Term& t : a.args) {
      auto it = sub.find(t);
      if (it != sub.end()) t = it->second;
    }
  };
  fix(p.task);
  for (Atom& a : p.statics) fix(a);
  for (Atom& a : p.init) fix(a);
  for (Atom& a : p.goal) fix(a);
  return p;
}

}  // namespace

TEST_CASE("bundled domains and hierarchy pass their own structural checks") {
  auto d = domains::stacking_domain();
  auto ad = domains::stacking_abstract_domain();
  auto h = domains::stacking_hierarchy();
  CHECK(errors_in(validate_domain(d)) == 0);
  CHECK(errors_in(validate_domain(ad)) == 0);
  CHECK(errors_in(validate_hierarchy(h, d)) == 0);
  CHECK(!d.is_abstract);
  CHECK(ad.is_abstract);
}

TEST_CASE("scripted experiences replay and their length follows the strategy") {
  auto d = domains::stacking_domain();
  for (int c = 1; c <= 4; ++c) {
    for (int n : {2, 3, 5}) {
      auto e = domains::gen_experience(c, n, n);
      std::size_t expect = 0;
      switch (c) {
        case 1: expect = 8u * n - 1; break;  // pick, carry, place; return trips
        case 2: expect = 8u * n; break;      // unstack, carry, restack
        case 3: expect = 12u * n; break;     // park every red, then fetch back
        case 4: expect = 12u * n - 4; break; // bottom red skips the parking trip
      }
      CHECK_MESSAGE(e.plan.size() == expect, "class ", c, " n", n);
      auto p = domains::problem_of_experience(e);
      auto v = planner::validate_plan(d, p, e.plan);
      CHECK_MESSAGE(v.valid, "class ", c, " n", n, ": ", v.reason);
    }
  }
}

TEST_CASE("an experience records exactly the solved problem") {
  auto e = domains::gen_experience(3, 4, 4);
  auto p = domains::problem_of_experience(e);
  CHECK(p.task == e.task);
  CHECK(p.objects == e.objects);
  std::size_t statics = 0, inits = 0, ends = 0;
  for (const auto& k : e.keys) {
    if (k.tau == Tau::Static) ++statics;
    if (k.tau == Tau::Init) ++inits;
    if (k.tau == Tau::End) ++ends;
  }
  CHECK(p.statics.size() == statics);
  CHECK(p.init.size() == inits);
  CHECK(p.goal.size() == ends);
  CHECK(statics > 0);
  CHECK(ends > 0);
}

TEST_CASE("generation is reproducible and the seed matters where it should") {
  for (int c = 1; c <= 4; ++c) {
    CHECK(domains::gen_stack(c, 4, 4, 7) == domains::gen_stack(c, 4, 4, 7));
  }
  // loose blocks on the table: nothing to shuffle
  auto a = domains::gen_stack(1, 4, 4, 1);
  auto b = domains::gen_stack(1, 4, 4, 2);
  CHECK(a.init == b.init);
  CHECK(a.goal == b.goal);
  // piled classes: some pair of seeds must disagree on the arrangement
  for (int c = 2; c <= 4; ++c) {
    std::set<std::vector<Atom>> inits;
    for (unsigned s = 0; s < 6; ++s) inits.insert(domains::gen_stack(c, 4, 4, s).init);
    CHECK_MESSAGE(inits.size() > 1, "class ", c);
  }
}

TEST_CASE("goals put every blue below every red, matched to the source order") {
  for (int c = 1; c <= 4; ++c) {
    for (unsigned s : {0u, 9u}) {
      auto p = domains::gen_stack(c, 3, 3, s);
      auto chain = goal_chain(p);
      REQUIRE_MESSAGE(chain.size() == 6, "class ", c, " seed ", s);
      for (int i = 0; i < 3; ++i) {
        CHECK(is_static_pred(p, "blue", chain[static_cast<std::size_t>(i)]));
        CHECK(is_static_pred(p, "red", chain[static_cast<std::size_t>(i + 3)]));
      }
      std::set<Term> uniq(chain.begin(), chain.end());
      CHECK(uniq.size() == 6);
      Atom top{"top", {chain.back(), "pile1"}};
      CHECK(std::count(p.goal.begin(), p.goal.end(), top) == 1);
    }
  }
}

TEST_CASE("the source pile follows the class pattern") {
  auto color_at = [](const TaskProblem& p, int cls) {
    // read the init chain rooted at pallet2 bottom to top
    std::map<Term, Term> above;
    for (const Atom& a : p.init)
      if (a.pred == "on") above[a.args[1]] = a.args[0];
    std::vector<Term> chain;
    for (Term t = "pallet2"; above.count(t);) {
      t = above[t];
      chain.push_back(t);
    }
    std::string sig;
    for (const Term& t : chain) sig += is_static_pred(p, "blue", t) ? 'b' : 'r';
    (void)cls;
    return sig;
  };
  CHECK(color_at(domains::gen_stack(2, 3, 3, 5), 2) == "rrrbbb");
  CHECK(color_at(domains::gen_stack(3, 3, 3, 5), 3) == "brbrbr");
  CHECK(color_at(domains::gen_stack(4, 3, 3, 5), 4) == "rbrbrb");
  // class 1 has no source pile at all
  auto p1 = domains::gen_stack(1, 3, 3, 5);
  CHECK(color_at(p1, 1).empty());
  CHECK(std::count_if(p1.init.begin(), p1.init.end(),
                      [](const Atom& a) { return a.pred == "ontable"; }) == 6);
}

TEST_CASE("the classifier buckets by configuration class, not size or names") {
  auto h = domains::stacking_hierarchy();
  std::vector<TaskProblem> ps;
  std::vector<int> want;
  for (int c = 1; c <= 4; ++c) {
    for (int n : {2, 4, 6}) {
      for (unsigned s : {1u, 8u}) {
        ps.push_back(domains::gen_stack(c, n, n, s));
        want.push_back(c - 1);
      }
    }
  }
  // renamed and reordered copies must land in the cells of their originals
  ps.push_back(rename_blocks(domains::gen_stack(2, 5, 5, 3), "x"));
  want.push_back(1);
  auto shuffled = domains::gen_stack(4, 3, 3, 2);
  std::reverse(shuffled.init.begin(), shuffled.init.end());
  std::reverse(shuffled.statics.begin(), shuffled.statics.end());
  ps.push_back(shuffled);
  want.push_back(3);

  auto cells = domains::classify_problems(ps, h);
  CHECK(cells == want);
  CHECK(*std::max_element(cells.begin(), cells.end()) == 3);
}
