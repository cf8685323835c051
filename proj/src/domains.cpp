// Built-in block-stacking world: domain/hierarchy builders, scripted
// problem and experience generators, and structure-based classification.
#include "ebpd/domains.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <utility>

#include "ebpd/planner.hpp"
#include "ebpd/scope.hpp"

namespace ebpd::domains {
namespace {

Atom atom(std::string pred, std::vector<Term> args) {
  return Atom{std::move(pred), std::move(args)};
}

std::string pad2(const char* prefix, int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%s%02d", prefix, i);
  return buf;
}

Operator make_op(Atom head, std::vector<Atom> statics, std::vector<Atom> pre,
                 std::vector<Literal> effects) {
  Operator op;
  op.head = std::move(head);
  op.static_pre = std::move(statics);
  op.pre = std::move(pre);
  op.effects = std::move(effects);
  return op;
}

Literal add(Atom a) { return Literal{true, std::move(a)}; }
Literal del(Atom a) { return Literal{false, std::move(a)}; }

// Shared fixtures of one generated world.
struct World {
  std::vector<Term> blues;  // canonical lexicographic names
  std::vector<Term> reds;
  std::vector<Term> objects;
  std::vector<Atom> statics;
  bool two_piles = false;
};

World make_world(int cls, int nb, int nr) {
  if (cls < 1 || cls > 4) throw std::invalid_argument("stacking class must be 1..4");
  if (nb < 1 || nr < 1) throw std::invalid_argument("need at least one block per color");
  if ((cls == 3 || cls == 4) && nb != nr)
    throw std::invalid_argument("alternating classes need equal color counts");
  World w;
  w.two_piles = cls != 1;
  for (int i = 1; i <= nb; ++i) w.blues.push_back(pad2("bl", i));
  for (int i = 1; i <= nr; ++i) w.reds.push_back(pad2("rd", i));
  w.objects = {"hoist1", "loc1", "table1", "pile1", "pallet1"};
  if (w.two_piles) {
    w.objects.push_back("pile2");
    w.objects.push_back("pallet2");
  }
  w.objects.insert(w.objects.end(), w.blues.begin(), w.blues.end());
  w.objects.insert(w.objects.end(), w.reds.begin(), w.reds.end());

  w.statics = {
      atom("hoist", {"hoist1"}),        atom("location", {"loc1"}),
      atom("belong", {"hoist1", "loc1"}), atom("table", {"table1"}),
      atom("pile", {"pile1"}),          atom("pallet", {"pallet1"}),
      atom("attached", {"table1", "loc1"}), atom("attached", {"pile1", "loc1"}),
  };
  if (w.two_piles) {
    w.statics.push_back(atom("pile", {"pile2"}));
    w.statics.push_back(atom("pallet", {"pallet2"}));
    w.statics.push_back(atom("attached", {"pile2", "loc1"}));
  }
  for (const Term& b : w.blues) {
    w.statics.push_back(atom("block", {b}));
    w.statics.push_back(atom("blue", {b}));
  }
  for (const Term& r : w.reds) {
    w.statics.push_back(atom("block", {r}));
    w.statics.push_back(atom("red", {r}));
  }
  return w;
}

// Source pile content, bottom to top, for the permuted per-color orders.
std::vector<Term> source_stack(int cls, const std::vector<Term>& bs,
                               const std::vector<Term>& rs) {
  std::vector<Term> s;
  if (cls == 2) {
    s = rs;
    s.insert(s.end(), bs.begin(), bs.end());
  } else if (cls == 3) {
    for (std::size_t i = 0; i < bs.size(); ++i) {
      s.push_back(bs[i]);
      s.push_back(rs[i]);
    }
  } else if (cls == 4) {
    for (std::size_t i = 0; i < bs.size(); ++i) {
      s.push_back(rs[i]);
      s.push_back(bs[i]);
    }
  }
  return s;
}

// Target pile content, bottom to top. Blues arrive in reverse source order;
// reds arrive in reverse source order when moved directly (class 2) and in
// lexicographic order when staged over the table first (classes 3 and 4).
std::vector<Term> goal_stack(int cls, const std::vector<Term>& bs,
                             const std::vector<Term>& rs,
                             const std::vector<Term>& reds_lex) {
  std::vector<Term> g;
  if (cls == 1) {
    g = bs;
    g.insert(g.end(), reds_lex.begin(), reds_lex.end());
    return g;
  }
  g.assign(bs.rbegin(), bs.rend());
  if (cls == 2) {
    g.insert(g.end(), rs.rbegin(), rs.rend());
  } else {
    g.insert(g.end(), reds_lex.begin(), reds_lex.end());
  }
  return g;
}

TaskProblem make_problem(int cls, const World& w, const std::vector<Term>& bs,
                         const std::vector<Term>& rs, std::string name) {
  TaskProblem p;
  p.name = std::move(name);
  p.domain_name = "stacking";
  p.task = atom("stack", {"table1", "pile1"});
  p.objects = w.objects;
  p.statics = w.statics;
  p.init = {atom("at", {"hoist1", "table1"}), atom("empty", {"hoist1"}),
            atom("top", {"pallet1", "pile1"})};
  if (cls == 1) {
    for (const Term& b : w.blues) p.init.push_back(atom("ontable", {b, "table1"}));
    for (const Term& r : w.reds) p.init.push_back(atom("ontable", {r, "table1"}));
  } else {
    std::vector<Term> src = source_stack(cls, bs, rs);
    Term below = "pallet2";
    for (const Term& t : src) {
      p.init.push_back(atom("on", {t, below}));
      below = t;
    }
    p.init.push_back(atom("top", {src.back(), "pile2"}));
  }
  std::vector<Term> arrival = goal_stack(cls, bs, rs, w.reds);
  Term below = "pallet1";
  for (const Term& t : arrival) {
    p.goal.push_back(atom("on", {t, below}));
    below = t;
  }
  p.goal.push_back(atom("top", {arrival.back(), "pile1"}));
  return p;
}

// Scripted concrete solution for the canonical (identity-order) arrangement.
std::vector<Atom> script(int cls, const World& w) {
  const std::vector<Term>& bs = w.blues;
  const std::vector<Term>& rs = w.reds;
  std::vector<Atom> plan;
  auto mv = [&](const Term& from, const Term& to) {
    plan.push_back(atom("move", {"hoist1", from, to, "loc1"}));
  };
  auto pk = [&](const Term& b) {
    plan.push_back(atom("pickup", {"hoist1", b, "table1", "loc1"}));
  };
  auto pd = [&](const Term& b) {
    plan.push_back(atom("putdown", {"hoist1", b, "table1", "loc1"}));
  };
  auto st = [&](const Term& b, const Term& c) {
    plan.push_back(atom("stack", {"hoist1", b, c, "pile1", "loc1"}));
  };
  auto un = [&](const Term& b, const Term& c) {
    plan.push_back(atom("unstack", {"hoist1", b, c, "pile2", "loc1"}));
  };

  Term under = "pallet1";
  const int n = static_cast<int>(bs.size());
  if (cls == 1) {
    std::vector<Term> order = bs;
    order.insert(order.end(), rs.begin(), rs.end());
    for (std::size_t i = 0; i < order.size(); ++i) {
      pk(order[i]);
      mv("table1", "pile1");
      st(order[i], under);
      under = order[i];
      if (i + 1 < order.size()) mv("pile1", "table1");
    }
  } else if (cls == 2) {
    std::vector<Term> src = source_stack(cls, bs, rs);
    mv("table1", "pile2");
    for (int k = static_cast<int>(src.size()) - 1; k >= 0; --k) {
      un(src[k], k > 0 ? src[k - 1] : Term("pallet2"));
      mv("pile2", "pile1");
      st(src[k], under);
      under = src[k];
      if (k > 0) mv("pile1", "pile2");
    }
  } else if (cls == 3) {
    // Source, bottom to top: b1 r1 b2 r2 ... ; reds park on the table while
    // the blues transfer, then come back in lexicographic order.
    mv("table1", "pile2");
    for (int k = n - 1; k >= 0; --k) {
      un(rs[k], bs[k]);
      mv("pile2", "table1");
      pd(rs[k]);
      mv("table1", "pile2");
      un(bs[k], k > 0 ? rs[k - 1] : Term("pallet2"));
      mv("pile2", "pile1");
      st(bs[k], under);
      under = bs[k];
      if (k > 0) mv("pile1", "pile2");
    }
    for (int j = 0; j < n; ++j) {
      mv("pile1", "table1");
      pk(rs[j]);
      mv("table1", "pile1");
      st(rs[j], under);
      under = rs[j];
    }
  } else {
    // Source, bottom to top: r1 b1 r2 b2 ... ; each blue transfers before the
    // red beneath it parks on the table.  The bottom red goes over directly:
    // it is next in the goal order, so parking it would be a wasted trip.
    mv("table1", "pile2");
    for (int k = n - 1; k >= 0; --k) {
      un(bs[k], rs[k]);
      mv("pile2", "pile1");
      st(bs[k], under);
      under = bs[k];
      mv("pile1", "pile2");
      un(rs[k], k > 0 ? bs[k - 1] : Term("pallet2"));
      if (k > 0) {
        mv("pile2", "table1");
        pd(rs[k]);
        mv("table1", "pile2");
      } else {
        mv("pile2", "pile1");
        st(rs[0], under);
        under = rs[0];
      }
    }
    for (int j = 1; j < n; ++j) {
      mv("pile1", "table1");
      pk(rs[j]);
      mv("table1", "pile1");
      st(rs[j], under);
      under = rs[j];
    }
  }
  return plan;
}

}  // namespace

PlanningDomain stacking_domain() {
  PlanningDomain d;
  d.name = "stacking";
  d.predicates = {
      atom("pile", {"?p"}),          atom("table", {"?t"}),
      atom("red", {"?b"}),           atom("blue", {"?b"}),
      atom("pallet", {"?x"}),        atom("block", {"?b"}),
      atom("location", {"?l"}),      atom("hoist", {"?h"}),
      atom("attached", {"?x", "?l"}), atom("belong", {"?h", "?l"}),
      atom("at", {"?h", "?x"}),      atom("holding", {"?h", "?x"}),
      atom("empty", {"?h"}),         atom("on", {"?x", "?y"}),
      atom("ontable", {"?b", "?t"}), atom("top", {"?x", "?p"}),
  };
  d.operators.push_back(make_op(
      atom("move", {"?h", "?x", "?y", "?l"}),
      {atom("hoist", {"?h"}), atom("belong", {"?h", "?l"}),
       atom("attached", {"?x", "?l"}), atom("attached", {"?y", "?l"})},
      {atom("at", {"?h", "?x"})},
      {del(atom("at", {"?h", "?x"})), add(atom("at", {"?h", "?y"}))}));
  d.operators.push_back(make_op(
      atom("pickup", {"?h", "?b", "?t", "?l"}),
      {atom("hoist", {"?h"}), atom("block", {"?b"}), atom("table", {"?t"}),
       atom("belong", {"?h", "?l"}), atom("attached", {"?t", "?l"})},
      {atom("at", {"?h", "?t"}), atom("ontable", {"?b", "?t"}),
       atom("empty", {"?h"})},
      {del(atom("ontable", {"?b", "?t"})), del(atom("empty", {"?h"})),
       add(atom("holding", {"?h", "?b"}))}));
  d.operators.push_back(make_op(
      atom("putdown", {"?h", "?b", "?t", "?l"}),
      {atom("hoist", {"?h"}), atom("block", {"?b"}), atom("table", {"?t"}),
       atom("belong", {"?h", "?l"}), atom("attached", {"?t", "?l"})},
      {atom("at", {"?h", "?t"}), atom("holding", {"?h", "?b"})},
      {add(atom("ontable", {"?b", "?t"})), add(atom("empty", {"?h"})),
       del(atom("holding", {"?h", "?b"}))}));
  d.operators.push_back(make_op(
      atom("stack", {"?h", "?b", "?c", "?p", "?l"}),
      {atom("hoist", {"?h"}), atom("block", {"?b"}), atom("belong", {"?h", "?l"}),
       atom("attached", {"?p", "?l"})},
      {atom("at", {"?h", "?p"}), atom("holding", {"?h", "?b"}),
       atom("top", {"?c", "?p"})},
      {del(atom("holding", {"?h", "?b"})), add(atom("empty", {"?h"})),
       add(atom("on", {"?b", "?c"})), del(atom("top", {"?c", "?p"})),
       add(atom("top", {"?b", "?p"}))}));
  d.operators.push_back(make_op(
      atom("unstack", {"?h", "?b", "?c", "?p", "?l"}),
      {atom("hoist", {"?h"}), atom("block", {"?b"}), atom("belong", {"?h", "?l"}),
       atom("attached", {"?p", "?l"})},
      {atom("at", {"?h", "?p"}), atom("empty", {"?h"}), atom("top", {"?b", "?p"}),
       atom("on", {"?b", "?c"})},
      {add(atom("holding", {"?h", "?b"})), del(atom("empty", {"?h"})),
       del(atom("on", {"?b", "?c"})), del(atom("top", {"?b", "?p"})),
       add(atom("top", {"?c", "?p"}))}));
  return d;
}

PlanningDomain stacking_abstract_domain() {
  PlanningDomain d;
  d.name = "stacking-abstract";
  d.is_abstract = true;
  d.predicates = {
      atom("pile", {"?p"}),   atom("table", {"?t"}),  atom("red", {"?b"}),
      atom("blue", {"?b"}),   atom("pallet", {"?x"}), atom("block", {"?b"}),
      atom("holding", {"?x"}), atom("on", {"?x", "?y"}),
      atom("ontable", {"?b", "?t"}), atom("top", {"?x", "?p"}),
  };
  d.operators.push_back(make_op(
      atom("pick", {"?b", "?t"}),
      {atom("block", {"?b"}), atom("table", {"?t"})},
      {atom("ontable", {"?b", "?t"})},
      {del(atom("ontable", {"?b", "?t"})), add(atom("holding", {"?b"}))}));
  d.operators.push_back(make_op(
      atom("put", {"?b", "?t"}),
      {atom("block", {"?b"}), atom("table", {"?t"})},
      {atom("holding", {"?b"})},
      {add(atom("ontable", {"?b", "?t"})), del(atom("holding", {"?b"}))}));
  d.operators.push_back(make_op(
      atom("stack", {"?b", "?c", "?p"}),
      {atom("block", {"?b"}), atom("pile", {"?p"})},
      {atom("holding", {"?b"}), atom("top", {"?c", "?p"})},
      {del(atom("holding", {"?b"})), add(atom("on", {"?b", "?c"})),
       del(atom("top", {"?c", "?p"})), add(atom("top", {"?b", "?p"}))}));
  d.operators.push_back(make_op(
      atom("unstack", {"?b", "?c", "?p"}),
      {atom("block", {"?b"}), atom("pile", {"?p"})},
      {atom("top", {"?b", "?p"}), atom("on", {"?b", "?c"})},
      {add(atom("holding", {"?b"})), del(atom("on", {"?b", "?c"})),
       del(atom("top", {"?b", "?p"})), add(atom("top", {"?c", "?p"}))}));
  return d;
}

AbstractionHierarchy stacking_hierarchy() {
  AbstractionHierarchy h;
  h.name = "stacking-to-abstract";
  auto identity = [&](Atom a) {
    std::vector<int> proj(a.args.size());
    for (std::size_t i = 0; i < proj.size(); ++i) proj[i] = static_cast<int>(i);
    h.predicates.push_back(HierarchyEntry{a, a, proj});
  };
  auto nil_pred = [&](Atom a) {
    h.predicates.push_back(HierarchyEntry{std::move(a), std::nullopt, {}});
  };
  identity(atom("pile", {"?p"}));
  identity(atom("table", {"?t"}));
  identity(atom("red", {"?b"}));
  identity(atom("blue", {"?b"}));
  identity(atom("pallet", {"?x"}));
  identity(atom("block", {"?b"}));
  nil_pred(atom("location", {"?l"}));
  nil_pred(atom("hoist", {"?h"}));
  nil_pred(atom("attached", {"?x", "?l"}));
  nil_pred(atom("belong", {"?h", "?l"}));
  nil_pred(atom("at", {"?h", "?x"}));
  nil_pred(atom("empty", {"?h"}));
  h.predicates.push_back(HierarchyEntry{atom("holding", {"?h", "?x"}),
                                        atom("holding", {"?x"}),
                                        {1}});
  identity(atom("on", {"?x", "?y"}));
  identity(atom("ontable", {"?b", "?t"}));
  identity(atom("top", {"?x", "?p"}));

  h.operators.push_back(HierarchyEntry{atom("move", {"?h", "?x", "?y", "?l"}),
                                       std::nullopt,
                                       {}});
  h.operators.push_back(HierarchyEntry{atom("pickup", {"?h", "?b", "?t", "?l"}),
                                       atom("pick", {"?b", "?t"}),
                                       {1, 2}});
  h.operators.push_back(HierarchyEntry{atom("putdown", {"?h", "?b", "?t", "?l"}),
                                       atom("put", {"?b", "?t"}),
                                       {1, 2}});
  h.operators.push_back(HierarchyEntry{atom("stack", {"?h", "?b", "?c", "?p", "?l"}),
                                       atom("stack", {"?b", "?c", "?p"}),
                                       {1, 2, 3}});
  h.operators.push_back(HierarchyEntry{atom("unstack", {"?h", "?b", "?c", "?p", "?l"}),
                                       atom("unstack", {"?b", "?c", "?p"}),
                                       {1, 2, 3}});
  return h;
}

TaskProblem gen_stack(int cls, int blues, int reds, unsigned seed) {
  World w = make_world(cls, blues, reds);
  std::vector<Term> bs = w.blues;
  std::vector<Term> rs = w.reds;
  if (cls != 1) {
    // The seed shuffles which block occupies which source-pile slot; class 1
    // has no source pile, so every seed yields the same problem.  In the
    // interleaved classes the reds keep their name order: they are re-stacked
    // from the table in that order, so the goal's red chain must follow it.
    std::mt19937 rng(seed);
    std::shuffle(bs.begin(), bs.end(), rng);
    if (cls == 2) std::shuffle(rs.begin(), rs.end(), rng);
  }
  std::string name = "stack-c" + std::to_string(cls) + "-" + std::to_string(blues) +
                     "x" + std::to_string(reds) + "-s" + std::to_string(seed);
  return make_problem(cls, w, bs, rs, std::move(name));
}

Experience gen_experience(int cls, int blues, int reds) {
  World w = make_world(cls, blues, reds);
  std::string name = "exp-stack-c" + std::to_string(cls) + "-" +
                     std::to_string(blues) + "x" + std::to_string(reds);
  TaskProblem p = make_problem(cls, w, w.blues, w.reds, name + "-task");
  std::vector<Atom> plan = script(cls, w);
  planner::ValidationResult v = planner::validate_plan(stacking_domain(), p, plan);
  if (!v.valid) throw std::logic_error("scripted solution invalid: " + v.reason);

  Experience e;
  e.name = name;
  e.domain_name = p.domain_name;
  e.task = p.task;
  e.objects = p.objects;
  for (const Atom& a : p.statics) e.keys.push_back(KeyProperty{Tau::Static, a});
  for (const Atom& a : p.init) e.keys.push_back(KeyProperty{Tau::Init, a});
  std::vector<Atom> fin = v.final_state;
  std::sort(fin.begin(), fin.end());
  for (const Atom& a : fin) e.keys.push_back(KeyProperty{Tau::End, a});
  e.plan = std::move(plan);
  return e;
}

TaskProblem problem_of_experience(const Experience& e) {
  TaskProblem p;
  p.name = e.name + "-replay";
  p.domain_name = e.domain_name;
  p.task = e.task;
  p.objects = e.objects;
  for (const KeyProperty& k : e.keys) {
    switch (k.tau) {
      case Tau::Static: p.statics.push_back(k.atom); break;
      case Tau::Init: p.init.push_back(k.atom); break;
      case Tau::End: p.goal.push_back(k.atom); break;
    }
  }
  return p;
}

std::vector<int> classify_problems(const std::vector<TaskProblem>& problems,
                                   const AbstractionHierarchy& h) {
  std::vector<LogicalStructure> reps;
  std::vector<int> cells;
  cells.reserve(problems.size());
  for (const TaskProblem& p : problems) {
    LogicalStructure s = scope::canonical_abstraction(scope::problem_to_struct(p, h));
    int cell = -1;
    for (std::size_t i = 0; i < reps.size(); ++i) {
      if (s.isomorphic(reps[i])) {
        cell = static_cast<int>(i);
        break;
      }
    }
    if (cell < 0) {
      cell = static_cast<int>(reps.size());
      reps.push_back(std::move(s));
    }
    cells.push_back(cell);
  }
  return cells;
}

}  // namespace ebpd::domains
