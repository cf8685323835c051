// Random value builders over a safe identifier vocabulary, shared by the
// reader/writer tests and the acceptance run.
#ifndef EBPD_TESTS_FUZZING_HPP
#define EBPD_TESTS_FUZZING_HPP

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ebpd/core.hpp"

namespace fuzz {

inline std::string rand_name(std::mt19937& rng, const char* stem) {
  return std::string(stem) + std::to_string(rng() % 40);
}

inline ebpd::Term rand_var(std::mt19937& rng) {
  return "?x" + std::to_string(rng() % 8);
}

inline ebpd::Atom rand_atom(std::mt19937& rng, bool vars) {
  std::vector<ebpd::Term> args;
  std::size_t n = rng() % 4;
  for (std::size_t i = 0; i < n; ++i)
    args.push_back(vars ? rand_var(rng) : rand_name(rng, "obj"));
  return ebpd::Atom{rand_name(rng, "pred"), std::move(args)};
}

inline ebpd::PlanningDomain rand_domain(std::mt19937& rng) {
  ebpd::PlanningDomain d;
  d.name = rand_name(rng, "dom");
  d.is_abstract = rng() % 2 == 0;
  std::size_t np = 1 + rng() % 4;
  for (std::size_t i = 0; i < np; ++i) d.predicates.push_back(rand_atom(rng, true));
  std::size_t no = 1 + rng() % 3;
  for (std::size_t i = 0; i < no; ++i) {
    ebpd::Operator op;
    op.head = rand_atom(rng, true);
    std::size_t ns = rng() % 3, npre = rng() % 3, ne = 1 + rng() % 3;
    for (std::size_t k = 0; k < ns; ++k) op.static_pre.push_back(rand_atom(rng, true));
    for (std::size_t k = 0; k < npre; ++k) op.pre.push_back(rand_atom(rng, true));
    for (std::size_t k = 0; k < ne; ++k)
      op.effects.push_back(ebpd::Literal{rng() % 2 == 0, rand_atom(rng, true)});
    d.operators.push_back(std::move(op));
  }
  return d;
}

inline ebpd::AbstractionHierarchy rand_hierarchy(std::mt19937& rng) {
  ebpd::AbstractionHierarchy h;
  h.name = rand_name(rng, "hier");
  auto entry = [&](std::vector<ebpd::HierarchyEntry>& out) {
    ebpd::HierarchyEntry e;
    // distinct parameters, as operator and predicate declarations have
    e.from = ebpd::Atom{rand_name(rng, "pred"), {}};
    std::size_t arity = rng() % 4;
    for (std::size_t i = 0; i < arity; ++i)
      e.from.args.push_back("?p" + std::to_string(i));
    if (rng() % 3 != 0) {
      // projection: strictly increasing subset of the source positions
      std::vector<int> proj;
      std::vector<ebpd::Term> args;
      for (std::size_t i = 0; i < e.from.args.size(); ++i)
        if (rng() % 2 == 0) {
          proj.push_back(static_cast<int>(i));
          args.push_back(e.from.args[i]);
        }
      e.to = ebpd::Atom{rand_name(rng, "abs"), std::move(args)};
      e.proj = std::move(proj);
    }
    out.push_back(std::move(e));
  };
  std::size_t np = 1 + rng() % 4, no = 1 + rng() % 3;
  for (std::size_t i = 0; i < np; ++i) entry(h.predicates);
  for (std::size_t i = 0; i < no; ++i) entry(h.operators);
  return h;
}

inline ebpd::Experience rand_experience(std::mt19937& rng) {
  ebpd::Experience e;
  e.name = rand_name(rng, "exp");
  e.domain_name = rand_name(rng, "dom");
  e.task = rand_atom(rng, false);
  std::size_t nb = 1 + rng() % 5;
  for (std::size_t i = 0; i < nb; ++i) e.objects.push_back(rand_name(rng, "obj"));
  ebpd::Tau taus[] = {ebpd::Tau::Static, ebpd::Tau::Init, ebpd::Tau::End};
  std::size_t nk = rng() % 6;
  for (std::size_t i = 0; i < nk; ++i)
    e.keys.push_back(ebpd::KeyProperty{taus[rng() % 3], rand_atom(rng, false)});
  std::size_t np = 1 + rng() % 5;
  for (std::size_t i = 0; i < np; ++i) e.plan.push_back(rand_atom(rng, false));
  return e;
}

inline ebpd::TaskProblem rand_problem(std::mt19937& rng) {
  ebpd::TaskProblem p;
  p.name = rand_name(rng, "prob");
  p.domain_name = rand_name(rng, "dom");
  p.task = rand_atom(rng, false);
  std::size_t nb = 1 + rng() % 5;
  for (std::size_t i = 0; i < nb; ++i) p.objects.push_back(rand_name(rng, "obj"));
  std::size_t ns = rng() % 4, ni = rng() % 4, ng = 1 + rng() % 3;
  for (std::size_t i = 0; i < ns; ++i) p.statics.push_back(rand_atom(rng, false));
  for (std::size_t i = 0; i < ni; ++i) p.init.push_back(rand_atom(rng, false));
  for (std::size_t i = 0; i < ng; ++i) p.goal.push_back(rand_atom(rng, false));
  return p;
}

// Schema with a random scope structure; the interpretation stays sparse
// (no explicit false entries), matching what the writer emits.
inline ebpd::ActivitySchema rand_schema(std::mt19937& rng) {
  using ebpd::TruthValue;
  ebpd::ActivitySchema s;
  s.name = rand_name(rng, "sch");
  s.task = ebpd::Atom{rand_name(rng, "task"), {rand_name(rng, "obj"), rand_name(rng, "obj")}};

  std::size_t nn = 2 + rng() % 4;
  s.scope.three_valued = true;
  for (std::size_t i = 0; i < nn; ++i) {
    ebpd::LogicalStructure::Node node;
    node.name = "c" + std::to_string(i);
    node.summary = rng() % 3 == 0;
    if (rng() % 4 == 0) node.task_pos.push_back(1 + static_cast<int>(rng() % 2));
    s.scope.nodes.push_back(std::move(node));
  }
  ebpd::Tau taus[] = {ebpd::Tau::Static, ebpd::Tau::Init, ebpd::Tau::End};
  std::size_t nv = rng() % 8;
  for (std::size_t i = 0; i < nv; ++i) {
    std::vector<int> tuple;
    std::size_t arity = 1 + rng() % 2;
    for (std::size_t k = 0; k < arity; ++k)
      tuple.push_back(static_cast<int>(rng() % nn));
    TruthValue v = rng() % 2 == 0 ? TruthValue::True : TruthValue::Half;
    s.scope.iota[{taus[rng() % 3], rand_name(rng, "rel"), tuple}] = v;
  }

  std::size_t nb = rng() % 5;
  for (std::size_t i = 0; i < nb; ++i)
    s.bindings.emplace_back("?v" + std::to_string(i),
                            "c" + std::to_string(rng() % nn));

  auto action = [&rng]() {
    ebpd::PlanElement el;
    el.is_loop = false;
    el.op.head = rand_atom(rng, true);
    std::size_t nf = rng() % 3;
    for (std::size_t k = 0; k < nf; ++k)
      el.op.features.push_back(
          ebpd::KeyProperty{ebpd::Tau::Static, rand_atom(rng, true)});
    return el;
  };
  std::size_t ne = 1 + rng() % 4;
  for (std::size_t i = 0; i < ne; ++i) {
    if (rng() % 3 == 0) {
      ebpd::PlanElement loop;
      loop.is_loop = true;
      loop.iterations = 2 + static_cast<int>(rng() % 3);
      std::size_t body = 1 + rng() % 2;
      for (std::size_t k = 0; k < body; ++k) loop.body.push_back(action());
      s.plan.push_back(std::move(loop));
    } else {
      s.plan.push_back(action());
    }
  }
  return s;
}

}  // namespace fuzz

#endif
