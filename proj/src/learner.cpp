#include "ebpd/learner.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <sstream>

#include "ebpd/loops.hpp"
#include "ebpd/scope.hpp"

namespace ebpd::learner {

namespace {

void bind_term(const Term& t, std::map<Term, Term>& sub, int& counter) {
  if (is_variable(t) || sub.count(t)) return;
  sub[t] = "?v" + std::to_string(++counter);
}

Term apply_term(const Term& t, const std::map<Term, Term>& sub) {
  auto it = sub.find(t);
  return it == sub.end() ? t : it->second;
}

Atom apply_atom(const Atom& a, const std::map<Term, Term>& sub) {
  Atom out = a;
  for (auto& t : out.args) t = apply_term(t, sub);
  return out;
}

}  // namespace

Generalization generalize(const Experience& e) {
  std::map<Term, Term> sub;
  int counter = 0;
  for (const auto& act : e.plan)
    for (const auto& t : act.args) bind_term(t, sub, counter);
  for (const auto& t : e.task.args) bind_term(t, sub, counter);
  for (const auto& k : e.keys)
    for (const auto& t : k.atom.args) bind_term(t, sub, counter);
  for (const auto& o : e.objects) bind_term(o, sub, counter);

  Generalization g;
  g.substitution = sub;
  g.experience = e;
  g.experience.task = apply_atom(e.task, sub);
  for (auto& o : g.experience.objects) o = apply_term(o, sub);
  for (auto& k : g.experience.keys) k.atom = apply_atom(k.atom, sub);
  for (auto& a : g.experience.plan) a = apply_atom(a, sub);
  return g;
}

Experience abstract_experience(const Experience& e, const AbstractionHierarchy& h) {
  Experience out;
  out.name = e.name;
  out.domain_name = h.name;
  out.task = e.task;

  for (const auto& k : e.keys) {
    auto mapped = h.map_predicate(k.atom);
    if (mapped) out.keys.push_back({k.tau, *mapped});
  }
  std::sort(out.keys.begin(), out.keys.end());
  out.keys.erase(std::unique(out.keys.begin(), out.keys.end()), out.keys.end());

  for (const auto& a : e.plan) {
    auto mapped = h.map_operator(a);
    if (mapped) out.plan.push_back(*mapped);
  }

  std::set<Term> objs;
  for (const auto& t : out.task.args) objs.insert(t);
  for (const auto& k : out.keys)
    for (const auto& t : k.atom.args) objs.insert(t);
  for (const auto& a : out.plan)
    for (const auto& t : a.args) objs.insert(t);
  out.objects.assign(objs.begin(), objs.end());
  return out;
}

std::vector<EnrichedOperator> extract_features(const Experience& exp) {
  std::set<Term> task_vars(exp.task.args.begin(), exp.task.args.end());
  std::vector<EnrichedOperator> out;
  out.reserve(exp.plan.size());
  for (const auto& act : exp.plan) {
    std::set<Term> act_vars(act.args.begin(), act.args.end());
    EnrichedOperator eo;
    eo.head = act;
    for (const auto& k : exp.keys) {
      bool with_action = false, with_task = false;
      for (const auto& t : k.atom.args) {
        if (act_vars.count(t)) with_action = true;
        if (task_vars.count(t)) with_task = true;
      }
      if (with_action && with_task) eo.features.push_back(k);
    }
    std::sort(eo.features.begin(), eo.features.end());
    out.push_back(std::move(eo));
  }
  return out;
}

std::vector<int> tokenize(const std::vector<EnrichedOperator>& ops, const Atom& task,
                          const LogicalStructure& experience_struct) {
  // Canonical class string of a term within the experience structure.
  auto canon_of = [&](const Term& t) -> std::string {
    int idx = experience_struct.node_index(t);
    if (idx < 0) return "<none>";
    return scope::canonical_name(experience_struct, idx).str();
  };

  std::map<std::string, int> ids;
  std::vector<int> tokens;
  tokens.reserve(ops.size());
  for (const auto& op : ops) {
    std::ostringstream key;
    key << op.head.pred << '/' << op.head.args.size();
    for (const auto& a : op.head.args) key << '|' << canon_of(a);

    // Positional role of a variable: head position wins, then task position.
    // Features mentioning any variable outside head+task carry no shape;
    // they vary freely with foreign helper objects and would otherwise make
    // interchangeable iterations look distinct.  A feature must also mention
    // the head's first argument (the object being acted on): relations that
    // only involve pedestal arguments depend on pile position, not on the
    // kind of step being taken.
    auto role_of = [&](const Term& t) -> std::string {
      for (std::size_t i = 0; i < op.head.args.size(); ++i)
        if (op.head.args[i] == t) return "o" + std::to_string(i);
      for (std::size_t i = 0; i < task.args.size(); ++i)
        if (task.args[i] == t) return "t" + std::to_string(i);
      return "_";
    };

    std::set<std::string> shapes;
    for (const auto& f : op.features) {
      bool inside = true;
      bool has_subject = op.head.args.empty();
      for (const auto& t : f.atom.args) {
        if (role_of(t) == "_") inside = false;
        if (!op.head.args.empty() && t == op.head.args[0]) has_subject = true;
      }
      if (!inside || !has_subject) continue;
      std::ostringstream s;
      s << tau_name(f.tau) << ' ' << f.atom.pred;
      for (const auto& t : f.atom.args) s << ' ' << role_of(t);
      shapes.insert(s.str());
    }
    for (const auto& s : shapes) key << '#' << s;

    auto [it, fresh] = ids.emplace(key.str(), static_cast<int>(ids.size()));
    tokens.push_back(it->second);
  }
  return tokens;
}

namespace {

// Attempts to merge the iterations of a candidate loop into one body.
// Singles unify argument-wise: per position, the variables across iterations
// either are one fixed task variable or form a role that gets a fresh loop
// variable; the role assignment must be a bijection within each iteration.
// Features are renamed through the role map and intersected across
// iterations. Nested loop elements only merge when structurally equal.
class LoopMerger {
 public:
  LoopMerger(const Atom& task, std::map<Term, std::vector<Term>>& members)
      : task_(task), members_(members) {}

  std::optional<PlanElement> operator()(const std::vector<PlanElement>& elems, int start,
                                        int period, int iterations) {
    std::set<Term> task_vars(task_.args.begin(), task_.args.end());

    // role id per (position in body, arg slot) discovered from iteration 0
    std::map<Term, int> role_of_var0;      // iteration-0 variable -> role id
    std::vector<std::vector<int>> roles;   // per body op, per arg: role or -1 (fixed)
    int next_role = 0;

    for (int j = 0; j < period; ++j) {
      const PlanElement& first = elems[start + j];
      if (first.is_loop) {
        for (int i = 1; i < iterations; ++i)
          if (!(elems[start + i * period + j] == first)) return std::nullopt;
        roles.emplace_back();
        continue;
      }
      std::vector<int> r;
      for (const auto& a : first.op.head.args) {
        if (task_vars.count(a)) {
          r.push_back(-1);
        } else {
          auto it = role_of_var0.find(a);
          if (it == role_of_var0.end()) it = role_of_var0.emplace(a, next_role++).first;
          r.push_back(it->second);
        }
      }
      roles.push_back(std::move(r));
    }

    // per iteration: role -> that iteration's variable (must be a bijection)
    std::vector<std::map<int, Term>> var_at(iterations);
    for (int i = 0; i < iterations; ++i) {
      std::map<Term, int> seen;  // variable -> role (injectivity)
      for (int j = 0; j < period; ++j) {
        const PlanElement& el = elems[start + i * period + j];
        if (el.is_loop) continue;
        const auto& args = el.op.head.args;
        if (args.size() != roles[j].size()) return std::nullopt;
        for (std::size_t a = 0; a < args.size(); ++a) {
          int role = roles[j][a];
          if (role < 0) {
            if (args[a] != elems[start + j].op.head.args[a]) return std::nullopt;
            continue;
          }
          auto [it, fresh] = var_at[i].emplace(role, args[a]);
          if (!fresh && it->second != args[a]) return std::nullopt;
          auto [sit, sfresh] = seen.emplace(args[a], role);
          if (!sfresh && sit->second != role) return std::nullopt;
        }
      }
    }

    // fresh loop variables, one per role
    std::map<int, Term> loop_var;
    for (int r = 0; r < next_role; ++r) {
      Term v = "?l" + std::to_string(++loop_var_counter_);
      loop_var[r] = v;
      std::vector<Term> mem;
      for (int i = 0; i < iterations; ++i) {
        auto it = var_at[i].find(r);
        if (it != var_at[i].end()) mem.push_back(it->second);
      }
      members_[v] = std::move(mem);
    }

    // rename iteration i's variables to loop variables
    auto rename = [&](int i, const Atom& atom) {
      Atom out = atom;
      for (auto& t : out.args) {
        for (const auto& [role, v] : var_at[i])
          if (v == t) {
            t = loop_var[role];
            break;
          }
      }
      return out;
    };

    PlanElement merged;
    merged.is_loop = true;
    merged.iterations = iterations;
    for (int j = 0; j < period; ++j) {
      const PlanElement& first = elems[start + j];
      if (first.is_loop) {
        merged.body.push_back(first);
        continue;
      }
      PlanElement body_el;
      body_el.is_loop = false;
      body_el.op.head = rename(0, first.op.head);
      // intersect features across iterations, renamed per iteration
      std::vector<KeyProperty> common;
      for (const auto& f : first.op.features)
        common.push_back({f.tau, rename(0, f.atom)});
      std::sort(common.begin(), common.end());
      common.erase(std::unique(common.begin(), common.end()), common.end());
      for (int i = 1; i < iterations; ++i) {
        const PlanElement& el = elems[start + i * period + j];
        std::vector<KeyProperty> renamed;
        for (const auto& f : el.op.features) renamed.push_back({f.tau, rename(i, f.atom)});
        std::sort(renamed.begin(), renamed.end());
        std::vector<KeyProperty> inter;
        std::set_intersection(common.begin(), common.end(), renamed.begin(), renamed.end(),
                              std::back_inserter(inter));
        common = std::move(inter);
      }
      body_el.op.features = std::move(common);
      merged.body.push_back(std::move(body_el));
    }
    return merged;
  }

 private:
  Atom task_;
  std::map<Term, std::vector<Term>>& members_;
  int loop_var_counter_ = 0;
};

void collect_plan_vars(const std::vector<PlanElement>& elems, std::set<Term>& vars) {
  for (const auto& el : elems) {
    if (el.is_loop) {
      collect_plan_vars(el.body, vars);
      continue;
    }
    for (const auto& t : el.op.head.args)
      if (is_variable(t)) vars.insert(t);
    for (const auto& f : el.op.features)
      for (const auto& t : f.atom.args)
        if (is_variable(t)) vars.insert(t);
  }
}

}  // namespace

ActivitySchema learn_schema(const Experience& e, const AbstractionHierarchy& h,
                            const std::string& schema_name) {
  Generalization gen = generalize(e);
  Experience abs = abstract_experience(gen.experience, h);
  std::vector<EnrichedOperator> enriched = extract_features(abs);

  LogicalStructure exp_struct = scope::struct_of_keyprops(abs.keys, abs.task.args);
  std::vector<int> tokens = tokenize(enriched, abs.task, exp_struct);

  std::vector<PlanElement> elements;
  elements.reserve(enriched.size());
  for (const auto& eo : enriched) {
    PlanElement el;
    el.is_loop = false;
    el.op = eo;
    elements.push_back(std::move(el));
  }

  std::map<Term, std::vector<Term>> loop_members;
  LoopMerger merger(abs.task, loop_members);
  loops::RollResult rolled = loops::detect_and_roll(elements, tokens, merger);

  ActivitySchema schema;
  schema.name = schema_name.empty() ? e.name : schema_name;
  schema.task = abs.task;
  schema.scope = scope::canonical_abstraction(exp_struct);
  schema.plan = std::move(rolled.elements);

  // Bind each schema variable to the scope node of its canonical class. A
  // loop variable inherits the class of its member variables when they
  // agree; otherwise it stays unbound.
  auto node_of_canon = [&](const std::string& canon) -> std::string {
    for (std::size_t n = 0; n < schema.scope.nodes.size(); ++n)
      if (scope::canonical_name(schema.scope, n).str() == canon)
        return schema.scope.nodes[n].name;
    return "";
  };
  auto canon_of_var = [&](const Term& v) -> std::string {
    int idx = exp_struct.node_index(v);
    if (idx < 0) return "";
    return scope::canonical_name(exp_struct, idx).str();
  };

  std::set<Term> vars;
  for (const auto& t : schema.task.args)
    if (is_variable(t)) vars.insert(t);
  collect_plan_vars(schema.plan, vars);

  for (const auto& v : vars) {
    std::string canon;
    auto mem = loop_members.find(v);
    if (mem != loop_members.end()) {
      for (const auto& m : mem->second) {
        std::string c = canon_of_var(m);
        if (canon.empty()) canon = c;
        else if (canon != c) { canon.clear(); break; }
      }
    } else {
      canon = canon_of_var(v);
    }
    if (canon.empty()) continue;
    std::string node = node_of_canon(canon);
    if (!node.empty()) schema.bindings.emplace_back(v, node);
  }
  std::sort(schema.bindings.begin(), schema.bindings.end());
  return schema;
}

}  // namespace ebpd::learner
