#include "ebpd/planner.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace ebpd::planner {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

using AtomSet = std::set<Atom>;

// Existential match of a partially ground atom against a set: unbound
// variables may bind to anything, repeated variables consistently.
bool match_atom(const Atom& pattern, const AtomSet& facts) {
  bool has_var = false;
  for (const auto& t : pattern.args)
    if (is_variable(t)) { has_var = true; break; }
  if (!has_var) return facts.count(pattern) > 0;
  for (const auto& f : facts) {
    if (f.pred != pattern.pred || f.args.size() != pattern.args.size()) continue;
    std::map<Term, Term> local;
    bool ok = true;
    for (std::size_t i = 0; i < pattern.args.size() && ok; ++i) {
      const Term& p = pattern.args[i];
      if (!is_variable(p)) {
        ok = p == f.args[i];
      } else {
        auto [it, fresh] = local.emplace(p, f.args[i]);
        if (!fresh) ok = it->second == f.args[i];
      }
    }
    if (ok) return true;
  }
  return false;
}

// Grounds an operator head left to right, pruning as soon as a fully bound
// static precondition falls outside sigma. `fixed` pins argument positions.
void ground_heads(const Operator& op, const std::map<int, Term>& fixed,
                  const std::vector<Term>& objects, const AtomSet& sigma,
                  std::vector<std::map<Term, Term>>& out) {
  std::map<Term, Term> sub;
  for (const auto& [pos, obj] : fixed) {
    const Term& v = op.head.args[static_cast<std::size_t>(pos)];
    auto it = sub.find(v);
    if (it != sub.end() && it->second != obj) return;  // repeated var conflict
    sub[v] = obj;
  }

  std::vector<Term> vars;
  for (const auto& v : op.head.args)
    if (is_variable(v) && !sub.count(v) &&
        std::find(vars.begin(), vars.end(), v) == vars.end())
      vars.push_back(v);

  // static atoms checked as soon as their last variable is bound
  auto statics_ok = [&](const std::map<Term, Term>& s, const Term& just_bound) {
    for (const auto& a : op.static_pre) {
      bool mentions = false, ground = true;
      for (const auto& t : a.args) {
        if (t == just_bound) mentions = true;
        if (is_variable(t) && !s.count(t)) ground = false;
      }
      if (!mentions || !ground) continue;
      if (!sigma.count(substitute(a, s))) return false;
    }
    return true;
  };
  // atoms ground from the start (all constants or pinned)
  for (const auto& a : op.static_pre) {
    bool ground = true;
    for (const auto& t : a.args)
      if (is_variable(t) && !sub.count(t)) ground = false;
    if (ground && !sigma.count(substitute(a, sub))) return;
  }

  std::function<void(std::size_t)> rec = [&](std::size_t vi) {
    if (vi == vars.size()) {
      out.push_back(sub);
      return;
    }
    for (const auto& obj : objects) {
      sub[vars[vi]] = obj;
      if (statics_ok(sub, vars[vi])) rec(vi + 1);
      sub.erase(vars[vi]);
    }
  };
  rec(0);
}

struct GroundAction {
  Atom head;
  std::vector<Atom> pre;
  std::vector<Literal> effects;

  bool operator<(const GroundAction& o) const { return head < o.head; }
};

GroundAction instantiate(const Operator& op, const std::map<Term, Term>& sub) {
  GroundAction g;
  g.head = substitute(op.head, sub);
  for (const auto& a : op.pre) g.pre.push_back(substitute(a, sub));
  for (const auto& l : op.effects) g.effects.push_back({l.positive, substitute(l.atom, sub)});
  return g;
}

bool applicable(const GroundAction& g, const AtomSet& state) {
  for (const auto& a : g.pre)
    if (!state.count(a)) return false;
  return true;
}

// Applies effects and records the exact delta for undo.
struct Delta {
  std::vector<Atom> added, removed;
};

Delta apply_effects(const std::vector<Literal>& effects, AtomSet& state) {
  Delta d;
  for (const auto& l : effects) {
    if (l.positive) {
      if (state.insert(l.atom).second) d.added.push_back(l.atom);
    } else if (state.erase(l.atom)) {
      d.removed.push_back(l.atom);
    }
  }
  return d;
}

void undo_effects(const Delta& d, AtomSet& state) {
  for (const auto& a : d.added) state.erase(a);
  for (const auto& a : d.removed) state.insert(a);
}

}  // namespace

RetrievalResult retrieve(const std::vector<ActivitySchema>& library, const TaskProblem& p,
                         const AbstractionHierarchy& h) {
  RetrievalResult r;
  auto t0 = Clock::now();
  LogicalStructure c = scope::problem_to_struct(p, h);
  for (std::size_t i = 0; i < library.size(); ++i) {
    if (library[i].task.pred != p.task.pred ||
        library[i].task.args.size() != p.task.args.size()) {
      r.rejections.push_back("task head mismatch");
      continue;
    }
    scope::EmbedResult e = scope::embeds(c, library[i].scope);
    if (e.embedded) {
      r.index = static_cast<int>(i);
      r.witness = std::move(e);
      break;
    }
    r.rejections.push_back(e.reason);
  }
  r.retrieval_ms = ms_since(t0);
  return r;
}

namespace {

// Ownership of plan variables: each variable is instantiated either once for
// the whole walk (global) or afresh per iteration of the innermost loop that
// contains all its occurrences.
void collect_var_paths(const std::vector<PlanElement>& elems,
                       std::vector<const PlanElement*>& stack,
                       std::map<Term, std::vector<std::vector<const PlanElement*>>>& paths) {
  for (const auto& el : elems) {
    if (el.is_loop) {
      stack.push_back(&el);
      collect_var_paths(el.body, stack, paths);
      stack.pop_back();
      continue;
    }
    auto note = [&](const Term& t) {
      if (is_variable(t)) paths[t].push_back(stack);
    };
    for (const auto& t : el.op.head.args) note(t);
    for (const auto& f : el.op.features)
      for (const auto& t : f.atom.args) note(t);
  }
}

std::map<const PlanElement*, std::vector<Term>> loop_locals(const ActivitySchema& schema) {
  std::map<Term, std::vector<std::vector<const PlanElement*>>> paths;
  std::vector<const PlanElement*> stack;
  collect_var_paths(schema.plan, stack, paths);

  std::set<Term> task_vars(schema.task.args.begin(), schema.task.args.end());
  std::map<const PlanElement*, std::vector<Term>> locals;
  for (const auto& [var, occ] : paths) {
    if (task_vars.count(var)) continue;
    // deepest loop prefix common to every occurrence
    std::size_t depth = occ.front().size();
    for (const auto& path : occ) {
      depth = std::min(depth, path.size());
      for (std::size_t d = 0; d < depth; ++d)
        if (path[d] != occ.front()[d]) { depth = d; break; }
    }
    if (depth > 0) locals[occ.front()[depth - 1]].push_back(var);
  }
  return locals;
}

class AsbpWalker {
 public:
  AsbpWalker(const ActivitySchema& schema, const PlanningDomain& dom,
             const std::vector<Term>& class_objects_domain, const AsbpOptions& opts)
      : schema_(schema), dom_(dom), opts_(opts) {
    locals_ = loop_locals(schema);
    loop_cap_ = opts.max_loop_iterations > 0
                    ? opts.max_loop_iterations
                    : static_cast<int>(class_objects_domain.size()) + 2;
  }

  AtomSet sigma, state;
  AtomSet init_facts, goal_facts;
  std::map<Term, std::vector<Term>> candidates;  // var -> objects of its class
  std::vector<Term> all_objects;

  bool solve(AsbpResult& out) {
    bool ok = run(schema_.plan, 0, [this] { return goal_reached(); });
    out.plan = plan_;
    out.evaluated_states = evals_;
    if (aborted_) out.note = "evaluation budget exhausted";
    return ok;
  }

  void bind(const Term& var, const Term& obj) { sub_[var] = obj; }

 private:
  bool goal_reached() {
    for (const auto& g : goal_facts)
      if (!state.count(g) && !sigma.count(g)) return false;
    return true;
  }

  const std::vector<Term>& candidates_for(const Term& var) {
    auto it = candidates.find(var);
    return it == candidates.end() ? all_objects : it->second;
  }

  // Number of features not satisfied by the problem's key properties under
  // the current substitution; unbound feature variables match existentially.
  int feature_cost(const std::vector<KeyProperty>& features, int* end_miss) {
    int cost = 0;
    if (end_miss) *end_miss = 0;
    for (const auto& f : features) {
      const AtomSet* facts = f.tau == Tau::Static ? &sigma
                             : f.tau == Tau::Init ? &init_facts
                                                  : &goal_facts;
      if (!match_atom(substitute(f.atom, sub_), *facts)) {
        ++cost;
        if (end_miss && f.tau == Tau::End) ++*end_miss;
      }
    }
    return cost;
  }

  bool run(const std::vector<PlanElement>& elems, std::size_t i,
           const std::function<bool()>& cont) {
    if (aborted_) return false;
    if (i == elems.size()) return cont();
    const PlanElement& el = elems[i];
    auto next = [this, &elems, i, &cont] { return run(elems, i + 1, cont); };
    if (el.is_loop) return run_loop(el, 0, next);
    return run_action(el.op, next);
  }

  bool run_loop(const PlanElement& loop, int iter, const std::function<bool()>& exit_cont) {
    if (aborted_) return false;
    if (iter < loop_cap_) {
      // one more iteration: clear this loop's variables, walk the body, then
      // come back for the iterate-vs-exit decision again
      auto saved = clear_locals(loop);
      if (run(loop.body, 0,
              [this, &loop, iter, &exit_cont] { return run_loop(loop, iter + 1, exit_cont); }))
        return true;
      restore_locals(saved);
    }
    return exit_cont();
  }

  bool run_action(const EnrichedOperator& eo, const std::function<bool()>& next) {
    const Operator* op = dom_.find_operator(eo.head.pred, eo.head.args.size());
    if (!op) return false;

    // schema head arguments not yet bound, in head order, deduplicated
    std::vector<Term> free_vars;
    for (const auto& a : eo.head.args)
      if (is_variable(a) && !sub_.count(a) &&
          std::find(free_vars.begin(), free_vars.end(), a) == free_vars.end())
        free_vars.push_back(a);

    struct Choice {
      int cost;
      int end_miss;
      std::vector<Term> objs;
    };
    std::vector<Choice> choices;

    std::vector<Term> pick(free_vars.size());
    std::function<void(std::size_t)> enumerate = [&](std::size_t vi) {
      if (aborted_) return;
      if (vi == free_vars.size()) {
        if (++evals_ >= opts_.max_evaluations) aborted_ = true;
        // schema head -> domain operator variables -> ground action
        std::map<Term, Term> head_sub;
        for (std::size_t k = 0; k < eo.head.args.size(); ++k) {
          Term actual = eo.head.args[k];
          if (is_variable(actual)) actual = sub_.at(actual);
          const Term& formal = op->head.args[k];
          auto it = head_sub.find(formal);
          if (it != head_sub.end() && it->second != actual) return;
          head_sub[formal] = actual;
        }
        GroundAction g = instantiate(*op, head_sub);
        for (const auto& a : g.pre)
          if (!state.count(a)) return;
        for (const auto& a : op->static_pre)
          if (!sigma.count(substitute(a, head_sub))) return;
        int end_miss = 0;
        int cost = feature_cost(eo.features, &end_miss);
        choices.push_back({cost, end_miss, pick});
        return;
      }
      for (const auto& obj : candidates_for(free_vars[vi])) {
        pick[vi] = obj;
        sub_[free_vars[vi]] = obj;
        enumerate(vi + 1);
        sub_.erase(free_vars[vi]);
      }
    };
    enumerate(0);

    std::stable_sort(choices.begin(), choices.end(), [&](const Choice& a, const Choice& b) {
      if (a.cost != b.cost) return a.cost < b.cost;
      if (opts_.goal_tie_break && a.end_miss != b.end_miss) return a.end_miss < b.end_miss;
      return a.objs < b.objs;
    });

    for (const auto& ch : choices) {
      if (aborted_) return false;
      for (std::size_t vi = 0; vi < free_vars.size(); ++vi) sub_[free_vars[vi]] = ch.objs[vi];
      std::map<Term, Term> head_sub;
      for (std::size_t k = 0; k < eo.head.args.size(); ++k) {
        Term actual = eo.head.args[k];
        if (is_variable(actual)) actual = sub_.at(actual);
        head_sub[op->head.args[k]] = actual;
      }
      GroundAction g = instantiate(*op, head_sub);
      Delta d = apply_effects(g.effects, state);
      plan_.push_back(g.head);
      if (next()) return true;
      plan_.pop_back();
      undo_effects(d, state);
      for (const auto& v : free_vars) sub_.erase(v);
    }
    return false;
  }

  std::vector<std::pair<Term, Term>> clear_locals(const PlanElement& loop) {
    std::vector<std::pair<Term, Term>> saved;
    auto it = locals_.find(&loop);
    if (it == locals_.end()) return saved;
    for (const auto& v : it->second) {
      auto s = sub_.find(v);
      if (s != sub_.end()) {
        saved.emplace_back(v, s->second);
        sub_.erase(s);
      }
    }
    return saved;
  }

  void restore_locals(const std::vector<std::pair<Term, Term>>& saved) {
    for (const auto& [v, obj] : saved) sub_[v] = obj;
  }

  const ActivitySchema& schema_;
  const PlanningDomain& dom_;
  AsbpOptions opts_;
  std::map<const PlanElement*, std::vector<Term>> locals_;
  int loop_cap_;
  std::map<Term, Term> sub_;
  std::vector<Atom> plan_;
  long evals_ = 0;
  bool aborted_ = false;
};

}  // namespace

AsbpResult asbp(const ActivitySchema& schema, const TaskProblem& problem,
                const AbstractionHierarchy& h, const PlanningDomain& abstract_domain,
                const scope::EmbedResult& witness, const AsbpOptions& opts) {
  AsbpResult out;
  auto t0 = Clock::now();

  if (schema.task.pred != problem.task.pred ||
      schema.task.args.size() != problem.task.args.size()) {
    out.note = "task head mismatch";
    out.search_ms = ms_since(t0);
    return out;
  }

  std::vector<KeyProperty> keys = scope::problem_keyprops(problem, h);
  LogicalStructure c = scope::struct_of_keyprops(keys, problem.task.args);
  if (witness.mapping.size() != c.nodes.size()) {
    out.note = "witness does not fit this problem";
    out.search_ms = ms_since(t0);
    return out;
  }

  AsbpWalker walker(schema, abstract_domain, problem.objects, opts);
  for (const auto& k : keys) {
    if (k.tau == Tau::Static) walker.sigma.insert(k.atom);
    else if (k.tau == Tau::Init) walker.init_facts.insert(k.atom);
    else walker.goal_facts.insert(k.atom);
  }
  walker.state = walker.init_facts;

  // objects of each scope class, through the witness
  std::map<std::string, std::vector<Term>> class_objects;
  for (std::size_t i = 0; i < c.nodes.size(); ++i) {
    const std::string& scope_node =
        schema.scope.nodes[static_cast<std::size_t>(witness.mapping[i])].name;
    class_objects[scope_node].push_back(c.nodes[i].name);
  }
  for (auto& [node, objs] : class_objects) std::sort(objs.begin(), objs.end());

  for (const auto& n : c.nodes) walker.all_objects.push_back(n.name);
  std::sort(walker.all_objects.begin(), walker.all_objects.end());

  for (const auto& [var, node] : schema.bindings) {
    auto it = class_objects.find(node);
    if (it != class_objects.end()) walker.candidates[var] = it->second;
    else walker.candidates[var] = {};
  }

  // unify the schema task with the problem task
  for (std::size_t i = 0; i < schema.task.args.size(); ++i) {
    const Term& formal = schema.task.args[i];
    if (is_variable(formal)) walker.bind(formal, problem.task.args[i]);
    else if (formal != problem.task.args[i]) {
      out.note = "task constant mismatch";
      out.search_ms = ms_since(t0);
      return out;
    }
  }

  out.solved = walker.solve(out);
  if (!out.solved && out.note.empty()) out.note = "no consistent instantiation";
  out.search_ms = ms_since(t0);
  return out;
}

SbpResult sbp(const std::vector<Atom>& abstract_plan, const TaskProblem& problem,
              const AbstractionHierarchy& h, const PlanningDomain& concrete_domain,
              const SbpOptions& opts) {
  SbpResult out;
  AtomSet sigma(problem.statics.begin(), problem.statics.end());
  AtomSet state(problem.init.begin(), problem.init.end());

  std::vector<Term> objects = problem.objects;
  std::sort(objects.begin(), objects.end());

  // ground actions of dropped-class operators, for gap filling
  std::vector<GroundAction> fillers;
  for (const auto& entry : h.operators) {
    if (entry.to) continue;
    const Operator* op =
        concrete_domain.find_operator(entry.from.pred, entry.from.args.size());
    if (!op) continue;
    std::vector<std::map<Term, Term>> subs;
    ground_heads(*op, {}, objects, sigma, subs);
    for (const auto& s : subs) fillers.push_back(instantiate(*op, s));
  }
  std::sort(fillers.begin(), fillers.end());

  for (std::size_t ai = 0; ai < abstract_plan.size(); ++ai) {
    const Atom& a = abstract_plan[ai];

    // concrete candidates for this abstract action
    std::vector<GroundAction> cands;
    for (const auto& entry : h.operators) {
      if (!entry.to || entry.to->pred != a.pred || entry.to->args.size() != a.args.size())
        continue;
      const Operator* op =
          concrete_domain.find_operator(entry.from.pred, entry.from.args.size());
      if (!op) continue;
      std::map<int, Term> fixed;
      for (std::size_t k = 0; k < entry.proj.size(); ++k) fixed[entry.proj[k]] = a.args[k];
      std::vector<std::map<Term, Term>> subs;
      ground_heads(*op, fixed, objects, sigma, subs);
      for (const auto& s : subs) cands.push_back(instantiate(*op, s));
    }
    std::sort(cands.begin(), cands.end());
    if (cands.empty()) {
      out.note = "no concrete operator refines " + a.str();
      return out;
    }

    auto try_apply = [&](const AtomSet& st, const GroundAction** hit) {
      for (const auto& c : cands)
        if (applicable(c, st)) { *hit = &c; return true; }
      return false;
    };

    const GroundAction* hit = nullptr;
    if (try_apply(state, &hit)) {
      apply_effects(hit->effects, state);
      out.plan.push_back(hit->head);
      continue;
    }

    // breadth-first gap fill over dropped-class actions
    struct Node {
      AtomSet state;
      std::vector<Atom> path;
    };
    std::deque<Node> queue{{state, {}}};
    std::set<std::vector<Atom>> seen;
    {
      std::vector<Atom> key(state.begin(), state.end());
      seen.insert(key);
    }
    bool filled = false;
    while (!queue.empty() && !filled) {
      Node n = std::move(queue.front());
      queue.pop_front();
      if (static_cast<int>(n.path.size()) >= opts.depth_bound) continue;
      for (const auto& f : fillers) {
        if (!applicable(f, n.state)) continue;
        Node next{n.state, n.path};
        apply_effects(f.effects, next.state);
        next.path.push_back(f.head);
        std::vector<Atom> key(next.state.begin(), next.state.end());
        if (!seen.insert(key).second) continue;
        if (try_apply(next.state, &hit)) {
          for (const auto& step : next.path) out.plan.push_back(step);
          apply_effects(hit->effects, next.state);
          out.plan.push_back(hit->head);
          state = next.state;
          filled = true;
          break;
        }
        queue.push_back(std::move(next));
      }
    }
    if (!filled) {
      out.note = "no gap fill within depth bound before " + a.str();
      return out;
    }
  }
  out.solved = true;
  return out;
}

ValidationResult validate_plan(const PlanningDomain& d, const TaskProblem& p,
                               const std::vector<Atom>& plan) {
  ValidationResult r;
  AtomSet sigma(p.statics.begin(), p.statics.end());
  AtomSet state(p.init.begin(), p.init.end());

  for (std::size_t i = 0; i < plan.size(); ++i) {
    const Atom& act = plan[i];
    const Operator* op = d.find_operator(act.pred, act.args.size());
    if (!op) {
      r.failed_index = static_cast<int>(i);
      r.reason = "unknown operator " + act.str();
      return r;
    }
    std::map<Term, Term> sub;
    bool consistent = true;
    for (std::size_t k = 0; k < act.args.size(); ++k) {
      auto [it, fresh] = sub.emplace(op->head.args[k], act.args[k]);
      if (!fresh && it->second != act.args[k]) consistent = false;
    }
    if (!consistent) {
      r.failed_index = static_cast<int>(i);
      r.reason = "inconsistent arguments in " + act.str();
      return r;
    }
    for (const auto& a : op->static_pre) {
      if (!sigma.count(substitute(a, sub))) {
        r.failed_index = static_cast<int>(i);
        r.reason = "static precondition " + substitute(a, sub).str() + " fails at " + act.str();
        return r;
      }
    }
    for (const auto& a : op->pre) {
      if (!state.count(substitute(a, sub))) {
        r.failed_index = static_cast<int>(i);
        r.reason = "precondition " + substitute(a, sub).str() + " fails at " + act.str();
        return r;
      }
    }
    for (const auto& l : op->effects) {
      Atom ground = substitute(l.atom, sub);
      if (l.positive) state.insert(ground);
      else state.erase(ground);
    }
  }
  for (const auto& g : p.goal) {
    if (!state.count(g) && !sigma.count(g)) {
      r.reason = "goal " + g.str() + " not reached";
      r.final_state.assign(state.begin(), state.end());
      return r;
    }
  }
  r.valid = true;
  r.final_state.assign(state.begin(), state.end());
  return r;
}

BaselineResult baseline_plan(const PlanningDomain& d, const TaskProblem& p,
                             const BaselineOptions& opts) {
  BaselineResult out;
  AtomSet sigma(p.statics.begin(), p.statics.end());

  std::vector<Term> objects = p.objects;
  std::sort(objects.begin(), objects.end());

  std::vector<GroundAction> actions;
  for (const auto& op : d.operators) {
    std::vector<std::map<Term, Term>> subs;
    ground_heads(op, {}, objects, sigma, subs);
    for (const auto& s : subs) actions.push_back(instantiate(op, s));
  }
  std::sort(actions.begin(), actions.end());

  auto is_goal = [&](const AtomSet& st) {
    for (const auto& g : p.goal)
      if (!st.count(g) && !sigma.count(g)) return false;
    return true;
  };

  using StateKey = std::vector<Atom>;
  auto key_of = [](const AtomSet& st) { return StateKey(st.begin(), st.end()); };

  AtomSet start(p.init.begin(), p.init.end());
  std::vector<AtomSet> states{start};
  std::vector<std::pair<long, int>> parent{{-1, -1}};  // state idx, action idx
  std::map<StateKey, long> seen{{key_of(start), 0}};

  std::deque<long> queue{0};
  long goal_idx = is_goal(start) ? 0 : -1;
  while (!queue.empty() && goal_idx < 0) {
    long cur = queue.front();
    queue.pop_front();
    if (++out.expanded > opts.max_nodes) {
      out.note = "node budget exhausted";
      return out;
    }
    for (std::size_t ai = 0; ai < actions.size(); ++ai) {
      if (!applicable(actions[ai], states[static_cast<std::size_t>(cur)])) continue;
      AtomSet next = states[static_cast<std::size_t>(cur)];
      apply_effects(actions[ai].effects, next);
      StateKey k = key_of(next);
      if (seen.count(k)) continue;
      long idx = static_cast<long>(states.size());
      seen.emplace(std::move(k), idx);
      states.push_back(std::move(next));
      parent.emplace_back(cur, static_cast<int>(ai));
      if (is_goal(states.back())) {
        goal_idx = idx;
        break;
      }
      queue.push_back(idx);
    }
  }
  if (goal_idx < 0) {
    if (out.note.empty()) out.note = "no plan";
    return out;
  }
  std::vector<Atom> rev;
  for (long at = goal_idx; parent[static_cast<std::size_t>(at)].first >= 0;
       at = parent[static_cast<std::size_t>(at)].first)
    rev.push_back(actions[static_cast<std::size_t>(parent[static_cast<std::size_t>(at)].second)].head);
  out.plan.assign(rev.rbegin(), rev.rend());
  out.solved = true;
  return out;
}

}  // namespace ebpd::planner
