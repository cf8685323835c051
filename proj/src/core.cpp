#include "ebpd/core.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace ebpd {

std::string Atom::str() const {
  std::ostringstream os;
  os << '(' << pred;
  for (const Term& a : args) os << ' ' << a;
  os << ')';
  return os.str();
}

const char* tau_name(Tau t) {
  switch (t) {
    case Tau::Static: return "static";
    case Tau::Init: return "init";
    case Tau::End: return "end";
  }
  return "?";
}

std::string KeyProperty::str() const {
  return std::string("(") + tau_name(tau) + " " + atom.str() + ")";
}

const Operator* PlanningDomain::find_operator(const std::string& n, std::size_t arity) const {
  for (const Operator& op : operators)
    if (op.head.pred == n && op.head.args.size() == arity) return &op;
  return nullptr;
}

const HierarchyEntry* AbstractionHierarchy::find_predicate(const std::string& n,
                                                           std::size_t arity) const {
  for (const HierarchyEntry& e : predicates)
    if (e.from.pred == n && e.from.args.size() == arity) return &e;
  return nullptr;
}

const HierarchyEntry* AbstractionHierarchy::find_operator(const std::string& n,
                                                          std::size_t arity) const {
  for (const HierarchyEntry& e : operators)
    if (e.from.pred == n && e.from.args.size() == arity) return &e;
  return nullptr;
}

namespace {

std::optional<Atom> map_through(const HierarchyEntry* e, const Atom& a) {
  if (!e || !e->to) return std::nullopt;
  Atom out;
  out.pred = e->to->pred;
  out.args.reserve(e->proj.size());
  for (int idx : e->proj) out.args.push_back(a.args[static_cast<std::size_t>(idx)]);
  return out;
}

}  // namespace

std::optional<Atom> AbstractionHierarchy::map_predicate(const Atom& a) const {
  return map_through(find_predicate(a.pred, a.args.size()), a);
}

std::optional<Atom> AbstractionHierarchy::map_operator(const Atom& a) const {
  return map_through(find_operator(a.pred, a.args.size()), a);
}

TruthValue kleene_join(TruthValue a, TruthValue b) {
  return a == b ? a : TruthValue::Half;
}

std::string CanonicalName::str() const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (const auto& [tau, pred] : unary) {
    if (!first) os << ',';
    first = false;
    os << tau_name(tau) << ':' << pred;
  }
  for (int p : task_pos) {
    if (!first) os << ',';
    first = false;
    os << "task#" << p;
  }
  os << '}';
  return os.str();
}

int LogicalStructure::node_index(const std::string& name) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].name == name) return static_cast<int>(i);
  return -1;
}

TruthValue LogicalStructure::value(Tau tau, const std::string& pred,
                                   const std::vector<int>& tuple) const {
  auto it = iota.find(EntryKey{tau, pred, tuple});
  return it == iota.end() ? TruthValue::False : it->second;
}

namespace {

// Canonical name of a node as recoverable from the structure itself: unary
// entries that are definitely true, plus protection tags.
CanonicalName recovered_name(const LogicalStructure& s, int node) {
  CanonicalName cn;
  for (const auto& [key, val] : s.iota) {
    const auto& [tau, pred, tuple] = key;
    if (tuple.size() == 1 && tuple[0] == node && val == TruthValue::True)
      cn.unary.emplace_back(tau, pred);
  }
  std::sort(cn.unary.begin(), cn.unary.end());
  cn.task_pos = s.nodes[static_cast<std::size_t>(node)].task_pos;
  return cn;
}

}  // namespace

bool LogicalStructure::isomorphic(const LogicalStructure& o) const {
  if (three_valued != o.three_valued) return false;
  if (nodes.size() != o.nodes.size()) return false;

  auto ordering = [](const LogicalStructure& s) {
    std::vector<int> order(s.nodes.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::pair<std::string, bool>> keys(s.nodes.size());
    for (std::size_t i = 0; i < s.nodes.size(); ++i)
      keys[i] = {recovered_name(s, static_cast<int>(i)).str(), s.nodes[i].summary};
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return keys[static_cast<std::size_t>(a)] < keys[static_cast<std::size_t>(b)]; });
    return order;
  };

  std::vector<int> mine = ordering(*this);
  std::vector<int> theirs = ordering(o);

  // Nodes must agree position by position on canonical name and summary flag.
  std::vector<int> my_rank(nodes.size()), their_rank(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    my_rank[static_cast<std::size_t>(mine[i])] = static_cast<int>(i);
    their_rank[static_cast<std::size_t>(theirs[i])] = static_cast<int>(i);
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    int a = mine[i], b = theirs[i];
    if (recovered_name(*this, a).str() != recovered_name(o, b).str()) return false;
    if (nodes[static_cast<std::size_t>(a)].summary != o.nodes[static_cast<std::size_t>(b)].summary)
      return false;
  }

  auto renumber = [](const LogicalStructure& s, const std::vector<int>& rank) {
    std::map<EntryKey, TruthValue> out;
    for (const auto& [key, val] : s.iota) {
      auto [tau, pred, tuple] = key;
      for (int& t : tuple) t = rank[static_cast<std::size_t>(t)];
      out[EntryKey{tau, pred, tuple}] = val;
    }
    return out;
  };
  return renumber(*this, my_rank) == renumber(o, their_rank);
}

const std::string* ActivitySchema::node_of_var(const Term& v) const {
  for (const auto& [var, node] : bindings)
    if (var == v) return &node;
  return nullptr;
}

Atom substitute(const Atom& a, const std::map<Term, Term>& sub) {
  Atom out = a;
  for (Term& t : out.args) {
    auto it = sub.find(t);
    if (it != sub.end()) t = it->second;
  }
  return out;
}

namespace {

void check_operator(const Operator& op, std::vector<Diagnostic>& out) {
  std::set<Term> head_vars;
  for (const Term& t : op.head.args) {
    if (!is_variable(t)) {
      out.push_back({Diagnostic::Severity::Error,
                     "operator " + op.head.pred + ": head argument '" + t + "' is not a variable"});
      continue;
    }
    if (!head_vars.insert(t).second)
      out.push_back({Diagnostic::Severity::Error,
                     "operator " + op.head.pred + ": repeated head variable " + t});
  }
  auto check_body_atom = [&](const Atom& a, const char* where) {
    for (const Term& t : a.args)
      if (is_variable(t) && !head_vars.count(t))
        out.push_back({Diagnostic::Severity::Error,
                       "operator " + op.head.pred + ": " + where + " " + a.str() +
                           " uses variable " + t + " missing from the head"});
  };
  for (const Atom& a : op.static_pre) check_body_atom(a, "static precondition");
  for (const Atom& a : op.pre) check_body_atom(a, "precondition");
  for (const Literal& l : op.effects) check_body_atom(l.atom, "effect");
}

}  // namespace

std::vector<Diagnostic> validate_domain(const PlanningDomain& d) {
  std::vector<Diagnostic> out;
  std::map<std::string, std::size_t> arity;
  for (const Atom& p : d.predicates) {
    auto [it, inserted] = arity.emplace(p.pred, p.args.size());
    if (!inserted && it->second != p.args.size())
      out.push_back({Diagnostic::Severity::Error,
                     "predicate " + p.pred + " declared with conflicting arities"});
  }
  std::set<std::pair<std::string, std::size_t>> heads;
  for (const Operator& op : d.operators) {
    if (!heads.insert({op.head.pred, op.head.args.size()}).second)
      out.push_back({Diagnostic::Severity::Error,
                     "duplicate operator " + op.head.pred + "/" + std::to_string(op.head.args.size())});
    check_operator(op, out);
    auto check_use = [&](const Atom& a, const char* where) {
      auto it = arity.find(a.pred);
      if (it == arity.end())
        out.push_back({Diagnostic::Severity::Warning,
                       "operator " + op.head.pred + ": " + where + " uses undeclared predicate " + a.pred});
      else if (it->second != a.args.size())
        out.push_back({Diagnostic::Severity::Error,
                       "operator " + op.head.pred + ": " + where + " " + a.str() +
                           " does not match declared arity of " + a.pred});
    };
    for (const Atom& a : op.static_pre) check_use(a, "static precondition");
    for (const Atom& a : op.pre) check_use(a, "precondition");
    for (const Literal& l : op.effects) check_use(l.atom, "effect");
  }
  return out;
}

std::vector<Diagnostic> validate_hierarchy(const AbstractionHierarchy& h,
                                           const PlanningDomain& concrete) {
  std::vector<Diagnostic> out;

  auto check_entry = [&](const HierarchyEntry& e, const char* kind) {
    if (!e.to) return;
    if (e.to->args.size() > e.from.args.size())
      out.push_back({Diagnostic::Severity::Error,
                     std::string(kind) + " map " + e.from.str() + " -> " + e.to->str() +
                         ": parent has more arguments than the child"});
    if (e.proj.size() != e.to->args.size()) {
      out.push_back({Diagnostic::Severity::Error,
                     std::string(kind) + " map " + e.from.str() + ": malformed projection"});
      return;
    }
    int prev = -1;
    for (int idx : e.proj) {
      if (idx <= prev || idx >= static_cast<int>(e.from.args.size())) {
        out.push_back({Diagnostic::Severity::Error,
                       std::string(kind) + " map " + e.from.str() + " -> " + e.to->str() +
                           ": projected arguments are not a positional subsequence"});
        break;
      }
      prev = idx;
    }
  };
  for (const HierarchyEntry& e : h.predicates) check_entry(e, "predicate");
  for (const HierarchyEntry& e : h.operators) check_entry(e, "operator");

  for (const Atom& p : concrete.predicates)
    if (!h.find_predicate(p.pred, p.args.size()))
      out.push_back({Diagnostic::Severity::Error,
                     "hierarchy has no entry for predicate " + p.pred + "/" +
                         std::to_string(p.args.size())});
  for (const Operator& op : concrete.operators)
    if (!h.find_operator(op.head.pred, op.head.args.size()))
      out.push_back({Diagnostic::Severity::Error,
                     "hierarchy has no entry for operator " + op.head.pred + "/" +
                         std::to_string(op.head.args.size())});
  return out;
}

}  // namespace ebpd
