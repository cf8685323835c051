#include "ebpd/scope.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <set>
#include <sstream>

namespace ebpd::scope {

LogicalStructure struct_of_keyprops(const std::vector<KeyProperty>& keys,
                                    const std::vector<Term>& protected_args) {
  LogicalStructure s;
  s.three_valued = false;

  std::set<Term> universe;
  for (const KeyProperty& k : keys)
    for (const Term& t : k.atom.args) universe.insert(t);

  std::map<Term, int> index;
  for (const Term& t : universe) {
    index[t] = static_cast<int>(s.nodes.size());
    s.nodes.push_back({t, false, {}});
  }
  for (std::size_t i = 0; i < protected_args.size(); ++i) {
    auto it = index.find(protected_args[i]);
    if (it != index.end())
      s.nodes[static_cast<std::size_t>(it->second)].task_pos.push_back(static_cast<int>(i) + 1);
  }

  for (const KeyProperty& k : keys) {
    std::vector<int> tuple;
    tuple.reserve(k.atom.args.size());
    for (const Term& t : k.atom.args) tuple.push_back(index.at(t));
    s.iota[LogicalStructure::EntryKey{k.tau, k.atom.pred, tuple}] = TruthValue::True;
  }
  return s;
}

namespace {

// Canonical names of every node in one pass over the interpretation.
std::vector<CanonicalName> all_canonical_names(const LogicalStructure& s) {
  std::vector<CanonicalName> names(s.nodes.size());
  for (const auto& [key, val] : s.iota) {
    const auto& [tau, pred, tuple] = key;
    if (tuple.size() == 1 && val == TruthValue::True)
      names[static_cast<std::size_t>(tuple[0])].unary.emplace_back(tau, pred);
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    std::sort(names[i].unary.begin(), names[i].unary.end());
    names[i].task_pos = s.nodes[i].task_pos;
  }
  return names;
}

}  // namespace

CanonicalName canonical_name(const LogicalStructure& s, int node) {
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

namespace {

std::string node_name_for(const CanonicalName& cn) {
  std::string out = "?";
  for (const auto& [tau, pred] : cn.unary) {
    if (out.size() > 1) out += '-';
    if (tau != Tau::Static) {
      out += tau_name(tau);
      out += '-';
    }
    out += pred;
  }
  if (out.size() == 1) out += "thing";
  for (int p : cn.task_pos) out += "-t" + std::to_string(p);
  return out;
}

}  // namespace

LogicalStructure canonical_abstraction(const LogicalStructure& s) {
  assert(!s.three_valued);

  const int n = static_cast<int>(s.nodes.size());
  const std::vector<CanonicalName> names = all_canonical_names(s);

  std::map<CanonicalName, std::vector<int>> groups;
  for (int i = 0; i < n; ++i) groups[names[static_cast<std::size_t>(i)]].push_back(i);

  LogicalStructure out;
  out.three_valued = true;
  std::vector<int> to_abstract(static_cast<std::size_t>(n), -1);
  std::vector<long> group_size;
  std::set<std::string> used_names;
  for (const auto& [cn, members] : groups) {
    std::string name = node_name_for(cn);
    while (!used_names.insert(name).second) name += "'";
    LogicalStructure::Node node;
    node.name = name;
    node.summary = members.size() >= 2;
    node.task_pos = cn.task_pos;
    for (int m : members) to_abstract[static_cast<std::size_t>(m)] = static_cast<int>(out.nodes.size());
    out.nodes.push_back(std::move(node));
    group_size.push_back(static_cast<long>(members.size()));
  }

  // Count definite tuples per abstract tuple; the join is True when every
  // concrete tuple mapping there is true, Half otherwise, and entries with
  // no true tuple stay absent (False).
  std::map<LogicalStructure::EntryKey, long> true_count;
  for (const auto& [key, val] : s.iota) {
    if (val != TruthValue::True) continue;
    auto [tau, pred, tuple] = key;
    for (int& t : tuple) t = to_abstract[static_cast<std::size_t>(t)];
    ++true_count[LogicalStructure::EntryKey{tau, pred, tuple}];
  }
  for (const auto& [key, count] : true_count) {
    const auto& tuple = std::get<2>(key);
    long total = 1;
    for (int t : tuple) total *= group_size[static_cast<std::size_t>(t)];
    out.iota[key] = (count == total) ? TruthValue::True : TruthValue::Half;
  }
  return out;
}

std::vector<KeyProperty> problem_keyprops(const TaskProblem& p, const AbstractionHierarchy& h) {
  std::vector<KeyProperty> keys;
  auto add = [&](Tau tau, const std::vector<Atom>& atoms) {
    for (const Atom& a : atoms)
      if (std::optional<Atom> mapped = h.map_predicate(a)) keys.push_back({tau, *mapped});
  };
  add(Tau::Static, p.statics);
  add(Tau::Init, p.init);
  add(Tau::End, p.goal);
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return keys;
}

LogicalStructure problem_to_struct(const TaskProblem& p, const AbstractionHierarchy& h) {
  return struct_of_keyprops(problem_keyprops(p, h), p.task.args);
}

EmbedResult embeds(const LogicalStructure& c, const LogicalStructure& s) {
  EmbedResult r;

  const std::vector<CanonicalName> scope_names = all_canonical_names(s);
  std::map<CanonicalName, int> abstract_by_name;
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    if (!abstract_by_name.emplace(scope_names[i], static_cast<int>(i)).second) {
      r.reason = "scope has two nodes with canonical name " + scope_names[i].str();
      return r;
    }
  }

  r.mapping.assign(c.nodes.size(), -1);
  std::vector<std::vector<int>> preimage(s.nodes.size());
  const std::vector<CanonicalName> concrete_names = all_canonical_names(c);
  for (std::size_t i = 0; i < c.nodes.size(); ++i) {
    auto it = abstract_by_name.find(concrete_names[i]);
    if (it == abstract_by_name.end()) {
      r.reason = "object " + c.nodes[i].name + " with canonical name " +
                 concrete_names[i].str() + " has no scope node";
      return r;
    }
    r.mapping[i] = it->second;
    preimage[static_cast<std::size_t>(it->second)].push_back(static_cast<int>(i));
  }

  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    if (preimage[i].empty()) {
      r.reason = "scope node " + s.nodes[i].name + " receives no object";
      return r;
    }
    if (!s.nodes[i].summary && preimage[i].size() > 1) {
      r.reason = "scope node " + s.nodes[i].name + " is not a summary node but receives " +
                 std::to_string(preimage[i].size()) + " objects";
      return r;
    }
  }

  // Every true concrete entry must map to a non-false scope entry.
  for (const auto& [key, val] : c.iota) {
    if (val != TruthValue::True) continue;
    auto [tau, pred, tuple] = key;
    for (int& t : tuple) t = r.mapping[static_cast<std::size_t>(t)];
    if (s.value(tau, pred, tuple) == TruthValue::False) {
      r.reason = "definite entry " + std::string(tau_name(tau)) + " " + pred +
                 " holds in the problem but is false in the scope";
      return r;
    }
  }

  // Every definite scope entry must hold of all concrete tuples mapped there.
  for (const auto& [key, val] : s.iota) {
    if (val != TruthValue::True) continue;
    const auto& [tau, pred, tuple] = key;
    std::vector<std::size_t> pick(tuple.size(), 0);
    for (;;) {
      std::vector<int> concrete(tuple.size());
      for (std::size_t k = 0; k < tuple.size(); ++k)
        concrete[k] = preimage[static_cast<std::size_t>(tuple[k])][pick[k]];
      if (c.value(tau, pred, concrete) != TruthValue::True) {
        r.reason = "scope requires " + std::string(tau_name(tau)) + " " + pred +
                   " of every object in its classes, violated in the problem";
        return r;
      }
      std::size_t k = 0;
      for (; k < tuple.size(); ++k) {
        if (++pick[k] < preimage[static_cast<std::size_t>(tuple[k])].size()) break;
        pick[k] = 0;
      }
      if (k == tuple.size()) break;
    }
  }

  r.embedded = true;
  return r;
}

std::string to_graph(const LogicalStructure& s) {
  std::ostringstream os;
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    os << "node " << s.nodes[i].name << " summary=" << (s.nodes[i].summary ? 1 : 0)
       << " canon=" << canonical_name(s, static_cast<int>(i)).str() << '\n';
  }
  for (const auto& [key, val] : s.iota) {
    if (val == TruthValue::False) continue;
    const auto& [tau, pred, tuple] = key;
    os << "edge " << tau_name(tau) << ' ' << pred;
    for (int t : tuple) os << ' ' << s.nodes[static_cast<std::size_t>(t)].name;
    os << " value=" << (val == TruthValue::True ? "1" : "1/2") << '\n';
  }
  return os.str();
}

}  // namespace ebpd::scope
