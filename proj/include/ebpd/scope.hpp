// Scope of applicability: two-valued structures over key-properties,
// canonical abstraction into three-valued structures, and the embedding
// test that decides whether a problem falls inside a schema's scope.
#ifndef EBPD_SCOPE_HPP
#define EBPD_SCOPE_HPP

#include <string>
#include <vector>

#include "ebpd/core.hpp"

namespace ebpd::scope {

// Two-valued structure of a key-property set. The universe is every term
// occurring in the keys, sorted; `protected_args` (the task arguments, in
// task order) tag their nodes so abstraction never merges them away.
LogicalStructure struct_of_keyprops(const std::vector<KeyProperty>& keys,
                                    const std::vector<Term>& protected_args);

// Canonical name of one node: unary (tau, predicate) pairs that definitely
// hold, plus task-argument tags.
CanonicalName canonical_name(const LogicalStructure& s, int node);

// Canonical abstraction: nodes sharing a canonical name collapse into one
// abstract node (summary when it absorbs two or more), entries join
// Kleene-wise over all concrete tuples mapped onto them. Polynomial in the
// structure size. Input must be two-valued.
LogicalStructure canonical_abstraction(const LogicalStructure& s);

// Key-properties of a problem at the abstract level: statics wrapped as
// static, the initial state as init, the goal as end, all mapped through
// the predicate hierarchy (nil-mapped atoms drop out).
std::vector<KeyProperty> problem_keyprops(const TaskProblem& p, const AbstractionHierarchy& h);

// Two-valued structure of an abstracted problem, task arguments protected.
LogicalStructure problem_to_struct(const TaskProblem& p, const AbstractionHierarchy& h);

struct EmbedResult {
  bool embedded = false;
  std::vector<int> mapping;  // concrete node index -> abstract node index
  std::string reason;        // first failure, for diagnostics

  explicit operator bool() const { return embedded; }
};

// Embedding test of a two-valued structure into a three-valued scope via
// the canonical function (concrete node -> abstract node of equal canonical
// name). Requires the map to be total and surjective, non-summary nodes to
// receive exactly one concrete node, and every definite scope entry to agree
// with all concrete tuples mapped onto it.
EmbedResult embeds(const LogicalStructure& c, const LogicalStructure& s);

// Plain-text graph dump: one node record per object, one edge record per
// non-false entry.
std::string to_graph(const LogicalStructure& s);

}  // namespace ebpd::scope

#endif
