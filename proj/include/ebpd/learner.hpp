// Learning an activity schema from a single solved experience:
// generalization (constants to variables), abstraction through the
// hierarchy, feature extraction, loop rolling and scope construction.
#ifndef EBPD_LEARNER_HPP
#define EBPD_LEARNER_HPP

#include <map>

#include "ebpd/core.hpp"

namespace ebpd::learner {

struct Generalization {
  Experience experience;
  std::map<Term, Term> substitution;  // constant -> fresh variable
};

// Replaces every constant with a fresh variable ?v1, ?v2, ... in order of
// first occurrence over the plan actions (left to right, argument order),
// then over the task, key-properties and remaining objects. The mapping is
// injective and applied to the whole experience.
Generalization generalize(const Experience& e);

// Maps key-properties through the predicate hierarchy and plan actions
// through the operator hierarchy; nil-mapped entries drop out. Keys are
// deduplicated and sorted.
Experience abstract_experience(const Experience& e, const AbstractionHierarchy& h);

// Features of each plan action: every key-property whose atom shares at
// least one variable with the action's arguments and at least one with the
// task arguments. One enriched operator per plan action, in plan order.
std::vector<EnrichedOperator> extract_features(const Experience& abstract_generalized);

// Token identity used by loop detection: operator name, arity, canonical
// class of each argument, and the shape of those features whose variables
// all lie within the head and task arguments. Returns one token id per
// operator; equal ids mean interchangeable loop iterations.
std::vector<int> tokenize(const std::vector<EnrichedOperator>& ops, const Atom& task,
                          const LogicalStructure& experience_struct);

// Full pipeline: generalize, abstract, extract features, roll loops, build
// the scope by canonical abstraction, and bind every schema variable to its
// scope node.
ActivitySchema learn_schema(const Experience& e, const AbstractionHierarchy& h,
                            const std::string& schema_name = "");

}  // namespace ebpd::learner

#endif
