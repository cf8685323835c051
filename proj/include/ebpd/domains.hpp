// Built-in block-stacking world: concrete and abstract domains, the
// abstraction hierarchy between them, generators for task problems and
// solved experiences in four initial-configuration classes, and a
// classifier that buckets problems by the shape of their abstracted
// structure.
#ifndef EBPD_DOMAINS_HPP
#define EBPD_DOMAINS_HPP

#include <vector>

#include "ebpd/core.hpp"

namespace ebpd::domains {

PlanningDomain stacking_domain();
PlanningDomain stacking_abstract_domain();
AbstractionHierarchy stacking_hierarchy();

// Initial-configuration classes:
//   1 - all blocks loose on the table, target pile empty
//   2 - blocks on a source pile, reds at the bottom, blues on top
//   3 - blocks on a source pile, alternating colors, blue at the bottom
//   4 - blocks on a source pile, alternating colors, red at the bottom
// The goal always builds the target pile with blues at the bottom and reds
// on top. For classes 2-4 the seed shuffles which block sits where in the
// source pile; the goal is derived so the natural unstack/restack order
// achieves it.
TaskProblem gen_stack(int cls, int blues, int reds, unsigned seed);

// A solved experience for the class in its canonical arrangement (identity
// block order), with the full initial and final state recorded as
// key-properties. Throws if the scripted plan fails to validate.
Experience gen_experience(int cls, int blues, int reds);

// Reinterprets an experience as the task problem it solved.
TaskProblem problem_of_experience(const Experience& e);

// Buckets problems by isomorphism of their abstracted structures; returns
// one cell id per problem, numbered in order of first appearance.
std::vector<int> classify_problems(const std::vector<TaskProblem>& problems,
                                   const AbstractionHierarchy& h);

}  // namespace ebpd::domains

#endif
