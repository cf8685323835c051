// Schema retrieval and the two-stage planner: an abstract search that walks
// a schema plan (binding variables within their object classes, ranking
// groundings by feature satisfaction) and a refinement stage that maps each
// abstract action back to a concrete one, inserting dropped-class actions
// found by bounded search. Also a plain breadth-first baseline planner and a
// plan validator used as independent checks.
#ifndef EBPD_PLANNER_HPP
#define EBPD_PLANNER_HPP

#include <string>
#include <vector>

#include "ebpd/core.hpp"
#include "ebpd/scope.hpp"

namespace ebpd::planner {

struct RetrievalResult {
  int index = -1;  // library index of the first applicable schema, -1 = none
  scope::EmbedResult witness;
  double retrieval_ms = 0.0;
  std::vector<std::string> rejections;  // one reason per schema tried before a hit
};

// Tries the library in order and returns the first schema whose scope admits
// an embedding of the problem's structure.
RetrievalResult retrieve(const std::vector<ActivitySchema>& library, const TaskProblem& p,
                         const AbstractionHierarchy& h);

struct AsbpOptions {
  bool goal_tie_break = false;  // rank equal-cost groundings by unmet end features first
  long max_evaluations = 5'000'000;
  int max_loop_iterations = 0;  // per loop entry; 0 derives a bound from the object count
};

struct AsbpResult {
  bool solved = false;
  std::vector<Atom> plan;  // ground abstract actions
  long evaluated_states = 0;
  double search_ms = 0.0;
  std::string note;
};

// Depth-first walk of the schema plan with chronological backtracking.
// Groundings draw objects from the problem class matching each variable's
// scope node (through the retrieval witness) and are ordered by the number
// of unsatisfied features, then lexicographically; at a loop, taking one
// more iteration is preferred over exiting.
AsbpResult asbp(const ActivitySchema& schema, const TaskProblem& problem,
                const AbstractionHierarchy& h, const PlanningDomain& abstract_domain,
                const scope::EmbedResult& witness, const AsbpOptions& opts = {});

struct SbpOptions {
  int depth_bound = 8;  // longest gap fill between consecutive abstract actions
};

struct SbpResult {
  bool solved = false;
  std::vector<Atom> plan;  // ground concrete actions
  std::string note;
};

// Refines an abstract plan action by action: each abstract action becomes a
// concrete action through the operator hierarchy (projection indices give
// the known arguments), and when none is applicable a shortest sequence of
// dropped-class actions is inserted first.
SbpResult sbp(const std::vector<Atom>& abstract_plan, const TaskProblem& problem,
              const AbstractionHierarchy& h, const PlanningDomain& concrete_domain,
              const SbpOptions& opts = {});

struct ValidationResult {
  bool valid = false;
  int failed_index = -1;  // position of the first bad action, -1 for goal failure
  std::string reason;
  std::vector<Atom> final_state;
};

// Simulates a ground plan from the problem's initial state and checks the
// goal at the end.
ValidationResult validate_plan(const PlanningDomain& d, const TaskProblem& p,
                               const std::vector<Atom>& plan);

struct BaselineOptions {
  long max_nodes = 5'000'000;
};

struct BaselineResult {
  bool solved = false;
  std::vector<Atom> plan;
  long expanded = 0;
  std::string note;
};

// Uninformed breadth-first search over ground actions; optimal in plan
// length, used as an independent yardstick.
BaselineResult baseline_plan(const PlanningDomain& d, const TaskProblem& p,
                             const BaselineOptions& opts = {});

}  // namespace ebpd::planner

#endif
