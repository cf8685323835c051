// Core model for experience-based planning domains: terms, atoms,
// key-properties, operators, domains, abstraction hierarchies, experiences,
// activity schemata, task problems and three-valued logical structures.
#ifndef EBPD_CORE_HPP
#define EBPD_CORE_HPP

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ebpd {

// Terms are plain strings; variables start with '?'.
using Term = std::string;

inline bool is_variable(const Term& t) { return !t.empty() && t[0] == '?'; }

struct Atom {
  std::string pred;
  std::vector<Term> args;

  auto operator<=>(const Atom&) const = default;
  std::string str() const;
};

// Temporal annotation of a key-property. "during" is accepted as an input
// alias of Static.
enum class Tau : std::uint8_t { Static = 0, Init = 1, End = 2 };

const char* tau_name(Tau t);

struct KeyProperty {
  Tau tau = Tau::Static;
  Atom atom;

  auto operator<=>(const KeyProperty&) const = default;
  std::string str() const;
};

struct Literal {
  bool positive = true;
  Atom atom;

  auto operator<=>(const Literal&) const = default;
};

// Planning operator (h, S, P, E): head, static precondition proved against
// the invariant state, precondition checked against the dynamic state, and
// effects. All body variables must occur in the head.
struct Operator {
  Atom head;
  std::vector<Atom> static_pre;
  std::vector<Atom> pre;
  std::vector<Literal> effects;

  auto operator<=>(const Operator&) const = default;
};

struct PlanningDomain {
  std::string name;
  bool is_abstract = false;
  std::vector<Atom> predicates;  // declared shapes, variable args
  std::vector<Operator> operators;

  auto operator<=>(const PlanningDomain&) const = default;
  const Operator* find_operator(const std::string& name, std::size_t arity) const;
};

// One entry of an abstraction hierarchy: a concrete predicate or operator
// head and its abstract parent, or nil. `proj` gives, for each parent
// argument, the index of the concrete argument it keeps; indices are
// strictly increasing (argument projection is a positional subsequence).
struct HierarchyEntry {
  Atom from;
  std::optional<Atom> to;  // nullopt encodes nil
  std::vector<int> proj;

  auto operator<=>(const HierarchyEntry&) const = default;
};

struct AbstractionHierarchy {
  std::string name;
  std::vector<HierarchyEntry> predicates;
  std::vector<HierarchyEntry> operators;

  auto operator<=>(const AbstractionHierarchy&) const = default;

  const HierarchyEntry* find_predicate(const std::string& name, std::size_t arity) const;
  const HierarchyEntry* find_operator(const std::string& name, std::size_t arity) const;

  // Maps an atom through an entry table; nullopt when the entry is nil or
  // missing.
  std::optional<Atom> map_predicate(const Atom& a) const;
  std::optional<Atom> map_operator(const Atom& a) const;
};

// A single solved experience e = (t, K, pi).
struct Experience {
  std::string name;
  std::string domain_name;
  Atom task;
  std::vector<Term> objects;
  std::vector<KeyProperty> keys;
  std::vector<Atom> plan;

  auto operator<=>(const Experience&) const = default;
};

// Abstract operator enriched with features: key-properties that tie the
// operator's arguments to the task arguments.
struct EnrichedOperator {
  Atom head;
  std::vector<KeyProperty> features;

  auto operator<=>(const EnrichedOperator&) const = default;
};

// Element of a schema plan: either one enriched operator or a loop block
// whose body is itself a sequence of elements.
struct PlanElement {
  bool is_loop = false;
  EnrichedOperator op;             // valid when !is_loop
  std::vector<PlanElement> body;   // valid when is_loop
  // Bookkeeping for loop blocks, not serialized: how many iterations were
  // merged and the token ids the block consumed (for unroll checks).
  int iterations = 0;
  std::vector<int> consumed_tokens;

  bool operator==(const PlanElement& o) const {
    if (is_loop != o.is_loop) return false;
    return is_loop ? body == o.body : op == o.op;
  }
};

enum class TruthValue : std::uint8_t { False = 0, True = 1, Half = 2 };

// Kleene join used by canonical abstraction: equal values keep their value,
// disagreement yields Half.
TruthValue kleene_join(TruthValue a, TruthValue b);

// Canonical name of a structure node: the sorted set of unary
// (tau, predicate) pairs that definitely hold of it, plus the task-argument
// positions when the node is protected.
struct CanonicalName {
  std::vector<std::pair<Tau, std::string>> unary;
  std::vector<int> task_pos;

  auto operator<=>(const CanonicalName&) const = default;
  std::string str() const;
};

// Logical structure over key-properties. Two-valued structures come straight
// from a key-property set; three-valued ones are produced by canonical
// abstraction. The interpretation is sparse: missing entries are False.
struct LogicalStructure {
  struct Node {
    std::string name;
    bool summary = false;
    std::vector<int> task_pos;  // protected task-argument positions
  };

  using EntryKey = std::tuple<Tau, std::string, std::vector<int>>;

  bool three_valued = false;
  std::vector<Node> nodes;
  std::map<EntryKey, TruthValue> iota;

  int node_index(const std::string& name) const;  // -1 when absent
  TruthValue value(Tau tau, const std::string& pred, const std::vector<int>& tuple) const;

  // Structural equality after canonical node ordering; node names are
  // ignored, canonical names and summary flags are not.
  bool isomorphic(const LogicalStructure& o) const;
};

// Activity schema m = (t, Scope, Omega) plus the variable-to-scope-node
// binding needed to instantiate plan variables within their object class.
struct ActivitySchema {
  std::string name;
  Atom task;
  LogicalStructure scope;
  std::vector<std::pair<Term, std::string>> bindings;  // plan var -> scope node
  std::vector<PlanElement> plan;

  const std::string* node_of_var(const Term& v) const;
};

// Task planning problem P = (t, sigma, s0, g).
struct TaskProblem {
  std::string name;
  std::string domain_name;
  Atom task;
  std::vector<Term> objects;
  std::vector<Atom> statics;
  std::vector<Atom> init;
  std::vector<Atom> goal;

  auto operator<=>(const TaskProblem&) const = default;
};

struct Diagnostic {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  std::string message;

  bool is_error() const { return severity == Severity::Error; }
};

// Structural checks for a domain: head variables distinct, body closed under
// the head, declared predicates used consistently.
std::vector<Diagnostic> validate_domain(const PlanningDomain& d);

// Checks a hierarchy against the concrete domain it abstracts: every
// predicate and operator must have an entry, and projections must be
// well-formed positional subsequences.
std::vector<Diagnostic> validate_hierarchy(const AbstractionHierarchy& h,
                                           const PlanningDomain& concrete);

// Applies a substitution to an atom; unmapped variables stay.
Atom substitute(const Atom& a, const std::map<Term, Term>& sub);

}  // namespace ebpd

#endif
