// Readers and writers for the five file kinds used by the toolkit:
// domains, abstraction hierarchies, experiences, task problems and activity
// schemata. All parsers throw ParseError with a source span on bad input;
// writers produce deterministic text that parses back to an equal value.
#ifndef EBPD_IO_HPP
#define EBPD_IO_HPP

#include <string>

#include "ebpd/core.hpp"
#include "ebpd/sexpr.hpp"

namespace ebpd::io {

enum class FileKind { Domain, Hierarchy, Experience, Problem, Schema };

// Inspects a top-level (define (kind name) ...) form.
FileKind classify(const SExpr& e);

PlanningDomain parse_domain(const SExpr& e);
AbstractionHierarchy parse_hierarchy(const SExpr& e);
Experience parse_experience(const SExpr& e);
TaskProblem parse_problem(const SExpr& e);
ActivitySchema parse_schema(const SExpr& e);

// File front-ends; each file holds exactly one define form.
PlanningDomain load_domain(const std::string& path);
AbstractionHierarchy load_hierarchy(const std::string& path);
Experience load_experience(const std::string& path);
TaskProblem load_problem(const std::string& path);
ActivitySchema load_schema(const std::string& path);

std::string write_domain(const PlanningDomain& d);
std::string write_hierarchy(const AbstractionHierarchy& h);
std::string write_experience(const Experience& e);
std::string write_problem(const TaskProblem& p);
std::string write_schema(const ActivitySchema& s);

void save_text(const std::string& path, const std::string& text);

}  // namespace ebpd::io

#endif
