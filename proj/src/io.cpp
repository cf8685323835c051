#include "ebpd/io.hpp"

#include <fstream>
#include <sstream>

namespace ebpd::io {

namespace {

[[noreturn]] void fail(const std::string& msg, const SExpr& at) {
  throw ParseError(msg, at.span);
}

const std::string& need_symbol(const SExpr& e, const char* what) {
  if (e.is_list) fail(std::string("expected ") + what + ", found a list", e);
  return e.symbol;
}

const SExpr& need_list(const SExpr& e, const char* what) {
  if (!e.is_list) fail(std::string("expected ") + what + ", found '" + e.symbol + "'", e);
  return e;
}

Atom parse_atom(const SExpr& e) {
  need_list(e, "an atom");
  if (e.items.empty()) fail("empty atom", e);
  Atom a;
  a.pred = need_symbol(e.items[0], "a predicate name");
  for (std::size_t i = 1; i < e.items.size(); ++i)
    a.args.push_back(need_symbol(e.items[i], "a term"));
  return a;
}

// A condition is a single atom or an (and ...) of atoms.
std::vector<Atom> parse_condition(const SExpr& e) {
  need_list(e, "a condition");
  std::vector<Atom> out;
  if (!e.items.empty() && e.items[0].is_symbol("and")) {
    for (std::size_t i = 1; i < e.items.size(); ++i) out.push_back(parse_atom(e.items[i]));
  } else {
    out.push_back(parse_atom(e));
  }
  return out;
}

std::vector<Literal> parse_effects(const SExpr& e) {
  need_list(e, "an effect");
  std::vector<const SExpr*> parts;
  if (!e.items.empty() && e.items[0].is_symbol("and")) {
    for (std::size_t i = 1; i < e.items.size(); ++i) parts.push_back(&e.items[i]);
  } else {
    parts.push_back(&e);
  }
  std::vector<Literal> out;
  for (const SExpr* p : parts) {
    need_list(*p, "an effect literal");
    if (!p->items.empty() && p->items[0].is_symbol("not")) {
      if (p->items.size() != 2) fail("(not ...) takes exactly one atom", *p);
      out.push_back({false, parse_atom(p->items[1])});
    } else {
      out.push_back({true, parse_atom(*p)});
    }
  }
  return out;
}

Tau parse_tau(const SExpr& e) {
  const std::string& s = need_symbol(e, "a key-property kind");
  if (s == "static" || s == "during") return Tau::Static;
  if (s == "init") return Tau::Init;
  if (s == "end") return Tau::End;
  fail("unknown key-property kind '" + s + "' (want static, during, init or end)", e);
}

KeyProperty parse_keyprop(const SExpr& e) {
  need_list(e, "a key-property");
  if (e.items.size() != 2) fail("key-property takes a kind and an atom", e);
  return {parse_tau(e.items[0]), parse_atom(e.items[1])};
}

// (define (KIND NAME) section...) -> kind symbol, name, section list
struct DefineForm {
  std::string kind;
  std::string name;
  std::vector<const SExpr*> sections;
};

DefineForm open_define(const SExpr& e) {
  need_list(e, "a define form");
  if (e.items.size() < 2 || !e.items[0].is_symbol("define"))
    fail("expected (define (kind name) ...)", e);
  const SExpr& head = need_list(e.items[1], "(kind name)");
  if (head.items.size() != 2) fail("expected (kind name)", head);
  DefineForm f;
  f.kind = need_symbol(head.items[0], "a define kind");
  f.name = need_symbol(head.items[1], "a name");
  for (std::size_t i = 2; i < e.items.size(); ++i) {
    const SExpr& sec = need_list(e.items[i], "a section");
    if (sec.items.empty() || sec.items[0].is_list || sec.items[0].symbol.empty() ||
        sec.items[0].symbol[0] != ':')
      fail("expected a (:section ...) form", sec);
    f.sections.push_back(&sec);
  }
  return f;
}

const SExpr* find_section(const DefineForm& f, const std::string& key) {
  for (const SExpr* s : f.sections)
    if (s->items[0].is_symbol(key)) return s;
  return nullptr;
}

const SExpr& need_section(const DefineForm& f, const std::string& key, const SExpr& whole) {
  const SExpr* s = find_section(f, key);
  if (!s) fail("missing required section " + key, whole);
  return *s;
}

// Keyword arguments inside an :action form: ":key value" pairs after the name.
std::map<std::string, const SExpr*> keyword_args(const SExpr& e, std::size_t from) {
  std::map<std::string, const SExpr*> out;
  for (std::size_t i = from; i + 1 < e.items.size(); i += 2) {
    const std::string& k = need_symbol(e.items[i], "a keyword");
    if (k.empty() || k[0] != ':') fail("expected a :keyword", e.items[i]);
    if (!out.emplace(k, &e.items[i + 1]).second) fail("duplicate keyword " + k, e.items[i]);
  }
  if ((e.items.size() - from) % 2 != 0) fail("dangling keyword argument", e.items.back());
  return out;
}

}  // namespace

FileKind classify(const SExpr& e) {
  DefineForm f = open_define(e);
  if (f.kind == "domain") return FileKind::Domain;
  if (f.kind == "hierarchy") return FileKind::Hierarchy;
  if (f.kind == "experience") return FileKind::Experience;
  if (f.kind == "problem") return FileKind::Problem;
  if (f.kind == "activity-schema") return FileKind::Schema;
  fail("unknown define kind '" + f.kind + "'", e);
}

PlanningDomain parse_domain(const SExpr& e) {
  DefineForm f = open_define(e);
  if (f.kind != "domain") fail("expected (define (domain ...))", e);
  PlanningDomain d;
  d.name = f.name;

  if (const SExpr* lvl = find_section(f, ":level")) {
    if (lvl->items.size() != 2) fail("(:level concrete|abstract)", *lvl);
    const std::string& s = need_symbol(lvl->items[1], "a level");
    if (s == "abstract") d.is_abstract = true;
    else if (s != "concrete") fail("level must be concrete or abstract", lvl->items[1]);
  }

  if (const SExpr* preds = find_section(f, ":predicates"))
    for (std::size_t i = 1; i < preds->items.size(); ++i)
      d.predicates.push_back(parse_atom(preds->items[i]));

  for (const SExpr* sec : f.sections) {
    if (!sec->items[0].is_symbol(":action")) continue;
    if (sec->items.size() < 2) fail("action needs a name", *sec);
    Operator op;
    op.head.pred = need_symbol(sec->items[1], "an action name");
    auto kw = keyword_args(*sec, 2);
    if (auto it = kw.find(":parameters"); it != kw.end()) {
      const SExpr& ps = need_list(*it->second, "a parameter list");
      for (const auto& p : ps.items) op.head.args.push_back(need_symbol(p, "a parameter"));
    }
    if (auto it = kw.find(":static"); it != kw.end()) op.static_pre = parse_condition(*it->second);
    if (auto it = kw.find(":precondition"); it != kw.end()) op.pre = parse_condition(*it->second);
    if (auto it = kw.find(":effect"); it != kw.end()) op.effects = parse_effects(*it->second);
    d.operators.push_back(std::move(op));
  }
  return d;
}

namespace {

// Projection of `to`'s arguments as a strictly increasing subsequence of
// `from`'s; derived from the variable names, never serialized.
std::vector<int> projection_of(const Atom& from, const Atom& to, const SExpr& at) {
  std::vector<int> proj;
  std::size_t start = 0;
  for (const auto& arg : to.args) {
    std::size_t i = start;
    while (i < from.args.size() && from.args[i] != arg) ++i;
    if (i == from.args.size())
      fail("argument '" + arg + "' of '" + to.pred +
               "' is not a forward subsequence match in '" + from.str() + "'",
           at);
    proj.push_back(static_cast<int>(i));
    start = i + 1;
  }
  return proj;
}

std::vector<HierarchyEntry> parse_maps(const SExpr& sec) {
  std::vector<HierarchyEntry> out;
  for (std::size_t i = 1; i < sec.items.size(); ++i) {
    const SExpr& m = need_list(sec.items[i], "a :map form");
    if (m.items.size() != 3 || !m.items[0].is_symbol(":map"))
      fail("expected (:map (from ...) (to ...)|nil)", m);
    HierarchyEntry entry;
    entry.from = parse_atom(m.items[1]);
    if (m.items[2].is_symbol("nil")) {
      entry.to = std::nullopt;
    } else {
      entry.to = parse_atom(m.items[2]);
      entry.proj = projection_of(entry.from, *entry.to, m.items[2]);
    }
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace

AbstractionHierarchy parse_hierarchy(const SExpr& e) {
  DefineForm f = open_define(e);
  if (f.kind != "hierarchy") fail("expected (define (hierarchy ...))", e);
  AbstractionHierarchy h;
  h.name = f.name;
  if (const SExpr* s = find_section(f, ":predicates")) h.predicates = parse_maps(*s);
  if (const SExpr* s = find_section(f, ":operators")) h.operators = parse_maps(*s);
  return h;
}

Experience parse_experience(const SExpr& e) {
  DefineForm f = open_define(e);
  if (f.kind != "experience") fail("expected (define (experience ...))", e);
  Experience x;
  x.name = f.name;

  const SExpr& dom = need_section(f, ":domain", e);
  if (dom.items.size() != 2) fail("(:domain name)", dom);
  x.domain_name = need_symbol(dom.items[1], "a domain name");

  const SExpr& task = need_section(f, ":task", e);
  if (task.items.size() != 2) fail("(:task (name args...))", task);
  x.task = parse_atom(task.items[1]);

  if (const SExpr* objs = find_section(f, ":objects"))
    for (std::size_t i = 1; i < objs->items.size(); ++i)
      x.objects.push_back(need_symbol(objs->items[i], "an object"));

  if (const SExpr* keys = find_section(f, ":key-properties"))
    for (std::size_t i = 1; i < keys->items.size(); ++i)
      x.keys.push_back(parse_keyprop(keys->items[i]));

  if (const SExpr* plan = find_section(f, ":plan"))
    for (std::size_t i = 1; i < plan->items.size(); ++i)
      x.plan.push_back(parse_atom(plan->items[i]));
  return x;
}

TaskProblem parse_problem(const SExpr& e) {
  DefineForm f = open_define(e);
  if (f.kind != "problem") fail("expected (define (problem ...))", e);
  TaskProblem p;
  p.name = f.name;

  const SExpr& dom = need_section(f, ":domain", e);
  if (dom.items.size() != 2) fail("(:domain name)", dom);
  p.domain_name = need_symbol(dom.items[1], "a domain name");

  const SExpr& task = need_section(f, ":task", e);
  if (task.items.size() != 2) fail("(:task (name args...))", task);
  p.task = parse_atom(task.items[1]);

  if (const SExpr* objs = find_section(f, ":objects"))
    for (std::size_t i = 1; i < objs->items.size(); ++i)
      p.objects.push_back(need_symbol(objs->items[i], "an object"));

  auto atoms_of = [](const SExpr& sec) {
    std::vector<Atom> out;
    for (std::size_t i = 1; i < sec.items.size(); ++i) {
      if (sec.items[i].is_list && !sec.items[i].items.empty() &&
          sec.items[i].items[0].is_symbol("and")) {
        for (std::size_t j = 1; j < sec.items[i].items.size(); ++j)
          out.push_back(parse_atom(sec.items[i].items[j]));
      } else {
        out.push_back(parse_atom(sec.items[i]));
      }
    }
    return out;
  };
  if (const SExpr* s = find_section(f, ":static")) p.statics = atoms_of(*s);
  if (const SExpr* s = find_section(f, ":init")) p.init = atoms_of(*s);
  if (const SExpr* s = find_section(f, ":goal")) p.goal = atoms_of(*s);
  return p;
}

namespace {

LogicalStructure parse_scope(const SExpr& sec) {
  LogicalStructure s;
  s.three_valued = true;

  const SExpr* objects = nullptr;
  const SExpr* keyprops = nullptr;
  for (std::size_t i = 1; i < sec.items.size(); ++i) {
    const SExpr& part = need_list(sec.items[i], "a scope section");
    if (part.items.empty()) fail("empty scope section", part);
    if (part.items[0].is_symbol(":objects")) objects = &part;
    else if (part.items[0].is_symbol(":key-properties")) keyprops = &part;
    else fail("unknown scope section", part);
  }
  if (!objects) fail("scope needs an :objects section", sec);

  for (std::size_t i = 1; i < objects->items.size(); ++i) {
    const SExpr& entry = objects->items[i];
    LogicalStructure::Node node;
    if (!entry.is_list) {
      node.name = entry.symbol;
    } else {
      if (entry.items.empty()) fail("empty object entry", entry);
      node.name = need_symbol(entry.items[0], "an object class name");
      for (std::size_t a = 1; a < entry.items.size(); ++a) {
        const SExpr& attr = entry.items[a];
        if (attr.is_symbol("summary")) {
          node.summary = true;
        } else if (attr.is_list && !attr.items.empty() && attr.items[0].is_symbol("task")) {
          for (std::size_t t = 1; t < attr.items.size(); ++t)
            node.task_pos.push_back(std::stoi(need_symbol(attr.items[t], "a task position")));
        } else {
          fail("unknown object attribute", attr);
        }
      }
    }
    s.nodes.push_back(std::move(node));
  }

  if (keyprops) {
    for (std::size_t i = 1; i < keyprops->items.size(); ++i) {
      const SExpr* item = &keyprops->items[i];
      TruthValue v = TruthValue::True;
      need_list(*item, "a scope key-property");
      if (!item->items.empty() && item->items[0].is_symbol("maybe")) {
        if (item->items.size() != 2) fail("(maybe (kind (atom)))", *item);
        v = TruthValue::Half;
        item = &item->items[1];
      }
      KeyProperty kp = parse_keyprop(*item);
      std::vector<int> tuple;
      for (const auto& arg : kp.atom.args) {
        int idx = s.node_index(arg);
        if (idx < 0) fail("unknown object class '" + arg + "'", *item);
        tuple.push_back(idx);
      }
      s.iota[{kp.tau, kp.atom.pred, tuple}] = v;
    }
  }
  return s;
}

PlanElement parse_plan_element(const SExpr& e);

std::vector<KeyProperty> parse_feature_list(const SExpr& e) {
  need_list(e, "a feature list");
  std::vector<KeyProperty> out;
  for (const auto& item : e.items) out.push_back(parse_keyprop(item));
  return out;
}

PlanElement parse_plan_element(const SExpr& e) {
  need_list(e, "a plan element");
  if (e.items.empty()) fail("empty plan element", e);
  PlanElement el;
  if (e.items[0].is_symbol(":action")) {
    if (e.items.size() < 2) fail("(:action (head ...) ...)", e);
    el.is_loop = false;
    el.op.head = parse_atom(e.items[1]);
    auto kw = keyword_args(e, 2);
    if (auto it = kw.find(":features"); it != kw.end())
      el.op.features = parse_feature_list(*it->second);
    return el;
  }
  if (e.items[0].is_symbol(":loop")) {
    el.is_loop = true;
    std::size_t i = 1;
    if (i + 1 < e.items.size() && e.items[i].is_symbol(":iterations")) {
      el.iterations = std::stoi(need_symbol(e.items[i + 1], "an iteration count"));
      i += 2;
    }
    for (; i < e.items.size(); ++i) el.body.push_back(parse_plan_element(e.items[i]));
    return el;
  }
  fail("plan element must be :action or :loop", e);
}

}  // namespace

ActivitySchema parse_schema(const SExpr& e) {
  DefineForm f = open_define(e);
  if (f.kind != "activity-schema") fail("expected (define (activity-schema ...))", e);
  ActivitySchema s;
  s.name = f.name;

  const SExpr& task = need_section(f, ":task", e);
  if (task.items.size() != 2) fail("(:task (name args...))", task);
  s.task = parse_atom(task.items[1]);

  s.scope = parse_scope(need_section(f, ":scope", e));

  if (const SExpr* b = find_section(f, ":bindings")) {
    for (std::size_t i = 1; i < b->items.size(); ++i) {
      const SExpr& pair = need_list(b->items[i], "a binding");
      if (pair.items.size() != 2) fail("(variable object-class)", pair);
      std::string var = need_symbol(pair.items[0], "a variable");
      std::string node = need_symbol(pair.items[1], "an object class");
      if (s.scope.node_index(node) < 0) fail("unknown object class '" + node + "'", pair);
      s.bindings.emplace_back(var, node);
    }
  }

  if (const SExpr* plan = find_section(f, ":plan"))
    for (std::size_t i = 1; i < plan->items.size(); ++i)
      s.plan.push_back(parse_plan_element(plan->items[i]));
  return s;
}

namespace {

SExpr single_form(std::vector<SExpr> forms, const std::string& path) {
  if (forms.size() != 1)
    throw ParseError("expected exactly one (define ...) form, found " +
                         std::to_string(forms.size()),
                     {path, 1, 1});
  return std::move(forms[0]);
}

}  // namespace

PlanningDomain load_domain(const std::string& path) {
  return parse_domain(single_form(parse_sexpr_file(path), path));
}
AbstractionHierarchy load_hierarchy(const std::string& path) {
  return parse_hierarchy(single_form(parse_sexpr_file(path), path));
}
Experience load_experience(const std::string& path) {
  return parse_experience(single_form(parse_sexpr_file(path), path));
}
TaskProblem load_problem(const std::string& path) {
  return parse_problem(single_form(parse_sexpr_file(path), path));
}
ActivitySchema load_schema(const std::string& path) {
  return parse_schema(single_form(parse_sexpr_file(path), path));
}

namespace {

void write_condition(std::ostream& os, const std::vector<Atom>& atoms) {
  os << "(and";
  for (const auto& a : atoms) os << ' ' << a.str();
  os << ')';
}

void write_keyprop(std::ostream& os, const KeyProperty& k) {
  os << '(' << tau_name(k.tau) << ' ' << k.atom.str() << ')';
}

void write_plan_element(std::ostream& os, const PlanElement& el, int indent) {
  std::string pad(indent, ' ');
  if (!el.is_loop) {
    os << pad << "(:action " << el.op.head.str() << "\n"
       << pad << "  :features (";
    for (std::size_t i = 0; i < el.op.features.size(); ++i) {
      if (i) os << "\n" << pad << "             ";
      write_keyprop(os, el.op.features[i]);
    }
    os << "))";
    return;
  }
  os << pad << "(:loop";
  if (el.iterations > 0) os << " :iterations " << el.iterations;
  for (const auto& b : el.body) {
    os << "\n";
    write_plan_element(os, b, indent + 2);
  }
  os << ")";
}

}  // namespace

std::string write_domain(const PlanningDomain& d) {
  std::ostringstream os;
  os << "(define (domain " << d.name << ")\n";
  os << "  (:level " << (d.is_abstract ? "abstract" : "concrete") << ")\n";
  os << "  (:predicates";
  for (const auto& p : d.predicates) os << "\n    " << p.str();
  os << ")\n";
  for (const auto& op : d.operators) {
    os << "\n  (:action " << op.head.pred << "\n    :parameters (";
    for (std::size_t i = 0; i < op.head.args.size(); ++i)
      os << (i ? " " : "") << op.head.args[i];
    os << ")\n    :static ";
    write_condition(os, op.static_pre);
    os << "\n    :precondition ";
    write_condition(os, op.pre);
    os << "\n    :effect (and";
    for (const auto& l : op.effects) {
      os << ' ';
      if (l.positive) os << l.atom.str();
      else os << "(not " << l.atom.str() << ')';
    }
    os << "))\n";
  }
  os << ")\n";
  return os.str();
}

std::string write_hierarchy(const AbstractionHierarchy& h) {
  std::ostringstream os;
  os << "(define (hierarchy " << h.name << ")\n";
  auto write_maps = [&os](const char* key, const std::vector<HierarchyEntry>& entries) {
    os << "  (" << key;
    for (const auto& e : entries) {
      os << "\n    (:map " << e.from.str() << ' ';
      if (e.to) os << e.to->str();
      else os << "nil";
      os << ')';
    }
    os << ")\n";
  };
  write_maps(":predicates", h.predicates);
  write_maps(":operators", h.operators);
  os << ")\n";
  return os.str();
}

std::string write_experience(const Experience& e) {
  std::ostringstream os;
  os << "(define (experience " << e.name << ")\n";
  os << "  (:domain " << e.domain_name << ")\n";
  os << "  (:task " << e.task.str() << ")\n";
  os << "  (:objects";
  for (const auto& o : e.objects) os << ' ' << o;
  os << ")\n  (:key-properties";
  for (const auto& k : e.keys) {
    os << "\n    ";
    write_keyprop(os, k);
  }
  os << ")\n  (:plan";
  for (const auto& a : e.plan) os << "\n    " << a.str();
  os << "))\n";
  return os.str();
}

std::string write_problem(const TaskProblem& p) {
  std::ostringstream os;
  os << "(define (problem " << p.name << ")\n";
  os << "  (:domain " << p.domain_name << ")\n";
  os << "  (:task " << p.task.str() << ")\n";
  os << "  (:objects";
  for (const auto& o : p.objects) os << ' ' << o;
  os << ")";
  auto write_atoms = [&os](const char* key, const std::vector<Atom>& atoms) {
    os << "\n  (" << key;
    for (const auto& a : atoms) os << "\n    " << a.str();
    os << ")";
  };
  write_atoms(":static", p.statics);
  write_atoms(":init", p.init);
  write_atoms(":goal", p.goal);
  os << ")\n";
  return os.str();
}

std::string write_schema(const ActivitySchema& s) {
  std::ostringstream os;
  os << "(define (activity-schema " << s.name << ")\n";
  os << "  (:task " << s.task.str() << ")\n";
  os << "  (:scope\n    (:objects";
  for (const auto& n : s.scope.nodes) {
    os << ' ';
    if (!n.summary && n.task_pos.empty()) {
      os << n.name;
    } else {
      os << '(' << n.name;
      if (n.summary) os << " summary";
      if (!n.task_pos.empty()) {
        os << " (task";
        for (int t : n.task_pos) os << ' ' << t;
        os << ')';
      }
      os << ')';
    }
  }
  os << ")\n    (:key-properties";
  for (const auto& [key, value] : s.scope.iota) {
    if (value == TruthValue::False) continue;  // interpretation is sparse
    const auto& [tau, pred, tuple] = key;
    os << "\n      ";
    if (value == TruthValue::Half) os << "(maybe ";
    os << '(' << tau_name(tau) << " (" << pred;
    for (int idx : tuple) os << ' ' << s.scope.nodes[static_cast<std::size_t>(idx)].name;
    os << "))";
    if (value == TruthValue::Half) os << ')';
  }
  os << "))\n";
  os << "  (:bindings";
  for (const auto& [var, node] : s.bindings) os << "\n    (" << var << ' ' << node << ')';
  os << ")\n  (:plan";
  for (const auto& el : s.plan) {
    os << "\n";
    write_plan_element(os, el, 4);
  }
  os << "))\n";
  return os.str();
}

void save_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out.flush()) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace ebpd::io
