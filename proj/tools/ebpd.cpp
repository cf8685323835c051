// Command-line front-end: learn schemata from experiences, retrieve them for
// new problems, plan hierarchically, benchmark against a breadth-first
// baseline, generate stacking problems/experiences, and inspect loop
// detection and problem classification.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ebpd/core.hpp"
#include "ebpd/domains.hpp"
#include "ebpd/io.hpp"
#include "ebpd/learner.hpp"
#include "ebpd/loops.hpp"
#include "ebpd/planner.hpp"
#include "ebpd/scope.hpp"
#include "ebpd/sexpr.hpp"

namespace {

using nlohmann::json;

bool tracing_enabled() {
  const char* v = std::getenv("EBPD_LOG");
  return v != nullptr && *v != '\0';
}

void trace(const std::string& msg) {
  if (tracing_enabled()) std::cerr << "[ebpd] " << msg << "\n";
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
  } else {
    ebpd::io::save_text(out_path, text);
    trace("wrote " + out_path);
  }
}

int report_diagnostics(const std::vector<ebpd::Diagnostic>& diags, const std::string& what) {
  bool bad = false;
  for (const auto& d : diags) {
    std::cerr << what << ": " << (d.is_error() ? "error: " : "warning: ") << d.message << "\n";
    bad = bad || d.is_error();
  }
  return bad ? 2 : 0;
}

std::string plan_text(const std::vector<ebpd::Atom>& plan) {
  std::ostringstream os;
  for (const auto& a : plan) os << a.str() << "\n";
  return os.str();
}

// ---------------------------------------------------------------- learn ----

struct LearnArgs {
  std::string domain, hierarchy, experience, output, name;
  bool graph = false;
};

int run_learn(const LearnArgs& a) {
  auto d = ebpd::io::load_domain(a.domain);
  if (int rc = report_diagnostics(ebpd::validate_domain(d), a.domain)) return rc;
  auto h = ebpd::io::load_hierarchy(a.hierarchy);
  if (int rc = report_diagnostics(ebpd::validate_hierarchy(h, d), a.hierarchy)) return rc;
  auto e = ebpd::io::load_experience(a.experience);
  trace("learning from " + e.name + " (" + std::to_string(e.plan.size()) + " actions)");
  auto schema = ebpd::learner::learn_schema(e, h, a.name);
  trace("schema " + schema.name + ": " + std::to_string(schema.plan.size()) +
        " plan elements, scope of " + std::to_string(schema.scope.nodes.size()) + " nodes");
  if (a.graph) std::cout << ebpd::scope::to_graph(schema.scope);
  emit(ebpd::io::write_schema(schema), a.output);
  return 0;
}

// ------------------------------------------------------------- retrieve ----

struct RetrieveArgs {
  std::string problem, hierarchy;
  std::vector<std::string> library;
};

int run_retrieve(const RetrieveArgs& a) {
  auto p = ebpd::io::load_problem(a.problem);
  auto h = ebpd::io::load_hierarchy(a.hierarchy);
  std::vector<ebpd::ActivitySchema> lib;
  for (const auto& f : a.library) lib.push_back(ebpd::io::load_schema(f));
  auto r = ebpd::planner::retrieve(lib, p, h);
  for (std::size_t i = 0; i < r.rejections.size(); ++i)
    trace("rejected " + lib[i].name + ": " + r.rejections[i]);
  if (r.index < 0) {
    std::cout << "no applicable schema (" << lib.size() << " tried)\n";
    return 1;
  }
  std::cout << "schema " << lib[r.index].name << " (library index " << r.index
            << "), retrieval " << r.retrieval_ms << " ms\n";
  return 0;
}

// ----------------------------------------------------------------- plan ----

struct PlanArgs {
  std::string domain, abstract_domain, hierarchy, problem, output;
  std::vector<std::string> library;
  int depth_bound = 8;
  std::string tie_break = "lex";
  long max_evals = 5'000'000;
};

int run_plan(const PlanArgs& a) {
  auto concrete = ebpd::io::load_domain(a.domain);
  auto abstr = ebpd::io::load_domain(a.abstract_domain);
  auto h = ebpd::io::load_hierarchy(a.hierarchy);
  auto p = ebpd::io::load_problem(a.problem);
  std::vector<ebpd::ActivitySchema> lib;
  for (const auto& f : a.library) lib.push_back(ebpd::io::load_schema(f));

  auto r = ebpd::planner::retrieve(lib, p, h);
  if (r.index < 0) {
    std::cerr << "no applicable schema for " << p.name << "\n";
    return 1;
  }
  std::cerr << "schema: " << lib[r.index].name << " (retrieval " << r.retrieval_ms << " ms)\n";

  ebpd::planner::AsbpOptions aopts;
  aopts.goal_tie_break = a.tie_break == "goal";
  aopts.max_evaluations = a.max_evals;
  auto ar = ebpd::planner::asbp(lib[r.index], p, h, abstr, r.witness, aopts);
  if (!ar.solved) {
    std::cerr << "abstract search failed: " << ar.note << "\n";
    return 1;
  }
  std::cerr << "abstract plan: " << ar.plan.size() << " actions, " << ar.evaluated_states
            << " evaluated states, " << ar.search_ms << " ms\n";

  ebpd::planner::SbpOptions sopts;
  sopts.depth_bound = a.depth_bound;
  auto sr = ebpd::planner::sbp(ar.plan, p, h, concrete, sopts);
  if (!sr.solved) {
    std::cerr << "refinement failed: " << sr.note << "\n";
    return 1;
  }
  auto v = ebpd::planner::validate_plan(concrete, p, sr.plan);
  std::cerr << "concrete plan: " << sr.plan.size() << " actions, "
            << (v.valid ? "valid" : "INVALID: " + v.reason) << "\n";
  emit(plan_text(sr.plan), a.output);
  return v.valid ? 0 : 1;
}

// ---------------------------------------------------------------- bench ----

struct BenchArgs {
  std::string manifest, format = "csv", output;
  bool baseline = false;
  int baseline_max_pairs = 3;
};

int run_bench(const BenchArgs& a) {
  std::ifstream in(a.manifest);
  if (!in) {
    std::cerr << "cannot open manifest " << a.manifest << "\n";
    return 2;
  }
  json m = json::parse(in, nullptr, true, true);

  auto concrete = ebpd::domains::stacking_domain();
  auto abstr = ebpd::domains::stacking_abstract_domain();
  auto h = ebpd::domains::stacking_hierarchy();

  std::vector<ebpd::ActivitySchema> lib;
  for (const auto& je : m.at("experiences")) {
    auto e = ebpd::domains::gen_experience(je.at("class"), je.at("blues"), je.at("reds"));
    trace("learning " + e.name);
    lib.push_back(ebpd::learner::learn_schema(e, h));
  }

  ebpd::planner::AsbpOptions aopts;
  if (m.contains("tie_break")) aopts.goal_tie_break = m["tie_break"] == "goal";
  ebpd::planner::SbpOptions sopts;
  if (m.contains("depth_bound")) sopts.depth_bound = m["depth_bound"];

  json rows = json::array();
  for (const auto& jp : m.at("problems")) {
    int cls = jp.at("class"), nb = jp.at("blues"), nr = jp.at("reds");
    unsigned seed = jp.value("seed", 0u);
    auto p = ebpd::domains::gen_stack(cls, nb, nr, seed);
    trace("planning " + p.name);
    json row{{"problem", p.name}, {"class", cls},   {"blues", nb},
             {"reds", nr},        {"seed", seed},   {"schema", ""},
             {"retrieval_ms", 0.0}, {"evaluated_states", 0}, {"asbp_ms", 0.0},
             {"abstract_len", 0}, {"concrete_len", 0}, {"solved", false},
             {"valid", false}};

    auto r = ebpd::planner::retrieve(lib, p, h);
    row["retrieval_ms"] = r.retrieval_ms;
    if (r.index >= 0) {
      row["schema"] = lib[r.index].name;
      auto ar = ebpd::planner::asbp(lib[r.index], p, h, abstr, r.witness, aopts);
      row["evaluated_states"] = ar.evaluated_states;
      row["asbp_ms"] = ar.search_ms;
      if (ar.solved) {
        row["abstract_len"] = ar.plan.size();
        auto sr = ebpd::planner::sbp(ar.plan, p, h, concrete, sopts);
        if (sr.solved) {
          row["solved"] = true;
          row["concrete_len"] = sr.plan.size();
          row["valid"] = ebpd::planner::validate_plan(concrete, p, sr.plan).valid;
        }
      }
    }
    if (a.baseline && std::max(nb, nr) <= a.baseline_max_pairs) {
      auto br = ebpd::planner::baseline_plan(concrete, p);
      row["baseline_len"] = br.solved ? static_cast<long>(br.plan.size()) : -1;
      row["baseline_expanded"] = br.expanded;
    }
    rows.push_back(std::move(row));
  }

  std::ostringstream os;
  if (a.format == "json") {
    os << rows.dump(2) << "\n";
  } else {
    const char* cols[] = {"problem", "class", "blues", "reds", "seed", "schema",
                          "retrieval_ms", "evaluated_states", "asbp_ms", "abstract_len",
                          "concrete_len", "solved", "valid", "baseline_len",
                          "baseline_expanded"};
    for (std::size_t i = 0; i < std::size(cols); ++i) os << (i ? "," : "") << cols[i];
    os << "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < std::size(cols); ++i) {
        if (i) os << ",";
        if (!row.contains(cols[i])) continue;
        const auto& v = row[cols[i]];
        if (v.is_string()) os << v.get<std::string>();
        else if (v.is_boolean()) os << (v.get<bool>() ? 1 : 0);
        else os << v.dump();
      }
      os << "\n";
    }
  }
  emit(os.str(), a.output);
  return 0;
}

// ------------------------------------------------------------ gen-* ----

struct GenArgs {
  int cls = 1, blues = 4, reds = 4;
  unsigned seed = 0;
  std::string output;
};

int run_gen_stack(const GenArgs& a) {
  auto p = ebpd::domains::gen_stack(a.cls, a.blues, a.reds, a.seed);
  emit(ebpd::io::write_problem(p), a.output);
  return 0;
}

int run_gen_exp(const GenArgs& a) {
  auto e = ebpd::domains::gen_experience(a.cls, a.blues, a.reds);
  emit(ebpd::io::write_experience(e), a.output);
  return 0;
}

// ---------------------------------------------------------------- loops ----

int run_loops(const std::string& word) {
  if (word.empty()) {
    std::cerr << "empty token string\n";
    return 2;
  }
  std::vector<int> seq(word.begin(), word.end());
  auto sa = ebpd::loops::suffix_array(seq);
  auto nl = ebpd::loops::nlcp_array(seq, sa);
  std::cout << "  i  sa  nlcp  suffix\n";
  for (std::size_t i = 0; i < sa.size(); ++i) {
    std::printf("%3zu %3d %5d  %s\n", i, sa[i], nl[i], word.substr(sa[i]).c_str());
  }
  auto chains = ebpd::loops::cnlcp(seq);
  std::cout << "chains:\n";
  for (const auto& c : chains) {
    std::string pat(c.pattern.begin(), c.pattern.end());
    std::cout << "  \"" << pat << "\" starts";
    for (int s : c.starts) std::cout << ' ' << s;
    std::cout << "\n";
  }
  std::vector<ebpd::PlanElement> elems;
  for (char ch : word) {
    ebpd::PlanElement el;
    el.op.head.pred = std::string(1, ch);
    elems.push_back(std::move(el));
  }
  auto merge = [](const std::vector<ebpd::PlanElement>& es, int start, int period,
                  int iterations) -> std::optional<ebpd::PlanElement> {
    ebpd::PlanElement loop;
    loop.is_loop = true;
    loop.iterations = iterations;
    loop.body.assign(es.begin() + start, es.begin() + start + period);
    return loop;
  };
  auto rolled = ebpd::loops::detect_and_roll(std::move(elems), seq, merge);
  std::cout << "rolled: "
            << ebpd::loops::render_rolled(rolled.elements,
                                          [](const ebpd::EnrichedOperator& op) {
                                            return op.head.pred;
                                          })
            << "\n";
  return 0;
}

// ------------------------------------------------------------- classify ----

struct ClassifyArgs {
  std::string hierarchy;
  std::vector<std::string> problems;
};

int run_classify(const ClassifyArgs& a) {
  auto h = ebpd::io::load_hierarchy(a.hierarchy);
  std::vector<ebpd::TaskProblem> ps;
  for (const auto& f : a.problems) ps.push_back(ebpd::io::load_problem(f));
  auto cells = ebpd::domains::classify_problems(ps, h);
  int ncells = 0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    std::cout << cells[i] << "\t" << a.problems[i] << "\n";
    ncells = std::max(ncells, cells[i] + 1);
  }
  std::cerr << ncells << " cells over " << ps.size() << " problems\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"experience-based planning toolkit"};
  app.require_subcommand(1);

  LearnArgs learn_args;
  auto* learn = app.add_subcommand("learn", "learn an activity schema from an experience");
  learn->add_option("--domain", learn_args.domain, "concrete domain file")->required();
  learn->add_option("--hierarchy", learn_args.hierarchy, "abstraction hierarchy file")->required();
  learn->add_option("--experience", learn_args.experience, "solved experience file")->required();
  learn->add_option("-o,--output", learn_args.output, "schema output file (default stdout)");
  learn->add_option("--name", learn_args.name, "override schema name");
  learn->add_flag("--graph", learn_args.graph, "print the scope structure as a graph");

  RetrieveArgs retrieve_args;
  auto* retr = app.add_subcommand("retrieve", "find the first schema whose scope admits a problem");
  retr->add_option("--problem", retrieve_args.problem)->required();
  retr->add_option("--hierarchy", retrieve_args.hierarchy)->required();
  retr->add_option("--library", retrieve_args.library, "schema files, tried in order")
      ->required()
      ->expected(-1);

  PlanArgs plan_args;
  auto* plan = app.add_subcommand("plan", "retrieve, search abstractly, refine and validate");
  plan->add_option("--domain", plan_args.domain, "concrete domain file")->required();
  plan->add_option("--abstract-domain", plan_args.abstract_domain)->required();
  plan->add_option("--hierarchy", plan_args.hierarchy)->required();
  plan->add_option("--problem", plan_args.problem)->required();
  plan->add_option("--library", plan_args.library)->required()->expected(-1);
  plan->add_option("-o,--output", plan_args.output, "plan output file (default stdout)");
  plan->add_option("--depth-bound", plan_args.depth_bound, "gap-fill search depth");
  plan->add_option("--tie-break", plan_args.tie_break, "lex or goal")
      ->check(CLI::IsMember({"lex", "goal"}));
  plan->add_option("--max-evals", plan_args.max_evals, "abstract search evaluation cap");

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "run a manifest of generated problems");
  bench->add_option("--manifest", bench_args.manifest, "json manifest")->required();
  bench->add_option("--format", bench_args.format)->check(CLI::IsMember({"csv", "json"}));
  bench->add_option("-o,--output", bench_args.output, "report file (default stdout)");
  bench->add_flag("--baseline", bench_args.baseline, "also run the breadth-first baseline");
  bench->add_option("--baseline-max-pairs", bench_args.baseline_max_pairs,
                    "skip the baseline above this many blocks per color");

  GenArgs gs_args;
  auto* gs = app.add_subcommand("gen-stack", "generate a stacking task problem");
  gs->add_option("--class", gs_args.cls, "initial configuration class 1..4")->required();
  gs->add_option("--blues", gs_args.blues)->required();
  gs->add_option("--reds", gs_args.reds)->required();
  gs->add_option("--seed", gs_args.seed, "source-pile arrangement seed");
  gs->add_option("-o,--output", gs_args.output);

  GenArgs ge_args;
  auto* ge = app.add_subcommand("gen-exp", "generate a solved stacking experience");
  ge->add_option("--class", ge_args.cls, "initial configuration class 1..4")->required();
  ge->add_option("--blues", ge_args.blues)->required();
  ge->add_option("--reds", ge_args.reds)->required();
  ge->add_option("-o,--output", ge_args.output);

  std::string loops_word;
  auto* lp = app.add_subcommand("loops", "show suffix-array loop detection for a token string");
  lp->add_option("tokens", loops_word, "token string, one character per token")->required();

  ClassifyArgs cls_args;
  auto* cls = app.add_subcommand("classify", "bucket problems by abstracted structure");
  cls->add_option("--hierarchy", cls_args.hierarchy)->required();
  cls->add_option("problems", cls_args.problems, "problem files")->required()->expected(-1);

  CLI11_PARSE(app, argc, argv);

  try {
    if (learn->parsed()) return run_learn(learn_args);
    if (retr->parsed()) return run_retrieve(retrieve_args);
    if (plan->parsed()) return run_plan(plan_args);
    if (bench->parsed()) return run_bench(bench_args);
    if (gs->parsed()) return run_gen_stack(gs_args);
    if (ge->parsed()) return run_gen_exp(ge_args);
    if (lp->parsed()) return run_loops(loops_word);
    if (cls->parsed()) return run_classify(cls_args);
  } catch (const ebpd::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
