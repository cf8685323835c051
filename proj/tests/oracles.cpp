#include "oracles.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace oracle {

using ebpd::Atom;
using ebpd::EnrichedOperator;
using ebpd::Experience;
using ebpd::KeyProperty;
using ebpd::LogicalStructure;
using ebpd::Tau;
using ebpd::Term;
using ebpd::TruthValue;
using ebpd::loops::CnlcpEntry;

std::vector<CnlcpEntry> tandem_chains(const std::vector<int>& seq) {
  const int n = static_cast<int>(seq.size());
  auto block_eq = [&](int i, int j, int p) {
    for (int k = 0; k < p; ++k)
      if (seq[i + k] != seq[j + k]) return false;
    return true;
  };
  std::vector<CnlcpEntry> all;
  for (int p = 1; 2 * p <= n; ++p) {
    for (int i = 0; i + 2 * p <= n; ++i) {
      if (i >= p && block_eq(i - p, i, p)) continue;  // extends left: not a chain head
      int k = 1;
      while (i + (k + 1) * p <= n && block_eq(i, i + k * p, p)) ++k;
      if (k < 2) continue;
      CnlcpEntry e;
      e.pattern.assign(seq.begin() + i, seq.begin() + i + p);
      for (int t = 0; t < k; ++t) e.starts.push_back(i + t * p);
      all.push_back(std::move(e));
    }
  }
  std::vector<CnlcpEntry> kept;
  for (const auto& e : all) {
    bool contained = false;
    for (const auto& f : all) {
      if (&f == &e || f.period() != e.period()) continue;
      bool covers = f.span_begin() <= e.span_begin() && e.span_end() <= f.span_end();
      bool strict = f.span_begin() < e.span_begin() || e.span_end() < f.span_end();
      if (covers && strict) {
        contained = true;
        break;
      }
    }
    if (!contained) kept.push_back(e);
  }
  std::sort(kept.begin(), kept.end(), [](const CnlcpEntry& a, const CnlcpEntry& b) {
    if (a.span_begin() != b.span_begin()) return a.span_begin() < b.span_begin();
    return a.period() < b.period();
  });
  return kept;
}

namespace {

// x is consistent with y when y is indefinite or they agree.
bool consistent(TruthValue x, TruthValue y) { return y == TruthValue::Half || x == y; }

bool check_assignment(const LogicalStructure& c, const LogicalStructure& s,
                      const std::vector<int>& f,
                      const std::set<std::tuple<Tau, std::string, int>>& rels) {
  const int nc = static_cast<int>(c.nodes.size());
  const int ns = static_cast<int>(s.nodes.size());
  for (int i = 0; i < nc; ++i)
    if (c.nodes[i].task_pos != s.nodes[f[i]].task_pos) return false;
  std::vector<int> hits(ns, 0);
  for (int i = 0; i < nc; ++i) hits[f[i]]++;
  for (int j = 0; j < ns; ++j) {
    if (hits[j] == 0) return false;
    if (!s.nodes[j].summary && hits[j] != 1) return false;
  }
  for (const auto& [tau, pred, ar] : rels) {
    std::vector<int> tup(ar, 0);
    while (true) {
      std::vector<int> img(ar);
      for (int k = 0; k < ar; ++k) img[k] = f[tup[k]];
      if (!consistent(c.value(tau, pred, tup), s.value(tau, pred, img))) return false;
      int k = ar - 1;
      while (k >= 0 && ++tup[k] == nc) {
        tup[k] = 0;
        --k;
      }
      if (k < 0) break;  // also exits immediately for arity 0
    }
  }
  return true;
}

}  // namespace

bool embeds_brute(const LogicalStructure& c, const LogicalStructure& s) {
  const int nc = static_cast<int>(c.nodes.size());
  const int ns = static_cast<int>(s.nodes.size());
  if (nc == 0 || ns == 0) return nc == 0 && ns == 0;
  std::set<std::tuple<Tau, std::string, int>> rels;
  for (const auto& [k, v] : c.iota)
    rels.insert({std::get<0>(k), std::get<1>(k), static_cast<int>(std::get<2>(k).size())});
  for (const auto& [k, v] : s.iota)
    rels.insert({std::get<0>(k), std::get<1>(k), static_cast<int>(std::get<2>(k).size())});

  std::vector<int> f(nc, 0);
  while (true) {
    if (check_assignment(c, s, f, rels)) return true;
    int i = nc - 1;
    while (i >= 0 && ++f[i] == ns) {
      f[i] = 0;
      --i;
    }
    if (i < 0) return false;
  }
}

std::vector<EnrichedOperator> features_brute(const Experience& e) {
  std::vector<EnrichedOperator> out;
  for (const Atom& act : e.plan) {
    EnrichedOperator eo;
    eo.head = act;
    for (const KeyProperty& k : e.keys) {
      bool with_act = false, with_task = false;
      for (const Term& t : k.atom.args) {
        if (!ebpd::is_variable(t)) continue;
        for (const Term& u : act.args) with_act = with_act || t == u;
        for (const Term& u : e.task.args) with_task = with_task || t == u;
      }
      if (with_act && with_task) eo.features.push_back(k);
    }
    std::sort(eo.features.begin(), eo.features.end());
    out.push_back(std::move(eo));
  }
  return out;
}

}  // namespace oracle
