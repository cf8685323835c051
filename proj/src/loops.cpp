#include "ebpd/loops.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace ebpd::loops {

std::vector<int> suffix_array(const std::vector<int>& seq) {
  const int n = static_cast<int>(seq.size());
  std::vector<int> sa(static_cast<std::size_t>(n));
  std::iota(sa.begin(), sa.end(), 0);
  std::sort(sa.begin(), sa.end(), [&](int a, int b) {
    return std::lexicographical_compare(seq.begin() + a, seq.end(), seq.begin() + b, seq.end());
  });
  return sa;
}

int nlcp_pair(const std::vector<int>& seq, int i, int j) {
  const int n = static_cast<int>(seq.size());
  const int la = n - i;
  const int lb = n - j;
  const int cap = std::min({la, lb, std::abs(la - lb)});
  for (int k = 0; k < cap; ++k)
    if (seq[static_cast<std::size_t>(i + k)] != seq[static_cast<std::size_t>(j + k)]) return k;
  return cap;
}

std::vector<int> nlcp_array(const std::vector<int>& seq, const std::vector<int>& sa) {
  std::vector<int> out(sa.size(), 0);
  for (std::size_t i = 1; i < sa.size(); ++i)
    out[i] = nlcp_pair(seq, sa[i - 1], sa[i]);
  return out;
}

std::vector<int> nlcp_array(const std::vector<int>& seq) {
  return nlcp_array(seq, suffix_array(seq));
}

namespace {

bool block_equal(const std::vector<int>& s, int a, int b, int len) {
  return std::equal(s.begin() + a, s.begin() + a + len, s.begin() + b);
}

}  // namespace

std::vector<CnlcpEntry> cnlcp(const std::vector<int>& seq) {
  const int n = static_cast<int>(seq.size());
  std::vector<CnlcpEntry> chains;

  for (int period = 1; period <= n / 2; ++period) {
    for (int p = 0; p + 2 * period <= n; ++p) {
      if (!block_equal(seq, p, p + period, period)) continue;
      // Only chain heads: a position preceded by another iteration belongs
      // to the chain already recorded.
      if (p >= period && block_equal(seq, p - period, p, period)) continue;
      CnlcpEntry e;
      e.pattern.assign(seq.begin() + p, seq.begin() + p + period);
      int q = p;
      while (q + 2 * period <= n && block_equal(seq, q, q + period, period)) {
        e.starts.push_back(q);
        q += period;
      }
      e.starts.push_back(q);
      chains.push_back(std::move(e));
    }
  }

  // Drop rotations: chains whose positions are covered by the span of
  // another chain with the same period.
  std::vector<CnlcpEntry> kept;
  for (const CnlcpEntry& c : chains) {
    bool contained = false;
    for (const CnlcpEntry& other : chains) {
      if (&other == &c || other.period() != c.period()) continue;
      if (other.span_begin() <= c.span_begin() && c.span_end() <= other.span_end() &&
          (other.span_begin() < c.span_begin() || c.span_end() < other.span_end())) {
        contained = true;
        break;
      }
    }
    if (!contained) kept.push_back(c);
  }

  std::sort(kept.begin(), kept.end(), [](const CnlcpEntry& a, const CnlcpEntry& b) {
    if (a.span_begin() != b.span_begin()) return a.span_begin() < b.span_begin();
    return a.period() < b.period();
  });
  return kept;
}

RollResult detect_and_roll(std::vector<PlanElement> elements, std::vector<int> tokens,
                           const MergeFn& merge) {
  RollResult result;
  result.loops_formed = 0;

  int next_token = 0;
  for (int t : tokens) next_token = std::max(next_token, t + 1);
  std::map<std::vector<int>, int> block_token;

  for (;;) {
    std::vector<CnlcpEntry> chains = cnlcp(tokens);
    // Largest pattern first, leftmost on ties.
    std::sort(chains.begin(), chains.end(), [](const CnlcpEntry& a, const CnlcpEntry& b) {
      if (a.period() != b.period()) return a.period() > b.period();
      return a.span_begin() < b.span_begin();
    });

    bool rolled = false;
    for (const CnlcpEntry& chain : chains) {
      const int start = chain.span_begin();
      const int period = chain.period();
      const int iters = static_cast<int>(chain.starts.size());
      std::optional<PlanElement> block = merge(elements, start, period, iters);
      if (!block) continue;

      block->is_loop = true;
      block->iterations = iters;
      block->consumed_tokens.assign(tokens.begin() + start,
                                    tokens.begin() + start + period * iters);

      std::vector<int> body_tokens(tokens.begin() + start, tokens.begin() + start + period);
      auto [it, inserted] = block_token.emplace(body_tokens, next_token);
      if (inserted) ++next_token;

      elements.erase(elements.begin() + start, elements.begin() + start + period * iters);
      elements.insert(elements.begin() + start, std::move(*block));
      tokens.erase(tokens.begin() + start, tokens.begin() + start + period * iters);
      tokens.insert(tokens.begin() + start, it->second);

      ++result.loops_formed;
      rolled = true;
      break;
    }
    if (!rolled) break;
  }

  result.elements = std::move(elements);
  result.tokens = std::move(tokens);
  return result;
}

std::string render_rolled(const std::vector<PlanElement>& elements,
                          const std::function<std::string(const EnrichedOperator&)>& show) {
  std::string out;
  for (const PlanElement& e : elements) {
    if (e.is_loop) {
      out += '(';
      out += render_rolled(e.body, show);
      out += ")*";
    } else {
      out += show(e.op);
    }
  }
  return out;
}

}  // namespace ebpd::loops
