// Loop detection over token sequences: suffix array, non-overlapping longest
// common prefix (NLCP) tables, consecutive-repeat (CNLCP) chains, and the
// rolling step that folds repeated blocks of a plan into loop elements.
#ifndef EBPD_LOOPS_HPP
#define EBPD_LOOPS_HPP

#include <functional>
#include <optional>
#include <vector>

#include "ebpd/core.hpp"

namespace ebpd::loops {

// Indices of all suffixes of `seq`, sorted lexicographically.
std::vector<int> suffix_array(const std::vector<int>& seq);

// Longest common prefix of the suffixes starting at i and j, capped so the
// shared block cannot overlap: the cap is min(|A|, |B|, abs(|A| - |B|)).
int nlcp_pair(const std::vector<int>& seq, int i, int j);

// NLCP between each suffix-array neighbour pair; index 0 is 0 by convention.
std::vector<int> nlcp_array(const std::vector<int>& seq, const std::vector<int>& sa);
std::vector<int> nlcp_array(const std::vector<int>& seq);

// A consecutively repeating pattern and every iteration start, ascending;
// consecutive starts differ by exactly pattern.size().
struct CnlcpEntry {
  std::vector<int> pattern;
  std::vector<int> starts;

  int period() const { return static_cast<int>(pattern.size()); }
  int span_begin() const { return starts.front(); }
  int span_end() const { return starts.back() + period(); }

  auto operator<=>(const CnlcpEntry&) const = default;
};

// All maximal consecutive-repeat chains of `seq`. A chain is dropped when
// another chain of the same period covers a superset of its span (such
// chains are rotations of the survivor). Sorted by (first start, period).
std::vector<CnlcpEntry> cnlcp(const std::vector<int>& seq);

// Merge callback for rolling: given the current element sequence, the chain
// start, the period and the iteration count, produce the loop element that
// replaces elements [start, start + period * iterations), or nothing when
// the iterations cannot be unified.
using MergeFn = std::function<std::optional<PlanElement>(
    const std::vector<PlanElement>&, int start, int period, int iterations)>;

struct RollResult {
  std::vector<PlanElement> elements;
  std::vector<int> tokens;  // final token per top-level element
  int loops_formed = 0;
};

// Repeatedly detects chains over the token sequence and folds the largest
// pattern (leftmost on ties) into a loop element, until no chain rolls.
// Rolled blocks take part in later passes as opaque tokens; two blocks with
// the same body token sequence share a token.
RollResult detect_and_roll(std::vector<PlanElement> elements, std::vector<int> tokens,
                           const MergeFn& merge);

// Rendering helper for debug output: tokens shown through `show`, loop
// blocks as (body)* — e.g. ab(ac)*de(df)*gh.
std::string render_rolled(const std::vector<PlanElement>& elements,
                          const std::function<std::string(const EnrichedOperator&)>& show);

}  // namespace ebpd::loops

#endif
