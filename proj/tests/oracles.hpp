// Independent brute-force references the tests compare the library against:
// tandem-repeat chains by direct scanning, structure embedding by exhaustive
// assignment enumeration, and feature extraction by a plain double loop.
// These share no code with the library implementations.
#ifndef EBPD_TESTS_ORACLES_HPP
#define EBPD_TESTS_ORACLES_HPP

#include <vector>

#include "ebpd/core.hpp"
#include "ebpd/loops.hpp"

namespace oracle {

// All maximal consecutive-repeat chains (at least two iterations), found by
// scanning every (start, period) pair. A chain is dropped when a chain of
// the same period spans a strict superset of its positions. Sorted by
// (first start, period).
std::vector<ebpd::loops::CnlcpEntry> tandem_chains(const std::vector<int>& seq);

// Embedding decided by trying every function from concrete nodes to scope
// nodes and checking the definition directly: task tags preserved, map
// surjective, non-summary nodes hit exactly once, and every concrete truth
// value consistent with the scope value of its image tuple. Exponential.
bool embeds_brute(const ebpd::LogicalStructure& c, const ebpd::LogicalStructure& s);

// Features of each plan action by scanning all (key, action) pairs: a key
// belongs to an action when it shares a variable with the action arguments
// and a variable with the task arguments.
std::vector<ebpd::EnrichedOperator> features_brute(const ebpd::Experience& e);

}  // namespace oracle

#endif
