#pragma once

#include "mugame/game.hpp"

#include <cstdint>
#include <vector>

namespace mugame {

// Number of depth-`depth` deterministic strategy prefixes for Eva that are
// winning-extendable: every play completed inside the prefix is won by Eva
// and every depth-`depth` leaf sits in Eva's winning region. Region leaves
// certify extendability because parity winning never depends on a finite
// prefix, so branches continue independently with positional winning
// strategies. Counting is exact; intermediates above 10^6 raise SizeError
// rather than approximate.
std::uint64_t count_prefixes(const ParityGame& g, unsigned depth);

// Same contract, single threaded, kept as the reference the parallel
// version is tested against.
std::uint64_t count_prefixes_serial(const ParityGame& g, unsigned depth);

struct StabilizedCount {
    bool stabilized = false;
    // Total number of Eva's deterministic winning strategies when
    // stabilized; meaningless otherwise.
    std::uint64_t count = 0;
    // count_prefixes at depths 0..max_depth, as divergence evidence and
    // for reporting.
    std::vector<std::uint64_t> counts;
};

// Decides whether the prefix counts have provably stopped growing within
// `max_depth`. The test is structural, not numeric: the counts stall from
// depth d on iff no Eva vertex with two or more in-region moves is
// reachable (inside region play) from the depth-d frontier, because only
// such a vertex can ever split one prefix into two. Numeric equality of
// the stalled counts is re-checked and an internal error if violated.
StabilizedCount stabilized_count(const ParityGame& g, unsigned max_depth);

} // namespace mugame
