#pragma once

#include "divw/types.hpp"

#include <cstdint>
#include <vector>

namespace divw {

/// Walker alias table: O(n) build, O(1) draws. Cell i holds index i with mass
/// probability[i] and alias[i] with the remainder; induced distribution equals
/// the input p up to floating point.
struct AliasTable {
    Vector probability;
    std::vector<std::int64_t> alias;

    Index size() const { return probability.size(); }
};

AliasTable build_alias_table(const ProbabilityVector& p);

/// batch_size i.i.d. indices distributed per the table. Deterministic per seed
/// (fixed generator: splitmix-seeded mt19937_64, 53-bit uniform draws).
/// Only with_replacement = true is supported.
std::vector<std::int64_t> sample_batch(const AliasTable& table, std::int64_t batch_size,
                                       std::uint64_t rng_seed, bool with_replacement = true);

}  // namespace divw
