#include "divw/sampler.hpp"

#include <random>

namespace divw {

AliasTable build_alias_table(const ProbabilityVector& p) {
    const Index n = p.size();
    AliasTable table;
    table.probability.resize(n);
    table.alias.assign(static_cast<std::size_t>(n), 0);

    // Vose's stable construction: scale to n*p, pair overfull with underfull cells.
    std::vector<std::int64_t> small, large;
    Vector scaled = static_cast<double>(n) * p.v;
    for (Index i = 0; i < n; ++i) {
        table.alias[static_cast<std::size_t>(i)] = i;
        (scaled(i) < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
        const auto s = small.back();
        small.pop_back();
        const auto l = large.back();
        large.pop_back();
        table.probability(s) = scaled(s);
        table.alias[static_cast<std::size_t>(s)] = l;
        scaled(l) = (scaled(l) + scaled(s)) - 1.0;
        (scaled(l) < 1.0 ? small : large).push_back(l);
    }
    for (const auto i : large) table.probability(i) = 1.0;
    for (const auto i : small) table.probability(i) = 1.0;  // leftovers from rounding
    return table;
}

std::vector<std::int64_t> sample_batch(const AliasTable& table, std::int64_t batch_size,
                                       std::uint64_t rng_seed, bool with_replacement) {
    if (!with_replacement)
        throw ValidationError("sampling without replacement is not supported");
    if (batch_size < 1) throw ValidationError("batch_size must be positive");
    const auto n = static_cast<std::uint64_t>(table.size());
    if (n == 0) throw ValidationError("empty alias table");

    std::mt19937_64 rng(rng_seed);
    std::vector<std::int64_t> batch(static_cast<std::size_t>(batch_size));
    for (auto& out : batch) {
        // 53-bit uniform in [0, 1); one draw selects both cell and coin flip.
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        const double scaled = u * static_cast<double>(n);
        auto cell = static_cast<std::int64_t>(scaled);
        if (cell >= static_cast<std::int64_t>(n)) cell = static_cast<std::int64_t>(n) - 1;
        const double frac = scaled - static_cast<double>(cell);
        out = frac < table.probability(cell) ? cell : table.alias[static_cast<std::size_t>(cell)];
    }
    return batch;
}

}  // namespace divw
