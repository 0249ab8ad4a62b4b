#pragma once

#include "gbkmv/types.hpp"

#include <cstdint>
#include <unordered_map>

namespace gbkmv {

std::uint64_t avalanche64(std::uint64_t x);

// Maps a mixed 64-bit value onto (0, 1]. Zero is excluded so (k-1)/U_(k)
// stays finite.
double unit_from_u64(std::uint64_t u);

/// Deterministic, seedable hash of element ids onto the unit interval.
/// One HashSource is shared by every sketch of an index. Fixture mode
/// replays a fixed (element, hash) table and is used to reproduce the
/// worked examples in tests.
class HashSource {
public:
    HashSource() = default;

    static HashSource computed(std::uint64_t seed);
    static HashSource fixture(std::uint64_t seed,
                              std::unordered_map<ElementId, double> table);

    // Unit-interval hash of an element. Fixture mode throws on a missing
    // table entry.
    double hash(ElementId e) const;

    // The i-th derived hash function of the same avalanche core; used by the
    // MinHash baseline, which needs k' independent functions.
    double hash_fn(std::uint32_t fn_index, ElementId e) const;
    std::uint64_t fn_seed(std::uint32_t fn_index) const;

    bool is_fixture() const { return fixture_; }
    std::uint64_t seed() const { return seed_; }
    const std::unordered_map<ElementId, double>& table() const { return table_; }

private:
    std::uint64_t seed_ = 0;
    bool fixture_ = false;
    std::unordered_map<ElementId, double> table_;
};

} // namespace gbkmv
