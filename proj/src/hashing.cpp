#include "gbkmv/hashing.hpp"

#include <stdexcept>
#include <string>

namespace gbkmv {

std::uint64_t avalanche64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

double unit_from_u64(std::uint64_t u) {
    return (static_cast<double>(u) + 1.0) * 0x1p-64;
}

HashSource HashSource::computed(std::uint64_t seed) {
    HashSource h;
    h.seed_ = seed;
    return h;
}

HashSource HashSource::fixture(std::uint64_t seed,
                               std::unordered_map<ElementId, double> table) {
    HashSource h;
    h.seed_ = seed;
    h.fixture_ = true;
    h.table_ = std::move(table);
    return h;
}

double HashSource::hash(ElementId e) const {
    if (fixture_) {
        auto it = table_.find(e);
        if (it == table_.end()) {
            throw std::invalid_argument("hash fixture has no entry for element " +
                                        std::to_string(e));
        }
        return it->second;
    }
    return unit_from_u64(avalanche64(seed_ ^ avalanche64(e)));
}

std::uint64_t HashSource::fn_seed(std::uint32_t fn_index) const {
    return avalanche64(seed_ + 0x9E3779B97F4A7C15ull * (fn_index + 1ull));
}

double HashSource::hash_fn(std::uint32_t fn_index, ElementId e) const {
    return unit_from_u64(avalanche64(fn_seed(fn_index) ^ avalanche64(e)));
}

} // namespace gbkmv
