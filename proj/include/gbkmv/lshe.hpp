#pragma once

#include "gbkmv/hashing.hpp"
#include "gbkmv/types.hpp"

#include <cstdint>
#include <vector>

namespace gbkmv {

// One minimum hash value per derived function.
using MinHashSignature = std::vector<double>;

MinHashSignature minhash_signature(const Record& x, std::uint32_t k_prime,
                                   const HashSource& h);

/// Collision fraction across signature positions.
double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b);

/// s = t / (x/q + 1 - t)
double containment_to_jaccard(double t, double x, double q);
/// t = (x/q + 1) s / (1 + s)
double jaccard_to_containment(double s, double x, double q);

/// MinHash LSH-Ensemble baseline: equal-depth size partitions, each with its
/// upper size bound; candidates are retrieved by signature comparison
/// against the per-partition Jaccard threshold.
struct LsheIndex {
    struct Partition {
        std::uint32_t upper_bound = 0;
        std::vector<std::uint32_t> record_ids;
    };

    std::uint32_t k_prime = 256;
    std::uint64_t seed = 0;
    std::vector<Partition> partitions;
    std::vector<MinHashSignature> signatures;  // by record id
};

LsheIndex build_lshe_index(const std::vector<Record>& records,
                           std::uint32_t k_prime, std::uint32_t partitions,
                           const HashSource& h);

/// Per partition, derives s* from that partition's upper bound and collects
/// records whose estimated Jaccard reaches it; the union over partitions is
/// the answer. Sorted by record id.
std::vector<std::uint32_t> lshe_query(const LsheIndex& index, const Record& q,
                                      double t_star, const HashSource& h);

} // namespace gbkmv
