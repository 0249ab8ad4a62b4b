#pragma once

#include "gbkmv/gbkmv_sketch.hpp"

#include <cstdint>
#include <unordered_map>
#include <vector>

namespace gbkmv {

struct SearchThresholds {
    double t_star = 0.0;
    std::uint64_t q = 0;
    double theta = 0.0;   // t_star * q
    std::uint32_t o1 = 0; // buffer overlap
    double o = 0.0;       // residual tail-match requirement
};

/// theta = t_star * q and o = max(0, U_(k) * (theta - o1)). K_cap >= o is a
/// necessary condition for the estimate to reach theta, so pruning by it can
/// admit but never drop.
SearchThresholds compute_thresholds(double t_star, std::uint64_t q,
                                    std::uint32_t o1, double u_k);

struct SearchHit {
    std::uint32_t record_id;
    double estimate;
};

/// Query accelerator: equal-depth size partitions with per-partition
/// inverted lists over tail elements, plus a word-major column store of the
/// buffer bitmaps. Changes query cost, never query output.
class SizePartitionIndex {
public:
    SizePartitionIndex(const GbkmvIndex& index, std::uint32_t partitions = 32);

    struct Partition {
        std::uint32_t size_lower_bound = 0;
        std::vector<std::uint32_t> record_ids;  // ascending
        std::unordered_map<ElementId, std::vector<std::uint32_t>> inverted;
    };

    const std::vector<Partition>& partitions() const { return partitions_; }
    const std::vector<std::vector<std::uint32_t>>& buffer_columns() const {
        return buffer_columns_;
    }
    double tail_max(std::uint32_t record_id) const { return tail_max_[record_id]; }

private:
    std::vector<Partition> partitions_;
    std::vector<std::vector<std::uint32_t>> buffer_columns_;  // [word][record]
    std::vector<double> tail_max_;
};

/// Containment similarity search over a GB-KMV index. Returns exactly
/// { X : estimate_containment_gbkmv(Q, X) * q >= t_star * q }, sorted by
/// record id — identical to a full scan with the same estimator.
std::vector<SearchHit> query(const GbkmvIndex& index,
                             const SizePartitionIndex& accel,
                             const Record& q, double t_star);

/// Exact brute-force search; ground truth for evaluation.
std::vector<SearchHit> exact_search(const std::vector<Record>& records,
                                    const Record& q, double t_star);

/// Exact |a ∩ b| by sorted merge.
std::uint64_t intersection_size(const Record& a, const Record& b);

} // namespace gbkmv
