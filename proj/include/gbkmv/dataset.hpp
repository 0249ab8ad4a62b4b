#pragma once

#include "gbkmv/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace gbkmv {

/// Size and frequency statistics of a dataset, including the prefix sums
/// over the frequency-descending element order that the buffer-size cost
/// model consumes. Immutable after construction and safe to share across
/// concurrent readers.
struct DatasetStats {
    std::uint64_t m = 0;      // record count
    std::uint64_t n = 0;      // distinct elements actually present
    std::uint64_t total = 0;  // N = sum of frequencies = sum of record sizes

    std::vector<std::uint64_t> freq;   // occurrences per element id
    std::vector<std::uint32_t> sizes;  // size per record id

    // Element ids ordered by (frequency descending, id ascending). Buffer
    // selection depends on this order being total and reproducible.
    std::vector<ElementId> freq_rank;

    // f_prefix[r]    = sum_{i<r} f_rank(i)   / N
    // f_prefix_sq[r] = sum_{i<r} f_rank(i)^2 / N^2
    // Both have freq.size()+1 entries; f_prefix[n] == 1.
    std::vector<double> f_prefix;
    std::vector<double> f_prefix_sq;

    double alpha1 = 0.0;  // element-frequency exponent (20 when degenerate)
    double alpha2 = 0.0;  // record-size exponent
};

struct Dataset {
    std::vector<Record> records;
    std::vector<std::string> tokens;  // id -> token, first-seen order
    std::unordered_map<std::string, ElementId> token_ids;
    DatasetStats stats;
};

/// Reads whitespace-separated tokens, one record per line. Duplicate tokens
/// within a line are collapsed; records shorter than min_size are dropped;
/// ids are assigned in first-seen order over retained lines. Throws on an
/// unreadable source or when nothing is retained.
Dataset ingest(std::istream& in, std::uint32_t min_size);
Dataset ingest_file(const std::string& path, std::uint32_t min_size);

// Builds a Dataset around already-encoded records (synthetic workloads).
Dataset from_records(std::vector<Record> records, std::uint64_t universe);

DatasetStats compute_stats(const std::vector<Record>& records,
                           std::uint64_t universe);

/// Continuous MLE exponent alpha = 1 + |V| / sum ln(v_i / v_min) with
/// v_min = min(values), clamped to [0.05, 20]. Throws when all values are
/// equal (degenerate fit; callers may treat that as uniform data).
double fit_power_law(const std::vector<std::uint64_t>& values);

struct ZipfConfig {
    std::uint64_t records = 0;
    double alpha1 = 1.0;  // element rank-probability exponent
    double alpha2 = 2.0;  // record-size exponent
    std::uint64_t universe = 0;
    std::uint32_t min_size = 1;
    std::uint32_t max_size = 1;
    std::uint64_t seed = 0;
};

/// Synthetic workload: record sizes follow a truncated Zipf(alpha2) over
/// [min_size, max_size]; elements are drawn without replacement within a
/// record with rank probability proportional to (id+1)^-alpha1.
/// Deterministic for a fixed seed.
std::vector<Record> generate_zipf(const ZipfConfig& cfg);

} // namespace gbkmv
