#pragma once

#include "gbkmv/dataset.hpp"
#include "gbkmv/kmv.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gbkmv {

/// r-bit bitmap; bit i is set iff the record contains the i-th most frequent
/// element (frequency descending, ties by ascending id).
struct BufferBitmap {
    std::uint32_t bits = 0;
    std::vector<std::uint32_t> words;  // ceil(bits/32) words

    void resize(std::uint32_t bit_count);
    void set(std::uint32_t i);
    bool test(std::uint32_t i) const;
    std::uint32_t popcount() const;
};

std::uint32_t buffer_overlap(const BufferBitmap& a, const BufferBitmap& b);

struct GbkmvRecordSketch {
    BufferBitmap buffer;
    KmvSketch tail;  // threshold mode over the non-buffer universe
};

/// Per-record frequency buffers plus a global-threshold tail sketch.
/// Budget accounting is in element units: one stored hash entry costs one
/// unit, one 32-bit bitmap word costs one unit (r/32 units per record).
struct GbkmvIndex {
    std::uint32_t r = 0;                   // buffer width in bits
    std::vector<ElementId> top_elements;   // E_H in rank order
    std::vector<std::int32_t> buffer_rank; // id -> bit position, -1 outside E_H
    double tau = 0.0;                      // 0 sentinel means empty tails
    std::uint64_t seed = 0;
    double budget = 0.0;                   // element units
    HashSource hash;
    std::vector<GbkmvRecordSketch> sketches;
    std::vector<std::uint32_t> record_sizes;
    std::vector<std::string> tokens;       // dictionary, may be empty

    std::size_t record_count() const { return sketches.size(); }
};

/// The largest hash value on the grid of observed non-buffer occurrence
/// hashes such that retaining every hash <= tau stays within tail_budget
/// element units. Returns 0 when nothing fits and 1 when everything does.
/// Occurrences of one element shared by several records tie on the grid and
/// are either all retained or all cut.
double compute_tau(const std::vector<Record>& records,
                   const std::vector<std::uint8_t>& is_buffered,
                   double tail_budget,
                   const HashSource& h);

/// Algorithm: pick E_H as the top-r frequent elements, derive the maximal
/// global threshold from the remaining budget, then materialize one
/// buffer+tail sketch per record. r == nullopt lets the cost model choose.
GbkmvIndex build_gbkmv_index(const Dataset& ds, double budget,
                             std::optional<std::uint32_t> r,
                             const HashSource& h);

/// Sketches a query record with the index's E_H, tau and hash function.
/// Elements outside the build dictionary are hashed fresh and can enter the
/// tail; they can never match, only dilute k.
GbkmvRecordSketch sketch_query(const Record& q, const GbkmvIndex& index);

/// Intersection-size estimate for two threshold sketches sharing tau:
/// k = |Lq ∪ Lx|, K_cap = |Lq ∩ Lx|, U_(k) the largest union hash. Falls
/// back to K_cap/tau when k < 2, and returns the exact count when the
/// sketches are saturated (tau == 1).
IntersectionEstimate estimate_intersection_gkmv(const KmvSketch& lq,
                                                const KmvSketch& lx);

/// (buffer overlap + tail estimate) / q, clamped to [0, 1].
double estimate_containment_gbkmv(const GbkmvRecordSketch& sq,
                                  const GbkmvRecordSketch& sx,
                                  std::uint64_t q);

/// Checks that Lx ∪ Ly equals the |Lx ∪ Ly| smallest hashes of h(X ∪ Y),
/// enumerated brute-force.
bool validate_gkmv_union(const KmvSketch& lx, const KmvSketch& ly,
                         const Record& x, const Record& y,
                         const HashSource& h);

/// m * r/32 + total tail entries, in element units.
double stored_element_units(const GbkmvIndex& index);

} // namespace gbkmv
