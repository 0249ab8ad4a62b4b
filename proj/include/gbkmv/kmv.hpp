#pragma once

#include "gbkmv/hashing.hpp"
#include "gbkmv/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace gbkmv {

struct SketchEntry {
    ElementId element;
    double hash;
};

/// Bottom-k or threshold-bounded list of the smallest unit-interval hashes
/// of a record, sorted ascending by (hash, element). Entries of different
/// records compare by element id, never by float equality: under a shared
/// hash function common hash values are exactly common elements.
struct KmvSketch {
    enum class Mode { BottomK, Threshold };

    Mode mode = Mode::BottomK;
    std::uint32_t capacity = 0;  // bottom-k mode
    double tau = 0.0;            // threshold mode
    bool saturated = false;      // holds all of h(X); estimates become exact
    std::vector<SketchEntry> entries;

    std::size_t size() const { return entries.size(); }
    double max_hash() const { return entries.empty() ? 0.0 : entries.back().hash; }
};

struct IntersectionEstimate {
    std::size_t k = 0;      // union-sketch size used
    std::size_t k_cap = 0;  // matching entries within it
    double u_k = 0.0;       // k-th smallest hash in the union
    double d_cap_hat = 0.0; // estimated |X ∩ Y|
    std::optional<double> variance_hat;  // plug-in variance, only when k >= 3
    bool used_fallback = false;  // threshold estimator with k in {0,1}
    bool exact = false;          // saturated sketches, exact count returned
};

/// The min(k, |X|) smallest hashes of X.
KmvSketch build_kmv(const Record& x, std::uint32_t k, const HashSource& h);

/// Every element of X with hash <= tau (threshold mode).
KmvSketch build_threshold_sketch(const Record& x, double tau, const HashSource& h);

/// Distinct-count estimate (k-1)/U_(k); exact count when the sketch is known
/// to hold the whole set. Requires at least two entries.
double estimate_distinct(const KmvSketch& sketch);

/// Intersection-size estimate for two bottom-k sketches with
/// k = min(|Lx|, |Ly|). Requires both sketches to have at least two entries.
IntersectionEstimate estimate_intersection_kmv(const KmvSketch& lx,
                                               const KmvSketch& ly);

/// D_cap (k D_cup - k^2 - D_cup + k + D_cap) / (k (k-2)); requires k >= 3.
double variance_kmv(double d_cap, double d_cup, std::uint64_t k);

/// Equal allocation: every record gets a capacity-floor(budget/m) sketch.
/// Requires budget >= 2m so every estimator precondition can be met.
std::vector<KmvSketch> build_kmv_index(const std::vector<Record>& records,
                                       std::uint64_t budget,
                                       const HashSource& h);

} // namespace gbkmv
