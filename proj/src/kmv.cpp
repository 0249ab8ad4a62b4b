#include "gbkmv/kmv.hpp"

#include <algorithm>
#include <stdexcept>

namespace gbkmv {

namespace {

bool entry_less(const SketchEntry& a, const SketchEntry& b) {
    if (a.hash != b.hash) return a.hash < b.hash;
    return a.element < b.element;
}

} // namespace

KmvSketch build_kmv(const Record& x, std::uint32_t k, const HashSource& h) {
    if (k < 1) throw std::invalid_argument("build_kmv: capacity must be >= 1");
    KmvSketch s;
    s.mode = KmvSketch::Mode::BottomK;
    s.capacity = k;
    s.entries.reserve(x.size());
    for (ElementId e : x) s.entries.push_back({e, h.hash(e)});
    std::sort(s.entries.begin(), s.entries.end(), entry_less);
    if (s.entries.size() > k) {
        s.entries.resize(k);
    } else {
        s.saturated = true;  // holds all of h(X)
    }
    return s;
}

KmvSketch build_threshold_sketch(const Record& x, double tau, const HashSource& h) {
    if (tau < 0.0 || tau > 1.0)
        throw std::invalid_argument("build_threshold_sketch: tau outside [0, 1]");
    KmvSketch s;
    s.mode = KmvSketch::Mode::Threshold;
    s.tau = tau;
    for (ElementId e : x) {
        double v = h.hash(e);
        if (v <= tau) s.entries.push_back({e, v});
    }
    std::sort(s.entries.begin(), s.entries.end(), entry_less);
    s.saturated = (tau == 1.0);
    return s;
}

double estimate_distinct(const KmvSketch& sketch) {
    if (sketch.size() < 2)
        throw std::invalid_argument("estimate_distinct: sketch has fewer than 2 entries");
    if (sketch.saturated) return static_cast<double>(sketch.size());
    const double k = static_cast<double>(sketch.size());
    return (k - 1.0) / sketch.max_hash();
}

IntersectionEstimate estimate_intersection_kmv(const KmvSketch& lx,
                                               const KmvSketch& ly) {
    if (lx.mode != KmvSketch::Mode::BottomK || ly.mode != KmvSketch::Mode::BottomK)
        throw std::invalid_argument("estimate_intersection_kmv: bottom-k sketches required");
    const std::size_t k = std::min(lx.size(), ly.size());
    if (k < 2)
        throw std::invalid_argument("estimate_intersection_kmv: sketch has fewer than 2 entries");

    // Walk the k smallest distinct elements of the merged sketches. Entries
    // agree by element id: a shared hash function gives one hash per element.
    IntersectionEstimate est;
    est.k = k;
    std::size_t i = 0, j = 0, taken = 0;
    while (taken < k) {
        bool from_both = false;
        SketchEntry cur{};
        if (i < lx.size() && j < ly.size() &&
            lx.entries[i].element == ly.entries[j].element) {
            cur = lx.entries[i];
            from_both = true;
            ++i;
            ++j;
        } else if (j >= ly.size() ||
                   (i < lx.size() && entry_less(lx.entries[i], ly.entries[j]))) {
            cur = lx.entries[i++];
        } else {
            cur = ly.entries[j++];
        }
        ++taken;
        est.u_k = cur.hash;
        if (from_both) ++est.k_cap;
    }

    const double kd = static_cast<double>(k);
    const double d_cup_hat = (kd - 1.0) / est.u_k;
    est.d_cap_hat = (static_cast<double>(est.k_cap) / kd) * d_cup_hat;
    if (k >= 3) est.variance_hat = variance_kmv(est.d_cap_hat, d_cup_hat, k);
    return est;
}

double variance_kmv(double d_cap, double d_cup, std::uint64_t k) {
    if (k < 3) throw std::invalid_argument("variance_kmv: k must be >= 3");
    if (d_cap < 0.0 || d_cup < d_cap)
        throw std::invalid_argument("variance_kmv: need 0 <= D_cap <= D_cup");
    const double kd = static_cast<double>(k);
    return d_cap * (kd * d_cup - kd * kd - d_cup + kd + d_cap) / (kd * (kd - 2.0));
}

std::vector<KmvSketch> build_kmv_index(const std::vector<Record>& records,
                                       std::uint64_t budget,
                                       const HashSource& h) {
    if (records.empty()) throw std::invalid_argument("build_kmv_index: no records");
    if (budget < 2 * records.size())
        throw std::invalid_argument("build_kmv_index: budget below 2 per record");
    const auto k = static_cast<std::uint32_t>(budget / records.size());
    std::vector<KmvSketch> sketches;
    sketches.reserve(records.size());
    for (const auto& rec : records) sketches.push_back(build_kmv(rec, k, h));
    return sketches;
}

} // namespace gbkmv
