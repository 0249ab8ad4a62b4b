#include "gbkmv/gbkmv_sketch.hpp"

#include "gbkmv/tuner.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <unordered_set>

namespace gbkmv {

void BufferBitmap::resize(std::uint32_t bit_count) {
    bits = bit_count;
    words.assign((bit_count + 31) / 32, 0u);
}

void BufferBitmap::set(std::uint32_t i) {
    words[i / 32] |= (1u << (i % 32));
}

bool BufferBitmap::test(std::uint32_t i) const {
    return (words[i / 32] >> (i % 32)) & 1u;
}

std::uint32_t BufferBitmap::popcount() const {
    std::uint32_t c = 0;
    for (std::uint32_t w : words) c += static_cast<std::uint32_t>(std::popcount(w));
    return c;
}

std::uint32_t buffer_overlap(const BufferBitmap& a, const BufferBitmap& b) {
    if (a.bits != b.bits)
        throw std::invalid_argument("buffer_overlap: incompatible buffer widths");
    std::uint32_t c = 0;
    for (std::size_t i = 0; i < a.words.size(); ++i)
        c += static_cast<std::uint32_t>(std::popcount(a.words[i] & b.words[i]));
    return c;
}

double compute_tau(const std::vector<Record>& records,
                   const std::vector<std::uint8_t>& is_buffered,
                   double tail_budget,
                   const HashSource& h) {
    if (tail_budget < 0.0)
        throw std::invalid_argument("compute_tau: negative tail budget");
    const auto cap = static_cast<std::uint64_t>(std::floor(tail_budget));
    if (cap == 0) return 0.0;

    // One hash per non-buffer element occurrence. Records sharing an element
    // contribute tied copies of the same value.
    std::vector<double> occ;
    for (const auto& rec : records) {
        for (ElementId e : rec) {
            if (e < is_buffered.size() && is_buffered[e]) continue;
            occ.push_back(h.hash(e));
        }
    }
    if (cap >= occ.size()) return 1.0;

    std::sort(occ.begin(), occ.end());
    double tau = occ[cap - 1];
    if (occ[cap] == tau) {
        // Ties straddle the budget boundary; keeping all of them would
        // overshoot, so step down to the next value on the grid.
        std::size_t first = cap - 1;
        while (first > 0 && occ[first - 1] == tau) --first;
        if (first == 0) return 0.0;
        tau = occ[first - 1];
    }
    return tau;
}

namespace {

void check_no_collisions(std::uint64_t universe, const HashSource& h) {
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(universe * 2);
    for (std::uint64_t e = 0; e < universe; ++e) {
        const double v = h.hash(static_cast<ElementId>(e));
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        if (!seen.insert(bits).second)
            throw std::runtime_error("hash collision inside the element dictionary");
    }
}

GbkmvRecordSketch make_record_sketch(const Record& x, const GbkmvIndex& idx) {
    GbkmvRecordSketch s;
    s.buffer.resize(idx.r);
    s.tail.mode = KmvSketch::Mode::Threshold;
    s.tail.tau = idx.tau;
    s.tail.saturated = (idx.tau == 1.0);
    for (ElementId e : x) {
        const std::int32_t rank =
            e < idx.buffer_rank.size() ? idx.buffer_rank[e] : -1;
        if (rank >= 0) {
            s.buffer.set(static_cast<std::uint32_t>(rank));
        } else {
            const double v = idx.hash.hash(e);
            if (v <= idx.tau) s.tail.entries.push_back({e, v});
        }
    }
    std::sort(s.tail.entries.begin(), s.tail.entries.end(),
              [](const SketchEntry& a, const SketchEntry& b) {
                  if (a.hash != b.hash) return a.hash < b.hash;
                  return a.element < b.element;
              });
    return s;
}

} // namespace

GbkmvIndex build_gbkmv_index(const Dataset& ds, double budget,
                             std::optional<std::uint32_t> r,
                             const HashSource& h) {
    const auto& st = ds.stats;
    const std::uint64_t m = ds.records.size();
    if (m == 0) throw std::invalid_argument("build_gbkmv_index: no records");
    const std::uint64_t universe = st.freq.size();

    GbkmvIndex idx;
    idx.seed = h.seed();
    idx.hash = h;
    idx.budget = budget;
    if (r.has_value()) {
        idx.r = *r;
    } else {
        auto inputs = make_cost_model_inputs(st, budget, 10000,
                                             avalanche64(h.seed() ^ 0x746175ull));
        idx.r = choose_buffer_size(inputs);
    }

    const double buffer_cost = static_cast<double>(m) * idx.r / 32.0;
    if (budget < buffer_cost)
        throw std::invalid_argument("build_gbkmv_index: budget exhausted by buffer");

    check_no_collisions(universe, h);

    const std::uint64_t top_count =
        std::min<std::uint64_t>(idx.r, st.freq_rank.size());
    idx.top_elements.assign(st.freq_rank.begin(),
                            st.freq_rank.begin() + top_count);
    idx.buffer_rank.assign(universe, -1);
    std::vector<std::uint8_t> is_buffered(universe, 0);
    for (std::uint64_t i = 0; i < top_count; ++i) {
        idx.buffer_rank[idx.top_elements[i]] = static_cast<std::int32_t>(i);
        is_buffered[idx.top_elements[i]] = 1;
    }

    idx.tau = compute_tau(ds.records, is_buffered, budget - buffer_cost, h);

    idx.sketches.reserve(m);
    idx.record_sizes.reserve(m);
    for (const auto& rec : ds.records) {
        idx.sketches.push_back(make_record_sketch(rec, idx));
        idx.record_sizes.push_back(static_cast<std::uint32_t>(rec.size()));
    }
    idx.tokens = ds.tokens;
    return idx;
}

GbkmvRecordSketch sketch_query(const Record& q, const GbkmvIndex& index) {
    if (q.empty()) throw std::invalid_argument("sketch_query: empty query");
    return make_record_sketch(q, index);
}

IntersectionEstimate estimate_intersection_gkmv(const KmvSketch& lq,
                                                const KmvSketch& lx) {
    if (lq.mode != KmvSketch::Mode::Threshold ||
        lx.mode != KmvSketch::Mode::Threshold)
        throw std::invalid_argument("estimate_intersection_gkmv: threshold sketches required");
    if (lq.tau != lx.tau)
        throw std::invalid_argument("estimate_intersection_gkmv: incompatible sketches, tau differs");

    IntersectionEstimate est;
    std::size_t i = 0, j = 0;
    while (i < lq.size() || j < lx.size()) {
        double hash;
        if (i < lq.size() && j < lx.size() &&
            lq.entries[i].element == lx.entries[j].element) {
            hash = lq.entries[i].hash;
            ++est.k_cap;
            ++i;
            ++j;
        } else if (j >= lx.size() ||
                   (i < lq.size() &&
                    (lq.entries[i].hash < lx.entries[j].hash ||
                     (lq.entries[i].hash == lx.entries[j].hash &&
                      lq.entries[i].element < lx.entries[j].element)))) {
            hash = lq.entries[i].hash;
            ++i;
        } else {
            hash = lx.entries[j].hash;
            ++j;
        }
        ++est.k;
        est.u_k = std::max(est.u_k, hash);
    }

    const double kd = static_cast<double>(est.k);
    if (lq.saturated && lx.saturated) {
        // tau == 1: the sketches hold everything, the count is exact.
        est.exact = true;
        est.d_cap_hat = static_cast<double>(est.k_cap);
    } else if (est.k >= 2) {
        est.d_cap_hat = (static_cast<double>(est.k_cap) / kd) * (kd - 1.0) / est.u_k;
    } else {
        // k in {0,1}: each retained common element witnesses mass 1/tau.
        est.used_fallback = true;
        est.d_cap_hat =
            est.k_cap == 0 ? 0.0 : static_cast<double>(est.k_cap) / lq.tau;
    }
    if (est.k >= 3 && !est.exact)
        est.variance_hat = variance_kmv(est.d_cap_hat, (kd - 1.0) / est.u_k, est.k);
    return est;
}

double estimate_containment_gbkmv(const GbkmvRecordSketch& sq,
                                  const GbkmvRecordSketch& sx,
                                  std::uint64_t q) {
    if (q < 1) throw std::invalid_argument("estimate_containment_gbkmv: q must be >= 1");
    const double o1 = buffer_overlap(sq.buffer, sx.buffer);
    const auto tail = estimate_intersection_gkmv(sq.tail, sx.tail);
    const double c = (o1 + tail.d_cap_hat) / static_cast<double>(q);
    return std::clamp(c, 0.0, 1.0);
}

bool validate_gkmv_union(const KmvSketch& lx, const KmvSketch& ly,
                         const Record& x, const Record& y,
                         const HashSource& h) {
    // Union of the two sketches, deduplicated by element.
    std::vector<SketchEntry> merged;
    merged.reserve(lx.size() + ly.size());
    std::size_t i = 0, j = 0;
    auto less = [](const SketchEntry& a, const SketchEntry& b) {
        if (a.hash != b.hash) return a.hash < b.hash;
        return a.element < b.element;
    };
    while (i < lx.size() || j < ly.size()) {
        if (i < lx.size() && j < ly.size() &&
            lx.entries[i].element == ly.entries[j].element) {
            merged.push_back(lx.entries[i]);
            ++i;
            ++j;
        } else if (j >= ly.size() ||
                   (i < lx.size() && less(lx.entries[i], ly.entries[j]))) {
            merged.push_back(lx.entries[i++]);
        } else {
            merged.push_back(ly.entries[j++]);
        }
    }

    // Brute-force enumeration of h(X ∪ Y).
    Record uni;
    uni.reserve(x.size() + y.size());
    std::set_union(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(uni));
    std::vector<SketchEntry> all;
    all.reserve(uni.size());
    for (ElementId e : uni) all.push_back({e, h.hash(e)});
    std::sort(all.begin(), all.end(), less);

    if (merged.size() > all.size()) return false;
    for (std::size_t t = 0; t < merged.size(); ++t) {
        if (merged[t].element != all[t].element || merged[t].hash != all[t].hash)
            return false;
    }
    return true;
}

double stored_element_units(const GbkmvIndex& index) {
    double units =
        static_cast<double>(index.record_count()) * index.r / 32.0;
    for (const auto& s : index.sketches)
        units += static_cast<double>(s.tail.size());
    return units;
}

} // namespace gbkmv
