#include "gbkmv/search.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>

namespace gbkmv {

SearchThresholds compute_thresholds(double t_star, std::uint64_t q,
                                    std::uint32_t o1, double u_k) {
    SearchThresholds t;
    t.t_star = t_star;
    t.q = q;
    t.theta = t_star * static_cast<double>(q);
    t.o1 = o1;
    t.o = std::max(0.0, u_k * (t.theta - static_cast<double>(o1)));
    return t;
}

SizePartitionIndex::SizePartitionIndex(const GbkmvIndex& index,
                                       std::uint32_t partitions) {
    const std::size_t m = index.record_count();
    if (m == 0) throw std::invalid_argument("SizePartitionIndex: empty index");
    const std::uint32_t g =
        std::max<std::uint32_t>(1, std::min<std::uint32_t>(partitions,
                                                           static_cast<std::uint32_t>(m)));

    std::vector<std::uint32_t> order(m);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) {
                         return index.record_sizes[a] < index.record_sizes[b];
                     });

    // Equal depth: partition sizes differ by at most one.
    partitions_.resize(g);
    const std::size_t base = m / g;
    const std::size_t rem = m % g;
    std::size_t pos = 0;
    for (std::uint32_t p = 0; p < g; ++p) {
        const std::size_t len = base + (p < rem ? 1 : 0);
        auto& part = partitions_[p];
        part.record_ids.assign(order.begin() + pos, order.begin() + pos + len);
        part.size_lower_bound =
            part.record_ids.empty() ? 0 : index.record_sizes[part.record_ids.front()];
        pos += len;
        std::sort(part.record_ids.begin(), part.record_ids.end());
        for (std::uint32_t rid : part.record_ids) {
            for (const auto& entry : index.sketches[rid].tail.entries)
                part.inverted[entry.element].push_back(rid);
        }
    }

    // Word-major column store of the buffer bitmaps.
    const std::size_t words = (index.r + 31) / 32;
    buffer_columns_.assign(words, std::vector<std::uint32_t>(m, 0u));
    for (std::size_t rid = 0; rid < m; ++rid) {
        const auto& ws = index.sketches[rid].buffer.words;
        for (std::size_t w = 0; w < words; ++w) buffer_columns_[w][rid] = ws[w];
    }

    tail_max_.resize(m);
    for (std::size_t rid = 0; rid < m; ++rid)
        tail_max_[rid] = index.sketches[rid].tail.max_hash();
}

std::vector<SearchHit> query(const GbkmvIndex& index,
                             const SizePartitionIndex& accel,
                             const Record& q, double t_star) {
    if (t_star < 0.0 || t_star > 1.0)
        throw std::invalid_argument("query: threshold outside [0, 1]");
    const auto sq = sketch_query(q, index);
    const std::size_t m = index.record_count();
    const double qd = static_cast<double>(q.size());
    const double theta = t_star * qd;

    // Exact buffer overlaps for every record, a tight columnar loop.
    std::vector<std::uint32_t> o1(m, 0);
    for (std::size_t w = 0; w < sq.buffer.words.size(); ++w) {
        const std::uint32_t qw = sq.buffer.words[w];
        if (qw == 0) continue;
        const auto& col = accel.buffer_columns()[w];
        for (std::size_t rid = 0; rid < m; ++rid)
            o1[rid] += static_cast<std::uint32_t>(std::popcount(qw & col[rid]));
    }

    std::vector<SearchHit> hits;
    std::vector<std::uint8_t> via_tail(m, 0);

    if (!sq.tail.entries.empty()) {
        const double q_tail_max = sq.tail.max_hash();
        std::unordered_map<std::uint32_t, std::uint32_t> counts;
        for (const auto& part : accel.partitions()) {
            counts.clear();
            for (const auto& entry : sq.tail.entries) {
                auto it = part.inverted.find(entry.element);
                if (it == part.inverted.end()) continue;
                for (std::uint32_t rid : it->second) ++counts[rid];
            }
            for (const auto& [rid, k_cap] : counts) {
                via_tail[rid] = 1;
                // K_cap >= o is necessary for the estimate to reach theta,
                // so failing it can be dropped without evaluating the pair.
                const double u = std::max(q_tail_max, accel.tail_max(rid));
                const auto th = compute_thresholds(t_star, q.size(), o1[rid], u);
                if (static_cast<double>(k_cap) < th.o) continue;
                const double est =
                    estimate_containment_gbkmv(sq, index.sketches[rid], q.size());
                if (est * qd >= theta) hits.push_back({rid, est});
            }
        }
    }

    // Records with no tail match have a zero tail estimate; they qualify
    // through the buffer alone. Same arithmetic as the full estimator with
    // K_cap = 0.
    for (std::uint32_t rid = 0; rid < m; ++rid) {
        if (via_tail[rid]) continue;
        const double est =
            std::clamp((static_cast<double>(o1[rid]) + 0.0) / qd, 0.0, 1.0);
        if (est * qd >= theta) hits.push_back({rid, est});
    }

    std::sort(hits.begin(), hits.end(),
              [](const SearchHit& a, const SearchHit& b) {
                  return a.record_id < b.record_id;
              });
    return hits;
}

std::uint64_t intersection_size(const Record& a, const Record& b) {
    std::uint64_t count = 0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) {
            ++count;
            ++i;
            ++j;
        } else if (a[i] < b[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    return count;
}

std::vector<SearchHit> exact_search(const std::vector<Record>& records,
                                    const Record& q, double t_star) {
    if (t_star < 0.0 || t_star > 1.0)
        throw std::invalid_argument("exact_search: threshold outside [0, 1]");
    if (q.empty()) throw std::invalid_argument("exact_search: empty query");
    std::vector<SearchHit> hits;
    const double qd = static_cast<double>(q.size());
    for (std::size_t rid = 0; rid < records.size(); ++rid) {
        const double c = static_cast<double>(intersection_size(q, records[rid])) / qd;
        if (c >= t_star) hits.push_back({static_cast<std::uint32_t>(rid), c});
    }
    return hits;
}

} // namespace gbkmv
