#include "gbkmv/lshe.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace gbkmv {

MinHashSignature minhash_signature(const Record& x, std::uint32_t k_prime,
                                   const HashSource& h) {
    if (x.empty()) throw std::invalid_argument("minhash_signature: empty record");
    if (k_prime < 1) throw std::invalid_argument("minhash_signature: k' must be >= 1");
    if (h.is_fixture())
        throw std::invalid_argument("minhash_signature: computed hash source required");

    std::vector<std::uint64_t> fn_seeds(k_prime);
    for (std::uint32_t i = 0; i < k_prime; ++i) fn_seeds[i] = h.fn_seed(i);

    MinHashSignature sig(k_prime, std::numeric_limits<double>::infinity());
    for (ElementId e : x) {
        const std::uint64_t ae = avalanche64(e);
        for (std::uint32_t i = 0; i < k_prime; ++i) {
            const double v = unit_from_u64(avalanche64(fn_seeds[i] ^ ae));
            if (v < sig[i]) sig[i] = v;
        }
    }
    return sig;
}

double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("estimate_jaccard: signature sizes differ");
    std::size_t matches = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] == b[i]) ++matches;
    return static_cast<double>(matches) / static_cast<double>(a.size());
}

double containment_to_jaccard(double t, double x, double q) {
    if (x <= 0.0 || q <= 0.0)
        throw std::invalid_argument("transform: sizes must be positive");
    const double denom = x / q + 1.0 - t;
    if (denom <= 0.0) throw std::invalid_argument("transform: nonpositive denominator");
    return t / denom;
}

double jaccard_to_containment(double s, double x, double q) {
    if (x <= 0.0 || q <= 0.0)
        throw std::invalid_argument("transform: sizes must be positive");
    return (x / q + 1.0) * s / (1.0 + s);
}

LsheIndex build_lshe_index(const std::vector<Record>& records,
                           std::uint32_t k_prime, std::uint32_t partitions,
                           const HashSource& h) {
    if (records.empty()) throw std::invalid_argument("build_lshe_index: no records");
    LsheIndex idx;
    idx.k_prime = k_prime;
    idx.seed = h.seed();

    const std::size_t m = records.size();
    const std::uint32_t g = std::max<std::uint32_t>(
        1, std::min<std::uint32_t>(partitions, static_cast<std::uint32_t>(m)));

    std::vector<std::uint32_t> order(m);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) {
                         return records[a].size() < records[b].size();
                     });

    idx.partitions.resize(g);
    const std::size_t base = m / g;
    const std::size_t rem = m % g;
    std::size_t pos = 0;
    for (std::uint32_t p = 0; p < g; ++p) {
        const std::size_t len = base + (p < rem ? 1 : 0);
        auto& part = idx.partitions[p];
        part.record_ids.assign(order.begin() + pos, order.begin() + pos + len);
        part.upper_bound = part.record_ids.empty()
                               ? 0
                               : static_cast<std::uint32_t>(
                                     records[part.record_ids.back()].size());
        pos += len;
    }

    idx.signatures.reserve(m);
    for (const auto& rec : records)
        idx.signatures.push_back(minhash_signature(rec, k_prime, h));
    return idx;
}

std::vector<std::uint32_t> lshe_query(const LsheIndex& index, const Record& q,
                                      double t_star, const HashSource& h) {
    if (t_star < 0.0 || t_star > 1.0)
        throw std::invalid_argument("lshe_query: threshold outside [0, 1]");
    if (h.seed() != index.seed)
        throw std::invalid_argument("lshe_query: hash source does not match the index");
    const auto sig_q = minhash_signature(q, index.k_prime, h);
    const double qd = static_cast<double>(q.size());

    std::vector<std::uint32_t> out;
    for (const auto& part : index.partitions) {
        const double s_star =
            containment_to_jaccard(t_star, static_cast<double>(part.upper_bound), qd);
        for (std::uint32_t rid : part.record_ids) {
            if (estimate_jaccard(sig_q, index.signatures[rid]) >= s_star)
                out.push_back(rid);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace gbkmv
