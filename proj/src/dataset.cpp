#include "gbkmv/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_set>

namespace gbkmv {

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

void split_tokens(const std::string& line, std::vector<std::string>& out) {
    out.clear();
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && is_space(line[i])) ++i;
        std::size_t start = i;
        while (i < line.size() && !is_space(line[i])) ++i;
        if (i > start) out.emplace_back(line.substr(start, i - start));
    }
}

// Deterministic uniform double in [0, 1) from the raw engine output.
double next_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1p-53;
}

// Draws an index from a cumulative weight table.
std::size_t pick_from_cdf(const std::vector<double>& cdf, double u) {
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u * cdf.back());
    if (it == cdf.end()) --it;
    return static_cast<std::size_t>(it - cdf.begin());
}

} // namespace

Dataset ingest(std::istream& in, std::uint32_t min_size) {
    if (min_size < 1) throw std::invalid_argument("ingest: min_size must be >= 1");
    if (!in) throw std::runtime_error("ingest: unreadable source");

    Dataset ds;
    std::string line;
    std::vector<std::string> parts;
    std::unordered_set<std::string> seen_in_line;

    while (std::getline(in, line)) {
        split_tokens(line, parts);
        if (parts.empty()) continue;

        // Collapse duplicates, keeping first-seen order for id assignment.
        seen_in_line.clear();
        std::vector<std::string> uniq;
        for (auto& tok : parts) {
            if (seen_in_line.insert(tok).second) uniq.push_back(tok);
        }
        if (uniq.size() < min_size) continue;

        Record rec;
        rec.reserve(uniq.size());
        for (auto& tok : uniq) {
            auto [it, inserted] = ds.token_ids.try_emplace(
                tok, static_cast<ElementId>(ds.tokens.size()));
            if (inserted) ds.tokens.push_back(tok);
            rec.push_back(it->second);
        }
        std::sort(rec.begin(), rec.end());
        ds.records.push_back(std::move(rec));
    }
    if (in.bad()) throw std::runtime_error("ingest: I/O error while reading");
    if (ds.records.empty()) throw std::runtime_error("ingest: no records retained");

    ds.stats = compute_stats(ds.records, ds.tokens.size());
    return ds;
}

Dataset ingest_file(const std::string& path, std::uint32_t min_size) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("ingest: cannot open " + path);
    return ingest(in, min_size);
}

Dataset from_records(std::vector<Record> records, std::uint64_t universe) {
    Dataset ds;
    ds.records = std::move(records);
    ds.stats = compute_stats(ds.records, universe);
    return ds;
}

DatasetStats compute_stats(const std::vector<Record>& records,
                           std::uint64_t universe) {
    DatasetStats s;
    s.m = records.size();
    s.freq.assign(universe, 0);
    s.sizes.reserve(records.size());

    for (const auto& rec : records) {
        if (rec.empty()) throw std::invalid_argument("compute_stats: empty record");
        s.sizes.push_back(static_cast<std::uint32_t>(rec.size()));
        s.total += rec.size();
        for (ElementId e : rec) {
            if (e >= universe)
                throw std::invalid_argument("compute_stats: element id outside universe");
            ++s.freq[e];
        }
    }
    s.n = static_cast<std::uint64_t>(
        std::count_if(s.freq.begin(), s.freq.end(), [](std::uint64_t f) { return f > 0; }));

    s.freq_rank.resize(universe);
    std::iota(s.freq_rank.begin(), s.freq_rank.end(), 0u);
    std::stable_sort(s.freq_rank.begin(), s.freq_rank.end(),
                     [&](ElementId a, ElementId b) {
                         if (s.freq[a] != s.freq[b]) return s.freq[a] > s.freq[b];
                         return a < b;
                     });

    const double n_total = static_cast<double>(s.total);
    s.f_prefix.assign(universe + 1, 0.0);
    s.f_prefix_sq.assign(universe + 1, 0.0);
    for (std::size_t i = 0; i < universe; ++i) {
        const double f = static_cast<double>(s.freq[s.freq_rank[i]]);
        s.f_prefix[i + 1] = s.f_prefix[i] + f / n_total;
        s.f_prefix_sq[i + 1] = s.f_prefix_sq[i] + (f * f) / (n_total * n_total);
    }

    auto fit_or_uniform = [](std::vector<std::uint64_t> values) {
        if (values.empty()) return 20.0;
        try {
            return fit_power_law(values);
        } catch (const std::runtime_error&) {
            return 20.0;  // all values equal: treat as uniform
        }
    };
    std::vector<std::uint64_t> nonzero;
    nonzero.reserve(s.freq.size());
    for (std::uint64_t f : s.freq)
        if (f > 0) nonzero.push_back(f);
    s.alpha1 = fit_or_uniform(std::move(nonzero));
    s.alpha2 = fit_or_uniform(
        std::vector<std::uint64_t>(s.sizes.begin(), s.sizes.end()));
    return s;
}

double fit_power_law(const std::vector<std::uint64_t>& values) {
    if (values.empty()) throw std::invalid_argument("fit_power_law: empty input");
    std::uint64_t v_min = *std::min_element(values.begin(), values.end());
    if (v_min < 1) throw std::invalid_argument("fit_power_law: values must be >= 1");

    double denom = 0.0;
    for (std::uint64_t v : values)
        denom += std::log(static_cast<double>(v) / static_cast<double>(v_min));
    if (denom == 0.0)
        throw std::runtime_error("fit_power_law: degenerate fit, all values equal");

    double alpha = 1.0 + static_cast<double>(values.size()) / denom;
    return std::clamp(alpha, 0.05, 20.0);
}

std::vector<Record> generate_zipf(const ZipfConfig& cfg) {
    if (cfg.records < 1) throw std::invalid_argument("generate_zipf: records must be >= 1");
    if (cfg.universe < 1) throw std::invalid_argument("generate_zipf: universe must be >= 1");
    if (cfg.min_size < 1 || cfg.min_size > cfg.max_size)
        throw std::invalid_argument("generate_zipf: bad size range");
    if (cfg.max_size > cfg.universe)
        throw std::invalid_argument("generate_zipf: max size exceeds universe");

    // Cumulative weight tables for sizes and element ranks.
    std::vector<double> size_cdf(cfg.max_size - cfg.min_size + 1);
    double acc = 0.0;
    for (std::size_t i = 0; i < size_cdf.size(); ++i) {
        acc += std::pow(static_cast<double>(cfg.min_size + i), -cfg.alpha2);
        size_cdf[i] = acc;
    }
    std::vector<double> elem_cdf(cfg.universe);
    acc = 0.0;
    for (std::size_t i = 0; i < cfg.universe; ++i) {
        acc += std::pow(static_cast<double>(i + 1), -cfg.alpha1);
        elem_cdf[i] = acc;
    }

    std::mt19937_64 rng(cfg.seed);
    std::vector<Record> records;
    records.reserve(cfg.records);
    std::unordered_set<ElementId> chosen;

    for (std::uint64_t j = 0; j < cfg.records; ++j) {
        const std::uint32_t size =
            cfg.min_size + static_cast<std::uint32_t>(pick_from_cdf(size_cdf, next_unit(rng)));
        chosen.clear();
        std::uint64_t attempts = 0;
        const std::uint64_t max_attempts = 200ull * size + 64;
        while (chosen.size() < size && attempts < max_attempts) {
            chosen.insert(static_cast<ElementId>(pick_from_cdf(elem_cdf, next_unit(rng))));
            ++attempts;
        }
        if (chosen.size() < size) {
            // Rejection stalled (record size close to the universe); fill
            // deterministically from the low ranks.
            for (ElementId e = 0; chosen.size() < size; ++e) chosen.insert(e);
        }
        Record rec(chosen.begin(), chosen.end());
        std::sort(rec.begin(), rec.end());
        records.push_back(std::move(rec));
    }
    return records;
}

} // namespace gbkmv
