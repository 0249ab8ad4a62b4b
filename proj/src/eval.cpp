#include "gbkmv/eval.hpp"

#include "gbkmv/gbkmv_sketch.hpp"
#include "gbkmv/kmv.hpp"
#include "gbkmv/lshe.hpp"
#include "gbkmv/search.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>

namespace gbkmv {

double f_alpha(double precision, double recall, double alpha) {
    if (precision < 0.0 || precision > 1.0 || recall < 0.0 || recall > 1.0)
        throw std::invalid_argument("f_alpha: precision/recall outside [0, 1]");
    if (alpha <= 0.0) throw std::invalid_argument("f_alpha: alpha must be positive");
    if (precision == 0.0 && recall == 0.0) return 0.0;
    const double a2 = alpha * alpha;
    return (1.0 + a2) * precision * recall / (a2 * precision + recall);
}

Method parse_method(const std::string& name) {
    if (name == "gbkmv") return Method::Gbkmv;
    if (name == "gkmv") return Method::Gkmv;
    if (name == "kmv") return Method::Kmv;
    if (name == "lshe") return Method::Lshe;
    if (name == "exact") return Method::Exact;
    throw std::invalid_argument("unknown method: " + name);
}

std::string method_name(Method m) {
    switch (m) {
        case Method::Gbkmv: return "gbkmv";
        case Method::Gkmv: return "gkmv";
        case Method::Kmv: return "kmv";
        case Method::Lshe: return "lshe";
        case Method::Exact: return "exact";
    }
    return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Sample without replacement by a partial Fisher-Yates shuffle.
std::vector<std::uint32_t> sample_queries(std::uint64_t m, std::uint32_t count,
                                          std::uint64_t seed) {
    std::vector<std::uint32_t> ids(m);
    std::iota(ids.begin(), ids.end(), 0u);
    std::mt19937_64 rng(seed);
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto j = i + static_cast<std::uint32_t>(rng() % (m - i));
        std::swap(ids[i], ids[j]);
    }
    ids.resize(count);
    return ids;
}

struct PrMetrics {
    double precision;
    double recall;
};

// Empty-set conventions: a vacuous ratio (0/0) counts as perfect.
PrMetrics precision_recall(const std::vector<std::uint32_t>& truth,
                           const std::vector<std::uint32_t>& answer) {
    std::uint64_t both = 0;
    std::size_t i = 0, j = 0;
    while (i < truth.size() && j < answer.size()) {
        if (truth[i] == answer[j]) {
            ++both;
            ++i;
            ++j;
        } else if (truth[i] < answer[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    PrMetrics pr{};
    pr.precision = answer.empty()
                       ? 1.0
                       : static_cast<double>(both) / static_cast<double>(answer.size());
    pr.recall = truth.empty()
                    ? 1.0
                    : static_cast<double>(both) / static_cast<double>(truth.size());
    return pr;
}

std::vector<std::uint32_t> hit_ids(const std::vector<SearchHit>& hits) {
    std::vector<std::uint32_t> ids;
    ids.reserve(hits.size());
    for (const auto& h : hits) ids.push_back(h.record_id);
    return ids;
}

} // namespace

EvalReport run_eval(const Dataset& ds, const EvalConfig& cfg) {
    const std::uint64_t m = ds.records.size();
    if (cfg.num_queries > m)
        throw std::invalid_argument("run_eval: more queries than records");
    if (cfg.num_queries == 0)
        throw std::invalid_argument("run_eval: no queries requested");

    EvalReport report;
    report.config = cfg;
    const auto budget = static_cast<std::uint64_t>(
        cfg.budget_ratio * static_cast<double>(ds.stats.total));
    report.budget_units = static_cast<double>(budget);
    report.deviations = {
        "power-law exponents fitted with continuous MLE at fixed v_min",
        "lshe candidates by direct signature comparison, no banding",
    };

    const HashSource h = HashSource::computed(cfg.seed);
    const auto query_ids = sample_queries(m, cfg.num_queries, cfg.seed);

    // Method-specific build.
    GbkmvIndex gb_index;
    std::optional<SizePartitionIndex> accel;
    std::vector<KmvSketch> kmv_index;
    LsheIndex lshe_index;

    const auto build_start = Clock::now();
    switch (cfg.method) {
        case Method::Gbkmv:
        case Method::Gkmv: {
            std::optional<std::uint32_t> r;
            if (cfg.method == Method::Gkmv) r = 0;
            gb_index = build_gbkmv_index(ds, static_cast<double>(budget), r, h);
            accel.emplace(gb_index, cfg.partitions);
            report.buffer_bits = gb_index.r;
            report.tau = gb_index.tau;
            report.space_units = stored_element_units(gb_index);
            std::uint64_t tail_entries = 0;
            for (const auto& s : gb_index.sketches) tail_entries += s.tail.size();
            report.space_bytes =
                gb_index.record_count() * ((gb_index.r + 31) / 32) * 4 +
                tail_entries * 12;
            break;
        }
        case Method::Kmv: {
            kmv_index = build_kmv_index(ds.records, budget, h);
            std::uint64_t entries = 0;
            for (const auto& s : kmv_index) entries += s.size();
            report.space_units = static_cast<double>(entries);
            report.space_bytes = entries * 12;
            break;
        }
        case Method::Lshe: {
            lshe_index =
                build_lshe_index(ds.records, cfg.k_prime, cfg.partitions, h);
            report.space_units = static_cast<double>(m) * cfg.k_prime;
            report.space_bytes = m * cfg.k_prime * 8;
            break;
        }
        case Method::Exact:
            break;
    }
    report.build_ms = ms_since(build_start);

    std::vector<double> latencies;
    latencies.reserve(cfg.num_queries);

    for (std::uint32_t qid : query_ids) {
        const Record& q = ds.records[qid];
        const auto truth = hit_ids(exact_search(ds.records, q, cfg.t_star));

        const auto query_start = Clock::now();
        std::vector<std::uint32_t> answer;
        switch (cfg.method) {
            case Method::Gbkmv:
            case Method::Gkmv:
                answer = hit_ids(query(gb_index, *accel, q, cfg.t_star));
                break;
            case Method::Kmv: {
                // The query is a record: it gets the same floor(b/m) capacity.
                const auto sq = build_kmv(q, kmv_index.front().capacity, h);
                const double qd = static_cast<double>(q.size());
                const double theta = cfg.t_star * qd;
                for (std::uint32_t rid = 0; rid < m; ++rid) {
                    const auto& sx = kmv_index[rid];
                    double est = 0.0;
                    if (sq.size() >= 2 && sx.size() >= 2) {
                        est = std::clamp(
                            estimate_intersection_kmv(sq, sx).d_cap_hat / qd, 0.0,
                            1.0);
                    }
                    if (est * qd >= theta) answer.push_back(rid);
                }
                break;
            }
            case Method::Lshe:
                answer = lshe_query(lshe_index, q, cfg.t_star, h);
                break;
            case Method::Exact:
                answer = truth;
                break;
        }
        const double latency_us =
            std::chrono::duration<double, std::micro>(Clock::now() - query_start)
                .count();
        latencies.push_back(latency_us);

        const auto pr = precision_recall(truth, answer);
        QueryMetrics qm;
        qm.query_record = qid;
        qm.precision = pr.precision;
        qm.recall = pr.recall;
        qm.f1 = f_alpha(pr.precision, pr.recall, 1.0);
        qm.f05 = f_alpha(pr.precision, pr.recall, 0.5);
        qm.latency_us = latency_us;
        qm.truth_size = truth.size();
        qm.answer_size = answer.size();
        report.per_query.push_back(qm);
    }

    for (const auto& qm : report.per_query) {
        report.precision += qm.precision;
        report.recall += qm.recall;
        report.f1 += qm.f1;
        report.f05 += qm.f05;
    }
    const double nq = static_cast<double>(report.per_query.size());
    report.precision /= nq;
    report.recall /= nq;
    report.f1 /= nq;
    report.f05 /= nq;

    report.mean_latency_us =
        std::accumulate(latencies.begin(), latencies.end(), 0.0) / nq;
    std::sort(latencies.begin(), latencies.end());
    report.median_latency_us = latencies[latencies.size() / 2];
    return report;
}

void write_jsonl(const EvalReport& report, std::ostream& out) {
    using nlohmann::json;
    for (const auto& qm : report.per_query) {
        json j{{"type", "query"},
               {"query_record", qm.query_record},
               {"precision", qm.precision},
               {"recall", qm.recall},
               {"f1", qm.f1},
               {"f05", qm.f05},
               {"latency_us", qm.latency_us},
               {"truth_size", qm.truth_size},
               {"answer_size", qm.answer_size}};
        out << j.dump() << '\n';
    }
    json agg{{"type", "aggregate"},
             {"method", method_name(report.config.method)},
             {"budget_ratio", report.config.budget_ratio},
             {"t_star", report.config.t_star},
             {"num_queries", report.config.num_queries},
             {"seed", report.config.seed},
             {"k_prime", report.config.k_prime},
             {"partitions", report.config.partitions},
             {"precision", report.precision},
             {"recall", report.recall},
             {"f1", report.f1},
             {"f05", report.f05},
             {"mean_latency_us", report.mean_latency_us},
             {"median_latency_us", report.median_latency_us},
             {"build_ms", report.build_ms},
             {"space_units", report.space_units},
             {"space_bytes", report.space_bytes},
             {"budget_units", report.budget_units},
             {"buffer_bits", report.buffer_bits},
             {"tau", report.tau},
             {"deviations", report.deviations}};
    out << agg.dump() << '\n';
}

void write_csv(const EvalReport& report, std::ostream& out) {
    out << "query_record,precision,recall,f1,f05,latency_us,truth_size,answer_size\n";
    for (const auto& qm : report.per_query) {
        out << qm.query_record << ',' << qm.precision << ',' << qm.recall << ','
            << qm.f1 << ',' << qm.f05 << ',' << qm.latency_us << ','
            << qm.truth_size << ',' << qm.answer_size << '\n';
    }
}

} // namespace gbkmv
