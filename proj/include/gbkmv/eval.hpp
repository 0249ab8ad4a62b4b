#pragma once

#include "gbkmv/dataset.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace gbkmv {

/// (1 + a^2) P R / (a^2 P + R); 0 when precision and recall are both 0.
double f_alpha(double precision, double recall, double alpha);

enum class Method { Gbkmv, Gkmv, Kmv, Lshe, Exact };

Method parse_method(const std::string& name);
std::string method_name(Method m);

struct EvalConfig {
    Method method = Method::Gbkmv;
    double budget_ratio = 0.10;  // of total dataset size N
    double t_star = 0.5;
    std::uint32_t num_queries = 200;
    std::uint64_t seed = 0;
    std::uint32_t k_prime = 256;    // lshe signature size
    std::uint32_t partitions = 32;  // size partitions (search and lshe)
};

struct QueryMetrics {
    std::uint32_t query_record = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double f05 = 0.0;
    double latency_us = 0.0;
    std::uint64_t truth_size = 0;
    std::uint64_t answer_size = 0;
};

struct EvalReport {
    EvalConfig config;
    std::vector<QueryMetrics> per_query;

    // Unweighted means over queries.
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double f05 = 0.0;

    double mean_latency_us = 0.0;
    double median_latency_us = 0.0;
    double build_ms = 0.0;

    double space_units = 0.0;
    std::uint64_t space_bytes = 0;
    double budget_units = 0.0;

    std::uint32_t buffer_bits = 0;  // r actually used (gbkmv)
    double tau = 0.0;
    std::vector<std::string> deviations;
};

/// Samples num_queries records without replacement, runs the chosen method
/// against the exact ground truth and aggregates precision/recall/F-scores,
/// latency and space. Deterministic for a fixed (dataset, config, seed).
EvalReport run_eval(const Dataset& ds, const EvalConfig& cfg);

void write_jsonl(const EvalReport& report, std::ostream& out);
void write_csv(const EvalReport& report, std::ostream& out);

} // namespace gbkmv
