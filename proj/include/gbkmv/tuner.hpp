#pragma once

#include "gbkmv/dataset.hpp"

#include <cstdint>
#include <vector>

namespace gbkmv {

// Ordered size pair: the first component plays the query role.
struct SizePair {
    std::uint32_t query_size;
    std::uint32_t record_size;
};

/// Inputs of the buffer-size cost model: dataset statistics plus a fixed
/// sample of ordered record-size pairs. The grid holds the candidate buffer
/// widths (multiples of 8, r = 0 always included, m*r/32 < budget).
struct CostModelInputs {
    double budget = 0.0;
    std::uint64_t m = 0;
    std::uint64_t total = 0;  // N
    std::vector<double> f_prefix;
    std::vector<double> f_prefix_sq;
    std::vector<SizePair> pairs;
    std::vector<std::uint32_t> grid;
    std::uint64_t pair_seed = 0;
};

CostModelInputs make_cost_model_inputs(const DatasetStats& stats, double budget,
                                       std::size_t pair_count,
                                       std::uint64_t seed);

/// Predicted average estimator variance with an r-bit buffer:
///   F1 = f_{n^2} - f_{r^2},  F2 = -F1^2,  F3 = -F1,
///   tau(r) = (b - m r/32) / (N - N1(r)),
///   k(xj, xl) = tau (xj + xl) - tau^2 xj xl F1,
/// with the L-terms averaged over the sampled pairs. Throws when tau(r) is
/// not positive.
double predict_var_gbkmv(const CostModelInputs& inputs, std::uint32_t r);

/// Grid argmin of predict_var_gbkmv; r = 0 participates, so a buffer is only
/// chosen when it predicts no worse than none. Ties go to the smaller r.
std::uint32_t choose_buffer_size(const CostModelInputs& inputs);

struct TaylorVariance {
    double value = 0.0;
    bool degenerate = false;  // s in {0,1}; zero returned by continuity
};

/// Taylor-approximated variance of the MinHash containment estimator,
/// with s = D_cap / (q + x - D_cap).
TaylorVariance predict_var_minhash(double q, double x, double d_cap,
                                   std::uint64_t k_prime);

/// Same with the partition upper bound u in place of x; exceeds the MinHash
/// value by the factor ((u+q)/(x+q))^2.
TaylorVariance predict_var_lshe(double q, double x, double u, double d_cap,
                                std::uint64_t k_prime);

} // namespace gbkmv
