#include "gbkmv/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace gbkmv {

CostModelInputs make_cost_model_inputs(const DatasetStats& stats, double budget,
                                       std::size_t pair_count,
                                       std::uint64_t seed) {
    if (stats.m == 0) throw std::invalid_argument("cost model: empty dataset");
    CostModelInputs in;
    in.budget = budget;
    in.m = stats.m;
    in.total = stats.total;
    in.f_prefix = stats.f_prefix;
    in.f_prefix_sq = stats.f_prefix_sq;
    in.pair_seed = seed;

    // Ordered pairs, query role first; drawing both ends independently keeps
    // the diagonal in the sample space.
    std::mt19937_64 rng(seed);
    in.pairs.reserve(pair_count);
    for (std::size_t i = 0; i < pair_count; ++i) {
        const auto j = static_cast<std::size_t>(rng() % stats.m);
        const auto l = static_cast<std::size_t>(rng() % stats.m);
        in.pairs.push_back({stats.sizes[j], stats.sizes[l]});
    }

    // Candidate widths: multiples of 8 whose buffer cost stays inside the
    // budget; widths beyond the universe change nothing.
    const std::uint64_t universe = stats.freq.size();
    for (std::uint64_t r = 0;; r += 8) {
        if (r > 0 && static_cast<double>(stats.m) * r / 32.0 >= budget) break;
        in.grid.push_back(static_cast<std::uint32_t>(r));
        if (r >= universe) break;
    }
    return in;
}

double predict_var_gbkmv(const CostModelInputs& in, std::uint32_t r) {
    const std::uint64_t universe = in.f_prefix.size() - 1;
    const std::uint64_t rr = std::min<std::uint64_t>(r, universe);

    const double tail_budget =
        in.budget - static_cast<double>(in.m) * r / 32.0;
    if (tail_budget < 0.0)
        throw std::invalid_argument("predict_var_gbkmv: infeasible r");

    const double f_n2 = in.f_prefix_sq[universe];
    const double f_r2 = in.f_prefix_sq[rr];
    const double f1 = f_n2 - f_r2;
    if (f1 <= 0.0) return 0.0;  // everything buffered: the sketch is exact
    const double f2 = -f1 * f1;
    const double f3 = -f1;

    const double buffered_mass = in.f_prefix[rr] * static_cast<double>(in.total);
    const double tail_mass = static_cast<double>(in.total) - buffered_mass;
    double tau = tail_budget / tail_mass;
    if (tau <= 0.0) throw std::invalid_argument("predict_var_gbkmv: infeasible r");
    tau = std::min(tau, 1.0);

    double l1 = 0.0, l2 = 0.0, l3 = 0.0;
    for (const auto& p : in.pairs) {
        const double xj = p.query_size;
        const double xl = p.record_size;
        double k = tau * (xj + xl) - tau * tau * xj * xl * f1;
        k = std::max(k, 1e-9);
        l1 += (xj + xl) * xl / (k * xj);
        l2 += xl * xl / k;
        l3 += xl / xj;
    }
    const double cnt = static_cast<double>(in.pairs.size());
    l1 /= cnt;
    l2 /= cnt;
    l3 /= cnt;
    return l1 * f1 + l2 * f2 + l3 * f3;
}

std::uint32_t choose_buffer_size(const CostModelInputs& in) {
    if (in.grid.empty()) throw std::invalid_argument("choose_buffer_size: empty grid");
    std::uint32_t best_r = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t r : in.grid) {
        double v;
        try {
            v = predict_var_gbkmv(in, r);
        } catch (const std::invalid_argument&) {
            continue;  // infeasible width
        }
        if (v < best) {
            best = v;
            best_r = r;
        }
    }
    return best_r;
}

namespace {

TaylorVariance taylor_var(double q, double x, double d_cap, std::uint64_t k_prime,
                          double inflation) {
    if (q <= 0.0 || x <= 0.0) throw std::invalid_argument("taylor variance: sizes must be positive");
    if (k_prime < 1) throw std::invalid_argument("taylor variance: k' must be >= 1");
    if (d_cap < 0.0 || d_cap > std::min(q, x))
        throw std::invalid_argument("taylor variance: D_cap outside [0, min(q, x)]");

    const double s = d_cap / (q + x - d_cap);  // Jaccard of the pair
    if (s <= 0.0 || s >= 1.0) return {0.0, true};

    const double k = static_cast<double>(k_prime);
    const double one_plus = 1.0 + s;
    const double numer =
        d_cap * d_cap * (1.0 - s) * (k * one_plus * one_plus - s * (1.0 - s));
    const double denom = q * q * k * k * s * one_plus * one_plus * one_plus * one_plus;
    return {inflation * inflation * numer / denom, false};
}

} // namespace

TaylorVariance predict_var_minhash(double q, double x, double d_cap,
                                   std::uint64_t k_prime) {
    return taylor_var(q, x, d_cap, k_prime, 1.0);
}

TaylorVariance predict_var_lshe(double q, double x, double u, double d_cap,
                                std::uint64_t k_prime) {
    if (u < x) throw std::invalid_argument("predict_var_lshe: u must be >= x");
    return taylor_var(q, x, d_cap, k_prime, (u + q) / (x + q));
}

} // namespace gbkmv
