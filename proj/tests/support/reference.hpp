#pragma once

// Test-only ground truth, written independently of the library: the expected
// time is evaluated literally as nested sums and products, exactly as the
// success-then-tail expression reads, with no running prefix state.

#include <trial_order/model.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace reference {

// sum_k (sum_{l<=k} t_l) * prod_{j<k} (1-p_j) * p_k  [+ sum_l t_l * prod_j (1-p_j)]
inline double expected_time(const std::vector<double>& p, const std::vector<double>& t,
                            const std::vector<std::size_t>& perm, bool tail = true) {
    const std::size_t N = perm.size();
    double e = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
        double time_sum = 0.0;
        for (std::size_t l = 0; l <= k; ++l) time_sum += t[perm[l]];
        double fail = 1.0;
        for (std::size_t j = 0; j < k; ++j) fail *= 1.0 - p[perm[j]];
        e += time_sum * fail * p[perm[k]];
    }
    if (tail) {
        double time_sum = 0.0, fail = 1.0;
        for (std::size_t l = 0; l < N; ++l) {
            time_sum += t[perm[l]];
            fail *= 1.0 - p[perm[l]];
        }
        e += time_sum * fail;
    }
    return e;
}

// Expected-time difference of exchanging 1-based positions k and k+n along perm.
inline double swap_difference(const std::vector<double>& p, const std::vector<double>& t,
                              std::vector<std::size_t> perm, std::size_t k, std::size_t n) {
    const double before = expected_time(p, t, perm);
    std::swap(perm[k - 1], perm[k + n - 1]);
    return expected_time(p, t, perm) - before;
}

// Minimum over all orderings by explicit enumeration.
inline double best_over_permutations(const std::vector<double>& p, const std::vector<double>& t) {
    std::vector<std::size_t> perm(p.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    double best = expected_time(p, t, perm);
    while (std::next_permutation(perm.begin(), perm.end()))
        best = std::min(best, expected_time(p, t, perm));
    return best;
}

inline double literal_weighted_geometric_sum(double r, std::size_t n) {
    double s = 0.0;
    for (std::size_t l = 1; l <= n; ++l) s += static_cast<double>(l) * std::pow(r, static_cast<double>(l));
    return s;
}

inline double scaled_diff(double a, double b) {
    return std::abs(a - b) / std::max(1.0, std::abs(b));
}

struct Instance {
    std::vector<double> p;
    std::vector<double> t; // mean times
    trial_order::CandidateSet set;
};

// Random candidate set with up to max_samples time samples each.
inline Instance random_instance(std::mt19937_64& rng, std::size_t n_min, std::size_t n_max,
                                double p_lo = 0.05, double p_hi = 0.95, double t_lo = 0.1,
                                double t_hi = 10.0, std::size_t max_samples = 3) {
    std::uniform_int_distribution<std::size_t> count(n_min, n_max);
    std::uniform_int_distribution<std::size_t> samples(1, max_samples);
    std::uniform_real_distribution<double> up(p_lo, p_hi), ut(t_lo, t_hi);
    const std::size_t N = count(rng);
    std::vector<trial_order::CandidateSpec> specs;
    std::vector<double> ps, ts;
    for (std::size_t i = 0; i < N; ++i) {
        trial_order::CandidateSpec s{"c" + std::to_string(i + 1), up(rng), {}};
        const std::size_t m = samples(rng);
        double sum = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            s.times.push_back(ut(rng));
            sum += s.times.back();
        }
        ps.push_back(s.p);
        ts.push_back(sum / static_cast<double>(m));
        specs.push_back(std::move(s));
    }
    auto set = trial_order::CandidateSet::from_specs(specs);
    return {std::move(ps), std::move(ts), std::move(set)};
}

inline std::vector<std::size_t> perm_of(const trial_order::Ordering& ord) {
    return {ord.perm().begin(), ord.perm().end()};
}

} // namespace reference
