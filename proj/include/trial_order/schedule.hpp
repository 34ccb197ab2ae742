#pragma once

#include <trial_order/model.hpp>

#include <algorithm>
#include <numeric>

namespace trial_order {

struct ExpectationOptions {
    // Add the time spent discovering that every candidate fails
    // (sum of all times weighted by the all-fail probability).
    // Without it the result is the success-weighted sum only, which is not a
    // conditional expectation: its weights sum to 1 - Q_N, not 1.
    bool include_failure_tail = true;
};

// Candidates sorted by p / mean_time, largest first. Equal ratios keep input
// order. Ratios are compared exactly.
inline Ordering solomonoff_order(const CandidateSet& set) {
    std::vector<std::size_t> perm(set.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
        return ratio(set[a]) > ratio(set[b]);
    });
    return Ordering(std::move(perm));
}

inline double expected_time(const Arranged& a, ExpectationOptions opts = {}) {
    double elapsed = 0.0;
    double survive = 1.0;
    double e = 0.0;
    for (std::size_t r = 0; r < a.size(); ++r) {
        elapsed += a.t[r];
        e += elapsed * survive * a.p[r];
        survive *= 1.0 - a.p[r];
    }
    if (opts.include_failure_tail) e += elapsed * survive;
    return e;
}

// Expected time until the first success (or until every candidate has failed,
// when the tail is included) when candidates are tried along ord.
inline double expected_time(const CandidateSet& set, const Ordering& ord,
                            ExpectationOptions opts = {}) {
    return expected_time(arrange(set, ord), opts);
}

// The all-fail term T_N * Q_N. Independent of the ordering.
inline double failure_tail(const CandidateSet& set, const Ordering& ord) {
    const auto agg = prefix_aggregates(set, ord, set.size());
    return agg.T * agg.Q;
}

inline bool is_ratio_sorted(const CandidateSet& set, const Ordering& ord) {
    require_matching(set, ord);
    for (std::size_t r = 1; r < ord.size(); ++r)
        if (ratio(set[ord[r - 1]]) < ratio(set[ord[r]])) return false;
    return true;
}

} // namespace trial_order
