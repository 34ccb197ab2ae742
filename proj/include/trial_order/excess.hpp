#pragma once

// Expected-time penalty ("excess") of exchanging two candidates in a trial
// order. Positions k and distance n are 1-based along the given ordering:
// the candidates at positions k and k+n are exchanged, 1 <= k < k+n <= N.

#include <trial_order/model.hpp>
#include <trial_order/schedule.hpp>

#include <cmath>
#include <string>

namespace trial_order {

enum class ExcessMethod {
    direct_difference,
    adjacent_closed_form,
    decomposition,
    equal_p_corrected,
    equal_p_printed,
};

inline const char* to_string(ExcessMethod m) {
    switch (m) {
    case ExcessMethod::direct_difference: return "direct-difference";
    case ExcessMethod::adjacent_closed_form: return "adjacent-closed-form";
    case ExcessMethod::decomposition: return "q1+q2+q3";
    case ExcessMethod::equal_p_corrected: return "equal-p-corrected";
    case ExcessMethod::equal_p_printed: return "equal-p-printed";
    }
    return "unknown";
}

struct ExcessReport {
    std::size_t k = 1;
    std::size_t n = 1;
    double q1 = 0.0;
    double q2 = 0.0;
    double q3 = 0.0;
    double total = 0.0;
    ExcessMethod method = ExcessMethod::decomposition;
};

namespace detail {

inline void check_swap_site(std::size_t size, std::size_t k, std::size_t n) {
    if (k < 1 || n < 1 || k + n > size)
        throw range_error("swap positions k=" + std::to_string(k) + ", k+n=" +
                          std::to_string(k + n) + " outside 1.." + std::to_string(size) +
                          " (n >= 1 required)");
}

// Prefix sums of t and prefix products of (1 - p): index m holds T_m, Q_m.
struct Prefixes {
    std::vector<double> T;
    std::vector<double> Q;
};

inline Prefixes prefixes(const Arranged& a) {
    Prefixes pre{std::vector<double>(a.size() + 1, 0.0), std::vector<double>(a.size() + 1, 1.0)};
    for (std::size_t m = 0; m < a.size(); ++m) {
        pre.T[m + 1] = pre.T[m] + a.t[m];
        pre.Q[m + 1] = pre.Q[m] * (1.0 - a.p[m]);
    }
    return pre;
}

} // namespace detail

// Oracle: expected_time after the exchange minus expected_time before.
inline double exact_excess_direct(const CandidateSet& set, const Ordering& ord, std::size_t k,
                                  std::size_t n) {
    require_matching(set, ord);
    detail::check_swap_site(set.size(), k, n);
    const auto swapped = ord.swapped(k - 1, k + n - 1);
    return expected_time(set, swapped) - expected_time(set, ord);
}

// Neighbouring exchange:
//   (p_k/t_k - p_{k+1}/t_{k+1}) * Q_{k-1} * t_k * t_{k+1}
inline double adjacent_swap_excess(const CandidateSet& set, const Ordering& ord, std::size_t k) {
    const auto a = arrange(set, ord);
    detail::check_swap_site(a.size(), k, 1);
    const std::size_t i = k - 1;
    double q_before = 1.0;
    for (std::size_t r = 0; r < i; ++r) q_before *= 1.0 - a.p[r];
    const double ratio_gap = a.p[i] / a.t[i] - a.p[i + 1] / a.t[i + 1];
    return ratio_gap * q_before * a.t[i] * a.t[i + 1];
}

// Exact excess of exchanging positions k and k+n, split into
//   q1  change in the terms at position k,
//   q2  change in the weights of the positions strictly between,
//   q3  change in the term at position k+n.
// q2 and q3 divide by (1 - p_k); p_k == 1 throws singularity_error and the
// caller should fall back to exact_excess_direct.
inline ExcessReport general_swap_excess(const CandidateSet& set, const Ordering& ord,
                                        std::size_t k, std::size_t n) {
    const auto a = arrange(set, ord);
    detail::check_swap_site(a.size(), k, n);
    const std::size_t ik = k - 1;
    const std::size_t in = k + n - 1;
    const double pk = a.p[ik], pn = a.p[in];
    const double tk = a.t[ik], tn = a.t[in];
    if (pk == 1.0)
        throw singularity_error("p_k = 1 at position " + std::to_string(k) +
                                "; use exact_excess_direct");

    const auto pre = detail::prefixes(a);
    const double dp_over = (pk - pn) / (1.0 - pk);
    const double dt_over = (tn - tk) * (1.0 - pn) / (1.0 - pk);

    ExcessReport rep;
    rep.k = k;
    rep.n = n;
    rep.method = ExcessMethod::decomposition;
    rep.q1 = pre.T[k - 1] * pre.Q[k - 1] * (pn - pk) + pre.Q[k - 1] * (tn * pn - tk * pk);

    // l runs over positions k+1 .. k+n-1 (1-based); a.p[l-1] is p_l.
    for (std::size_t l = k + 1; l <= k + n - 1; ++l)
        rep.q2 += pre.Q[l - 1] * a.p[l - 1] * (pre.T[l] * dp_over + dt_over);

#ifdef TRIAL_ORDER_MUTATE_EXCESS
    // Deliberately wrong denominator; only compiled into the mutation-check build.
    rep.q3 = pre.T[k + n] * pre.Q[k + n - 1] * (pk - pn) / (1.0 - pn);
#else
    rep.q3 = pre.T[k + n] * pre.Q[k + n - 1] * dp_over;
#endif
    rep.total = rep.q1 + rep.q2 + rep.q3;
    return rep;
}

enum class EqualPVariant {
    corrected, // (t_{k+n} - t_k)(1-p)^{k-1}(1 - (1-p)^n)
    printed,   // (t_{k+n} - t_k)(1-p)^{k-1}(1 + (1-p) - (1-p)^n), kept for comparison
};

// Closed form when every candidate has the same p in (0,1).
//
// The printed variant overstates the excess by exactly
// (t_{k+n} - t_k)(1-p)^k: its derivation drops the factor p from the
// position-k term. Use it only to reproduce that expression.
inline double equal_p_swap_excess(const CandidateSet& set, const Ordering& ord, std::size_t k,
                                  std::size_t n, EqualPVariant variant = EqualPVariant::corrected) {
    const auto a = arrange(set, ord);
    detail::check_swap_site(a.size(), k, n);
    const double p = a.p.front();
    for (double pi : a.p)
        if (pi != p) throw assumption_error("equal-p closed form needs identical probabilities");
    if (!(p > 0.0 && p < 1.0)) throw assumption_error("equal-p closed form needs p in (0,1)");

    const double miss = 1.0 - p;
    const double dt = a.t[k + n - 1] - a.t[k - 1];
    const double lead = dt * std::pow(miss, static_cast<double>(k - 1));
    const double miss_n = std::pow(miss, static_cast<double>(n));
    if (variant == EqualPVariant::printed) return lead * (1.0 + miss - miss_n);
    return lead * (1.0 - miss_n);
}

} // namespace trial_order
