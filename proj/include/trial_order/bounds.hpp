#pragma once

// Closed-form bounds on the exchange excess and the product inequalities
// they are built from.

#include <trial_order/excess.hpp>
#include <trial_order/model.hpp>

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace trial_order {

// --- product inequalities ---------------------------------------------------

namespace detail {

inline void check_unit_interval(std::span<const double> xs) {
    for (double x : xs)
        if (!(x >= 0.0 && x <= 1.0))
            throw domain_error("value " + std::to_string(x) + " outside [0,1]");
}

} // namespace detail

// exp(-sum xs), an upper bound on prod(1 - x_i) for x_i in [0,1]. Equality
// holds when the sum is 0, so the bound is used in its non-strict form.
inline double product_upper_bound_kn(std::span<const double> xs) {
    detail::check_unit_interval(xs);
    double sum = 0.0;
    for (double x : xs) sum += x;
    return std::exp(-sum);
}

// 1 - sum xs + (n-1) * (prod xs)^(n / (2n-2)), a lower bound on prod(1 - x_i)
// for n >= 2 values in [0,1]. Exact for n == 2.
inline double product_lower_bound_wu(std::span<const double> xs) {
    if (xs.size() < 2) throw domain_error("lower product bound needs at least two values");
    detail::check_unit_interval(xs);
    const double n = static_cast<double>(xs.size());
    double sum = 0.0, prod = 1.0;
    for (double x : xs) {
        sum += x;
        prod *= x;
    }
    return 1.0 - sum + (n - 1.0) * std::pow(prod, n / (2.0 * n - 2.0));
}

// sum_{l=1..n} l r^l in closed form, r != 1.
inline double weighted_geometric_sum(double r, std::size_t n) {
    if (r == 1.0) throw domain_error("weighted geometric sum is undefined in closed form at r = 1");
    const double nn = static_cast<double>(n);
    const double rn = std::pow(r, nn);
    return r / ((1.0 - r) * (1.0 - r)) * (nn * rn * r - (nn + 1.0) * rn + 1.0);
}

// --- excess bounds ------------------------------------------------------------

enum class BoundProfile {
    general_upper,
    general_lower,
    equal_t_upper,
    equal_t_lower,
    adjacent,
};

inline const char* to_string(BoundProfile p) {
    switch (p) {
    case BoundProfile::general_upper: return "general-upper";
    case BoundProfile::general_lower: return "general-lower";
    case BoundProfile::equal_t_upper: return "equal-t-upper";
    case BoundProfile::equal_t_lower: return "equal-t-lower";
    case BoundProfile::adjacent: return "adjacent";
    }
    return "unknown";
}

inline std::optional<BoundProfile> parse_profile(std::string_view s) {
    for (auto p : {BoundProfile::general_upper, BoundProfile::general_lower,
                   BoundProfile::equal_t_upper, BoundProfile::equal_t_lower,
                   BoundProfile::adjacent})
        if (s == to_string(p)) return p;
    return std::nullopt;
}

// Premises shared by the bound theorems: c <= p_i <= d with c, d in (0,1) and
// t_min <= mean time <= t_max.
struct BoundAssumptions {
    double c = 0.0;
    double d = 0.0;
    double t_min = 0.0;
    double t_max = 0.0;
    BoundProfile profile = BoundProfile::general_upper;
};

struct AssumptionViolation {
    std::string candidate; // empty for violations not tied to one candidate
    std::string message;
};

struct BoundResult {
    std::optional<double> lower;
    std::optional<double> upper;
    std::optional<double> A;
    std::optional<double> B;
    bool assumptions_ok = true;
    std::vector<AssumptionViolation> violations;
};

namespace detail {

inline bool times_equal(const CandidateSet& set) {
    const double t0 = set[0].mean_time();
    for (const auto& c : set)
        if (std::abs(c.mean_time() - t0) > 1e-12 * std::max(std::abs(t0), std::abs(c.mean_time())))
            return false;
    return true;
}

inline bool is_equal_t(BoundProfile p) {
    return p == BoundProfile::equal_t_upper || p == BoundProfile::equal_t_lower;
}

} // namespace detail

// Set-level premises of the selected profile. Positional premises (which
// depend on k and n) are added by check_swap_premises.
inline std::vector<AssumptionViolation> check_assumptions(const CandidateSet& set,
                                                          const BoundAssumptions& a) {
    std::vector<AssumptionViolation> out;
    if (a.profile == BoundProfile::adjacent) return out;

    if (!(a.c > 0.0 && a.c < 1.0)) out.push_back({{}, "c must lie in (0,1)"});
    if (!(a.d > 0.0 && a.d < 1.0)) out.push_back({{}, "d must lie in (0,1)"});
    if (!(a.c <= a.d)) out.push_back({{}, "c must not exceed d"});

    for (const auto& cand : set) {
        if (cand.p() < a.c)
            out.push_back({cand.id(), "p=" + std::to_string(cand.p()) + " below c"});
        if (cand.p() > a.d)
            out.push_back({cand.id(), "p=" + std::to_string(cand.p()) + " above d"});
    }

    switch (a.profile) {
    case BoundProfile::general_upper:
        if (!(a.t_max > 0.0)) out.push_back({{}, "t_max must be positive"});
        for (const auto& cand : set)
            if (cand.mean_time() > a.t_max)
                out.push_back({cand.id(), "mean time above t_max"});
        break;
    case BoundProfile::general_lower:
        if (!(a.t_min >= 0.0)) out.push_back({{}, "t_min must be non-negative"});
        if (!(a.t_min <= a.t_max)) out.push_back({{}, "t_min must not exceed t_max"});
        for (const auto& cand : set) {
            if (cand.mean_time() > a.t_max)
                out.push_back({cand.id(), "mean time above t_max"});
            if (cand.mean_time() < a.t_min)
                out.push_back({cand.id(), "mean time below t_min"});
        }
        break;
    case BoundProfile::equal_t_upper:
    case BoundProfile::equal_t_lower:
        if (!detail::times_equal(set)) out.push_back({{}, "mean times are not all equal"});
        break;
    case BoundProfile::adjacent: break;
    }
    return out;
}

// check_assumptions plus the premises tied to the exchanged positions.
inline std::vector<AssumptionViolation> check_swap_premises(const CandidateSet& set,
                                                            const Ordering& ord, std::size_t k,
                                                            std::size_t n,
                                                            const BoundAssumptions& a) {
    auto out = check_assumptions(set, a);
    const auto arr = arrange(set, ord);
    detail::check_swap_site(arr.size(), k, n);
    const auto& ck = set[ord[k - 1]];
    const auto& cn = set[ord[k + n - 1]];
    if (a.profile == BoundProfile::adjacent) {
        if (ratio(ck) < ratio(cn))
            out.push_back({ck.id(), "ratio at position k below ratio at position k+1"});
        return out;
    }
    if (a.profile == BoundProfile::general_lower || detail::is_equal_t(a.profile)) {
        if (ck.p() < cn.p()) out.push_back({ck.id(), "p_k below p_{k+n}"});
    }
    if (a.profile == BoundProfile::general_lower && ck.mean_time() > cn.mean_time())
        out.push_back({ck.id(), "t_k above t_{k+n}"});
    return out;
}

namespace detail {

inline BoundResult start_result(const CandidateSet& set, const Ordering& ord, std::size_t k,
                                std::size_t n, BoundAssumptions a, BoundProfile profile) {
    a.profile = profile;
    BoundResult r;
    r.violations = check_swap_premises(set, ord, k, n, a);
    r.assumptions_ok = r.violations.empty();
    return r;
}

inline std::optional<double> finite_or_flag(double v, BoundResult& r) {
    if (std::isfinite(v)) return v;
    r.assumptions_ok = false;
    r.violations.push_back({{}, "bound is not finite (p_k = 1?)"});
    return std::nullopt;
}

} // namespace detail

// Bounds for exchanging neighbours k and k+1. The upper bound replaces
// Q_{k-1} by exp(-S_{k-1}); the lower bound replaces it by the product lower
// bound over the k-1 prefix values, which needs k-1 >= 2. For k = 1, 2 the
// exact prefix product is used, so both bounds equal the excess at k = 1.
inline BoundResult adjacent_excess_bounds(const CandidateSet& set, const Ordering& ord,
                                          std::size_t k) {
    auto r = detail::start_result(set, ord, k, 1, {}, BoundProfile::adjacent);
    const auto a = arrange(set, ord);
    const std::size_t i = k - 1;
    const double scale = (a.p[i] / a.t[i] - a.p[i + 1] / a.t[i + 1]) * a.t[i] * a.t[i + 1];

    std::vector<double> prefix(a.p.begin(), a.p.begin() + static_cast<std::ptrdiff_t>(i));
    r.upper = scale * product_upper_bound_kn(prefix);
    if (prefix.size() >= 2) {
        r.lower = scale * product_lower_bound_wu(prefix);
    } else {
        double q = 1.0;
        for (double p : prefix) q *= 1.0 - p;
        r.lower = scale * q;
    }
    return r;
}

// Upper bound under c <= p_i <= d and t_i <= t_max:
//   t_max (1-p_{k+n})/(1-p_k) (d/c) (1-c)^k (A - B (1-c)^{n-1})
//   A = 1 + 1/c + k + (1-p_k)/(1-p_{k+n}) ck/(1-c)
//   B = (1 - c/d)(k+n) + 1/c
inline BoundResult swap_excess_upper_general(const CandidateSet& set, const Ordering& ord,
                                             std::size_t k, std::size_t n,
                                             const BoundAssumptions& as) {
    auto r = detail::start_result(set, ord, k, n, as, BoundProfile::general_upper);
    const auto a = arrange(set, ord);
    const double pk = a.p[k - 1], pn = a.p[k + n - 1];
    const double c = as.c, d = as.d;
    const double kk = static_cast<double>(k), nn = static_cast<double>(n);

    const double A = 1.0 + 1.0 / c + kk + (1.0 - pk) / (1.0 - pn) * c * kk / (1.0 - c);
    const double B = (1.0 - c / d) * (kk + nn) + 1.0 / c;
    r.A = A;
    r.B = B;
    r.upper = detail::finite_or_flag(as.t_max * (1.0 - pn) / (1.0 - pk) * (d / c) *
                                         std::pow(1.0 - c, kk) *
                                         (A - B * std::pow(1.0 - c, nn - 1.0)),
                                     r);
    return r;
}

enum class LowerBoundVariant {
    // Uses the ratio t_max / t_min in the position-k term; holds on every
    // premise-satisfying instance.
    corrected,
    // The expression with t_min / t_max in that term. It is not a valid lower
    // bound in general; kept to reproduce the published expression.
    printed,
};

// Lower bound under c <= p_i <= d, t_min <= t_i <= t_max, p_k >= p_{k+n} and
// t_k <= t_{k+n}:
//   t_min (p_k-p_{k+n})/(1-p_k) (c/d) (1-d)^k (A - B (1-d)^{n-1})
//   A = 1/d + k + (1-p_k)/(p_k-p_{k+n}) dk (1/(1-d) - (d t_max/(c t_min)) e^{-S_{k-1}}/(1-d)^k)
//   B = (1 - d/c)(k+n) + (1-d)/d
// A diverges at p_k == p_{k+n}; the (p_k - p_{k+n}) prefactor is distributed
// over A first, so the evaluated sum is
//   pre*(p_k-p_{k+n})*(1/d + k - B(1-d)^{n-1}) + k t_min c (1-d)^{k-1} - k d t_max e^{-S_{k-1}}
// with pre = t_min/(1-p_k) (c/d) (1-d)^k.
inline BoundResult swap_excess_lower_general(const CandidateSet& set, const Ordering& ord,
                                             std::size_t k, std::size_t n,
                                             const BoundAssumptions& as,
                                             LowerBoundVariant variant = LowerBoundVariant::corrected) {
    auto r = detail::start_result(set, ord, k, n, as, BoundProfile::general_lower);
    const auto a = arrange(set, ord);
    const double pk = a.p[k - 1], pn = a.p[k + n - 1];
    const double c = as.c, d = as.d, t = as.t_min, T = as.t_max;
    const double kk = static_cast<double>(k), nn = static_cast<double>(n);
    double S = 0.0;
    for (std::size_t i = 0; i + 1 < k; ++i) S += a.p[i];
    const double decay = std::exp(-S);

    const double B = (1.0 - d / c) * (kk + nn) + (1.0 - d) / d;
    r.B = B;
    const double dp = pk - pn;
    const double pre = t / (1.0 - pk) * (c / d) * std::pow(1.0 - d, kk);

    const double head = kk * t * c * std::pow(1.0 - d, kk - 1.0);
    // k d t_max e^{-S} for the corrected form; k d t_min^2/t_max e^{-S} for the printed one.
    const double miss = variant == LowerBoundVariant::corrected ? kk * d * T * decay
                                                                : kk * d * t * t / T * decay;
    if (dp != 0.0 && t > 0.0) {
        const double ratio_term = variant == LowerBoundVariant::corrected ? d * T / (c * t)
                                                                          : d * t / (c * T);
        r.A = 1.0 / d + kk +
              (1.0 - pk) / dp * d * kk *
                  (1.0 / (1.0 - d) - ratio_term * decay / std::pow(1.0 - d, kk));
    }
    const double value = pre * dp * (1.0 / d + kk - B * std::pow(1.0 - d, nn - 1.0)) + head - miss;
    r.lower = detail::finite_or_flag(value, r);
    return r;
}

namespace detail {

inline double common_time(const CandidateSet& set) {
    if (!times_equal(set))
        throw assumption_error("equal-time bound needs all mean times equal");
    return set[0].mean_time();
}

} // namespace detail

// Upper bound when every mean time equals T and c <= p_i <= d:
//   T d (p_k-p_{k+n})/(1-p_k) (1-c)^k/c^2 (A - B (1-c)^{n-1})
//   A = 1 + kc [1 - (1-p_k)/(1-c) (c/d) ((1-d)/(1-c))^{k-1}]
//   B = 1 - c + c(n+k)(1 - c/d)
inline BoundResult swap_excess_upper_equal_t(const CandidateSet& set, const Ordering& ord,
                                             std::size_t k, std::size_t n,
                                             const BoundAssumptions& as) {
    const double T = detail::common_time(set);
    auto r = detail::start_result(set, ord, k, n, as, BoundProfile::equal_t_upper);
    const auto a = arrange(set, ord);
    const double pk = a.p[k - 1], pn = a.p[k + n - 1];
    const double c = as.c, d = as.d;
    const double kk = static_cast<double>(k), nn = static_cast<double>(n);

    const double A = 1.0 + kk * c *
                               (1.0 - (1.0 - pk) / (1.0 - c) * (c / d) *
                                          std::pow((1.0 - d) / (1.0 - c), kk - 1.0));
    const double B = 1.0 - c + c * (nn + kk) * (1.0 - c / d);
    r.A = A;
    r.B = B;
    r.upper = detail::finite_or_flag(T * d * (pk - pn) / (1.0 - pk) * std::pow(1.0 - c, kk) /
                                         (c * c) * (A - B * std::pow(1.0 - c, nn - 1.0)),
                                     r);
    return r;
}

// Lower bound when every mean time equals T and c <= p_i <= d:
//   T c (p_k-p_{k+n})/(1-p_k) (1-d)^k/d^2 (A - B (1-d)^{n-1})
//   A = 1 + kd [1 - (1-p_k)/(1-d) (d/c) e^{-S_{k-1}}/(1-d)^{k-1}]
//   B = 1 - d + d(n+k)(1 - d/c)
inline BoundResult swap_excess_lower_equal_t(const CandidateSet& set, const Ordering& ord,
                                             std::size_t k, std::size_t n,
                                             const BoundAssumptions& as) {
    const double T = detail::common_time(set);
    auto r = detail::start_result(set, ord, k, n, as, BoundProfile::equal_t_lower);
    const auto a = arrange(set, ord);
    const double pk = a.p[k - 1], pn = a.p[k + n - 1];
    const double c = as.c, d = as.d;
    const double kk = static_cast<double>(k), nn = static_cast<double>(n);
    double S = 0.0;
    for (std::size_t i = 0; i + 1 < k; ++i) S += a.p[i];

    const double A = 1.0 + kk * d *
                               (1.0 - (1.0 - pk) / (1.0 - d) * (d / c) * std::exp(-S) /
                                          std::pow(1.0 - d, kk - 1.0));
    const double B = 1.0 - d + d * (nn + kk) * (1.0 - d / c);
    r.A = A;
    r.B = B;
    r.lower = detail::finite_or_flag(T * c * (pk - pn) / (1.0 - pk) * std::pow(1.0 - d, kk) /
                                         (d * d) * (A - B * std::pow(1.0 - d, nn - 1.0)),
                                     r);
    return r;
}

} // namespace trial_order
