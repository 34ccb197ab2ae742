#pragma once

// Domain types shared by every formula: candidates, candidate sets,
// orderings, and the running prefix quantities S, T, P, Q.

#include <trial_order/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace trial_order {

// Unvalidated candidate as it arrives from a file or a caller.
struct CandidateSpec {
    std::string id;
    double p = 0.0;
    std::vector<double> times;
};

enum class ViolationKind {
    probability_out_of_range,
    non_positive_time,
    empty_times,
    duplicate_id,
    empty_set,
};

struct Violation {
    ViolationKind kind;
    std::size_t index = 0;      // row in the input, 0-based
    std::string id;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool clean() const { return violations.empty(); }

    std::string summary() const {
        std::string out;
        for (const auto& v : violations) {
            if (!out.empty()) out += "; ";
            out += v.message;
        }
        return out;
    }
};

inline const char* to_string(ViolationKind kind) {
    switch (kind) {
    case ViolationKind::probability_out_of_range: return "probability out of [0,1]";
    case ViolationKind::non_positive_time: return "non-positive time";
    case ViolationKind::empty_times: return "no time samples";
    case ViolationKind::duplicate_id: return "duplicate id";
    case ViolationKind::empty_set: return "empty set";
    }
    return "unknown";
}

// Reports every invariant the specs would violate, in input order.
inline ValidationReport validate(std::span<const CandidateSpec> specs) {
    ValidationReport report;
    auto add = [&](ViolationKind kind, std::size_t index, const std::string& id,
                   const std::string& detail) {
        std::string msg = to_string(kind);
        if (!detail.empty()) msg += " (" + detail + ")";
        report.violations.push_back({kind, index, id, std::move(msg)});
    };

    if (specs.empty()) {
        add(ViolationKind::empty_set, 0, {}, {});
        return report;
    }

    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto& s = specs[i];
        const std::string where = "candidate '" + s.id + "'";
        if (!(s.p >= 0.0 && s.p <= 1.0))
            add(ViolationKind::probability_out_of_range, i, s.id,
                where + ", field p=" + std::to_string(s.p));
        if (s.times.empty())
            add(ViolationKind::empty_times, i, s.id, where + ", field times");
        for (std::size_t j = 0; j < s.times.size(); ++j) {
            if (!(s.times[j] > 0.0) || !std::isfinite(s.times[j]))
                add(ViolationKind::non_positive_time, i, s.id,
                    where + ", field times[" + std::to_string(j) + "]=" +
                        std::to_string(s.times[j]));
        }
        if (!seen.insert(s.id).second)
            add(ViolationKind::duplicate_id, i, s.id, where);
    }
    return report;
}

// One solution candidate: success probability and observed execution times.
// Immutable; the mean time is fixed at construction.
class Candidate {
public:
    Candidate(std::string id, double p, std::vector<double> times)
        : id_(std::move(id)), p_(p), times_(std::move(times)) {
        const CandidateSpec spec{id_, p_, times_};
        auto report = validate(std::span<const CandidateSpec>(&spec, 1));
        if (!report.clean()) throw invalid_input(report.summary());
        mean_time_ = std::accumulate(times_.begin(), times_.end(), 0.0) /
                     static_cast<double>(times_.size());
    }

    const std::string& id() const { return id_; }
    double p() const { return p_; }
    std::span<const double> time_samples() const { return times_; }
    double mean_time() const { return mean_time_; }

private:
    std::string id_;
    double p_;
    std::vector<double> times_;
    double mean_time_ = 0.0;
};

// Arithmetic mean of the candidate's time samples.
inline double mean_time(const Candidate& c) { return c.mean_time(); }

// Success probability per unit of expected time; the sort key of the optimal order.
inline double ratio(const Candidate& c) { return c.p() / c.mean_time(); }

// Non-empty set of candidates with unique ids. Input order is the identity
// ordering and the tie-break key everywhere.
class CandidateSet {
public:
    explicit CandidateSet(std::vector<Candidate> candidates) : candidates_(std::move(candidates)) {
        if (candidates_.empty()) throw invalid_input("empty set");
        std::unordered_set<std::string> seen;
        for (const auto& c : candidates_)
            if (!seen.insert(c.id()).second) throw invalid_input("duplicate id '" + c.id() + "'");
    }

    static CandidateSet from_specs(std::span<const CandidateSpec> specs) {
        auto report = validate(specs);
        if (!report.clean()) throw invalid_input(report.summary());
        std::vector<Candidate> out;
        out.reserve(specs.size());
        for (const auto& s : specs) out.emplace_back(s.id, s.p, s.times);
        return CandidateSet(std::move(out));
    }

    // Convenience for single-sample candidates named c1..cN.
    static CandidateSet from_values(std::span<const double> ps, std::span<const double> ts) {
        if (ps.size() != ts.size()) throw invalid_input("probability and time counts differ");
        std::vector<CandidateSpec> specs;
        for (std::size_t i = 0; i < ps.size(); ++i)
            specs.push_back({"c" + std::to_string(i + 1), ps[i], {ts[i]}});
        return from_specs(specs);
    }

    std::size_t size() const { return candidates_.size(); }
    const Candidate& operator[](std::size_t i) const { return candidates_[i]; }
    auto begin() const { return candidates_.begin(); }
    auto end() const { return candidates_.end(); }

    // Index of the candidate with the given id, or size() when absent.
    std::size_t find(const std::string& id) const {
        for (std::size_t i = 0; i < candidates_.size(); ++i)
            if (candidates_[i].id() == id) return i;
        return candidates_.size();
    }

private:
    std::vector<Candidate> candidates_;
};

// A trial sequence: perm[r] is the candidate index tried at rank r (0-based).
class Ordering {
public:
    explicit Ordering(std::vector<std::size_t> perm) : perm_(std::move(perm)) {
        std::vector<bool> hit(perm_.size(), false);
        for (auto i : perm_) {
            if (i >= perm_.size() || hit[i])
                throw structural_error("ordering is not a permutation of 0.." +
                                       std::to_string(perm_.size() == 0 ? 0 : perm_.size() - 1));
            hit[i] = true;
        }
    }

    static Ordering identity(std::size_t n) {
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        return Ordering(std::move(perm));
    }

    std::size_t size() const { return perm_.size(); }
    std::size_t operator[](std::size_t rank) const { return perm_[rank]; }
    std::span<const std::size_t> perm() const { return perm_; }

    // Copy with the candidates at ranks a and b (0-based) exchanged.
    Ordering swapped(std::size_t a, std::size_t b) const {
        if (a >= perm_.size() || b >= perm_.size()) throw range_error("swap rank out of range");
        auto perm = perm_;
        std::swap(perm[a], perm[b]);
        return Ordering(std::move(perm));
    }

    friend bool operator==(const Ordering&, const Ordering&) = default;

private:
    std::vector<std::size_t> perm_;
};

inline void require_matching(const CandidateSet& set, const Ordering& ord) {
    if (ord.size() != set.size())
        throw structural_error("ordering has " + std::to_string(ord.size()) +
                               " entries for " + std::to_string(set.size()) + " candidates");
}

// Probabilities and mean times laid out along an ordering.
struct Arranged {
    std::vector<double> p;
    std::vector<double> t;

    std::size_t size() const { return p.size(); }
};

inline Arranged arrange(const CandidateSet& set, const Ordering& ord) {
    require_matching(set, ord);
    Arranged a;
    a.p.reserve(set.size());
    a.t.reserve(set.size());
    for (auto i : ord.perm()) {
        a.p.push_back(set[i].p());
        a.t.push_back(set[i].mean_time());
    }
    return a;
}

// Running quantities over the first m candidates of an ordering.
struct PrefixAggregates {
    double S = 0.0; // sum of p
    double T = 0.0; // sum of mean times
    double P = 1.0; // product of p
    double Q = 1.0; // product of (1 - p)
};

inline PrefixAggregates prefix_aggregates(const CandidateSet& set, const Ordering& ord,
                                          std::size_t m) {
    require_matching(set, ord);
    if (m > set.size())
        throw range_error("prefix length " + std::to_string(m) + " exceeds " +
                          std::to_string(set.size()));
    PrefixAggregates agg;
    for (std::size_t r = 0; r < m; ++r) {
        const auto& c = set[ord[r]];
        agg.S += c.p();
        agg.T += c.mean_time();
        agg.P *= c.p();
        agg.Q *= 1.0 - c.p();
    }
    return agg;
}

// Same as PrefixAggregates with P and Q kept as natural logarithms, for long
// prefixes where the linear products underflow. A zero factor gives -inf.
struct LogPrefixAggregates {
    double S = 0.0;
    double T = 0.0;
    double log_P = 0.0;
    double log_Q = 0.0;
};

inline LogPrefixAggregates prefix_aggregates_log(const CandidateSet& set, const Ordering& ord,
                                                 std::size_t m) {
    require_matching(set, ord);
    if (m > set.size()) throw range_error("prefix length exceeds candidate count");
    LogPrefixAggregates agg;
    for (std::size_t r = 0; r < m; ++r) {
        const auto& c = set[ord[r]];
        agg.S += c.p();
        agg.T += c.mean_time();
        agg.log_P += std::log(c.p());
        agg.log_Q += std::log1p(-c.p());
    }
    return agg;
}

} // namespace trial_order
