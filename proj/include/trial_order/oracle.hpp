#pragma once

// Independent ground truth: exhaustive search over orderings, seeded Monte
// Carlo simulation of the trial process, and a randomized cross-check of
// every closed form against the direct difference of expected times.
//
// All routines are deterministic for a fixed seed regardless of the worker
// count: work is split into fixed units whose results are reduced in unit
// order.

#include <trial_order/bounds.hpp>
#include <trial_order/excess.hpp>
#include <trial_order/model.hpp>
#include <trial_order/schedule.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <thread>
#include <vector>

namespace trial_order {

// SplitMix64 (Steele, Lea, Flood 2014). Used as a counter-based generator:
// every trial or instance gets its own stream seeded by stream_seed().
class SplitMix64 {
public:
    static constexpr const char* name = "splitmix64";

    explicit SplitMix64(std::uint64_t state) : state_(state) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [lo, hi]. Modulo bias is below 2^-50 for the ranges used here.
    std::size_t index(std::size_t lo, std::size_t hi) {
        return lo + static_cast<std::size_t>(next() % (hi - lo + 1));
    }

private:
    std::uint64_t state_;
};

inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 mix(seed ^ (stream * 0xd1b54a32d192ed03ULL));
    mix.next();
    return mix.next();
}

namespace detail {

inline unsigned resolve_workers(unsigned workers) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    return workers;
}

// Calls fn(u) for every unit u in [0, units), spread over workers by stride.
template <class Fn>
void for_each_unit(std::size_t units, unsigned workers, Fn&& fn) {
    workers = resolve_workers(workers);
    if (workers == 1 || units <= 1) {
        for (std::size_t u = 0; u < units; ++u) fn(u);
        return;
    }
    std::vector<std::jthread> pool;
    const std::size_t w = std::min<std::size_t>(workers, units);
    for (std::size_t id = 0; id < w; ++id)
        pool.emplace_back([&, id] {
            for (std::size_t u = id; u < units; u += w) fn(u);
        });
}

} // namespace detail

// --- brute force --------------------------------------------------------------

struct BruteForceResult {
    Ordering best_order;
    double best_expected_time = 0.0;
    std::uint64_t evaluated = 0;
};

inline constexpr std::size_t brute_force_limit = 10;

// Evaluates every ordering and returns the one with the least expected time
// (failure tail included). Exact ties go to the lexicographically smallest
// permutation.
inline BruteForceResult brute_force_best_order(const CandidateSet& set, unsigned workers = 1) {
    const std::size_t N = set.size();
    if (N > brute_force_limit)
        throw size_error("exhaustive search limited to " + std::to_string(brute_force_limit) +
                         " candidates, got " + std::to_string(N));

    struct Best {
        std::vector<std::size_t> perm;
        double value = std::numeric_limits<double>::infinity();
        std::uint64_t evaluated = 0;
    };
    std::vector<Best> per_head(N);

    // One unit per leading candidate; the rest is enumerated in lexicographic order.
    detail::for_each_unit(N, workers, [&](std::size_t head) {
        std::vector<std::size_t> perm;
        perm.push_back(head);
        for (std::size_t i = 0; i < N; ++i)
            if (i != head) perm.push_back(i);
        Arranged a;
        a.p.resize(N);
        a.t.resize(N);
        auto& best = per_head[head];
        do {
            for (std::size_t r = 0; r < N; ++r) {
                a.p[r] = set[perm[r]].p();
                a.t[r] = set[perm[r]].mean_time();
            }
            const double e = expected_time(a);
            ++best.evaluated;
            if (e < best.value) {
                best.value = e;
                best.perm = perm;
            }
        } while (std::next_permutation(perm.begin() + 1, perm.end()));
    });

    std::size_t winner = 0;
    std::uint64_t evaluated = 0;
    for (std::size_t h = 0; h < N; ++h) {
        evaluated += per_head[h].evaluated;
        if (per_head[h].value < per_head[winner].value) winner = h;
    }
    return {Ordering(per_head[winner].perm), per_head[winner].value, evaluated};
}

// --- Monte Carlo ----------------------------------------------------------------

struct SimulationResult {
    std::uint64_t trials = 0;
    double mean_time = 0.0;
    double std_error = 0.0;
    double success_rate = 0.0;
    double success_std_error = 0.0;
    std::uint64_t seed = 0;
    std::string generator = SplitMix64::name;
};

inline constexpr std::uint64_t simulation_block = 4096;

// Plays the trial process `trials` times along ord. Each attempt succeeds
// independently with the candidate's p and takes a time drawn uniformly from
// its samples; a trial stops at the first success or when every candidate
// has failed. Trial i uses the stream stream_seed(seed, i).
inline SimulationResult simulate(const CandidateSet& set, const Ordering& ord,
                                 std::uint64_t trials, std::uint64_t seed, unsigned workers = 1) {
    require_matching(set, ord);
    if (trials == 0) throw range_error("simulation needs at least one trial");

    struct Block {
        double mean = 0.0;
        double m2 = 0.0;
        std::uint64_t count = 0;
        std::uint64_t successes = 0;
    };
    const std::uint64_t blocks = (trials + simulation_block - 1) / simulation_block;
    std::vector<Block> out(blocks);

    detail::for_each_unit(blocks, workers, [&](std::size_t b) {
        Block blk;
        const std::uint64_t first = b * simulation_block;
        const std::uint64_t last = std::min(trials, first + simulation_block);
        for (std::uint64_t i = first; i < last; ++i) {
            SplitMix64 rng(stream_seed(seed, i));
            double elapsed = 0.0;
            bool won = false;
            for (auto idx : ord.perm()) {
                const auto& c = set[idx];
                const auto samples = c.time_samples();
                const bool hit = rng.uniform() < c.p();
                elapsed += samples[rng.index(0, samples.size() - 1)];
                if (hit) {
                    won = true;
                    break;
                }
            }
            ++blk.count;
            if (won) ++blk.successes;
            const double delta = elapsed - blk.mean;
            blk.mean += delta / static_cast<double>(blk.count);
            blk.m2 += delta * (elapsed - blk.mean);
        }
        out[b] = blk;
    });

    // Chan et al. pairwise merge, in block order.
    Block total;
    for (const auto& blk : out) {
        if (blk.count == 0) continue;
        const double n_a = static_cast<double>(total.count);
        const double n_b = static_cast<double>(blk.count);
        const double delta = blk.mean - total.mean;
        const double n = n_a + n_b;
        total.mean += delta * n_b / n;
        total.m2 += blk.m2 + delta * delta * n_a * n_b / n;
        total.count += blk.count;
        total.successes += blk.successes;
    }

    SimulationResult r;
    r.trials = trials;
    r.seed = seed;
    r.mean_time = total.mean;
    const double n = static_cast<double>(trials);
    r.std_error = trials > 1 ? std::sqrt(total.m2 / (n - 1.0) / n) : 0.0;
    r.success_rate = static_cast<double>(total.successes) / n;
    r.success_std_error = std::sqrt(r.success_rate * (1.0 - r.success_rate) / n);
    return r;
}

// --- randomized verification ------------------------------------------------------

struct VerifyConfig {
    std::size_t n_min = 2;
    std::size_t n_max = 8;
    double p_lo = 0.05;
    double p_hi = 0.95;
    double t_lo = 0.1;
    double t_hi = 10.0;
    std::size_t max_samples = 3;
    std::uint64_t instances = 0;
    std::uint64_t seed = 0;
    bool equal_p_only = false;
    std::size_t optimality_max_n = 8;
    double identity_tolerance = 1e-10;  // on max(1,|x|)-relative residuals
    double sandwich_slack = 1e-9;       // absolute
    double optimality_tolerance = 1e-9; // relative
    unsigned workers = 1;
};

struct CheckTally {
    std::string name;
    std::uint64_t checked = 0;
    std::uint64_t failed = 0;
    double max_residual = 0.0;
    // Expected to fail; reported for exposure but not part of the verdict.
    bool informational = false;
};

struct VerificationReport {
    std::uint64_t instances = 0;
    std::uint64_t seed = 0;
    std::vector<CheckTally> checks;

    bool passed() const {
        for (const auto& c : checks)
            if (!c.informational && c.failed > 0) return false;
        return true;
    }

    const CheckTally* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
};

// |a - b| / max(1, |b|)
inline double scaled_residual(double a, double b) {
    return std::abs(a - b) / std::max(1.0, std::abs(b));
}

namespace detail {

enum Check : std::size_t {
    chk_decomposition,
    chk_adjacent,
    chk_reduction,
    chk_general_upper,
    chk_general_lower,
    chk_equal_t_upper,
    chk_equal_t_lower,
    chk_equal_p_corrected,
    chk_equal_p_printed,
    chk_equal_p_printed_offset,
    chk_optimality,
    chk_count,
};

inline const char* check_name(std::size_t c) {
    static constexpr const char* names[chk_count] = {
        "decomposition-vs-direct", "adjacent-vs-direct",   "decomposition-n1-vs-adjacent",
        "sandwich-general-upper",  "sandwich-general-lower", "sandwich-equal-t-upper",
        "sandwich-equal-t-lower",  "equal-p-corrected",    "equal-p-printed",
        "equal-p-printed-offset",  "optimality"};
    return names[c];
}

struct Outcome {
    bool checked = false;
    bool failed = false;
    double residual = 0.0;
};

using InstanceOutcome = std::array<Outcome, chk_count>;

inline CandidateSet random_set(const VerifyConfig& cfg, SplitMix64& rng) {
    const std::size_t N = rng.index(cfg.n_min, cfg.n_max);
    std::vector<CandidateSpec> specs(N);
    const double shared_p = rng.uniform(cfg.p_lo, cfg.p_hi);
    for (std::size_t i = 0; i < N; ++i) {
        specs[i].id = "c" + std::to_string(i + 1);
        specs[i].p = cfg.equal_p_only ? shared_p : rng.uniform(cfg.p_lo, cfg.p_hi);
        const std::size_t samples = rng.index(1, std::max<std::size_t>(1, cfg.max_samples));
        for (std::size_t j = 0; j < samples; ++j) specs[i].times.push_back(rng.uniform(cfg.t_lo, cfg.t_hi));
    }
    return CandidateSet::from_specs(specs);
}

inline CandidateSet with_values(const CandidateSet& set, const std::vector<double>& ps,
                                const std::vector<double>& ts) {
    std::vector<CandidateSpec> specs;
    for (std::size_t i = 0; i < set.size(); ++i) specs.push_back({set[i].id(), ps[i], {ts[i]}});
    return CandidateSet::from_specs(specs);
}

// Loosened premise bounds around the observed extremes; half the time tight.
inline BoundAssumptions random_assumptions(const CandidateSet& set, SplitMix64& rng) {
    double p_min = 1.0, p_max = 0.0, t_min = std::numeric_limits<double>::infinity(), t_max = 0.0;
    for (const auto& c : set) {
        p_min = std::min(p_min, c.p());
        p_max = std::max(p_max, c.p());
        t_min = std::min(t_min, c.mean_time());
        t_max = std::max(t_max, c.mean_time());
    }
    const bool tight = rng.uniform() < 0.5;
    const double u1 = tight ? 0.0 : rng.uniform(), u2 = tight ? 0.0 : rng.uniform();
    const double u3 = tight ? 0.0 : rng.uniform(), u4 = tight ? 0.0 : rng.uniform();
    BoundAssumptions a;
    a.c = p_min * (1.0 - 0.5 * u1);
    a.d = p_max + (1.0 - p_max) * 0.5 * u2;
    a.t_min = t_min * (1.0 - 0.5 * u3);
    a.t_max = t_max * (1.0 + 0.5 * u4);
    return a;
}

inline void record_identity(Outcome& o, double value, double reference, double tol) {
    o.checked = true;
    o.residual = scaled_residual(value, reference);
    o.failed = !(o.residual <= tol);
}

inline void record_sandwich(Outcome& o, const BoundResult& b, double exact, double slack) {
    if (!b.assumptions_ok) return;
    o.checked = true;
    double excess = 0.0;
    if (b.upper) excess = std::max(excess, exact - *b.upper);
    if (b.lower) excess = std::max(excess, *b.lower - exact);
    if ((b.upper && !std::isfinite(*b.upper)) || (b.lower && !std::isfinite(*b.lower)))
        excess = std::numeric_limits<double>::infinity();
    o.residual = excess;
    o.failed = !(excess <= slack);
}

inline InstanceOutcome verify_instance(const VerifyConfig& cfg, std::uint64_t index) {
    InstanceOutcome out{};
    SplitMix64 rng(stream_seed(cfg.seed, index));
    const auto set = random_set(cfg, rng);
    const std::size_t N = set.size();
    const auto ord = solomonoff_order(set);
    const std::size_t k = rng.index(1, N - 1);
    const std::size_t n = rng.index(1, N - k);
    const double exact = exact_excess_direct(set, ord, k, n);
    const auto arr = arrange(set, ord);
    const double tol = cfg.identity_tolerance;

    if (arr.p[k - 1] < 1.0) {
        const auto rep = general_swap_excess(set, ord, k, n);
        record_identity(out[chk_decomposition], rep.total, exact, tol);
    }
    const std::size_t ka = rng.index(1, N - 1);
    const double adj = adjacent_swap_excess(set, ord, ka);
    record_identity(out[chk_adjacent], adj, exact_excess_direct(set, ord, ka, 1), tol);
    if (arr.p[ka - 1] < 1.0)
        record_identity(out[chk_reduction], general_swap_excess(set, ord, ka, 1).total, adj, tol);

    // Unrestricted times: upper bound on the main instance.
    {
        auto a = random_assumptions(set, rng);
        record_sandwich(out[chk_general_upper], swap_excess_upper_general(set, ord, k, n, a), exact,
                        cfg.sandwich_slack);
    }

    // Lower bound needs p_k >= p_{k+n} and t_k <= t_{k+n}; pick such a pair,
    // redrawing the instance when none exists.
    for (int attempt = 0; attempt < 1000; ++attempt) {
        const auto s = attempt == 0 ? set : random_set(cfg, rng);
        const auto o = solomonoff_order(s);
        const auto ar = arrange(s, o);
        std::vector<std::pair<std::size_t, std::size_t>> sites;
        for (std::size_t i = 1; i < s.size(); ++i)
            for (std::size_t j = 1; i + j <= s.size(); ++j)
                if (ar.p[i - 1] >= ar.p[i + j - 1] && ar.t[i - 1] <= ar.t[i + j - 1])
                    sites.emplace_back(i, j);
        if (sites.empty()) continue;
        const auto [kl, nl] = sites[rng.index(0, sites.size() - 1)];
        auto a = random_assumptions(s, rng);
        record_sandwich(out[chk_general_lower], swap_excess_lower_general(s, o, kl, nl, a),
                        exact_excess_direct(s, o, kl, nl), cfg.sandwich_slack);
        break;
    }

    // Equal times: same probabilities, one shared time.
    {
        const double T = rng.uniform(cfg.t_lo, cfg.t_hi);
        std::vector<double> ps, ts(N, T);
        for (const auto& c : set) ps.push_back(c.p());
        const auto s = with_values(set, ps, ts);
        const auto o = solomonoff_order(s);
        const double ex = exact_excess_direct(s, o, k, n);
        auto a = random_assumptions(s, rng);
        record_sandwich(out[chk_equal_t_upper], swap_excess_upper_equal_t(s, o, k, n, a), ex,
                        cfg.sandwich_slack);
        record_sandwich(out[chk_equal_t_lower], swap_excess_lower_equal_t(s, o, k, n, a), ex,
                        cfg.sandwich_slack);
    }

    // Equal probabilities: same times, the first candidate's p everywhere.
    {
        std::vector<double> ps(N, set[0].p()), ts;
        for (const auto& c : set) ts.push_back(c.mean_time());
        const auto s = with_values(set, ps, ts);
        const auto o = solomonoff_order(s);
        const double ex = exact_excess_direct(s, o, k, n);
        const double corrected = equal_p_swap_excess(s, o, k, n, EqualPVariant::corrected);
        const double printed = equal_p_swap_excess(s, o, k, n, EqualPVariant::printed);
        record_identity(out[chk_equal_p_corrected], corrected, ex, tol);
        record_identity(out[chk_equal_p_printed], printed, ex, tol);
        const auto ar = arrange(s, o);
        const double offset = (ar.t[k + n - 1] - ar.t[k - 1]) *
                              std::pow(1.0 - ps[0], static_cast<double>(k));
        record_identity(out[chk_equal_p_printed_offset], printed - ex, offset, tol);
    }

    if (N <= cfg.optimality_max_n && N <= brute_force_limit) {
        const auto bf = brute_force_best_order(set);
        auto& o = out[chk_optimality];
        o.checked = true;
        const double rule = expected_time(set, ord);
        o.residual = (rule - bf.best_expected_time) / std::max(1.0, std::abs(bf.best_expected_time));
        o.failed = !(o.residual <= cfg.optimality_tolerance);
        o.residual = std::abs(o.residual);
    }
    return out;
}

} // namespace detail

// Draws cfg.instances random instances and cross-checks every closed form on
// each: the decomposition and the adjacent closed form against the direct
// difference, the four excess bounds against the exact excess (each on a
// premise-satisfying variant of the instance), the equal-p closed form, and
// optimality of the ratio order against exhaustive search.
inline VerificationReport verify_bounds_random(const VerifyConfig& cfg) {
    VerificationReport report;
    report.instances = cfg.instances;
    report.seed = cfg.seed;
    for (std::size_t c = 0; c < detail::chk_count; ++c) {
        CheckTally t;
        t.name = detail::check_name(c);
        t.informational = c == detail::chk_equal_p_printed;
        report.checks.push_back(t);
    }
    if (cfg.instances == 0) return report;
    if (cfg.n_min < 2 || cfg.n_min > cfg.n_max) throw range_error("need 2 <= n_min <= n_max");
    if (!(cfg.p_lo >= 0.0 && cfg.p_lo <= cfg.p_hi && cfg.p_hi < 1.0))
        throw range_error("need 0 <= p_lo <= p_hi < 1");
    if (!(cfg.t_lo > 0.0 && cfg.t_lo <= cfg.t_hi)) throw range_error("need 0 < t_lo <= t_hi");

    std::vector<detail::InstanceOutcome> outcomes(cfg.instances);
    detail::for_each_unit(cfg.instances, cfg.workers,
                          [&](std::size_t i) { outcomes[i] = detail::verify_instance(cfg, i); });

    for (const auto& inst : outcomes)
        for (std::size_t c = 0; c < detail::chk_count; ++c) {
            const auto& o = inst[c];
            if (!o.checked) continue;
            auto& t = report.checks[c];
            ++t.checked;
            if (o.failed) ++t.failed;
            t.max_residual = std::max(t.max_residual, o.residual);
        }
    return report;
}

} // namespace trial_order
