#pragma once

// Command dispatch for the trial-order tool. run() is the whole program minus
// process setup, so tests can drive it with argument vectors.
//
// Exit codes: 0 success, 1 invalid input or usage, 2 assumption violation in
// --strict mode, 3 internal cross-check failure.

#include <trial_order/io.hpp>
#include <trial_order/trial_order.hpp>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace trial_order::cli {

using io::json;

enum ExitCode : int {
    exit_ok = 0,
    exit_invalid_input = 1,
    exit_assumption = 2,
    exit_cross_check = 3,
};

// Cross-check tolerance between a closed form and the direct difference.
inline constexpr double cross_check_tolerance = 1e-9;
inline constexpr double sandwich_slack = 1e-9;

inline std::string sha256_hex(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw error("sha256 digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out = "sha256:";
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xf];
    }
    return out;
}

// "optimal" (ratio order), "input" (file order) or a comma-separated list of ids.
inline Ordering resolve_order(const CandidateSet& set, const std::string& spec) {
    if (spec == "optimal") return solomonoff_order(set);
    if (spec == "input") return Ordering::identity(set.size());
    std::vector<std::size_t> perm;
    std::stringstream ss(spec);
    std::string id;
    while (std::getline(ss, id, ',')) {
        const auto i = set.find(std::string(io::detail::trim(id)));
        if (i == set.size()) throw invalid_input("--order names unknown candidate '" + id + "'");
        perm.push_back(i);
    }
    if (perm.size() != set.size())
        throw structural_error("--order lists " + std::to_string(perm.size()) + " ids for " +
                               std::to_string(set.size()) + " candidates");
    return Ordering(std::move(perm));
}

inline json order_ids(const CandidateSet& set, const Ordering& ord) {
    json ids = json::array();
    for (auto i : ord.perm()) ids.push_back(set[i].id());
    return ids;
}

inline json optional_number(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

struct Outcome {
    io::Report report;
    int exit_code = exit_ok;
    std::vector<std::string> diagnostics;
};

// --- commands ----------------------------------------------------------------------

inline Outcome cmd_order(const CandidateSet& set) {
    Outcome o;
    const auto ord = solomonoff_order(set);
    json table = json::array();
    for (std::size_t r = 0; r < ord.size(); ++r) {
        const auto& c = set[ord[r]];
        table.push_back({{"rank", r + 1},
                         {"id", c.id()},
                         {"p", c.p()},
                         {"mean_time", c.mean_time()},
                         {"ratio", ratio(c)}});
    }
    o.report.results = {{"order", order_ids(set, ord)}, {"table", table}};
    return o;
}

struct ExpectArgs {
    std::string order = "optimal";
    bool no_tail = false;
};

inline Outcome cmd_expect(const CandidateSet& set, const ExpectArgs& a) {
    Outcome o;
    const auto ord = resolve_order(set, a.order);
    const ExpectationOptions opts{!a.no_tail};
    const auto all = prefix_aggregates(set, ord, set.size());
    o.report.results = {{"order", order_ids(set, ord)},
                        {"include_failure_tail", opts.include_failure_tail},
                        {"expected_time", expected_time(set, ord, opts)},
                        {"failure_tail", all.T * all.Q},
                        {"success_probability", 1.0 - all.Q},
                        {"ratio_sorted", is_ratio_sorted(set, ord)}};
    return o;
}

struct ExcessArgs {
    std::size_t k = 0;
    std::size_t n = 0;
    std::string order = "optimal";
};

inline Outcome cmd_excess(const CandidateSet& set, const ExcessArgs& a) {
    Outcome o;
    const auto ord = resolve_order(set, a.order);
    const double direct = exact_excess_direct(set, ord, a.k, a.n);
    json r = {{"k", a.k},
              {"n", a.n},
              {"order", order_ids(set, ord)},
              {"swapped", {set[ord[a.k - 1]].id(), set[ord[a.k + a.n - 1]].id()}},
              {"direct_oracle", direct},
              {"ratio_sorted", is_ratio_sorted(set, ord)}};

    double worst = 0.0;
    auto cross = [&](const std::string& name, double value) {
        const double res = scaled_residual(value, direct);
        worst = std::max(worst, res);
        if (res > cross_check_tolerance)
            o.diagnostics.push_back(name + " = " + io::detail::format_number(value) +
                                    " disagrees with direct difference " +
                                    io::detail::format_number(direct));
    };

    try {
        const auto rep = general_swap_excess(set, ord, a.k, a.n);
        r["q1"] = rep.q1;
        r["q2"] = rep.q2;
        r["q3"] = rep.q3;
        r["total"] = rep.total;
        r["method"] = to_string(rep.method);
        cross("q1+q2+q3", rep.total);
    } catch (const singularity_error&) {
        r["q1"] = r["q2"] = r["q3"] = nullptr;
        r["total"] = direct;
        r["method"] = to_string(ExcessMethod::direct_difference);
        o.diagnostics.push_back("p_k = 1: decomposition undefined, reporting the direct difference");
    }
    if (a.n == 1) {
        const double adj = adjacent_swap_excess(set, ord, a.k);
        r["adjacent_closed_form"] = adj;
        cross("adjacent closed form", adj);
    }
    try {
        const double corrected = equal_p_swap_excess(set, ord, a.k, a.n, EqualPVariant::corrected);
        r["equal_p"] = {{"corrected", corrected},
                        {"printed", equal_p_swap_excess(set, ord, a.k, a.n, EqualPVariant::printed)}};
        cross("equal-p closed form", corrected);
    } catch (const assumption_error&) {
        // not an equal-p instance
    }
    r["max_residual"] = worst;
    r["agree"] = worst <= cross_check_tolerance;
    if (worst > cross_check_tolerance) o.exit_code = exit_cross_check;
    o.report.results = std::move(r);
    return o;
}

struct BoundsArgs {
    std::size_t k = 0;
    std::size_t n = 0;
    double c = 0.0;
    double d = 0.0;
    std::optional<double> t_min;
    std::optional<double> t_max;
    std::string profile = "all";
    std::string order = "optimal";
    bool printed_variant = false;
};

inline Outcome cmd_bounds(const CandidateSet& set, const BoundsArgs& a, bool strict) {
    Outcome o;
    const auto ord = resolve_order(set, a.order);
    const double exact = exact_excess_direct(set, ord, a.k, a.n);

    double lo_t = set[0].mean_time(), hi_t = set[0].mean_time();
    for (const auto& c : set) {
        lo_t = std::min(lo_t, c.mean_time());
        hi_t = std::max(hi_t, c.mean_time());
    }
    BoundAssumptions as{a.c, a.d, a.t_min.value_or(lo_t), a.t_max.value_or(hi_t),
                        BoundProfile::general_upper};

    std::vector<BoundProfile> profiles;
    if (a.profile == "all") {
        profiles = {BoundProfile::general_upper, BoundProfile::general_lower,
                    BoundProfile::equal_t_upper, BoundProfile::equal_t_lower};
        if (a.n == 1) profiles.push_back(BoundProfile::adjacent);
    } else if (auto p = parse_profile(a.profile)) {
        if (*p == BoundProfile::adjacent && a.n != 1)
            throw invalid_input("profile adjacent needs --n 1");
        profiles = {*p};
    } else {
        throw invalid_input("unknown profile '" + a.profile + "'");
    }

    json table = json::array();
    bool any_violation = false, sandwich_broken = false;
    auto add_row = [&](const std::string& name, const BoundResult& b, bool verdict_counts) {
        std::string why;
        for (const auto& v : b.violations) {
            if (!why.empty()) why += "; ";
            why += v.candidate.empty() ? v.message : v.candidate + ": " + v.message;
        }
        bool ok = true;
        if (b.lower) ok = ok && *b.lower <= exact + sandwich_slack;
        if (b.upper) ok = ok && exact <= *b.upper + sandwich_slack;
        if (!b.assumptions_ok) any_violation = true;
        if (verdict_counts && b.assumptions_ok && !ok) {
            sandwich_broken = true;
            o.diagnostics.push_back(name + ": exact excess outside the bound");
        }
        table.push_back({{"profile", name},
                         {"lower", optional_number(b.lower)},
                         {"upper", optional_number(b.upper)},
                         {"A", optional_number(b.A)},
                         {"B", optional_number(b.B)},
                         {"assumptions_ok", b.assumptions_ok},
                         {"holds", ok},
                         {"violations", why}});
    };

    for (auto p : profiles) {
        as.profile = p;
        try {
            switch (p) {
            case BoundProfile::general_upper:
                add_row(to_string(p), swap_excess_upper_general(set, ord, a.k, a.n, as), true);
                break;
            case BoundProfile::general_lower:
                add_row(to_string(p), swap_excess_lower_general(set, ord, a.k, a.n, as), true);
                if (a.printed_variant)
                    add_row("general-lower-printed",
                            swap_excess_lower_general(set, ord, a.k, a.n, as,
                                                      LowerBoundVariant::printed),
                            false);
                break;
            case BoundProfile::equal_t_upper:
                add_row(to_string(p), swap_excess_upper_equal_t(set, ord, a.k, a.n, as), true);
                break;
            case BoundProfile::equal_t_lower:
                add_row(to_string(p), swap_excess_lower_equal_t(set, ord, a.k, a.n, as), true);
                break;
            case BoundProfile::adjacent:
                add_row(to_string(p), adjacent_excess_bounds(set, ord, a.k), true);
                break;
            }
        } catch (const assumption_error& e) {
            BoundResult b;
            b.assumptions_ok = false;
            b.violations.push_back({{}, e.what()});
            add_row(to_string(p), b, false);
        }
    }

    o.report.results = {{"k", a.k},
                        {"n", a.n},
                        {"order", order_ids(set, ord)},
                        {"exact_excess", exact},
                        {"c", as.c},
                        {"d", as.d},
                        {"t_min", as.t_min},
                        {"t_max", as.t_max},
                        {"table", table}};
    if (sandwich_broken)
        o.exit_code = exit_cross_check;
    else if (strict && any_violation)
        o.exit_code = exit_assumption;
    return o;
}

struct VerifyOptimalArgs {
    std::size_t max_n = 8;
    unsigned workers = 1;
};

inline Outcome cmd_verify_optimal(const CandidateSet& set, const VerifyOptimalArgs& a) {
    Outcome o;
    if (set.size() > a.max_n)
        throw size_error(std::to_string(set.size()) + " candidates exceed --max-n " +
                         std::to_string(a.max_n));
    const auto rule = solomonoff_order(set);
    const double rule_e = expected_time(set, rule);
    const auto bf = brute_force_best_order(set, a.workers);
    const double rel = (rule_e - bf.best_expected_time) / std::max(1.0, std::abs(bf.best_expected_time));
    const bool agree = rel <= cross_check_tolerance;
    o.report.results = {{"candidates", set.size()},
                        {"rule_order", order_ids(set, rule)},
                        {"rule_expected_time", rule_e},
                        {"brute_force_order", order_ids(set, bf.best_order)},
                        {"brute_force_expected_time", bf.best_expected_time},
                        {"evaluated", bf.evaluated},
                        {"relative_gap", rel},
                        {"agree", agree}};
    if (!agree) {
        o.exit_code = exit_cross_check;
        o.diagnostics.push_back("ratio order is not optimal on this instance");
    }
    return o;
}

struct SimulateArgs {
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::string order = "optimal";
    unsigned workers = 1;
};

inline Outcome cmd_simulate(const CandidateSet& set, const SimulateArgs& a) {
    Outcome o;
    const auto ord = resolve_order(set, a.order);
    const auto sim = simulate(set, ord, a.trials, a.seed, a.workers);
    const double analytic = expected_time(set, ord);
    o.report.seed = a.seed;
    o.report.results = {{"order", order_ids(set, ord)},
                        {"trials", sim.trials},
                        {"generator", sim.generator},
                        {"mean_time", sim.mean_time},
                        {"std_error", sim.std_error},
                        {"success_rate", sim.success_rate},
                        {"success_std_error", sim.success_std_error},
                        {"analytic_expected_time", analytic},
                        {"analytic_success_probability",
                         1.0 - prefix_aggregates(set, ord, set.size()).Q}};
    return o;
}

inline Outcome cmd_check(const VerifyConfig& cfg) {
    Outcome o;
    const auto rep = verify_bounds_random(cfg);
    json table = json::array();
    for (const auto& t : rep.checks)
        table.push_back({{"check", t.name},
                         {"checked", t.checked},
                         {"failed", t.failed},
                         {"max_residual", t.max_residual},
                         {"informational", t.informational}});
    o.report.seed = cfg.seed;
    o.report.results = {{"instances", rep.instances}, {"passed", rep.passed()}, {"table", table}};
    if (!rep.passed()) {
        o.exit_code = exit_cross_check;
        o.diagnostics.push_back("randomized verification found failures");
    }
    return o;
}

// --- dispatch -----------------------------------------------------------------------

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Optimal trial ordering: ratio order, expected time, swap excess and its bounds.\n"
                 "Positions --k and --n are 1-based: --k K --n N exchanges positions K and K+N.",
                 "trial-order"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string in_format, out_format = "text";
    bool strict = false;
    app.add_option("--in-format", in_format, "Input format: json or csv (default from extension)")
        ->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--out-format,-f", out_format, "Output format: json, csv or text")
        ->check(CLI::IsMember({"json", "csv", "text"}));
    app.add_flag("--strict", strict, "Exit 2 when a bound premise is violated");

    std::string input;
    auto add_input = [&](CLI::App* sub) {
        sub->add_option("input", input, "Candidate file (JSON or CSV), '-' for stdin")->required();
    };

    auto* order = app.add_subcommand("order", "Ratio order with per-candidate ratios");
    add_input(order);

    ExpectArgs expect_args;
    auto* expect = app.add_subcommand("expect", "Expected time of an ordering");
    add_input(expect);
    expect->add_option("--order", expect_args.order, "optimal, input, or comma-separated ids");
    expect->add_flag("--no-tail", expect_args.no_tail, "Leave out the all-fail term");

    ExcessArgs excess_args;
    auto* excess = app.add_subcommand("excess", "Excess of exchanging positions k and k+n");
    add_input(excess);
    excess->add_option("--k", excess_args.k, "1-based position")->required();
    excess->add_option("--n", excess_args.n, "distance to the second position")->required();
    excess->add_option("--order", excess_args.order, "optimal, input, or comma-separated ids");

    BoundsArgs bounds_args;
    auto* bounds = app.add_subcommand("bounds", "Closed-form bounds on the exchange excess");
    add_input(bounds);
    bounds->add_option("--k", bounds_args.k, "1-based position")->required();
    bounds->add_option("--n", bounds_args.n, "distance to the second position")->required();
    bounds->add_option("--c", bounds_args.c, "lower probability bound")->required();
    bounds->add_option("--d", bounds_args.d, "upper probability bound")->required();
    bounds->add_option("--tmin", bounds_args.t_min, "lower time bound (default: smallest mean time)");
    bounds->add_option("--tmax", bounds_args.t_max, "upper time bound (default: largest mean time)");
    bounds->add_option("--profile", bounds_args.profile,
                       "general-upper, general-lower, equal-t-upper, equal-t-lower, adjacent or all");
    bounds->add_option("--order", bounds_args.order, "optimal, input, or comma-separated ids");
    bounds->add_flag("--printed-variant", bounds_args.printed_variant,
                     "Also report the printed general lower bound expression");

    VerifyOptimalArgs vo_args;
    auto* verify = app.add_subcommand("verify-optimal", "Compare the ratio order with exhaustive search");
    add_input(verify);
    verify->add_option("--max-n", vo_args.max_n, "Largest candidate count to enumerate")
        ->check(CLI::Range(std::size_t{1}, brute_force_limit));
    verify->add_option("--workers", vo_args.workers, "Worker threads (0 = all cores)");

    SimulateArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo estimate of the expected time");
    add_input(sim);
    sim->add_option("--trials", sim_args.trials, "Number of trials")->required()->check(CLI::PositiveNumber);
    sim->add_option("--seed", sim_args.seed, "64-bit seed")->required();
    sim->add_option("--order", sim_args.order, "optimal, input, or comma-separated ids");
    sim->add_option("--workers", sim_args.workers, "Worker threads (0 = all cores)");

    VerifyConfig cfg;
    auto* check = app.add_subcommand("check", "Randomized cross-check of every closed form");
    check->add_option("--instances", cfg.instances, "Random instances")->required();
    check->add_option("--seed", cfg.seed, "64-bit seed")->required();
    check->add_flag("--equal-p", cfg.equal_p_only, "Draw equal-probability instances only");
    check->add_option("--n-min", cfg.n_min, "Smallest candidate count");
    check->add_option("--n-max", cfg.n_max, "Largest candidate count");
    check->add_option("--p-lo", cfg.p_lo, "Smallest probability");
    check->add_option("--p-hi", cfg.p_hi, "Largest probability");
    check->add_option("--t-lo", cfg.t_lo, "Smallest time sample");
    check->add_option("--t-hi", cfg.t_hi, "Largest time sample");
    check->add_option("--max-samples", cfg.max_samples, "Most time samples per candidate");
    check->add_option("--optimality-max-n", cfg.optimality_max_n, "Exhaustive check up to this size");
    check->add_option("--workers", cfg.workers, "Worker threads (0 = all cores)");

    std::vector<const char*> argv{"trial-order"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_invalid_input;
    }

    try {
        std::string raw;
        std::optional<io::InputDocument> doc;
        if (!check->parsed()) {
            raw = io::read_source(input);
            const auto fmt = in_format.empty() ? io::infer_input_format(input)
                                               : *io::parse_input_format(in_format);
            doc = io::parse_input(raw, fmt);
        }

        Outcome o;
        if (order->parsed()) o = cmd_order(doc->candidates);
        else if (expect->parsed()) o = cmd_expect(doc->candidates, expect_args);
        else if (excess->parsed()) o = cmd_excess(doc->candidates, excess_args);
        else if (bounds->parsed()) o = cmd_bounds(doc->candidates, bounds_args, strict);
        else if (verify->parsed()) o = cmd_verify_optimal(doc->candidates, vo_args);
        else if (sim->parsed()) o = cmd_simulate(doc->candidates, sim_args);
        else o = cmd_check(cfg);

        o.report.command = app.get_subcommands().front()->get_name();
        o.report.input_digest = sha256_hex(raw);
        o.report.tool_version = std::string("trial-order ") + version;
        if (doc && !doc->unit.empty()) o.report.results["unit"] = doc->unit;

        out << io::emit(o.report, *io::parse_output_format(out_format));
        for (const auto& d : o.diagnostics) err << "trial-order: " << d << '\n';
        return o.exit_code;
    } catch (const io::parse_error& e) {
        err << "trial-order: " << e.what() << '\n';
        return exit_invalid_input;
    } catch (const invalid_input& e) {
        err << "trial-order: invalid input: " << e.what() << '\n';
        return exit_invalid_input;
    } catch (const error& e) {
        err << "trial-order: " << e.what() << '\n';
        return exit_invalid_input;
    } catch (const std::exception& e) {
        err << "trial-order: internal error: " << e.what() << '\n';
        return exit_cross_check;
    }
}

} // namespace trial_order::cli
