#include <catch2/catch_amalgamated.hpp>

#include <trial_order/oracle.hpp>

#include "../support/reference.hpp"

#include <random>

using namespace trial_order;
using Catch::Approx;

namespace {

CandidateSet make(std::vector<double> ps, std::vector<double> ts) {
    return CandidateSet::from_values(ps, ts);
}

} // namespace

TEST_CASE("brute force on small instances", "[oracle]") {
    SECTION("single candidate") {
        const auto r = brute_force_best_order(make({0.3}, {4}));
        CHECK(r.best_order == Ordering::identity(1));
        CHECK(r.best_expected_time == 4.0);
        CHECK(r.evaluated == 1);
    }
    SECTION("three candidates") {
        const auto r = brute_force_best_order(make({0.5, 0.4, 0.3}, {1, 1, 1}));
        CHECK(r.best_order == Ordering::identity(3));
        CHECK(r.best_expected_time == Approx(1.8).epsilon(1e-15));
        CHECK(r.evaluated == 6);
    }
    SECTION("two candidates, reversed") {
        const auto r = brute_force_best_order(make({0.5, 0.5}, {2, 1}));
        CHECK(r.best_order == Ordering({1, 0}));
        CHECK(r.best_expected_time == Approx(2.0).epsilon(1e-15));
    }
    SECTION("exact ties go to the lexicographically smallest permutation") {
        const auto r = brute_force_best_order(make({0.4, 0.4, 0.4, 0.4}, {1, 1, 1, 1}));
        CHECK(r.best_order == Ordering::identity(4));
        CHECK(r.evaluated == 24);
    }
    SECTION("size guard") {
        std::vector<double> ps(11, 0.5), ts(11, 1.0);
        CHECK_THROWS_AS(brute_force_best_order(CandidateSet::from_values(ps, ts)), size_error);
    }
}

TEST_CASE("brute force agrees with the ratio order and is worker-independent", "[oracle][property]") {
    std::mt19937_64 rng(51);
    for (int it = 0; it < 60; ++it) {
        auto inst = reference::random_instance(rng, 1, 7);
        const auto seq = brute_force_best_order(inst.set, 1);
        const auto par = brute_force_best_order(inst.set, 3);
        REQUIRE(seq.best_order == par.best_order);
        REQUIRE(seq.best_expected_time == par.best_expected_time);
        REQUIRE(seq.evaluated == par.evaluated);
        const double rule = expected_time(inst.set, solomonoff_order(inst.set));
        REQUIRE(std::abs(rule - seq.best_expected_time) <= 1e-9 * std::max(1.0, seq.best_expected_time));
        REQUIRE(seq.best_expected_time ==
                Approx(reference::best_over_permutations(inst.p, inst.t)).epsilon(1e-12));
    }
}

TEST_CASE("simulation degenerate cases", "[oracle]") {
    SECTION("certain success") {
        const auto s = make({1.0}, {2});
        const auto r = simulate(s, Ordering::identity(1), 1000, 7);
        CHECK(r.mean_time == 2.0);
        CHECK(r.success_rate == 1.0);
        CHECK(r.std_error == 0.0);
        CHECK(r.generator == std::string("splitmix64"));
    }
    SECTION("certain failure walks every candidate") {
        const auto s = make({0.0, 0.0, 0.0}, {1, 2.5, 0.5});
        const auto r = simulate(s, Ordering::identity(3), 1000, 7);
        CHECK(r.mean_time == Approx(4.0).epsilon(1e-14));
        CHECK(r.success_rate == 0.0);
    }
    SECTION("zero trials") {
        CHECK_THROWS_AS(simulate(make({0.5}, {1}), Ordering::identity(1), 0, 1), range_error);
    }
}

TEST_CASE("simulation is reproducible and worker-independent", "[oracle]") {
    std::vector<CandidateSpec> specs{{"a", 0.4, {1.0, 3.0}}, {"b", 0.7, {2.0}}, {"c", 0.2, {0.5, 1.0, 4.0}}};
    const auto s = CandidateSet::from_specs(specs);
    const auto ord = solomonoff_order(s);
    const auto a = simulate(s, ord, 20000, 99, 1);
    const auto b = simulate(s, ord, 20000, 99, 1);
    const auto c = simulate(s, ord, 20000, 99, 4);
    CHECK(a.mean_time == b.mean_time);
    CHECK(a.mean_time == c.mean_time);
    CHECK(a.std_error == c.std_error);
    CHECK(a.success_rate == c.success_rate);
    const auto d = simulate(s, ord, 20000, 100, 1);
    CHECK(a.mean_time != d.mean_time);
}

TEST_CASE("simulation converges to the analytic expectation", "[oracle]") {
    std::vector<CandidateSpec> specs{{"a", 0.4, {1.0, 3.0}}, {"b", 0.7, {2.0}}, {"c", 0.2, {0.5, 1.0, 4.0}}};
    const auto s = CandidateSet::from_specs(specs);
    for (const auto& ord : {solomonoff_order(s), Ordering({2, 0, 1})}) {
        const auto r = simulate(s, ord, 200000, 2024);
        const double analytic = expected_time(s, ord);
        CHECK(std::abs(r.mean_time - analytic) <= 4.0 * r.std_error);
        const double q = prefix_aggregates(s, ord, 3).Q;
        const double se = std::sqrt(q * (1 - q) / 200000.0);
        CHECK(std::abs(r.success_rate - (1.0 - q)) <= 4.0 * se);
    }
}

TEST_CASE("randomized verification", "[oracle]") {
    SECTION("no instances") {
        VerifyConfig cfg;
        const auto rep = verify_bounds_random(cfg);
        CHECK(rep.instances == 0);
        CHECK(rep.passed());
        for (const auto& c : rep.checks) {
            CHECK(c.checked == 0);
            CHECK(c.failed == 0);
        }
    }
    SECTION("default ranges") {
        VerifyConfig cfg;
        cfg.instances = 400;
        cfg.seed = 5;
        const auto rep = verify_bounds_random(cfg);
        CHECK(rep.passed());
        for (const char* name : {"decomposition-vs-direct", "adjacent-vs-direct", "sandwich-general-upper",
                                 "sandwich-general-lower", "sandwich-equal-t-upper",
                                 "sandwich-equal-t-lower", "equal-p-corrected", "optimality"}) {
            INFO(name);
            const auto* t = rep.find(name);
            REQUIRE(t);
            CHECK(t->checked == 400);
            CHECK(t->failed == 0);
        }
        CHECK(rep.find("decomposition-vs-direct")->max_residual < 1e-10);
        CHECK(rep.find("equal-p-printed")->failed > 0);
        CHECK(rep.find("equal-p-printed-offset")->failed == 0);

        cfg.workers = 3;
        const auto again = verify_bounds_random(cfg);
        for (std::size_t i = 0; i < rep.checks.size(); ++i) {
            CHECK(again.checks[i].failed == rep.checks[i].failed);
            CHECK(again.checks[i].max_residual == rep.checks[i].max_residual);
        }
    }
    SECTION("equal-p generator exposes the printed closed form on every instance") {
        VerifyConfig cfg;
        cfg.instances = 300;
        cfg.seed = 6;
        cfg.equal_p_only = true;
        const auto rep = verify_bounds_random(cfg);
        CHECK(rep.passed());
        const auto* printed = rep.find("equal-p-printed");
        // Continuous time samples: t_{k+n} != t_k on every instance.
        CHECK(printed->failed == printed->checked);
        CHECK(printed->checked == 300);
    }
}
