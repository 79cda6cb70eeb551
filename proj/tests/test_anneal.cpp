#include <cmath>
#include <map>
#include <set>

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include "cubeseek/anneal.hpp"
#include "cubeseek/errors.hpp"

using namespace cubeseek;
using namespace cubeseek::anneal;

TEST(Temperature, Schedule) {
    EXPECT_DOUBLE_EQ(temperature(1), 100.0);
    EXPECT_NEAR(temperature(10), 0.4324165208, 1e-9);
    EXPECT_THROW(temperature(0), InvalidArgument);
    double last = temperature(1);
    for (std::uint64_t m = 2; m < 100000; m += 7) {
        const double t = temperature(m);
        ASSERT_LT(t, last);
        last = t;
    }
}

TEST(Neighbourhood, Sizes) {
    const auto r3 = SearchRange::decade(3);
    EXPECT_EQ(neighbourhood({-500, 500}, r3).size(), 440u);
    EXPECT_EQ(neighbourhood({0, 0}, r3).size(), 120u);
    EXPECT_EQ(neighbourhood({-500, 500}, r3, 1).size(), 8u);
    EXPECT_EQ(neighbourhood({-1000, 1000}, r3).size(), 120u);
    EXPECT_EQ(neighbourhood({-500, 0}, r3).size(), 230u);
    EXPECT_THROW(neighbourhood({1, 0}, r3), InvalidArgument);
    for (const auto& q : neighbourhood({0, 0}, r3)) {
        EXPECT_TRUE(r3.contains(q));
        EXPECT_FALSE(q == (SearchPoint{0, 0}));
    }
}

TEST(Propose, UniformOverInteriorBox) {
    const auto r3 = SearchRange::decade(3);
    const SearchPoint p{-500, 500};
    const auto nbh = neighbourhood(p, r3);
    std::map<std::pair<std::int64_t, std::int64_t>, long> counts;
    for (const auto& q : nbh) counts[{q.x, q.y}] = 0;

    Rng rng(12);
    const long draws = 1'000'000;
    for (long i = 0; i < draws; ++i) {
        const auto q = propose(p, r3, rng);
        auto it = counts.find({q.x, q.y});
        ASSERT_NE(it, counts.end()) << q.x << "," << q.y;
        ++it->second;
    }
    const double expected = static_cast<double>(draws) / static_cast<double>(nbh.size());
    double chi2 = 0.0;
    for (const auto& [_, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
    const boost::math::chi_squared dist(static_cast<double>(nbh.size() - 1));
    EXPECT_GT(boost::math::cdf(boost::math::complement(dist, chi2)), 0.001) << "chi2 = " << chi2;
}

TEST(Propose, StaysInRangeAtBorders) {
    const auto r3 = SearchRange::decade(3);
    Rng rng(13);
    std::set<std::pair<std::int64_t, std::int64_t>> seen;
    for (const SearchPoint p : {SearchPoint{0, 0}, SearchPoint{-1000, 1000}, SearchPoint{-3, 997}}) {
        const auto nbh = neighbourhood(p, r3);
        seen.clear();
        for (int i = 0; i < 1'000'000; ++i) {
            const auto q = propose(p, r3, rng);
            ASSERT_TRUE(r3.contains(q));
            ASSERT_FALSE(q == p);
            ASSERT_LE(std::llabs(q.x - p.x), 10);
            ASSERT_LE(std::llabs(q.y - p.y), 10);
            seen.insert({q.x, q.y});
        }
        EXPECT_EQ(seen.size(), nbh.size());
    }
}

TEST(Propose, SymmetricForInteriorPairs) {
    // q(p -> p') = 1 / |N(p)|, so symmetry reduces to equal neighbourhood sizes and mutual membership.
    const auto r3 = SearchRange::decade(3);
    const SearchPoint p{-400, 300};
    for (const auto& q : neighbourhood(p, r3)) {
        const auto back = neighbourhood(q, r3);
        EXPECT_EQ(back.size(), 440u);
        EXPECT_NE(std::find(back.begin(), back.end(), p), back.end());
    }
}

TEST(Propose, SinglePointRange) {
    Rng rng(1);
    EXPECT_THROW(propose({0, 0}, SearchRange(0, 0, 0, 0), rng), InvalidArgument);
}

TEST(Accept, Metropolis) {
    Rng rng(14);
    for (int i = 0; i < 1000; ++i) EXPECT_TRUE(accept(-0.1, 1e-9, rng));
    const int draws = 100000;
    int hits = 0;
    for (int i = 0; i < draws; ++i) hits += accept(0.1, 1.0, rng);
    EXPECT_NEAR(static_cast<double>(hits) / draws, std::exp(-0.1), 0.01);
    hits = 0;
    for (int i = 0; i < draws; ++i) hits += accept(0.5, 1e-3, rng);
    EXPECT_EQ(hits, 0);
}

TEST(SameEnergyRun, Semantics) {
    EXPECT_EQ(next_same_energy_run(4, false, 0.2, 0.1), 5u);
    EXPECT_EQ(next_same_energy_run(4, true, 0.2, 0.2), 5u);
    EXPECT_EQ(next_same_energy_run(4, true, 0.2, 0.1), 1u);

    // Accepted moves alternating between two energies never build a run of 2.
    std::uint64_t run = 1;
    double e = 0.1;
    for (int i = 0; i < 1000; ++i) {
        const double next = e == 0.1 ? 0.2 : 0.1;
        run = next_same_energy_run(run, true, e, next);
        e = next;
        ASSERT_LT(run, 2u);
    }
}

TEST(Step, RestartAfterEqualEnergyRun) {
    // With k = 0 every point (x, 0) is exact, so the energy never changes.
    AnnealConfig cfg;
    cfg.k = 0;
    cfg.range = SearchRange(-1, 1, 0, 0);
    cfg.neighbourhood_radius = 1;
    cfg.restart_threshold = 30;
    Rng rng(3);
    auto st = init_state(cfg, rng);
    EXPECT_EQ(st.energy, 0.0);
    for (int i = 1; i <= 28; ++i) {
        step(st, cfg, rng);
        ASSERT_EQ(st.restarts, 0u);
        ASSERT_EQ(st.same_energy_run, static_cast<std::uint64_t>(i + 1));
    }
    step(st, cfg, rng);
    EXPECT_EQ(st.restarts, 1u);
    EXPECT_EQ(st.m, 1u);
    EXPECT_EQ(st.same_energy_run, 1u);
    EXPECT_EQ(st.iterations, 29u);
}

TEST(Step, StateTracksEnergyAndRange) {
    AnnealConfig cfg;
    cfg.range = SearchRange(-40, 0, 0, 40);
    cfg.restart_threshold = 5;
    Rng rng(15);
    auto st = init_state(cfg, rng);
    for (int i = 0; i < 5000; ++i) {
        step(st, cfg, rng);
        ASSERT_TRUE(cfg.range.contains(st.current));
        ASSERT_EQ(st.energy, fitness(cfg.k, st.current));
    }
    EXPECT_GT(st.restarts, 0u);
}

TEST(Run, SaAndRsaFindVerifiedSolutions) {
    AnnealConfig cfg;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Rng a(seed), b(seed);
        for (const auto& rec : {run_sa(cfg, a), run_rsa(cfg, b)}) {
            ASSERT_FALSE(rec.truncated);
            ASSERT_TRUE(rec.solution.has_value());
            EXPECT_TRUE(verify_solution(2, rec.solution->x, rec.solution->y, rec.solution->z));
        }
    }
}

TEST(Run, Deterministic) {
    AnnealConfig cfg;
    Rng a(31), b(31);
    const auto ra = run_rsa(cfg, a);
    const auto rb = run_rsa(cfg, b);
    EXPECT_EQ(ra.iterations, rb.iterations);
    EXPECT_EQ(ra.restarts, rb.restarts);
    EXPECT_EQ(ra.solution, rb.solution);
    EXPECT_EQ(ra.algorithm, Algorithm::rsa);
}

TEST(Run, InfiniteRestartThresholdIsPlainSa) {
    AnnealConfig cfg;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Rng a(seed), b(seed);
        const auto sa = run_sa(cfg, a);
        auto rcfg = cfg;
        rcfg.restart_threshold = UINT64_MAX;
        const auto rsa = run(rcfg, b);
        EXPECT_EQ(sa.iterations, rsa.iterations);
        EXPECT_EQ(sa.solution, rsa.solution);
        EXPECT_EQ(rsa.restarts, 0u);
        EXPECT_EQ(a, b);
    }
}

TEST(Run, Errors) {
    AnnealConfig cfg;
    Rng rng(0);
    cfg.k = 14;
    EXPECT_THROW(run_sa(cfg, rng), InsolubleK);
    cfg.k = 2;
    cfg.range = SearchRange(0, 0, 0, 0);
    EXPECT_THROW(run_sa(cfg, rng), InvalidArgument);
    cfg.range = SearchRange::decade(3);
    cfg.restart_threshold = 1;
    EXPECT_THROW(run(cfg, rng), InvalidArgument);
    cfg.restart_threshold.reset();
    cfg.neighbourhood_radius = 0;
    EXPECT_THROW(run(cfg, rng), InvalidArgument);
}

TEST(Run, Truncation) {
    AnnealConfig cfg;
    cfg.max_iterations = 0;
    Rng rng(0);
    EXPECT_TRUE(run_sa(cfg, rng).truncated);
    cfg.range = SearchRange(-20, -10, 10, 12);
    cfg.max_iterations = 100;
    const auto rec = run_rsa(cfg, rng);
    EXPECT_TRUE(rec.truncated);
    EXPECT_EQ(rec.iterations, 100u);
    EXPECT_FALSE(rec.solution.has_value());
}
