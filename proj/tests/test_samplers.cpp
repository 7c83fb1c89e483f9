// Copyright 2026 The qcorrect Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#include <random>

#include "catch_amalgamated.hpp"
#include "oracles.hpp"
#include "qcorrect/corrector.hpp"
#include "qcorrect/samplers.hpp"

using Catch::Approx;

namespace qcorrect {
namespace {

std::shared_ptr<const ChimeraTopology> free_graph(std::vector<QubitId> ids, std::vector<Coupler> couplers) {
    return std::make_shared<const ChimeraTopology>(std::nullopt, std::move(ids), std::move(couplers));
}

std::shared_ptr<const ChimeraTopology> path(std::size_t n) {
    std::vector<QubitId> ids(n);
    std::vector<Coupler> c;
    for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<QubitId>(i);
    for (std::size_t i = 0; i + 1 < n; ++i) c.emplace_back(i, i + 1);
    return free_graph(ids, c);
}

oracle::Ising to_oracle(const IsingProblem& p) {
    oracle::Ising o;
    o.a.assign(p.linear().begin(), p.linear().end());
    for (std::size_t k = 0; k < p.num_couplers(); ++k) {
        const auto [u, v] = p.topology().coupler_ends(k);
        o.edges.push_back({u, v, p.quadratic(k)});
    }
    return o;
}

double fraction_at(const IsingProblem& p, const std::vector<Sample>& samples, double target) {
    std::size_t hits = 0;
    for (const auto& s : samples) hits += energy(p, s) <= target + 1e-9;
    return static_cast<double>(hits) / static_cast<double>(samples.size());
}

}  // namespace

TEST_CASE("AnnealerConfig") {
    AnnealerConfig c;
    CHECK_NOTHROW(c.validate());
    CHECK(c.beta_at(0) == Approx(0.1));
    CHECK(c.beta_at(99) == Approx(3.0));
    CHECK(c.beta_at(50) / c.beta_at(49) == Approx(c.beta_at(1) / c.beta_at(0)));
    c.beta_final = 0.05;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = {};
    c.sweeps = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = {};
    c.beta_initial = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("sample_noisy") {
    SECTION("cold schedule finds the ground state of a pair") {
        const IsingProblem p(path(2), {0.0, 0.0}, {-1.0});
        const auto exact = exact_minima(p);
        AnnealerConfig cfg;
        cfg.beta_final = 50.0;
        cfg.num_samples = 1000;
        CHECK(fraction_at(p, sample_noisy(p, cfg), exact.min_energy) >= 0.99);
    }
    SECTION("no field and no coupling gives unbiased spins") {
        const auto p = uniform_problem(path(1), 0.0, 0.0);
        AnnealerConfig cfg;
        cfg.num_samples = 10000;
        double sum = 0.0;
        for (const auto& s : sample_noisy(p, cfg)) sum += s[0];
        CHECK(std::abs(sum / 10000.0) <= 0.05);
    }
    SECTION("moderate schedule leaves work for the corrector") {
        std::vector<QubitId> dead;
        for (QubitId q = 50; q < 64; ++q) dead.push_back(q);
        const auto topo = std::make_shared<const ChimeraTopology>(apply_mask(build_chimera(2, 4, 4), {dead, {}}));
        REQUIRE(topo->num_qubits() == 50);
        const auto p = random_problem(topo, 12);
        AnnealerConfig cfg;
        cfg.num_samples = 200;
        std::size_t not_minimal = 0;
        for (const auto& s : sample_noisy(p, cfg)) not_minimal += !is_local_minimum(p, s);
        CHECK(not_minimal > 0);
    }
    SECTION("deterministic and independent of thread count") {
        const auto p = random_problem(std::make_shared<const ChimeraTopology>(build_chimera(2, 2, 4)), 1);
        AnnealerConfig cfg;
        cfg.num_samples = 64;
        const auto a = sample_noisy(p, cfg, 1);
        CHECK(a == sample_noisy(p, cfg, 1));
        CHECK(a == sample_noisy(p, cfg, 5));
        cfg.seed += 1;
        CHECK_FALSE(a == sample_noisy(p, cfg, 1));
    }
    SECTION("colder schedules hit the minimum at least as often") {
        const auto p = random_problem(std::make_shared<const ChimeraTopology>(build_chimera(1, 2, 4)), 31);
        const double target = exact_minima(p).min_energy;
        AnnealerConfig cfg;
        cfg.num_samples = 2000;
        cfg.sweeps = 20;
        double previous = -1.0;
        for (double bf : {0.5, 2.0, 10.0}) {
            cfg.beta_final = bf;
            const double frac = fraction_at(p, sample_noisy(p, cfg), target);
            CHECK(frac >= previous);
            previous = frac;
        }
    }
}

TEST_CASE("exact_minima") {
    SECTION("single qubit") {
        const IsingProblem p(path(1), {1.0}, {});
        const auto m = exact_minima(p);
        CHECK(m.min_energy == -1.0);
        REQUIRE(m.ground_states.size() == 1);
        CHECK(m.ground_states[0] == Sample({-1}));
    }
    SECTION("ferromagnetic pair") {
        const IsingProblem p(path(2), {0.0, 0.0}, {-1.0});
        const auto m = exact_minima(p);
        CHECK(m.min_energy == -1.0);
        CHECK(m.degeneracy == 2);
        CHECK(m.ground_states == std::vector<Sample>{Sample({-1, -1}), Sample({1, 1})});
    }
    SECTION("random 16-qubit problems agree with the oracle") {
        const auto topo = std::make_shared<const ChimeraTopology>(build_chimera(1, 2, 4));
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto p = random_problem(topo, seed);
            const auto m = exact_minima(p);
            const auto o = oracle::enumerate(to_oracle(p), 1e-9);
            CHECK(m.min_energy == Approx(o.min_energy).margin(1e-12));
            CHECK(m.degeneracy == o.states.size());

            AnnealerConfig cfg;
            cfg.num_samples = 100;
            cfg.sweeps = 5;
            cfg.seed = seed;
            for (const auto& s : correct_batch(p, sample_noisy(p, cfg)).samples) {
                CHECK(energy(p, s) >= m.min_energy - 1e-12);
            }
        }
    }
    SECTION("degenerate zero problem is counted in full") {
        const auto p = uniform_problem(path(10), 0.0, 0.0);
        const auto m = exact_minima(p, 16);
        CHECK(m.degeneracy == 1024);
        CHECK(m.ground_states.size() == 16);
        CHECK(m.truncated);
    }
    SECTION("too many qubits") {
        const auto p = uniform_problem(path(26), 0.0, 0.0);
        CHECK_THROWS_WITH(exact_minima(p), Catch::Matchers::ContainsSubstring("chain"));
    }
}

TEST_CASE("chain_ground_marginals examples") {
    SECTION("no field, ferromagnetic") {
        const auto g = chain_ground_marginals(12, 0.0, -1.0);
        CHECK(g.degeneracy == 2);
        CHECK(g.min_energy == -11.0);
        for (double p : g.per_qubit_plus_probability) CHECK(p == 0.5);
        CHECK(g.vote_plus_probability == 0.5);
    }
    SECTION("field and coupling agree") {
        const auto g = chain_ground_marginals(12, -2.0, -1.0);
        CHECK(g.degeneracy == 1);
        for (double p : g.per_qubit_plus_probability) CHECK(p == 1.0);
        CHECK(g.vote_plus_probability == 1.0);
    }
    SECTION("no field, antiferromagnetic: 6-6 split votes 1") {
        const auto g = chain_ground_marginals(12, 0.0, 1.0);
        CHECK(g.degeneracy == 2);
        CHECK(g.plus_total_count[6] == 2);
        for (double p : g.per_qubit_plus_probability) CHECK(p == 0.5);
        CHECK(g.vote_plus_probability == 1.0);
    }
    SECTION("fully degenerate chain") {
        const auto g = chain_ground_marginals(10, 0.0, 0.0);
        CHECK(g.degeneracy == 1024);
        CHECK(g.pooled_plus_probability == 0.5);
    }
    SECTION("errors") {
        CHECK_THROWS_AS(chain_ground_marginals(0, 0.0, 0.0), std::invalid_argument);
        const std::vector<double> a{0.0, 0.0};
        const std::vector<double> b{0.0, 0.0};
        CHECK_THROWS_AS(chain_ground_summary(a, b), std::invalid_argument);
    }
}

TEST_CASE("chain DP agrees with enumeration") {
    const std::vector<double> cqs{-2.0, -1.5, -0.75, 0.0, 0.25, 1.0, 2.0};
    const std::vector<double> ccs{-1.0, -0.5, -0.125, 0.0, 0.5, 1.0};
    for (std::size_t len = 1; len <= 12; ++len) {
        for (double cq : cqs) {
            for (double cc : ccs) {
                INFO("len=" << len << " cq=" << cq << " cc=" << cc);
                const auto g = chain_ground_marginals(len, cq, cc);
                const auto o = oracle::enumerate(oracle::chain(len, cq, cc));
                REQUIRE(g.degeneracy == o.states.size());
                CHECK(g.min_energy == o.min_energy);
                for (std::size_t i = 0; i < len; ++i) {
                    std::uint64_t plus = 0;
                    for (auto s : o.states) plus += (s >> i) & 1;
                    CHECK(g.plus_count_at[i] == plus);
                }
            }
        }
    }

    SECTION("random quantized chains, including against exact_minima") {
        std::mt19937_64 rng(3);
        for (int t = 0; t < 40; ++t) {
            const std::size_t len = 2 + rng() % 14;
            const auto p = quantize(random_problem(path(len), rng()), Resolution::finite(4));
            const auto g = chain_ground_summary(p.linear(), p.quadratic());
            const auto m = exact_minima(p);
            CHECK(g.min_energy == m.min_energy);
            CHECK(g.degeneracy == m.degeneracy);
        }
    }
}

}  // namespace qcorrect
