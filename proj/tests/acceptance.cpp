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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances and sizes are fixed here and never tuned at runtime.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qcorrect/qcorrect.hpp"

using namespace qcorrect;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
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

// From-scratch influences with plain summation over a per-qubit edge list.
struct PlainInfluence {
    std::vector<double> a;
    std::vector<std::vector<std::pair<std::size_t, double>>> adj;

    explicit PlainInfluence(const oracle::Ising& o) : a(o.a), adj(o.a.size()) {
        for (const auto& e : o.edges) {
            adj[e.i].emplace_back(e.j, e.b);
            adj[e.j].emplace_back(e.i, e.b);
        }
    }
    bool local_minimum(const Sample& s) const {
        for (std::size_t i = 0; i < a.size(); ++i) {
            double f = a[i];
            for (const auto& [j, b] : adj[i]) f += b * s[j];
            if (f * s[i] > 0.0) return false;
        }
        return true;
    }
};

std::vector<int> as_ints(const Sample& s) { return {s.spins().begin(), s.spins().end()}; }

// 1. Every corrected sample is a local minimum.
Outcome local_minimum_certification() {
    const auto t0 = Clock::now();
    const auto topo = std::make_shared<const ChimeraTopology>(build_chimera(4, 4, 4));
    std::size_t total = 0, certified = 0;
    for (std::uint64_t k = 0; k < 100; ++k) {
        const auto p = random_problem(topo, 1'000 + k);
        AnnealerConfig cfg;
        cfg.num_samples = 100;
        cfg.seed = k;
        const auto fixed = correct_batch(p, sample_noisy(p, cfg), {.record_flips = false});
        const PlainInfluence check(to_oracle(p));
        for (const auto& s : fixed.samples) {
            ++total;
            certified += check.local_minimum(s);
        }
    }
    const double secs = seconds_since(t0);
    return {total == 10'000 && certified == total && secs < 30.0,
            std::to_string(certified) + "/" + std::to_string(total) + " certified, " + std::to_string(secs) + " s (< 30 s)"};
}

// 2. Each recorded flip lowers the re-evaluated energy by 2|I_i|.
Outcome descent_exactness() {
    const auto topo = std::make_shared<const ChimeraTopology>(build_chimera(4, 4, 4));
    std::size_t flips = 0, exact = 0;
    double worst = 0.0;
    for (std::uint64_t k = 0; flips < 10'000; ++k) {
        const auto p = random_problem(topo, 2'000 + k);
        const auto o = to_oracle(p);
        AnnealerConfig cfg;
        cfg.num_samples = 20;
        cfg.sweeps = 10;
        cfg.seed = k;
        for (const auto& raw : sample_noisy(p, cfg)) {
            const auto c = correct(p, raw);
            auto q = as_ints(raw);
            double f = oracle::energy(o, q);
            for (const auto& flip : c.report.flips) {
                const auto i = *p.topology().index_of(flip.qubit);
                q[i] = -q[i];
                const double next = oracle::energy(o, q);
                const double err = std::abs((f - next) - 2.0 * std::abs(flip.influence));
                worst = std::max(worst, err);
                exact += err <= 1e-9;
                ++flips;
                f = next;
            }
        }
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", worst);
    return {exact == flips,
            std::to_string(exact) + "/" + std::to_string(flips) + " flips within 1e-9, worst error " + buf};
}

// 3. Corrected energies never beat the enumerated minimum, and sometimes
// stay above it.
Outcome oracle_bound() {
    const auto topo = std::make_shared<const ChimeraTopology>(build_chimera(1, 2, 4));
    std::size_t samples = 0, violations = 0, above = 0;
    for (std::uint64_t k = 0; k < 200; ++k) {
        const auto p = random_problem(topo, 3'000 + k);
        const auto ground = oracle::enumerate(to_oracle(p));
        AnnealerConfig weak;
        weak.sweeps = 1;
        weak.beta_initial = 0.1;
        weak.beta_final = 0.1;
        weak.num_samples = 50;
        weak.seed = k;
        for (const auto& s : correct_batch(p, sample_noisy(p, weak), {.record_flips = false}).samples) {
            const double e = oracle::energy(to_oracle(p), as_ints(s));
            ++samples;
            violations += e < ground.min_energy - 1e-12;
            above += e > ground.min_energy + 1e-9;
        }
    }
    return {violations == 0 && above >= 1, std::to_string(samples) + " samples, " + std::to_string(violations) +
                                                   " below the minimum, " + std::to_string(above) +
                                                   " strictly above it"};
}

// 4. Correction shifts the energy histogram down on the 1097-qubit graph.
Outcome histogram_shift() {
    const auto t0 = Clock::now();
    const auto mask = synthetic_flux_mask({12, 12, 4}, 1097, 3060, kDefaultSeed);
    const auto topo = apply_mask(build_chimera(12, 12, 4), mask);
    if (topo.num_qubits() != 1097) return {false, "masked graph has " + std::to_string(topo.num_qubits()) + " qubits"};
    const std::vector<Resolution> res{Resolution::infinite(), Resolution::finite(100), Resolution::finite(32)};
    AnnealerConfig cfg;
    const auto results = run_histogram_experiment(topo, kDefaultSeed, res, 1000, cfg, {.threads = 0});
    bool ok = results.size() == 3;
    std::string detail;
    for (const auto& h : results) {
        const double mu = mean(h.uncorrected_energies);
        const double mc = mean(h.corrected_energies);
        const double minu = *std::min_element(h.uncorrected_energies.begin(), h.uncorrected_energies.end());
        const double minc = *std::min_element(h.corrected_energies.begin(), h.corrected_energies.end());
        ok = ok && mc < mu && minc <= minu && h.all_certified;
        char buf[200];
        std::snprintf(buf, sizeof(buf), "R=%s mean %.2f->%.2f min %.2f->%.2f; ", h.resolution.to_string().c_str(), mu,
                      mc, minu, minc);
        detail += buf;
    }
    const double secs = seconds_since(t0);
    ok = ok && secs < 300.0;
    return {ok, detail + std::to_string(secs) + " s (< 300 s)"};
}

// 5. Corrected curves sit closer to the ground-state curves than raw ones.
Outcome sweep_fidelity() {
    const auto t0 = Clock::now();
    AnnealerConfig moderate;
    moderate.sweeps = 20;
    moderate.beta_initial = 0.1;
    moderate.beta_final = 1.0;
    bool ok = true;
    std::string detail;
    for (SweepAxis axis : {SweepAxis::CouplerValue, SweepAxis::QubitValue}) {
        const bool cc = axis == SweepAxis::CouplerValue;
        const auto xs = cc ? linspace(-1.0, 1.0, 33) : linspace(-2.0, 2.0, 33);
        const auto cs = cc ? linspace(-2.0, 2.0, 9) : linspace(-1.0, 1.0, 9);
        const auto r = run_chain_sweep(12, axis, xs, cs, 200, moderate, 0);
        ok = ok && r.all_certified;
        for (Metric m : kMetrics) {
            const double raw = curve_distance(r, Source::Uncorrected, Source::Theoretical, m);
            const double cor = curve_distance(r, Source::Corrected, Source::Theoretical, m);
            ok = ok && cor < raw;
            char buf[160];
            std::snprintf(buf, sizeof(buf), "%s/%s corr %.4f < raw %.4f; ", to_string(axis), to_string(m), cor, raw);
            detail += buf;
        }
    }
    const double secs = seconds_since(t0);
    ok = ok && secs < 600.0;
    return {ok, detail + std::to_string(secs) + " s (< 600 s)"};
}

// 6. Chain DP counts equal brute-force enumeration counts.
Outcome theoretical_exactness() {
    const std::vector<double> cqs{-2.0, -1.0, 0.0, 1.0, 2.0};
    const std::vector<double> ccs{-1.0, -0.5, 0.0, 0.5, 1.0};
    std::size_t cases = 0, matched = 0;
    for (std::size_t len = 1; len <= 16; ++len) {
        for (double cq : cqs) {
            for (double cc : ccs) {
                ++cases;
                const auto g = chain_ground_marginals(len, cq, cc);
                const auto o = oracle::enumerate(oracle::chain(len, cq, cc));
                bool same = g.degeneracy == o.states.size() && g.min_energy == o.min_energy;
                std::vector<std::uint64_t> by_k(len + 1, 0), at(len, 0);
                std::uint64_t votes = 0;
                for (auto s : o.states) {
                    const auto k = static_cast<std::size_t>(std::popcount(s));
                    ++by_k[k];
                    votes += 2 * k >= len;
                    for (std::size_t i = 0; i < len; ++i) at[i] += (s >> i) & 1;
                }
                same = same && by_k == g.plus_total_count && at == g.plus_count_at && votes == g.vote_plus_count;
                matched += same;
            }
        }
    }
    return {matched == cases, std::to_string(matched) + "/" + std::to_string(cases) + " (length, C_q, C_c) cases equal"};
}

// 7. Symmetries.
Outcome symmetry_properties() {
    std::size_t failures = 0;
    for (std::size_t len : {1, 2, 5, 12, 16}) {
        for (double cc : linspace(-1.0, 1.0, 129)) {
            const auto g = chain_ground_marginals(len, 0.0, cc);
            for (double p : g.per_qubit_plus_probability) failures += p != 0.5;
            failures += g.pooled_plus_probability != 0.5;
        }
    }
    for (double cq : linspace(-2.0, 2.0, 129)) {
        for (double cc : {-1.0, 0.0, 1.0}) {
            const double p = chain_ground_marginals(1, cq, cc).pooled_plus_probability;
            const double expect = cq < 0 ? 1.0 : (cq == 0 ? 0.5 : 0.0);
            failures += p != expect;
        }
    }
    std::mt19937_64 rng(7);
    std::size_t coefficients = 0;
    for (std::int64_t r : {1, 7, 10, 32, 100, 1000}) {
        const auto res = Resolution::finite(r);
        for (int i = 0; i < 10'000 / 6 + 1; ++i) {
            const double b = detail::uniform(rng, -1.0, 1.0);
            const double a = detail::uniform(rng, -2.0, 2.0);
            const double qb = quantize_coefficient(b, res);
            const double qa = quantize_coefficient(a, res, 2.0);
            failures += quantize_coefficient(qb, res) != qb;
            failures += quantize_coefficient(qa, res, 2.0) != qa;
            coefficients += 2;
        }
    }
    return {failures == 0, std::to_string(failures) + " violations (C_q=0 halves, 1-qubit step, idempotence over " +
                                   std::to_string(coefficients) + " coefficients)"};
}

// 8. Topology counts.
Outcome topology_counts() {
    const auto big = build_chimera(12, 12, 4);
    bool ok = big.num_qubits() == 1152 && big.num_couplers() == 3360;
    std::size_t grids = 0, equal = 0;
    for (std::size_t r = 1; r <= 6; ++r) {
        for (std::size_t c = 1; c <= 6; ++c) {
            for (std::size_t s = 1; s <= 6; ++s) {
                ++grids;
                const auto n = oracle::chimera_edges(r, c, s).size();
                equal += chimera_coupler_count({r, c, s}) == n && build_chimera(r, c, s).num_couplers() == n;
            }
        }
    }
    ok = ok && equal == grids;
    return {ok, "12x12x4: " + std::to_string(big.num_qubits()) + " qubits / " + std::to_string(big.num_couplers()) +
                        " couplers; formula == enumeration on " + std::to_string(equal) + "/" + std::to_string(grids) +
                        " grids"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
            {"AC1 local-minimum certification", local_minimum_certification},
            {"AC2 descent exactness", descent_exactness},
            {"AC3 oracle bound", oracle_bound},
            {"AC4 histogram shift", histogram_shift},
            {"AC5 sweep fidelity", sweep_fidelity},
            {"AC6 theoretical-sampler exactness", theoretical_exactness},
            {"AC7 symmetry properties", symmetry_properties},
            {"AC8 topology counts", topology_counts},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
