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

#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcorrect/model.hpp"
#include "qcorrect/util.hpp"

namespace qcorrect {

inline constexpr std::uint64_t kDefaultSeed = 20170406;

/// Metropolis annealing schedule standing in for annealer hardware.
struct AnnealerConfig {
    std::size_t sweeps = 100;
    double beta_initial = 0.1;
    double beta_final = 3.0;
    std::uint64_t seed = kDefaultSeed;
    std::size_t num_samples = 1000;

    void validate() const {
        if (sweeps < 1) throw std::invalid_argument("sweeps must be >= 1");
        if (!(beta_initial > 0.0) || !std::isfinite(beta_initial)) {
            throw std::invalid_argument("beta_initial must be positive");
        }
        if (!(beta_final >= beta_initial) || !std::isfinite(beta_final)) {
            throw std::invalid_argument("beta_final must be >= beta_initial");
        }
    }

    /// Inverse temperature of sweep t, geometric from beta_initial to beta_final.
    double beta_at(std::size_t t) const {
        if (sweeps == 1) return beta_final;
        const double frac = static_cast<double>(t) / static_cast<double>(sweeps - 1);
        return beta_initial * std::pow(beta_final / beta_initial, frac);
    }
};

/// One annealing run from a uniform random start.
inline Sample anneal_once(const IsingProblem& problem, const AnnealerConfig& config, std::uint64_t run_seed) {
    const auto& topo = problem.topology();
    const std::size_t n = problem.num_qubits();
    std::mt19937_64 rng(run_seed);
    std::vector<Spin> q(n);
    for (auto& s : q) s = (rng() >> 63) ? Spin{1} : Spin{-1};

    std::vector<double> field(n);
    for (std::size_t i = 0; i < n; ++i) {
        double f = problem.linear(i);
        for (const auto& nb : topo.neighbors(i)) f += problem.quadratic(nb.coupler) * q[nb.index];
        field[i] = f;
    }
    for (std::size_t t = 0; t < config.sweeps; ++t) {
        const double beta = config.beta_at(t);
        for (std::size_t i = 0; i < n; ++i) {
            const double delta = -2.0 * field[i] * q[i];
            if (delta <= 0.0 || detail::uniform01(rng) < std::exp(-beta * delta)) {
                q[i] = static_cast<Spin>(-q[i]);
                for (const auto& nb : topo.neighbors(i)) field[nb.index] += 2.0 * problem.quadratic(nb.coupler) * q[i];
            }
        }
    }
    return Sample(std::move(q));
}

/// num_samples independent annealing runs. Run r uses a stream derived from
/// (seed, r), so the result does not depend on `threads`.
inline std::vector<Sample> sample_noisy(const IsingProblem& problem, const AnnealerConfig& config,
                                        unsigned threads = 1) {
    config.validate();
    std::vector<Sample> out(config.num_samples);
    parallel_for(out.size(), threads,
                 [&](std::size_t r) { out[r] = anneal_once(problem, config, detail::derive_seed(config.seed, r)); });
    return out;
}

inline constexpr std::size_t kMaxEnumerationQubits = 25;

struct ExactMinima {
    double min_energy = 0.0;
    std::uint64_t degeneracy = 0;
    std::vector<Sample> ground_states;  ///< ascending by bit pattern; capped, see `truncated`
    bool truncated = false;
};

namespace detail {

inline Sample sample_from_bits(std::uint64_t bits, std::size_t n) {
    std::vector<Spin> q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = ((bits >> i) & 1) ? Spin{1} : Spin{-1};
    return Sample(std::move(q));
}

// Visits all 2^n states in Gray-code order with an incrementally updated
// energy: visit(bits, energy). Bit i set means q_i = +1.
template <class Visit>
void gray_enumerate(const IsingProblem& problem, Visit&& visit) {
    const auto& topo = problem.topology();
    const std::size_t n = problem.num_qubits();
    std::vector<Spin> q(n, -1);
    std::vector<double> field(n);
    for (std::size_t i = 0; i < n; ++i) {
        double f = problem.linear(i);
        for (const auto& nb : topo.neighbors(i)) f -= problem.quadratic(nb.coupler);
        field[i] = f;
    }
    double e = energy(problem, Sample(std::vector<Spin>(q)));
    std::uint64_t bits = 0;
    visit(bits, e);
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t g = 1; g < total; ++g) {
        const std::size_t i = static_cast<std::size_t>(std::countr_zero(g));
        e -= 2.0 * field[i] * q[i];
        q[i] = static_cast<Spin>(-q[i]);
        bits ^= std::uint64_t{1} << i;
        for (const auto& nb : topo.neighbors(i)) field[nb.index] += 2.0 * problem.quadratic(nb.coupler) * q[i];
        visit(bits, e);
    }
}

}  // namespace detail

/// Exhaustive global minimum. States whose energy, recomputed from scratch,
/// lies within `tolerance` of the minimum count as ground states.
inline ExactMinima exact_minima(const IsingProblem& problem, std::size_t max_states = std::size_t{1} << 20,
                                double tolerance = 1e-9) {
    const std::size_t n = problem.num_qubits();
    if (n > kMaxEnumerationQubits) {
        throw std::invalid_argument("exact_minima: " + std::to_string(n) + " qubits exceeds the enumeration limit of " +
                                    std::to_string(kMaxEnumerationQubits) +
                                    "; use chain_ground_summary for chains or sample_noisy + correct");
    }
    // Gray-code energies drift by a few ulps per step; the window absorbs that
    // before exact re-evaluation decides.
    double scale = 1.0;
    for (double a : problem.linear()) scale += std::abs(a);
    for (double b : problem.quadratic()) scale += std::abs(b);
    const double window = 1e-9 * scale * static_cast<double>(n + 1) + tolerance;

    double approx_min = std::numeric_limits<double>::infinity();
    detail::gray_enumerate(problem, [&](std::uint64_t, double e) { approx_min = std::min(approx_min, e); });

    double exact_min = std::numeric_limits<double>::infinity();
    detail::gray_enumerate(problem, [&](std::uint64_t bits, double e) {
        if (e <= approx_min + window) exact_min = std::min(exact_min, energy(problem, detail::sample_from_bits(bits, n)));
    });

    ExactMinima out;
    out.min_energy = exact_min;
    std::vector<std::uint64_t> found;
    detail::gray_enumerate(problem, [&](std::uint64_t bits, double e) {
        if (e > approx_min + window) return;
        if (energy(problem, detail::sample_from_bits(bits, n)) <= exact_min + tolerance) {
            ++out.degeneracy;
            if (found.size() < max_states) {
                found.push_back(bits);
            } else {
                out.truncated = true;
            }
        }
    });
    std::sort(found.begin(), found.end());
    for (auto bits : found) out.ground_states.push_back(detail::sample_from_bits(bits, n));
    return out;
}

/// Exact description of the ground-state set of an open chain, as seen by a
/// sampler that is uniform over ground states. Counts are exact integers.
struct GroundStateSummary {
    double min_energy = 0.0;
    std::uint64_t degeneracy = 0;
    std::vector<std::uint64_t> plus_count_at;     ///< per position: ground states with q = +1 there
    std::vector<std::uint64_t> plus_total_count;  ///< index k: ground states with exactly k spins at +1
    std::uint64_t vote_plus_count = 0;            ///< ground states with 2k >= length
    std::vector<double> per_qubit_plus_probability;
    double pooled_plus_probability = 0.0;  ///< mean of per_qubit_plus_probability
    double vote_plus_probability = 0.0;
};

inline constexpr std::size_t kMaxChainLength = 62;

/// Dynamic program over an open chain with fields `linear` (length L) and
/// couplings `coupler` (length L-1, coupler[k] joins k and k+1).
///
/// The forward pass finds the minimal prefix energy for each (position,
/// spin) and marks which predecessor spins attain it. Tight transitions are
/// decided by the same floating expression that produced the minimum, so
/// the ground set is exact whenever ties are exact (e.g. dyadic
/// coefficients). Counting then runs forward (prefix counts per number of
/// +1 spins) and backward (completions to an optimal end).
inline GroundStateSummary chain_ground_summary(std::span<const double> linear, std::span<const double> coupler) {
    const std::size_t len = linear.size();
    if (len == 0) throw std::invalid_argument("chain length must be at least 1");
    if (len > kMaxChainLength) throw std::invalid_argument("chain longer than " + std::to_string(kMaxChainLength));
    if (coupler.size() + 1 != len) throw std::invalid_argument("chain needs length-1 couplers");

    constexpr int kSpin[2] = {-1, 1};  // slot 0: q = -1, slot 1: q = +1
    std::vector<std::array<double, 2>> best(len);
    std::vector<std::array<std::array<bool, 2>, 2>> tight(len);  // tight[i][s][t]: t at i-1 is optimal for s at i
    for (int s = 0; s < 2; ++s) best[0][s] = linear[0] * kSpin[s];
    for (std::size_t i = 1; i < len; ++i) {
        for (int s = 0; s < 2; ++s) {
            std::array<double, 2> via{};
            for (int t = 0; t < 2; ++t) via[t] = best[i - 1][t] + coupler[i - 1] * (kSpin[s] * kSpin[t]);
            const double m = std::min(via[0], via[1]);
            for (int t = 0; t < 2; ++t) tight[i][s][t] = (via[t] == m);
            best[i][s] = m + linear[i] * kSpin[s];
        }
    }
    GroundStateSummary out;
    out.min_energy = std::min(best[len - 1][0], best[len - 1][1]);

    // fwd[i][s][k]: optimal prefixes ending in spin s at i with k spins at +1.
    std::vector<std::array<std::vector<std::uint64_t>, 2>> fwd(len);
    for (std::size_t i = 0; i < len; ++i) {
        for (int s = 0; s < 2; ++s) fwd[i][s].assign(i + 2, 0);
    }
    fwd[0][0][0] = 1;
    fwd[0][1][1] = 1;
    for (std::size_t i = 1; i < len; ++i) {
        for (int s = 0; s < 2; ++s) {
            for (int t = 0; t < 2; ++t) {
                if (!tight[i][s][t]) continue;
                for (std::size_t k = 0; k <= i; ++k) fwd[i][s][k + s] += fwd[i - 1][t][k];
            }
        }
    }

    // bwd[i][s]: tight completions from (i, s) to an optimal end.
    std::vector<std::array<std::uint64_t, 2>> bwd(len);
    for (int s = 0; s < 2; ++s) bwd[len - 1][s] = (best[len - 1][s] == out.min_energy) ? 1 : 0;
    for (std::size_t i = len - 1; i-- > 0;) {
        for (int t = 0; t < 2; ++t) {
            std::uint64_t c = 0;
            for (int s = 0; s < 2; ++s) {
                if (tight[i + 1][s][t]) c += bwd[i + 1][s];
            }
            bwd[i][t] = c;
        }
    }

    out.plus_total_count.assign(len + 1, 0);
    for (int s = 0; s < 2; ++s) {
        if (!bwd[len - 1][s]) continue;
        for (std::size_t k = 0; k <= len; ++k) out.plus_total_count[k] += fwd[len - 1][s][k];
    }
    for (std::size_t k = 0; k <= len; ++k) {
        out.degeneracy += out.plus_total_count[k];
        if (2 * k >= len) out.vote_plus_count += out.plus_total_count[k];
    }
    out.plus_count_at.resize(len);
    out.per_qubit_plus_probability.resize(len);
    const double total = static_cast<double>(out.degeneracy);
    double pooled = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
        std::uint64_t prefixes = 0;
        for (auto c : fwd[i][1]) prefixes += c;
        out.plus_count_at[i] = prefixes * bwd[i][1];
        out.per_qubit_plus_probability[i] = static_cast<double>(out.plus_count_at[i]) / total;
        pooled += out.per_qubit_plus_probability[i];
    }
    out.pooled_plus_probability = pooled / static_cast<double>(len);
    out.vote_plus_probability = static_cast<double>(out.vote_plus_count) / total;
    return out;
}

/// Ground-state summary of a symmetric chain: every a_i = linear, every
/// b = coupler.
inline GroundStateSummary chain_ground_marginals(std::size_t length, double linear, double coupler) {
    if (length == 0) throw std::invalid_argument("chain length must be at least 1");
    const std::vector<double> a(length, linear);
    const std::vector<double> b(length - 1, coupler);
    return chain_ground_summary(a, b);
}

}  // namespace qcorrect
