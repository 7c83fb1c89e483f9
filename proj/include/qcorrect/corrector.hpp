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

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcorrect/model.hpp"
#include "qcorrect/util.hpp"

namespace qcorrect {

/// Per-qubit influence I_i = a_i + sum_j b_ij q_j for one sample.
struct InfluenceVector {
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
};

/// I_i for a single qubit, summed from scratch with compensation.
inline double influence_at(const IsingProblem& problem, const Sample& sample, std::size_t index) {
    detail::CompensatedSum s;
    s.add(problem.linear(index));
    for (const auto& nb : problem.topology().neighbors(index)) {
        s.add(problem.quadratic(nb.coupler) * sample[nb.index]);
    }
    return s.value();
}

inline InfluenceVector influences(const IsingProblem& problem, const Sample& sample) {
    check_sample(problem, sample);
    InfluenceVector out;
    out.values.resize(problem.num_qubits());
    for (std::size_t i = 0; i < problem.num_qubits(); ++i) out.values[i] = influence_at(problem, sample, i);
    return out;
}

/// Change in F from flipping qubit `index`: -2 I_i q_i. Negative improves.
inline double flip_gain(const InfluenceVector& influence, const Sample& sample, std::size_t index) {
    if (index >= influence.size() || index >= sample.size()) {
        throw std::out_of_range("flip_gain: index " + std::to_string(index) + " out of range");
    }
    return -2.0 * influence[index] * sample[index];
}

/// Same as above, addressed by qubit id.
inline double flip_gain(const ChimeraTopology& topo, const InfluenceVector& influence, const Sample& sample,
                        QubitId id) {
    const auto index = topo.index_of(id);
    if (!index) throw std::invalid_argument("flip_gain: qubit " + std::to_string(id) + " is not active");
    return flip_gain(influence, sample, *index);
}

/// True when no single flip lowers F, i.e. I_i q_i <= 0 for every qubit,
/// with each I_i recomputed from scratch.
inline bool is_local_minimum(const IsingProblem& problem, const Sample& sample) {
    check_sample(problem, sample);
    for (std::size_t i = 0; i < problem.num_qubits(); ++i) {
        if (influence_at(problem, sample, i) * sample[i] > 0.0) return false;
    }
    return true;
}

struct FlipRecord {
    QubitId qubit;
    double influence;  ///< I_i just before the flip
};

struct CorrectionReport {
    double initial_energy = 0.0;
    double final_energy = 0.0;
    std::size_t flip_count = 0;
    std::vector<FlipRecord> flips;  ///< empty unless CorrectionOptions::record_flips
    std::size_t sweeps = 0;         ///< full influence scans performed
    std::size_t hamming = 0;        ///< distance from the input sample
};

struct CorrectionOptions {
    bool record_flips = true;
    /// Re-evaluates F and every influence from scratch after each flip and
    /// throws std::logic_error if the incremental values disagree by > 1e-9.
    bool verify = false;
};

struct Correction {
    Sample sample;
    CorrectionReport report;
};

namespace detail {

// Below this margin an incrementally maintained I_i q_i is recomputed from
// scratch before its sign is trusted.
inline constexpr double kRefreshMargin = 1e-9;
inline constexpr double kVerifyTolerance = 1e-9;

}  // namespace detail

/// Greedy single-flip descent to a local minimum of F. Each step flips the
/// qubit with the largest positive I_i q_i (lowest index on ties), which
/// lowers F by 2|I_i|; the loop ends when I_i q_i <= 0 everywhere. After a
/// flip only the neighbors' influences change, by 2 b_ij q_i(new).
inline Correction correct(const IsingProblem& problem, Sample sample, const CorrectionOptions& options = {}) {
    check_sample(problem, sample);
    const auto& topo = problem.topology();
    const std::size_t n = problem.num_qubits();
    const Sample input = sample;

    Correction result;
    auto& report = result.report;
    report.initial_energy = energy(problem, sample);

    std::vector<double> infl = influences(problem, sample).values;
    double running = report.initial_energy;

    while (true) {
        ++report.sweeps;
        std::size_t best = n;
        double best_score = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double score = infl[i] * sample[i];
            if (score > best_score) {
                best_score = score;
                best = i;
            }
        }
        if (best == n) {
            // Confirm near-zero entries exactly before declaring a minimum.
            bool changed = false;
            for (std::size_t i = 0; i < n; ++i) {
                if (std::abs(infl[i]) <= detail::kRefreshMargin) {
                    const double exact = influence_at(problem, sample, i);
                    if (exact != infl[i]) {
                        infl[i] = exact;
                        changed = changed || exact * sample[i] > 0.0;
                    }
                }
            }
            if (!changed) break;
            continue;
        }
        if (best_score <= detail::kRefreshMargin) {
            const double exact = influence_at(problem, sample, best);
            if (exact != infl[best]) {
                infl[best] = exact;
                continue;
            }
        }

        const double i_best = infl[best];
        sample.flip(best);
        const double s_new = sample[best];
        for (const auto& nb : topo.neighbors(best)) {
            infl[nb.index] += 2.0 * problem.quadratic(nb.coupler) * s_new;
        }
        ++report.flip_count;
        if (options.record_flips) report.flips.push_back({topo.qubit(best), i_best});

        if (options.verify) {
            const double now = energy(problem, sample);
            const double drop = running - now;
            if (std::abs(drop - 2.0 * std::abs(i_best)) > detail::kVerifyTolerance) {
                throw std::logic_error("flip of qubit " + std::to_string(topo.qubit(best)) + " lowered F by " +
                                       std::to_string(drop) + ", expected " + std::to_string(2.0 * std::abs(i_best)));
            }
            // Strict descent is carried by the flip's own I_i q_i > 0; F itself can
            // round to the same double when |I_i| is tiny.
            if (!(i_best * -s_new > 0.0) || now > running) {
                throw std::logic_error("flip of qubit " + std::to_string(topo.qubit(best)) + " did not descend");
            }
            for (std::size_t i = 0; i < n; ++i) {
                if (std::abs(infl[i] - influence_at(problem, sample, i)) > detail::kVerifyTolerance) {
                    throw std::logic_error("incremental influence of qubit " + std::to_string(topo.qubit(i)) +
                                           " drifted from recomputed value");
                }
            }
            running = now;
        }
    }

    report.final_energy = energy(problem, sample);
    report.hamming = hamming_distance(input, sample);
    result.sample = std::move(sample);
    return result;
}

struct BatchCorrection {
    std::vector<Sample> samples;
    std::vector<CorrectionReport> reports;
};

/// correct() over every sample. Output order matches input order and does
/// not depend on `threads` (0 = hardware concurrency).
inline BatchCorrection correct_batch(const IsingProblem& problem, std::span<const Sample> samples,
                                     const CorrectionOptions& options = {}, unsigned threads = 1) {
    for (const auto& s : samples) check_sample(problem, s);
    BatchCorrection out;
    out.samples.resize(samples.size());
    out.reports.resize(samples.size());
    parallel_for(samples.size(), threads, [&](std::size_t i) {
        auto c = correct(problem, samples[i], options);
        out.samples[i] = std::move(c.sample);
        out.reports[i] = std::move(c.report);
    });
    return out;
}

}  // namespace qcorrect
