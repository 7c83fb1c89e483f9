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
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcorrect/corrector.hpp"
#include "qcorrect/model.hpp"
#include "qcorrect/samplers.hpp"
#include "qcorrect/topology.hpp"
#include "qcorrect/util.hpp"

namespace qcorrect {

inline constexpr std::size_t kDefaultBins = 60;

/// Uncorrected vs corrected energy histogram for one resolution.
struct HistogramResult {
    std::vector<double> bin_edges;  ///< bins + 1 edges, empty when num_samples == 0
    std::vector<std::size_t> uncorrected_counts;
    std::vector<std::size_t> corrected_counts;
    Resolution resolution = Resolution::infinite();
    std::size_t num_samples = 0;

    std::vector<double> uncorrected_energies;
    std::vector<double> corrected_energies;
    std::vector<std::size_t> hamming;  ///< per sample, corrected vs uncorrected
    bool all_certified = true;         ///< every corrected sample re-checked as a local minimum
};

inline double mean(std::span<const double> xs) {
    if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
    detail::CompensatedSum s;
    for (double x : xs) s.add(x);
    return s.value() / static_cast<double>(xs.size());
}

/// Shared equal-width bins over the union of both series. A degenerate
/// range is widened to [x - 0.5, x + 0.5].
inline void fill_histogram(HistogramResult& h, std::size_t bins) {
    h.bin_edges.clear();
    h.uncorrected_counts.clear();
    h.corrected_counts.clear();
    if (h.uncorrected_energies.empty() && h.corrected_energies.empty()) return;
    if (bins == 0) throw std::invalid_argument("histogram needs at least one bin");

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto* series : {&h.uncorrected_energies, &h.corrected_energies}) {
        for (double e : *series) {
            lo = std::min(lo, e);
            hi = std::max(hi, e);
        }
    }
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double width = (hi - lo) / static_cast<double>(bins);
    h.bin_edges.resize(bins + 1);
    for (std::size_t k = 0; k < bins; ++k) h.bin_edges[k] = lo + width * static_cast<double>(k);
    h.bin_edges[bins] = hi;

    const auto bin_of = [&](double e) {
        const auto k = static_cast<std::size_t>(std::max(0.0, std::floor((e - lo) / width)));
        return std::min(k, bins - 1);
    };
    h.uncorrected_counts.assign(bins, 0);
    h.corrected_counts.assign(bins, 0);
    for (double e : h.uncorrected_energies) ++h.uncorrected_counts[bin_of(e)];
    for (double e : h.corrected_energies) ++h.corrected_counts[bin_of(e)];
}

struct ExperimentOptions {
    std::size_t bins = kDefaultBins;
    unsigned threads = 1;
};

/// For each resolution: quantize `base`, draw num_samples noisy samples,
/// correct them, and histogram both energy series. Resolution k samples with
/// the stream derived from (config.seed, k).
inline std::vector<HistogramResult> run_histogram_experiment(const IsingProblem& base,
                                                             std::span<const Resolution> resolutions,
                                                             std::size_t num_samples, AnnealerConfig config,
                                                             const ExperimentOptions& options = {}) {
    config.validate();
    std::vector<HistogramResult> results;
    for (std::size_t r = 0; r < resolutions.size(); ++r) {
        const IsingProblem problem = quantize(base, resolutions[r]);
        AnnealerConfig cfg = config;
        cfg.num_samples = num_samples;
        cfg.seed = detail::derive_seed(config.seed, r);
        const auto raw = sample_noisy(problem, cfg, options.threads);
        const auto fixed = correct_batch(problem, raw, {.record_flips = false}, options.threads);

        HistogramResult h;
        h.resolution = resolutions[r];
        h.num_samples = num_samples;
        h.uncorrected_energies.resize(num_samples);
        h.corrected_energies.resize(num_samples);
        h.hamming.resize(num_samples);
        std::vector<char> ok(num_samples, 1);
        parallel_for(num_samples, options.threads, [&](std::size_t i) {
            h.uncorrected_energies[i] = fixed.reports[i].initial_energy;
            h.corrected_energies[i] = fixed.reports[i].final_energy;
            h.hamming[i] = fixed.reports[i].hamming;
            ok[i] = is_local_minimum(problem, fixed.samples[i]) &&
                    fixed.reports[i].final_energy <= fixed.reports[i].initial_energy &&
                    fixed.reports[i].hamming <= fixed.reports[i].flip_count;
        });
        h.all_certified = std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; });
        fill_histogram(h, options.bins);
        results.push_back(std::move(h));
    }
    return results;
}

/// Random base problem on `topo` (seeded by `seed`), then as above.
inline std::vector<HistogramResult> run_histogram_experiment(const ChimeraTopology& topo, std::uint64_t seed,
                                                             std::span<const Resolution> resolutions,
                                                             std::size_t num_samples, const AnnealerConfig& config,
                                                             const ExperimentOptions& options = {}) {
    return run_histogram_experiment(random_problem(topo, seed), resolutions, num_samples, config, options);
}

enum class SweepAxis { CouplerValue, QubitValue };  // x axis: C_c or C_q
enum class Source { Uncorrected, Corrected, Theoretical };
enum class Metric { PerQubit, Vote };

inline constexpr std::array<Source, 3> kSources = {Source::Uncorrected, Source::Corrected, Source::Theoretical};
inline constexpr std::array<Metric, 2> kMetrics = {Metric::PerQubit, Metric::Vote};

inline const char* to_string(Source s) {
    switch (s) {
        case Source::Uncorrected: return "raw";
        case Source::Corrected: return "corr";
        case Source::Theoretical: return "theo";
    }
    return "?";
}

inline const char* to_string(Metric m) { return m == Metric::PerQubit ? "qubit" : "vote"; }
inline const char* to_string(SweepAxis a) { return a == SweepAxis::CouplerValue ? "cc" : "cq"; }

/// P(q=1) grids for a family of symmetric-chain problems.
struct SweepResult {
    SweepAxis axis = SweepAxis::CouplerValue;
    std::size_t length = 0;
    std::size_t num_samples = 0;
    std::vector<double> x_values;
    std::vector<double> curve_params;
    /// [source][metric], each curve-major: index curve * x_values.size() + x.
    std::array<std::array<std::vector<double>, 2>, 3> probabilities;
    bool all_certified = true;

    const std::vector<double>& grid(Source s, Metric m) const {
        return probabilities[static_cast<std::size_t>(s)][static_cast<std::size_t>(m)];
    }
    std::vector<double>& grid(Source s, Metric m) {
        return probabilities[static_cast<std::size_t>(s)][static_cast<std::size_t>(m)];
    }
    double at(Source s, Metric m, std::size_t curve, std::size_t x) const {
        return grid(s, m)[curve * x_values.size() + x];
    }
};

/// `n` evenly spaced points over [lo, hi]; one point gives the midpoint.
inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n == 0) return {};
    if (n == 1) return {0.5 * (lo + hi)};
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    out.back() = hi;
    return out;
}

/// Path topology of `length` qubits cut from a single row of Chimera cells.
inline std::shared_ptr<const ChimeraTopology> chain_topology(std::size_t length) {
    const auto host = build_chimera(1, length / 4 + 1, 4);
    return std::make_shared<const ChimeraTopology>(chain_subgraph(host, length));
}

/// Fraction of (sample, qubit) pairs at +1, and fraction of samples whose
/// +1 count is at least half the chain.
inline std::pair<double, double> plus_probabilities(std::span<const Sample> samples) {
    if (samples.empty()) throw std::invalid_argument("plus_probabilities: no samples");
    std::size_t plus = 0;
    std::size_t votes = 0;
    std::size_t spins = 0;
    for (const auto& s : samples) {
        const std::size_t k = s.count_plus();
        plus += k;
        spins += s.size();
        votes += (2 * k >= s.size());
    }
    return {static_cast<double>(plus) / static_cast<double>(spins),
            static_cast<double>(votes) / static_cast<double>(samples.size())};
}

/// Every (curve, x) cell builds the symmetric chain problem, samples it with
/// the stream derived from (config.seed, curve, x), corrects the samples and
/// evaluates the exact ground-state summary. Cells run in parallel without
/// affecting the output.
inline SweepResult run_chain_sweep(std::size_t length, SweepAxis axis, std::span<const double> x_grid,
                                   std::span<const double> curve_values, std::size_t num_samples,
                                   AnnealerConfig config, unsigned threads = 1) {
    config.validate();
    if (length == 0) throw std::invalid_argument("chain length must be at least 1");
    if (num_samples == 0) throw std::invalid_argument("chain sweep needs at least one sample per cell");
    const double x_bound = axis == SweepAxis::CouplerValue ? kCouplerBound : kLinearBound;
    const double c_bound = axis == SweepAxis::CouplerValue ? kLinearBound : kCouplerBound;
    const char* x_name = axis == SweepAxis::CouplerValue ? "C_c" : "C_q";
    const char* c_name = axis == SweepAxis::CouplerValue ? "C_q" : "C_c";
    for (double x : x_grid) {
        if (!(std::abs(x) <= x_bound)) {
            throw std::out_of_range(std::string(x_name) + " value " + std::to_string(x) + " outside [-" +
                                    std::to_string(static_cast<int>(x_bound)) + ", " +
                                    std::to_string(static_cast<int>(x_bound)) + "]");
        }
    }
    for (double c : curve_values) {
        if (!(std::abs(c) <= c_bound)) {
            throw std::out_of_range(std::string(c_name) + " value " + std::to_string(c) + " outside [-" +
                                    std::to_string(static_cast<int>(c_bound)) + ", " +
                                    std::to_string(static_cast<int>(c_bound)) + "]");
        }
    }

    SweepResult out;
    out.axis = axis;
    out.length = length;
    out.num_samples = num_samples;
    out.x_values.assign(x_grid.begin(), x_grid.end());
    out.curve_params.assign(curve_values.begin(), curve_values.end());
    const std::size_t nx = x_grid.size();
    const std::size_t cells = curve_values.size() * nx;
    for (auto& per_source : out.probabilities) {
        for (auto& g : per_source) g.assign(cells, 0.0);
    }

    const auto topo = chain_topology(length);
    std::vector<char> ok(cells, 1);
    parallel_for(cells, threads, [&](std::size_t cell) {
        const std::size_t c = cell / nx;
        const std::size_t x = cell % nx;
        const double cq = axis == SweepAxis::CouplerValue ? curve_values[c] : x_grid[x];
        const double cc = axis == SweepAxis::CouplerValue ? x_grid[x] : curve_values[c];
        const IsingProblem problem = uniform_problem(topo, cq, cc);

        AnnealerConfig cfg = config;
        cfg.num_samples = num_samples;
        cfg.seed = detail::derive_seed(config.seed, c, x);
        const auto raw = sample_noisy(problem, cfg);
        const auto fixed = correct_batch(problem, raw, {.record_flips = false});
        for (const auto& s : fixed.samples) {
            if (!is_local_minimum(problem, s)) ok[cell] = 0;
        }
        const auto [raw_q, raw_v] = plus_probabilities(raw);
        const auto [cor_q, cor_v] = plus_probabilities(fixed.samples);
        const auto theo = chain_ground_marginals(length, cq, cc);

        out.grid(Source::Uncorrected, Metric::PerQubit)[cell] = raw_q;
        out.grid(Source::Uncorrected, Metric::Vote)[cell] = raw_v;
        out.grid(Source::Corrected, Metric::PerQubit)[cell] = cor_q;
        out.grid(Source::Corrected, Metric::Vote)[cell] = cor_v;
        out.grid(Source::Theoretical, Metric::PerQubit)[cell] = theo.pooled_plus_probability;
        out.grid(Source::Theoretical, Metric::Vote)[cell] = theo.vote_plus_probability;
    });
    out.all_certified = std::all_of(ok.begin(), ok.end(), [](char v) { return v != 0; });
    return out;
}

/// Mean absolute difference between two sources' grids.
inline double curve_distance(const SweepResult& result, Source a, Source b, Metric metric = Metric::PerQubit) {
    const auto& ga = result.grid(a, metric);
    const auto& gb = result.grid(b, metric);
    if (ga.empty()) return 0.0;
    detail::CompensatedSum s;
    for (std::size_t i = 0; i < ga.size(); ++i) s.add(std::abs(ga[i] - gb[i]));
    return s.value() / static_cast<double>(ga.size());
}

inline void write_histogram_csv(std::ostream& out, const HistogramResult& h) {
    out << "bin_low,bin_high,uncorrected,corrected\n";
    for (std::size_t k = 0; k < h.uncorrected_counts.size(); ++k) {
        out << detail::format_real(h.bin_edges[k]) << ',' << detail::format_real(h.bin_edges[k + 1]) << ','
            << h.uncorrected_counts[k] << ',' << h.corrected_counts[k] << '\n';
    }
}

inline void write_sweep_csv(std::ostream& out, const SweepResult& r) {
    out << "curve_param,x,src,metric,p\n";
    for (std::size_t c = 0; c < r.curve_params.size(); ++c) {
        for (std::size_t x = 0; x < r.x_values.size(); ++x) {
            for (Source s : kSources) {
                for (Metric m : kMetrics) {
                    out << detail::format_real(r.curve_params[c]) << ',' << detail::format_real(r.x_values[x]) << ','
                        << to_string(s) << ',' << to_string(m) << ',' << detail::format_real(r.at(s, m, c, x))
                        << '\n';
                }
            }
        }
    }
}

}  // namespace qcorrect
