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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qcorrect/qcorrect.hpp"

namespace qcorrect::app {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kFailure = 2,
    kCertificationFailed = 3,
};

/// Record of one command invocation, written next to experiment outputs.
struct RunManifest {
    std::string command;
    std::map<std::string, std::string> parameters;
    std::uint64_t seed = kDefaultSeed;
    std::string tool_version = kToolVersion;
    std::vector<std::string> output_paths;

    nlohmann::json to_json() const {
        return {{"command", command},           {"parameters", parameters},
                {"seed", seed},                 {"tool_version", tool_version},
                {"output_paths", output_paths}};
    }
};

namespace detail {

inline std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return in;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

inline IsingProblem load_problem(const std::string& path) {
    auto in = open_in(path);
    try {
        return read_problem(in);
    } catch (const ParseError& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

inline unsigned resolve_threads(unsigned flag) {
    if (flag != 0) return flag;
    if (const char* env = std::getenv("QCORRECT_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
    }
    return default_threads();
}

struct AnnealFlags {
    std::size_t sweeps = 100;
    double beta_initial = 0.1;
    double beta_final = 3.0;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--sweeps", sweeps, "Metropolis sweeps per sample")->capture_default_str();
        cmd->add_option("--beta-initial", beta_initial, "initial inverse temperature")->capture_default_str();
        cmd->add_option("--beta-final", beta_final, "final inverse temperature")->capture_default_str();
    }

    AnnealerConfig config(std::uint64_t seed, std::size_t num_samples) const {
        AnnealerConfig c;
        c.sweeps = sweeps;
        c.beta_initial = beta_initial;
        c.beta_final = beta_final;
        c.seed = seed;
        c.num_samples = num_samples;
        c.validate();
        return c;
    }

    void record(RunManifest& m) const {
        m.parameters["sweeps"] = std::to_string(sweeps);
        m.parameters["beta_initial"] = qcorrect::detail::format_real(beta_initial);
        m.parameters["beta_final"] = qcorrect::detail::format_real(beta_final);
    }
};

inline std::vector<Resolution> parse_resolutions(const std::string& list) {
    std::vector<Resolution> out;
    std::stringstream ss(list);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        const auto t = qcorrect::detail::trim(tok);
        if (!t.empty()) out.push_back(Resolution::parse(std::string(t)));
    }
    if (out.empty()) throw std::invalid_argument("no resolutions given");
    return out;
}

inline void write_manifest(const RunManifest& m, const std::filesystem::path& dir) {
    auto out = open_out((dir / "manifest.json").string());
    out << m.to_json().dump(2) << '\n';
}

}  // namespace detail

/// Runs the command line `args` (without the program name).
inline int run(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Greedy local-minimum correction of annealer samples", "qcorrect"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    // generate
    auto* gen = app.add_subcommand("generate", "write a random problem on a (masked) Chimera graph");
    std::size_t rows = 4, cols = 4, shore = 4;
    std::string mask_path, out_path, problem_path, samples_path, report_path;
    std::uint64_t seed = kDefaultSeed;
    std::string resolution = "inf";
    unsigned threads = 0;
    gen->add_option("--rows", rows)->capture_default_str();
    gen->add_option("--cols", cols)->capture_default_str();
    gen->add_option("--shore", shore)->capture_default_str();
    gen->add_option("--mask", mask_path, "mask file of dead qubits/couplers");
    gen->add_option("--seed", seed)->capture_default_str();
    gen->add_option("--resolution", resolution, "coefficient resolution R or 'inf'")->capture_default_str();
    gen->add_option("--out", out_path)->required();

    // mask
    auto* mask_cmd = app.add_subcommand("mask", "write a random mask leaving the given element counts");
    std::size_t qubits_left = 1097, couplers_left = 3060;
    std::size_t mrows = 12, mcols = 12, mshore = 4;
    mask_cmd->add_option("--rows", mrows)->capture_default_str();
    mask_cmd->add_option("--cols", mcols)->capture_default_str();
    mask_cmd->add_option("--shore", mshore)->capture_default_str();
    mask_cmd->add_option("--qubits", qubits_left, "active qubits to keep")->capture_default_str();
    mask_cmd->add_option("--couplers", couplers_left, "active couplers to keep")->capture_default_str();
    mask_cmd->add_option("--seed", seed)->capture_default_str();
    mask_cmd->add_option("--out", out_path)->required();

    // sample
    auto* sample_cmd = app.add_subcommand("sample", "draw noisy annealer samples");
    detail::AnnealFlags anneal;
    std::size_t num_samples = 1000;
    sample_cmd->add_option("--problem", problem_path)->required();
    sample_cmd->add_option("--out", out_path)->required();
    sample_cmd->add_option("--seed", seed)->capture_default_str();
    sample_cmd->add_option("--num-samples", num_samples)->capture_default_str();
    sample_cmd->add_option("--threads", threads, "worker cap (0: QCORRECT_THREADS or hardware)");
    anneal.add_to(sample_cmd);

    // correct
    auto* correct_cmd = app.add_subcommand("correct", "drive every sample to a local minimum");
    correct_cmd->add_option("--problem", problem_path)->required();
    correct_cmd->add_option("--samples", samples_path)->required();
    correct_cmd->add_option("--out", out_path)->required();
    correct_cmd->add_option("--report", report_path, "per-sample CSV: initial_F,final_F,flips,hamming");
    correct_cmd->add_option("--threads", threads);

    // experiment
    auto* exp = app.add_subcommand("experiment", "reproduce the histogram and chain-sweep studies");
    exp->require_subcommand(1);
    auto* hist = exp->add_subcommand("histogram", "energy histograms, uncorrected vs corrected");
    std::string resolutions = "inf,100,32";
    std::size_t bins = kDefaultBins;
    std::size_t hrows = 12, hcols = 12, hshore = 4;
    hist->add_option("--problem", problem_path, "problem file (default: random coefficients)");
    hist->add_option("--rows", hrows)->capture_default_str();
    hist->add_option("--cols", hcols)->capture_default_str();
    hist->add_option("--shore", hshore)->capture_default_str();
    hist->add_option("--mask", mask_path);
    hist->add_option("--seed", seed)->capture_default_str();
    hist->add_option("--resolutions", resolutions)->capture_default_str();
    hist->add_option("--num-samples", num_samples)->capture_default_str();
    hist->add_option("--bins", bins)->capture_default_str();
    hist->add_option("--out", out_path, "output directory")->required();
    hist->add_option("--threads", threads);
    anneal.add_to(hist);

    auto* sweep = exp->add_subcommand("chain-sweep", "P(q=1) of symmetric chains vs coefficient values");
    std::size_t length = 12, x_points = 129, curves = 17;
    std::string axis = "cc";
    sweep->add_option("--length", length)->capture_default_str();
    sweep->add_option("--axis", axis)->check(CLI::IsMember({"cc", "cq"}))->capture_default_str();
    sweep->add_option("--x-points", x_points)->capture_default_str();
    sweep->add_option("--curves", curves)->capture_default_str();
    sweep->add_option("--seed", seed)->capture_default_str();
    sweep->add_option("--num-samples", num_samples)->capture_default_str();
    sweep->add_option("--out", out_path, "output directory")->required();
    sweep->add_option("--threads", threads);
    anneal.add_to(sweep);

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        threads = detail::resolve_threads(threads);

        if (*gen) {
            auto topo = build_chimera(rows, cols, shore);
            if (!mask_path.empty()) {
                auto in = detail::open_in(mask_path);
                topo = apply_mask(topo, read_mask(in));
            }
            const auto problem =
                    quantize(random_problem(std::make_shared<const ChimeraTopology>(std::move(topo)), seed),
                             Resolution::parse(resolution));
            auto f = detail::open_out(out_path);
            write_problem(f, problem);
            out << problem.num_qubits() << " qubits, " << problem.num_couplers() << " couplers\n";
            return kOk;
        }

        if (*mask_cmd) {
            const auto mask = synthetic_flux_mask({mrows, mcols, mshore}, qubits_left, couplers_left, seed);
            auto f = detail::open_out(out_path);
            write_mask(f, mask);
            out << mask.dead_qubits.size() << " dead qubits, " << mask.dead_couplers.size()
                << " extra dead couplers\n";
            return kOk;
        }

        if (*sample_cmd) {
            const auto problem = detail::load_problem(problem_path);
            const auto samples = sample_noisy(problem, anneal.config(seed, num_samples), threads);
            auto f = detail::open_out(out_path);
            write_samples(f, samples);
            if (samples.empty()) {
                out << "0 samples\n";
            } else {
                std::vector<double> e(samples.size());
                for (std::size_t i = 0; i < samples.size(); ++i) e[i] = energy(problem, samples[i]);
                out << samples.size() << " samples  F min " << qcorrect::detail::format_real(*std::min_element(e.begin(), e.end()))
                    << "  mean " << qcorrect::detail::format_real(mean(e)) << "  max "
                    << qcorrect::detail::format_real(*std::max_element(e.begin(), e.end())) << '\n';
            }
            return kOk;
        }

        if (*correct_cmd) {
            const auto problem = detail::load_problem(problem_path);
            std::vector<Sample> samples;
            {
                auto in = detail::open_in(samples_path);
                try {
                    samples = read_samples(in, problem.num_qubits());
                } catch (const ParseError& e) {
                    throw std::runtime_error(samples_path + ": " + e.what());
                }
            }
            const auto fixed = correct_batch(problem, samples, {.record_flips = false}, threads);
            bool certified = true;
            for (const auto& s : fixed.samples) certified = certified && is_local_minimum(problem, s);
            {
                auto f = detail::open_out(out_path);
                write_samples(f, fixed.samples);
            }
            if (!report_path.empty()) {
                auto f = detail::open_out(report_path);
                f << "initial_F,final_F,flips,hamming\n";
                for (const auto& r : fixed.reports) {
                    f << qcorrect::detail::format_real(r.initial_energy) << ','
                      << qcorrect::detail::format_real(r.final_energy) << ',' << r.flip_count << ',' << r.hamming << '\n';
                }
            }
            if (!certified) {
                err << "error: a corrected sample failed the local-minimum re-check\n";
                return kCertificationFailed;
            }
            return kOk;
        }

        if (*hist) {
            const std::filesystem::path dir(out_path);
            std::filesystem::create_directories(dir);
            const auto res = detail::parse_resolutions(resolutions);
            RunManifest m;
            m.command = "experiment histogram";
            m.seed = seed;
            m.parameters["resolutions"] = resolutions;
            m.parameters["num_samples"] = std::to_string(num_samples);
            m.parameters["bins"] = std::to_string(bins);
            anneal.record(m);

            std::optional<IsingProblem> base;
            if (!problem_path.empty()) {
                base = detail::load_problem(problem_path);
                m.parameters["problem"] = problem_path;
            } else {
                auto topo = build_chimera(hrows, hcols, hshore);
                if (!mask_path.empty()) {
                    auto in = detail::open_in(mask_path);
                    topo = apply_mask(topo, read_mask(in));
                    m.parameters["mask"] = mask_path;
                }
                m.parameters["rows"] = std::to_string(hrows);
                m.parameters["cols"] = std::to_string(hcols);
                m.parameters["shore"] = std::to_string(hshore);
                base = random_problem(std::make_shared<const ChimeraTopology>(std::move(topo)), seed);
            }
            const auto results =
                    run_histogram_experiment(*base, res, num_samples, anneal.config(seed, num_samples),
                                             {.bins = bins, .threads = threads});
            bool certified = true;
            for (const auto& h : results) {
                const auto path = dir / ("histogram_R" + h.resolution.to_string() + ".csv");
                auto f = detail::open_out(path.string());
                write_histogram_csv(f, h);
                m.output_paths.push_back(path.string());
                certified = certified && h.all_certified;
                out << "R=" << h.resolution.to_string() << "  mean F uncorrected "
                    << qcorrect::detail::format_real(mean(h.uncorrected_energies)) << "  corrected "
                    << qcorrect::detail::format_real(mean(h.corrected_energies)) << '\n';
            }
            m.output_paths.push_back((dir / "manifest.json").string());
            detail::write_manifest(m, dir);
            if (!certified) {
                err << "error: a corrected sample failed the local-minimum re-check\n";
                return kCertificationFailed;
            }
            return kOk;
        }

        if (*sweep) {
            const std::filesystem::path dir(out_path);
            const auto ax = axis == "cc" ? SweepAxis::CouplerValue : SweepAxis::QubitValue;
            const double x_bound = ax == SweepAxis::CouplerValue ? kCouplerBound : kLinearBound;
            const double c_bound = ax == SweepAxis::CouplerValue ? kLinearBound : kCouplerBound;
            if (x_points == 0 || curves == 0) throw std::invalid_argument("--x-points and --curves must be positive");
            const auto xs = linspace(-x_bound, x_bound, x_points);
            const auto cs = linspace(-c_bound, c_bound, curves);
            const auto result = run_chain_sweep(length, ax, xs, cs, num_samples, anneal.config(seed, num_samples), threads);

            std::filesystem::create_directories(dir);
            RunManifest m;
            m.command = "experiment chain-sweep";
            m.seed = seed;
            m.parameters["length"] = std::to_string(length);
            m.parameters["axis"] = axis;
            m.parameters["x_points"] = std::to_string(x_points);
            m.parameters["curves"] = std::to_string(curves);
            m.parameters["num_samples"] = std::to_string(num_samples);
            anneal.record(m);
            const auto path = dir / "sweep.csv";
            {
                auto f = detail::open_out(path.string());
                write_sweep_csv(f, result);
            }
            m.output_paths = {path.string(), (dir / "manifest.json").string()};
            detail::write_manifest(m, dir);
            for (Metric metric : kMetrics) {
                out << to_string(metric) << "  d(raw,theo) "
                    << qcorrect::detail::format_real(curve_distance(result, Source::Uncorrected, Source::Theoretical, metric))
                    << "  d(corr,theo) "
                    << qcorrect::detail::format_real(curve_distance(result, Source::Corrected, Source::Theoretical, metric))
                    << '\n';
            }
            if (!result.all_certified) {
                err << "error: a corrected sample failed the local-minimum re-check\n";
                return kCertificationFailed;
            }
            return kOk;
        }
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kUsage;
}

}  // namespace qcorrect::app
