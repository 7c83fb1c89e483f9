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

#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qcorrect/topology.hpp"
#include "qcorrect/util.hpp"

namespace qcorrect {

inline constexpr double kLinearBound = 2.0;
inline constexpr double kCouplerBound = 1.0;

using Spin = std::int8_t;

/// One spin assignment, laid out by active index. Entries are exactly -1 or +1.
class Sample {
  public:
    Sample() = default;

    explicit Sample(std::vector<Spin> spins) : spins_(std::move(spins)) {
        for (std::size_t i = 0; i < spins_.size(); ++i) {
            if (spins_[i] != 1 && spins_[i] != -1) {
                throw std::invalid_argument("spin " + std::to_string(i) + " is " + std::to_string(spins_[i]) +
                                            ", expected -1 or +1");
            }
        }
    }

    static Sample filled(std::size_t n, Spin s) { return Sample(std::vector<Spin>(n, s)); }

    std::size_t size() const { return spins_.size(); }
    Spin operator[](std::size_t i) const { return spins_[i]; }
    void flip(std::size_t i) { spins_[i] = static_cast<Spin>(-spins_[i]); }
    std::span<const Spin> spins() const { return spins_; }

    std::size_t count_plus() const {
        std::size_t k = 0;
        for (Spin s : spins_) k += (s > 0);
        return k;
    }

    friend bool operator==(const Sample&, const Sample&) = default;

  private:
    std::vector<Spin> spins_;
};

inline std::size_t hamming_distance(const Sample& x, const Sample& y) {
    if (x.size() != y.size()) throw std::invalid_argument("hamming_distance: length mismatch");
    std::size_t d = 0;
    for (std::size_t i = 0; i < x.size(); ++i) d += (x[i] != y[i]);
    return d;
}

/// Coefficient lattice resolution: finite R >= 1 restricts values to
/// {f/R : f = -R..R}; infinite leaves them continuous.
class Resolution {
  public:
    static Resolution infinite() { return Resolution(); }
    static Resolution finite(std::int64_t r) {
        if (r < 1) throw std::invalid_argument("resolution must be >= 1, got " + std::to_string(r));
        Resolution res;
        res.value_ = r;
        return res;
    }

    /// Accepts a positive integer or `inf`.
    static Resolution parse(const std::string& token) {
        if (token == "inf" || token == "INF" || token == "Inf") return infinite();
        std::size_t used = 0;
        long long v = 0;
        try {
            v = std::stoll(token, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad resolution '" + token + "'");
        }
        if (used != token.size()) throw std::invalid_argument("bad resolution '" + token + "'");
        return finite(v);
    }

    bool is_infinite() const { return !value_.has_value(); }
    std::int64_t value() const {
        if (!value_) throw std::logic_error("infinite resolution has no value");
        return *value_;
    }
    std::string to_string() const { return value_ ? std::to_string(*value_) : "inf"; }

    friend bool operator==(const Resolution&, const Resolution&) = default;

  private:
    Resolution() = default;
    std::optional<std::int64_t> value_;
};

/// Ising coefficients bound to a topology: a (per active qubit, in [-2, 2])
/// and b (per coupler, in [-1, 1]).
class IsingProblem {
  public:
    IsingProblem(std::shared_ptr<const ChimeraTopology> topology, std::vector<double> linear,
                 std::vector<double> quadratic)
            : topology_(std::move(topology)), linear_(std::move(linear)), quadratic_(std::move(quadratic)) {
        if (!topology_) throw std::invalid_argument("IsingProblem needs a topology");
        if (linear_.size() != topology_->num_qubits()) {
            throw std::invalid_argument("expected " + std::to_string(topology_->num_qubits()) +
                                        " qubit coefficients, got " + std::to_string(linear_.size()));
        }
        if (quadratic_.size() != topology_->num_couplers()) {
            throw std::invalid_argument("expected " + std::to_string(topology_->num_couplers()) +
                                        " coupler coefficients, got " + std::to_string(quadratic_.size()));
        }
        for (std::size_t i = 0; i < linear_.size(); ++i) {
            if (!(std::abs(linear_[i]) <= kLinearBound)) {
                throw std::out_of_range("qubit " + std::to_string(topology_->qubit(i)) + " coefficient " +
                                        std::to_string(linear_[i]) + " outside [-2, 2]");
            }
        }
        for (std::size_t k = 0; k < quadratic_.size(); ++k) {
            if (!(std::abs(quadratic_[k]) <= kCouplerBound)) {
                const auto c = topology_->couplers()[k];
                throw std::out_of_range("coupler (" + std::to_string(c.u) + "," + std::to_string(c.v) +
                                        ") coefficient " + std::to_string(quadratic_[k]) + " outside [-1, 1]");
            }
        }
    }

    const ChimeraTopology& topology() const { return *topology_; }
    const std::shared_ptr<const ChimeraTopology>& topology_ptr() const { return topology_; }
    std::size_t num_qubits() const { return linear_.size(); }
    std::size_t num_couplers() const { return quadratic_.size(); }

    std::span<const double> linear() const { return linear_; }
    std::span<const double> quadratic() const { return quadratic_; }
    double linear(std::size_t i) const { return linear_[i]; }
    double quadratic(std::size_t k) const { return quadratic_[k]; }

    friend bool operator==(const IsingProblem& x, const IsingProblem& y) {
        return *x.topology_ == *y.topology_ && x.linear_ == y.linear_ && x.quadratic_ == y.quadratic_;
    }

  private:
    std::shared_ptr<const ChimeraTopology> topology_;
    std::vector<double> linear_;
    std::vector<double> quadratic_;
};

inline void check_sample(const IsingProblem& problem, const Sample& sample) {
    if (sample.size() != problem.num_qubits()) {
        throw std::invalid_argument("sample has " + std::to_string(sample.size()) + " spins, problem has " +
                                    std::to_string(problem.num_qubits()) + " qubits");
    }
}

/// F = sum_i a_i q_i + sum_(i<j) b_ij q_i q_j, each coupler counted once.
inline double energy(const IsingProblem& problem, const Sample& sample) {
    check_sample(problem, sample);
    detail::CompensatedSum f;
    for (std::size_t i = 0; i < problem.num_qubits(); ++i) f.add(problem.linear(i) * sample[i]);
    const auto& topo = problem.topology();
    for (std::size_t k = 0; k < problem.num_couplers(); ++k) {
        const auto [u, v] = topo.coupler_ends(k);
        f.add(problem.quadratic(k) * (sample[u] * sample[v]));
    }
    return f.value();
}

/// Rounds x onto the lattice {f/R} after scaling by 1/range; rounding is
/// half away from zero.
inline double quantize_coefficient(double x, Resolution r, double range = 1.0) {
    if (r.is_infinite()) return x;
    const double scale = static_cast<double>(r.value());
    return range * (std::round((x / range) * scale) / scale);
}

inline IsingProblem quantize(const IsingProblem& problem, Resolution r) {
    if (r.is_infinite()) return problem;
    std::vector<double> a(problem.linear().begin(), problem.linear().end());
    std::vector<double> b(problem.quadratic().begin(), problem.quadratic().end());
    for (double& x : a) x = quantize_coefficient(x, r, kLinearBound);
    for (double& x : b) x = quantize_coefficient(x, r, kCouplerBound);
    return IsingProblem(problem.topology_ptr(), std::move(a), std::move(b));
}

/// a_i ~ U[-2, 2], b_ij ~ U[-1, 1]; deterministic per seed.
inline IsingProblem random_problem(std::shared_ptr<const ChimeraTopology> topo, std::uint64_t seed) {
    std::mt19937_64 rng(detail::splitmix64(seed));
    std::vector<double> a(topo->num_qubits());
    std::vector<double> b(topo->num_couplers());
    for (double& x : a) x = detail::uniform(rng, -kLinearBound, kLinearBound);
    for (double& x : b) x = detail::uniform(rng, -kCouplerBound, kCouplerBound);
    return IsingProblem(std::move(topo), std::move(a), std::move(b));
}

inline IsingProblem random_problem(const ChimeraTopology& topo, std::uint64_t seed) {
    return random_problem(std::make_shared<const ChimeraTopology>(topo), seed);
}

/// All a_i = linear, all b_ij = coupler.
inline IsingProblem uniform_problem(std::shared_ptr<const ChimeraTopology> topo, double linear, double coupler) {
    std::vector<double> a(topo->num_qubits(), linear);
    std::vector<double> b(topo->num_couplers(), coupler);
    return IsingProblem(std::move(topo), std::move(a), std::move(b));
}

namespace detail {

inline double parse_real(std::string_view tok, std::size_t lineno) {
    const std::string s(tok);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ParseError(lineno, "bad number '" + s + "'");
    }
    if (used != s.size() || !std::isfinite(v)) throw ParseError(lineno, "bad number '" + s + "'");
    return v;
}

inline QubitId parse_qubit(std::string_view tok, std::size_t lineno) {
    const std::string s(tok);
    std::size_t used = 0;
    long long v = -1;
    try {
        v = std::stoll(s, &used);
    } catch (const std::exception&) {
        throw ParseError(lineno, "bad qubit id '" + s + "'");
    }
    if (used != s.size() || v < 0 || v > UINT32_MAX) throw ParseError(lineno, "bad qubit id '" + s + "'");
    return static_cast<QubitId>(v);
}

/// Shortest text that round-trips to the same double.
inline std::string format_real(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

}  // namespace detail

/// Problem file: `q <id> <a>` and `c <id> <id> <b>` records. The topology is
/// the graph the records describe; a qubit that only appears in a coupler
/// record gets a = 0.
inline IsingProblem read_problem(std::istream& in) {
    std::map<QubitId, double> linear;
    std::map<Coupler, double> quadratic;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto body = detail::strip_comment(line);
        if (body.empty()) continue;
        const auto tok = detail::split_ws(body);
        if (tok[0] == "q" && tok.size() == 3) {
            const QubitId id = detail::parse_qubit(tok[1], lineno);
            const double a = detail::parse_real(tok[2], lineno);
            if (!(std::abs(a) <= kLinearBound)) {
                throw ParseError(lineno, "qubit coefficient " + std::string(tok[2]) + " outside [-2, 2]");
            }
            if (linear.contains(id)) throw ParseError(lineno, "duplicate qubit " + std::to_string(id));
            linear[id] = a;
        } else if (tok[0] == "c" && tok.size() == 4) {
            const QubitId u = detail::parse_qubit(tok[1], lineno);
            const QubitId v = detail::parse_qubit(tok[2], lineno);
            if (u == v) throw ParseError(lineno, "coupler joins qubit " + std::to_string(u) + " to itself");
            const double b = detail::parse_real(tok[3], lineno);
            if (!(std::abs(b) <= kCouplerBound)) {
                throw ParseError(lineno, "coupler coefficient " + std::string(tok[3]) + " outside [-1, 1]");
            }
            const Coupler c(u, v);
            if (quadratic.contains(c)) {
                throw ParseError(lineno, "duplicate coupler (" + std::to_string(c.u) + "," + std::to_string(c.v) + ")");
            }
            quadratic[c] = b;
        } else {
            throw ParseError(lineno, "expected 'q <id> <a>' or 'c <id> <id> <b>'");
        }
    }
    for (const auto& [c, b] : quadratic) {
        linear.try_emplace(c.u, 0.0);
        linear.try_emplace(c.v, 0.0);
    }
    std::vector<QubitId> ids;
    std::vector<double> a;
    for (const auto& [id, x] : linear) {
        ids.push_back(id);
        a.push_back(x);
    }
    std::vector<Coupler> couplers;
    std::vector<double> b;
    for (const auto& [c, x] : quadratic) {
        couplers.push_back(c);
        b.push_back(x);
    }
    auto topo = std::make_shared<const ChimeraTopology>(std::nullopt, std::move(ids), std::move(couplers));
    return IsingProblem(std::move(topo), std::move(a), std::move(b));
}

inline void write_problem(std::ostream& out, const IsingProblem& problem) {
    const auto& topo = problem.topology();
    if (topo.shape()) {
        out << "# chimera " << topo.rows() << "x" << topo.cols() << "x" << topo.shore() << ", "
            << topo.num_qubits() << " qubits, " << topo.num_couplers() << " couplers\n";
    }
    for (std::size_t i = 0; i < problem.num_qubits(); ++i) {
        out << "q " << topo.qubit(i) << ' ' << detail::format_real(problem.linear(i)) << '\n';
    }
    for (std::size_t k = 0; k < problem.num_couplers(); ++k) {
        const auto c = topo.couplers()[k];
        out << "c " << c.u << ' ' << c.v << ' ' << detail::format_real(problem.quadratic(k)) << '\n';
    }
}

/// Samples file: one sample per line, space-separated -1/+1 in ascending
/// qubit-id order. `expected_size` of 0 accepts any consistent width.
inline std::vector<Sample> read_samples(std::istream& in, std::size_t expected_size = 0) {
    std::vector<Sample> samples;
    std::string line;
    std::size_t lineno = 0;
    std::size_t width = expected_size;
    while (std::getline(in, line)) {
        ++lineno;
        const auto body = detail::strip_comment(line);
        if (body.empty()) continue;
        std::vector<Spin> spins;
        for (auto tok : detail::split_ws(body)) {
            if (tok == "1" || tok == "+1") {
                spins.push_back(1);
            } else if (tok == "-1") {
                spins.push_back(-1);
            } else {
                throw ParseError(lineno, "bad spin '" + std::string(tok) + "', expected -1 or +1");
            }
        }
        if (width == 0) width = spins.size();
        if (spins.size() != width) {
            throw ParseError(lineno, "sample has " + std::to_string(spins.size()) + " spins, expected " +
                                         std::to_string(width));
        }
        samples.emplace_back(std::move(spins));
    }
    return samples;
}

inline void write_samples(std::ostream& out, std::span<const Sample> samples) {
    std::string row;
    for (const auto& s : samples) {
        row.clear();
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (i) row += ' ';
            row += s[i] > 0 ? "1" : "-1";
        }
        row += '\n';
        out << row;
    }
}

}  // namespace qcorrect
