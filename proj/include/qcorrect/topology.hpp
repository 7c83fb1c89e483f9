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
#include <compare>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qcorrect/util.hpp"

namespace qcorrect {

using QubitId = std::uint32_t;

/// Unordered qubit pair, stored with u < v.
struct Coupler {
    QubitId u = 0;
    QubitId v = 0;

    Coupler() = default;
    Coupler(QubitId a, QubitId b) : u(std::min(a, b)), v(std::max(a, b)) {}

    friend auto operator<=>(const Coupler&, const Coupler&) = default;
};

/// Cell-grid dimensions of a Chimera graph. Each cell is K(shore, shore).
struct ChimeraShape {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t shore = 4;

    std::size_t num_qubits() const { return rows * cols * 2 * shore; }

    friend bool operator==(const ChimeraShape&, const ChimeraShape&) = default;
};

/// Position of a qubit inside the grid. side 0 couples to the cells above and
/// below, side 1 to the cells left and right.
struct ChimeraCoordinate {
    std::size_t row = 0;
    std::size_t col = 0;
    std::size_t side = 0;
    std::size_t offset = 0;

    friend bool operator==(const ChimeraCoordinate&, const ChimeraCoordinate&) = default;
};

inline QubitId chimera_qubit(const ChimeraShape& s, const ChimeraCoordinate& c) {
    return static_cast<QubitId>(((c.row * s.cols) + c.col) * 2 * s.shore + c.side * s.shore + c.offset);
}

inline ChimeraCoordinate chimera_coordinate(const ChimeraShape& s, QubitId id) {
    ChimeraCoordinate c;
    c.offset = id % s.shore;
    c.side = (id / s.shore) % 2;
    const std::size_t cell = id / (2 * s.shore);
    c.col = cell % s.cols;
    c.row = cell / s.cols;
    return c;
}

/// Closed-form coupler count of the unmasked graph.
inline std::size_t chimera_coupler_count(const ChimeraShape& s) {
    return s.rows * s.cols * s.shore * s.shore + (s.rows - 1) * s.cols * s.shore +
           s.rows * (s.cols - 1) * s.shore;
}

/// True when (a, b) is a coupler of the unmasked graph.
inline bool is_chimera_coupler(const ChimeraShape& s, QubitId a, QubitId b) {
    const std::size_t n = s.num_qubits();
    if (a >= n || b >= n || a == b) return false;
    const auto p = chimera_coordinate(s, a);
    const auto q = chimera_coordinate(s, b);
    if (p.row == q.row && p.col == q.col) return p.side != q.side;
    if (p.side != q.side || p.offset != q.offset) return false;
    const auto dist = [](std::size_t x, std::size_t y) { return x > y ? x - y : y - x; };
    if (p.side == 0) return p.col == q.col && dist(p.row, q.row) == 1;
    return p.row == q.row && dist(p.col, q.col) == 1;
}

/// Qubit/coupler graph of an annealer. Qubits are addressed two ways: by id
/// (hardware label) and by index (position in the ascending active-id list).
/// Coefficient vectors and samples are laid out by index.
///
/// Immutable once built.
class ChimeraTopology {
  public:
    struct Neighbor {
        std::size_t index;    ///< neighbor's active index
        std::size_t coupler;  ///< index into couplers()
    };

    ChimeraTopology() = default;

    /// `shape` may be empty for graphs loaded from problem files. Active ids
    /// and couplers are sorted and deduplicated; every coupler must join two
    /// distinct active qubits.
    ChimeraTopology(std::optional<ChimeraShape> shape, std::vector<QubitId> active,
                    std::vector<Coupler> couplers)
            : shape_(shape), active_(std::move(active)), couplers_(std::move(couplers)) {
        std::sort(active_.begin(), active_.end());
        active_.erase(std::unique(active_.begin(), active_.end()), active_.end());
        std::sort(couplers_.begin(), couplers_.end());
        couplers_.erase(std::unique(couplers_.begin(), couplers_.end()), couplers_.end());
        if (shape_) {
            if (!active_.empty() && active_.back() >= shape_->num_qubits()) {
                throw std::invalid_argument("qubit " + std::to_string(active_.back()) +
                                            " outside the Chimera grid");
            }
        }

        ends_.reserve(couplers_.size());
        std::vector<std::size_t> degree(active_.size(), 0);
        for (const auto& c : couplers_) {
            if (c.u == c.v) {
                throw std::invalid_argument("coupler joins qubit " + std::to_string(c.u) + " to itself");
            }
            const auto iu = index_of(c.u);
            const auto iv = index_of(c.v);
            if (!iu || !iv) {
                throw std::invalid_argument("coupler (" + std::to_string(c.u) + "," + std::to_string(c.v) +
                                            ") touches an inactive qubit");
            }
            if (shape_ && !is_chimera_coupler(*shape_, c.u, c.v)) {
                throw std::invalid_argument("(" + std::to_string(c.u) + "," + std::to_string(c.v) +
                                            ") is not a Chimera coupler");
            }
            ends_.emplace_back(*iu, *iv);
            ++degree[*iu];
            ++degree[*iv];
        }

        offsets_.assign(active_.size() + 1, 0);
        for (std::size_t i = 0; i < active_.size(); ++i) offsets_[i + 1] = offsets_[i] + degree[i];
        adjacency_.resize(offsets_.back());
        std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
        for (std::size_t k = 0; k < ends_.size(); ++k) {
            const auto [iu, iv] = ends_[k];
            adjacency_[fill[iu]++] = {iv, k};
            adjacency_[fill[iv]++] = {iu, k};
        }
        // Ascending neighbor index == ascending neighbor id.
        for (std::size_t i = 0; i < active_.size(); ++i) {
            std::sort(adjacency_.begin() + offsets_[i], adjacency_.begin() + offsets_[i + 1],
                      [](const Neighbor& x, const Neighbor& y) { return x.index < y.index; });
        }
    }

    const std::optional<ChimeraShape>& shape() const { return shape_; }
    std::size_t rows() const { return shape_ ? shape_->rows : 0; }
    std::size_t cols() const { return shape_ ? shape_->cols : 0; }
    std::size_t shore() const { return shape_ ? shape_->shore : 0; }

    std::size_t num_qubits() const { return active_.size(); }
    std::size_t num_couplers() const { return couplers_.size(); }

    std::span<const QubitId> active_qubits() const { return active_; }
    std::span<const Coupler> couplers() const { return couplers_; }

    QubitId qubit(std::size_t index) const { return active_.at(index); }

    std::optional<std::size_t> index_of(QubitId id) const {
        const auto it = std::lower_bound(active_.begin(), active_.end(), id);
        if (it == active_.end() || *it != id) return std::nullopt;
        return static_cast<std::size_t>(it - active_.begin());
    }

    bool is_active(QubitId id) const { return index_of(id).has_value(); }

    /// Active indices of coupler k's endpoints, in (u, v) order.
    std::pair<std::size_t, std::size_t> coupler_ends(std::size_t k) const { return ends_[k]; }

    std::span<const Neighbor> neighbors(std::size_t index) const {
        return {adjacency_.data() + offsets_[index], offsets_[index + 1] - offsets_[index]};
    }

    friend bool operator==(const ChimeraTopology& x, const ChimeraTopology& y) {
        return x.shape_ == y.shape_ && x.active_ == y.active_ && x.couplers_ == y.couplers_;
    }

  private:
    std::optional<ChimeraShape> shape_;
    std::vector<QubitId> active_;
    std::vector<Coupler> couplers_;
    std::vector<std::pair<std::size_t, std::size_t>> ends_;
    std::vector<std::size_t> offsets_;
    std::vector<Neighbor> adjacency_;
};

/// Full Chimera graph with rows x cols cells of K(shore, shore).
inline ChimeraTopology build_chimera(std::size_t rows, std::size_t cols, std::size_t shore = 4) {
    if (rows == 0 || cols == 0 || shore == 0) {
        throw std::invalid_argument("Chimera dimensions must be positive (got " + std::to_string(rows) + "x" +
                                    std::to_string(cols) + "x" + std::to_string(shore) + ")");
    }
    const ChimeraShape s{rows, cols, shore};
    std::vector<QubitId> active(s.num_qubits());
    for (std::size_t i = 0; i < active.size(); ++i) active[i] = static_cast<QubitId>(i);

    std::vector<Coupler> couplers;
    couplers.reserve(chimera_coupler_count(s));
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            for (std::size_t k = 0; k < shore; ++k) {
                const QubitId vert = chimera_qubit(s, {r, c, 0, k});
                const QubitId horz = chimera_qubit(s, {r, c, 1, k});
                for (std::size_t m = 0; m < shore; ++m) couplers.emplace_back(vert, chimera_qubit(s, {r, c, 1, m}));
                if (r + 1 < rows) couplers.emplace_back(vert, chimera_qubit(s, {r + 1, c, 0, k}));
                if (c + 1 < cols) couplers.emplace_back(horz, chimera_qubit(s, {r, c + 1, 1, k}));
            }
        }
    }
    return ChimeraTopology(s, std::move(active), std::move(couplers));
}

/// Broken hardware elements.
struct Mask {
    std::vector<QubitId> dead_qubits;
    std::vector<Coupler> dead_couplers;

    bool empty() const { return dead_qubits.empty() && dead_couplers.empty(); }
};

/// Removes dead qubits (with every incident coupler) and dead couplers.
/// Elements are checked against the unmasked graph, so masking something
/// already absent is a no-op and the operation is idempotent.
inline ChimeraTopology apply_mask(const ChimeraTopology& topo, const Mask& mask) {
    const auto& shape = topo.shape();
    for (QubitId q : mask.dead_qubits) {
        const bool known = shape ? q < shape->num_qubits() : topo.is_active(q);
        if (!known) throw std::invalid_argument("mask names unknown qubit " + std::to_string(q));
    }
    for (const auto& c : mask.dead_couplers) {
        const bool known = shape ? is_chimera_coupler(*shape, c.u, c.v)
                                 : std::binary_search(topo.couplers().begin(), topo.couplers().end(), c);
        if (!known) {
            throw std::invalid_argument("mask names unknown coupler (" + std::to_string(c.u) + "," +
                                        std::to_string(c.v) + ")");
        }
    }

    std::vector<QubitId> dead_q(mask.dead_qubits);
    std::sort(dead_q.begin(), dead_q.end());
    std::vector<Coupler> dead_c(mask.dead_couplers);
    std::sort(dead_c.begin(), dead_c.end());
    const auto is_dead_q = [&](QubitId q) { return std::binary_search(dead_q.begin(), dead_q.end(), q); };

    std::vector<QubitId> active;
    for (QubitId q : topo.active_qubits()) {
        if (!is_dead_q(q)) active.push_back(q);
    }
    std::vector<Coupler> couplers;
    for (const auto& c : topo.couplers()) {
        if (is_dead_q(c.u) || is_dead_q(c.v)) continue;
        if (std::binary_search(dead_c.begin(), dead_c.end(), c)) continue;
        couplers.push_back(c);
    }
    return ChimeraTopology(shape, std::move(active), std::move(couplers));
}

/// Lexicographically first simple path of `length` active qubits (ordered
/// by the id sequence), returned as a topology holding only the path
/// couplers. The second member lists the path's qubit ids in walk order.
inline std::pair<ChimeraTopology, std::vector<QubitId>> find_chain(const ChimeraTopology& topo,
                                                                   std::size_t length) {
    if (length == 0) throw std::invalid_argument("chain length must be at least 1");
    const std::size_t n = topo.num_qubits();
    constexpr std::size_t kExpansionBudget = 50'000'000;
    std::size_t expansions = 0;

    std::vector<std::size_t> path;
    std::vector<char> used(n, 0);
    // Iterative DFS: cursor[d] is the next neighbor slot to try at depth d.
    std::vector<std::size_t> cursor;
    for (std::size_t start = 0; start < n; ++start) {
        path.assign(1, start);
        cursor.assign(1, 0);
        used[start] = 1;
        while (!path.empty()) {
            if (path.size() == length) break;
            const std::size_t here = path.back();
            const auto nbrs = topo.neighbors(here);
            std::size_t& slot = cursor.back();
            while (slot < nbrs.size() && used[nbrs[slot].index]) ++slot;
            if (slot == nbrs.size()) {
                used[here] = 0;
                path.pop_back();
                cursor.pop_back();
                continue;
            }
            const std::size_t next = nbrs[slot++].index;
            if (++expansions > kExpansionBudget) {
                throw std::runtime_error("chain search budget exhausted for length " + std::to_string(length));
            }
            used[next] = 1;
            path.push_back(next);
            cursor.push_back(0);
        }
        if (path.size() == length) break;
        std::fill(used.begin(), used.end(), 0);
        path.clear();
    }
    if (path.size() != length) {
        throw std::invalid_argument("no simple path of " + std::to_string(length) + " active qubits exists");
    }

    std::vector<QubitId> ids;
    for (std::size_t i : path) ids.push_back(topo.qubit(i));
    std::vector<Coupler> couplers;
    for (std::size_t k = 0; k + 1 < ids.size(); ++k) couplers.emplace_back(ids[k], ids[k + 1]);
    return {ChimeraTopology(topo.shape(), ids, std::move(couplers)), ids};
}

inline ChimeraTopology chain_subgraph(const ChimeraTopology& topo, std::size_t length) {
    return find_chain(topo, length).first;
}

/// Parses the mask format: `q <id>` or `c <id> <id>` per line, `#` comments.
inline Mask read_mask(std::istream& in) {
    Mask mask;
    std::string line;
    std::size_t lineno = 0;
    const auto parse_id = [&](std::string_view tok) -> QubitId {
        try {
            std::size_t used = 0;
            const std::string s(tok);
            const long long v = std::stoll(s, &used);
            if (used != s.size() || v < 0 || v > UINT32_MAX) throw std::invalid_argument("");
            return static_cast<QubitId>(v);
        } catch (const std::exception&) {
            throw ParseError(lineno, "bad qubit id '" + std::string(tok) + "'");
        }
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto body = detail::strip_comment(line);
        if (body.empty()) continue;
        const auto tok = detail::split_ws(body);
        if (tok[0] == "q" && tok.size() == 2) {
            mask.dead_qubits.push_back(parse_id(tok[1]));
        } else if (tok[0] == "c" && tok.size() == 3) {
            const QubitId a = parse_id(tok[1]);
            const QubitId b = parse_id(tok[2]);
            if (a == b) throw ParseError(lineno, "coupler joins a qubit to itself");
            mask.dead_couplers.emplace_back(a, b);
        } else {
            throw ParseError(lineno, "expected 'q <id>' or 'c <id> <id>'");
        }
    }
    return mask;
}

inline void write_mask(std::ostream& out, const Mask& mask) {
    for (QubitId q : mask.dead_qubits) out << "q " << q << '\n';
    for (const auto& c : mask.dead_couplers) out << "c " << c.u << ' ' << c.v << '\n';
}

/// Random mask that leaves exactly `qubits_left` qubits and `couplers_left`
/// couplers on the full graph of `shape`. Each dead qubit is the cheapest
/// (fewest live couplers) of a few random candidates, which clusters damage
/// the way flux defects do; any remaining coupler budget is spent on isolated
/// dead couplers. Deterministic per seed.
inline Mask synthetic_flux_mask(const ChimeraShape& shape, std::size_t qubits_left, std::size_t couplers_left,
                                std::uint64_t seed) {
    const ChimeraTopology full = build_chimera(shape.rows, shape.cols, shape.shore);
    if (qubits_left > full.num_qubits() || couplers_left > full.num_couplers()) {
        throw std::invalid_argument("mask targets exceed the unmasked graph");
    }
    const std::size_t dead_q = full.num_qubits() - qubits_left;
    const std::size_t budget = full.num_couplers() - couplers_left;
    constexpr std::size_t kCandidates = 8;
    constexpr std::size_t kRetries = 256;

    for (std::size_t retry = 0; retry < kRetries; ++retry) {
        std::mt19937_64 rng(detail::derive_seed(seed, retry));
        std::vector<char> dead(full.num_qubits(), 0);
        std::vector<char> coupler_dead(full.num_couplers(), 0);
        std::size_t removed = 0;
        Mask mask;

        const auto live_degree = [&](std::size_t i) {
            std::size_t k = 0;
            for (const auto& nb : full.neighbors(i)) k += !coupler_dead[nb.coupler];
            return k;
        };
        while (mask.dead_qubits.size() < dead_q) {
            std::size_t best = full.num_qubits();
            std::size_t best_cost = SIZE_MAX;
            for (std::size_t t = 0; t < kCandidates; ++t) {
                const std::size_t i = detail::uniform_index(rng, full.num_qubits());
                if (dead[i]) continue;
                const std::size_t cost = live_degree(i);
                if (cost < best_cost) {
                    best = i;
                    best_cost = cost;
                }
            }
            if (best == full.num_qubits()) continue;
            dead[best] = 1;
            for (const auto& nb : full.neighbors(best)) {
                if (!coupler_dead[nb.coupler]) {
                    coupler_dead[nb.coupler] = 1;
                    ++removed;
                }
            }
            mask.dead_qubits.push_back(full.qubit(best));
        }
        if (removed > budget) continue;
        while (removed < budget) {
            const std::size_t k = detail::uniform_index(rng, full.num_couplers());
            if (coupler_dead[k]) continue;
            coupler_dead[k] = 1;
            ++removed;
            mask.dead_couplers.push_back(full.couplers()[k]);
        }
        std::sort(mask.dead_qubits.begin(), mask.dead_qubits.end());
        std::sort(mask.dead_couplers.begin(), mask.dead_couplers.end());
        return mask;
    }
    throw std::invalid_argument("cannot meet the coupler target with " + std::to_string(dead_q) +
                                " dead qubits");
}

}  // namespace qcorrect
