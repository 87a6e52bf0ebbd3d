/**
 * @file device.hpp
 * @brief Physical coupling graphs with precomputed hop distances and CNOT build costs.
 *
 * A logical CNOT between physical qubits at hop distance d costs
 * max(1, 4(d - 1)) physical CNOTs: one when adjacent, otherwise a remote
 * CNOT cascade along a shortest path.
 */

#pragma once

#include "isaaq/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <limits>
#include <queue>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace isaaq {

using Edge = std::pair<std::size_t, std::size_t>;

/// Row-major square matrix of small non-negative integers.
class SquareMatrix {
public:
    SquareMatrix() = default;
    SquareMatrix(std::size_t n, int fill) : n_(n), data_(n * n, fill) {}

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] int operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }
    int& operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }

    friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<int> data_;
};

using DistanceMatrix = SquareMatrix;
using BuildCostMatrix = SquareMatrix;

namespace device_detail {

inline std::vector<std::vector<std::size_t>> adjacency(std::size_t n, const std::vector<Edge>& edges) {
    std::vector<std::vector<std::size_t>> adj(n);
    for (auto [u, v] : edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    for (auto& list : adj) std::sort(list.begin(), list.end());
    return adj;
}

inline std::vector<int> bfs(const std::vector<std::vector<std::size_t>>& adj, std::size_t source) {
    std::vector<int> dist(adj.size(), -1);
    std::queue<std::size_t> frontier;
    dist[source] = 0;
    frontier.push(source);
    while (!frontier.empty()) {
        auto u = frontier.front();
        frontier.pop();
        for (auto v : adj[u]) {
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                frontier.push(v);
            }
        }
    }
    return dist;
}

}  // namespace device_detail

/// Unweighted all-pairs shortest paths; throws DisconnectedGraph.
[[nodiscard]] inline DistanceMatrix all_pairs_distance(std::size_t num_qubits, const std::vector<Edge>& edges) {
    auto adj = device_detail::adjacency(num_qubits, edges);
    DistanceMatrix d(num_qubits, 0);
    for (std::size_t s = 0; s < num_qubits; ++s) {
        auto row = device_detail::bfs(adj, s);
        for (std::size_t t = 0; t < num_qubits; ++t) {
            if (row[t] < 0) {
                throw Error(ErrorKind::DisconnectedGraph,
                            "qubits " + std::to_string(s) + " and " + std::to_string(t) + " are not connected");
            }
            d(s, t) = row[t];
        }
    }
    return d;
}

[[nodiscard]] constexpr int cost_for_distance(int d) noexcept { return d <= 0 ? 0 : std::max(1, 4 * (d - 1)); }

/**
 * @brief Immutable coupling graph.
 *
 * Edges are stored normalized (u < v), sorted and deduplicated. The
 * distance and build-cost matrices are computed once at construction.
 */
class Device {
public:
    Device() = default;

    Device(std::string name, std::size_t num_qubits, std::vector<Edge> edges)
        : name_(std::move(name)), num_qubits_(num_qubits) {
        if (num_qubits == 0) throw Error(ErrorKind::InvalidTopology, "device needs at least one qubit");
        std::set<Edge> unique;
        for (auto [u, v] : edges) {
            if (u >= num_qubits || v >= num_qubits) {
                throw Error(ErrorKind::InvalidTopology, "edge (" + std::to_string(u) + "," + std::to_string(v) +
                                                            ") outside " + std::to_string(num_qubits) + " qubits");
            }
            if (u == v) throw Error(ErrorKind::InvalidTopology, "self-loop on qubit " + std::to_string(u));
            unique.insert({std::min(u, v), std::max(u, v)});
        }
        edges_.assign(unique.begin(), unique.end());
        adjacency_ = device_detail::adjacency(num_qubits_, edges_);
        try {
            distance_ = all_pairs_distance(num_qubits_, edges_);
        } catch (const Error& e) {
            throw Error(ErrorKind::InvalidTopology, std::string("device '") + name_ + "' is disconnected (" + e.what() + ")");
        }
        cost_ = BuildCostMatrix(num_qubits_, 0);
        for (std::size_t a = 0; a < num_qubits_; ++a) {
            for (std::size_t b = 0; b < num_qubits_; ++b) cost_(a, b) = cost_for_distance(distance_(a, b));
        }
    }

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] std::size_t num_qubits() const noexcept { return num_qubits_; }
    [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }
    [[nodiscard]] const std::vector<std::size_t>& neighbors(std::size_t q) const { return adjacency_[q]; }
    [[nodiscard]] const DistanceMatrix& distances() const noexcept { return distance_; }
    [[nodiscard]] const BuildCostMatrix& build_costs() const noexcept { return cost_; }

    [[nodiscard]] int distance(std::size_t a, std::size_t b) const { return distance_(a, b); }
    [[nodiscard]] bool adjacent(std::size_t a, std::size_t b) const { return distance_(a, b) == 1; }

    [[nodiscard]] int diameter() const {
        int best = 0;
        for (std::size_t a = 0; a < num_qubits_; ++a)
            for (std::size_t b = 0; b < num_qubits_; ++b) best = std::max(best, distance_(a, b));
        return best;
    }

    [[nodiscard]] int eccentricity(std::size_t q) const {
        int best = 0;
        for (std::size_t b = 0; b < num_qubits_; ++b) best = std::max(best, distance_(q, b));
        return best;
    }

    /// Shortest path from `from` to `to`, choosing the lowest-index next hop at every step.
    [[nodiscard]] std::vector<std::size_t> shortest_path(std::size_t from, std::size_t to) const {
        std::vector<std::size_t> path{from};
        std::size_t cur = from;
        while (cur != to) {
            for (auto next : adjacency_[cur]) {
                if (distance_(next, to) == distance_(cur, to) - 1) {
                    cur = next;
                    break;
                }
            }
            path.push_back(cur);
        }
        return path;
    }

private:
    std::string name_;
    std::size_t num_qubits_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> adjacency_;
    DistanceMatrix distance_;
    BuildCostMatrix cost_;
};

/// c(mu, nu) for mu != nu.
[[nodiscard]] inline int build_cost(const Device& device, std::size_t mu, std::size_t nu) {
    if (mu == nu) throw Error(ErrorKind::SameQubit, "build cost requested for qubit " + std::to_string(mu) + " with itself");
    return device.build_costs()(mu, nu);
}

namespace device_detail {

inline std::size_t parse_count(std::string_view text, std::string_view spec) {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw Error(ErrorKind::UnknownDevice, "bad number in device spec '" + std::string(spec) + "'");
    }
    return value;
}

// IBM QX5 (ibmqx5 "Rueschlikon"), 16 qubits, coupling directions dropped.
inline const std::vector<Edge> kIbmQx5Edges = {
    {0, 1},  {1, 2},   {2, 3},   {3, 4},   {3, 14}, {4, 5},   {5, 6},   {6, 7},
    {6, 11}, {7, 10},  {7, 8},   {8, 9},   {9, 10}, {10, 11}, {5, 12},  {11, 12},
    {12, 13}, {4, 13}, {13, 14}, {0, 15},  {2, 15}, {14, 15},
};

// IBM QX20 ("Tokyo"), 20 qubits, bidirectional couplings.
inline const std::vector<Edge> kIbmQx20Edges = {
    {0, 1},   {0, 5},   {1, 2},   {1, 6},   {1, 7},   {2, 6},   {3, 8},   {4, 8},   {4, 9},
    {5, 6},   {5, 10},  {5, 11},  {6, 7},   {6, 10},  {6, 11},  {7, 8},   {7, 12},  {8, 9},
    {8, 12},  {8, 13},  {10, 11}, {10, 15}, {11, 12}, {11, 16}, {11, 17}, {12, 13}, {12, 16},
    {13, 14}, {13, 18}, {13, 19}, {14, 18}, {14, 19}, {15, 16}, {16, 17}, {17, 18},
};

}  // namespace device_detail

/**
 * @brief Built-in topologies: `ibm_qx5`, `ibm_qx20`, `linear:<n>`,
 *        `ring:<n>` and `star:<hub>:<n>`.
 */
[[nodiscard]] inline Device builtin_device(std::string_view spec) {
    using device_detail::parse_count;
    if (spec == "ibm_qx5") return Device("ibm_qx5", 16, device_detail::kIbmQx5Edges);
    if (spec == "ibm_qx20") return Device("ibm_qx20", 20, device_detail::kIbmQx20Edges);

    auto colon = spec.find(':');
    if (colon == std::string_view::npos) throw Error(ErrorKind::UnknownDevice, "unknown device '" + std::string(spec) + "'");
    auto kind = spec.substr(0, colon);
    auto args = spec.substr(colon + 1);
    std::vector<Edge> edges;
    if (kind == "linear") {
        auto n = parse_count(args, spec);
        for (std::size_t i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
        return Device(std::string(spec), n, edges);
    }
    if (kind == "ring") {
        auto n = parse_count(args, spec);
        if (n < 3) throw Error(ErrorKind::InvalidTopology, "ring needs at least 3 qubits");
        for (std::size_t i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n});
        return Device(std::string(spec), n, edges);
    }
    if (kind == "star") {
        auto second = args.find(':');
        if (second == std::string_view::npos) throw Error(ErrorKind::UnknownDevice, "star needs <hub>:<n>");
        auto hub = parse_count(args.substr(0, second), spec);
        auto n = parse_count(args.substr(second + 1), spec);
        if (hub >= n) throw Error(ErrorKind::InvalidTopology, "star hub outside device");
        for (std::size_t i = 0; i < n; ++i) {
            if (i != hub) edges.push_back({hub, i});
        }
        return Device(std::string(spec), n, edges);
    }
    throw Error(ErrorKind::UnknownDevice, "unknown device '" + std::string(spec) + "'");
}

/// JSON device file: {"name": ..., "num_qubits": n, "edges": [[u, v], ...]}.
[[nodiscard]] inline Device device_from_json(const nlohmann::json& j) {
    try {
        auto name = j.value("name", std::string("custom"));
        auto n = j.at("num_qubits").get<std::size_t>();
        std::vector<Edge> edges;
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2) throw Error(ErrorKind::InvalidTopology, "edge must be a pair");
            edges.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>()});
        }
        return Device(std::move(name), n, std::move(edges));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidTopology, std::string("bad device JSON: ") + e.what());
    }
}

[[nodiscard]] inline nlohmann::json device_to_json(const Device& device) {
    nlohmann::json edges = nlohmann::json::array();
    for (auto [u, v] : device.edges()) edges.push_back({u, v});
    return {{"name", device.name()}, {"num_qubits", device.num_qubits()}, {"edges", edges}};
}

[[nodiscard]] inline Device load_device_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::UnknownDevice, "cannot open device file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidTopology, std::string("bad device JSON: ") + e.what());
    }
    return device_from_json(j);
}

/// `--device` resolution: a built-in name, otherwise a path to a JSON file.
[[nodiscard]] inline Device load_device(const std::string& name_or_path) {
    try {
        return builtin_device(name_or_path);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::UnknownDevice) throw;
    }
    return load_device_file(name_or_path);
}

/// A device restricted to a connected vertex subset, re-indexed 0..k-1.
struct DeviceSubset {
    Device device;
    std::vector<std::size_t> physical;  ///< subset index -> index on the parent device
};

/**
 * @brief Greedy dense connected subset of `k` qubits.
 *
 * Seeds at the highest-degree vertex and repeatedly adds the frontier vertex
 * with the smallest summed distance to the chosen set. Ties go to the
 * lowest index. The chosen vertices keep their relative order.
 */
[[nodiscard]] inline DeviceSubset select_subset(const Device& device, std::size_t k) {
    const auto n = device.num_qubits();
    if (k == 0 || k > n) {
        throw Error(ErrorKind::SubsetInfeasible, "cannot select " + std::to_string(k) + " of " + std::to_string(n) + " qubits");
    }
    std::vector<bool> chosen(n, false);
    std::size_t seed = 0;
    for (std::size_t q = 1; q < n; ++q) {
        if (device.neighbors(q).size() > device.neighbors(seed).size()) seed = q;
    }
    chosen[seed] = true;
    std::vector<std::size_t> picked{seed};
    while (picked.size() < k) {
        std::size_t best = n;
        long best_score = std::numeric_limits<long>::max();
        for (std::size_t q = 0; q < n; ++q) {
            if (chosen[q]) continue;
            bool frontier = std::any_of(device.neighbors(q).begin(), device.neighbors(q).end(),
                                        [&](std::size_t v) { return chosen[v]; });
            if (!frontier) continue;
            long score = 0;
            for (auto p : picked) score += device.distance(q, p);
            if (score < best_score) {
                best_score = score;
                best = q;
            }
        }
        if (best == n) throw Error(ErrorKind::SubsetInfeasible, "no connected frontier vertex left");
        chosen[best] = true;
        picked.push_back(best);
    }
    std::vector<std::size_t> physical;
    std::vector<std::size_t> local(n, n);
    for (std::size_t q = 0; q < n; ++q) {
        if (chosen[q]) {
            local[q] = physical.size();
            physical.push_back(q);
        }
    }
    std::vector<Edge> edges;
    for (auto [u, v] : device.edges()) {
        if (chosen[u] && chosen[v]) edges.push_back({local[u], local[v]});
    }
    std::string name = k == n ? device.name() : device.name() + "[" + std::to_string(k) + "]";
    return {Device(std::move(name), k, std::move(edges)), std::move(physical)};
}

}  // namespace isaaq
