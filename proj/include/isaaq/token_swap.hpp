/**
 * @file token_swap.hpp
 * @brief Realizing a qubit rearrangement with adjacent SWAPs.
 *
 * An arrangement is indexed by physical position and holds the token (the
 * original position of the state) currently sitting there. The identity
 * arrangement has token mu on position mu. A token-swapping target is the
 * arrangement that must hold after the swaps, so applying the returned
 * sequence to the identity yields exactly the target.
 */

#pragma once

#include "isaaq/device.hpp"
#include "isaaq/error.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <unordered_map>
#include <vector>

namespace isaaq {

using Arrangement = std::vector<std::size_t>;
using SwapSequence = std::vector<Edge>;

inline constexpr std::size_t kDefaultExactLimit = 8;

[[nodiscard]] inline Arrangement identity_arrangement(std::size_t n) {
    Arrangement a(n);
    std::iota(a.begin(), a.end(), std::size_t{0});
    return a;
}

[[nodiscard]] inline bool is_permutation_of(const std::vector<std::size_t>& p, std::size_t n) {
    if (p.size() != n) return false;
    std::vector<bool> seen(n, false);
    for (auto v : p) {
        if (v >= n || seen[v]) return false;
        seen[v] = true;
    }
    return true;
}

[[nodiscard]] inline std::vector<std::size_t> inverse_permutation(const std::vector<std::size_t>& p) {
    std::vector<std::size_t> inv(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) inv[p[i]] = i;
    return inv;
}

/// Exchanges the contents of both positions for every swap, in order.
[[nodiscard]] inline Arrangement apply_swaps(Arrangement arrangement, const SwapSequence& seq, const Device& device) {
    for (auto [a, b] : seq) {
        if (a >= device.num_qubits() || b >= device.num_qubits() || !device.adjacent(a, b)) {
            throw Error(ErrorKind::InvalidEdge, "(" + std::to_string(a) + "," + std::to_string(b) + ") is not a device edge");
        }
        std::swap(arrangement[a], arrangement[b]);
    }
    return arrangement;
}

namespace token_swap_detail {

inline std::uint64_t factorial(std::size_t n) {
    std::uint64_t f = 1;
    for (std::size_t i = 2; i <= n; ++i) f *= i;
    return f;
}

/// Lehmer-code rank of a permutation of 0..n-1.
inline std::uint64_t rank(const Arrangement& a) {
    const std::size_t n = a.size();
    std::uint64_t r = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t smaller = 0;
        for (std::size_t j = i + 1; j < n; ++j) smaller += a[j] < a[i] ? 1 : 0;
        r = r * (n - i) + smaller;
    }
    return r;
}

inline Arrangement unrank(std::uint64_t r, std::size_t n) {
    std::vector<std::size_t> digits(n);
    for (std::size_t i = n; i-- > 0;) {
        const std::size_t base = n - i;
        digits[i] = static_cast<std::size_t>(r % base);
        r /= base;
    }
    std::vector<std::size_t> pool = identity_arrangement(n);
    Arrangement a(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = pool[digits[i]];
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(digits[i]));
    }
    return a;
}

inline void check_target(const Device& device, const Arrangement& target) {
    if (!is_permutation_of(target, device.num_qubits())) {
        throw Error(ErrorKind::DimensionMismatch, "target is not a permutation of the device qubits");
    }
}

}  // namespace token_swap_detail

/**
 * @brief Shortest SWAP sequence by breadth-first search over arrangements.
 *
 * Searches outward from the identity and stops at the target.
 */
[[nodiscard]] inline SwapSequence min_swaps_exact(const Device& device, const Arrangement& target,
                                                  std::size_t exact_limit = kDefaultExactLimit) {
    using namespace token_swap_detail;
    const auto n = device.num_qubits();
    if (n > exact_limit) {
        throw Error(ErrorKind::TooLarge, std::to_string(n) + " qubits exceed the exact token-swap limit of " +
                                             std::to_string(exact_limit));
    }
    check_target(device, target);
    const auto& edges = device.edges();
    const auto start = rank(identity_arrangement(n));
    const auto goal = rank(target);
    std::unordered_map<std::uint64_t, std::uint32_t> via;  // state -> edge index that reached it
    via.emplace(start, std::numeric_limits<std::uint32_t>::max());
    std::queue<Arrangement> frontier;
    frontier.push(identity_arrangement(n));
    while (!frontier.empty() && !via.contains(goal)) {
        auto state = std::move(frontier.front());
        frontier.pop();
        for (std::uint32_t e = 0; e < edges.size(); ++e) {
            std::swap(state[edges[e].first], state[edges[e].second]);
            auto r = rank(state);
            if (via.emplace(r, e).second) frontier.push(state);
            std::swap(state[edges[e].first], state[edges[e].second]);
        }
    }
    SwapSequence seq;
    Arrangement state = target;
    for (auto r = goal; r != start; r = rank(state)) {
        auto e = via.at(r);
        seq.push_back(edges[e]);
        std::swap(state[edges[e].first], state[edges[e].second]);
    }
    std::reverse(seq.begin(), seq.end());
    return seq;
}

/**
 * @brief Full breadth-first table over all N! arrangements of one device.
 *
 * Built once, then answers any target in O(answer length * N^2). Also the
 * source of exact swap counts for every permutation.
 */
class ExactTokenSwapper {
public:
    explicit ExactTokenSwapper(const Device& device, std::size_t exact_limit = kDefaultExactLimit)
        : device_(device) {
        using namespace token_swap_detail;
        const auto n = device.num_qubits();
        if (n > exact_limit) {
            throw Error(ErrorKind::TooLarge, std::to_string(n) + " qubits exceed the exact token-swap limit of " +
                                                 std::to_string(exact_limit));
        }
        const auto states = factorial(n);
        dist_.assign(states, kUnvisited);
        via_.assign(states, 0);
        const auto& edges = device.edges();
        std::vector<std::uint64_t> frontier{rank(identity_arrangement(n))};
        dist_[frontier[0]] = 0;
        for (std::uint8_t depth = 0; !frontier.empty(); ++depth) {
            std::vector<std::uint64_t> next;
            for (auto r : frontier) {
                auto state = unrank(r, n);
                for (std::size_t e = 0; e < edges.size(); ++e) {
                    std::swap(state[edges[e].first], state[edges[e].second]);
                    auto s = rank(state);
                    if (dist_[s] == kUnvisited) {
                        dist_[s] = static_cast<std::uint8_t>(depth + 1);
                        via_[s] = static_cast<std::uint8_t>(e);
                        next.push_back(s);
                    }
                    std::swap(state[edges[e].first], state[edges[e].second]);
                }
            }
            frontier = std::move(next);
        }
    }

    [[nodiscard]] const Device& device() const noexcept { return device_; }
    [[nodiscard]] std::size_t num_states() const noexcept { return dist_.size(); }

    [[nodiscard]] std::size_t swap_count(const Arrangement& target) const {
        token_swap_detail::check_target(device_, target);
        return dist_[token_swap_detail::rank(target)];
    }

    /// Swap count of the arrangement with Lehmer rank `r`.
    [[nodiscard]] std::size_t swap_count_by_rank(std::uint64_t r) const { return dist_.at(r); }

    [[nodiscard]] SwapSequence solve(const Arrangement& target) const {
        using namespace token_swap_detail;
        check_target(device_, target);
        const auto& edges = device_.edges();
        SwapSequence seq;
        Arrangement state = target;
        for (auto r = rank(state); dist_[r] != 0; r = rank(state)) {
            const auto& e = edges[via_[r]];
            seq.push_back(e);
            std::swap(state[e.first], state[e.second]);
        }
        std::reverse(seq.begin(), seq.end());
        return seq;
    }

private:
    static constexpr std::uint8_t kUnvisited = 0xff;
    Device device_;
    std::vector<std::uint8_t> dist_;
    std::vector<std::uint8_t> via_;
};

/**
 * @brief Destination processing order for the heuristic router.
 *
 * Grows a connected sequence from the maximum-eccentricity vertex, always
 * appending the lowest-index frontier vertex, and returns it reversed. Any
 * prefix of the reversed order can be removed while leaving the remaining
 * vertices connected.
 */
[[nodiscard]] inline std::vector<std::size_t> destination_order(const Device& device) {
    const auto n = device.num_qubits();
    std::size_t seed = 0;
    for (std::size_t q = 1; q < n; ++q) {
        if (device.eccentricity(q) > device.eccentricity(seed)) seed = q;
    }
    std::vector<bool> chosen(n, false);
    std::vector<std::size_t> order{seed};
    chosen[seed] = true;
    while (order.size() < n) {
        for (std::size_t q = 0; q < n; ++q) {
            if (chosen[q]) continue;
            const auto& nb = device.neighbors(q);
            if (std::any_of(nb.begin(), nb.end(), [&](std::size_t v) { return chosen[v]; })) {
                chosen[q] = true;
                order.push_back(q);
                break;
            }
        }
    }
    std::reverse(order.begin(), order.end());
    return order;
}

/**
 * @brief Route tokens one destination at a time and pin them once delivered.
 *
 * Each token travels along a minimum-weight path through the still-unpinned
 * vertices, where stepping mu -> nu costs
 *   w = [d(nu, D) - d(mu, D)] - [d(nu, D_nu) - d(mu, D_nu)] + 2,
 * D being the moving token's destination and D_nu the destination of the
 * token it displaces. Weights lie in [0, 4]. Equal-weight paths are
 * resolved toward the lexicographically smallest vertex sequence.
 */
[[nodiscard]] inline SwapSequence min_swaps_heuristic(const Device& device, const Arrangement& target) {
    token_swap_detail::check_target(device, target);
    const auto n = device.num_qubits();
    const auto& d = device.distances();

    Arrangement state = identity_arrangement(n);  // position -> token
    std::vector<std::size_t> where = identity_arrangement(n);  // token -> position
    std::vector<std::size_t> dest(n);  // token -> destination position
    for (std::size_t pos = 0; pos < n; ++pos) dest[target[pos]] = pos;

    std::vector<bool> fixed(n, false);
    SwapSequence seq;
    constexpr int kInf = std::numeric_limits<int>::max() / 4;

    for (auto goal : destination_order(device)) {
        const auto token = target[goal];
        const auto source = where[token];
        if (source != goal) {
            auto weight = [&](std::size_t mu, std::size_t nu) {
                const auto displaced_dest = dest[state[nu]];
                return (d(nu, goal) - d(mu, goal)) - (d(nu, displaced_dest) - d(mu, displaced_dest)) + 2;
            };
            // Dijkstra toward the goal over reversed edges: to_goal[v] = cheapest v ~> goal.
            std::vector<int> to_goal(n, kInf);
            to_goal[goal] = 0;
            using Item = std::pair<int, std::size_t>;
            std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
            heap.push({0, goal});
            while (!heap.empty()) {
                auto [dist, nu] = heap.top();
                heap.pop();
                if (dist != to_goal[nu]) continue;
                for (auto mu : device.neighbors(nu)) {
                    if (fixed[mu]) continue;
                    int cand = dist + weight(mu, nu);
                    if (cand < to_goal[mu]) {
                        to_goal[mu] = cand;
                        heap.push({cand, mu});
                    }
                }
            }
            std::size_t cur = source;
            while (cur != goal) {
                std::size_t next = n;
                for (auto nu : device.neighbors(cur)) {
                    if (fixed[nu] || to_goal[nu] == kInf) continue;
                    if (to_goal[cur] == weight(cur, nu) + to_goal[nu]) {
                        next = nu;
                        break;
                    }
                }
                seq.push_back({std::min(cur, next), std::max(cur, next)});
                auto displaced = state[next];
                std::swap(state[cur], state[next]);
                where[token] = next;
                where[displaced] = cur;
                cur = next;
            }
        }
        fixed[goal] = true;
    }
    return seq;
}

}  // namespace isaaq
