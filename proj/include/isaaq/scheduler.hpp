/**
 * @file scheduler.hpp
 * @brief Solve order for chunk QUBOs and the neighbours each chunk sees.
 *
 * independent: no dependencies, no boundary terms.
 * sequential:  chunk k waits for k-1 and sees it at distance 1.
 * binary:      chunks sit on a midpoint tree over [0, Q); a node waits for
 *              its parent and sees the nearest tree ancestor on each side.
 */

#pragma once

#include "isaaq/error.hpp"
#include "isaaq/qubo.hpp"

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace isaaq {

enum class Strategy { Independent, Sequential, Binary };

[[nodiscard]] inline std::string_view to_string(Strategy s) noexcept {
    switch (s) {
        case Strategy::Independent: return "independent";
        case Strategy::Sequential: return "sequential";
        case Strategy::Binary: return "binary";
    }
    return "binary";
}

[[nodiscard]] inline Strategy parse_strategy(std::string_view text) {
    if (text == "independent") return Strategy::Independent;
    if (text == "sequential") return Strategy::Sequential;
    if (text == "binary") return Strategy::Binary;
    throw Error(ErrorKind::InvalidArgument, "unknown strategy '" + std::string(text) + "'");
}

struct BoundarySource {
    std::size_t chunk = 0;
    std::size_t distance = 1;
    BoundarySide side = BoundarySide::Left;  ///< side of the consumer the source lies on
};

struct ScheduleNode {
    std::size_t index = 0;
    std::vector<std::size_t> deps;
    std::vector<BoundarySource> boundary_sources;
    std::size_t depth = 0;  ///< dispatch priority, shallower first
};

struct Schedule {
    Strategy strategy = Strategy::Binary;
    std::vector<ScheduleNode> nodes;  ///< indexed by chunk
};

/// Left-biased midpoint of [lo, hi).
[[nodiscard]] constexpr std::size_t midpoint(std::size_t lo, std::size_t hi) noexcept { return (lo + hi - 1) / 2; }

namespace schedule_detail {

inline void place_subtree(Schedule& s, std::size_t lo, std::size_t hi, std::size_t parent, std::size_t depth,
                          std::size_t num_chunks) {
    if (lo >= hi) return;
    const auto mid = midpoint(lo, hi);
    auto& node = s.nodes[mid];
    node.index = mid;
    node.depth = depth;
    if (depth > 0) node.deps.push_back(parent);
    if (lo > 0) node.boundary_sources.push_back({lo - 1, mid - (lo - 1), BoundarySide::Left});
    if (hi < num_chunks) node.boundary_sources.push_back({hi, hi - mid, BoundarySide::Right});
    place_subtree(s, lo, mid, mid, depth + 1, num_chunks);
    place_subtree(s, mid + 1, hi, mid, depth + 1, num_chunks);
}

}  // namespace schedule_detail

[[nodiscard]] inline Schedule make_schedule(std::size_t num_chunks, Strategy strategy) {
    if (num_chunks == 0) throw Error(ErrorKind::InvalidArgument, "schedule needs at least one chunk");
    Schedule s;
    s.strategy = strategy;
    s.nodes.resize(num_chunks);
    for (std::size_t k = 0; k < num_chunks; ++k) s.nodes[k].index = k;
    switch (strategy) {
        case Strategy::Independent:
            break;
        case Strategy::Sequential:
            for (std::size_t k = 1; k < num_chunks; ++k) {
                s.nodes[k].deps.push_back(k - 1);
                s.nodes[k].boundary_sources.push_back({k - 1, 1, BoundarySide::Left});
                s.nodes[k].depth = k;
            }
            break;
        case Strategy::Binary:
            schedule_detail::place_subtree(s, 0, num_chunks, 0, 0, num_chunks);
            break;
    }
    return s;
}

/// Ready-queue order shared by the simulator and the solver pool.
[[nodiscard]] inline bool dispatch_before(const ScheduleNode& a, const ScheduleNode& b) noexcept {
    return a.depth != b.depth ? a.depth < b.depth : a.index < b.index;
}

/**
 * @brief Unit-time list scheduling: per step, up to `workers` ready nodes run.
 * @return Per node, the step (0-based) in which it runs.
 */
[[nodiscard]] inline std::vector<std::size_t> simulate_waves(const Schedule& s, std::size_t workers) {
    if (workers == 0) throw Error(ErrorKind::InvalidArgument, "need at least one worker");
    const auto q = s.nodes.size();
    constexpr std::size_t kPending = static_cast<std::size_t>(-1);
    std::vector<std::size_t> wave(q, kPending);
    std::size_t done = 0;
    for (std::size_t step = 0; done < q; ++step) {
        std::vector<std::size_t> ready;
        for (std::size_t k = 0; k < q; ++k) {
            if (wave[k] != kPending) continue;
            bool ok = std::all_of(s.nodes[k].deps.begin(), s.nodes[k].deps.end(),
                                  [&](std::size_t d) { return wave[d] != kPending && wave[d] < step; });
            if (ok) ready.push_back(k);
        }
        std::sort(ready.begin(), ready.end(),
                  [&](std::size_t a, std::size_t b) { return dispatch_before(s.nodes[a], s.nodes[b]); });
        for (std::size_t j = 0; j < ready.size() && j < workers; ++j) {
            wave[ready[j]] = step;
            ++done;
        }
    }
    return wave;
}

[[nodiscard]] inline std::size_t steps(std::size_t num_chunks, std::size_t workers, Strategy strategy) {
    auto waves = simulate_waves(make_schedule(num_chunks, strategy), workers);
    return *std::max_element(waves.begin(), waves.end()) + 1;
}

}  // namespace isaaq
