/**
 * @file synthesis.hpp
 * @brief Physical circuit construction from per-layer qubit mappings.
 *
 * Each layer's CNOTs are built under that layer's mapping, using remote
 * CNOT cascades for distant pairs and relay qubits for commuting groups
 * with a shared qubit. Consecutive layers are joined by SWAP networks.
 */

#pragma once

#include "isaaq/circuit.hpp"
#include "isaaq/coeff_model.hpp"
#include "isaaq/device.hpp"
#include "isaaq/error.hpp"
#include "isaaq/gf2.hpp"
#include "isaaq/partition.hpp"
#include "isaaq/qasm.hpp"
#include "isaaq/qubo.hpp"
#include "isaaq/token_swap.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace isaaq {

struct SynthesisStats {
    std::size_t building_cost = 0;
    std::size_t moving_cost = 0;
    std::size_t total = 0;
    std::size_t logical_cnots = 0;

    /// Physical CNOTs per logical CNOT; 0 when there are no logical CNOTs.
    [[nodiscard]] double average_compilation_cost() const noexcept {
        return logical_cnots == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(logical_cnots);
    }
};

/// Gates over physical qubit indices; every CNOT acts on a device edge.
struct PhysicalCircuit {
    std::size_t num_qubits = 0;
    std::vector<Gate> gates;
    SynthesisStats stats;

    [[nodiscard]] std::size_t cnot_count() const noexcept {
        return static_cast<std::size_t>(std::count_if(gates.begin(), gates.end(), [](const Gate& g) { return is_cnot(g); }));
    }
};

using CnotList = std::vector<CnotGate>;

/// CNOT between arbitrary qubits: one gate if adjacent, else 4(d - 1) gates along a shortest path.
[[nodiscard]] inline CnotList remote_cnot(const Device& device, std::size_t control, std::size_t target) {
    if (control == target) throw Error(ErrorKind::SameQubit, "remote CNOT on qubit " + std::to_string(control));
    const auto path = device.shortest_path(control, target);
    const std::size_t k = path.size() - 1;
    if (k == 1) return {{control, target}};
    // last = CNOT onto the target; spread = every path[1..k-1] ^= path[0].
    const CnotGate last{path[k - 1], path[k]};
    CnotList spread;
    for (std::size_t j = k - 1; j-- > 0;) spread.push_back({path[j], path[j + 1]});
    for (std::size_t j = 1; j + 1 < k; ++j) spread.push_back({path[j], path[j + 1]});
    CnotList out;
    for (int rep = 0; rep < 2; ++rep) {
        out.push_back(last);
        out.insert(out.end(), spread.begin(), spread.end());
    }
    return out;
}

[[nodiscard]] inline CnotList swap_gate(const Device& device, std::size_t a, std::size_t b) {
    if (a >= device.num_qubits() || b >= device.num_qubits() || !device.adjacent(a, b)) {
        throw Error(ErrorKind::NotAdjacent, "SWAP on non-adjacent qubits " + std::to_string(a) + "," + std::to_string(b));
    }
    return {{a, b}, {b, a}, {a, b}};
}

namespace synthesis_detail {

/// path.back() ^= parity(path[0..k-1]); intermediates restored. 2k - 1 gates.
inline void append_parity_ladder(CnotList& out, const std::vector<std::size_t>& path) {
    const std::size_t k = path.size() - 1;
    for (std::size_t j = 0; j < k; ++j) out.push_back({path[j], path[j + 1]});
    for (std::size_t j = k - 1; j-- > 0;) out.push_back({path[j], path[j + 1]});
}

/// Every path[j], j >= 1, ^= path[0]. 2k - 1 gates.
inline void append_fanout_ladder(CnotList& out, const std::vector<std::size_t>& path) {
    const std::size_t k = path.size() - 1;
    for (std::size_t j = k; j-- > 0;) out.push_back({path[j], path[j + 1]});
    for (std::size_t j = 1; j < k; ++j) out.push_back({path[j], path[j + 1]});
}

inline CnotList transposed(const CnotList& gates) {
    CnotList out;
    out.reserve(gates.size());
    for (auto it = gates.rbegin(); it != gates.rend(); ++it) out.push_back({it->target, it->control});
    return out;
}

inline bool has_duplicates(std::vector<std::size_t> v) {
    std::sort(v.begin(), v.end());
    return std::adjacent_find(v.begin(), v.end()) != v.end();
}

/// Does `gates` act exactly as CNOT(shared, t) for every t in targets?
inline bool realizes_fanout(std::size_t n, const CnotList& gates, std::size_t shared,
                            const std::vector<std::size_t>& targets) {
    Gf2Matrix expected(n);
    for (auto t : targets) expected.cnot(shared, t);
    return gf2_of(n, gates) == expected;
}

inline int relay_target_cost(const Device& device, std::size_t relay, std::size_t t) {
    return 4 * device.distance(relay, t) - 2;
}

/**
 * Shared-control construction through `relay`. Targets for which the relay
 * path is strictly cheaper get parity ladders from the relay (nearest
 * first) wrapped around the step that adds the control into the relay;
 * the rest get direct remote CNOTs.
 */
inline CnotList relay_fanout(const Device& device, std::size_t control, const std::vector<std::size_t>& targets,
                             std::size_t relay) {
    const bool relay_is_target = std::find(targets.begin(), targets.end(), relay) != targets.end();
    std::vector<std::size_t> relayed;
    std::vector<std::size_t> direct;
    for (auto t : targets) {
        if (t == relay) continue;
        if (relay_target_cost(device, relay, t) < build_cost(device, control, t)) relayed.push_back(t);
        else direct.push_back(t);
    }
    std::stable_sort(relayed.begin(), relayed.end(),
                     [&](std::size_t a, std::size_t b) { return device.distance(relay, a) < device.distance(relay, b); });
    CnotList ladders;
    for (auto t : relayed) append_parity_ladder(ladders, device.shortest_path(relay, t));
    CnotList undo(ladders.rbegin(), ladders.rend());

    CnotList out = ladders;
    if (relay_is_target) {
        auto load = remote_cnot(device, control, relay);
        out.insert(out.end(), load.begin(), load.end());
        out.insert(out.end(), undo.begin(), undo.end());
    } else {
        CnotList load;
        append_fanout_ladder(load, device.shortest_path(control, relay));
        out.insert(out.end(), load.begin(), load.end());
        out.insert(out.end(), undo.begin(), undo.end());
        out.insert(out.end(), load.begin(), load.end());
    }
    for (auto t : direct) {
        auto g = remote_cnot(device, control, t);
        out.insert(out.end(), g.begin(), g.end());
    }
    return out;
}

inline int relay_cost(const Device& device, std::size_t control, const std::vector<std::size_t>& targets,
                      std::size_t relay) {
    const bool relay_is_target = std::find(targets.begin(), targets.end(), relay) != targets.end();
    int cost = relay_is_target ? build_cost(device, control, relay) : 4 * device.distance(control, relay) - 2;
    for (auto t : targets) {
        if (t != relay) cost += std::min(build_cost(device, control, t), relay_target_cost(device, relay, t));
    }
    return cost;
}

}  // namespace synthesis_detail

/// Candidate constructions for one group, as seen by the layer builder.
struct GroupPlan {
    CnotList gates;
    int direct_cost = 0;
    std::optional<std::size_t> relay;  ///< set when a relay construction was chosen
};

/**
 * @brief Cheapest verified construction of CNOTs sharing one physical qubit.
 *
 * With role Control the group is CNOT(shared, p) for p in `partners`; with
 * role Target it is CNOT(p, shared). Relay candidates are tried in order
 * of (formula cost, index) and accepted only when strictly cheaper than the
 * direct construction and when the GF(2) action checks out.
 */
[[nodiscard]] inline GroupPlan plan_group(const Device& device, std::size_t shared, SharedRole role,
                                          const std::vector<std::size_t>& partners, bool use_relay = true) {
    using namespace synthesis_detail;
    const auto n = device.num_qubits();
    GroupPlan plan;
    for (auto p : partners) plan.direct_cost += build_cost(device, shared, p);

    if (use_relay && partners.size() >= 2 && n <= kMaxGf2Wires && !has_duplicates(partners)) {
        std::vector<std::pair<int, std::size_t>> candidates;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == shared) continue;
            const int c = relay_cost(device, shared, partners, r);
            if (c < plan.direct_cost) candidates.push_back({c, r});
        }
        std::sort(candidates.begin(), candidates.end());
        for (auto [cost, r] : candidates) {
            auto gates = relay_fanout(device, shared, partners, r);
            if (static_cast<int>(gates.size()) != cost || !realizes_fanout(n, gates, shared, partners)) continue;
            plan.gates = role == SharedRole::Control ? std::move(gates) : transposed(gates);
            plan.relay = r;
            return plan;
        }
    }
    for (auto p : partners) {
        auto g = role == SharedRole::Control ? remote_cnot(device, shared, p) : remote_cnot(device, p, shared);
        plan.gates.insert(plan.gates.end(), g.begin(), g.end());
    }
    return plan;
}

struct LayerBuild {
    std::vector<Gate> gates;
    std::size_t building_cost = 0;
};

namespace synthesis_detail {

struct Segment {
    std::size_t first = 0;  ///< CNOT ordinal range [first, last]
    std::size_t last = 0;
    std::size_t shared = 0;  ///< logical qubit
    SharedRole role = SharedRole::Control;
};

/// Shared qubit and role for CNOTs [i, j], if they form a group.
inline std::optional<Segment> as_group(const std::vector<CnotGate>& cnots, std::size_t i, std::size_t j) {
    const auto& head = cnots[i];
    bool same_control = true;
    bool same_target = true;
    for (std::size_t k = i + 1; k <= j; ++k) {
        same_control = same_control && cnots[k].control == head.control;
        same_target = same_target && cnots[k].target == head.target;
    }
    if (same_control) return Segment{i, j, head.control, SharedRole::Control};
    if (same_target) return Segment{i, j, head.target, SharedRole::Target};
    return std::nullopt;
}

inline bool touches(const CnotGate& g, std::size_t q) { return g.control == q || g.target == q; }

}  // namespace synthesis_detail

/**
 * @brief Physical gates for one layer under `mapping` (logical -> physical).
 *
 * The layer's CNOTs are cut into consecutive segments that each share one
 * qubit in one role. The cut minimizing the total built cost is found by
 * dynamic programming; among equal cuts the one with longer later segments
 * wins. A segment may not straddle a single-qubit gate on a qubit it uses
 * both before and after that gate. Other single-qubit gates inside a
 * segment move before its block, or after it when only earlier CNOTs of the
 * segment touch their qubit.
 */
[[nodiscard]] inline LayerBuild construct_layer(const Layer& layer, const LayerMapping& mapping, const Device& device,
                                                bool use_relay = true) {
    using namespace synthesis_detail;
    if (!is_permutation_of(mapping, device.num_qubits())) {
        throw Error(ErrorKind::DimensionMismatch, "layer mapping is not a bijection over the device");
    }
    std::vector<CnotGate> cnots;
    std::vector<std::size_t> where;  // CNOT ordinal -> index in layer.gates
    for (std::size_t g = 0; g < layer.gates.size(); ++g) {
        if (const auto* cx = std::get_if<CnotGate>(&layer.gates[g])) {
            cnots.push_back(*cx);
            where.push_back(g);
        }
    }
    auto single_blocks = [&](std::size_t i, std::size_t j) {
        for (std::size_t g = where[i] + 1; g < where[j]; ++g) {
            const auto* s = std::get_if<SingleQubitGate>(&layer.gates[g]);
            if (!s) continue;
            bool before = false;
            bool after = false;
            for (std::size_t k = i; k <= j; ++k) {
                if (!touches(cnots[k], s->qubit)) continue;
                (where[k] < g ? before : after) = true;
            }
            if (before && after) return true;
        }
        return false;
    };
    auto plan_for = [&](const Segment& seg) {
        std::vector<std::size_t> partners;
        for (std::size_t k = seg.first; k <= seg.last; ++k) {
            const auto& cx = cnots[k];
            partners.push_back(mapping[seg.role == SharedRole::Control ? cx.target : cx.control]);
        }
        return plan_group(device, mapping[seg.shared], seg.role, partners, use_relay);
    };

    const std::size_t k = cnots.size();
    constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> best(k + 1, kInf);
    std::vector<Segment> choice(k + 1);
    std::vector<GroupPlan> plans(k + 1);
    best[0] = 0;
    for (std::size_t j = 1; j <= k; ++j) {
        for (std::size_t i = 0; i < j; ++i) {
            if (best[i] == kInf) continue;
            auto seg = as_group(cnots, i, j - 1);
            if (!seg || (j - 1 > i && single_blocks(i, j - 1))) continue;
            auto plan = plan_for(*seg);
            const std::size_t total = best[i] + plan.gates.size();
            if (total < best[j]) {
                best[j] = total;
                choice[j] = *seg;
                plans[j] = std::move(plan);
            }
        }
    }

    std::vector<std::pair<Segment, GroupPlan*>> segments;
    for (std::size_t j = k; j > 0; j = choice[j].first) segments.push_back({choice[j], &plans[j]});
    std::reverse(segments.begin(), segments.end());

    LayerBuild out;
    auto emit_single = [&](const SingleQubitGate& s) {
        out.gates.push_back(SingleQubitGate{s.name, s.params, mapping[s.qubit]});
    };
    auto emit_cnots = [&](const CnotList& list) {
        for (const auto& g : list) out.gates.push_back(g);
        out.building_cost += list.size();
    };

    std::size_t g = 0;
    for (const auto& [seg, plan] : segments) {
        const std::size_t lo = where[seg.first];
        const std::size_t hi = where[seg.last];
        for (; g < lo; ++g) emit_single(std::get<SingleQubitGate>(layer.gates[g]));
        std::vector<const SingleQubitGate*> after;
        for (g = lo + 1; g < hi; ++g) {
            const auto* s = std::get_if<SingleQubitGate>(&layer.gates[g]);
            if (!s) continue;
            bool touched_before = false;
            for (std::size_t c = seg.first; c <= seg.last && where[c] < g; ++c) {
                touched_before = touched_before || touches(cnots[c], s->qubit);
            }
            if (touched_before) after.push_back(s);
            else emit_single(*s);
        }
        emit_cnots(plan->gates);
        for (const auto* s : after) emit_single(*s);
        g = hi + 1;
    }
    for (; g < layer.gates.size(); ++g) emit_single(std::get<SingleQubitGate>(layer.gates[g]));
    return out;
}

struct StitchResult {
    CnotList gates;
    std::size_t moving_cost = 0;
    RearrangementSample sample;
};

/// pi[mu]: where the state on physical mu must go when switching from `from` to `to`.
[[nodiscard]] inline std::vector<std::size_t> rearrangement(const LayerMapping& from, const LayerMapping& to) {
    const auto inv = inverse_permutation(from);
    std::vector<std::size_t> pi(from.size());
    for (std::size_t mu = 0; mu < from.size(); ++mu) pi[mu] = to[inv[mu]];
    return pi;
}

/// Token swapping backend: exact (optionally table-backed) up to the limit, heuristic beyond.
class SwapRouter {
public:
    explicit SwapRouter(const Device& device, std::size_t exact_limit = kDefaultExactLimit, bool build_table = false)
        : device_(device), exact_limit_(exact_limit) {
        if (build_table && device.num_qubits() <= exact_limit) {
            table_ = std::make_shared<ExactTokenSwapper>(device, exact_limit);
        }
    }

    [[nodiscard]] const Device& device() const noexcept { return device_; }

    [[nodiscard]] SwapSequence route(const Arrangement& target) const {
        if (table_) return table_->solve(target);
        if (device_.num_qubits() <= exact_limit_) return min_swaps_exact(device_, target, exact_limit_);
        return min_swaps_heuristic(device_, target);
    }

private:
    Device device_;
    std::size_t exact_limit_;
    std::shared_ptr<const ExactTokenSwapper> table_;
};

[[nodiscard]] inline StitchResult stitch_layers(const LayerMapping& from, const LayerMapping& to,
                                                const SwapRouter& router) {
    const auto& device = router.device();
    if (!is_permutation_of(from, device.num_qubits()) || !is_permutation_of(to, device.num_qubits())) {
        throw Error(ErrorKind::DimensionMismatch, "stitched mappings must be bijections over the device");
    }
    StitchResult out;
    out.sample.pi = rearrangement(from, to);
    const auto swaps = router.route(arrangement_for(out.sample.pi));
    for (auto [a, b] : swaps) {
        auto g = swap_gate(device, a, b);
        out.gates.insert(out.gates.end(), g.begin(), g.end());
    }
    out.sample.swaps = swaps.size();
    out.moving_cost = out.gates.size();
    return out;
}

struct SynthesisOptions {
    bool use_relay = true;
};

struct SynthesisResult {
    PhysicalCircuit circuit;
    std::vector<RearrangementSample> samples;
};

/**
 * @brief construct_layer(0), stitch(0, 1), construct_layer(1), ...
 *
 * `mappings` holds one logical -> physical bijection per layer over the
 * device; logical qubits beyond the circuit's register are idle padding.
 */
[[nodiscard]] inline SynthesisResult synthesize(const LogicalCircuit& circuit, const std::vector<Layer>& layers,
                                                const std::vector<LayerMapping>& mappings, const SwapRouter& router,
                                                const SynthesisOptions& options = {}) {
    const auto& device = router.device();
    if (mappings.size() != layers.size()) {
        throw Error(ErrorKind::DimensionMismatch, std::to_string(layers.size()) + " layers but " +
                                                      std::to_string(mappings.size()) + " mappings");
    }
    if (circuit.num_qubits() > device.num_qubits()) {
        throw Error(ErrorKind::DimensionMismatch, "circuit has more qubits than the device");
    }
    SynthesisResult out;
    auto& pc = out.circuit;
    pc.num_qubits = device.num_qubits();
    pc.stats.logical_cnots = circuit.cnot_count();
    for (std::size_t m = 0; m < layers.size(); ++m) {
        if (m > 0) {
            auto stitch = stitch_layers(mappings[m - 1], mappings[m], router);
            for (const auto& g : stitch.gates) pc.gates.push_back(g);
            pc.stats.moving_cost += stitch.moving_cost;
            out.samples.push_back(std::move(stitch.sample));
        }
        auto built = construct_layer(layers[m], mappings[m], device, options.use_relay);
        pc.gates.insert(pc.gates.end(), built.gates.begin(), built.gates.end());
        pc.stats.building_cost += built.building_cost;
    }
    pc.stats.total = pc.stats.building_cost + pc.stats.moving_cost;
    return out;
}

/// QASM text; `index_map`, when given, relabels each physical index.
[[nodiscard]] inline std::string to_qasm(const PhysicalCircuit& circuit, const std::vector<std::size_t>& index_map = {},
                                         std::size_t register_size = 0) {
    auto label = [&](std::size_t q) { return index_map.empty() ? q : index_map[q]; };
    const std::size_t size = register_size ? register_size : circuit.num_qubits;
    std::string out = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[" + std::to_string(size) + "];\n";
    for (const auto& g : circuit.gates) {
        if (const auto* cx = std::get_if<CnotGate>(&g)) {
            out += "cx q[" + std::to_string(label(cx->control)) + "],q[" + std::to_string(label(cx->target)) + "];\n";
        } else {
            const auto& s = std::get<SingleQubitGate>(g);
            out += format_gate(s, label(s.qubit)) + "\n";
        }
    }
    return out;
}

}  // namespace isaaq
