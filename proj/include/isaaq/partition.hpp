/**
 * @file partition.hpp
 * @brief Circuit layers (bounded CNOT count) and chunks (bounded QUBO size).
 */

#pragma once

#include "isaaq/circuit.hpp"
#include "isaaq/error.hpp"

#include <algorithm>
#include <cstddef>
#include <vector>

namespace isaaq {

struct Layer {
    std::size_t index = 0;
    std::vector<Gate> gates;
    std::size_t cnot_count = 0;

    [[nodiscard]] std::vector<CnotGate> cnots() const {
        std::vector<CnotGate> out;
        for (const auto& g : gates) {
            if (const auto* cx = std::get_if<CnotGate>(&g)) out.push_back(*cx);
        }
        return out;
    }
};

/// Contiguous layer range [lo, hi).
struct Chunk {
    std::size_t index = 0;
    std::size_t lo = 0;
    std::size_t hi = 0;
    std::size_t var_count = 0;

    [[nodiscard]] std::size_t num_layers() const noexcept { return hi - lo; }
};

inline constexpr std::size_t kDefaultLayerCap = 20;
inline constexpr std::size_t kDefaultVarBudget = 1200;

/**
 * Greedy left-to-right fill. A CNOT opens a new layer exactly when the
 * current one already holds `layer_cap` CNOTs; single-qubit gates stay with
 * the layer that is open when they appear. Always returns at least one layer.
 */
[[nodiscard]] inline std::vector<Layer> slice_layers(const LogicalCircuit& circuit,
                                                     std::size_t layer_cap = kDefaultLayerCap) {
    if (layer_cap == 0) throw Error(ErrorKind::InvalidArgument, "layer cap must be at least 1");
    std::vector<Layer> layers(1);
    for (const auto& gate : circuit.gates()) {
        if (is_cnot(gate)) {
            if (layers.back().cnot_count == layer_cap) {
                layers.push_back(Layer{layers.size(), {}, 0});
            }
            ++layers.back().cnot_count;
        }
        layers.back().gates.push_back(gate);
    }
    return layers;
}

/// Chunks of floor(var_budget / N^2) layers each; the last one may be shorter.
[[nodiscard]] inline std::vector<Chunk> group_chunks(std::size_t num_layers, std::size_t num_qubits,
                                                     std::size_t var_budget = kDefaultVarBudget) {
    if (num_layers == 0 || num_qubits == 0) {
        throw Error(ErrorKind::InvalidArgument, "group_chunks needs at least one layer and one qubit");
    }
    const std::size_t per_layer = num_qubits * num_qubits;
    if (var_budget < per_layer) {
        throw Error(ErrorKind::BudgetTooSmall, "budget " + std::to_string(var_budget) + " below the " +
                                                   std::to_string(per_layer) + " variables of one layer");
    }
    const std::size_t layers_per_chunk = var_budget / per_layer;
    std::vector<Chunk> chunks;
    for (std::size_t lo = 0; lo < num_layers; lo += layers_per_chunk) {
        std::size_t hi = std::min(num_layers, lo + layers_per_chunk);
        chunks.push_back(Chunk{chunks.size(), lo, hi, (hi - lo) * per_layer});
    }
    return chunks;
}

}  // namespace isaaq
