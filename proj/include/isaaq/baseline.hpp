/**
 * @file baseline.hpp
 * @brief Reference router: move the control next to the target, one CNOT at a time.
 */

#pragma once

#include "isaaq/circuit.hpp"
#include "isaaq/device.hpp"
#include "isaaq/error.hpp"
#include "isaaq/qubo.hpp"
#include "isaaq/synthesis.hpp"
#include "isaaq/token_swap.hpp"

#include <cstddef>
#include <vector>

namespace isaaq {

struct NaiveResult {
    PhysicalCircuit circuit;
    LayerMapping initial;
    LayerMapping final_mapping;
};

/**
 * Logical qubit i starts on physical qubit i. For every CNOT, the control is
 * swapped along the lowest-index shortest path until it neighbours the
 * target, then the CNOT is applied. Qubits are never moved back.
 */
[[nodiscard]] inline NaiveResult compile_naive(const LogicalCircuit& circuit, const Device& device) {
    const auto n = device.num_qubits();
    if (circuit.num_qubits() > n) {
        throw Error(ErrorKind::SubsetInfeasible, "circuit needs " + std::to_string(circuit.num_qubits()) +
                                                     " qubits, device has " + std::to_string(n));
    }
    NaiveResult out;
    out.initial = identity_arrangement(n);
    LayerMapping where = out.initial;          // logical -> physical
    std::vector<std::size_t> holder = where;   // physical -> logical
    auto& pc = out.circuit;
    pc.num_qubits = n;
    pc.stats.logical_cnots = circuit.cnot_count();

    for (const auto& g : circuit.gates()) {
        if (const auto* s = std::get_if<SingleQubitGate>(&g)) {
            pc.gates.push_back(SingleQubitGate{s->name, s->params, where[s->qubit]});
            continue;
        }
        const auto& cx = std::get<CnotGate>(g);
        const auto path = device.shortest_path(where[cx.control], where[cx.target]);
        for (std::size_t step = 1; step + 1 < path.size(); ++step) {
            const auto a = path[step - 1];
            const auto b = path[step];
            for (const auto& sw : swap_gate(device, a, b)) pc.gates.push_back(sw);
            pc.stats.moving_cost += 3;
            std::swap(holder[a], holder[b]);
            where[holder[a]] = a;
            where[holder[b]] = b;
        }
        pc.gates.push_back(CnotGate{where[cx.control], where[cx.target]});
        pc.stats.building_cost += 1;
    }
    pc.stats.total = pc.stats.building_cost + pc.stats.moving_cost;
    out.final_mapping = where;
    return out;
}

}  // namespace isaaq
