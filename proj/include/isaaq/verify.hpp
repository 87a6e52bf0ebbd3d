/**
 * @file verify.hpp
 * @brief Equivalence check between a logical circuit and its routed form.
 *
 * The CNOT part is compared as a GF(2) linear map: physical wire
 * final[l] must carry exactly the parity that logical wire l carries at the
 * end, expressed over logical inputs. Every single-qubit gate must appear
 * once, on a wire whose parity at that moment equals the parity its logical
 * qubit had at the same program point, in program order per logical qubit.
 */

#pragma once

#include "isaaq/circuit.hpp"
#include "isaaq/gf2.hpp"
#include "isaaq/qubo.hpp"
#include "isaaq/synthesis.hpp"
#include "isaaq/token_swap.hpp"

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

namespace isaaq {

struct VerifyReport {
    bool ok = true;
    std::string message;

    explicit operator bool() const noexcept { return ok; }
};

/**
 * @param initial logical -> physical before the first physical gate
 * @param final_mapping logical -> physical after the last one
 * Both cover the whole device; logical indices past the circuit's register are idle.
 */
[[nodiscard]] inline VerifyReport verify_equivalence(const LogicalCircuit& logical, const PhysicalCircuit& physical,
                                                     const LayerMapping& initial, const LayerMapping& final_mapping) {
    const auto n = physical.num_qubits;
    auto fail = [](std::string msg) { return VerifyReport{false, std::move(msg)}; };
    if (logical.num_qubits() > n) return fail("logical circuit is wider than the physical one");
    if (!is_permutation_of(initial, n) || !is_permutation_of(final_mapping, n)) {
        return fail("initial or final mapping is not a bijection");
    }
    if (n > kMaxGf2Wires) return fail("more than 64 wires");

    struct Event {
        std::uint64_t parity;
        const SingleQubitGate* gate;
        std::size_t order;  // position in the logical program
    };
    Gf2Matrix lmat(n);
    std::vector<std::deque<Event>> pending(n);
    for (std::size_t idx = 0; idx < logical.gates().size(); ++idx) {
        const auto& g = logical.gates()[idx];
        if (const auto* cx = std::get_if<CnotGate>(&g)) {
            lmat.cnot(*cx);
        } else {
            const auto& s = std::get<SingleQubitGate>(g);
            pending[s.qubit].push_back({lmat.row(s.qubit), &s, idx});
        }
    }

    // Physical wire initial[l] starts out carrying logical input l.
    Gf2Matrix pmat(n);
    for (std::size_t l = 0; l < n; ++l) pmat.set_row(initial[l], std::uint64_t{1} << l);
    for (std::size_t idx = 0; idx < physical.gates.size(); ++idx) {
        const auto& g = physical.gates[idx];
        if (const auto* cx = std::get_if<CnotGate>(&g)) {
            if (cx->control >= n || cx->target >= n || cx->control == cx->target) {
                return fail("gate " + std::to_string(idx) + ": bad CNOT operands");
            }
            pmat.cnot(*cx);
            continue;
        }
        const auto& s = std::get<SingleQubitGate>(g);
        if (s.qubit >= n) return fail("gate " + std::to_string(idx) + ": qubit out of range");
        const auto parity = pmat.row(s.qubit);
        // the same parity can recur on another qubit later; take the earliest pending event
        std::size_t best = n;
        for (std::size_t l = 0; l < n; ++l) {
            if (pending[l].empty()) continue;
            const auto& ev = pending[l].front();
            if (ev.parity != parity || ev.gate->name != s.name || ev.gate->params != s.params) continue;
            if (best == n || ev.order < pending[best].front().order) best = l;
        }
        if (best < n) {
            pending[best].pop_front();
        } else {
            return fail("gate " + std::to_string(idx) + " (" + s.name + " on q" + std::to_string(s.qubit) +
                        ") matches no pending logical gate");
        }
    }
    for (std::size_t l = 0; l < n; ++l) {
        if (!pending[l].empty()) {
            return fail(std::to_string(pending[l].size()) + " single-qubit gate(s) of logical qubit " +
                        std::to_string(l) + " never emitted");
        }
        if (pmat.row(final_mapping[l]) != lmat.row(l)) {
            return fail("CNOT action differs on logical qubit " + std::to_string(l));
        }
    }
    return {};
}

}  // namespace isaaq
