/**
 * @file circuit.hpp
 * @brief Logical circuits made of single-qubit gates and CNOTs.
 *
 * Single-qubit gates are opaque labels: routing never looks inside them, it
 * only has to deliver them to whichever physical qubit holds their logical
 * qubit at that program point.
 */

#pragma once

#include "isaaq/error.hpp"

#include <cstddef>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace isaaq {

struct SingleQubitGate {
    std::string name;
    std::vector<double> params;
    std::size_t qubit = 0;

    friend bool operator==(const SingleQubitGate&, const SingleQubitGate&) = default;
};

struct CnotGate {
    std::size_t control = 0;
    std::size_t target = 0;

    friend bool operator==(const CnotGate&, const CnotGate&) = default;
};

using Gate = std::variant<SingleQubitGate, CnotGate>;

[[nodiscard]] inline bool is_cnot(const Gate& gate) noexcept {
    return std::holds_alternative<CnotGate>(gate);
}

class LogicalCircuit {
public:
    LogicalCircuit() = default;
    explicit LogicalCircuit(std::size_t num_qubits) : num_qubits_(num_qubits) {}

    [[nodiscard]] std::size_t num_qubits() const noexcept { return num_qubits_; }
    [[nodiscard]] const std::vector<Gate>& gates() const noexcept { return gates_; }
    [[nodiscard]] bool empty() const noexcept { return gates_.empty(); }

    void add(Gate gate) {
        if (auto* cx = std::get_if<CnotGate>(&gate)) {
            check_index(cx->control);
            check_index(cx->target);
            if (cx->control == cx->target) {
                throw Error(ErrorKind::MalformedSource, "CNOT control equals target");
            }
        } else {
            auto& single = std::get<SingleQubitGate>(gate);
            check_index(single.qubit);
            if (single.name.empty()) {
                throw Error(ErrorKind::MalformedSource, "single-qubit gate without a name");
            }
        }
        gates_.push_back(std::move(gate));
    }

    void add_cnot(std::size_t control, std::size_t target) { add(CnotGate{control, target}); }

    void add_single(std::string name, std::size_t qubit, std::vector<double> params = {}) {
        add(SingleQubitGate{std::move(name), std::move(params), qubit});
    }

    [[nodiscard]] std::size_t cnot_count() const noexcept {
        std::size_t count = 0;
        for (const auto& g : gates_) count += is_cnot(g) ? 1 : 0;
        return count;
    }

    friend bool operator==(const LogicalCircuit&, const LogicalCircuit&) = default;

private:
    void check_index(std::size_t q) const {
        if (q >= num_qubits_) {
            throw Error(ErrorKind::IndexOutOfRange,
                        "qubit " + std::to_string(q) + " outside register of " +
                            std::to_string(num_qubits_));
        }
    }

    std::size_t num_qubits_ = 0;
    std::vector<Gate> gates_;
};

/// Program-order subsequence of CNOTs.
[[nodiscard]] inline std::vector<CnotGate> cnot_gates(const LogicalCircuit& circuit) {
    std::vector<CnotGate> out;
    for (const auto& g : circuit.gates()) {
        if (const auto* cx = std::get_if<CnotGate>(&g)) out.push_back(*cx);
    }
    return out;
}

/// Two CNOTs commute unless the control of one is the target of the other.
[[nodiscard]] constexpr bool commutes(const CnotGate& a, const CnotGate& b) noexcept {
    return a.control != b.target && b.control != a.target;
}

enum class SharedRole { Control, Target };

struct CnotGroup {
    std::size_t shared = 0;
    SharedRole role = SharedRole::Control;
    std::vector<CnotGate> gates;
};

/// True if `gate` can join a run whose common qubit is `shared` in `role`.
[[nodiscard]] inline bool can_extend(const CnotGroup& group, const CnotGate& gate) {
    const bool shares = group.role == SharedRole::Control ? gate.control == group.shared
                                                          : gate.target == group.shared;
    if (!shares) return false;
    for (const auto& g : group.gates) {
        if (!commutes(g, gate)) return false;
    }
    return true;
}

/**
 * @brief Split a CNOT sequence into maximal consecutive runs of pairwise
 *        commuting gates sharing one qubit in the same role.
 *
 * A singleton run is labelled with its control. When the second gate of a
 * run arrives, the role is fixed to whichever qubit the two gates share,
 * preferring the control.
 */
[[nodiscard]] inline std::vector<CnotGroup> commuting_shared_groups(const std::vector<CnotGate>& gates) {
    std::vector<CnotGroup> groups;
    for (const auto& gate : gates) {
        if (!groups.empty()) {
            auto& current = groups.back();
            if (current.gates.size() == 1) {
                const auto& first = current.gates.front();
                if (commutes(first, gate)) {
                    if (first.control == gate.control) {
                        current.shared = gate.control;
                        current.role = SharedRole::Control;
                        current.gates.push_back(gate);
                        continue;
                    }
                    if (first.target == gate.target) {
                        current.shared = gate.target;
                        current.role = SharedRole::Target;
                        current.gates.push_back(gate);
                        continue;
                    }
                }
            } else if (can_extend(current, gate)) {
                current.gates.push_back(gate);
                continue;
            }
        }
        groups.push_back(CnotGroup{gate.control, SharedRole::Control, {gate}});
    }
    return groups;
}

}  // namespace isaaq
