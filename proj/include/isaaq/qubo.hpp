/**
 * @file qubo.hpp
 * @brief QUBO objective for the qubit mappings of one chunk of layers.
 *
 * Variable x(m, i, mu) is 1 when logical qubit i sits on physical qubit mu
 * during chunk-local layer m. The objective sums the building cost of every
 * CNOT, the surrogate moving cost between adjacent layers, boundary terms
 * towards already solved neighbouring chunks, and one-hot penalties that
 * force each layer's bit matrix to be a permutation.
 */

#pragma once

#include "isaaq/circuit.hpp"
#include "isaaq/coeff_model.hpp"
#include "isaaq/device.hpp"
#include "isaaq/error.hpp"
#include "isaaq/partition.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace isaaq {

/// Logical -> physical for one layer.
using LayerMapping = std::vector<std::size_t>;

struct QuboTerm {
    std::size_t u = 0;
    std::size_t v = 0;  ///< u <= v; u == v is a linear term
    double coeff = 0.0;

    friend bool operator==(const QuboTerm&, const QuboTerm&) = default;
};

/// Flat index of x(m, i, mu) for a chunk over `n` qubits.
struct VarLayout {
    std::size_t num_layers = 0;
    std::size_t n = 0;

    [[nodiscard]] std::size_t index(std::size_t m, std::size_t i, std::size_t mu) const noexcept {
        return (m * n + i) * n + mu;
    }
    [[nodiscard]] std::size_t num_vars() const noexcept { return num_layers * n * n; }
};

enum class BoundarySide { Left, Right };

/**
 * A solved neighbouring chunk seen from this chunk. For a Left boundary
 * `mapping` is the neighbour's last layer and it precedes layer 0; for a
 * Right boundary it is the neighbour's first layer and follows the last one.
 */
struct BoundaryTerm {
    BoundarySide side = BoundarySide::Left;
    LayerMapping mapping;
    std::size_t distance = 1;
};

struct QuboProblem {
    std::size_t num_vars = 0;
    std::vector<QuboTerm> terms;  ///< sorted by (u, v), no zero coefficients
    double constant = 0.0;
    double penalty = 0.0;
    VarLayout layout;
    std::vector<std::vector<CnotGate>> layer_cnots;  ///< per chunk-local layer, used by decode repair
    BuildCostMatrix build_costs;
};

namespace qubo_detail {

class TermAccumulator {
public:
    void add(std::size_t u, std::size_t v, double c) {
        if (u > v) std::swap(u, v);
        terms_[{u, v}] += c;
        largest_single_ = std::max(largest_single_, std::abs(c));
    }

    /// Largest magnitude passed to a single add(), before terms are merged.
    [[nodiscard]] double largest_single() const noexcept { return largest_single_; }

    [[nodiscard]] std::vector<QuboTerm> flatten() const {
        std::vector<QuboTerm> out;
        out.reserve(terms_.size());
        for (const auto& [key, c] : terms_) {
            if (std::abs(c) > 1e-12) out.push_back({key.first, key.second, c});
        }
        return out;
    }

private:
    std::map<std::pair<std::size_t, std::size_t>, double> terms_;
    double largest_single_ = 0.0;
};

/// lambda * (sum x - 1)^2 with x^2 = x, constant part returned.
inline double add_one_hot(TermAccumulator& acc, const std::vector<std::size_t>& vars, double lambda) {
    for (std::size_t a = 0; a < vars.size(); ++a) {
        acc.add(vars[a], vars[a], -lambda);
        for (std::size_t b = a + 1; b < vars.size(); ++b) acc.add(vars[a], vars[b], 2.0 * lambda);
    }
    return lambda;
}

}  // namespace qubo_detail

/**
 * @brief Objective for layers [chunk.lo, chunk.hi).
 *
 * `penalty`, when unset, is twice the largest single cost contribution,
 * taken before repeated CNOTs merge into one coefficient (1 if the cost
 * part is empty).
 */
[[nodiscard]] inline QuboProblem build_chunk_qubo(const Chunk& chunk, const std::vector<Layer>& layers,
                                                  const Device& device, const MoveCostModel& model,
                                                  const std::vector<BoundaryTerm>& boundaries,
                                                  std::optional<double> penalty = std::nullopt) {
    const auto n = device.num_qubits();
    if (chunk.hi <= chunk.lo) throw Error(ErrorKind::EmptyChunk, "chunk " + std::to_string(chunk.index) + " has no layers");
    if (chunk.hi > layers.size()) throw Error(ErrorKind::DimensionMismatch, "chunk extends past the last layer");
    if (model.n != n) {
        throw Error(ErrorKind::DimensionMismatch, "move model has " + std::to_string(model.n) + " qubits, device has " +
                                                      std::to_string(n));
    }
    if (penalty && !(*penalty > 0.0)) throw Error(ErrorKind::InvalidArgument, "penalty weight must be positive");

    QuboProblem problem;
    problem.layout = {chunk.num_layers(), n};
    problem.num_vars = problem.layout.num_vars();
    problem.build_costs = device.build_costs();
    const auto& layout = problem.layout;
    qubo_detail::TermAccumulator acc;

    // Building cost of every CNOT in every layer.
    for (std::size_t m = 0; m < layout.num_layers; ++m) {
        auto cnots = layers[chunk.lo + m].cnots();
        for (const auto& cx : cnots) {
            if (cx.control >= n || cx.target >= n) {
                throw Error(ErrorKind::DimensionMismatch, "CNOT qubit outside the " + std::to_string(n) + "-qubit device");
            }
            for (std::size_t mu = 0; mu < n; ++mu) {
                for (std::size_t nu = 0; nu < n; ++nu) {
                    if (mu == nu) continue;
                    acc.add(layout.index(m, cx.control, mu), layout.index(m, cx.target, nu),
                            static_cast<double>(device.build_costs()(mu, nu)));
                }
            }
        }
        problem.layer_cnots.push_back(std::move(cnots));
    }

    // Surrogate moving cost between adjacent layers of the chunk.
    for (std::size_t m = 0; m + 1 < layout.num_layers; ++m) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t mu = 0; mu < n; ++mu) {
                for (std::size_t nu = 0; nu < n; ++nu) {
                    const double c = 3.0 * model.coeff(mu, nu);
                    if (c != 0.0) acc.add(layout.index(m, i, mu), layout.index(m + 1, i, nu), c);
                }
            }
        }
    }

    // Moving cost towards frozen neighbours, weighted by 1/distance.
    for (const auto& b : boundaries) {
        if (b.distance == 0) throw Error(ErrorKind::InvalidArgument, "boundary distance must be at least 1");
        if (!is_permutation_of(b.mapping, n)) {
            throw Error(ErrorKind::DimensionMismatch, "boundary mapping is not a bijection over the device");
        }
        const double weight = 3.0 / static_cast<double>(b.distance);
        const std::size_t m = b.side == BoundarySide::Left ? 0 : layout.num_layers - 1;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t mu = 0; mu < n; ++mu) {
                const double a = b.side == BoundarySide::Left ? model.coeff(b.mapping[i], mu) : model.coeff(mu, b.mapping[i]);
                if (a != 0.0) acc.add(layout.index(m, i, mu), layout.index(m, i, mu), weight * a);
            }
        }
    }

    const double cost_max = acc.largest_single();
    const double lambda = penalty.value_or(cost_max > 0.0 ? 2.0 * cost_max : 1.0);
    problem.penalty = lambda;

    std::vector<std::size_t> vars(n);
    for (std::size_t m = 0; m < layout.num_layers; ++m) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t mu = 0; mu < n; ++mu) vars[mu] = layout.index(m, i, mu);
            problem.constant += qubo_detail::add_one_hot(acc, vars, lambda);
        }
        for (std::size_t mu = 0; mu < n; ++mu) {
            for (std::size_t i = 0; i < n; ++i) vars[i] = layout.index(m, i, mu);
            problem.constant += qubo_detail::add_one_hot(acc, vars, lambda);
        }
    }
    problem.terms = acc.flatten();
    return problem;
}

[[nodiscard]] inline double energy(const QuboProblem& problem, const std::vector<std::uint8_t>& bits) {
    if (bits.size() != problem.num_vars) {
        throw Error(ErrorKind::LengthMismatch, "expected " + std::to_string(problem.num_vars) + " bits, got " +
                                                   std::to_string(bits.size()));
    }
    double e = problem.constant;
    for (const auto& t : problem.terms) {
        if (bits[t.u] && bits[t.v]) e += t.coeff;
    }
    return e;
}

/// One-hot bit vector for a sequence of layer mappings.
[[nodiscard]] inline std::vector<std::uint8_t> encode_mappings(const VarLayout& layout,
                                                               const std::vector<LayerMapping>& mappings) {
    if (mappings.size() != layout.num_layers) throw Error(ErrorKind::DimensionMismatch, "one mapping per layer expected");
    std::vector<std::uint8_t> bits(layout.num_vars(), 0);
    for (std::size_t m = 0; m < mappings.size(); ++m) {
        if (!is_permutation_of(mappings[m], layout.n)) throw Error(ErrorKind::DimensionMismatch, "mapping is not a bijection");
        for (std::size_t i = 0; i < layout.n; ++i) bits[layout.index(m, i, mappings[m][i])] = 1;
    }
    return bits;
}

/**
 * @brief Per-layer mappings from a solver bitstring, repairing infeasible rows.
 *
 * Valid permutation matrices are returned unchanged. Otherwise set bits are
 * accepted in (i, mu) order while row and column are both free, and every
 * remaining logical qubit, in ascending order, takes the free physical qubit
 * that adds the least building cost with already placed partners.
 */
[[nodiscard]] inline std::vector<LayerMapping> decode_solution(const QuboProblem& problem,
                                                               const std::vector<std::uint8_t>& bits) {
    if (bits.size() != problem.num_vars) {
        throw Error(ErrorKind::LengthMismatch, "expected " + std::to_string(problem.num_vars) + " bits, got " +
                                                   std::to_string(bits.size()));
    }
    const auto& layout = problem.layout;
    const auto n = layout.n;
    constexpr std::size_t kFree = std::numeric_limits<std::size_t>::max();
    std::vector<LayerMapping> out;
    for (std::size_t m = 0; m < layout.num_layers; ++m) {
        LayerMapping mapping(n, kFree);
        std::vector<bool> column_used(n, false);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t mu = 0; mu < n; ++mu) {
                if (bits[layout.index(m, i, mu)] && mapping[i] == kFree && !column_used[mu]) {
                    mapping[i] = mu;
                    column_used[mu] = true;
                }
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (mapping[i] != kFree) continue;
            std::size_t best = kFree;
            long best_cost = std::numeric_limits<long>::max();
            for (std::size_t mu = 0; mu < n; ++mu) {
                if (column_used[mu]) continue;
                long added = 0;
                for (const auto& cx : problem.layer_cnots[m]) {
                    std::size_t partner = cx.control == i ? cx.target : cx.target == i ? cx.control : kFree;
                    if (partner == kFree || mapping[partner] == kFree) continue;
                    added += problem.build_costs(mu, mapping[partner]);
                }
                if (added < best_cost) {
                    best_cost = added;
                    best = mu;
                }
            }
            mapping[i] = best;
            column_used[best] = true;
        }
        out.push_back(std::move(mapping));
    }
    return out;
}

[[nodiscard]] inline nlohmann::json qubo_to_json(const QuboProblem& problem) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : problem.terms) terms.push_back({t.u, t.v, t.coeff});
    return {{"num_vars", problem.num_vars}, {"terms", terms}, {"constant", problem.constant}};
}

}  // namespace isaaq
