/**
 * @file gf2.hpp
 * @brief CNOT circuits as invertible matrices over GF(2).
 *
 * Row q holds the parity, over the input wires, currently carried by wire q;
 * CNOT(c, t) adds row c into row t. Rows are 64-bit masks, so at most 64 wires.
 */

#pragma once

#include "isaaq/circuit.hpp"
#include "isaaq/error.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace isaaq {

inline constexpr std::size_t kMaxGf2Wires = 64;

class Gf2Matrix {
public:
    explicit Gf2Matrix(std::size_t n) : rows_(n) {
        if (n > kMaxGf2Wires) {
            throw Error(ErrorKind::TooLarge, std::to_string(n) + " wires exceed the GF(2) tracker limit of 64");
        }
        for (std::size_t q = 0; q < n; ++q) rows_[q] = std::uint64_t{1} << q;
    }

    [[nodiscard]] std::size_t size() const noexcept { return rows_.size(); }
    [[nodiscard]] std::uint64_t row(std::size_t q) const { return rows_[q]; }
    void set_row(std::size_t q, std::uint64_t value) { rows_[q] = value; }

    void cnot(std::size_t control, std::size_t target) { rows_[target] ^= rows_[control]; }
    void cnot(const CnotGate& g) { cnot(g.control, g.target); }

    friend bool operator==(const Gf2Matrix&, const Gf2Matrix&) = default;

private:
    std::vector<std::uint64_t> rows_;
};

/// Matrix of a CNOT list acting on `n` wires.
[[nodiscard]] inline Gf2Matrix gf2_of(std::size_t n, const std::vector<CnotGate>& gates) {
    Gf2Matrix m(n);
    for (const auto& g : gates) m.cnot(g);
    return m;
}

}  // namespace isaaq
