#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace isaaq;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no isaaq::Error thrown";
    return ErrorKind::InvalidArgument;
}

bool same_cnot(const CnotGate& a, const CnotGate& b) { return a.control == b.control && a.target == b.target; }

}  // namespace

TEST(Qasm, ParsesSingleCnot) {
    auto c = parse_qasm("qreg q[2]; cx q[0],q[1];");
    EXPECT_EQ(c.num_qubits(), 2u);
    ASSERT_EQ(c.gates().size(), 1u);
    auto cx = std::get<CnotGate>(c.gates()[0]);
    EXPECT_EQ(cx.control, 0u);
    EXPECT_EQ(cx.target, 1u);
}

TEST(Qasm, SingleQubitGatesPassThrough) {
    auto c = parse_qasm("qreg q[1]; t q[0]; h q[0];");
    ASSERT_EQ(c.gates().size(), 2u);
    EXPECT_EQ(std::get<SingleQubitGate>(c.gates()[0]).name, "t");
    EXPECT_EQ(std::get<SingleQubitGate>(c.gates()[1]).name, "h");
    EXPECT_EQ(c.cnot_count(), 0u);
}

TEST(Qasm, RejectsThreeQubitGates) {
    EXPECT_EQ(kind_of([] { (void)parse_qasm("qreg q[3]; ccx q[0],q[1],q[2];"); }), ErrorKind::MultiQubitUnsupported);
}

TEST(Qasm, ReportsMalformedAndOutOfRange) {
    EXPECT_EQ(kind_of([] { (void)parse_qasm("qreg q[2]; cx q[0] q[1]"); }), ErrorKind::MalformedSource);
    EXPECT_EQ(kind_of([] { (void)parse_qasm("cx q[0],q[1];"); }), ErrorKind::MalformedSource);
    EXPECT_EQ(kind_of([] { (void)parse_qasm("qreg q[2]; cx q[0],q[2];"); }), ErrorKind::IndexOutOfRange);
    EXPECT_EQ(kind_of([] { (void)parse_qasm("qreg q[2]; cx q[1],q[1];"); }), ErrorKind::MalformedSource);
}

TEST(Qasm, IgnoresHeaderMeasureAndComments) {
    auto c = parse_qasm(
        "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n// note\nqreg q[2];\ncreg c[2];\n"
        "rz(pi/4) q[1]; cx q[1],q[0];\nmeasure q[0] -> c[0];\n");
    ASSERT_EQ(c.gates().size(), 2u);
    const auto& rz = std::get<SingleQubitGate>(c.gates()[0]);
    EXPECT_EQ(rz.name, "rz");
    ASSERT_EQ(rz.params.size(), 1u);
    EXPECT_NEAR(rz.params[0], std::numbers::pi / 4, 1e-15);
}

TEST(Qasm, RoundTripIsIdentical) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        auto c = oracle::random_circuit(2 + trial % 6, 20, 15, rng);
        auto again = parse_qasm(to_qasm(c));
        EXPECT_EQ(again, c) << "trial " << trial;
    }
}

TEST(CnotGates, Examples) {
    EXPECT_TRUE(cnot_gates(LogicalCircuit(3)).empty());
    LogicalCircuit c(2);
    c.add_single("h", 0);
    c.add_cnot(0, 1);
    c.add_single("t", 1);
    auto g = cnot_gates(c);
    ASSERT_EQ(g.size(), 1u);
    EXPECT_TRUE(same_cnot(g[0], {0, 1}));
}

TEST(CnotGates, FullAdderCount) {
    // Counted from the shipped full-adder circuit.
    EXPECT_EQ(cnot_gates(oracle::full_adder()).size(), 11u);
}

TEST(Groups, SharedControl) {
    auto groups = commuting_shared_groups({{0, 1}, {0, 2}, {0, 3}});
    ASSERT_EQ(groups.size(), 1u);
    EXPECT_EQ(groups[0].shared, 0u);
    EXPECT_EQ(groups[0].role, SharedRole::Control);
    EXPECT_EQ(groups[0].gates.size(), 3u);
}

TEST(Groups, NonCommutingPairSplits) {
    auto groups = commuting_shared_groups({{0, 1}, {1, 2}});
    ASSERT_EQ(groups.size(), 2u);
    EXPECT_EQ(groups[0].gates.size(), 1u);
    EXPECT_EQ(groups[1].gates.size(), 1u);
}

TEST(Groups, SharedTarget) {
    auto groups = commuting_shared_groups({{0, 1}, {2, 1}, {3, 1}});
    ASSERT_EQ(groups.size(), 1u);
    EXPECT_EQ(groups[0].shared, 1u);
    EXPECT_EQ(groups[0].role, SharedRole::Target);
}

TEST(Groups, PropertyConcatenationAndCommutation) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + trial % 5;
        auto gates = cnot_gates(oracle::random_circuit(n, 1 + trial % 25, 0, rng));
        auto groups = commuting_shared_groups(gates);
        std::vector<CnotGate> flat;
        for (const auto& g : groups) {
            ASSERT_FALSE(g.gates.empty());
            for (const auto& a : g.gates) {
                if (g.gates.size() > 1) {
                    EXPECT_EQ(g.role == SharedRole::Control ? a.control : a.target, g.shared);
                }
                for (const auto& b : g.gates) {
                    // commute iff neither control is the other's target
                    EXPECT_TRUE(a.control != b.target && b.control != a.target);
                }
            }
            // Any order inside the group has the same linear action.
            auto reversed = g.gates;
            std::reverse(reversed.begin(), reversed.end());
            EXPECT_EQ(gf2_of(n, g.gates), gf2_of(n, reversed));
            flat.insert(flat.end(), g.gates.begin(), g.gates.end());
        }
        ASSERT_EQ(flat.size(), gates.size());
        for (std::size_t i = 0; i < flat.size(); ++i) EXPECT_TRUE(same_cnot(flat[i], gates[i]));
        // maximality: the first gate of each later group cannot extend its predecessor
        for (std::size_t k = 1; k < groups.size(); ++k) {
            const auto& prev = groups[k - 1];
            const auto& next = groups[k].gates.front();
            if (prev.gates.size() >= 2) { EXPECT_FALSE(can_extend(prev, next)); }
        }
    }
}
