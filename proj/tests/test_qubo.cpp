#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace isaaq;

namespace {

MoveCostModel zero_model(std::size_t n) {
    MoveCostModel m;
    m.n = n;
    m.a.assign(n * n, 0.0);
    return m;
}

bool feasible(const VarLayout& layout, const std::vector<std::uint8_t>& bits) {
    for (std::size_t m = 0; m < layout.num_layers; ++m) {
        for (std::size_t i = 0; i < layout.n; ++i) {
            int row = 0, col = 0;
            for (std::size_t mu = 0; mu < layout.n; ++mu) {
                row += bits[layout.index(m, i, mu)];
                col += bits[layout.index(m, mu, i)];
            }
            if (row != 1 || col != 1) return false;
        }
    }
    return true;
}

// All sequences of `layers` permutations of n.
void for_each_sequence(std::size_t n, std::size_t layers, const std::function<void(const std::vector<LayerMapping>&)>& f) {
    const auto perms = oracle::all_permutations(n);
    std::vector<std::size_t> idx(layers, 0);
    for (;;) {
        std::vector<LayerMapping> seq;
        for (auto k : idx) seq.push_back(perms[k]);
        f(seq);
        std::size_t pos = 0;
        while (pos < layers && ++idx[pos] == perms.size()) idx[pos++] = 0;
        if (pos == layers) return;
    }
}

LogicalCircuit random_cnots(std::size_t n, std::size_t count, std::mt19937_64& rng) {
    return oracle::random_circuit(n, count, 0, rng);
}

}  // namespace

TEST(Energy, Examples) {
    QuboProblem q;
    q.num_vars = 2;
    EXPECT_EQ(energy(q, {0, 0}), 0.0);
    q.terms = {{0, 0, -1.0}};
    EXPECT_EQ(energy(q, {1, 0}), -1.0);
    q.terms = {{0, 1, 2.0}};
    EXPECT_EQ(energy(q, {1, 1}), 2.0);
    try {
        (void)energy(q, {1});
        FAIL() << "expected LengthMismatch";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::LengthMismatch);
    }
}

TEST(BuildQubo, SingleCnotOnTwoQubitLine) {
    auto dev = builtin_device("linear:2");
    LogicalCircuit c(2);
    c.add_cnot(0, 1);
    auto layers = slice_layers(c);
    auto chunks = group_chunks(layers.size(), 2);
    auto q = build_chunk_qubo(chunks[0], layers, dev, zero_model(2), {}, 10.0);
    EXPECT_EQ(q.num_vars, 4u);
    EXPECT_EQ(q.penalty, 10.0);
    for (const auto& t : q.terms) {
        EXPECT_LE(t.u, t.v);
        EXPECT_NE(t.coeff, 0.0);
    }
    EXPECT_NEAR(energy(q, encode_mappings(q.layout, {{0, 1}})), 1.0, 1e-12);
    EXPECT_NEAR(energy(q, encode_mappings(q.layout, {{1, 0}})), 1.0, 1e-12);
    auto best = oracle::brute_force_minimum(q);
    EXPECT_NEAR(best.energy, 1.0, 1e-12);

    // l0 on both p0 and p1, l1 on p1: row l0 is violated by one extra bit
    std::vector<std::uint8_t> bits(4, 0);
    bits[q.layout.index(0, 0, 0)] = 1;
    bits[q.layout.index(0, 0, 1)] = 1;
    bits[q.layout.index(0, 1, 1)] = 1;
    // row l0: (2-1)^2 = 1, column p1: (2-1)^2 = 1, plus CNOT cost c(p0,p1) = 1
    EXPECT_NEAR(energy(q, bits), 10.0 + 10.0 + 1.0, 1e-12);
}

TEST(BuildQubo, MovingEnergyWithTwoQubitModel) {
    auto dev = builtin_device("linear:2");
    auto model = uniform_init(dev);
    LogicalCircuit c(2);
    c.add_single("h", 0);
    std::vector<Layer> layers = {Layer{0, {}, 0}, Layer{1, {}, 0}};
    Chunk chunk{0, 0, 2, 8};
    auto q = build_chunk_qubo(chunk, layers, dev, model, {}, 10.0);
    EXPECT_NEAR(energy(q, encode_mappings(q.layout, {{0, 1}, {0, 1}})), 0.0, 1e-12);
    EXPECT_NEAR(energy(q, encode_mappings(q.layout, {{0, 1}, {1, 0}})), 3.0, 1e-12);
}

TEST(BuildQubo, DefaultPenaltyAndErrors) {
    auto dev = builtin_device("linear:3");
    LogicalCircuit c(3);
    c.add_cnot(0, 2);
    auto layers = slice_layers(c);
    auto q = build_chunk_qubo({0, 0, 1, 9}, layers, dev, zero_model(3), {});
    EXPECT_NEAR(q.penalty, 2.0 * 4.0, 1e-12);  // largest cost coefficient is c(d=2) = 4
    auto empty = build_chunk_qubo({0, 0, 1, 9}, slice_layers(LogicalCircuit(3)), dev, zero_model(3), {});
    EXPECT_EQ(empty.penalty, 1.0);

    auto kind = [](const std::function<void()>& f) {
        try {
            f();
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::InvalidArgument;
    };
    EXPECT_EQ(kind([&] { (void)build_chunk_qubo({0, 0, 0, 0}, layers, dev, zero_model(3), {}); }), ErrorKind::EmptyChunk);
    EXPECT_EQ(kind([&] { (void)build_chunk_qubo({0, 0, 1, 9}, layers, dev, zero_model(4), {}); }),
              ErrorKind::DimensionMismatch);
    EXPECT_EQ(kind([&] { (void)build_chunk_qubo({0, 0, 1, 9}, layers, dev, zero_model(3), {{BoundarySide::Left, {0, 0, 1}, 1}}); }),
              ErrorKind::DimensionMismatch);
}

TEST(BuildQubo, FeasibleEnergyEqualsDirectObjective) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 3 + trial % 3;
        auto dev = builtin_device((trial % 2 ? "ring:" : "linear:") + std::to_string(n));
        auto model = uniform_init(dev);
        auto circuit = random_cnots(n, 12, rng);
        auto layers = slice_layers(circuit, 3);
        Chunk chunk{0, 0, layers.size(), layers.size() * n * n};
        std::vector<BoundaryTerm> boundaries;
        auto perm = identity_arrangement(n);
        std::shuffle(perm.begin(), perm.end(), rng);
        boundaries.push_back({BoundarySide::Left, perm, 1 + static_cast<std::size_t>(trial % 3)});
        std::shuffle(perm.begin(), perm.end(), rng);
        boundaries.push_back({BoundarySide::Right, perm, 2});
        auto q = build_chunk_qubo(chunk, layers, dev, model, boundaries);
        for (int s = 0; s < 10; ++s) {
            std::vector<LayerMapping> maps;
            for (std::size_t m = 0; m < layers.size(); ++m) {
                std::shuffle(perm.begin(), perm.end(), rng);
                maps.push_back(perm);
            }
            const double direct = oracle::mapping_objective(layers, chunk, maps, dev, model, boundaries);
            EXPECT_NEAR(energy(q, encode_mappings(q.layout, maps)), direct, 1e-9);
        }
    }
}

TEST(BuildQubo, BruteForceFeasibleMinimumMatchesMappingSearch) {
    std::mt19937_64 rng(23);
    struct Case {
        std::string device;
        std::size_t layers;
    };
    for (const Case& cs : {Case{"linear:2", 4}, Case{"linear:3", 1}, Case{"ring:4", 1}, Case{"linear:4", 1}, Case{"linear:2", 3}}) {
        for (int trial = 0; trial < 3; ++trial) {
            auto dev = builtin_device(cs.device);
            const auto n = dev.num_qubits();
            auto model = uniform_init(dev);
            auto circuit = random_cnots(n, cs.layers * 2, rng);
            auto layers = slice_layers(circuit, 2);
            layers.resize(cs.layers, Layer{});
            for (std::size_t m = 0; m < layers.size(); ++m) layers[m].index = m;
            Chunk chunk{0, 0, cs.layers, cs.layers * n * n};
            std::vector<BoundaryTerm> boundaries;
            if (trial > 0) {
                auto perm = identity_arrangement(n);
                std::shuffle(perm.begin(), perm.end(), rng);
                boundaries.push_back({trial == 1 ? BoundarySide::Left : BoundarySide::Right, perm, 1});
            }
            auto q = build_chunk_qubo(chunk, layers, dev, model, boundaries);
            ASSERT_LE(q.num_vars, 16u);

            double best_feasible = std::numeric_limits<double>::infinity();
            std::vector<std::uint8_t> bits(q.num_vars);
            for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << q.num_vars); ++mask) {
                for (std::size_t v = 0; v < q.num_vars; ++v) bits[v] = (mask >> v) & 1u;
                if (feasible(q.layout, bits)) best_feasible = std::min(best_feasible, energy(q, bits));
            }
            double best_mapping = std::numeric_limits<double>::infinity();
            for_each_sequence(n, cs.layers, [&](const std::vector<LayerMapping>& seq) {
                best_mapping = std::min(best_mapping, oracle::mapping_objective(layers, chunk, seq, dev, model, boundaries));
            });
            EXPECT_NEAR(best_feasible, best_mapping, 1e-9) << cs.device;
        }
    }
}

TEST(Decode, ValidPermutationUnchanged) {
    std::mt19937_64 rng(2);
    for (std::size_t n = 1; n <= 8; ++n) {
        VarLayout layout{3, n};
        QuboProblem q;
        q.layout = layout;
        q.num_vars = layout.num_vars();
        q.layer_cnots.assign(3, {});
        q.build_costs = builtin_device("linear:" + std::to_string(n)).build_costs();
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<LayerMapping> maps;
            for (int m = 0; m < 3; ++m) {
                auto p = identity_arrangement(n);
                std::shuffle(p.begin(), p.end(), rng);
                maps.push_back(p);
            }
            EXPECT_EQ(decode_solution(q, encode_mappings(layout, maps)), maps);
        }
    }
}

TEST(Decode, RepairsInfeasibleRows) {
    auto dev = builtin_device("linear:3");
    LogicalCircuit c(3);
    c.add_single("h", 0);
    auto layers = slice_layers(c);
    auto q = build_chunk_qubo({0, 0, 1, 9}, layers, dev, zero_model(3), {});

    std::vector<std::uint8_t> zeros(9, 0);
    EXPECT_EQ(decode_solution(q, zeros), (std::vector<LayerMapping>{{0, 1, 2}}));

    std::vector<std::uint8_t> bits(9, 0);
    bits[q.layout.index(0, 0, 0)] = 1;
    bits[q.layout.index(0, 1, 0)] = 1;
    bits[q.layout.index(0, 2, 2)] = 1;
    EXPECT_EQ(decode_solution(q, bits), (std::vector<LayerMapping>{{0, 1, 2}}));
}

TEST(Decode, RepairPrefersCheapPartners) {
    auto dev = builtin_device("linear:4");
    LogicalCircuit c(4);
    c.add_cnot(0, 3);
    auto layers = slice_layers(c);
    auto q = build_chunk_qubo({0, 0, 1, 16}, layers, dev, zero_model(4), {});
    std::vector<std::uint8_t> bits(16, 0);
    bits[q.layout.index(0, 0, 3)] = 1;  // l0 pinned to p3, everything else free
    auto maps = decode_solution(q, bits);
    ASSERT_EQ(maps.size(), 1u);
    EXPECT_EQ(maps[0][0], 3u);
    EXPECT_EQ(maps[0][3], 2u);  // neighbour of p3
    EXPECT_TRUE(is_permutation_of(maps[0], 4));
}

TEST(Decode, AlwaysBijectionOnRandomBits) {
    std::mt19937_64 rng(8);
    auto dev = builtin_device("ring:5");
    auto circuit = random_cnots(5, 10, rng);
    auto layers = slice_layers(circuit, 5);
    auto q = build_chunk_qubo({0, 0, 2, 50}, layers, dev, uniform_init(dev), {});
    std::bernoulli_distribution coin(0.3);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::uint8_t> bits(q.num_vars);
        for (auto& b : bits) b = coin(rng);
        for (const auto& m : decode_solution(q, bits)) EXPECT_TRUE(is_permutation_of(m, 5));
    }
}

TEST(Json, Dump) {
    QuboProblem q;
    q.num_vars = 2;
    q.terms = {{0, 1, 2.5}};
    q.constant = 1.0;
    auto j = qubo_to_json(q);
    EXPECT_EQ(j["num_vars"], 2);
    EXPECT_EQ(j["terms"][0][2], 2.5);
    EXPECT_EQ(j["constant"], 1.0);
}
