#include "oracles.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

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

// Floyd-Warshall, independent of the BFS used by the library.
std::vector<std::vector<int>> floyd(std::size_t n, const std::vector<Edge>& edges) {
    const int inf = 1 << 20;
    std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
    for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
    for (auto [u, v] : edges) d[u][v] = d[v][u] = 1;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    return d;
}

bool connected(const Device& d) {
    for (std::size_t a = 0; a < d.num_qubits(); ++a)
        for (std::size_t b = 0; b < d.num_qubits(); ++b)
            if (d.distance(a, b) < 0 || d.distance(a, b) > static_cast<int>(d.num_qubits())) return false;
    return true;
}

}  // namespace

TEST(Distance, RingOfFour) {
    auto d = builtin_device("ring:4");
    EXPECT_EQ(d.distance(0, 2), 2);
    EXPECT_EQ(d.distance(0, 1), 1);
}

TEST(Distance, LineAndSingle) {
    EXPECT_EQ(builtin_device("linear:4").distance(0, 3), 3);
    auto one = builtin_device("linear:1");
    EXPECT_EQ(one.num_qubits(), 1u);
    EXPECT_EQ(one.distance(0, 0), 0);
}

TEST(Distance, DisconnectedGraphRejected) {
    EXPECT_EQ(kind_of([] { (void)all_pairs_distance(4, {{0, 1}, {2, 3}}); }), ErrorKind::DisconnectedGraph);
}

TEST(BuildCost, Fixtures) {
    auto line = builtin_device("linear:4");
    EXPECT_EQ(build_cost(line, 0, 1), 1);
    EXPECT_EQ(build_cost(line, 0, 2), 4);
    EXPECT_EQ(build_cost(line, 0, 3), 8);
    EXPECT_EQ(kind_of([&] { (void)build_cost(line, 2, 2); }), ErrorKind::SameQubit);
}

TEST(BuildCost, PropertiesAgainstFloyd) {
    for (const char* spec : {"linear:7", "ring:7", "star:3:7", "ibm_qx5", "ibm_qx20"}) {
        auto dev = builtin_device(spec);
        auto ref = floyd(dev.num_qubits(), dev.edges());
        for (std::size_t a = 0; a < dev.num_qubits(); ++a) {
            for (std::size_t b = 0; b < dev.num_qubits(); ++b) {
                EXPECT_EQ(dev.distance(a, b), ref[a][b]) << spec;
                if (a == b) continue;
                const int c = build_cost(dev, a, b);
                EXPECT_EQ(c, oracle::expected_build_cost(ref[a][b]));
                EXPECT_EQ(c, build_cost(dev, b, a));
                EXPECT_GE(c, 1);
                EXPECT_EQ(c == 1, dev.adjacent(a, b));
                for (std::size_t k = 0; k < dev.num_qubits(); ++k) {
                    EXPECT_LE(dev.distance(a, b), dev.distance(a, k) + dev.distance(k, b));
                }
            }
        }
    }
}

TEST(Builtin, Shapes) {
    auto ring = builtin_device("ring:4");
    EXPECT_EQ(ring.num_qubits(), 4u);
    for (auto [u, v] : std::vector<Edge>{{0, 1}, {1, 2}, {2, 3}, {3, 0}}) EXPECT_TRUE(ring.adjacent(u, v));
    EXPECT_EQ(ring.edges().size(), 4u);
    EXPECT_EQ(builtin_device("ibm_qx5").num_qubits(), 16u);
    EXPECT_EQ(builtin_device("ibm_qx20").num_qubits(), 20u);

    auto star = builtin_device("star:2:5");
    EXPECT_EQ(star.num_qubits(), 5u);
    for (std::size_t q : {0u, 1u, 3u, 4u}) EXPECT_TRUE(star.adjacent(2, q));
    EXPECT_EQ(build_cost(star, 0, 2) + build_cost(star, 0, 3) + build_cost(star, 0, 4), 9);
}

TEST(Builtin, Errors) {
    EXPECT_EQ(kind_of([] { (void)builtin_device("torus:4"); }), ErrorKind::UnknownDevice);
    EXPECT_EQ(kind_of([] { (void)load_device("no_such_device"); }), ErrorKind::UnknownDevice);
    EXPECT_EQ(kind_of([] { (void)Device("bad", 3, {{0, 1}}); }), ErrorKind::InvalidTopology);
    EXPECT_EQ(kind_of([] { (void)Device("bad", 3, {{0, 1}, {1, 3}}); }), ErrorKind::InvalidTopology);
    EXPECT_EQ(kind_of([] { (void)Device("bad", 2, {{0, 0}, {0, 1}}); }), ErrorKind::InvalidTopology);
}

TEST(DeviceFiles, ShippedFilesMatchBuiltins) {
    for (const char* name : {"ibm_qx5", "ibm_qx20"}) {
        auto file = load_device_file(oracle::source_path(std::string("data/devices/") + name + ".json"));
        auto builtin = builtin_device(name);
        ASSERT_EQ(file.num_qubits(), builtin.num_qubits());
        for (std::size_t a = 0; a < file.num_qubits(); ++a)
            for (std::size_t b = 0; b < file.num_qubits(); ++b) EXPECT_EQ(file.distance(a, b), builtin.distance(a, b));
    }
}

TEST(DeviceFiles, JsonRoundTrip) {
    auto dev = builtin_device("star:1:4");
    auto path = std::filesystem::temp_directory_path() / "isaaq_device_roundtrip.json";
    {
        std::ofstream out(path);
        out << device_to_json(dev).dump();
    }
    auto back = load_device(path.string());
    EXPECT_EQ(back.name(), dev.name());
    EXPECT_EQ(back.edges().size(), dev.edges().size());
    std::filesystem::remove(path);
}

TEST(Subset, FullDeviceIsIdentity) {
    auto dev = builtin_device("ring:6");
    auto sub = select_subset(dev, 6);
    EXPECT_EQ(sub.physical, identity_arrangement(6));
    EXPECT_EQ(sub.device.edges().size(), 6u);
}

TEST(Subset, RingMinusOneIsPath) {
    auto sub = select_subset(builtin_device("ring:4"), 3);
    EXPECT_EQ(sub.device.num_qubits(), 3u);
    EXPECT_EQ(sub.device.edges().size(), 2u);
    EXPECT_EQ(sub.device.diameter(), 2);
}

TEST(Subset, Qx20SevenFixture) {
    // Frozen from an independent re-run of the greedy (Floyd distances, tie to lowest index).
    auto sub = select_subset(builtin_device("ibm_qx20"), 7);
    EXPECT_EQ(sub.physical, (std::vector<std::size_t>{0, 1, 2, 5, 6, 7, 10}));
}

TEST(Subset, PropertiesConnectedAndDeterministic) {
    for (const char* spec : {"ibm_qx5", "ibm_qx20", "linear:9", "star:4:9"}) {
        auto dev = builtin_device(spec);
        for (std::size_t k = 1; k <= dev.num_qubits(); ++k) {
            auto a = select_subset(dev, k);
            auto b = select_subset(dev, k);
            EXPECT_EQ(a.physical, b.physical);
            EXPECT_EQ(a.device.num_qubits(), k);
            EXPECT_TRUE(connected(a.device));
            for (auto [u, v] : a.device.edges()) EXPECT_TRUE(dev.adjacent(a.physical[u], a.physical[v]));
        }
        EXPECT_EQ(kind_of([&] { (void)select_subset(dev, dev.num_qubits() + 1); }), ErrorKind::SubsetInfeasible);
    }
}
