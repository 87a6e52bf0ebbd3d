#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace isaaq;
namespace fs = std::filesystem;

namespace {

CompileConfig pinned(std::uint64_t seed = 1) {
    CompileConfig c;
    c.sweeps = 300;
    c.seed = seed;
    return c;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("isaaq_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(ISAAQ_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void expect_on_device_edges(const PhysicalCircuit& pc, const Device& dev) {
    for (const auto& g : pc.gates) {
        if (const auto* cx = std::get_if<CnotGate>(&g)) { EXPECT_TRUE(dev.adjacent(cx->control, cx->target)); }
    }
}

}  // namespace

TEST(Compile, FullAdderOnRing) {
    auto dev = oracle::example_ring();
    auto c = oracle::full_adder();
    for (auto strategy : {Strategy::Independent, Strategy::Sequential, Strategy::Binary}) {
        auto config = pinned();
        config.strategy = strategy;
        config.layer_cap = 4;
        config.var_budget = 48;
        auto out = compile(c, dev, config);
        EXPECT_TRUE(out.verified);
        EXPECT_EQ(out.num_layers, 3u);
        EXPECT_EQ(out.num_chunks, 1u);
        EXPECT_EQ(out.circuit.stats.total, out.circuit.cnot_count());
        EXPECT_EQ(out.circuit.stats.logical_cnots, 11u);
        expect_on_device_edges(out.circuit, dev);
        EXPECT_LT(oracle::statevector_distance(c, out.circuit, out.mappings.front(), out.mappings.back()), 1e-9);
    }
}

TEST(Compile, DeterministicWithPinnedSweeps) {
    auto dev = builtin_device("ring:6");
    std::mt19937_64 rng(4);
    auto c = oracle::random_circuit(6, 40, 10, rng);
    auto config = pinned(9);
    config.var_budget = 80;
    config.layer_cap = 5;
    auto a = compile(c, dev, config);
    auto b = compile(c, dev, config);
    EXPECT_GT(a.num_chunks, 1u);
    EXPECT_EQ(a.circuit.gates, b.circuit.gates);
    EXPECT_EQ(a.mappings, b.mappings);
    EXPECT_EQ(a.circuit.stats.total, b.circuit.stats.total);
    config.solvers = 3;
    auto c3 = compile(c, dev, config);
    EXPECT_EQ(a.circuit.gates, c3.circuit.gates);
    EXPECT_LE(c3.max_in_flight, 3u);
}

TEST(Compile, RelabelsOntoLargeDevice) {
    auto dev = builtin_device("ibm_qx20");
    std::mt19937_64 rng(10);
    auto c = oracle::random_circuit(5, 20, 5, rng);
    auto out = compile(c, dev, pinned());
    EXPECT_EQ(out.circuit.num_qubits, 20u);
    EXPECT_EQ(out.physical.size(), 5u);
    expect_on_device_edges(out.circuit, dev);
    for (const auto& m : out.mappings) {
        for (auto p : m) EXPECT_NE(std::find(out.physical.begin(), out.physical.end(), p), out.physical.end());
    }
    auto text = to_qasm(out.circuit);
    EXPECT_NE(text.find("qreg q[20];"), std::string::npos);
}

TEST(Compile, EmptyAndSingleOnly) {
    auto dev = builtin_device("ring:4");
    auto out = compile(LogicalCircuit(3), dev, pinned());
    EXPECT_TRUE(out.circuit.gates.empty());
    EXPECT_EQ(out.circuit.stats.average_compilation_cost(), 0.0);
    LogicalCircuit singles(2);
    singles.add_single("h", 0);
    singles.add_single("t", 1);
    auto s = compile(singles, dev, pinned());
    EXPECT_EQ(s.circuit.gates.size(), 2u);
    EXPECT_EQ(s.circuit.stats.total, 0u);
}

TEST(Compile, Errors) {
    LogicalCircuit big(6);
    big.add_cnot(0, 5);
    try {
        (void)compile(big, builtin_device("ring:4"), pinned());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SubsetInfeasible);
    }
    LogicalCircuit c(2);
    c.add_cnot(0, 1);
    auto bad = pinned();
    bad.solvers = 0;
    EXPECT_THROW((void)compile(c, builtin_device("ring:4"), bad), Error);
    bad = pinned();
    bad.backend = "quantum";
    EXPECT_THROW((void)compile(c, builtin_device("ring:4"), bad), Error);
    bad = pinned();
    bad.var_budget = 3;
    try {
        (void)compile(c, builtin_device("ring:4"), bad);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::BudgetTooSmall);
    }
}

TEST(Compile, NaiveThroughPipeline) {
    auto dev = builtin_device("ibm_qx5");
    auto c = oracle::full_adder();
    auto config = pinned();
    config.compiler = CompilerKind::Naive;
    auto out = compile(c, dev, config);
    auto direct = compile_naive(c, select_subset(dev, 4).device);
    EXPECT_TRUE(out.verified);
    EXPECT_EQ(out.circuit.stats.total, direct.circuit.stats.total);
    EXPECT_EQ(out.mappings.size(), 1u);
    expect_on_device_edges(out.circuit, dev);
}

TEST(Stats, JsonReport) {
    auto dev = oracle::example_ring();
    auto config = pinned();
    config.layer_cap = 4;
    auto out = compile(oracle::full_adder(), dev, config);
    auto j = stats_to_json(out, config, dev.name());
    EXPECT_EQ(j["schema_version"], 1);
    EXPECT_EQ(j["device"], "example_ring");
    EXPECT_EQ(j["strategy"], "binary");
    EXPECT_EQ(j["total"].get<std::size_t>(), j["building_cost"].get<std::size_t>() + j["moving_cost"].get<std::size_t>());
    EXPECT_EQ(j["logical_cnots"], 11);
    EXPECT_EQ(j["swap_samples"].size(), out.num_layers - 1);
    EXPECT_TRUE(j["verified"].get<bool>());
    auto samples = samples_from_stats(j);
    EXPECT_EQ(samples.size(), out.samples.size());
    EXPECT_THROW((void)samples_from_stats(nlohmann::json{{"x", 1}}), Error);
}

TEST(Bench, AdjacentOnlyCorpus) {
    TempDir dir;
    const std::string head = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[3];\n";
    write_file(dir.path / "a.qasm", head + "cx q[0],q[1];\n");
    write_file(dir.path / "b.qasm", head + "cx q[1],q[2];\ncx q[0],q[1];\n");
    write_file(dir.path / "c.qasm", head + "h q[0];\ncx q[2],q[1];\n");
    write_file(dir.path / "notes.txt", "ignored");
    auto config = pinned();
    auto rows = bench(dir.path.string(), builtin_device("linear:3"), config, true);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].circuit, "a.qasm");
    for (const auto& r : rows) {
        EXPECT_TRUE(r.error.empty()) << r.error;
        EXPECT_DOUBLE_EQ(r.avg_cost, 1.0);
        EXPECT_EQ(r.baseline_avg_cost, 1.0);
    }
    auto csv = bench_csv(rows, config, true);
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    EXPECT_EQ(line, "circuit,logical_cnots,building,moving,total,avg_cost,wall_ms,strategy,seed,baseline_total,baseline_avg_cost,error");
    std::size_t count = 0;
    while (std::getline(lines, line)) {
        ++count;
        EXPECT_NE(line.find(",1.0000,"), std::string::npos) << line;
    }
    EXPECT_EQ(count, 3u);
}

TEST(Bench, FailuresBecomeRows) {
    TempDir dir;
    write_file(dir.path / "broken.qasm", "OPENQASM 2.0;\nqreg q[2];\ncx q[0],q[5];\n");
    auto rows = bench(dir.path.string(), builtin_device("linear:3"), pinned(), false);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_FALSE(rows[0].error.empty());
    EXPECT_THROW((void)bench((dir.path / "missing").string(), builtin_device("linear:3"), pinned(), false), Error);
}

TEST(Model, FitAndRefit) {
    auto dev = builtin_device("ring:4");
    auto model = uniform_init(dev);
    SwapRouter router(dev, 8, true);
    std::vector<RearrangementSample> samples;
    for (const auto& pi : oracle::all_permutations(4)) samples.push_back({pi, router.route(arrangement_for(pi)).size()});

    // all 24 rearrangements with exact counts reproduce the closed form
    MoveCostModel blank = model;
    blank.history.clear();
    auto fitted = fit(blank, samples);
    EXPECT_EQ(fitted.version, model.version + 1);
    ASSERT_EQ(fitted.a.size(), model.a.size());
    for (std::size_t k = 0; k < model.a.size(); ++k) EXPECT_NEAR(fitted.a[k], model.a[k], 1e-9);

    auto again = refit(fitted);
    EXPECT_EQ(again.version, fitted.version + 1);
    for (std::size_t k = 0; k < model.a.size(); ++k) EXPECT_NEAR(again.a[k], fitted.a[k], 1e-9);
}

TEST(Model, CompileUsesGivenModel) {
    auto dev = builtin_device("ring:4");
    auto model = uniform_init(dev);
    auto config = pinned();
    config.layer_cap = 2;
    auto c = oracle::full_adder();
    auto out = compile(c, dev, config, &model);
    EXPECT_EQ(out.samples.size(), out.num_layers - 1);
    auto wrong = uniform_init(builtin_device("ring:5"));
    try {
        (void)compile(c, dev, config, &wrong);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SchemaMismatch);
    }
}

TEST(Cli, ExitCodesAndFiles) {
    TempDir dir;
    const auto adder = oracle::source_path("benchmarks/full_adder.qasm");
    const auto out_qasm = (dir.path / "out.qasm").string();
    const auto stats = (dir.path / "stats.json").string();
    const auto model = (dir.path / "model.json").string();
    EXPECT_EQ(run_cli("compile " + adder + " --device ring:4 --sweeps 200 --layer-cap 4 -o " + out_qasm + " --stats " + stats +
                      " --model-path " + model),
              0);
    auto routed = parse_qasm(read_file(out_qasm));
    EXPECT_EQ(routed.num_qubits(), 4u);
    auto report = nlohmann::json::parse(read_file(stats));
    EXPECT_EQ(routed.cnot_count(), report["total"].get<std::size_t>());
    auto saved = load_model(model, 4);
    EXPECT_EQ(saved.history.size(), report["swap_samples"].size());

    EXPECT_EQ(run_cli("fit-model --model-path " + model + " --samples-from " + stats), 0);
    EXPECT_EQ(load_model(model, 4).version, saved.version + 1);

    EXPECT_EQ(run_cli("compile " + adder + " --device no_such_device"), 2);
    EXPECT_EQ(run_cli("compile " + adder + " --device ring:3"), 2);
    EXPECT_NE(run_cli("compile " + adder + " --device ring:4 --strategy sideways"), 0);
    EXPECT_NE(run_cli("compile"), 0);
    EXPECT_EQ(run_cli("devices --device ibm_qx5"), 0);
    EXPECT_EQ(run_cli("bench " + dir.path.string() + " --device ring:4 --sweeps 50"), 0);
}
