// Command-line front end: compile, bench, fit-model, devices.

#include "isaaq/isaaq.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace isaaq;

struct RoutingFlags {
    std::string device;
    std::string strategy = "binary";
    std::string compiler = "isaaq";
    std::size_t solvers = 1;
    std::uint64_t timeout_ms = 1000;
    std::optional<std::uint64_t> sweeps;
    std::string backend = "sa";
    std::uint64_t seed = 0;
    std::size_t layer_cap = kDefaultLayerCap;
    std::size_t var_budget = kDefaultVarBudget;
    std::optional<double> penalty;
    std::string model_path;
    std::size_t exact_limit = kDefaultExactLimit;
    bool no_relay = false;

    void attach(CLI::App& app) {
        app.add_option("--device", device, "Built-in device name or JSON device file")->required();
        app.add_option("--strategy", strategy, "Chunk schedule: independent, sequential or binary")
            ->check(CLI::IsMember({"independent", "sequential", "binary"}))
            ->capture_default_str();
        app.add_option("--compiler", compiler, "isaaq or naive")
            ->check(CLI::IsMember({"isaaq", "naive"}))
            ->capture_default_str();
        app.add_option("--solvers", solvers, "Concurrent solver instances")->check(CLI::PositiveNumber)->capture_default_str();
        app.add_option("--timeout-ms", timeout_ms, "Time budget per chunk QUBO")->check(CLI::PositiveNumber)->capture_default_str();
        app.add_option("--sweeps", sweeps, "Fixed annealing sweeps per chunk (overrides --timeout-ms)")->check(CLI::PositiveNumber);
        app.add_option("--solver-backend", backend, "sa or remote:<url>")->capture_default_str();
        app.add_option("--seed", seed, "Random seed")->capture_default_str();
        app.add_option("--layer-cap", layer_cap, "Logical CNOTs per layer")->check(CLI::PositiveNumber)->capture_default_str();
        app.add_option("--var-budget", var_budget, "Binary variables per chunk QUBO")->capture_default_str();
        app.add_option("--penalty", penalty, "One-hot penalty weight (default: twice the largest cost term)");
        app.add_option("--model-path", model_path, "Move-cost model file; created if missing, samples appended");
        app.add_option("--exact-token-swap-limit", exact_limit, "Largest device routed with exact token swapping")
            ->capture_default_str();
        app.add_flag("--no-relay", no_relay, "Build every CNOT group directly, without relay qubits");
    }

    [[nodiscard]] CompileConfig config() const {
        CompileConfig c;
        c.strategy = parse_strategy(strategy);
        c.compiler = compiler == "naive" ? CompilerKind::Naive : CompilerKind::Isaaq;
        c.solvers = solvers;
        c.timeout_ms = timeout_ms;
        c.sweeps = sweeps;
        c.backend = backend;
        c.seed = seed;
        c.layer_cap = layer_cap;
        c.var_budget = var_budget;
        c.penalty = penalty;
        c.model_path = model_path;
        c.exact_limit = exact_limit;
        c.relay = !no_relay;
        return c;
    }
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
    out << text;
    if (!out) throw Error(ErrorKind::IoError, "write failed for " + path);
}

int run_compile(const std::string& input, const RoutingFlags& flags, const std::string& output,
                const std::string& stats_path) {
    const auto device = load_device(flags.device);
    const auto circuit = load_qasm_file(input);
    auto config = flags.config();

    std::optional<MoveCostModel> model;
    const bool persist = !config.model_path.empty() && config.compiler == CompilerKind::Isaaq;
    if (persist) {
        const auto subset = subset_for(circuit, device);
        model = load_or_init_model(config.model_path, subset.device, config.exact_limit, config.seed);
    }
    const auto out = compile(circuit, device, config, model ? &*model : nullptr);
    const auto qasm = to_qasm(out.circuit);
    if (output.empty()) std::cout << qasm;
    else write_text(output, qasm);

    const auto stats = stats_to_json(out, config, device.name());
    if (!stats_path.empty()) write_text(stats_path, stats.dump(2) + "\n");
    const auto& st = out.circuit.stats;
    std::cerr << "building " << st.building_cost << ", moving " << st.moving_cost << ", total " << st.total
              << " for " << st.logical_cnots << " logical CNOTs (average " << st.average_compilation_cost() << ")\n";

    if (persist) {
        model->append_history(out.samples);
        save_model(*model, config.model_path);
    }
    return 0;
}

int run_bench(const std::string& dir, const RoutingFlags& flags, bool with_baseline, const std::string& output) {
    const auto device = load_device(flags.device);
    auto config = flags.config();
    config.model_path.clear();
    const auto rows = bench(dir, device, config, with_baseline);
    const auto csv = bench_csv(rows, config, with_baseline);
    if (output.empty()) std::cout << csv;
    else write_text(output, csv);
    return 0;
}

int run_fit(const std::string& device_spec, const std::string& model_path, const std::vector<std::string>& stats_files,
            std::size_t exact_limit) {
    std::vector<RearrangementSample> samples;
    for (const auto& path : stats_files) {
        std::ifstream in(path);
        if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::SchemaMismatch, path + ": " + e.what());
        }
        auto more = samples_from_stats(j);
        samples.insert(samples.end(), more.begin(), more.end());
    }

    MoveCostModel model;
    if (std::filesystem::exists(model_path)) {
        std::ifstream in(model_path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::SchemaMismatch, model_path + ": " + e.what());
        }
        model = model_from_json(j);
    } else {
        if (samples.empty()) throw Error(ErrorKind::EmptySampleSet, "no model file and no samples to fit");
        const auto device = load_device(device_spec);
        const auto subset = select_subset(device, samples.front().pi.size());
        model = uniform_init(subset.device, exact_limit);
    }

    MoveCostModel next = samples.empty() ? refit(model) : fit(model, samples);
    std::cout << "samples " << next.history.size() << "\n"
              << "rmse before " << rmse(model, next.history) << "\n"
              << "rmse after " << rmse(next, next.history) << "\n"
              << "version " << next.version << "\n";
    save_model(next, model_path);
    return 0;
}

int run_devices(const std::string& device_spec) {
    if (device_spec.empty()) {
        std::cout << "ibm_qx5\nibm_qx20\nlinear:<n>\nring:<n>\nstar:<hub>:<n>\n";
        return 0;
    }
    const auto device = load_device(device_spec);
    auto j = device_to_json(device);
    j["diameter"] = device.diameter();
    std::cout << j.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Qubit routing through QUBO solving"};
    app.require_subcommand(1);

    auto* compile_cmd = app.add_subcommand("compile", "Route one OpenQASM circuit");
    RoutingFlags compile_flags;
    std::string input;
    std::string output;
    std::string stats_path;
    compile_cmd->add_option("input", input, "Input .qasm file")->required()->check(CLI::ExistingFile);
    compile_cmd->add_option("-o,--output", output, "Output .qasm file (default: stdout)");
    compile_cmd->add_option("--stats", stats_path, "Write the JSON stats report here");
    compile_flags.attach(*compile_cmd);

    auto* bench_cmd = app.add_subcommand("bench", "Compile every .qasm file in a directory into a CSV");
    RoutingFlags bench_flags;
    std::string corpus;
    std::string csv_path;
    bool with_baseline = false;
    bench_cmd->add_option("corpus", corpus, "Directory of .qasm files")->required()->check(CLI::ExistingDirectory);
    bench_cmd->add_option("-o,--output", csv_path, "Output CSV (default: stdout)");
    bench_cmd->add_flag("--with-baseline", with_baseline, "Also compile with the naive router");
    bench_flags.attach(*bench_cmd);

    auto* fit_cmd = app.add_subcommand("fit-model", "Refit a move-cost model on recorded rearrangements");
    std::string fit_device;
    std::string fit_model;
    std::vector<std::string> fit_stats;
    std::size_t fit_exact_limit = kDefaultExactLimit;
    fit_cmd->add_option("--device", fit_device, "Device used when the model file does not exist yet");
    fit_cmd->add_option("--model-path", fit_model, "Model file to update")->required();
    fit_cmd->add_option("--samples-from", fit_stats, "Stats reports whose swap samples are added")->check(CLI::ExistingFile);
    fit_cmd->add_option("--exact-token-swap-limit", fit_exact_limit, "Exact token-swap limit for a fresh model");

    auto* devices_cmd = app.add_subcommand("devices", "List built-in devices or describe one");
    std::string describe;
    devices_cmd->add_option("--device", describe, "Device to describe");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*compile_cmd) return run_compile(input, compile_flags, output, stats_path);
        if (*bench_cmd) return run_bench(corpus, bench_flags, with_baseline, csv_path);
        if (*fit_cmd) return run_fit(fit_device, fit_model, fit_stats, fit_exact_limit);
        if (*devices_cmd) return run_devices(describe);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::VerificationFailed ? 3 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
