/**
 * @file pipeline.hpp
 * @brief End-to-end compilation, benchmarking and report formatting.
 */

#pragma once

#include "isaaq/baseline.hpp"
#include "isaaq/circuit.hpp"
#include "isaaq/coeff_model.hpp"
#include "isaaq/device.hpp"
#include "isaaq/error.hpp"
#include "isaaq/partition.hpp"
#include "isaaq/qasm.hpp"
#include "isaaq/qubo.hpp"
#include "isaaq/remote_solver.hpp"
#include "isaaq/scheduler.hpp"
#include "isaaq/solver.hpp"
#include "isaaq/solver_pool.hpp"
#include "isaaq/synthesis.hpp"
#include "isaaq/verify.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace isaaq {

enum class CompilerKind { Isaaq, Naive };

inline constexpr int kStatsSchemaVersion = 1;

struct CompileConfig {
    Strategy strategy = Strategy::Binary;
    CompilerKind compiler = CompilerKind::Isaaq;
    std::size_t solvers = 1;
    std::uint64_t timeout_ms = 1000;
    std::optional<std::uint64_t> sweeps;  ///< pins the annealing budget per chunk
    std::uint64_t sweeps_per_run = kDefaultSweepsPerRun;
    std::string backend = "sa";           ///< "sa" or "remote:<url>"
    unsigned remote_retries = 3;
    std::uint64_t seed = 0;
    std::size_t layer_cap = kDefaultLayerCap;
    std::size_t var_budget = kDefaultVarBudget;
    std::optional<double> penalty;
    std::size_t exact_limit = kDefaultExactLimit;
    bool relay = true;
    std::string model_path;  ///< empty: start from the uniform model and persist nothing

    void validate() const {
        if (solvers == 0) throw Error(ErrorKind::InvalidArgument, "--solvers must be at least 1");
        if (timeout_ms == 0) throw Error(ErrorKind::InvalidArgument, "--timeout-ms must be at least 1");
        if (sweeps && *sweeps == 0) throw Error(ErrorKind::InvalidArgument, "--sweeps must be at least 1");
        if (layer_cap == 0) throw Error(ErrorKind::InvalidArgument, "--layer-cap must be at least 1");
        if (penalty && !(*penalty > 0.0)) throw Error(ErrorKind::InvalidArgument, "--penalty must be positive");
        if (backend != "sa" && backend.rfind("remote:", 0) != 0) {
            throw Error(ErrorKind::InvalidArgument, "unknown solver backend '" + backend + "'");
        }
    }
};

struct CompileOutput {
    PhysicalCircuit circuit;                ///< indices on the full device
    std::size_t device_qubits = 0;
    std::vector<std::size_t> physical;      ///< subset index -> device index
    std::vector<LayerMapping> mappings;     ///< per layer, logical -> device index
    std::vector<RearrangementSample> samples;  ///< over subset indices
    std::size_t num_layers = 0;
    std::size_t num_chunks = 0;
    std::size_t waves = 0;
    std::size_t max_in_flight = 0;
    bool verified = false;
};

/// Qubits chosen for a circuit: as many as it declares, at least one.
[[nodiscard]] inline DeviceSubset subset_for(const LogicalCircuit& circuit, const Device& device) {
    return select_subset(device, std::max<std::size_t>(1, circuit.num_qubits()));
}

[[nodiscard]] inline std::uint64_t chunk_seed(std::uint64_t seed, std::size_t chunk) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(chunk) + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/**
 * Model for a compile on `device`: the file at `path` when it exists
 * (its qubit count and device name must match), otherwise the uniform model.
 */
[[nodiscard]] inline MoveCostModel load_or_init_model(const std::string& path, const Device& device,
                                                      std::size_t exact_limit = kDefaultExactLimit,
                                                      std::uint64_t seed = 0) {
    if (!path.empty() && std::filesystem::exists(path)) {
        auto model = load_model(path, device.num_qubits());
        if (model.device_name != device.name()) {
            throw Error(ErrorKind::SchemaMismatch, "model was built for '" + model.device_name + "', not '" +
                                                       device.name() + "'");
        }
        return model;
    }
    return uniform_init(device, exact_limit, kUniformSampleCount, seed);
}

namespace pipeline_detail {

inline SolverFactory make_factory(const CompileConfig& config) {
    if (config.backend == "sa") {
        double rate = 0.0;
        if (!config.sweeps) rate = calibrate_work_rate();
        const auto per_run = config.sweeps_per_run;
        return [rate, per_run] { return std::make_unique<SimulatedAnnealer>(rate, per_run); };
    }
    const auto url = config.backend.substr(std::string("remote:").size());
    RemoteOptions options;
    options.auth_token = token_from_env();
    options.retries = config.remote_retries;
    (void)parse_endpoint(url);
    return [url, options] { return std::make_unique<RemoteSolver>(url, options); };
}

inline PhysicalCircuit relabel(const PhysicalCircuit& pc, const std::vector<std::size_t>& physical,
                               std::size_t device_qubits) {
    PhysicalCircuit out;
    out.num_qubits = device_qubits;
    out.stats = pc.stats;
    out.gates.reserve(pc.gates.size());
    for (const auto& g : pc.gates) {
        if (const auto* cx = std::get_if<CnotGate>(&g)) {
            out.gates.push_back(CnotGate{physical[cx->control], physical[cx->target]});
        } else {
            auto s = std::get<SingleQubitGate>(g);
            s.qubit = physical[s.qubit];
            out.gates.push_back(std::move(s));
        }
    }
    return out;
}

/// Solve every chunk and return one mapping per layer (subset indices).
inline std::vector<LayerMapping> route(const std::vector<Layer>& layers, const std::vector<Chunk>& chunks,
                                       const Schedule& schedule, const Device& device, const MoveCostModel& model,
                                       const CompileConfig& config, std::size_t& max_in_flight) {
    const auto n = device.num_qubits();
    std::vector<std::vector<LayerMapping>> solved(chunks.size());
    // Slot k is written and read only by the worker running chunk k.
    std::vector<std::shared_ptr<const QuboProblem>> problems(chunks.size());
    std::vector<PoolTask> tasks(chunks.size());
    for (std::size_t k = 0; k < chunks.size(); ++k) {
        const auto& node = schedule.nodes[k];
        tasks[k].deps = node.deps;
        tasks[k].priority = node.depth;
        tasks[k].make_request = [&, k] {
            std::vector<BoundaryTerm> boundaries;
            for (const auto& src : schedule.nodes[k].boundary_sources) {
                const auto& their = solved[src.chunk];
                boundaries.push_back({src.side, src.side == BoundarySide::Left ? their.back() : their.front(),
                                      src.distance});
            }
            problems[k] = std::make_shared<const QuboProblem>(
                build_chunk_qubo(chunks[k], layers, device, model, boundaries, config.penalty));
            SolveRequest req;
            req.qubo = problems[k];
            req.timeout_ms = config.timeout_ms;
            req.seed = chunk_seed(config.seed, k);
            req.sweeps = config.sweeps;
            return req;
        };
    }
    auto hook = [&](std::size_t k, const SolveResult& result) {
        solved[k] = decode_solution(*problems[k], result.bits);
        problems[k].reset();
    };
    SolverPool pool(config.solvers, make_factory(config));
    auto outcomes = pool.run(tasks, hook);
    rethrow_first_failure(outcomes);
    max_in_flight = pool.max_in_flight();

    std::vector<LayerMapping> mappings;
    for (const auto& s : solved) mappings.insert(mappings.end(), s.begin(), s.end());
    if (mappings.size() != layers.size()) throw Error(ErrorKind::DimensionMismatch, "solver pool left layers unmapped");
    for (const auto& m : mappings) {
        if (m.size() != n) throw Error(ErrorKind::DimensionMismatch, "decoded mapping has wrong size");
    }
    return mappings;
}

}  // namespace pipeline_detail

/**
 * @brief Route `circuit` onto `device`.
 *
 * Works on a connected subset of the device as large as the circuit. When
 * `model` is null the uniform model (or the file at `config.model_path`) is
 * used. Throws VerificationFailed if the result is not equivalent.
 */
[[nodiscard]] inline CompileOutput compile(const LogicalCircuit& circuit, const Device& device,
                                           const CompileConfig& config, const MoveCostModel* model = nullptr) {
    config.validate();
    const auto subset = subset_for(circuit, device);
    const auto& sub = subset.device;
    const auto n = sub.num_qubits();

    CompileOutput out;
    out.device_qubits = device.num_qubits();
    out.physical = subset.physical;

    PhysicalCircuit local;
    LayerMapping initial;
    LayerMapping final_mapping;
    if (config.compiler == CompilerKind::Naive) {
        auto naive = compile_naive(circuit, sub);
        local = std::move(naive.circuit);
        initial = naive.initial;
        final_mapping = naive.final_mapping;
        out.mappings = {initial};
        out.num_layers = 1;
        out.num_chunks = 0;
    } else {
        const auto layers = slice_layers(circuit, config.layer_cap);
        const auto chunks = group_chunks(layers.size(), n, config.var_budget);
        const auto schedule = make_schedule(chunks.size(), config.strategy);
        out.num_layers = layers.size();
        out.num_chunks = chunks.size();
        out.waves = steps(chunks.size(), config.solvers, config.strategy);

        std::vector<LayerMapping> mappings;
        if (circuit.cnot_count() == 0) {
            mappings.assign(layers.size(), identity_arrangement(n));
        } else {
            std::optional<MoveCostModel> owned;
            if (!model) {
                owned = load_or_init_model(config.model_path, sub, config.exact_limit, config.seed);
                model = &*owned;
            }
            if (model->n != n) {
                throw Error(ErrorKind::SchemaMismatch, "model has " + std::to_string(model->n) + " qubits, circuit subset has " +
                                                           std::to_string(n));
            }
            mappings = pipeline_detail::route(layers, chunks, schedule, sub, *model, config, out.max_in_flight);
        }
        SwapRouter router(sub, config.exact_limit, n <= config.exact_limit);
        auto synth = synthesize(circuit, layers, mappings, router, {config.relay});
        local = std::move(synth.circuit);
        out.samples = std::move(synth.samples);
        initial = mappings.front();
        final_mapping = mappings.back();
        for (auto& m : mappings) {
            for (auto& p : m) p = subset.physical[p];
        }
        out.mappings = std::move(mappings);
    }

    if (local.stats.total != local.cnot_count()) {
        throw Error(ErrorKind::VerificationFailed, "cost accounting differs from the emitted CNOT count");
    }
    auto report = verify_equivalence(circuit, local, initial, final_mapping);
    if (!report) throw Error(ErrorKind::VerificationFailed, report.message);
    out.verified = true;
    out.circuit = pipeline_detail::relabel(local, subset.physical, device.num_qubits());
    if (config.compiler == CompilerKind::Naive) {
        for (auto& p : out.mappings.front()) p = subset.physical[p];
    }
    return out;
}

[[nodiscard]] inline nlohmann::json stats_to_json(const CompileOutput& out, const CompileConfig& config,
                                                  const std::string& device_name) {
    nlohmann::json samples = nlohmann::json::array();
    for (const auto& s : out.samples) samples.push_back({{"pi", s.pi}, {"swaps", s.swaps}});
    const auto& st = out.circuit.stats;
    return {{"schema_version", kStatsSchemaVersion},
            {"device", device_name},
            {"compiler", config.compiler == CompilerKind::Naive ? "naive" : "isaaq"},
            {"strategy", std::string(to_string(config.strategy))},
            {"seed", config.seed},
            {"building_cost", st.building_cost},
            {"moving_cost", st.moving_cost},
            {"total", st.total},
            {"logical_cnots", st.logical_cnots},
            {"average_compilation_cost", st.average_compilation_cost()},
            {"num_layers", out.num_layers},
            {"num_chunks", out.num_chunks},
            {"waves", out.waves},
            {"physical_qubits", out.physical},
            {"mappings", out.mappings},
            {"swap_samples", samples},
            {"verified", out.verified}};
}

/// Rearrangement samples stored in a stats report.
[[nodiscard]] inline std::vector<RearrangementSample> samples_from_stats(const nlohmann::json& stats) {
    std::vector<RearrangementSample> out;
    try {
        for (const auto& s : stats.at("swap_samples")) {
            out.push_back({s.at("pi").get<std::vector<std::size_t>>(), s.at("swaps").get<std::size_t>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::SchemaMismatch, std::string("bad stats file: ") + e.what());
    }
    return out;
}

struct BenchRow {
    std::string circuit;
    std::size_t logical_cnots = 0;
    std::size_t building = 0;
    std::size_t moving = 0;
    std::size_t total = 0;
    double avg_cost = 0.0;
    double wall_ms = 0.0;
    std::optional<std::size_t> baseline_total;
    std::optional<double> baseline_avg_cost;
    std::string error;
};

/// Compiles every `.qasm` file under `dir`, in name order; failures become rows with `error` set.
[[nodiscard]] inline std::vector<BenchRow> bench(const std::string& dir, const Device& device,
                                                 const CompileConfig& config, bool with_baseline) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw Error(ErrorKind::IoError, dir + " is not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".qasm") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<BenchRow> rows;
    for (const auto& file : files) {
        BenchRow row;
        row.circuit = file.filename().string();
        try {
            const auto circuit = load_qasm_file(file.string());
            const auto t0 = std::chrono::steady_clock::now();
            const auto out = compile(circuit, device, config);
            row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            const auto& st = out.circuit.stats;
            row.logical_cnots = st.logical_cnots;
            row.building = st.building_cost;
            row.moving = st.moving_cost;
            row.total = st.total;
            row.avg_cost = st.average_compilation_cost();
            if (with_baseline) {
                auto naive_cfg = config;
                naive_cfg.compiler = CompilerKind::Naive;
                const auto base = compile(circuit, device, naive_cfg);
                row.baseline_total = base.circuit.stats.total;
                row.baseline_avg_cost = base.circuit.stats.average_compilation_cost();
            }
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace pipeline_detail {

inline std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

inline std::string fixed(double v) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(4);
    s << v;
    return s.str();
}

}  // namespace pipeline_detail

[[nodiscard]] inline std::string bench_csv(const std::vector<BenchRow>& rows, const CompileConfig& config,
                                           bool with_baseline) {
    using pipeline_detail::csv_field;
    using pipeline_detail::fixed;
    std::string out = "circuit,logical_cnots,building,moving,total,avg_cost,wall_ms,strategy,seed";
    if (with_baseline) out += ",baseline_total,baseline_avg_cost";
    out += ",error\n";
    for (const auto& r : rows) {
        out += csv_field(r.circuit) + ',' + std::to_string(r.logical_cnots) + ',' + std::to_string(r.building) + ',' +
               std::to_string(r.moving) + ',' + std::to_string(r.total) + ',' + fixed(r.avg_cost) + ',' +
               fixed(r.wall_ms) + ',' + std::string(to_string(config.strategy)) + ',' + std::to_string(config.seed);
        if (with_baseline) {
            out += ',' + (r.baseline_total ? std::to_string(*r.baseline_total) : std::string()) + ',' +
                   (r.baseline_avg_cost ? fixed(*r.baseline_avg_cost) : std::string());
        }
        out += ',' + csv_field(r.error) + '\n';
    }
    return out;
}

}  // namespace isaaq
