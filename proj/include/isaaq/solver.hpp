/**
 * @file solver.hpp
 * @brief Solver interface and the built-in simulated annealer.
 */

#pragma once

#include "isaaq/error.hpp"
#include "isaaq/qubo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace isaaq {

struct SolveRequest {
    std::shared_ptr<const QuboProblem> qubo;
    std::uint64_t timeout_ms = 1000;
    std::uint64_t seed = 0;
    /// Fixed annealing budget; when unset a local solver derives it from the timeout.
    std::optional<std::uint64_t> sweeps;
};

struct SolveResult {
    std::vector<std::uint8_t> bits;
    double energy = 0.0;
    std::uint64_t elapsed_ms = 0;
    std::string solver_id;
};

class Solver {
public:
    virtual ~Solver() = default;
    [[nodiscard]] virtual SolveResult solve(const SolveRequest& request) = 0;
    [[nodiscard]] virtual std::string id() const = 0;
};

inline constexpr std::uint64_t kDefaultSweepsPerRun = 1000;

struct AnnealSchedule {
    std::uint64_t total_sweeps = 1000;
    std::uint64_t sweeps_per_run = kDefaultSweepsPerRun;
};

namespace sa_detail {

/// Sparse symmetric couplings plus linear coefficients, ready for local-field updates.
struct Couplings {
    std::vector<double> linear;
    std::vector<std::vector<std::pair<std::size_t, double>>> neighbors;
    double max_coeff = 0.0;

    explicit Couplings(const QuboProblem& problem)
        : linear(problem.num_vars, 0.0), neighbors(problem.num_vars) {
        for (const auto& t : problem.terms) {
            max_coeff = std::max(max_coeff, std::abs(t.coeff));
            if (t.u == t.v) {
                linear[t.u] += t.coeff;
            } else {
                neighbors[t.u].push_back({t.v, t.coeff});
                neighbors[t.v].push_back({t.u, t.coeff});
            }
        }
    }
};

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace sa_detail

/**
 * @brief Single-flip Metropolis annealing with geometric cooling and restarts.
 *
 * Each run starts from uniformly random bits and cools from T0 = max|coeff|
 * to 1e-3 * T0 over `sweeps_per_run` sequential sweeps, then finishes with a
 * zero-temperature sweep. Runs repeat until `total_sweeps` is spent. The
 * all-zero vector seeds the incumbent, so the result never scores worse.
 */
[[nodiscard]] inline SolveResult anneal(const QuboProblem& problem, const AnnealSchedule& schedule, std::uint64_t seed) {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t n = problem.num_vars;
    SolveResult result;
    result.solver_id = "sa";
    result.bits.assign(n, 0);
    result.energy = problem.constant;
    if (n == 0 || problem.terms.empty()) {
        result.energy = energy(problem, result.bits);
        return result;
    }

    const sa_detail::Couplings q(problem);
    std::mt19937_64 rng(seed);
    const double t_hot = q.max_coeff;
    const double t_cold = 1e-3 * t_hot;

    std::vector<std::uint8_t> bits(n);
    std::vector<double> field(n);  // sum of couplings to set neighbours
    std::uint64_t spent = 0;
    const std::uint64_t budget = std::max<std::uint64_t>(1, schedule.total_sweeps);
    const std::uint64_t per_run = std::max<std::uint64_t>(1, schedule.sweeps_per_run);

    while (spent < budget) {
        const std::uint64_t sweeps = std::min(per_run, budget - spent);
        spent += sweeps;
        for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1u);
        std::fill(field.begin(), field.end(), 0.0);
        double current = problem.constant;
        for (std::size_t v = 0; v < n; ++v) {
            if (!bits[v]) continue;
            current += q.linear[v];
            for (auto [u, c] : q.neighbors[v]) {
                field[u] += c;
                if (bits[u] && u < v) current += c;
            }
        }

        auto flip = [&](std::size_t v, double delta) {
            bits[v] ^= 1u;
            const double sign = bits[v] ? 1.0 : -1.0;
            for (auto [u, c] : q.neighbors[v]) field[u] += sign * c;
            current += delta;
        };
        auto delta_of = [&](std::size_t v) {
            const double gain = q.linear[v] + field[v];
            return bits[v] ? -gain : gain;
        };
        auto consider_best = [&] {
            if (current < result.energy - 1e-12) {
                result.energy = current;
                result.bits = bits;
            }
        };

        const double ratio = sweeps > 1 ? std::pow(t_cold / t_hot, 1.0 / static_cast<double>(sweeps - 1)) : 1.0;
        double temperature = sweeps > 1 ? t_hot : t_cold;
        for (std::uint64_t s = 0; s < sweeps; ++s) {
            for (std::size_t v = 0; v < n; ++v) {
                const double delta = delta_of(v);
                if (delta <= 0.0 || sa_detail::uniform01(rng) < std::exp(-delta / temperature)) flip(v, delta);
            }
            consider_best();
            temperature *= ratio;
        }
        bool improved = true;
        while (improved) {
            improved = false;
            for (std::size_t v = 0; v < n; ++v) {
                const double delta = delta_of(v);
                if (delta < -1e-12) {
                    flip(v, delta);
                    improved = true;
                }
            }
        }
        consider_best();
    }
    // Incremental bookkeeping drifts in the last bits; report the exact value.
    result.energy = energy(problem, result.bits);
    result.elapsed_ms = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count());
    return result;
}

/// Work units of one sweep: every variable visited once, every coupling touched from both ends.
[[nodiscard]] inline double sweep_work(const QuboProblem& problem) {
    return static_cast<double>(problem.num_vars + 2 * problem.terms.size());
}

/**
 * @brief Work units per millisecond on this machine.
 *
 * Anneals a fixed random problem for roughly `target_ms` and divides the
 * work done by the time taken.
 */
[[nodiscard]] inline double calibrate_work_rate(std::uint64_t target_ms = 100) {
    QuboProblem probe;
    probe.num_vars = 400;
    probe.layout = {1, 20};
    std::mt19937_64 rng(12345);
    for (std::size_t u = 0; u < probe.num_vars; ++u) {
        probe.terms.push_back({u, u, sa_detail::uniform01(rng) - 0.5});
        for (std::size_t k = 0; k < 8; ++k) {
            std::size_t v = u + 1 + static_cast<std::size_t>(rng() % 40);
            if (v < probe.num_vars) probe.terms.push_back({u, v, sa_detail::uniform01(rng) - 0.5});
        }
    }
    std::sort(probe.terms.begin(), probe.terms.end(),
              [](const QuboTerm& a, const QuboTerm& b) { return std::pair(a.u, a.v) < std::pair(b.u, b.v); });
    std::uint64_t sweeps = 16;
    for (;;) {
        const auto t0 = std::chrono::steady_clock::now();
        (void)anneal(probe, {sweeps, sweeps}, 1);
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        if (ms >= static_cast<double>(target_ms) / 4.0 || sweeps > (1u << 24)) {
            return std::max(1.0, sweep_work(probe) * static_cast<double>(sweeps) / std::max(ms, 1e-3));
        }
        sweeps *= 4;
    }
}

/// Sweep budget that fits `timeout_ms` at the calibrated rate.
[[nodiscard]] inline std::uint64_t sweeps_for_timeout(const QuboProblem& problem, std::uint64_t timeout_ms,
                                                      double work_per_ms) {
    const double sweeps = work_per_ms * static_cast<double>(timeout_ms) / std::max(1.0, sweep_work(problem));
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(sweeps));
}

class SimulatedAnnealer final : public Solver {
public:
    /// `work_per_ms` converts timeouts to sweeps for requests without a pinned budget.
    explicit SimulatedAnnealer(double work_per_ms = 0.0, std::uint64_t sweeps_per_run = kDefaultSweepsPerRun)
        : work_per_ms_(work_per_ms), sweeps_per_run_(sweeps_per_run) {}

    [[nodiscard]] SolveResult solve(const SolveRequest& request) override {
        if (!request.qubo) throw Error(ErrorKind::InvalidArgument, "solve request without a problem");
        std::uint64_t total = 0;
        if (request.sweeps) {
            total = *request.sweeps;
        } else {
            if (work_per_ms_ <= 0.0) work_per_ms_ = calibrate_work_rate();
            total = sweeps_for_timeout(*request.qubo, request.timeout_ms, work_per_ms_);
        }
        return anneal(*request.qubo, {total, sweeps_per_run_}, request.seed);
    }

    [[nodiscard]] std::string id() const override { return "sa"; }

private:
    double work_per_ms_;
    std::uint64_t sweeps_per_run_;
};

}  // namespace isaaq
