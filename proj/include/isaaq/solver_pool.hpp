/**
 * @file solver_pool.hpp
 * @brief Bounded pool of solver workers running a dependency graph of requests.
 *
 * A task's request is built only when the task is dispatched, so it can read
 * the results of the tasks it depends on. A failing task does not stop
 * unrelated tasks; everything downstream of it is skipped.
 */

#pragma once

#include "isaaq/error.hpp"
#include "isaaq/solver.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace isaaq {

struct PoolTask {
    std::vector<std::size_t> deps;
    std::size_t priority = 0;  ///< lower runs first among ready tasks, then lower index
    std::function<SolveRequest()> make_request;
};

enum class TaskState { Done, Failed, Skipped };

struct TaskOutcome {
    TaskState state = TaskState::Skipped;
    std::optional<SolveResult> result;
    std::exception_ptr error;
    std::chrono::steady_clock::time_point started;
    std::chrono::steady_clock::time_point finished;
    std::size_t worker = 0;
};

using SolverFactory = std::function<std::unique_ptr<Solver>()>;
/// Called on the worker thread after a task succeeds and before its dependents are released.
using CompletionHook = std::function<void(std::size_t task, const SolveResult& result)>;

class SolverPool {
public:
    SolverPool(std::size_t workers, SolverFactory factory) : workers_(workers), factory_(std::move(factory)) {
        if (workers_ == 0) throw Error(ErrorKind::InvalidArgument, "solver pool needs at least one worker");
    }

    [[nodiscard]] std::size_t workers() const noexcept { return workers_; }
    /// Largest number of simultaneously running tasks seen in the last run.
    [[nodiscard]] std::size_t max_in_flight() const noexcept { return max_in_flight_; }

    std::vector<TaskOutcome> run(const std::vector<PoolTask>& tasks, const CompletionHook& on_complete = {}) {
        const auto n = tasks.size();
        std::vector<TaskOutcome> outcomes(n);
        std::vector<std::size_t> missing(n);
        std::vector<std::vector<std::size_t>> dependents(n);
        for (std::size_t k = 0; k < n; ++k) {
            missing[k] = tasks[k].deps.size();
            for (auto d : tasks[k].deps) {
                if (d >= n || d == k) throw Error(ErrorKind::InvalidArgument, "bad dependency in solver pool");
                dependents[d].push_back(k);
            }
        }
        std::vector<std::size_t> ready;
        for (std::size_t k = 0; k < n; ++k) {
            if (missing[k] == 0) ready.push_back(k);
        }
        auto before = [&](std::size_t a, std::size_t b) {
            return tasks[a].priority != tasks[b].priority ? tasks[a].priority < tasks[b].priority : a < b;
        };

        std::mutex mu;
        std::condition_variable cv;
        std::size_t finished = 0;
        std::size_t in_flight = 0;
        max_in_flight_ = 0;

        std::function<void(std::size_t)> skip_downstream = [&](std::size_t k) {
            for (auto d : dependents[k]) {
                if (outcomes[d].state == TaskState::Skipped && missing[d] != kSkippedMark) {
                    missing[d] = kSkippedMark;
                    ++finished;
                    skip_downstream(d);
                }
            }
        };

        auto worker_loop = [&](std::size_t worker_id) {
            std::unique_ptr<Solver> solver;
            std::unique_lock lock(mu);
            for (;;) {
                cv.wait(lock, [&] { return !ready.empty() || finished == n; });
                if (finished == n) return;
                auto it = std::min_element(ready.begin(), ready.end(), before);
                const auto k = *it;
                ready.erase(it);
                ++in_flight;
                max_in_flight_ = std::max(max_in_flight_, in_flight);
                outcomes[k].worker = worker_id;
                outcomes[k].started = std::chrono::steady_clock::now();
                lock.unlock();

                std::optional<SolveResult> result;
                std::exception_ptr error;
                try {
                    if (!solver) solver = factory_();
                    result = solver->solve(tasks[k].make_request());
                    if (on_complete) on_complete(k, *result);
                } catch (...) {
                    error = std::current_exception();
                }

                lock.lock();
                --in_flight;
                auto& out = outcomes[k];
                out.finished = std::chrono::steady_clock::now();
                ++finished;
                if (error) {
                    out.state = TaskState::Failed;
                    out.error = error;
                    skip_downstream(k);
                } else {
                    out.state = TaskState::Done;
                    out.result = std::move(result);
                    for (auto d : dependents[k]) {
                        if (missing[d] != kSkippedMark && --missing[d] == 0) ready.push_back(d);
                    }
                }
                cv.notify_all();
            }
        };

        if (n > 0) {
            std::vector<std::thread> threads;
            const auto count = std::min(workers_, n);
            for (std::size_t w = 0; w < count; ++w) threads.emplace_back(worker_loop, w);
            for (auto& t : threads) t.join();
        }
        return outcomes;
    }

private:
    static constexpr std::size_t kSkippedMark = static_cast<std::size_t>(-1);
    std::size_t workers_;
    SolverFactory factory_;
    std::size_t max_in_flight_ = 0;
};

/// Rethrows the first failure, in task order.
inline void rethrow_first_failure(const std::vector<TaskOutcome>& outcomes) {
    for (const auto& o : outcomes) {
        if (o.state == TaskState::Failed) std::rethrow_exception(o.error);
    }
}

}  // namespace isaaq
