/**
 * @file coeff_model.hpp
 * @brief Linear surrogate for the SWAP count of a qubit rearrangement.
 *
 * A rearrangement pi sends the state on physical qubit mu to pi[mu]. The
 * model estimates its SWAP count as sum_mu a(mu, pi[mu]). The matrix starts
 * from the closed form for uniformly distributed rearrangements and can be
 * refit, by minimum-norm least squares, on rearrangements observed in
 * compiled circuits.
 */

#pragma once

#include "isaaq/device.hpp"
#include "isaaq/error.hpp"
#include "isaaq/token_swap.hpp"

#include "json.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <random>
#include <string>
#include <vector>

namespace isaaq {

struct RearrangementSample {
    std::vector<std::size_t> pi;  ///< pi[mu] = destination of the state on mu
    std::size_t swaps = 0;

    friend bool operator==(const RearrangementSample&, const RearrangementSample&) = default;
};

inline constexpr std::size_t kHistoryCap = 50000;
inline constexpr std::size_t kUniformSampleCount = 20000;

/// Arrangement reached after realizing pi: position pi[mu] holds token mu.
[[nodiscard]] inline Arrangement arrangement_for(const std::vector<std::size_t>& pi) {
    return inverse_permutation(pi);
}

struct MoveCostModel {
    std::string device_name;
    std::size_t n = 0;
    std::vector<double> a;  ///< row-major n x n
    std::vector<RearrangementSample> history;
    std::uint64_t version = 0;

    [[nodiscard]] double coeff(std::size_t mu, std::size_t nu) const { return a[mu * n + nu]; }
    double& coeff(std::size_t mu, std::size_t nu) { return a[mu * n + nu]; }

    /// Appends samples, dropping the oldest beyond the history cap.
    void append_history(const std::vector<RearrangementSample>& samples) {
        history.insert(history.end(), samples.begin(), samples.end());
        if (history.size() > kHistoryCap) {
            history.erase(history.begin(), history.end() - static_cast<std::ptrdiff_t>(kHistoryCap));
        }
    }
};

namespace coeff_detail {

inline void check_permutation(const MoveCostModel& model, const std::vector<std::size_t>& pi) {
    if (!is_permutation_of(pi, model.n)) {
        throw Error(ErrorKind::DimensionMismatch,
                    "rearrangement is not a permutation of " + std::to_string(model.n) + " qubits");
    }
}

/// a = (N-1)/N * conditional_mean - (N-2)/N * mean.
inline std::vector<double> closed_form(std::size_t n, const std::vector<double>& cond_sum,
                                       const std::vector<double>& cond_count, double mean) {
    std::vector<double> a(n * n, 0.0);
    const double nn = static_cast<double>(n);
    for (std::size_t k = 0; k < n * n; ++k) {
        const double cond_mean = cond_count[k] > 0 ? cond_sum[k] / cond_count[k] : mean;
        a[k] = (nn - 1.0) / nn * cond_mean - (nn - 2.0) / nn * mean;
    }
    return a;
}

}  // namespace coeff_detail

/**
 * @brief Closed-form coefficients for uniformly random rearrangements.
 *
 * Up to `exact_limit` qubits, every permutation is scored with the exact
 * swap count. Larger devices use `sample_count` random permutations scored
 * by the heuristic router, which overestimates.
 */
[[nodiscard]] inline MoveCostModel uniform_init(const Device& device, std::size_t exact_limit = kDefaultExactLimit,
                                                std::size_t sample_count = kUniformSampleCount,
                                                std::uint64_t seed = 0) {
    const auto n = device.num_qubits();
    std::vector<double> cond_sum(n * n, 0.0);
    std::vector<double> cond_count(n * n, 0.0);
    double total = 0.0;
    double count = 0.0;

    if (n <= exact_limit) {
        ExactTokenSwapper table(device, exact_limit);
        for (std::uint64_t r = 0; r < table.num_states(); ++r) {
            const auto state = token_swap_detail::unrank(r, n);
            const double swaps = static_cast<double>(table.swap_count_by_rank(r));
            // Token state[pos] travelled to pos.
            for (std::size_t pos = 0; pos < n; ++pos) {
                cond_sum[state[pos] * n + pos] += swaps;
                cond_count[state[pos] * n + pos] += 1.0;
            }
            total += swaps;
            count += 1.0;
        }
    } else {
        std::mt19937_64 rng(seed);
        std::vector<std::size_t> pi = identity_arrangement(n);
        for (std::size_t s = 0; s < sample_count; ++s) {
            std::shuffle(pi.begin(), pi.end(), rng);
            const double swaps = static_cast<double>(min_swaps_heuristic(device, arrangement_for(pi)).size());
            for (std::size_t mu = 0; mu < n; ++mu) {
                cond_sum[mu * n + pi[mu]] += swaps;
                cond_count[mu * n + pi[mu]] += 1.0;
            }
            total += swaps;
            count += 1.0;
        }
    }
    MoveCostModel model;
    model.device_name = device.name();
    model.n = n;
    model.a = coeff_detail::closed_form(n, cond_sum, cond_count, count > 0 ? total / count : 0.0);
    return model;
}

/// sum_mu a(mu, pi[mu]); the moving-cost estimate in CNOTs is three times this.
[[nodiscard]] inline double estimate_swaps(const MoveCostModel& model, const std::vector<std::size_t>& pi) {
    coeff_detail::check_permutation(model, pi);
    double sum = 0.0;
    for (std::size_t mu = 0; mu < model.n; ++mu) sum += model.coeff(mu, pi[mu]);
    return sum;
}

/// Root mean squared error of the CNOT-scaled estimates: 3 * (swaps - estimate).
[[nodiscard]] inline double rmse(const MoveCostModel& model, const std::vector<RearrangementSample>& samples) {
    if (samples.empty()) throw Error(ErrorKind::EmptySampleSet, "rmse needs at least one sample");
    double sq = 0.0;
    for (const auto& s : samples) {
        const double diff = 3.0 * static_cast<double>(s.swaps) - 3.0 * estimate_swaps(model, s.pi);
        sq += diff * diff;
    }
    return std::sqrt(sq / static_cast<double>(samples.size()));
}

/**
 * @brief Minimum-norm least-squares coefficients for the given samples.
 *
 * Each sample is a row with ones at (mu, pi[mu]). The normal matrix A^T A is
 * accumulated directly and inverted on its range through a symmetric
 * eigendecomposition, which yields the pseudoinverse solution.
 */
[[nodiscard]] inline std::vector<double> least_squares_coefficients(std::size_t n,
                                                                    const std::vector<RearrangementSample>& samples) {
    const auto dim = static_cast<Eigen::Index>(n * n);
    Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
    std::vector<Eigen::Index> cols(n);
    for (const auto& s : samples) {
        if (!is_permutation_of(s.pi, n)) {
            throw Error(ErrorKind::DimensionMismatch, "sample is not a permutation of " + std::to_string(n) + " qubits");
        }
        for (std::size_t mu = 0; mu < n; ++mu) cols[mu] = static_cast<Eigen::Index>(mu * n + s.pi[mu]);
        for (auto r : cols) {
            rhs(r) += static_cast<double>(s.swaps);
            for (auto c : cols) normal(r, c) += 1.0;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(normal);
    const auto& values = eig.eigenvalues();
    const auto& vectors = eig.eigenvectors();
    const double cutoff = 1e-10 * std::max(1.0, values.cwiseAbs().maxCoeff());
    Eigen::VectorXd projected = vectors.transpose() * rhs;
    for (Eigen::Index k = 0; k < dim; ++k) projected(k) = values(k) > cutoff ? projected(k) / values(k) : 0.0;
    Eigen::VectorXd solution = vectors * projected;
    return {solution.data(), solution.data() + dim};
}

/// New model version fit on `samples` appended to the model's history.
[[nodiscard]] inline MoveCostModel fit(const MoveCostModel& model, const std::vector<RearrangementSample>& samples) {
    if (samples.empty()) throw Error(ErrorKind::EmptySampleSet, "fit needs at least one sample");
    MoveCostModel next = model;
    next.append_history(samples);
    next.a = least_squares_coefficients(model.n, next.history);
    next.version = model.version + 1;
    return next;
}

/// Refit on the stored history alone.
[[nodiscard]] inline MoveCostModel refit(const MoveCostModel& model) {
    if (model.history.empty()) throw Error(ErrorKind::EmptySampleSet, "model history is empty");
    MoveCostModel next = model;
    next.a = least_squares_coefficients(model.n, model.history);
    next.version = model.version + 1;
    return next;
}

[[nodiscard]] inline nlohmann::json model_to_json(const MoveCostModel& model) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t mu = 0; mu < model.n; ++mu) {
        rows.push_back(std::vector<double>(model.a.begin() + static_cast<std::ptrdiff_t>(mu * model.n),
                                           model.a.begin() + static_cast<std::ptrdiff_t>((mu + 1) * model.n)));
    }
    nlohmann::json history = nlohmann::json::array();
    for (const auto& s : model.history) history.push_back({{"pi", s.pi}, {"swaps", s.swaps}});
    return {{"device_name", model.device_name},
            {"n", model.n},
            {"version", model.version},
            {"a", rows},
            {"history", history}};
}

[[nodiscard]] inline MoveCostModel model_from_json(const nlohmann::json& j) {
    try {
        MoveCostModel model;
        model.device_name = j.at("device_name").get<std::string>();
        model.n = j.at("n").get<std::size_t>();
        model.version = j.at("version").get<std::uint64_t>();
        const auto& rows = j.at("a");
        if (rows.size() != model.n) throw Error(ErrorKind::SchemaMismatch, "coefficient matrix has wrong row count");
        for (const auto& row : rows) {
            if (row.size() != model.n) throw Error(ErrorKind::SchemaMismatch, "coefficient matrix has wrong row length");
            for (const auto& v : row) model.a.push_back(v.get<double>());
        }
        for (const auto& s : j.at("history")) {
            RearrangementSample sample{s.at("pi").get<std::vector<std::size_t>>(), s.at("swaps").get<std::size_t>()};
            if (!is_permutation_of(sample.pi, model.n)) {
                throw Error(ErrorKind::SchemaMismatch, "history entry is not a permutation of " + std::to_string(model.n));
            }
            model.history.push_back(std::move(sample));
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::SchemaMismatch, std::string("bad model JSON: ") + e.what());
    }
}

inline void save_model(const MoveCostModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
    out << model_to_json(model).dump(1) << '\n';
    if (!out) throw Error(ErrorKind::IoError, "write failed for " + path);
}

/// Loads a model and checks it was built for a device of `expected_n` qubits.
[[nodiscard]] inline MoveCostModel load_model(const std::string& path, std::size_t expected_n) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::SchemaMismatch, std::string("bad model JSON: ") + e.what());
    }
    auto model = model_from_json(j);
    if (model.n != expected_n) {
        throw Error(ErrorKind::SchemaMismatch, "model has " + std::to_string(model.n) + " qubits, device has " +
                                                   std::to_string(expected_n));
    }
    return model;
}

}  // namespace isaaq
