/**
 * @file remote_solver.hpp
 * @brief HTTP client for an external QUBO solving service.
 *
 * Request body: {"num_vars": n, "terms": [[u, v, c], ...], "constant": c,
 * "timeout_ms": t}. Response: {"bits": [0|1, ...], "energy": e}. The
 * returned energy is ignored in favour of a local recomputation.
 */

#pragma once

#include "isaaq/error.hpp"
#include "isaaq/qubo.hpp"
#include "isaaq/solver.hpp"

#include "httplib.h"
#include "json.hpp"

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace isaaq {

inline constexpr const char* kSolverTokenEnv = "ISAAQ_SOLVER_TOKEN";

struct RemoteEndpoint {
    std::string host;  ///< scheme://host[:port]
    std::string path;
};

/// Splits `http://host:port/path` into the client base and request path.
[[nodiscard]] inline RemoteEndpoint parse_endpoint(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos || url.substr(0, scheme_end) != "http") {
        throw Error(ErrorKind::InvalidArgument, "remote solver URL must start with http://, got '" + url + "'");
    }
    const auto path_start = url.find('/', scheme_end + 3);
    RemoteEndpoint ep;
    ep.host = url.substr(0, path_start);
    ep.path = path_start == std::string::npos ? "/" : url.substr(path_start);
    if (ep.host.size() <= scheme_end + 3) throw Error(ErrorKind::InvalidArgument, "remote solver URL has no host");
    return ep;
}

struct RemoteOptions {
    std::string auth_token;
    unsigned retries = 3;                  ///< extra attempts after a transport failure
    std::uint64_t grace_ms = 2000;         ///< read timeout = request timeout + grace
    std::uint64_t retry_backoff_ms = 50;
};

[[nodiscard]] inline std::string token_from_env() {
    const char* value = std::getenv(kSolverTokenEnv);
    return value ? std::string(value) : std::string();
}

class RemoteSolver final : public Solver {
public:
    RemoteSolver(std::string url, RemoteOptions options)
        : url_(std::move(url)), endpoint_(parse_endpoint(url_)), options_(std::move(options)) {}

    [[nodiscard]] SolveResult solve(const SolveRequest& request) override {
        if (!request.qubo) throw Error(ErrorKind::InvalidArgument, "solve request without a problem");
        const auto& problem = *request.qubo;
        auto body = qubo_to_json(problem);
        body["timeout_ms"] = request.timeout_ms;
        const std::string payload = body.dump();

        const auto start = std::chrono::steady_clock::now();
        const auto read_timeout = std::chrono::milliseconds(request.timeout_ms + options_.grace_ms);
        std::string last_error;
        for (unsigned attempt = 0; attempt <= options_.retries; ++attempt) {
            if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(options_.retry_backoff_ms * attempt));
            httplib::Client client(endpoint_.host);
            client.set_connection_timeout(std::chrono::milliseconds(1000));
            client.set_read_timeout(read_timeout);
            client.set_write_timeout(read_timeout);
            httplib::Headers headers;
            if (!options_.auth_token.empty()) headers.emplace("Authorization", "Bearer " + options_.auth_token);

            const auto sent = std::chrono::steady_clock::now();
            auto res = client.Post(endpoint_.path, headers, payload, "application/json");
            if (!res) {
                const auto waited = std::chrono::steady_clock::now() - sent;
                if (res.error() == httplib::Error::Read && waited >= read_timeout) {
                    throw Error(ErrorKind::Timeout, "no response from " + url_ + " within " +
                                                        std::to_string(read_timeout.count()) + " ms");
                }
                last_error = httplib::to_string(res.error());
                continue;
            }
            if (res->status >= 500) {
                last_error = "HTTP " + std::to_string(res->status);
                continue;
            }
            if (res->status != 200) {
                throw Error(ErrorKind::Protocol, url_ + " answered HTTP " + std::to_string(res->status));
            }
            SolveResult result = parse_response(problem, res->body);
            result.elapsed_ms = static_cast<std::uint64_t>(
                std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count());
            return result;
        }
        throw Error(ErrorKind::Transport, "remote solver " + url_ + " failed after " +
                                              std::to_string(options_.retries + 1) + " attempts: " + last_error);
    }

    [[nodiscard]] std::string id() const override { return "remote:" + url_; }

private:
    [[nodiscard]] SolveResult parse_response(const QuboProblem& problem, const std::string& text) const {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::Protocol, std::string("response is not JSON: ") + e.what());
        }
        if (!j.is_object() || !j.contains("bits") || !j["bits"].is_array()) {
            throw Error(ErrorKind::Protocol, "response lacks a 'bits' array");
        }
        const auto& raw = j["bits"];
        if (raw.size() != problem.num_vars) {
            throw Error(ErrorKind::Protocol, "response has " + std::to_string(raw.size()) + " bits, expected " +
                                                 std::to_string(problem.num_vars));
        }
        SolveResult result;
        result.solver_id = id();
        result.bits.reserve(raw.size());
        for (const auto& b : raw) {
            if (!b.is_number_integer() || (b.get<int>() != 0 && b.get<int>() != 1)) {
                throw Error(ErrorKind::Protocol, "bits must be 0 or 1");
            }
            result.bits.push_back(static_cast<std::uint8_t>(b.get<int>()));
        }
        result.energy = energy(problem, result.bits);
        return result;
    }

    std::string url_;
    RemoteEndpoint endpoint_;
    RemoteOptions options_;
};

}  // namespace isaaq
