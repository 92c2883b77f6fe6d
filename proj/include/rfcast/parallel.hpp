#pragma once

#include "rfcast/error.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace rfcast {

/// Name of the environment variable holding the worker count. Results never
/// depend on its value, only wall-clock time does.
inline constexpr const char* kThreadsEnv = "RFCAST_THREADS";

/// Worker count from RFCAST_THREADS, else the available hardware parallelism.
[[nodiscard]] inline std::size_t default_worker_count() {
    if (const char* env = std::getenv(kThreadsEnv); env != nullptr && *env != '\0') {
        std::size_t n = 0;
        const std::string_view s(env);
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
        if (ec != std::errc{} || ptr != s.data() + s.size() || n == 0) {
            throw ConfigError(std::string(kThreadsEnv) + " must be a positive integer, got '" + env + "'");
        }
        return n;
    }
    return std::max<unsigned>(1, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, count) on up to `workers` threads. Each index runs
/// exactly once; the first exception thrown is rethrown on the caller.
template <class Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count && !failed.load(); i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        const std::lock_guard lock(error_mutex);
                        if (!error) {
                            error = std::current_exception();
                        }
                        failed = true;
                    }
                }
            });
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

} // namespace rfcast
