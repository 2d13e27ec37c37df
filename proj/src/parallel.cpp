#include "gbk/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace gbk {

int resolve_threads(int requested)
{
    if (char const* env = std::getenv("GBK_THREADS"); env != nullptr && *env != '\0') {
        try {
            requested = std::stoi(env);
        } catch (std::exception const&) {
            // unparsable value falls back to the configured count
        }
    }
    if (requested <= 0) {
        requested = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    }
    return requested;
}

void parallel_for(std::size_t n, int threads, std::function<void(std::size_t, std::size_t)> const& body)
{
    if (n == 0) {
        return;
    }
    std::size_t const workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
    if (workers == 1) {
        body(0, n);
        return;
    }
    std::exception_ptr failure;
    std::mutex guard;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t const chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t const begin = w * chunk;
        std::size_t const end = std::min(n, begin + chunk);
        if (begin >= end) {
            break;
        }
        pool.emplace_back([&, begin, end] {
            try {
                body(begin, end);
            } catch (...) {
                std::lock_guard lock(guard);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

} // namespace gbk
