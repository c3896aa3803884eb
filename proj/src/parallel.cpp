#include "tbsim/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace tbsim::parallel {

namespace {
std::atomic<unsigned> g_threads{0};
}

void set_thread_count(unsigned threads) { g_threads.store(threads); }

unsigned thread_count()
{
    unsigned t = g_threads.load();
    if (t == 0) {
        t = std::max(1u, std::thread::hardware_concurrency());
    }
    return t;
}

void for_chunks(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body,
                std::size_t min_chunk)
{
    if (count == 0) {
        return;
    }
    min_chunk = std::max<std::size_t>(1, min_chunk);
    std::size_t workers = std::min<std::size_t>(thread_count(), (count + min_chunk - 1) / min_chunk);
    if (workers <= 1) {
        body(0, count);
        return;
    }

    std::size_t chunk = (count + workers - 1) / workers;
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t begin = w * chunk;
        std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) {
            break;
        }
        pool.emplace_back([&, w, begin, end] {
            try {
                body(begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    // Lowest-index failure wins so error reporting is deterministic too.
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

}  // namespace tbsim::parallel
