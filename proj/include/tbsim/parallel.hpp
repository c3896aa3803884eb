#pragma once

#include <cstddef>
#include <functional>

namespace tbsim::parallel {

/// Worker count used by internal loops. 0 means hardware concurrency.
void set_thread_count(unsigned threads);
unsigned thread_count();

/// Splits [0, count) into contiguous chunks, one per worker, and calls
/// body(begin, end) for each. Chunk boundaries depend on the worker count, so
/// bodies must write only to slots they own; results are then independent of
/// the thread count.
void for_chunks(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body,
                std::size_t min_chunk = 1);

}  // namespace tbsim::parallel
