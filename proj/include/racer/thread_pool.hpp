#ifndef RACER_THREAD_POOL_HPP_
#define RACER_THREAD_POOL_HPP_

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace racer {

int hardware_threads();

// Process-wide worker count. 0 = auto (hardware concurrency).
void set_thread_count(int n);
int thread_count();

// Runs fn(chunk_index, begin, end) over [0, n) split into a FIXED number of
// chunks. The chunk layout depends only on (n, chunks), never on the worker
// count, so callers that reduce per-chunk results in chunk order get
// bit-identical output no matter how many threads execute.
void parallel_chunks(std::size_t n, std::size_t chunks,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

}  // namespace racer

#endif  // RACER_THREAD_POOL_HPP_
