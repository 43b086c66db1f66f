#pragma once

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace ratpo {

/// Fixed-size pool of worker threads for fork-join loops.
///
/// parallel_for splits [0, n) into contiguous chunks, one per worker, and blocks
/// until all chunks are done. Work assignment depends only on n and the thread
/// count, and callers write results into per-index slots, so the outcome of a
/// loop never depends on scheduling. A pool with one thread runs inline.
class WorkerPool {
public:
    explicit WorkerPool(std::size_t threads = 1);
    ~WorkerPool();

    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    std::size_t size() const { return threads_; }

    /// fn(begin, end) is invoked on disjoint subranges covering [0, n).
    void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

private:
    void worker_loop(std::size_t worker);

    std::size_t threads_;
    std::vector<std::thread> workers_;
    std::mutex mutex_;
    std::condition_variable start_cv_;
    std::condition_variable done_cv_;
    const std::function<void(std::size_t, std::size_t)>* job_ = nullptr;
    std::size_t job_n_ = 0;
    std::size_t generation_ = 0;
    std::size_t pending_ = 0;
    bool stopping_ = false;
    std::exception_ptr error_;
};

/// Number of hardware threads, at least 1.
std::size_t default_thread_count();

}  // namespace ratpo
