#include "ratpo/parallel.hpp"

#include <algorithm>

namespace ratpo {

namespace {

std::pair<std::size_t, std::size_t> chunk_bounds(std::size_t n, std::size_t parts, std::size_t index)
{
    const std::size_t base = n / parts;
    const std::size_t extra = n % parts;
    const std::size_t begin = index * base + std::min(index, extra);
    return {begin, begin + base + (index < extra ? 1 : 0)};
}

}  // namespace

WorkerPool::WorkerPool(std::size_t threads) : threads_(std::max<std::size_t>(threads, 1))
{
    // Worker 0 is the calling thread.
    for (std::size_t w = 1; w < threads_; ++w)
        workers_.emplace_back([this, w] { worker_loop(w); });
}

WorkerPool::~WorkerPool()
{
    {
        std::lock_guard lock(mutex_);
        stopping_ = true;
    }
    start_cv_.notify_all();
    for (auto& t : workers_)
        t.join();
}

void WorkerPool::parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn)
{
    if (n == 0)
        return;
    if (threads_ == 1) {
        fn(0, n);
        return;
    }
    {
        std::lock_guard lock(mutex_);
        job_ = &fn;
        job_n_ = n;
        pending_ = threads_ - 1;
        error_ = nullptr;
        ++generation_;
    }
    start_cv_.notify_all();

    std::exception_ptr local_error;
    auto [b, e] = chunk_bounds(n, threads_, 0);
    try {
        if (b < e)
            fn(b, e);
    } catch (...) {
        local_error = std::current_exception();
    }

    std::unique_lock lock(mutex_);
    done_cv_.wait(lock, [this] { return pending_ == 0; });
    job_ = nullptr;
    if (local_error)
        std::rethrow_exception(local_error);
    if (error_)
        std::rethrow_exception(error_);
}

void WorkerPool::worker_loop(std::size_t worker)
{
    std::size_t seen = 0;
    while (true) {
        const std::function<void(std::size_t, std::size_t)>* job = nullptr;
        std::size_t n = 0;
        {
            std::unique_lock lock(mutex_);
            start_cv_.wait(lock, [&] { return stopping_ || generation_ != seen; });
            if (stopping_)
                return;
            seen = generation_;
            job = job_;
            n = job_n_;
        }
        auto [b, e] = chunk_bounds(n, threads_, worker);
        try {
            if (b < e)
                (*job)(b, e);
        } catch (...) {
            std::lock_guard lock(mutex_);
            if (!error_)
                error_ = std::current_exception();
        }
        {
            std::lock_guard lock(mutex_);
            --pending_;
        }
        done_cv_.notify_one();
    }
}

std::size_t default_thread_count()
{
    return std::max<unsigned>(std::thread::hardware_concurrency(), 1u);
}

}  // namespace ratpo
