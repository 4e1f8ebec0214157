#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace implreg {

// 0 means: IMPLREG_THREADS from the environment, else 1.
std::size_t resolve_threads(std::size_t requested);

// Keeps BLAS single-threaded; parallelism is done at the trial level.
void limit_blas_threads();

template <class F>
void parallel_for(std::size_t count, std::size_t threads, F&& body) {
    threads = resolve_threads(threads);
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    if (threads > count) threads = count;
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

// Pairwise summation; the result depends only on the order of `values`.
double pairwise_sum(std::span<const double> values);

struct MeanStderr {
    double mean = 0.0;
    double std_error = 0.0;
};

MeanStderr mean_stderr(std::span<const double> values);

}  // namespace implreg
