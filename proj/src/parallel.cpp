#include "siolab/parallel.hpp"

#include <omp.h>

#include <atomic>
#include <exception>
#include <mutex>

namespace siolab {

namespace {
std::atomic<int> g_workers{0};
}

void set_worker_count(int workers) { g_workers = workers < 0 ? 0 : workers; }

int worker_count() {
    const int w = g_workers.load();
    return w > 0 ? w : omp_get_max_threads();
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const int workers = worker_count();
    if (workers <= 1 || count <= 1 || omp_in_parallel()) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    const auto n = static_cast<long long>(count);
#pragma omp parallel for num_threads(workers) schedule(dynamic, 1)
    for (long long i = 0; i < n; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace siolab
