#include "chebpint/worker_pool.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace chebpint
{

WorkerPool::WorkerPool(int workers) : workers_(std::max(1, workers)) {}

void WorkerPool::parallel_for(int count,
                              const std::function<void(int)>& fn) const
{
    if (count <= 0)
        return;
    const int active = std::min(workers_, count);
    if (active == 1) {
        for (int i = 0; i < count; ++i)
            fn(i);
        return;
    }

    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto run_range = [&](int begin, int end) {
        try {
            for (int i = begin; i < end; ++i)
                fn(i);
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error)
                first_error = std::current_exception();
        }
    };

    std::vector<std::thread> threads;
    threads.reserve(active - 1);
    const int chunk = count / active;
    const int extra = count % active;
    int begin = 0;
    int main_begin = 0, main_end = 0;
    for (int w = 0; w < active; ++w) {
        const int end = begin + chunk + (w < extra ? 1 : 0);
        if (w == 0) {
            main_begin = begin;
            main_end = end;
        } else {
            threads.emplace_back(run_range, begin, end);
        }
        begin = end;
    }
    run_range(main_begin, main_end);
    for (auto& t : threads)
        t.join();
    if (first_error)
        std::rethrow_exception(first_error);
}

int resolve_worker_count(int requested)
{
    if (requested > 0)
        return requested;
    if (const char* env = std::getenv("CHEBPINT_WORKERS")) {
        char* end = nullptr;
        const long value = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && value > 0 && value < 4096)
            return static_cast<int>(value);
    }
    return 1;
}

} // namespace chebpint
