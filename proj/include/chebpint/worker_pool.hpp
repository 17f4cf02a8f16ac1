#ifndef CHEBPINT_WORKER_POOL_HPP
#define CHEBPINT_WORKER_POOL_HPP

#include <functional>

namespace chebpint
{

/// Fixed-size shared-memory worker pool.
///
/// `parallel_for(count, fn)` calls `fn(i)` exactly once for every i in
/// [0, count). Indices are split into contiguous static ranges, one per
/// worker, so the assignment of work never affects what each call computes.
/// The first exception thrown by any worker is rethrown on the caller.
class WorkerPool
{
public:
    explicit WorkerPool(int workers = 1);

    int size() const noexcept { return workers_; }

    void parallel_for(int count, const std::function<void(int)>& fn) const;

private:
    int workers_;
};

/// Resolves a worker count: positive values are used as-is, otherwise the
/// CHEBPINT_WORKERS environment variable, otherwise 1.
int resolve_worker_count(int requested);

} // namespace chebpint

#endif // CHEBPINT_WORKER_POOL_HPP
