#include "nlstab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nlstab {

int default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

void parallel_for(int n, int workers, const std::function<void(int)>& fn)
{
    if (n <= 0) return;
    if (workers <= 0) workers = default_workers();
    workers = std::min(workers, n);
    std::vector<std::exception_ptr> errors(n);
    if (workers == 1) {
        for (int i = 0; i < n; ++i) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (int i = next++; i < n; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace nlstab
