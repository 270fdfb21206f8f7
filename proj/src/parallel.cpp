#include "eigenmarket/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace eigenmarket {

std::size_t thread_budget() {
    std::size_t budget = 0;
    if (const char* env = std::getenv("EIGENMARKET_THREADS")) {
        try {
            budget = static_cast<std::size_t>(std::stoul(env));
        } catch (...) {
            budget = 0;
        }
    }
    if (budget == 0) budget = std::max(1u, std::thread::hardware_concurrency());
    return budget;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, std::size_t min_per_thread) {
    const std::size_t workers =
        std::min(thread_budget(), std::max<std::size_t>(1, count / std::max<std::size_t>(1, min_per_thread)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    // Strided assignment balances triangular workloads (row i costs N - i).
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) body(i);
        });
    }
}

}  // namespace eigenmarket
