#include "etl/parallel.hpp"

namespace etl {

namespace {
std::atomic<std::size_t> g_workers{1};
}

void set_workers(std::size_t n) {
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    g_workers.store(n);
}

std::size_t workers() { return g_workers.load(); }

namespace detail {

bool& in_worker() {
    thread_local bool flag = false;
    return flag;
}

void tree_reduce(std::vector<Complex>& slots, std::size_t n, std::size_t width) {
    while (n > 1) {
        const std::size_t half = n / 2;
        for (std::size_t i = 0; i < half; ++i) {
            Complex* dst = slots.data() + i * width;
            const Complex* a = slots.data() + (2 * i) * width;
            const Complex* b = slots.data() + (2 * i + 1) * width;
            for (std::size_t k = 0; k < width; ++k) dst[k] = a[k] + b[k];
        }
        if (n % 2 == 1) {
            std::copy_n(slots.data() + (n - 1) * width, width, slots.data() + half * width);
            n = half + 1;
        } else {
            n = half;
        }
    }
}

}  // namespace detail
}  // namespace etl
