#include "dyadlab/common.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <numeric>
#include <thread>
#include <vector>

namespace dyadlab {

Fraction::Fraction(int64_t n, int64_t d) {
    if (d == 0) throw Error("Fraction with zero denominator");
    if (n < 0 || d < 0) throw Error("Fraction must be nonnegative");
    const int64_t g = std::gcd(n, d);
    num = (g != 0) ? n / g : n;
    den = (g != 0) ? d / g : 1;
    if (num == 0) den = 1;
}

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = unit();
    double u2 = unit();
    while (u1 <= 0.0) u1 = unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

namespace {
std::atomic<int> g_jobs{0};  // 0 = auto
}

void set_jobs(int jobs) { g_jobs.store(jobs); }

int effective_jobs() {
    const char* serial = std::getenv("DYADLAB_NO_PARALLEL");
    if (serial != nullptr && std::string(serial) == "1") return 1;
    int j = g_jobs.load();
    if (j <= 0) {
        const unsigned hc = std::thread::hardware_concurrency();
        j = hc == 0 ? 1 : static_cast<int>(hc);
    }
    return j;
}

void parallel_for(int64_t n, const std::function<void(int64_t, int64_t)>& chunk_fn) {
    if (n <= 0) return;
    const int jobs = std::min<int64_t>(effective_jobs(), n);
    if (jobs <= 1) {
        chunk_fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex err_mutex;
    const int64_t chunk = (n + jobs - 1) / jobs;
    for (int t = 0; t < jobs; ++t) {
        const int64_t lo = t * chunk;
        const int64_t hi = std::min<int64_t>(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi]() {
            try {
                chunk_fn(lo, hi);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!failed.exchange(true)) first_error = e.what();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failed.load()) throw Error("parallel task failed: " + first_error);
}

}  // namespace dyadlab
