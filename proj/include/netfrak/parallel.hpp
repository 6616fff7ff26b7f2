#ifndef NETFRAK_PARALLEL_HPP
#define NETFRAK_PARALLEL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace netfrak {

/// Worker cap: NETFRAK_THREADS if set to a positive integer, else hardware concurrency.
inline std::size_t worker_count() {
  if (const char* env = std::getenv("NETFRAK_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (...) {
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

namespace detail {
inline thread_local bool in_worker = false;
}

/// Runs fn(i) for i in [0, n). Results must be written to per-index slots so
/// that the outcome does not depend on the number of workers. Nested calls
/// from inside a worker run serially.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers = detail::in_worker ? 1 : std::min(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      detail::in_worker = true;
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
      detail::in_worker = false;
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

/// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace netfrak

#endif  // NETFRAK_PARALLEL_HPP
