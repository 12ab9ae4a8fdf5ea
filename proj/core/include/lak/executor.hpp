#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace lak {

// Runs independent, index-addressed tasks on a fixed number of threads.
// Tasks write results into their own slots, so completion order never
// affects results.
class Executor {
 public:
  explicit Executor(std::size_t workers = 1) : workers_(std::max<std::size_t>(1, workers)) {}

  [[nodiscard]] std::size_t workers() const { return workers_; }

  // Calls task(i) for every i in [0, n). If tasks throw, the exception of the
  // lowest failing index is rethrown after all workers finish.
  template <class F>
  void run(std::size_t n, F&& task) const {
    const std::size_t threads = std::min(workers_, n);
    if (threads <= 1) {
      for (std::size_t i = 0; i < n; ++i) task(i);
      return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    auto worker = [&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          task(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    {
      std::vector<std::jthread> pool;
      pool.reserve(threads - 1);
      for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
      worker();
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

 private:
  std::size_t workers_;
};

}  // namespace lak
