#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace perclab {

// Worker count from PERCLAB_WORKERS, defaulting to 1.
inline unsigned default_workers() {
  if (const char* env = std::getenv("PERCLAB_WORKERS")) {
    try {
      const long w = std::stol(env);
      if (w >= 1) return static_cast<unsigned>(w);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

struct ParallelOptions {
  unsigned workers = 0;                // 0 means default_workers()
  std::optional<std::size_t> fail_at;  // fault injection: task with this index throws
};

template <class T>
struct ParallelOutcome {
  std::vector<T> results;  // tasks [0, results.size()) in index order
  bool partial = false;
  std::string error;
};

class InjectedFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Runs task(i) for i in [0, count). Results are merged in index order, so the
// outcome does not depend on the worker count or the schedule. When a task
// throws, the outcome holds the completed prefix before the first failing
// index and is marked partial.
template <class T, class F>
ParallelOutcome<T> run_parallel(std::size_t count, F&& task, const ParallelOptions& options = {}) {
  const unsigned workers =
      std::max<unsigned>(1, std::min<std::size_t>(options.workers ? options.workers : default_workers(),
                                                  std::max<std::size_t>(count, 1)));
  std::vector<std::optional<T>> slots(count);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex error_mutex;
  std::size_t first_failure = count;
  std::string error;

  auto worker = [&] {
    while (!stop.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        if (options.fail_at && *options.fail_at == i) throw InjectedFailure("injected failure at task " + std::to_string(i));
        slots[i].emplace(task(i));
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        if (i < first_failure) {
          first_failure = i;
          error = e.what();
        }
        stop.store(true);
      }
    }
  };

  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  ParallelOutcome<T> out;
  out.partial = first_failure < count;
  out.error = error;
  const std::size_t done = out.partial ? first_failure : count;
  out.results.reserve(done);
  for (std::size_t i = 0; i < done; ++i) out.results.push_back(std::move(*slots[i]));
  return out;
}

}  // namespace perclab
