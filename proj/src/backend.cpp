#include "sac3/backend.hpp"

#include <atomic>
#include <thread>

namespace sac3 {

std::vector<CompletionResult> Backend::complete_batch(
    const std::vector<CompletionRequest>& requests, int max_parallel) {
  if (max_parallel < 1) {
    throw BackendError("max_parallel must be >= 1");
  }
  std::vector<CompletionResult> results(requests.size());
  if (requests.empty()) return results;

  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(max_parallel), requests.size());
  std::atomic<std::size_t> next{0};

  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= requests.size()) return;
      try {
        results[i] = CompletionResult::success(complete(requests[i]));
      } catch (const std::exception& ex) {
        results[i] = CompletionResult::failure(ex.what());
      }
    }
  };

  if (workers == 1) {
    run();
    return results;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace sac3
