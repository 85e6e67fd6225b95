#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "adapair/error.hpp"

namespace adapair {

struct JobError {
  std::string message;
  bool config = false;  ///< raised as ConfigError
};

/// Runs f(0..jobs-1) on up to `workers` threads. Exceptions are caught per
/// job and returned at the job's index.
template <typename F>
std::vector<std::optional<JobError>> parallel_jobs(std::size_t jobs, std::size_t workers, F&& f) {
  std::vector<std::optional<JobError>> errors(jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs; k = next++) {
      try {
        f(k);
      } catch (const ConfigError& e) {
        errors[k] = JobError{e.what(), true};
      } catch (const std::exception& e) {
        errors[k] = JobError{e.what(), false};
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(jobs, 1));
  if (threads == 1) {
    worker();
    return errors;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return errors;
}

}  // namespace adapair
