#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <vector>

namespace permqfi {

/// Runs job(0) ... job(count-1) on up to `workers` threads (0 means one per
/// hardware thread). Jobs are handed out in index order; each job must only
/// write to its own output slot. An exception thrown by a job is captured
/// in the matching entry of the result and does not stop the others.
std::vector<std::exception_ptr> run_jobs(std::size_t count, std::size_t workers,
                                         const std::function<void(std::size_t)>& job);

std::size_t resolve_workers(std::size_t requested);

}  // namespace permqfi
