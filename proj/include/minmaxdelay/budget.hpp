#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mmd {

// Work limits for the exhaustive pieces of the library. Exceeding a limit
// raises BudgetExceededError rather than returning a possibly wrong
// answer; callers can pass larger limits when they know what they are in for.
struct SearchBudget {
  std::int64_t max_nodes = 10'000'000;  // search tree nodes visited
  std::int64_t max_paths = 10'000;      // enumerated source-sink paths
};

struct BudgetExceededError : std::runtime_error {
  explicit BudgetExceededError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

struct NodeCounter {
  std::int64_t used = 0;
  std::int64_t limit = 0;

  void tick(const char* what) {
    if (++used > limit) throw BudgetExceededError(std::string(what) + " budget of " +
                                                  std::to_string(limit) + " exhausted");
  }
};

}  // namespace detail

}  // namespace mmd
