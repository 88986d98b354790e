#pragma once

#include <stdexcept>
#include <string>

namespace casimir {

// Raised when a computation cannot meet the requested accuracy (as opposed to
// a domain violation). Carries the bound that was actually achieved so the
// caller can decide whether to relax its demands.
class accuracy_error : public std::runtime_error {
 public:
  accuracy_error(const std::string& what, double achieved_bound)
      : std::runtime_error(what), achieved_(achieved_bound) {}

  double achieved_bound() const noexcept { return achieved_; }

 private:
  double achieved_;
};

}  // namespace casimir
