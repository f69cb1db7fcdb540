#pragma once

#include <chrono>
#include <functional>
#include <sstream>
#include <string>

namespace acceptance {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id = 0;
  std::string title;
  double budget_seconds = 0.0;
  std::function<Outcome()> check;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

template <class... Args>
std::string cat(const Args&... args) {
  std::ostringstream os;
  os.precision(6);
  (os << ... << args);
  return os.str();
}

}  // namespace acceptance
