#pragma once

#include <stdexcept>
#include <string>

namespace terra {

// Malformed or inconsistent input data (bad file, dimension mismatch,
// violated precondition). CLI maps this to exit code 3.
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Filesystem-level failure (unreadable path, short write). Exit code 3.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Training produced a non-finite loss. Exit code 4.
class DivergenceError : public std::runtime_error {
public:
  DivergenceError(int step, const std::string& what)
      : std::runtime_error(what), step_(step) {}
  int step() const { return step_; }

private:
  int step_;
};

}  // namespace terra
