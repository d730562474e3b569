#pragma once

#include <stdexcept>
#include <string>

namespace qdec {

// Error categories map onto CLI exit codes.
enum class ErrorKind : int {
    config = 2,
    infeasible = 3,
    numerical = 4,
    io = 5,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const { return kind_; }
    int exit_code() const { return static_cast<int>(kind_); }

  private:
    ErrorKind kind_;
};

}  // namespace qdec
