#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace torquot {

// Coarse failure classes. Values 2..4 line up with the CLI exit codes and the
// C API status codes so every layer agrees on what went wrong.
enum class ErrorClass {
  InvalidSpec = 2,    // malformed input: schema, dimensions, rank defects
  ResourceLimit = 3,  // plane cap, group closure cap, search budget
  Numerical = 4,      // singular Gram, degenerate plane/arrangement, coarse grid
  Precondition = 5,   // operation called outside its documented domain
  Internal = 7,       // invariant breached; always a bug
};

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, std::string name, const std::string& detail)
      : std::runtime_error(name + ": " + detail), cls_(cls), name_(std::move(name)) {}

  ErrorClass cls() const { return cls_; }
  // Stable machine-readable tag, e.g. "singular_gram", "not_split".
  const std::string& name() const { return name_; }

 private:
  ErrorClass cls_;
  std::string name_;
};

[[noreturn]] inline void fail(ErrorClass cls, const std::string& name,
                              const std::string& detail) {
  throw Error(cls, name, detail);
}

}  // namespace torquot
