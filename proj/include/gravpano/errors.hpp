#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gravpano {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

// The input is structurally unable to determine the unknowns
// (identity motion, duplicated correspondences, rank collapse).
class DegenerateConfiguration : public Error {
 public:
  using Error::Error;
};

class SingularConfiguration : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class NotDivisible : public Error {
 public:
  using Error::Error;
};

class NoNullspace : public Error {
 public:
  using Error::Error;
};

class NoModel : public Error {
 public:
  NoModel(const std::string& what, std::size_t best_inliers, std::size_t iterations)
      : Error(what), best_inliers_(best_inliers), iterations_(iterations) {}

  std::size_t best_inliers() const { return best_inliers_; }
  std::size_t iterations() const { return iterations_; }

 private:
  std::size_t best_inliers_;
  std::size_t iterations_;
};

class InfeasibleConfig : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace gravpano
