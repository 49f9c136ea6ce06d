#ifndef MSEOL_ERRORS_HPP_
#define MSEOL_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mseol {

/// Malformed generator or label spec, out-of-range index, bad shape.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// CSV or checkpoint text that cannot be parsed. `row()` is 1-based and
/// counts the header line; 0 means the error is not tied to a row.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t row)
      : std::runtime_error(row == 0 ? what : "row " + std::to_string(row) + ": " + what),
        row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class InsufficientSamples : public std::runtime_error {
 public:
  InsufficientSamples(int class_index, std::size_t requested, std::size_t available)
      : std::runtime_error("class " + std::to_string(class_index) + ": requested " +
                           std::to_string(requested) + " samples but only " +
                           std::to_string(available) + " available"),
        class_index_(class_index) {}
  int class_index() const noexcept { return class_index_; }

 private:
  int class_index_;
};

/// Raised by the trainer when a batch loss becomes non-finite.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mseol

#endif  // MSEOL_ERRORS_HPP_
