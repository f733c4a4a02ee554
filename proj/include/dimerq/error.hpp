#pragma once

#include <stdexcept>
#include <string>

namespace dimerq {

/// Base of every error raised by the library. The category maps onto the
/// CLI exit status (usage 2, data 3, numeric 4).
class Error : public std::runtime_error {
public:
  enum class Category { usage = 2, data = 3, numeric = 4 };

  Error(Category category, const std::string& what)
    : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }
  int exit_code() const noexcept { return static_cast<int>(category_); }

private:
  Category category_;
};

class UsageError : public Error {
public:
  explicit UsageError(const std::string& what) : Error(Category::usage, what) {}
};

/// Input data that violates a physical or format contract.
class DataError : public Error {
public:
  explicit DataError(const std::string& what) : Error(Category::data, what) {}
};

class NumericError : public Error {
public:
  explicit NumericError(const std::string& what) : Error(Category::numeric, what) {}
};

} // namespace dimerq
