#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace ghg {

/// Thrown when a caller breaks a documented precondition.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

inline bool is_infinite(double v) { return v == kInfinity; }

/// Extended non-negative cost: a finite real or the +inf sentinel.
///
/// Infinite entries encode hard geometric constraints. Addition saturates
/// at infinity, and subtracting anything from an infinite cost is rejected
/// so that reparameterizations can never turn a hard constraint into a
/// finite number.
class Cost {
 public:
  constexpr Cost() = default;
  constexpr explicit Cost(double v) : value_(v) {}

  static constexpr Cost infinity() { return Cost(kInfinity); }

  constexpr double value() const { return value_; }
  bool infinite() const { return is_infinite(value_); }
  bool finite() const { return std::isfinite(value_); }

  friend Cost operator+(Cost a, Cost b) { return Cost(a.value_ + b.value_); }
  Cost& operator+=(Cost o) {
    value_ += o.value_;
    return *this;
  }
  friend Cost operator-(Cost a, Cost b) {
    if (a.infinite() || b.infinite()) {
      throw ContractError("Cost: subtraction involving an infinite cost");
    }
    return Cost(a.value_ - b.value_);
  }
  friend Cost operator*(double s, Cost c) {
    if (c.infinite()) return c;
    return Cost(s * c.value_);
  }

  friend bool operator==(Cost a, Cost b) { return a.value_ == b.value_; }
  friend auto operator<=>(Cost a, Cost b) { return a.value_ <=> b.value_; }

  friend std::ostream& operator<<(std::ostream& os, Cost c) {
    if (c.infinite()) return os << "inf";
    return os << c.value_;
  }

 private:
  double value_ = 0.0;
};

}  // namespace ghg
