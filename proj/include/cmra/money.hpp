#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <string>

namespace cmra {

/// Fixed-point money amount. Bids and payments are compared exactly, so the
/// closing rule detects revenue ties without floating-point noise.
class Money
{
public:
  static constexpr std::int64_t kUnitsPerCurrency = 1'000'000'000;

  constexpr Money() = default;

  static constexpr Money from_units(std::int64_t units)
  {
    Money m;
    m.units_ = units;
    return m;
  }

  /// Nearest representable amount.
  static Money from_real(double amount)
  {
    return from_units(std::llround(amount * static_cast<double>(kUnitsPerCurrency)));
  }

  static constexpr Money zero() { return {}; }

  constexpr std::int64_t units() const { return units_; }
  double to_real() const { return static_cast<double>(units_) / static_cast<double>(kUnitsPerCurrency); }

  constexpr Money operator+(Money o) const { return from_units(units_ + o.units_); }
  constexpr Money operator-(Money o) const { return from_units(units_ - o.units_); }
  constexpr Money& operator+=(Money o)
  {
    units_ += o.units_;
    return *this;
  }
  constexpr Money& operator-=(Money o)
  {
    units_ -= o.units_;
    return *this;
  }

  constexpr auto operator<=>(const Money&) const = default;

  std::string to_string() const;

private:
  std::int64_t units_ = 0;
};

inline std::string Money::to_string() const
{
  const bool negative = units_ < 0;
  const auto magnitude = static_cast<std::uint64_t>(negative ? -units_ : units_);
  const auto whole = magnitude / static_cast<std::uint64_t>(kUnitsPerCurrency);
  auto frac = magnitude % static_cast<std::uint64_t>(kUnitsPerCurrency);
  std::string out = (negative ? "-" : "") + std::to_string(whole);
  if (frac != 0) {
    std::string digits = std::to_string(frac);
    digits.insert(0, 9 - digits.size(), '0');
    while (digits.back() == '0') {
      digits.pop_back();
    }
    out += "." + digits;
  }
  return out;
}

}  // namespace cmra
