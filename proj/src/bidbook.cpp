#include "cmra/bidbook.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cmra {

namespace {

// One money unit of slack absorbs rounding of the linear terms in the cap.
constexpr std::int64_t kCapSlackUnits = 1;

}  // namespace

std::string_view to_string(BidKind k)
{
  return k == BidKind::Headline ? "headline" : "additional";
}

std::string_view to_string(BidError::Code c)
{
  switch (c) {
  case BidError::Code::NonIncreasingPrice:
    return "NonIncreasingPrice";
  case BidError::Code::NonMonotoneHeadline:
    return "NonMonotoneHeadline";
  case BidError::Code::OverLinearPrice:
    return "OverLinearPrice";
  case BidError::Code::ActivityCapViolation:
    return "ActivityCapViolation";
  case BidError::Code::CapExceeded:
    return "CapExceeded";
  case BidError::Code::NegativeAmount:
    return "NegativeAmount";
  case BidError::Code::NonZeroEmptyPackage:
    return "NonZeroEmptyPackage";
  }
  return "?";
}

BidError::BidError(Code code, const std::string& what)
  : Error(std::string(to_string(code)) + ": " + what)
  , code_(code)
{}

Money linear_amount(double price, GridIndex k, int resolution)
{
  return Money::from_real(price * static_cast<double>(k) / static_cast<double>(resolution));
}

BidBook::BidBook(const QuantityGrid& grid)
  : resolution_(grid.resolution())
  , cap_index_(grid.cap_index())
  , slots_(static_cast<std::size_t>(grid.cap_index()) + 1)
{}

std::optional<Money> BidBook::bid_at(GridIndex k) const
{
  if (k < 0 || k > cap_index_) {
    return std::nullopt;
  }
  const Slot& s = slots_[static_cast<std::size_t>(k)];
  if (!s.present) {
    return std::nullopt;
  }
  return Money::from_units(s.units);
}

std::optional<BidKind> BidBook::source_at(GridIndex k) const
{
  if (k < 0 || k > cap_index_ || !slots_[static_cast<std::size_t>(k)].present) {
    return std::nullopt;
  }
  return slots_[static_cast<std::size_t>(k)].kind;
}

std::optional<GridIndex> BidBook::headline() const
{
  if (history_.empty()) {
    return std::nullopt;
  }
  return history_.back().quantity;
}

std::optional<double> BidBook::last_price() const
{
  if (history_.empty()) {
    return std::nullopt;
  }
  return history_.back().price;
}

std::optional<Money> BidBook::activity_cap(GridIndex k) const
{
  return cap_given(k, drops_, slots_);
}

std::optional<Money> BidBook::cap_given(GridIndex k, const std::vector<Drop>& drops,
                                        const std::vector<Slot>& book) const
{
  std::optional<Money> cap;
  for (const Drop& d : drops) {
    if (k <= d.to || k >= d.from) {
      continue;
    }
    const Slot& base = book[static_cast<std::size_t>(d.to)];
    // The headline bid at the drop target always exists.
    const Money limit = Money::from_units(base.units) + linear_amount(d.price, k - d.to, resolution_);
    if (!cap || limit < *cap) {
      cap = limit;
    }
  }
  return cap;
}

Money BidBook::legal_limit(GridIndex k, double clock_price, GridIndex headline) const
{
  Money limit = linear_amount(clock_price, k, resolution_);
  const bool dropping = !history_.empty() && headline < history_.back().quantity;
  if (drops_.empty() && !dropping) {
    return limit;
  }
  std::vector<Slot> next = slots_;
  Slot& h = next[static_cast<std::size_t>(headline)];
  const Money headline_bid = linear_amount(clock_price, headline, resolution_);
  if (!h.present || headline_bid.units() > h.units) {
    h = {headline_bid.units(), true, BidKind::Headline};
  }
  std::vector<Drop> drops = drops_;
  if (dropping) {
    drops.push_back({clock_price, history_.back().quantity, headline});
  }
  if (const auto cap = cap_given(k, drops, next); cap && *cap < limit) {
    limit = *cap;
  }
  return limit;
}

void BidBook::record_round(double clock_price, GridIndex headline, std::span<const AdditionalBid> additional)
{
  const auto fail = [](BidError::Code code, const auto&... parts) {
    std::ostringstream msg;
    (msg << ... << parts);
    throw BidError(code, msg.str());
  };

  if (!history_.empty() && !(clock_price > history_.back().price)) {
    fail(BidError::Code::NonIncreasingPrice, "clock ", clock_price, " after ", history_.back().price);
  }
  if (!(clock_price >= 0.0)) {
    fail(BidError::Code::NonIncreasingPrice, "clock ", clock_price, " is negative");
  }
  if (headline < 0 || headline > cap_index_) {
    fail(BidError::Code::CapExceeded, "headline ", headline, " outside [0, ", cap_index_, "]");
  }
  if (!history_.empty() && headline > history_.back().quantity) {
    fail(BidError::Code::NonMonotoneHeadline, "headline rose from ", history_.back().quantity, " to ", headline);
  }

  for (const AdditionalBid& bid : additional) {
    if (bid.quantity < 0 || bid.quantity > cap_index_) {
      fail(BidError::Code::CapExceeded, "additional bid at ", bid.quantity, " outside [0, ", cap_index_, "]");
    }
    if (bid.amount < Money::zero()) {
      fail(BidError::Code::NegativeAmount, "amount ", bid.amount.to_string(), " at ", bid.quantity);
    }
    if (bid.quantity == 0 && bid.amount != Money::zero()) {
      fail(BidError::Code::NonZeroEmptyPackage, "amount ", bid.amount.to_string(), " on the empty package");
    }
    if (bid.amount > linear_amount(clock_price, bid.quantity, resolution_)) {
      fail(BidError::Code::OverLinearPrice, "amount ", bid.amount.to_string(), " at ", bid.quantity, " over clock ",
           clock_price);
    }
  }

  const Money headline_bid = linear_amount(clock_price, headline, resolution_);
  const auto raise = [](Slot& s, Money amount, BidKind kind) {
    if (!s.present || amount.units() > s.units) {
      s = {amount.units(), true, kind};
    }
  };

  std::vector<Slot> next = slots_;
  raise(next[static_cast<std::size_t>(headline)], headline_bid, BidKind::Headline);
  for (const AdditionalBid& bid : additional) {
    raise(next[static_cast<std::size_t>(bid.quantity)], bid.amount, BidKind::Additional);
  }

  std::vector<Drop> drops = drops_;
  if (!history_.empty() && headline < history_.back().quantity) {
    drops.push_back({clock_price, history_.back().quantity, headline});
  }
  if (!drops.empty()) {
    for (const AdditionalBid& bid : additional) {
      const auto cap = cap_given(bid.quantity, drops, next);
      if (cap && bid.amount.units() > cap->units() + kCapSlackUnits) {
        fail(BidError::Code::ActivityCapViolation, "amount ", bid.amount.to_string(), " at ", bid.quantity,
             " over relative cap ", cap->to_string());
      }
    }
  }

  slots_ = std::move(next);
  drops_ = std::move(drops);
  history_.push_back({clock_price, headline});
}

}  // namespace cmra
