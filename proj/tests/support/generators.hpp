#pragma once

#include "cmra/bidbook.hpp"
#include "cmra/mechanism.hpp"

#include <algorithm>
#include <random>
#include <vector>

namespace cmra::gen {

struct RoundInput
{
  double price;
  GridIndex headline;
  std::vector<AdditionalBid> additional;
};

inline double cap_for(std::mt19937_64& rng)
{
  static constexpr double caps[] = {0.6, 0.75, 0.8, 0.9};
  return caps[std::uniform_int_distribution<int>(0, 3)(rng)];
}

/// Next round that the book must accept: headline at or below the current one,
/// additional bids drawn below each point's legal limit.
inline RoundInput legal_round(const BidBook& book, std::mt19937_64& rng, double price)
{
  RoundInput r{price, 0, {}};
  const GridIndex top = book.headline().value_or(book.cap_index());
  std::uniform_int_distribution<int> keep(0, 3);
  r.headline = keep(rng) == 0 ? std::uniform_int_distribution<GridIndex>(0, top)(rng) : top;
  const int count = std::uniform_int_distribution<int>(0, 3)(rng);
  for (int i = 0; i < count; ++i) {
    const GridIndex k = std::uniform_int_distribution<GridIndex>(0, book.cap_index())(rng);
    if (k == 0) {
      r.additional.push_back({0, Money::zero()});
      continue;
    }
    const Money limit = book.legal_limit(k, price, r.headline);
    if (limit.units() < 0) {
      continue;
    }
    const auto units = std::uniform_int_distribution<std::int64_t>(0, limit.units())(rng);
    r.additional.push_back({k, Money::from_units(units)});
  }
  return r;
}

/// Plays `rounds` random legal rounds on a fresh book.
inline BidBook random_book(const QuantityGrid& grid, std::mt19937_64& rng, int rounds)
{
  BidBook book(grid);
  double price = std::uniform_real_distribution<double>(0.0, 0.5)(rng);
  for (int i = 0; i < rounds; ++i) {
    const RoundInput r = legal_round(book, rng, price);
    book.record_round(r.price, r.headline, r.additional);
    price += std::uniform_real_distribution<double>(0.01, 0.5)(rng);
  }
  return book;
}

/// Exhaustive closing rule: every feasible pair and both single acceptances.
inline ClosingResult brute_force_closing(const BidBook& b1, const BidBook& b2)
{
  const int n = b1.resolution();
  std::optional<Money> single;
  for (const BidBook* b : {&b1, &b2}) {
    for (GridIndex k = 0; k <= b->cap_index(); ++k) {
      if (const auto v = b->bid_at(k); v && (!single || *v > *single)) {
        single = *v;
      }
    }
  }
  std::optional<Money> pair;
  std::pair<GridIndex, GridIndex> best{-1, -1};
  for (GridIndex k1 = 0; k1 <= b1.cap_index(); ++k1) {
    for (GridIndex k2 = 0; k2 <= b2.cap_index() && k1 + k2 <= n; ++k2) {
      const auto v1 = b1.bid_at(k1);
      const auto v2 = b2.bid_at(k2);
      if (!v1 || !v2) {
        continue;
      }
      const Money v = *v1 + *v2;
      const auto rank = [](std::pair<GridIndex, GridIndex> a) { return std::pair(std::min(a.first, a.second), a.first); };
      if (!pair || v > *pair || (v == *pair && rank({k1, k2}) > rank(best))) {
        pair = v;
        best = {k1, k2};
      }
    }
  }
  ClosingResult r;
  r.revenue = std::max(single.value_or(Money::zero()), pair.value_or(Money::zero()));
  if (pair && *pair >= r.revenue) {
    r.allocation = best;
  }
  return r;
}

}  // namespace cmra::gen
