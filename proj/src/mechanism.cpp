#include "cmra/mechanism.hpp"

#include <algorithm>
#include <cmath>

namespace cmra {

std::string_view to_string(Termination t)
{
  return t == Termination::Closed ? "closed" : "max-price-hit";
}

ClosingResult solve_closing(const BidBook& book1, const BidBook& book2)
{
  const int n = book1.resolution();
  const GridIndex cap1 = book1.cap_index();
  const GridIndex cap2 = book2.cap_index();

  ClosingResult result;
  bool any = false;
  for (const BidBook* book : {&book1, &book2}) {
    for (GridIndex k = 0; k <= book->cap_index(); ++k) {
      if (const auto b = book->bid_at(k); b && (!any || *b > result.revenue)) {
        result.revenue = *b;
        any = true;
      }
    }
  }

  // prefix[m]: best B2 over indices <= m, keeping the largest index attaining it.
  struct Prefix
  {
    std::int64_t units;
    GridIndex index;
  };
  std::vector<std::optional<Prefix>> prefix(static_cast<std::size_t>(cap2) + 1);
  std::optional<Prefix> running;
  for (GridIndex k = 0; k <= cap2; ++k) {
    if (const auto b = book2.bid_at(k); b && (!running || b->units() >= running->units)) {
      running = Prefix{b->units(), k};
    }
    prefix[static_cast<std::size_t>(k)] = running;
  }

  struct Candidate
  {
    std::int64_t units;
    GridIndex k1;
    GridIndex k2;
  };
  std::optional<Candidate> best;
  const auto better = [](const Candidate& a, const Candidate& b) {
    if (a.units != b.units) {
      return a.units > b.units;
    }
    const GridIndex min_a = std::min(a.k1, a.k2);
    const GridIndex min_b = std::min(b.k1, b.k2);
    if (min_a != min_b) {
      return min_a > min_b;
    }
    return a.k1 > b.k1;
  };
  for (GridIndex k1 = 0; k1 <= cap1; ++k1) {
    const auto b1 = book1.bid_at(k1);
    if (!b1) {
      continue;
    }
    const GridIndex room = std::min(cap2, n - k1);
    if (room < 0) {
      continue;
    }
    const auto& p = prefix[static_cast<std::size_t>(room)];
    if (!p) {
      continue;
    }
    const Candidate c{b1->units() + p->units, k1, p->index};
    if (!best || better(c, *best)) {
      best = c;
    }
  }

  if (best && (!any || best->units >= result.revenue.units())) {
    result.revenue = Money::from_units(best->units);
    result.allocation = std::make_pair(best->k1, best->k2);
  }
  return result;
}

std::optional<Money> RevenueCurve::single_max() const
{
  if (!single[0]) {
    return single[1];
  }
  if (!single[1]) {
    return single[0];
  }
  return std::max(*single[0], *single[1]);
}

std::optional<Money> RevenueCurve::pair_max() const
{
  std::optional<Money> best;
  for (const auto& pt : points) {
    if (pt.pair && (!best || *pt.pair > *best)) {
      best = pt.pair;
    }
  }
  return best;
}

RevenueCurve revenue_curve(const BidBook& book1, const BidBook& book2)
{
  RevenueCurve curve;
  const int n = book1.resolution();
  for (GridIndex k1 = 0; k1 <= n; ++k1) {
    RevenuePoint pt{k1, std::nullopt};
    const auto b1 = book1.bid_at(k1);
    const auto b2 = book2.bid_at(n - k1);
    if (b1 && b2) {
      pt.pair = *b1 + *b2;
    }
    curve.points.push_back(pt);
  }
  for (int i = 0; i < 2; ++i) {
    const BidBook& book = i == 0 ? book1 : book2;
    for (GridIndex k = 0; k <= book.cap_index(); ++k) {
      const auto b = book.bid_at(k);
      auto& slot = curve.single[static_cast<std::size_t>(i)];
      if (b && (!slot || *b > *slot)) {
        slot = b;
      }
    }
  }
  return curve;
}

namespace {

void legalize(const BidBook& book, double price, Emission& e)
{
  if (const auto h = book.headline()) {
    e.headline = std::min(e.headline, *h);
  }
  e.headline = std::clamp(e.headline, 0, book.cap_index());
  auto& bids = e.additional;
  bids.erase(std::remove_if(bids.begin(), bids.end(),
                            [&](const AdditionalBid& b) { return b.quantity < 0 || b.quantity > book.cap_index(); }),
             bids.end());
  for (auto& b : bids) {
    if (b.quantity == 0) {
      b.amount = Money::zero();
      continue;
    }
    b.amount = std::max(Money::zero(), std::min(b.amount, book.legal_limit(b.quantity, price, e.headline)));
  }
}

void submit(BidBook& book, const Strategy& s, const EmissionContext& ctx, Emission& e, bool legal)
{
  s.emit(ctx, e);
  if (legal) {
    legalize(book, ctx.price, e);
  }
  book.record_round(ctx.price, e.headline, e.additional);
}

void append_rows(std::vector<LogRow>& log, int round, double price, int bidder, const Emission& e, int resolution,
                 bool closed, Money r_star)
{
  log.push_back(
    {round, price, bidder, BidKind::Headline, e.headline, linear_amount(price, e.headline, resolution), closed, r_star});
  for (const auto& b : e.additional) {
    log.push_back({round, price, bidder, BidKind::Additional, b.quantity, b.amount, closed, r_star});
  }
}

double clock_at(const AuctionConfig& c, int round)
{
  return c.start_price + static_cast<double>(round - 1) * c.increment;
}

}  // namespace

AuctionOutcome run_cmra(const Strategy& bidder1, const Strategy& bidder2, const AuctionConfig& config)
{
  const int n = config.grid.resolution();
  AuctionOutcome out;
  out.resolution = n;
  BidBook book1(config.grid);
  BidBook book2(config.grid);
  Emission e1;
  Emission e2;
  std::optional<double> previous;

  for (int tick = 1, round = 1;; ++tick, ++round) {
    const double price = clock_at(config, tick);
    if (price > config.max_price) {
      out.termination = Termination::MaxPriceHit;
      out.final_price = previous.value_or(config.start_price);
      out.rounds = round - 1;
      out.excess_supply = 1.0;
      return out;
    }
    const EmissionContext ctx{price, round, previous};
    BidBook next1 = book1;
    BidBook next2 = book2;
    submit(next1, bidder1, ctx, e1, config.legalize_emissions);
    submit(next2, bidder2, ctx, e2, config.legalize_emissions);
    ClosingResult closing = solve_closing(next1, next2);

    if (!closing.allocation) {
      if (config.keep_log) {
        append_rows(out.log, round, price, 1, e1, n, false, closing.revenue);
        append_rows(out.log, round, price, 2, e2, n, false, closing.revenue);
      }
      book1 = std::move(next1);
      book2 = std::move(next2);
      previous = price;
      continue;
    }

    double final_price = price;
    if (config.refine && previous) {
      // Non-closing probes are committed as rounds, so the books follow the
      // continuous clock up to the tolerance.
      double hi = price;
      bool stale = false;
      Emission p1;
      Emission p2;
      while (hi - *previous > config.refine_tolerance || stale) {
        const double mid = stale ? hi : 0.5 * (*previous + hi);
        const EmissionContext probe{mid, round, previous};
        BidBook t1 = book1;
        BidBook t2 = book2;
        submit(t1, bidder1, probe, p1, config.legalize_emissions);
        submit(t2, bidder2, probe, p2, config.legalize_emissions);
        ClosingResult c = solve_closing(t1, t2);
        if (c.allocation) {
          hi = mid;
          next1 = std::move(t1);
          next2 = std::move(t2);
          closing = c;
          e1 = p1;
          e2 = p2;
          stale = false;
          continue;
        }
        if (config.keep_log) {
          append_rows(out.log, round, mid, 1, p1, n, false, c.revenue);
          append_rows(out.log, round, mid, 2, p2, n, false, c.revenue);
        }
        book1 = std::move(t1);
        book2 = std::move(t2);
        previous = mid;
        ++round;
        if (mid == hi) {
          break;
        }
        // The close found at hi predates this round; recheck it once bracketed.
        stale = hi - mid <= config.refine_tolerance;
      }
      if (*previous == hi) {
        // The bracket collapsed without a close; resume the regular clock.
        if (*previous < price) {
          --tick;
        }
        --round;
        continue;
      }
      final_price = hi;
    }

    if (config.keep_log) {
      append_rows(out.log, round, final_price, 1, e1, n, true, closing.revenue);
      append_rows(out.log, round, final_price, 2, e2, n, true, closing.revenue);
    }
    const auto [k1, k2] = *closing.allocation;
    const std::array<GridIndex, 2> ks{k1, k2};
    const std::array<const BidBook*, 2> books{&next1, &next2};
    for (std::size_t i = 0; i < 2; ++i) {
      out.quantity_index[i] = ks[i];
      out.quantity[i] = config.grid.share(ks[i]);
      if (ks[i] > 0) {
        out.payment[i] = *books[i]->bid_at(ks[i]);
        out.kind[i] = books[i]->source_at(ks[i]);
      }
    }
    out.final_price = final_price;
    out.revenue = closing.revenue;
    out.termination = Termination::Closed;
    out.rounds = round;
    out.excess_supply = 1.0 - static_cast<double>(k1 + k2) / n;
    return out;
  }
}

AuctionOutcome run_clock(const Strategy& bidder1, const Strategy& bidder2, const AuctionConfig& config)
{
  const int n = config.grid.resolution();
  AuctionOutcome out;
  out.resolution = n;
  Emission e1;
  Emission e2;
  std::optional<double> previous;
  std::array<GridIndex, 2> last{config.grid.cap_index(), config.grid.cap_index()};

  const auto demand = [&](const Strategy& s, const EmissionContext& ctx, Emission& e, GridIndex prior) {
    s.emit(ctx, e);
    return std::clamp(e.headline, 0, prior);
  };

  for (int round = 1;; ++round) {
    const double price = clock_at(config, round);
    if (price > config.max_price) {
      out.termination = Termination::MaxPriceHit;
      out.final_price = previous.value_or(config.start_price);
      out.rounds = round - 1;
      out.excess_supply = 1.0;
      return out;
    }
    const EmissionContext ctx{price, round, previous};
    std::array<GridIndex, 2> d{demand(bidder1, ctx, e1, last[0]), demand(bidder2, ctx, e2, last[1])};
    const bool clears = d[0] + d[1] <= n;
    if (config.keep_log) {
      for (int i = 0; i < 2; ++i) {
        const GridIndex q = d[static_cast<std::size_t>(i)];
        out.log.push_back({round, price, i + 1, BidKind::Headline, q, linear_amount(price, q, n), clears,
                           linear_amount(price, d[0], n) + linear_amount(price, d[1], n)});
      }
    }
    if (!clears) {
      last = d;
      previous = price;
      continue;
    }

    double final_price = price;
    if (config.refine && previous) {
      double lo = *previous;
      double hi = price;
      while (hi - lo > config.refine_tolerance) {
        const double mid = 0.5 * (lo + hi);
        const EmissionContext probe{mid, round, previous};
        const std::array<GridIndex, 2> m{demand(bidder1, probe, e1, last[0]), demand(bidder2, probe, e2, last[1])};
        if (m[0] + m[1] <= n) {
          hi = mid;
          d = m;
        } else {
          lo = mid;
          last = m;
        }
      }
      final_price = hi;
      previous = lo;
    }

    out.rounds = round;
    out.termination = Termination::Closed;
    if (d[0] == 0 && d[1] == 0 && previous) {
      // Both dropped out together: sell to the pre-drop demand with the larger
      // linear revenue, bidder 1 on ties.
      const double p = *previous;
      const Money r1 = linear_amount(p, last[0], n);
      const Money r2 = linear_amount(p, last[1], n);
      const std::size_t w = r1 >= r2 ? 0 : 1;
      out.final_price = p;
      out.quantity_index[w] = last[w];
      out.quantity[w] = config.grid.share(last[w]);
      out.payment[w] = linear_amount(p, last[w], n);
      out.kind[w] = BidKind::Headline;
      out.revenue = out.payment[w];
      out.excess_supply = 1.0 - out.quantity[w];
      return out;
    }
    out.final_price = final_price;
    for (std::size_t i = 0; i < 2; ++i) {
      out.quantity_index[i] = d[i];
      out.quantity[i] = config.grid.share(d[i]);
      out.payment[i] = linear_amount(final_price, d[i], n);
      if (d[i] > 0) {
        out.kind[i] = BidKind::Headline;
      }
      out.revenue += out.payment[i];
    }
    out.excess_supply = 1.0 - static_cast<double>(d[0] + d[1]) / n;
    return out;
  }
}

std::pair<BidBook, BidBook> books_at(const Strategy& bidder1, const Strategy& bidder2, const AuctionConfig& config,
                                     double clock_price)
{
  BidBook book1(config.grid);
  BidBook book2(config.grid);
  Emission e1;
  Emission e2;
  std::optional<double> previous;
  for (int round = 1;; ++round) {
    const double ladder = clock_at(config, round);
    const double price = std::min(ladder, clock_price);
    const EmissionContext ctx{price, round, previous};
    submit(book1, bidder1, ctx, e1, config.legalize_emissions);
    submit(book2, bidder2, ctx, e2, config.legalize_emissions);
    if (ladder >= clock_price) {
      break;
    }
    previous = price;
  }
  return {std::move(book1), std::move(book2)};
}

}  // namespace cmra
