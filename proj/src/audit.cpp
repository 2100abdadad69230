#include "cmra/audit.hpp"

#include "cmra/error.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace cmra {

Rational parse_decimal(const std::string& text)
{
  std::string s = text;
  s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return c == ',' || c == '_' || c == ' '; }), s.end());
  if (s.empty()) {
    throw AuditError("empty amount");
  }
  bool negative = false;
  if (s.front() == '-' || s.front() == '+') {
    negative = s.front() == '-';
    s.erase(s.begin());
  }
  const auto dot = s.find('.');
  const std::string whole = s.substr(0, dot);
  const std::string frac = dot == std::string::npos ? "" : s.substr(dot + 1);
  const auto digits = [](const std::string& d) { return std::all_of(d.begin(), d.end(), [](char c) { return c >= '0' && c <= '9'; }); };
  if ((whole.empty() && frac.empty()) || !digits(whole) || !digits(frac)) {
    throw AuditError("malformed amount '" + text + "'");
  }
  boost::multiprecision::cpp_int num(whole.empty() ? "0" : whole);
  boost::multiprecision::cpp_int den = 1;
  for (char c : frac) {
    num = num * 10 + (c - '0');
    den *= 10;
  }
  Rational r(num, den);
  return negative ? Rational(-r) : r;
}

std::string format_rational(const Rational& r)
{
  using boost::multiprecision::cpp_int;
  cpp_int num = boost::multiprecision::numerator(r);
  cpp_int den = boost::multiprecision::denominator(r);
  cpp_int rest = den;
  int twos = 0;
  int fives = 0;
  while (rest % 2 == 0) {
    rest /= 2;
    ++twos;
  }
  while (rest % 5 == 0) {
    rest /= 5;
    ++fives;
  }
  if (rest != 1) {
    return num.str() + "/" + den.str();
  }
  const int places = std::max(twos, fives);
  cpp_int scale = 1;
  for (int i = 0; i < places; ++i) {
    scale *= 10;
  }
  const bool negative = num < 0;
  cpp_int scaled = (negative ? cpp_int(-num) : num) * (scale / den);
  std::string digits = scaled.str();
  if (places > 0) {
    if (static_cast<int>(digits.size()) <= places) {
      digits.insert(0, static_cast<std::size_t>(places + 1) - digits.size(), '0');
    }
    digits.insert(digits.size() - static_cast<std::size_t>(places), ".");
  }
  return (negative ? "-" : "") + digits;
}

void AuctionAuditRecord::validate() const
{
  if (bidders.empty()) {
    throw AuditError(name + ": record has no bidders");
  }
  std::map<std::string, const LotCategory*> by_name;
  for (const auto& c : categories) {
    if (!by_name.emplace(c.name, &c).second) {
      throw AuditError(name + ": duplicate category " + c.name);
    }
    if (c.reserve < 0 || c.supply < 0) {
      throw AuditError(name + ": negative supply or reserve for " + c.name);
    }
  }
  std::map<std::string, int> sold;
  for (const auto& b : bidders) {
    Rational reserve_value = 0;
    for (const auto& [cat, n] : b.counts) {
      const auto it = by_name.find(cat);
      if (it == by_name.end()) {
        throw AuditError(name + ": bidder " + b.name + " won unknown category " + cat);
      }
      if (n < 0) {
        throw AuditError(name + ": negative lot count for " + b.name);
      }
      sold[cat] += n;
      reserve_value += it->second->reserve * n;
    }
    if (b.payment < reserve_value) {
      throw AuditError(name + ": bidder " + b.name + " paid " + format_rational(b.payment) +
                       " below the reserve value " + format_rational(reserve_value));
    }
    for (const auto& cap : caps) {
      int load = 0;
      for (const auto& [cat, w] : cap.weights) {
        if (const auto it = b.counts.find(cat); it != b.counts.end()) {
          load += w * it->second;
        }
      }
      if (load > cap.max) {
        throw AuditError(name + ": bidder " + b.name + " exceeds cap " + cap.name);
      }
    }
  }
  for (const auto& [cat, n] : sold) {
    if (n > by_name.at(cat)->supply) {
      throw AuditError(name + ": " + std::to_string(n) + " lots of " + cat + " sold but supply is " +
                       std::to_string(by_name.at(cat)->supply));
    }
  }
}

namespace {

struct Column
{
  std::string name;
  Rational reserve;
  std::vector<std::string> members;
};

struct Row
{
  std::vector<Rational> coef;
  Rational rhs;
};

// Fourier-Motzkin feasibility of  a . t <= b  with a witness by back-substitution.
std::optional<std::vector<Rational>> fm_witness(std::vector<Row> system, std::size_t dims)
{
  std::vector<std::vector<Row>> stages;
  stages.push_back(system);
  for (std::size_t k = dims; k-- > 0;) {
    std::vector<Row> pos;
    std::vector<Row> neg;
    std::vector<Row> next;
    for (auto& r : stages.back()) {
      if (r.coef[k] > 0) {
        pos.push_back(r);
      } else if (r.coef[k] < 0) {
        neg.push_back(r);
      } else {
        next.push_back(r);
      }
    }
    for (const auto& p : pos) {
      for (const auto& n : neg) {
        const Rational wp = -n.coef[k];
        const Rational wn = p.coef[k];
        Row c;
        c.coef.resize(dims);
        for (std::size_t j = 0; j < dims; ++j) {
          c.coef[j] = p.coef[j] * wp + n.coef[j] * wn;
        }
        c.coef[k] = 0;
        c.rhs = p.rhs * wp + n.rhs * wn;
        next.push_back(std::move(c));
      }
    }
    stages.push_back(std::move(next));
  }
  for (const auto& r : stages.back()) {
    if (r.rhs < 0) {
      return std::nullopt;
    }
  }
  std::vector<Rational> t(dims);
  for (std::size_t k = 0; k < dims; ++k) {
    const auto& stage = stages[dims - k - 1];
    std::optional<Rational> lo;
    std::optional<Rational> hi;
    for (const auto& r : stage) {
      Rational rest = r.rhs;
      for (std::size_t j = 0; j < k; ++j) {
        rest -= r.coef[j] * t[j];
      }
      if (r.coef[k] > 0) {
        const Rational bound = rest / r.coef[k];
        if (!hi || bound < *hi) {
          hi = bound;
        }
      } else if (r.coef[k] < 0) {
        const Rational bound = rest / r.coef[k];
        if (!lo || bound > *lo) {
          lo = bound;
        }
      }
    }
    t[k] = lo ? *lo : (hi ? *hi : Rational(0));
  }
  return t;
}

// Solves coef . p = rhs exactly; nullopt when inconsistent.
std::optional<SolutionSet> solve(std::vector<Row> rows, const std::vector<Column>& cols)
{
  const std::size_t n = cols.size();
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < rows.size(); ++c) {
    std::size_t sel = r;
    while (sel < rows.size() && rows[sel].coef[c] == 0) {
      ++sel;
    }
    if (sel == rows.size()) {
      continue;
    }
    std::swap(rows[r], rows[sel]);
    const Rational lead = rows[r].coef[c];
    for (auto& v : rows[r].coef) {
      v /= lead;
    }
    rows[r].rhs /= lead;
    for (std::size_t o = 0; o < rows.size(); ++o) {
      if (o == r || rows[o].coef[c] == 0) {
        continue;
      }
      const Rational f = rows[o].coef[c];
      for (std::size_t j = 0; j < n; ++j) {
        rows[o].coef[j] -= f * rows[r].coef[j];
      }
      rows[o].rhs -= f * rows[r].rhs;
    }
    pivots.push_back(c);
    ++r;
  }
  for (std::size_t o = r; o < rows.size(); ++o) {
    if (rows[o].rhs != 0) {
      return std::nullopt;
    }
  }

  SolutionSet s;
  for (const auto& c : cols) {
    s.unknowns.push_back(c.name);
  }
  s.particular.assign(n, 0);
  for (std::size_t i = 0; i < pivots.size(); ++i) {
    s.particular[pivots[i]] = rows[i].rhs;
  }
  std::vector<std::size_t> free;
  for (std::size_t c = 0; c < n; ++c) {
    if (std::find(pivots.begin(), pivots.end(), c) == pivots.end()) {
      free.push_back(c);
    }
  }
  for (std::size_t f : free) {
    std::vector<Rational> d(n, 0);
    d[f] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) {
      d[pivots[i]] = -rows[i].coef[f];
    }
    s.directions.push_back(std::move(d));
  }

  // particular + D t >= reserve   <=>   -D t <= particular - reserve
  const std::size_t dims = s.directions.size();
  std::vector<Row> ineq;
  for (std::size_t c = 0; c < n; ++c) {
    Row row;
    row.coef.resize(dims);
    for (std::size_t k = 0; k < dims; ++k) {
      row.coef[k] = -s.directions[k][c];
    }
    row.rhs = s.particular[c] - cols[c].reserve;
    ineq.push_back(std::move(row));
  }
  if (dims == 1) {
    for (const auto& row : ineq) {
      if (row.coef[0] > 0) {
        const Rational b = row.rhs / row.coef[0];
        if (!s.upper || b < *s.upper) {
          s.upper = b;
        }
      } else if (row.coef[0] < 0) {
        const Rational b = row.rhs / row.coef[0];
        if (!s.lower || b > *s.lower) {
          s.lower = b;
        }
      }
    }
  }
  if (const auto t = fm_witness(ineq, dims)) {
    std::vector<Rational> p = s.particular;
    for (std::size_t k = 0; k < dims; ++k) {
      for (std::size_t c = 0; c < n; ++c) {
        p[c] += s.directions[k][c] * (*t)[k];
      }
    }
    s.reserve_feasible = true;
    s.witness = std::move(p);
  }
  return s;
}

std::string ratio_text(const Rational& r)
{
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(2);
  s << static_cast<double>(r);
  return s.str();
}

}  // namespace

std::string ResidualIdentity::equation() const
{
  std::ostringstream s;
  s << format_rational(amount) << " =";
  bool first = true;
  for (const auto& [name, n] : difference) {
    s << (first ? " " : " + ");
    if (n != 1) {
      s << n << " ";
    }
    s << "p_" << name;
    first = false;
  }
  return s.str();
}

AuditReport audit_linear_prices(const AuctionAuditRecord& record)
{
  record.validate();

  std::map<std::string, const LotCategory*> by_name;
  std::map<std::string, int> sold;
  for (const auto& c : record.categories) {
    by_name[c.name] = &c;
  }
  for (const auto& b : record.bidders) {
    for (const auto& [cat, n] : b.counts) {
      sold[cat] += n;
    }
  }

  std::vector<Column> cols;
  std::map<std::string, std::size_t> col_of;
  for (const auto& c : record.categories) {
    if (c.fixed || sold[c.name] == 0) {
      continue;
    }
    std::size_t idx = cols.size();
    if (record.merge_equal_reserves) {
      const auto it = std::find_if(cols.begin(), cols.end(), [&](const Column& col) { return col.reserve == c.reserve; });
      if (it != cols.end()) {
        idx = static_cast<std::size_t>(it - cols.begin());
      }
    }
    if (idx == cols.size()) {
      cols.push_back({c.name, c.reserve, {c.name}});
    } else {
      cols[idx].members.push_back(c.name);
      cols[idx].name += "+" + c.name;
    }
    col_of[c.name] = idx;
  }

  std::vector<Row> rows;
  for (const auto& b : record.bidders) {
    Row row;
    row.coef.assign(cols.size(), 0);
    row.rhs = b.payment;
    for (const auto& [cat, n] : b.counts) {
      const LotCategory& c = *by_name.at(cat);
      if (c.fixed) {
        row.rhs -= c.reserve * n;
      } else {
        row.coef[col_of.at(cat)] += n;
      }
    }
    rows.push_back(std::move(row));
  }

  AuditReport rep;
  rep.name = record.name;
  rep.unit = record.unit;
  for (const auto& c : cols) {
    rep.unknowns.push_back(c.name);
  }

  if (auto all = solve(rows, cols)) {
    rep.linear_consistent = true;
    rep.linear_feasible = all->reserve_feasible;
    rep.linear = *all;
    const std::vector<Rational> p = all->witness ? *all->witness : all->particular;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      Rational r = rows[i].rhs;
      for (std::size_t c = 0; c < cols.size(); ++c) {
        r -= rows[i].coef[c] * p[c];
      }
      rep.residuals[record.bidders[i].name] = r;
    }
  } else {
    // Smallest inconsistent subset, searched by increasing size.
    const std::size_t m = rows.size();
    for (std::size_t size = 1; size <= m && rep.certificate.empty(); ++size) {
      std::vector<bool> pick(m, false);
      std::fill(pick.begin(), pick.begin() + static_cast<long>(size), true);
      do {
        std::vector<Row> subset;
        std::vector<std::string> names;
        for (std::size_t i = 0; i < m; ++i) {
          if (pick[i]) {
            subset.push_back(rows[i]);
            names.push_back(record.bidders[i].name);
          }
        }
        if (!solve(subset, cols)) {
          rep.certificate = names;
          break;
        }
      } while (std::prev_permutation(pick.begin(), pick.end()));
    }
  }

  const std::size_t m = rows.size();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) {
        continue;
      }
      bool contains = true;
      bool larger = false;
      for (std::size_t c = 0; c < cols.size(); ++c) {
        contains = contains && rows[i].coef[c] >= rows[j].coef[c];
        larger = larger || rows[i].coef[c] > rows[j].coef[c];
      }
      if (!contains || !larger) {
        continue;
      }
      ResidualIdentity id;
      id.larger = record.bidders[i].name;
      id.smaller = record.bidders[j].name;
      id.amount = rows[i].rhs - rows[j].rhs;
      Row diff;
      diff.coef.assign(cols.size(), 0);
      diff.rhs = id.amount;
      for (std::size_t c = 0; c < cols.size(); ++c) {
        diff.coef[c] = rows[i].coef[c] - rows[j].coef[c];
        if (diff.coef[c] != 0) {
          for (const auto& member : cols[c].members) {
            // Merged columns share one price; show each member's own count.
            int n = 0;
            for (const auto* b : {&record.bidders[i], &record.bidders[j]}) {
              const auto it = b->counts.find(member);
              const int v = it == b->counts.end() ? 0 : it->second;
              n += b == &record.bidders[i] ? v : -v;
            }
            if (n != 0) {
              id.difference[member] = n;
            }
          }
          id.reserve_value += diff.coef[c] * cols[c].reserve;
        }
      }
      if (auto s = solve({diff}, cols)) {
        id.solutions = *s;
      }
      if (!id.solutions.reserve_feasible) {
        rep.flags.push_back({id.larger, id.smaller,
                             "difference " + id.equation() + " cannot hold at prices above reserves"});
      }
      rep.identities.push_back(std::move(id));
    }
  }

  // Proportional bundles must have proportional payments under uniform prices.
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j || rows[j].rhs == 0) {
        continue;
      }
      std::optional<Rational> k;
      bool proportional = true;
      for (std::size_t c = 0; c < cols.size() && proportional; ++c) {
        const Rational& a = rows[i].coef[c];
        const Rational& b = rows[j].coef[c];
        if (b == 0) {
          proportional = a == 0;
        } else if (!k) {
          k = a / b;
        } else {
          proportional = a / b == *k;
        }
      }
      if (!proportional || !k || *k < 1 || (*k == 1 && i > j)) {
        continue;
      }
      const Rational ratio = rows[i].rhs / rows[j].rhs;
      if (ratio != *k) {
        rep.flags.push_back({record.bidders[i].name, record.bidders[j].name,
                             record.bidders[i].name + " paid " + ratio_text(ratio) + " times " +
                               record.bidders[j].name + "'s payment for " + ratio_text(*k) +
                               " times the lots; uniform prices give equal ratios"});
      }
    }
  }
  return rep;
}

}  // namespace cmra
