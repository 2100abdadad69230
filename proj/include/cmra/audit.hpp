#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cmra {

using Rational = boost::multiprecision::cpp_rational;

/// Exact decimal parse: "107.6" -> 538/5. Throws AuditError on malformed input.
Rational parse_decimal(const std::string& text);
/// Shortest exact decimal when the denominator allows it, else "p/q".
std::string format_rational(const Rational& r);

struct LotCategory
{
  std::string name;
  int supply = 0;
  Rational reserve;
  /// Sold outside the clock at its reserve; enters payments as a fixed charge.
  bool fixed = false;
};

struct SpectrumCap
{
  std::string name;
  std::map<std::string, int> weights;
  int max = 0;
};

struct AuditBidder
{
  std::string name;
  std::map<std::string, int> counts;
  Rational payment;
};

struct AuctionAuditRecord
{
  std::string name;
  std::string unit;
  std::vector<LotCategory> categories;
  std::vector<SpectrumCap> caps;
  std::vector<AuditBidder> bidders;
  /// Treat non-fixed categories with equal reserves as one price.
  bool merge_equal_reserves = false;

  /// Throws AuditError when counts exceed supply or caps, a category is
  /// unknown, or a payment is below the reserve value of the bundle.
  void validate() const;
};

/// Affine solution set particular + sum_k t_k * directions[k] over the price unknowns.
struct SolutionSet
{
  std::vector<std::string> unknowns;
  std::vector<Rational> particular;
  std::vector<std::vector<Rational>> directions;
  /// Some member respects every reserve.
  bool reserve_feasible = false;
  /// A reserve-feasible member (smallest parameters first) when one exists.
  std::optional<std::vector<Rational>> witness;
  /// Parameter range for one-dimensional families; empty bound = unbounded.
  std::optional<Rational> lower;
  std::optional<Rational> upper;
};

/// Payment difference between a bidder and one whose bundle it contains.
struct ResidualIdentity
{
  std::string larger;
  std::string smaller;
  /// Lot-count difference per unknown (zero entries omitted).
  std::map<std::string, int> difference;
  Rational amount;
  Rational reserve_value;
  SolutionSet solutions;

  /// "1135 = p_B + 4 p_D + 6 p_F"
  std::string equation() const;
};

struct AuditFlag
{
  std::string first;
  std::string second;
  std::string message;
};

struct AuditReport
{
  std::string name;
  std::string unit;
  std::vector<std::string> unknowns;
  /// Every bidder paid fixed charges plus uniform per-category prices.
  bool linear_consistent = false;
  /// ... and those prices respect the reserves.
  bool linear_feasible = false;
  SolutionSet linear;
  /// Payment minus fixed charges minus the priced bundle, per bidder, at the witness.
  std::map<std::string, Rational> residuals;
  /// Smallest set of bidder equations without a common price vector.
  std::vector<std::string> certificate;
  std::vector<ResidualIdentity> identities;
  std::vector<AuditFlag> flags;
};

/// Reconstructs uniform linear prices from published bundles and payments.
AuditReport audit_linear_prices(const AuctionAuditRecord& record);

}  // namespace cmra
