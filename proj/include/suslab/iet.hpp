#pragma once

// Countable interval exchange transformations of [0,1).
//
// Points are carried as fiber coordinates (interval index, offset inside the
// interval). Breakpoints accumulate at 1, where absolute doubles lose every
// digit, so all dynamics is evaluated relative to the interval (or to the
// dyadic block containing it) and absolute x is derived output only.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace suslab {

struct FiberCoordinate {
  std::size_t index = 0;
  double offset = 0.0;

  friend bool operator==(const FiberCoordinate&, const FiberCoordinate&) = default;
};

enum class Family { BlockRotation, BlockSwap, VonNeumannKakutani, ExplicitTable };

std::string to_string(Family family);

struct TableEntry {
  double x = 0.0;
  double a = 0.0;

  friend bool operator==(const TableEntry&, const TableEntry&) = default;
};

/// How an explicit table continues past its last entry. Identity subdivides the
/// last interval [x_{K-1}, 1) dyadically (its translation must be 0); None keeps
/// it whole, giving a finite exchange.
enum class TailKind { Identity, None };

/// Lengths of a countable partition of [0,1), with optional closed-form tails.
struct LengthSequence {
  std::function<double(std::size_t)> length;
  /// sum_{i >= n} l_i, when known in closed form.
  std::function<double(std::size_t)> mass_tail;
  /// sum_{i >= n} -l_i log l_i, when known in closed form.
  std::function<double(std::size_t)> entropy_tail;
  /// Number of nonzero lengths for finite partitions.
  std::optional<std::size_t> count;
};

namespace detail {

// Dyadic blocks B_n = [1 - 2^-n, 1 - 2^-(n+1)), each cut at (1 - theta)|B_n| and
// rotated by theta |B_n|. Offsets are multiples of 2^-53 |B_n| for every point
// produced by locate(), which makes the rotation arithmetic exact.
struct BlockRotationData {
  double theta;
  double cut;  // 1 - theta, exact
};

// Interval n = [1 - 2^-n, 1 - 2^-(n+1)) translated onto [2^-(n+1), 2^-n).
struct VonNeumannKakutaniData {};

struct ExplicitTableData {
  std::vector<TableEntry> entries;
  TailKind tail;
};

}  // namespace detail

class CountableIET {
 public:
  static constexpr std::size_t kDefaultTruncation = 64;

  static CountableIET block_rotation(double theta, std::size_t truncation = kDefaultTruncation);
  static CountableIET block_rotation_golden(std::size_t truncation = kDefaultTruncation);
  static CountableIET block_swap(std::size_t truncation = kDefaultTruncation);
  static CountableIET von_neumann_kakutani(std::size_t truncation = kDefaultTruncation);
  /// Throws std::invalid_argument for unsorted entries, x_0 != 0, x >= 1, or a
  /// nonzero translation on the identity tail.
  static CountableIET explicit_table(std::vector<TableEntry> entries, TailKind tail,
                                     std::optional<std::size_t> truncation = std::nullopt);

  Family family() const noexcept { return family_; }
  std::size_t truncation() const noexcept { return truncation_; }
  /// Rotation fraction for block families, 0 otherwise.
  double theta() const noexcept;
  const std::vector<TableEntry>& table() const;
  TailKind tail_kind() const;

  /// Number of intervals when the partition is finite.
  std::optional<std::size_t> interval_count() const;

  double left(std::size_t i) const;
  double length(std::size_t i) const;
  double translation(std::size_t i) const;
  /// 1 - x_i evaluated without cancellation; equals sum_{j >= i} l_j.
  double mass_tail(std::size_t i) const;
  /// sum_{j >= i} -l_j log l_j in closed form.
  double entropy_tail(std::size_t i) const;

  LengthSequence lengths() const;

  bool valid(const FiberCoordinate& p) const;
  FiberCoordinate locate(double x) const;
  /// The coordinate for offset u in interval i, snapped to the same grid that
  /// locate() produces (u is clamped into [0, l_i)).
  FiberCoordinate fiber(std::size_t i, double u) const;
  double absolute(const FiberCoordinate& p) const;
  FiberCoordinate apply(const FiberCoordinate& p) const;
  FiberCoordinate apply_inverse(const FiberCoordinate& p) const;

 private:
  using Data = std::variant<detail::BlockRotationData, detail::VonNeumannKakutaniData,
                            detail::ExplicitTableData>;

  CountableIET(Family family, Data data, std::size_t truncation)
      : family_(family), data_(std::move(data)), truncation_(truncation) {}

  Family family_;
  Data data_;
  std::size_t truncation_;
};

// ---- validation -----------------------------------------------------------

enum class Verdict { Pass, Fail, Warn };
std::string to_string(Verdict v);

struct IETValidationReport {
  Verdict condition1 = Verdict::Pass;  // x_0 = 0, strictly increasing, x_i -> 1
  Verdict condition2 = Verdict::Pass;  // image endpoints accumulate only at 1
  Verdict covering = Verdict::Pass;    // image intervals disjoint, union of full measure
  double min_image_endpoint = 0.0;
  std::size_t endpoints_outside_window = 0;
  double max_overlap = 0.0;
  double covered_measure = 0.0;  // Lebesgue measure of the union of images below N
  double tail_mass = 0.0;        // sum_{i >= N} l_i
  std::vector<std::string> notes;

  bool ok() const { return condition1 == Verdict::Pass && condition2 == Verdict::Pass && covering == Verdict::Pass; }
};

IETValidationReport validate_countable_iet(const CountableIET& iet, double tail_bound);

// ---- partition entropy ----------------------------------------------------

enum class SeriesVerdict { Convergent, Divergent, Unknown };
std::string to_string(SeriesVerdict v);

struct PartialSumReport {
  double partial_sum = 0.0;   // sum_{i < N}
  double tail_bound = 0.0;    // bound on sum_{i >= N}, +inf when unknown
  SeriesVerdict verdict = SeriesVerdict::Unknown;
  double value = 0.0;         // partial_sum + tail_bound when convergent
};

/// -sum l_i log l_i over the first N intervals plus the family's closed-form tail.
PartialSumReport partition_entropy(const CountableIET& iet, std::size_t n);
/// Same for an arbitrary length sequence; without a closed-form tail the verdict
/// comes from the behaviour of partial sums over dyadic index ranges.
PartialSumReport partition_entropy(const LengthSequence& lengths, std::size_t n);

/// Classify a nonnegative series from its terms using dyadic block increments.
PartialSumReport classify_series(const std::function<double(std::size_t)>& term, std::size_t n);

}  // namespace suslab
