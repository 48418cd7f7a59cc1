#include "suslab/iet.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "suslab/errors.hpp"

namespace suslab {

namespace {

constexpr double kLn2 = std::numbers::ln2;

// Block n with d = 1 - x in (2^-(n+1), 2^-n], and the offset 2^-n - d (exact).
struct BlockPosition {
  std::size_t block;
  double offset;
};

BlockPosition block_from_distance(double d) {
  int e = 0;
  const double f = std::frexp(d, &e);
  const std::size_t n = static_cast<std::size_t>(f == 0.5 ? 1 - e : -e);
  return {n, std::ldexp(1.0, -static_cast<int>(n)) - d};
}

BlockPosition dyadic_block(double x) {
  if (x < 0.5) return {0, x};
  return block_from_distance(1.0 - x);
}

double block_length(std::size_t n) { return std::ldexp(1.0, -static_cast<int>(n) - 1); }

// Offset inside block n scaled to [0,1) and floored onto the 2^-53 grid.
double normalized_on_grid(double offset, std::size_t n) {
  double w = std::ldexp(offset, static_cast<int>(n) + 1);
  double k = std::floor(std::ldexp(w, 53));
  k = std::min(k, 0x1.0p53 - 1.0);
  return std::ldexp(k, -53);
}

double xlogx(double v) { return v > 0.0 ? v * std::log(v) : 0.0; }

// ---- block rotation --------------------------------------------------------

FiberCoordinate rotation_from_normalized(const detail::BlockRotationData& d, std::size_t block,
                                         double w) {
  const double len = block_length(block);
  if (w < d.cut) return {2 * block, w * len};
  return {2 * block + 1, (w - d.cut) * len};
}

double rotation_normalized(const detail::BlockRotationData& d, const FiberCoordinate& p) {
  const std::size_t block = p.index / 2;
  const double w = std::ldexp(p.offset, static_cast<int>(block) + 1);
  return (p.index & 1U) ? d.cut + w : w;
}

// ---- explicit table --------------------------------------------------------

std::size_t explicit_count(const detail::ExplicitTableData& t) {
  return t.tail == TailKind::Identity ? t.entries.size() - 1 : t.entries.size();
}

double table_right(const detail::ExplicitTableData& t, std::size_t j) {
  return j + 1 < t.entries.size() ? t.entries[j + 1].x : 1.0;
}

double table_tail_span(const detail::ExplicitTableData& t) { return 1.0 - t.entries.back().x; }

}  // namespace

std::string to_string(Family family) {
  switch (family) {
    case Family::BlockRotation: return "block_rotation";
    case Family::BlockSwap: return "block_swap";
    case Family::VonNeumannKakutani: return "von_neumann_kakutani";
    case Family::ExplicitTable: return "explicit_table";
  }
  return "unknown";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Warn: return "WARN";
  }
  return "?";
}

std::string to_string(SeriesVerdict v) {
  switch (v) {
    case SeriesVerdict::Convergent: return "CONVERGENT";
    case SeriesVerdict::Divergent: return "DIVERGENT";
    case SeriesVerdict::Unknown: return "UNKNOWN";
  }
  return "?";
}

// ---- construction ----------------------------------------------------------

CountableIET CountableIET::block_rotation(double theta, std::size_t truncation) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("block rotation needs theta in (0,1)");
  // Snap theta to the 2^-53 grid so that 1 - theta and all block arithmetic are exact.
  const double snapped = std::ldexp(std::floor(std::ldexp(theta, 53)), -53);
  if (snapped <= 0.0) throw std::invalid_argument("theta below grid resolution");
  return CountableIET(Family::BlockRotation, detail::BlockRotationData{snapped, 1.0 - snapped},
                      truncation);
}

CountableIET CountableIET::block_rotation_golden(std::size_t truncation) {
  return block_rotation((std::sqrt(5.0) - 1.0) / 2.0, truncation);
}

CountableIET CountableIET::block_swap(std::size_t truncation) {
  return CountableIET(Family::BlockSwap, detail::BlockRotationData{0.5, 0.5}, truncation);
}

CountableIET CountableIET::von_neumann_kakutani(std::size_t truncation) {
  return CountableIET(Family::VonNeumannKakutani, detail::VonNeumannKakutaniData{}, truncation);
}

CountableIET CountableIET::explicit_table(std::vector<TableEntry> entries, TailKind tail,
                                          std::optional<std::size_t> truncation) {
  if (entries.empty()) throw std::invalid_argument("explicit table is empty");
  if (entries.front().x != 0.0) throw std::invalid_argument("explicit table must start at x = 0");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (!std::isfinite(e.x) || !std::isfinite(e.a)) throw std::invalid_argument("explicit table entry not finite");
    if (e.x < 0.0 || e.x >= 1.0) throw std::invalid_argument("explicit table breakpoint outside [0,1)");
    if (i > 0 && !(e.x > entries[i - 1].x)) throw std::invalid_argument("explicit table breakpoints must increase");
  }
  if (tail == TailKind::Identity && entries.back().a != 0.0)
    throw std::invalid_argument("identity tail requires a = 0 on the last entry");
  const std::size_t count = entries.size();
  const std::size_t trunc =
      truncation.value_or(tail == TailKind::Identity ? count - 1 + kDefaultTruncation : count);
  return CountableIET(Family::ExplicitTable, detail::ExplicitTableData{std::move(entries), tail}, trunc);
}

// ---- accessors -------------------------------------------------------------

double CountableIET::theta() const noexcept {
  if (auto* d = std::get_if<detail::BlockRotationData>(&data_)) return d->theta;
  return 0.0;
}

const std::vector<TableEntry>& CountableIET::table() const {
  return std::get<detail::ExplicitTableData>(data_).entries;
}

TailKind CountableIET::tail_kind() const { return std::get<detail::ExplicitTableData>(data_).tail; }

std::optional<std::size_t> CountableIET::interval_count() const {
  if (auto* t = std::get_if<detail::ExplicitTableData>(&data_)) {
    if (t->tail == TailKind::None) return t->entries.size();
  }
  return std::nullopt;
}

double CountableIET::left(std::size_t i) const {
  return std::visit(
      [i](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, detail::BlockRotationData>) {
          const std::size_t n = i / 2;
          const double start = 1.0 - std::ldexp(1.0, -static_cast<int>(n));
          return (i & 1U) ? start + d.cut * block_length(n) : start;
        } else if constexpr (std::is_same_v<T, detail::VonNeumannKakutaniData>) {
          return 1.0 - std::ldexp(1.0, -static_cast<int>(i));
        } else {
          const std::size_t k = explicit_count(d);
          if (i < k) return d.entries[i].x;
          if (d.tail == TailKind::None) return 1.0;
          return 1.0 - std::ldexp(table_tail_span(d), -static_cast<int>(i - k));
        }
      },
      data_);
}

double CountableIET::length(std::size_t i) const {
  return std::visit(
      [i](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, detail::BlockRotationData>) {
          const double len = block_length(i / 2);
          return (i & 1U) ? d.theta * len : d.cut * len;
        } else if constexpr (std::is_same_v<T, detail::VonNeumannKakutaniData>) {
          return block_length(i);
        } else {
          const std::size_t k = explicit_count(d);
          if (i < k) return table_right(d, i) - d.entries[i].x;
          if (d.tail == TailKind::None) return 0.0;
          return std::ldexp(table_tail_span(d), -static_cast<int>(i - k) - 1);
        }
      },
      data_);
}

double CountableIET::translation(std::size_t i) const {
  return std::visit(
      [i](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, detail::BlockRotationData>) {
          const double len = block_length(i / 2);
          return (i & 1U) ? -d.cut * len : d.theta * len;
        } else if constexpr (std::is_same_v<T, detail::VonNeumannKakutaniData>) {
          return 3.0 * block_length(i) - 1.0;
        } else {
          const std::size_t k = explicit_count(d);
          if (i < k) return d.entries[i].a;
          return 0.0;
        }
      },
      data_);
}

double CountableIET::mass_tail(std::size_t i) const {
  return std::visit(
      [i](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, detail::BlockRotationData>) {
          const std::size_t n = i / 2;
          const double len = block_length(n);
          return (i & 1U) ? d.theta * len + len : 2.0 * len;
        } else if constexpr (std::is_same_v<T, detail::VonNeumannKakutaniData>) {
          return std::ldexp(1.0, -static_cast<int>(i));
        } else {
          const std::size_t k = explicit_count(d);
          if (i < k) return 1.0 - d.entries[i].x;
          if (d.tail == TailKind::None) return 0.0;
          return std::ldexp(table_tail_span(d), -static_cast<int>(i - k));
        }
      },
      data_);
}

double CountableIET::entropy_tail(std::size_t i) const {
  return std::visit(
      [i, this](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, detail::BlockRotationData>) {
          // Full blocks m, m+1, ...: sum_k 2^-(k+1) [(k+1) log 2 + H2(theta)].
          const double h2 = -xlogx(d.theta) - xlogx(d.cut);
          std::size_t m = (i + 1) / 2;
          const double full = std::ldexp(1.0, -static_cast<int>(m)) *
                              (static_cast<double>(m + 2) * kLn2 + h2);
          if ((i & 1U) == 0) return full;
          return full - xlogx(length(i));
        } else if constexpr (std::is_same_v<T, detail::VonNeumannKakutaniData>) {
          return kLn2 * static_cast<double>(i + 2) * std::ldexp(1.0, -static_cast<int>(i));
        } else {
          const std::size_t k = explicit_count(d);
          double sum = 0.0;
          for (std::size_t j = i; j < k; ++j) sum -= xlogx(length(j));
          if (d.tail == TailKind::None) return sum;
          const double span = table_tail_span(d);
          const std::size_t t0 = i > k ? i - k : 0;
          const double scale = std::ldexp(span, -static_cast<int>(t0));
          return sum + scale * (-std::log(span) + kLn2 * static_cast<double>(t0 + 2));
        }
      },
      data_);
}

LengthSequence CountableIET::lengths() const {
  LengthSequence seq;
  // The IET is immutable and copied into the closures.
  auto self = std::make_shared<const CountableIET>(*this);
  seq.length = [self](std::size_t i) { return self->length(i); };
  seq.mass_tail = [self](std::size_t i) { return self->mass_tail(i); };
  seq.entropy_tail = [self](std::size_t i) { return self->entropy_tail(i); };
  seq.count = interval_count();
  return seq;
}

// ---- point maps ------------------------------------------------------------

bool CountableIET::valid(const FiberCoordinate& p) const {
  if (auto n = interval_count(); n && p.index >= *n) return false;
  return std::isfinite(p.offset) && p.offset >= 0.0 && p.offset < length(p.index);
}

FiberCoordinate CountableIET::locate(double x) const {
  if (!(x >= 0.0 && x < 1.0)) throw DomainError("locate: x must lie in [0,1)");
  return std::visit(
      [x, this](const auto& d) -> FiberCoordinate {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, detail::BlockRotationData>) {
          const auto pos = dyadic_block(x);
          return rotation_from_normalized(d, pos.block, normalized_on_grid(pos.offset, pos.block));
        } else if constexpr (std::is_same_v<T, detail::VonNeumannKakutaniData>) {
          const auto pos = dyadic_block(x);
          const double w = normalized_on_grid(pos.offset, pos.block);
          return {pos.block, w * block_length(pos.block)};
        } else {
          const std::size_t k = explicit_count(d);
          if (d.tail == TailKind::Identity && x >= d.entries.back().x) {
            const double span = table_tail_span(d);
            const auto pos = block_from_distance((1.0 - x) / span);
            double offset = std::ldexp(span, -static_cast<int>(pos.block)) - (1.0 - x);
            const double len = length(k + pos.block);
            offset = std::clamp(offset, 0.0, std::nextafter(len, 0.0));
            return {k + pos.block, offset};
          }
          auto it = std::upper_bound(d.entries.begin(), d.entries.begin() + static_cast<long>(k), x,
                                     [](double v, const TableEntry& e) { return v < e.x; });
          const std::size_t j = static_cast<std::size_t>(it - d.entries.begin()) - 1;
          return {j, x - d.entries[j].x};
        }
      },
      data_);
}

FiberCoordinate CountableIET::fiber(std::size_t i, double u) const {
  const double len = length(i);
  u = std::clamp(u, 0.0, std::nextafter(len, 0.0));
  if (auto* d = std::get_if<detail::BlockRotationData>(&data_)) {
    const std::size_t block = i / 2;
    const double in_block = (i & 1U) ? d->cut * block_length(block) + u : u;
    const auto p = rotation_from_normalized(*d, block, normalized_on_grid(in_block, block));
    // Rounding can only move the point across the cut by one grid step.
    if (p.index != i) return {i, (i & 1U) ? 0.0 : std::nextafter(len, 0.0)};
    return p;
  }
  if (std::holds_alternative<detail::VonNeumannKakutaniData>(data_)) {
    return {i, normalized_on_grid(u, i) * block_length(i)};
  }
  return {i, u};
}

double CountableIET::absolute(const FiberCoordinate& p) const { return left(p.index) + p.offset; }

FiberCoordinate CountableIET::apply(const FiberCoordinate& p) const {
  return std::visit(
      [&p, this](const auto& d) -> FiberCoordinate {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, detail::BlockRotationData>) {
          const double w = rotation_normalized(d, p);
          const double image = w < d.cut ? w + d.theta : w - d.cut;
          return rotation_from_normalized(d, p.index / 2, image);
        } else if constexpr (std::is_same_v<T, detail::VonNeumannKakutaniData>) {
          if (p.index == 0) {
            const auto pos = block_from_distance(0.5 - p.offset);
            return {pos.block, pos.offset};
          }
          return {0, block_length(p.index) + p.offset};
        } else {
          const std::size_t k = explicit_count(d);
          if (p.index >= k) return p;
          const double y = d.entries[p.index].x + p.offset + d.entries[p.index].a;
          if (!(y >= 0.0 && y < 1.0)) throw ConsistencyError("explicit table maps a point outside [0,1)");
          return locate(y);
        }
      },
      data_);
}

FiberCoordinate CountableIET::apply_inverse(const FiberCoordinate& p) const {
  return std::visit(
      [&p, this](const auto& d) -> FiberCoordinate {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, detail::BlockRotationData>) {
          const double w = rotation_normalized(d, p);
          const double pre = w >= d.theta ? w - d.theta : w + d.cut;
          return rotation_from_normalized(d, p.index / 2, pre);
        } else if constexpr (std::is_same_v<T, detail::VonNeumannKakutaniData>) {
          if (p.index == 0) {
            if (p.offset == 0.0) throw ConsistencyError("0 is not in the image of any interval");
            int e = 0;
            std::frexp(p.offset, &e);
            const std::size_t n = static_cast<std::size_t>(-e);
            return {n, p.offset - block_length(n)};
          }
          const double start = 0.5 - std::ldexp(1.0, -static_cast<int>(p.index));
          return {0, start + p.offset};
        } else {
          const std::size_t k = explicit_count(d);
          if (p.index >= k) return p;
          const double y = absolute(p);
          for (std::size_t j = 0; j < k; ++j) {
            const double lo = d.entries[j].x + d.entries[j].a;
            const double hi = table_right(d, j) + d.entries[j].a;
            if (y >= lo && y < hi) {
              const double u = y - d.entries[j].a - d.entries[j].x;
              return {j, std::clamp(u, 0.0, std::nextafter(length(j), 0.0))};
            }
          }
          throw ConsistencyError("point is not in the image of any table interval");
        }
      },
      data_);
}

// ---- validation ------------------------------------------------------------

IETValidationReport validate_countable_iet(const CountableIET& iet, double tail_bound) {
  const std::size_t n = iet.truncation();
  if (n < 2) throw std::invalid_argument("validation needs truncation index >= 2");
  IETValidationReport report;

  // Condition (1).
  if (iet.left(0) != 0.0) {
    report.condition1 = Verdict::Fail;
    report.notes.push_back("x_0 != 0");
  }
  const auto finite = iet.interval_count();
  const std::size_t upto = finite ? std::min(n, *finite) : n;
  for (std::size_t i = 0; i + 1 < upto; ++i) {
    if (!(iet.mass_tail(i + 1) < iet.mass_tail(i))) {
      report.condition1 = Verdict::Fail;
      report.notes.push_back("breakpoints not strictly increasing at index " + std::to_string(i + 1));
      break;
    }
  }
  report.tail_mass = finite && n >= *finite ? 0.0 : iet.mass_tail(n);
  if (finite) {
    report.condition1 = Verdict::Fail;
    report.notes.push_back("finite partition: no breakpoint sequence converging to 1");
  } else if (!(report.tail_mass <= tail_bound)) {
    report.condition1 = Verdict::Fail;
    report.notes.push_back("tail mass beyond truncation exceeds tail bound");
  }

  // Image endpoints in distance-to-one coordinates: 1 - (x_i + a_i) = (1 - x_i) - a_i.
  struct Image {
    double hi;  // distance of the left endpoint to 1
    double lo;  // distance of the right endpoint to 1
  };
  std::vector<Image> images;
  images.reserve(upto);
  double max_dist = 0.0;
  bool late_outside = false;
  for (std::size_t i = 0; i < upto; ++i) {
    const double a = iet.translation(i);
    const Image img{iet.mass_tail(i) - a, iet.mass_tail(i + 1) - a};
    images.push_back(img);
    max_dist = std::max(max_dist, img.hi);
    for (double dist : {img.hi, img.lo}) {
      if (dist > tail_bound) {
        ++report.endpoints_outside_window;
        if (i >= n / 2) late_outside = true;
      }
    }
  }
  report.min_image_endpoint = 1.0 - max_dist;
  if (finite) {
    report.condition2 = Verdict::Fail;
    report.notes.push_back("finite partition: image endpoints do not accumulate at 1");
  } else if (late_outside) {
    report.condition2 = Verdict::Fail;
    report.notes.push_back("image endpoints with index in [N/2, N) lie outside (1 - tail_bound, 1]");
  }

  // Covering: disjoint images inside [0,1] whose total measure matches.
  std::sort(images.begin(), images.end(), [](const Image& a, const Image& b) { return a.hi > b.hi; });
  double covered = 0.0;
  double lengths = 0.0;
  double frontier = std::numeric_limits<double>::infinity();
  for (const auto& img : images) {
    lengths += img.hi - img.lo;
    if (img.hi > 1.0 + DBL_EPSILON || img.lo < 0.0) {
      report.covering = Verdict::Fail;
      report.notes.push_back("image interval leaves [0,1)");
    }
    const double overlap = img.hi - frontier;
    if (overlap > 8.0 * DBL_EPSILON * img.hi) {
      report.max_overlap = std::max(report.max_overlap, overlap);
      report.covering = Verdict::Fail;
    }
    const double top = std::min(img.hi, frontier);
    if (top > img.lo) covered += top - img.lo;
    frontier = std::min(frontier, img.lo);
  }
  if (report.max_overlap > 0.0) report.notes.push_back("image intervals overlap");
  report.covered_measure = covered;
  if (std::abs(lengths + report.tail_mass - 1.0) > 1e-12) {
    report.covering = Verdict::Fail;
    report.notes.push_back("interval lengths do not sum to 1");
  }
  if (std::abs(covered - lengths) > 1e-12) report.covering = Verdict::Fail;
  return report;
}

// ---- partition entropy -----------------------------------------------------

PartialSumReport classify_series(const std::function<double(std::size_t)>& term, std::size_t n) {
  PartialSumReport report;
  std::vector<double> checkpoints;  // S(2^k)
  double sum = 0.0;
  std::size_t next = 1;
  for (std::size_t i = 0; i < n; ++i) {
    sum += term(i);
    if (i + 1 == next) {
      checkpoints.push_back(sum);
      next *= 2;
    }
  }
  report.partial_sum = sum;
  report.tail_bound = std::numeric_limits<double>::infinity();

  std::vector<double> inc;
  for (std::size_t k = 0; k + 1 < checkpoints.size(); ++k) inc.push_back(checkpoints[k + 1] - checkpoints[k]);
  if (inc.size() < 6) return report;

  const std::size_t window = std::max<std::size_t>(4, inc.size() / 2);
  const std::size_t first = inc.size() - window;
  const bool vanished = std::all_of(inc.end() - 4, inc.end(), [](double v) { return v == 0.0; });
  if (vanished) {
    report.verdict = SeriesVerdict::Convergent;
    report.tail_bound = 0.0;
    report.value = sum;
    return report;
  }

  double worst_ratio = 0.0;
  bool geometric = true;
  for (std::size_t k = inc.size() - 4; k + 1 < inc.size(); ++k) {
    if (inc[k] <= 0.0) {
      geometric = false;
      break;
    }
    worst_ratio = std::max(worst_ratio, inc[k + 1] / inc[k]);
  }
  if (geometric && worst_ratio <= 0.75) {
    report.verdict = SeriesVerdict::Convergent;
    report.tail_bound = inc.back() * worst_ratio / (1.0 - worst_ratio);
    report.value = sum + report.tail_bound;
    return report;
  }

  // Power-law fit D_k ~ k^-p over the late dyadic blocks; p <= 1 means the
  // block increments are not summable (Cauchy condensation). Log factors such
  // as 1/(i log^2 i) lengths steepen the fitted slope to about 1.2 at k ~ 20,
  // hence the margin.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t k = std::max<std::size_t>(first, 1); k < inc.size(); ++k) {
    if (inc[k] <= 0.0) return report;
    const double lx = std::log(static_cast<double>(k));
    const double ly = std::log(inc[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  const double denom = static_cast<double>(m) * sxx - sx * sx;
  if (m >= 4 && denom > 0.0) {
    const double slope = (static_cast<double>(m) * sxy - sx * sy) / denom;
    if (-slope <= 1.25) report.verdict = SeriesVerdict::Divergent;
  }
  return report;
}

PartialSumReport partition_entropy(const LengthSequence& lengths, std::size_t n) {
  auto term = [&lengths](std::size_t i) { return -xlogx(lengths.length(i)); };
  if (!lengths.entropy_tail) return classify_series(term, n);
  PartialSumReport report;
  for (std::size_t i = 0; i < n; ++i) report.partial_sum += term(i);
  report.tail_bound = lengths.entropy_tail(n);
  report.verdict = SeriesVerdict::Convergent;
  report.value = report.partial_sum + report.tail_bound;
  return report;
}

PartialSumReport partition_entropy(const CountableIET& iet, std::size_t n) {
  if (n > iet.truncation()) throw std::invalid_argument("partition entropy: N exceeds truncation index");
  return partition_entropy(iet.lengths(), n);
}

}  // namespace suslab
