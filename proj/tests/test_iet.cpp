#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include "suslab/errors.hpp"
#include "suslab/iet.hpp"

using namespace suslab;

namespace {

constexpr double kLn2 = std::numbers::ln2;

std::vector<CountableIET> families() {
  return {CountableIET::block_rotation_golden(), CountableIET::block_swap(), CountableIET::von_neumann_kakutani(),
          CountableIET::explicit_table({{0.0, 0.5}, {0.25, -0.25}, {0.5, -0.25}, {0.75, 0.0}}, TailKind::Identity)};
}

// Uniform point of [0,1) restricted to intervals below the truncation.
FiberCoordinate random_point(const CountableIET& iet, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    const auto p = iet.locate(u(gen));
    if (p.index < iet.truncation()) return p;
  }
}

}  // namespace

TEST(Locate, Origin) {
  const auto p = CountableIET::block_rotation_golden().locate(0.0);
  EXPECT_EQ(p.index, 0U);
  EXPECT_EQ(p.offset, 0.0);
}

TEST(Locate, BlockSwapSecondBlock) {
  const auto p = CountableIET::block_swap().locate(0.6);
  EXPECT_EQ(p.index, 2U);
  EXPECT_NEAR(p.offset, 0.1, 1e-15);
}

TEST(Locate, DeepBlockWithoutCancellation) {
  const double x = 1.0 - std::ldexp(1.0, -40) + std::ldexp(1.0, -42);
  // Exact oracle on the 2^-53 integer grid: x * 2^53 and the block start are integers.
  const auto xi = static_cast<std::uint64_t>(std::ldexp(x, 53));
  const std::uint64_t start = (std::uint64_t{1} << 53) - (std::uint64_t{1} << 13);
  const double exact_offset = std::ldexp(static_cast<double>(xi - start), -53);
  ASSERT_EQ(exact_offset, std::ldexp(1.0, -42));

  const auto v = CountableIET::von_neumann_kakutani().locate(x);
  EXPECT_EQ(v.index, 40U);
  EXPECT_LE(std::abs(v.offset - exact_offset), std::ldexp(exact_offset, -50));

  // Block swap: the point sits exactly on the cut of B_40, so it opens interval 81.
  const auto s = CountableIET::block_swap().locate(x);
  EXPECT_EQ(s.index / 2, 40U);
  EXPECT_EQ(s.index, 81U);
  EXPECT_EQ(s.offset, 0.0);
}

TEST(Locate, OutsideUnitIntervalThrows) {
  EXPECT_THROW(CountableIET::block_swap().locate(1.0), DomainError);
  EXPECT_THROW(CountableIET::block_swap().locate(-0.1), DomainError);
}

TEST(ApplyT, BlockSwapExample) {
  const auto iet = CountableIET::block_swap();
  const auto y = iet.apply(iet.locate(0.1));
  EXPECT_NEAR(iet.absolute(y), 0.35, 1e-15);
  const auto back = iet.apply_inverse(iet.locate(0.35));
  EXPECT_NEAR(iet.absolute(back), 0.1, 1e-15);
}

TEST(ApplyT, VonNeumannKakutaniExample) {
  const auto iet = CountableIET::von_neumann_kakutani();
  EXPECT_DOUBLE_EQ(iet.translation(0), 0.5);
  for (std::size_t n = 0; n < 20; ++n)
    EXPECT_EQ(iet.translation(n), 3.0 * std::ldexp(1.0, -static_cast<int>(n) - 1) - 1.0);
  EXPECT_DOUBLE_EQ(iet.absolute(iet.apply(iet.locate(0.25))), 0.75);
  EXPECT_DOUBLE_EQ(iet.absolute(iet.apply_inverse(iet.locate(0.75))), 0.25);
}

TEST(ApplyT, BlockRotationKeepsBlocks) {
  const auto iet = CountableIET::block_rotation_golden();
  std::mt19937_64 gen(7);
  for (int k = 0; k < 10000; ++k) {
    const auto p = random_point(iet, gen);
    EXPECT_EQ(iet.apply(p).index / 2, p.index / 2);
  }
}

TEST(ApplyT, InverseRoundTrip) {
  for (const auto& iet : families()) {
    std::mt19937_64 gen(11);
    for (int k = 0; k < 100000; ++k) {
      const auto p = random_point(iet, gen);
      const auto q = iet.apply_inverse(iet.apply(p));
      ASSERT_EQ(q.index, p.index) << to_string(iet.family());
      ASSERT_NEAR(q.offset, p.offset, 4e-16 * iet.length(p.index)) << to_string(iet.family());
    }
  }
}

TEST(ApplyT, VonNeumannKakutaniGridPushforward) {
  // Brute-force bijectivity on the 2^16-point dyadic grid: absolute positions
  // are exact there, so the image must be a permutation of the grid.
  const auto iet = CountableIET::von_neumann_kakutani(64);
  const std::size_t m = 1U << 16;
  std::set<double> images;
  for (std::size_t k = 0; k + 1 < m; ++k) {  // the last grid point lies in blocks past 16
    const double x = static_cast<double>(k) / static_cast<double>(m);
    const auto p = iet.locate(x);
    const double y = iet.absolute(iet.apply(p));
    // Oracle: x + a_n with the closed-form translation.
    const double n = std::floor(-std::log2(1.0 - x));
    const double expected = x + 3.0 * std::ldexp(1.0, -static_cast<int>(n) - 1) - 1.0;
    ASSERT_EQ(y, expected) << x;
    images.insert(y);
  }
  EXPECT_EQ(images.size(), m - 1);
  for (double y : images) {
    const double scaled = y * static_cast<double>(m);
    ASSERT_EQ(scaled, std::floor(scaled));
  }
}

TEST(ApplyT, AbsoluteMatchesFiberArithmetic) {
  for (const auto& iet : families()) {
    std::mt19937_64 gen(5);
    for (int k = 0; k < 20000; ++k) {
      const auto p = random_point(iet, gen);
      if (p.index > 20) continue;  // absolute doubles only carry the first blocks faithfully
      const double x = iet.absolute(p);
      const double y = iet.absolute(iet.apply(p));
      ASSERT_NEAR(y, x + iet.translation(p.index), 1e-15) << to_string(iet.family());
    }
  }
}

TEST(ApplyT, MeasurePreservation) {
  // J = [c, d) away from breakpoints; the image of J cap I_i is a translate.
  for (const auto& iet : families()) {
    const std::vector<std::pair<double, double>> windows = {{0.03, 0.41}, {0.13, 0.93}, {0.52, 0.87}};
    for (const auto& [c, d] : windows) {
      double measure = 0.0;
      std::vector<std::pair<double, double>> pieces;
      for (std::size_t i = 0; i < iet.truncation(); ++i) {
        const double lo = std::max(c, iet.left(i));
        const double hi = std::min(d, iet.left(i) + iet.length(i));
        if (hi <= lo) continue;
        const double a = iet.translation(i);
        pieces.push_back({lo + a, hi + a});
        measure += (hi + a) - (lo + a);
      }
      EXPECT_NEAR(measure, d - c, 1e-12);
      std::sort(pieces.begin(), pieces.end());
      for (std::size_t k = 1; k < pieces.size(); ++k) EXPECT_LE(pieces[k - 1].second, pieces[k].first + 1e-15);
    }
  }
}

TEST(ApplyT, NoShortPeriodicOrbits) {
  const auto iet = CountableIET::block_rotation_golden();
  std::mt19937_64 gen(3);
  for (int k = 0; k < 200; ++k) {
    const auto p = random_point(iet, gen);
    auto q = p;
    for (int n = 1; n <= 1000; ++n) {
      q = iet.apply(q);
      ASSERT_FALSE(q == p) << "period " << n;
    }
  }
}

TEST(Validate, BlockRotationPasses) {
  const auto iet = CountableIET::block_rotation_golden(64);
  const auto r = validate_countable_iet(iet, iet.mass_tail(32));
  EXPECT_EQ(r.condition1, Verdict::Pass);
  EXPECT_EQ(r.condition2, Verdict::Pass);
  EXPECT_EQ(r.covering, Verdict::Pass);
}

TEST(Validate, VonNeumannKakutaniFailsConditionTwo) {
  const auto iet = CountableIET::von_neumann_kakutani(64);
  const auto r = validate_countable_iet(iet, iet.mass_tail(32));
  EXPECT_EQ(r.condition1, Verdict::Pass);
  EXPECT_EQ(r.condition2, Verdict::Fail);
  EXPECT_EQ(r.covering, Verdict::Pass);
  // Image endpoints 2^-(n+1) accumulate at 0.
  EXPECT_LT(r.min_image_endpoint, 1e-15);
}

TEST(Validate, OverlappingTableFailsCovering) {
  const auto iet = CountableIET::explicit_table({{0.0, 0.25}, {0.5, 0.0}}, TailKind::Identity);
  const auto r = validate_countable_iet(iet, iet.mass_tail(iet.truncation() / 2));
  EXPECT_EQ(r.covering, Verdict::Fail);
}

TEST(Validate, TableRejectsBadEntries) {
  EXPECT_THROW(CountableIET::explicit_table({{0.1, 0.0}}, TailKind::None), std::invalid_argument);
  EXPECT_THROW(CountableIET::explicit_table({{0.0, 0.0}, {0.5, 0.1}}, TailKind::Identity), std::invalid_argument);
  EXPECT_THROW(CountableIET::explicit_table({{0.0, 0.0}, {0.5, 0.0}, {0.4, 0.0}}, TailKind::None),
               std::invalid_argument);
}

TEST(PartitionEntropy, DyadicLengths) {
  // l_i = 2^-(i+1): sum (i+1) 2^-(i+1) log 2 = 2 log 2.
  const auto iet = CountableIET::von_neumann_kakutani(60);
  const auto h = partition_entropy(iet, 60);
  EXPECT_EQ(h.verdict, SeriesVerdict::Convergent);
  EXPECT_NEAR(h.value, 2.0 * kLn2, 1e-12);
  double partial = 0.0;
  for (int i = 0; i < 60; ++i) partial += (i + 1) * std::ldexp(1.0, -(i + 1)) * kLn2;
  EXPECT_NEAR(h.partial_sum, partial, 1e-14);
}

TEST(PartitionEntropy, BlockRotationClosedForm) {
  const auto iet = CountableIET::block_rotation_golden(64);
  const double t = iet.theta();
  const double h2 = -t * std::log(t) - (1 - t) * std::log(1 - t);
  // sum_n 2^-(n+1) [(n+1) log 2 + H(theta)] = 2 log 2 + H(theta).
  EXPECT_NEAR(partition_entropy(iet, 64).value, 2.0 * kLn2 + h2, 1e-12);
  for (std::size_t n : {1U, 7U, 30U}) EXPECT_NEAR(partition_entropy(iet, n).value, 2.0 * kLn2 + h2, 1e-12);
}

TEST(PartitionEntropy, DegenerateSingleInterval) {
  const auto iet = CountableIET::explicit_table({{0.0, 0.0}}, TailKind::None);
  const auto h = partition_entropy(iet, 1);
  EXPECT_EQ(h.value, 0.0);
  EXPECT_EQ(h.verdict, SeriesVerdict::Convergent);
}

TEST(PartitionEntropy, SlowLengthsDiverge) {
  // l_i proportional to 1/((i+2) log^2(i+2)); -l log l ~ 1/((i+2) log(i+2)) is not summable.
  LengthSequence seq;
  seq.length = [](std::size_t i) {
    const double k = static_cast<double>(i) + 2.0;
    return 0.5 / (k * std::log(k) * std::log(k));
  };
  const auto h = partition_entropy(seq, std::size_t{1} << 22);
  EXPECT_EQ(h.verdict, SeriesVerdict::Divergent);
  EXPECT_TRUE(std::isinf(h.tail_bound));
}

TEST(PartitionEntropy, GeometricLengthsConverge) {
  LengthSequence seq;
  seq.length = [](std::size_t i) { return 0.25 * std::pow(0.75, static_cast<double>(i)); };
  const auto h = partition_entropy(seq, 4096);
  EXPECT_EQ(h.verdict, SeriesVerdict::Convergent);
}
