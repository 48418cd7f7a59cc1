#include "suslab/measure.hpp"

#include <algorithm>
#include <cmath>

#include "suslab/errors.hpp"
#include "suslab/flow.hpp"

namespace suslab {

namespace {

std::size_t interval_limit(const RoofSpec& spec) {
  const auto count = spec.iet().interval_count();
  return count ? std::min(spec.iet().truncation(), *count) : spec.iet().truncation();
}

// Integral over interval i of r, as the integral of r o T^-1 over T(I_i):
// split at the five subinterval boundaries, each piece by tanh-sinh in
// distances so the log endpoints never cancel.
QuadratureResult image_interval_integral(const RoofSpec& spec, std::size_t i, double tol) {
  const double len = spec.iet().length(i);
  const double bi = spec.b(i);
  QuadratureResult total;
  auto piece = [&](double lo, double hi, bool from_left) {
    const double width = hi - lo;
    if (!(width > 0.0)) return;
    const double d_hi = len - hi;
    auto f = [&](double a, double b) {
      if (from_left) {
        const double u = lo + a;
        return spec.evaluate(i, u, len - u).value;
      }
      const double d = d_hi + b;
      return spec.evaluate(i, len - d, d).value;
    };
    const auto q = tanh_sinh(f, width, tol * width / len);
    if (!q.converged) throw NumericError("tanh-sinh did not converge on interval " + std::to_string(i));
    total.value += q.value;
    total.error += q.error;
    total.evaluations += q.evaluations;
  };
  if (spec.is_flat()) {
    total.value = len;
    return total;
  }
  piece(0.0, 0.5 * bi, true);
  piece(0.5 * bi, bi, true);
  piece(bi, 0.5 * len, true);
  piece(0.5 * len, len - bi, false);
  piece(len - bi, len - 0.5 * bi, false);
  piece(len - 0.5 * bi, len, false);
  return total;
}

double roof_or_throw_envelope(const RoofSpec& spec, const FiberCoordinate& p, double envelope) {
  const double r = spec.value(p).value;
  if (r > envelope * (1.0 + 1e-12)) throw ConsistencyError("roof exceeds its sampling envelope");
  return r;
}

}  // namespace

MeasureReport total_mass(const RoofSpec& spec, std::size_t n, double quad_tol) {
  const auto direct = roof_integral(spec, n, quad_tol);
  MeasureReport m;
  m.integral_r = direct.value;
  const std::size_t upto = direct.per_interval.size();
  // Sum over the image intervals T(I_i); they tile [0,1) up to the tail.
  for (std::size_t i = 0; i < upto; ++i) {
    const auto q = image_interval_integral(spec, i, quad_tol);
    m.integral_r_inverse += q.value;
    m.quadrature_error += q.error;
  }
  m.quadrature_error += direct.quadrature_error;
  m.total_mass = m.integral_r + m.integral_r_inverse;
  m.normalization = 1.0 / m.total_mass;
  m.tail_bound = 2.0 * direct.tail_bound;
  return m;
}

MeasureReport total_mass(const RoofSpec& spec) { return total_mass(spec, spec.iet().truncation()); }

// ---- sampling --------------------------------------------------------------

MuSampler::MuSampler(const RoofSpec& spec, double quad_tol) : spec_(spec) {
  const auto integral = roof_integral(spec, interval_limit(spec), quad_tol);
  cumulative_.reserve(integral.per_interval.size());
  for (double w : integral.per_interval) {
    total_ += w;
    cumulative_.push_back(total_);
  }
}

FiberCoordinate MuSampler::sample_base(Rng& rng) {
  const auto& iet = spec_.iet();
  const double target = rng.uniform() * total_;
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  const std::size_t i = std::min(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
  const double len = iet.length(i);
  const double bi = spec_.b(i);
  const double band = RoofSpec::kExclusionBand * len;
  for (;;) {
    ++proposals_;
    const double pick = rng.uniform() * (len + 2.0 * bi);
    const double s1 = rng.uniform_open();
    const double s2 = rng.uniform_open();
    const double accept = rng.uniform();
    double u;
    if (pick < len) {
      u = s1 * len;
    } else if (pick < len + bi) {
      u = bi * s1 * s2;  // density -log(t) on (0,1), scaled
    } else {
      u = len - bi * s1 * s2;
    }
    const FiberCoordinate p = iet.fiber(i, u);
    const double d = len - p.offset;
    if (!(p.offset > band) || !(d > band)) continue;
    double envelope = 1.0;
    if (bi > 0.0) {
      envelope += std::max(0.0, -std::log(p.offset / bi)) + std::max(0.0, -std::log(d / bi));
    }
    const double r = roof_or_throw_envelope(spec_, p, envelope);
    if (accept * envelope < r) {
      ++acceptances_;
      return p;
    }
  }
}

SuspensionPoint MuSampler::sample(Rng& rng) {
  const FiberCoordinate w = sample_base(rng);
  const double r = spec_.value(w).value;
  const double y = rng.uniform() * r;
  if (rng.uniform() < 0.5) return {w, y};
  return {spec_.iet().apply(w), y - r};
}

std::vector<SuspensionPoint> sample_mu(const RoofSpec& spec, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw DomainError("sample_mu: count must be at least 1");
  MuSampler sampler(spec);
  Rng rng(seed);
  std::vector<SuspensionPoint> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(sampler.sample(rng));
  return out;
}

FiberCoordinate sample_base_uniform(const CountableIET& iet, Rng& rng) {
  for (;;) {
    const FiberCoordinate p = iet.locate(rng.uniform());
    if (p.index < iet.truncation()) return p;
  }
}

// ---- invariance ------------------------------------------------------------

std::vector<Region> standard_boxes() {
  return {
      {"all", [](double, const SuspensionPoint&) { return true; }},
      {"y>0", [](double, const SuspensionPoint& z) { return z.height > 0.0; }},
      {"y<0", [](double, const SuspensionPoint& z) { return z.height < 0.0; }},
      {"x<1/2", [](double x, const SuspensionPoint&) { return x < 0.5; }},
      {"x>=1/2", [](double x, const SuspensionPoint&) { return x >= 0.5; }},
      {"|y|<1/2", [](double, const SuspensionPoint& z) { return std::abs(z.height) < 0.5; }},
      {"y>1", [](double, const SuspensionPoint& z) { return z.height > 1.0; }},
      {"x<3/4,-1<=y<1", [](double x, const SuspensionPoint& z) { return x < 0.75 && z.height >= -1.0 && z.height < 1.0; }},
  };
}

InvarianceReport invariance_check(const RoofSpec& spec, std::size_t count, const std::vector<Region>& boxes,
                                  std::uint64_t seed, const PointMap& map) {
  if (count == 0) throw DomainError("invariance_check: count must be at least 1");
  MuSampler sampler(spec);
  Rng rng(seed);
  InvarianceReport report;
  report.count = count;
  std::vector<std::size_t> pre(boxes.size(), 0), post(boxes.size(), 0);
  const auto& iet = spec.iet();
  for (std::size_t k = 0; k < count;) {
    const SuspensionPoint z = sampler.sample(rng);
    SuspensionPoint w;
    try {
      w = map ? map(z) : time_one(spec, z);
    } catch (const SingularityProximity&) {
      ++report.discarded;
      continue;
    }
    const double xz = iet.absolute(z.base);
    const double xw = iet.absolute(w.base);
    for (std::size_t b = 0; b < boxes.size(); ++b) {
      pre[b] += boxes[b].contains(xz, z) ? 1 : 0;
      post[b] += boxes[b].contains(xw, w) ? 1 : 0;
    }
    ++k;
  }
  const double threshold = 4.0 / std::sqrt(static_cast<double>(count));
  for (std::size_t b = 0; b < boxes.size(); ++b) {
    BoxResult r;
    r.name = boxes[b].name;
    r.pre_frequency = static_cast<double>(pre[b]) / static_cast<double>(count);
    r.post_frequency = static_cast<double>(post[b]) / static_cast<double>(count);
    r.deviation = std::abs(r.post_frequency - r.pre_frequency);
    r.threshold = threshold;
    r.pass = r.deviation <= threshold;
    report.pass = report.pass && r.pass;
    report.boxes.push_back(r);
  }
  return report;
}

}  // namespace suslab
