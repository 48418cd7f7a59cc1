#include "suslab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cfloat>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "suslab/entropy.hpp"
#include "suslab/errors.hpp"
#include "suslab/flow.hpp"
#include "suslab/measure.hpp"
#include "suslab/svg.hpp"

namespace suslab {

using nlohmann::json;

// ---- utilities -------------------------------------------------------------

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return std::nan("");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double t = pos - static_cast<double>(lo);
  return values[lo] + t * (values[hi] - values[lo]);
}

unsigned worker_count(unsigned requested) {
  unsigned n = requested;
  if (n == 0) {
    if (const char* env = std::getenv("LAB_THREADS")) {
      const long v = std::strtol(env, nullptr, 10);
      n = v > 0 ? static_cast<unsigned>(v) : 1U;
    } else {
      n = std::max(1U, std::thread::hardware_concurrency());
    }
  }
  return std::max(1U, n);
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t, unsigned)>& body) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1U, threads), std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i, 0);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i, w);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(count);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

json jnum(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

std::string verdict_name(Verdict v) { return to_string(v); }

Verdict worst(Verdict a, Verdict b) {
  if (a == Verdict::Fail || b == Verdict::Fail) return Verdict::Fail;
  if (a == Verdict::Warn || b == Verdict::Warn) return Verdict::Warn;
  return Verdict::Pass;
}

struct Context {
  const ExperimentConfig& config;
  const RunOptions& options;
  CountableIET iet;
  RoofSpec spec;
  PartialSumReport summability;
  MetricParams params;
  unsigned threads;
};

struct CheckItem {
  std::string name;
  Verdict verdict = Verdict::Pass;
  json detail = json::object();
};

json item_json(const CheckItem& c) { return {{"name", c.name}, {"verdict", verdict_name(c.verdict)}, {"detail", c.detail}}; }

class CsvWriter {
 public:
  explicit CsvWriter(std::string header) { out_ << header << '\n'; }
  void row(const std::vector<std::string>& fields) {
    for (std::size_t k = 0; k < fields.size(); ++k) out_ << (k ? "," : "") << fields[k];
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

std::filesystem::path write_file(const std::filesystem::path& dir, const std::string& name, const std::string& content) {
  const std::filesystem::path path = dir / name;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  return path;
}

std::string csv_name(const ExperimentSpec& e, std::size_t index, std::size_t of_kind) {
  if (!e.output_path.empty()) return e.output_path;
  if (of_kind <= 1) return to_string(e.kind) + ".csv";
  return to_string(e.kind) + "_" + std::to_string(index) + ".csv";
}

std::vector<std::size_t> checkpoints_for(const ExperimentSpec& e) {
  if (!e.checkpoints.empty()) {
    auto c = e.checkpoints;
    if (c.back() != e.n) c.push_back(e.n);
    return c;
  }
  return geometric_checkpoints(e.n);
}

// A canonical point within delta of the glued boundary, or anywhere under mu.
SuspensionPoint sample_point(MuSampler& sampler, const RoofSpec& spec, Rng& rng, double delta) {
  const double mode = rng.uniform();
  if (mode < 0.5) return sampler.sample(rng);
  const FiberCoordinate w = sampler.sample_base(rng);
  const double r = spec.value(w).value;
  const double t = rng.uniform() * delta;
  if (mode < 0.75) return {w, std::nextafter(r - t, -INFINITY)};
  return {spec.iet().apply(w), -r + t};
}

// ---- check suite -------------------------------------------------------------

CheckItem check_iet(const Context& ctx) {
  CheckItem item{"iet_validation"};
  const std::size_t n = ctx.iet.truncation();
  const auto count = ctx.iet.interval_count();
  const double window = count && n / 2 >= *count ? 0.0 : ctx.iet.mass_tail(n / 2);
  const auto r = validate_countable_iet(ctx.iet, window);
  item.detail = {{"condition1", to_string(r.condition1)},
                 {"condition2", to_string(r.condition2)},
                 {"covering", to_string(r.covering)},
                 {"min_image_endpoint", r.min_image_endpoint},
                 {"endpoints_outside_window", r.endpoints_outside_window},
                 {"max_overlap", r.max_overlap},
                 {"covered_measure", r.covered_measure},
                 {"tail_mass", r.tail_mass},
                 {"window", window},
                 {"notes", r.notes}};
  // Condition (2) is a property some built-in families deliberately lack.
  item.verdict = worst(worst(r.condition1, r.covering), r.condition2 == Verdict::Fail ? Verdict::Warn : Verdict::Pass);
  const auto h = partition_entropy(ctx.iet, std::min<std::size_t>(n, count.value_or(n)));
  item.detail["partition_entropy"] = {{"partial_sum", h.partial_sum}, {"tail_bound", jnum(h.tail_bound)},
                                      {"verdict", to_string(h.verdict)}, {"value", jnum(h.value)}};
  return item;
}

CheckItem check_summability(const Context& ctx) {
  CheckItem item{"summability"};
  const auto& s = ctx.summability;
  item.detail = {{"partial_sum", s.partial_sum}, {"tail_bound", jnum(s.tail_bound)},
                 {"verdict", to_string(s.verdict)}, {"value", jnum(s.value)},
                 {"policy", to_string(ctx.spec.policy().kind)}};
  item.verdict = s.verdict == SeriesVerdict::Convergent ? Verdict::Pass
                 : s.verdict == SeriesVerdict::Unknown  ? Verdict::Warn
                                                        : Verdict::Fail;
  return item;
}

CheckItem check_roof_integral(const Context& ctx) {
  CheckItem item{"roof_integral"};
  const std::size_t n = ctx.iet.truncation();
  const auto a = roof_integral(ctx.spec, n, 1e-12, QuadratureScheme::AdaptiveSimpson);
  const auto g = roof_integral(ctx.spec, n, 1e-12, QuadratureScheme::GaussLegendre);
  const double upper = a.value + a.error_bound();
  const double diff = std::abs(a.value - g.value);
  item.detail = {{"value", a.value}, {"tail_bound", a.tail_bound}, {"quadrature_error", a.quadrature_error},
                 {"gauss_legendre", g.value}, {"scheme_difference", diff}, {"upper_bound", upper}};
  item.verdict = (upper <= 3.0 && diff <= 1e-8) ? Verdict::Pass : Verdict::Fail;
  return item;
}

CheckItem check_log_derivative(const Context& ctx) {
  CheckItem item{"log_derivative_integral"};
  if (ctx.summability.verdict != SeriesVerdict::Convergent) {
    item.verdict = Verdict::Warn;
    item.detail = {{"skipped", "summability not certified"}};
    return item;
  }
  const auto l = log_derivative_integral(ctx.spec, ctx.iet.truncation());
  const double upper = l.value + l.tail_bound + l.quadrature_error;
  item.detail = {{"value", l.value}, {"tail_bound", l.tail_bound}, {"paper_bound", l.paper_bound},
                 {"bump_constant", ctx.spec.bump_constant()}};
  item.verdict = upper <= l.paper_bound ? Verdict::Pass : Verdict::Fail;
  return item;
}

CheckItem check_roof_smoothness(const Context& ctx, std::size_t count, std::uint64_t seed) {
  CheckItem item{"roof_smoothness"};
  if (ctx.spec.is_flat()) {
    item.detail = {{"skipped", "flat roof"}};
    return item;
  }
  Rng rng(seed, 101);
  const std::size_t intervals = std::min<std::size_t>(ctx.iet.truncation(), ctx.iet.interval_count().value_or(64));
  std::size_t violations = 0, below_one = 0, flat_mismatch = 0;
  double worst_rel = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t i = static_cast<std::size_t>(rng.uniform() * static_cast<double>(std::min<std::size_t>(intervals, 40)));
    const double len = ctx.iet.length(i);
    const double b = ctx.spec.b(i);
    const double h = 1e-7 * b;
    const int tag = static_cast<int>(rng.uniform() * 5.0);
    const double t = rng.uniform();
    double u = 0.0;
    switch (tag) {
      case 0: u = 100.0 * h + t * (0.5 * b - 100.0 * h); break;
      case 1: u = 0.5 * b + t * 0.5 * b; break;
      case 2: u = b + t * (len - 2.0 * b); break;
      case 3: u = len - b + t * 0.5 * b; break;
      default: u = len - 0.5 * b + t * (0.5 * b - 100.0 * h); break;
    }
    const RoofValue v = ctx.spec.evaluate(i, u, len - u);
    if (v.value < 1.0) ++below_one;
    if (v.tag == Subinterval::I3 && v.value != 1.0) ++flat_mismatch;
    const double fd = (ctx.spec.evaluate(i, u + h, len - u - h).value - ctx.spec.evaluate(i, u - h, len - u + h).value) / (2.0 * h);
    // Central differences carry a rounding floor of about eps |r| / h.
    const double floor = 1e3 * DBL_EPSILON * v.value / h;
    const double err = std::abs(fd - v.derivative);
    if (err > 1e-4 * std::abs(v.derivative) + floor) ++violations;
    if (v.derivative != 0.0) worst_rel = std::max(worst_rel, err / std::abs(v.derivative));
  }
  item.detail = {{"points", count}, {"fd_violations", violations}, {"worst_relative_error", worst_rel},
                 {"below_one", below_one}, {"flat_tag_mismatch", flat_mismatch}};
  item.verdict = (violations == 0 && below_one == 0 && flat_mismatch == 0) ? Verdict::Pass : Verdict::Fail;
  return item;
}

CheckItem check_metric_sandwich(const Context& ctx, MuSampler sampler, std::size_t count, std::uint64_t seed) {
  CheckItem item{"metric_sandwich"};
  Rng rng(seed, 102);
  std::size_t violations = 0, homogeneity = 0, triangle = 0, discarded = 0;
  for (std::size_t k = 0; k < count; ++k) {
    try {
      const SuspensionPoint z = sample_point(sampler, ctx.spec, rng, ctx.params.delta);
      const double angle = 2.0 * std::numbers::pi * rng.uniform();
      const double scale = std::exp(20.0 * (rng.uniform() - 0.5));
      const TangentVec v{scale * std::cos(angle), scale * std::sin(angle)};
      const double e = metric_norm(ctx.spec, z, v, MetricKind::Euclidean);
      const double d = metric_norm(ctx.spec, z, v, MetricKind::Delta, ctx.params);
      const double c = constant_C(ctx.spec, z);
      if (!(e / c <= d * (1 + 1e-15) && d <= c * e * (1 + 1e-15))) ++violations;
      const double lambda = -3.5;
      const double dl = metric_norm(ctx.spec, z, {lambda * v.dx, lambda * v.dy}, MetricKind::Delta, ctx.params);
      if (std::abs(dl - std::abs(lambda) * d) > 1e-12 * std::abs(lambda) * d) ++homogeneity;
      const TangentVec w{std::cos(3.0 * angle), std::sin(2.0 * angle)};
      const double dw = metric_norm(ctx.spec, z, w, MetricKind::Delta, ctx.params);
      const double dvw = metric_norm(ctx.spec, z, {v.dx + w.dx, v.dy + w.dy}, MetricKind::Delta, ctx.params);
      if (dvw > (d + dw) * (1 + 1e-12)) ++triangle;
    } catch (const SingularityProximity&) {
      ++discarded;
    }
  }
  item.detail = {{"points", count}, {"violations", violations}, {"homogeneity_violations", homogeneity},
                 {"triangle_violations", triangle}, {"discarded", discarded}};
  item.verdict = (violations + homogeneity + triangle == 0) ? Verdict::Pass : Verdict::Fail;
  return item;
}

CheckItem check_beta_bound(const Context& ctx, MuSampler sampler, std::size_t count, std::uint64_t seed) {
  CheckItem item{"operator_norm_bound"};
  Rng rng(seed, 103);
  std::size_t violations = 0, discarded = 0;
  double worst_ratio = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    try {
      const SuspensionPoint z = sample_point(sampler, ctx.spec, rng, ctx.params.delta);
      const SuspensionPoint fz = time_one(ctx.spec, z);
      const Mat2 j = jacobian_step(ctx.spec, z).matrix();
      const double op_delta = generalized_norm(j, quadratic_form(ctx.spec, z, ctx.params), quadratic_form(ctx.spec, fz, ctx.params));
      const double op_e = spectral_norm(j);
      const double beta = beta_factor(ctx.spec, z, ctx.params);
      const double ratio = op_delta / (beta * op_e);
      worst_ratio = std::max(worst_ratio, ratio);
      if (ratio > 1.0 + 1e-12) ++violations;
    } catch (const SingularityProximity&) {
      ++discarded;
    }
  }
  item.detail = {{"points", count}, {"violations", violations}, {"max_ratio", worst_ratio}, {"discarded", discarded}};
  item.verdict = violations == 0 ? Verdict::Pass : Verdict::Fail;
  return item;
}

CheckItem check_cocycle(const Context& ctx, MuSampler sampler, std::size_t runs, std::size_t length, std::uint64_t seed) {
  CheckItem item{"cocycle_algebra"};
  Rng rng(seed, 104);
  std::size_t non_unipotent = 0, sum_mismatch = 0, bound_violations = 0, discarded = 0;
  double worst_rel = 0.0;
  for (std::size_t k = 0; k < runs; ++k) {
    try {
      const SuspensionPoint z = sampler.sample(rng);
      const auto oc = cocycle(ctx.spec, z, length);
      if (!oc.cocycle.unipotent()) ++non_unipotent;
      const double expected = -2.0 * oc.derivative_sum;
      const double rel = std::abs(oc.cocycle.m21 - expected) / std::max(std::abs(expected), 1e-300);
      if (expected != 0.0) worst_rel = std::max(worst_rel, rel);
      if (expected != 0.0 && rel > 1e-9) ++sum_mismatch;
      // sum_{i<n} h(T^i x) over the base orbit visited by the crossings.
      double h_sum = 0.0;
      FiberCoordinate x = z.base;
      for (std::size_t i = 0; i < std::max<std::size_t>(oc.cocycle.crossings, 1); ++i) {
        h_sum += h_function(ctx.spec, x);
        x = ctx.iet.apply(x);
      }
      if (oc.cocycle.norm() > h_sum * (1 + 1e-12)) ++bound_violations;
    } catch (const SingularityProximity&) {
      ++discarded;
    }
  }
  item.detail = {{"runs", runs}, {"length", length}, {"non_unipotent", non_unipotent}, {"sum_mismatch", sum_mismatch},
                 {"worst_relative_error", worst_rel}, {"bound_violations", bound_violations}, {"discarded", discarded}};
  item.verdict = (non_unipotent + sum_mismatch + bound_violations == 0) ? Verdict::Pass : Verdict::Fail;
  return item;
}

CheckItem check_measure_identity(const Context& ctx, const MuSampler& sampler) {
  CheckItem item{"measure_identity"};
  const auto m = total_mass(ctx.spec);
  const double rel = std::abs(m.total_mass - 2.0 * m.integral_r) / (2.0 * m.integral_r);
  item.detail = {{"total_mass", m.total_mass}, {"integral_r", m.integral_r}, {"integral_r_inverse", m.integral_r_inverse},
                 {"relative_difference", rel}, {"tail_bound", m.tail_bound},
                 {"sampler_acceptance_rate", sampler.acceptance_rate()}};
  item.verdict = (rel <= 1e-8 && m.total_mass + m.tail_bound <= 10.0) ? Verdict::Pass : Verdict::Fail;
  if (item.verdict == Verdict::Pass && sampler.proposals() > 0 && sampler.acceptance_rate() < 0.25) item.verdict = Verdict::Warn;
  return item;
}

json run_check(const Context& ctx, const ExperimentSpec& e, CsvWriter& csv, Verdict& overall) {
  MuSampler sampler(ctx.spec);
  std::vector<CheckItem> items;
  items.push_back(check_iet(ctx));
  items.push_back(check_summability(ctx));
  items.push_back(check_roof_integral(ctx));
  items.push_back(check_log_derivative(ctx));
  items.push_back(check_roof_smoothness(ctx, e.n, e.seed));
  items.push_back(check_metric_sandwich(ctx, sampler, e.n, e.seed));
  items.push_back(check_beta_bound(ctx, sampler, e.n, e.seed));
  const std::size_t runs = std::clamp<std::size_t>(e.n / 10, 1, 1000);
  items.push_back(check_cocycle(ctx, sampler, runs, 1000, e.seed));
  {
    Rng rng(e.seed, 105);
    for (int k = 0; k < 1000; ++k) sampler.sample(rng);
  }
  items.push_back(check_measure_identity(ctx, sampler));
  json out = json::array();
  for (const auto& it : items) {
    overall = worst(overall, it.verdict);
    csv.row({it.name, verdict_name(it.verdict)});
    out.push_back(item_json(it));
  }
  return {{"checks", out}};
}

// ---- lyapunov / aaronson -----------------------------------------------------

struct SampleTrace {
  SuspensionPoint start;
  std::vector<FTLERecord> records;
  std::vector<double> averages;
  std::size_t discards = 0;
};

json quantiles_json(const std::vector<double>& v) {
  return {{"p05", jnum(quantile(v, 0.05))}, {"p50", jnum(quantile(v, 0.5))}, {"p95", jnum(quantile(v, 0.95))}};
}

json run_lyapunov(const Context& ctx, const ExperimentSpec& e, CsvWriter& csv, Verdict& overall,
                  std::vector<std::string>& svgs) {
  const auto checkpoints = checkpoints_for(e);
  const MuSampler base_sampler(ctx.spec);
  std::vector<MuSampler> samplers(ctx.threads, base_sampler);
  std::vector<SampleTrace> traces(e.samples);
  parallel_for(e.samples, ctx.threads, [&](std::size_t k, unsigned w) {
    for (std::uint64_t attempt = 0;; ++attempt) {
      Rng rng(e.seed, k, attempt);
      try {
        const SuspensionPoint z = samplers[w].sample(rng);
        traces[k].start = z;
        traces[k].records = ftle(ctx.spec, z, checkpoints);
        return;
      } catch (const SingularityProximity&) {
        ++traces[k].discards;
        if (attempt > 1000) throw NumericError("lyapunov: sample " + std::to_string(k) + " keeps hitting exclusion bands");
      }
    }
  });
  std::size_t discards = 0;
  for (std::size_t k = 0; k < traces.size(); ++k) {
    discards += traces[k].discards;
    for (const auto& r : traces[k].records) {
      csv.row({std::to_string(k), std::to_string(e.seed), std::to_string(r.n), format_number(r.value_e),
               format_number(r.value_delta), std::to_string(r.crossings)});
    }
  }
  json summary = json::array();
  std::vector<double> medians_delta, medians_e, ns;
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    std::vector<double> ve, vd, kn;
    for (const auto& t : traces) {
      ve.push_back(t.records[c].value_e);
      vd.push_back(t.records[c].value_delta);
      kn.push_back(static_cast<double>(t.records[c].crossings) / static_cast<double>(checkpoints[c]));
    }
    summary.push_back({{"n", checkpoints[c]}, {"ftle_e", quantiles_json(ve)}, {"ftle_delta", quantiles_json(vd)},
                       {"crossing_rate", quantiles_json(kn)}});
    medians_delta.push_back(quantile(vd, 0.5));
    medians_e.push_back(quantile(ve, 0.5));
    ns.push_back(static_cast<double>(checkpoints[c]));
  }
  // Trend over the decade checkpoints from 10^3 on.
  std::vector<double> decade;
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    std::size_t v = checkpoints[c];
    if (v < 1000) continue;
    while (v % 10 == 0) v /= 10;
    if (v == 1) decade.push_back(medians_delta[c]);
  }
  bool decreasing = true;
  for (std::size_t k = 1; k < decade.size(); ++k) decreasing = decreasing && decade[k] < decade[k - 1];
  const double final_median = medians_delta.back();
  json verdicts = json::array();
  Verdict v = Verdict::Pass;
  if (e.n >= 100000) {
    const Verdict t = final_median <= 0.01 ? Verdict::Pass : Verdict::Fail;
    verdicts.push_back({{"name", "median_ftle_delta_final<=0.01"}, {"verdict", verdict_name(t)}, {"value", final_median}});
    v = worst(v, t);
  }
  if (decade.size() >= 2) {
    const Verdict t = decreasing ? Verdict::Pass : Verdict::Fail;
    verdicts.push_back({{"name", "median_ftle_delta_decreasing"}, {"verdict", verdict_name(t)}, {"values", decade}});
    v = worst(v, t);
  }
  const double steps = static_cast<double>(e.samples) * static_cast<double>(e.n);
  const double discard_rate = static_cast<double>(discards) / steps * 1e6;
  if (discard_rate > 1e-4) {
    verdicts.push_back({{"name", "discard_rate"}, {"verdict", "WARN"}, {"per_million_steps", discard_rate}});
    v = worst(v, Verdict::Warn);
  }
  overall = worst(overall, v);
  if (ctx.options.plot || ctx.config.plot) {
    PlotAxes axes{"Median finite-time exponent", "n", "FTLE", true, true};
    svgs.push_back(line_chart(axes, {{"ftle_e", ns, medians_e}, {"ftle_delta", ns, medians_delta}}));
    PlotAxes roof_axes{"Roof over I_0", "x", "r(x)", false, false};
    svgs.push_back(line_chart(roof_axes, {roof_graph(ctx.spec, 0)}));
  }
  return {{"checkpoints", checkpoints}, {"summary", summary}, {"discarded", discards}, {"verdicts", verdicts},
          {"verdict", verdict_name(v)}};
}

json run_aaronson(const Context& ctx, const ExperimentSpec& e, CsvWriter& csv, Verdict& overall,
                  std::vector<std::string>& svgs) {
  const auto checkpoints = checkpoints_for(e);
  std::vector<SampleTrace> traces(e.samples);
  parallel_for(e.samples, ctx.threads, [&](std::size_t k, unsigned) {
    for (std::uint64_t attempt = 0;; ++attempt) {
      Rng rng(e.seed, k, attempt);
      try {
        const FiberCoordinate x = sample_base_uniform(ctx.iet, rng);
        traces[k].start = {x, 0.0};
        traces[k].averages = aaronson_averages(ctx.spec, x, checkpoints);
        return;
      } catch (const SingularityProximity&) {
        ++traces[k].discards;
        if (attempt > 1000) throw NumericError("aaronson: sample " + std::to_string(k) + " keeps hitting exclusion bands");
      }
    }
  });
  std::size_t discards = 0;
  for (std::size_t k = 0; k < traces.size(); ++k) {
    discards += traces[k].discards;
    for (std::size_t c = 0; c < checkpoints.size(); ++c)
      csv.row({std::to_string(k), std::to_string(e.seed), std::to_string(checkpoints[c]), format_number(traces[k].averages[c])});
  }
  json summary = json::array();
  std::vector<double> ns, p50, p95;
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    std::vector<double> v;
    for (const auto& t : traces) v.push_back(t.averages[c]);
    summary.push_back({{"n", checkpoints[c]}, {"average", quantiles_json(v)}});
    ns.push_back(static_cast<double>(checkpoints[c]));
    p50.push_back(quantile(v, 0.5));
    p95.push_back(quantile(v, 0.95));
  }
  json verdicts = json::array();
  Verdict v = Verdict::Pass;
  if (e.n >= 1000000) {
    const Verdict t = p95.back() <= 0.02 ? Verdict::Pass : Verdict::Fail;
    verdicts.push_back({{"name", "p95_average_final<=0.02"}, {"verdict", verdict_name(t)}, {"value", p95.back()}});
    v = t;
  }
  overall = worst(overall, v);
  if (ctx.options.plot || ctx.config.plot) {
    PlotAxes axes{"(1/n) log+ sum h(T^i x)", "n", "average", true, true};
    svgs.push_back(line_chart(axes, {{"p50", ns, p50}, {"p95", ns, p95}}));
  }
  return {{"checkpoints", checkpoints}, {"summary", summary}, {"discarded", discards}, {"verdicts", verdicts},
          {"verdict", verdict_name(v)}};
}

// ---- measure -----------------------------------------------------------------

json run_measure(const Context& ctx, const ExperimentSpec& e, CsvWriter& csv, Verdict& overall,
                 std::vector<std::string>& svgs) {
  const auto m = total_mass(ctx.spec);
  const double rel = std::abs(m.total_mass - 2.0 * m.integral_r) / (2.0 * m.integral_r);
  const auto inv = invariance_check(ctx.spec, e.n, standard_boxes(), e.seed);
  std::vector<std::string> labels;
  std::vector<double> deviations;
  for (const auto& b : inv.boxes) {
    csv.row({b.name, format_number(b.pre_frequency), format_number(b.post_frequency), format_number(b.deviation),
             format_number(b.threshold), b.pass ? "PASS" : "FAIL"});
    labels.push_back(b.name);
    deviations.push_back(b.deviation);
  }
  const Verdict identity = rel <= 1e-8 ? Verdict::Pass : Verdict::Fail;
  const Verdict invariance = inv.pass ? Verdict::Pass : Verdict::Fail;
  const Verdict v = worst(identity, invariance);
  overall = worst(overall, v);
  if (ctx.options.plot || ctx.config.plot) {
    svgs.push_back(bar_chart("Invariance deviations (line: 4/sqrt(count))", labels, deviations,
                             inv.boxes.empty() ? -1.0 : inv.boxes.front().threshold));
  }
  return {{"total_mass", m.total_mass}, {"normalization", m.normalization}, {"integral_r", m.integral_r},
          {"integral_r_inverse", m.integral_r_inverse}, {"tail_bound", m.tail_bound}, {"relative_difference", rel},
          {"count", inv.count}, {"discarded", inv.discarded},
          {"verdicts", json::array({{{"name", "mass_identity"}, {"verdict", verdict_name(identity)}},
                                    {{"name", "invariance"}, {"verdict", verdict_name(invariance)}}})},
          {"verdict", verdict_name(v)}};
}

// ---- entropy -----------------------------------------------------------------

double bernoulli_entropy(double p) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log(p);
  if (p < 1.0) h -= (1.0 - p) * std::log(1.0 - p);
  return h;
}

json run_entropy(const Context& ctx, const ExperimentSpec& e, CsvWriter& csv, Verdict& overall,
                 std::vector<std::string>& svgs, std::vector<std::string>& messages) {
  const auto integral = roof_integral(ctx.spec, ctx.iet.truncation(), 1e-12);
  const double integral_r = integral.value;
  json streams = json::array();
  Verdict v = Verdict::Pass;
  std::vector<std::string> labels;
  std::vector<double> values;
  auto emit = [&](const std::string& stream, const std::string& estimator, double h) {
    const auto a = abramov(h, integral_r);
    csv.row({stream, estimator, format_number(h), format_number(a.h_flow), format_number(a.h_flow * a.scale_to_target),
             format_number(a.scale_to_target)});
  };
  for (std::size_t k = 0; k < e.streams.size(); ++k) {
    const auto& sc = e.streams[k];
    SymbolStream s;
    std::string name;
    switch (sc.source) {
      case StreamConfig::Source::Bernoulli:
        s = bernoulli_stream(sc.p, e.n, Rng(e.seed, k).bits());
        name = "bernoulli(" + format_number(sc.p) + ")";
        break;
      case StreamConfig::Source::IETOrbit: {
        Rng rng(e.seed, k);
        s = iet_orbit_stream(ctx.iet, sc.alphabet, e.n, sample_base_uniform(ctx.iet, rng));
        name = to_string(ctx.iet.family()) + "_orbit(A=" + std::to_string(sc.alphabet) + ")";
        break;
      }
      case StreamConfig::Source::File: {
        std::ifstream in(sc.path);
        if (!in) throw ConfigError("cannot read symbol stream " + sc.path);
        s = read_stream(in, sc.alphabet);
        name = "file(" + sc.path + ")";
        break;
      }
    }
    json entry = {{"stream", name}, {"length", s.symbols.size()}, {"alphabet", s.alphabet}};
    double plugin = 0.0;
    try {
      plugin = plugin_entropy_rate(s, e.block_length);
    } catch (const InsufficientData& ex) {
      messages.push_back(name + ": " + ex.what());
      entry["error"] = ex.what();
      entry["verdict"] = "FAIL";
      streams.push_back(entry);
      v = Verdict::Fail;
      continue;
    }
    const double lz = lz_entropy_rate(s);
    emit(name, "plugin", plugin);
    emit(name, "lz76", lz);
    labels.push_back(name);
    values.push_back(plugin);
    entry["plugin"] = plugin;
    entry["lz76"] = lz;
    Verdict sv = Verdict::Pass;
    if (sc.source == StreamConfig::Source::Bernoulli) {
      const double exact = bernoulli_entropy(sc.p);
      entry["exact"] = exact;
      const double tol = exact > 0.0 ? 0.05 * exact : 1e-12;
      sv = std::abs(plugin - exact) <= tol ? Verdict::Pass : Verdict::Fail;
    } else if (sc.source == StreamConfig::Source::IETOrbit &&
               (ctx.iet.family() == Family::BlockRotation || ctx.iet.family() == Family::BlockSwap)) {
      sv = plugin <= 0.05 ? Verdict::Pass : Verdict::Fail;
    }
    entry["verdict"] = verdict_name(sv);
    v = worst(v, sv);
    streams.push_back(entry);
  }
  json given = json::array();
  for (double h : e.h_base) {
    emit("given", "exogenous", h);
    const auto a = abramov(h, integral_r);
    given.push_back({{"h_base", jnum(h)}, {"h_flow", jnum(a.h_flow)}, {"scale_to_target", a.scale_to_target}});
  }
  overall = worst(overall, v);
  if (ctx.options.plot || ctx.config.plot) svgs.push_back(bar_chart("Plug-in entropy rate (nats)", labels, values));
  return {{"integral_r", integral_r}, {"block_length", e.block_length}, {"streams", streams}, {"abramov", given},
          {"verdict", verdict_name(v)}};
}

const char* csv_header(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Check: return "check,verdict";
    case ExperimentKind::Lyapunov: return "sample,seed,n,ftle_e,ftle_delta,k_n";
    case ExperimentKind::Aaronson: return "sample,seed,n,average";
    case ExperimentKind::Measure: return "box,pre_frequency,post_frequency,deviation,threshold,verdict";
    case ExperimentKind::Entropy: return "stream,estimator,h_base,h_flow,h_time_changed,scale_to_target";
  }
  return "";
}

json spec_json(const ExperimentConfig& config, const ExperimentSpec& e) {
  ExperimentConfig one = config;
  one.experiments = {e};
  return json::parse(serialize_config(one)).at("experiments").at(0);
}

}  // namespace

RunOutcome run_experiments(ExperimentKind kind, const ExperimentConfig& config, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  RunOutcome outcome;
  std::vector<ExperimentSpec> specs;
  for (const auto& e : config.experiments)
    if (e.kind == kind) specs.push_back(e);
  if (specs.empty()) specs.push_back(default_experiment(kind));

  std::optional<Context> ctx;
  try {
    CountableIET iet = build_iet(config.iet);
    RoofChoice choice = choose_b_and_check(iet, config.b_policy);
    ctx.emplace(Context{config, options, std::move(iet), std::move(choice.spec), choice.summability,
                        MetricParams(config.delta), worker_count(options.threads)});
  } catch (const std::invalid_argument& ex) {
    outcome.exit_code = kExitConfig;
    outcome.messages.push_back(std::string("configuration error: ") + ex.what());
    return outcome;
  } catch (const std::domain_error& ex) {
    outcome.exit_code = kExitConfig;
    outcome.messages.push_back(std::string("configuration error: ") + ex.what());
    return outcome;
  }

  Verdict overall = Verdict::Pass;
  json experiments = json::array();
  std::vector<std::string> svgs;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const auto& e = specs[k];
    CsvWriter csv(csv_header(kind));
    json result;
    Verdict local = Verdict::Pass;
    try {
      switch (kind) {
        case ExperimentKind::Check: result = run_check(*ctx, e, csv, local); break;
        case ExperimentKind::Lyapunov: result = run_lyapunov(*ctx, e, csv, local, svgs); break;
        case ExperimentKind::Aaronson: result = run_aaronson(*ctx, e, csv, local, svgs); break;
        case ExperimentKind::Measure: result = run_measure(*ctx, e, csv, local, svgs); break;
        case ExperimentKind::Entropy: result = run_entropy(*ctx, e, csv, local, svgs, outcome.messages); break;
      }
    } catch (const ConfigError& ex) {
      outcome.exit_code = kExitConfig;
      outcome.messages.push_back(std::string("configuration error: ") + ex.what());
      return outcome;
    } catch (const std::exception& ex) {
      local = Verdict::Fail;
      result = {{"error", ex.what()}};
      outcome.messages.push_back(to_string(kind) + " failed: " + ex.what());
    }
    overall = worst(overall, local);
    experiments.push_back({{"spec", spec_json(config, e)}, {"result", result}, {"verdict", verdict_name(local)}});
    outcome.written.push_back(write_file(options.out_dir, csv_name(e, k, specs.size()), csv.str()));
  }
  json report = {{"kind", to_string(kind)},
                 {"config", json::parse(serialize_config(config))},
                 {"threads_do_not_affect_results", true},
                 {"experiments", experiments},
                 {"verdict", verdict_name(overall)}};
  outcome.report_json = report.dump(2) + "\n";
  outcome.written.push_back(write_file(options.out_dir, "report.json", outcome.report_json));
  if (!svgs.empty()) {
    outcome.written.push_back(write_file(options.out_dir, to_string(kind) + ".svg", svgs.size() == 1 ? svgs.front() : stack_svg(svgs)));
  }
  outcome.exit_code = overall == Verdict::Fail ? kExitFailure : kExitPass;
  outcome.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return outcome;
}

}  // namespace suslab
