#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "suslab/geometry.hpp"
#include "suslab/mat2.hpp"

namespace suslab {

/// phi^t(z) = canonicalize(x, y + t).
SuspensionPoint flow(const RoofSpec& spec, const SuspensionPoint& z, double t);

/// Time-one map: [x, y+1] if y + 1 < r(x), else [Tx, y + 1 - 2r(x)].
SuspensionPoint time_one(const RoofSpec& spec, const SuspensionPoint& z);
SuspensionPoint time_one_inverse(const RoofSpec& spec, const SuspensionPoint& z);

/// Differential of the time-one map at z: identity, or [[1,0],[-2r'(x),1]]
/// with crossings = 1 when the step crosses the roof.
Cocycle2x2 jacobian_step(const RoofSpec& spec, const SuspensionPoint& z);
/// Differential of the inverse map at z: [[1,0],[2r'(T^-1 x),1]] on a crossing.
Cocycle2x2 jacobian_step_inverse(const RoofSpec& spec, const SuspensionPoint& z);

struct OrbitCocycle {
  Cocycle2x2 cocycle;
  SuspensionPoint end;
  double derivative_sum = 0.0;  // sum of r' over crossing points
  double h_sum = 0.0;           // sum over crossings of 2 + 2|r'|
};

/// Product d_{phi^{n-1} z} phi ... d_z phi along the orbit.
OrbitCocycle cocycle(const RoofSpec& spec, const SuspensionPoint& z, std::size_t n);
/// Same for phi^-1 along the backward orbit.
OrbitCocycle cocycle_inverse(const RoofSpec& spec, const SuspensionPoint& z, std::size_t n);

struct FTLERecord {
  std::size_t n = 0;
  double value_e = 0.0;
  double value_delta = 0.0;
  std::size_t crossings = 0;
  SuspensionPoint start;
  std::uint64_t seed = 0;
};

/// Checkpoints 1, 3, 10, 30, ... up to n_max, with n_max appended if missing.
std::vector<std::size_t> geometric_checkpoints(std::size_t n_max, std::size_t first = 1);

/// Finite-time exponents at each checkpoint (increasing). value_e is
/// (1/n) log+ ||cocycle||; value_delta adds (1/n)(log C(phi^n z) + log C(z)).
std::vector<FTLERecord> ftle(const RoofSpec& spec, const SuspensionPoint& z,
                             const std::vector<std::size_t>& checkpoints);
FTLERecord ftle(const RoofSpec& spec, const SuspensionPoint& z, std::size_t n);

/// h(x) = 2 + 2|r'(x)|.
double h_function(const RoofSpec& spec, const FiberCoordinate& x);

using BaseObservable = std::function<double(const FiberCoordinate&)>;

/// (1/n) log+ sum_{i<n} h(T^i x); the optional hook replaces h.
double aaronson_average(const RoofSpec& spec, const FiberCoordinate& x, std::size_t n,
                        const BaseObservable& h = nullptr);
/// Values at each checkpoint along a single orbit.
std::vector<double> aaronson_averages(const RoofSpec& spec, const FiberCoordinate& x,
                                      const std::vector<std::size_t>& checkpoints);

}  // namespace suslab
