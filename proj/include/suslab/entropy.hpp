#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "suslab/iet.hpp"

namespace suslab {

enum class Provenance { IETOrbit, Bernoulli, External };
std::string to_string(Provenance p);

struct SymbolStream {
  std::size_t alphabet = 2;
  std::vector<std::uint32_t> symbols;
  Provenance provenance = Provenance::External;
  std::string description;

  /// Throws DomainError if some symbol is >= alphabet.
  void validate() const;
};

/// i.i.d. stream with P(1) = p, P(0) = 1 - p.
SymbolStream bernoulli_stream(double p, std::size_t length, std::uint64_t seed);

/// Coded orbit x, Tx, T^2 x, ...: interval index i for i < alphabet - 1, and the
/// lump symbol alphabet - 1 for the tail.
SymbolStream iet_orbit_stream(const CountableIET& iet, std::size_t alphabet, std::size_t length,
                              const FiberCoordinate& start);

/// One decimal symbol per line; blank lines ignored. The alphabet is the given
/// one, or max symbol + 1 when zero.
SymbolStream read_stream(std::istream& in, std::size_t alphabet = 0);
void write_stream(std::ostream& out, const SymbolStream& s);

/// Empirical entropy (nats) of the length-L blocks.
double block_entropy(const SymbolStream& s, std::size_t block_length);

/// H_L - H_{L-1}. Throws InsufficientData when the stream is shorter than
/// A * 2^L, DomainError when A^L does not fit a 63-bit block code.
double plugin_entropy_rate(const SymbolStream& s, std::size_t block_length);

/// Number of phrases in the Lempel-Ziv 1976 parsing (the last, possibly
/// incomplete, phrase included).
std::size_t lz76_complexity(const std::vector<std::uint32_t>& symbols);

/// c(n) log(n) / n in nats.
double lz_entropy_rate(const SymbolStream& s);

struct AbramovResult {
  double h_flow = 0.0;           // h / (2 integral r)
  double scale_to_target = 0.0;  // time s with h(phi^s) = h
};

/// Accepts h_base = +inf; throws DomainError unless integral_r > 0 and h_base >= 0.
AbramovResult abramov(double h_base, double integral_r);

}  // namespace suslab
