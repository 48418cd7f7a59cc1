#include "suslab/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "suslab/errors.hpp"
#include "suslab/rng.hpp"

namespace suslab {

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::IETOrbit: return "iet_orbit";
    case Provenance::Bernoulli: return "bernoulli";
    case Provenance::External: return "external";
  }
  return "?";
}

void SymbolStream::validate() const {
  if (alphabet == 0) throw DomainError("symbol stream needs a nonempty alphabet");
  for (auto v : symbols) {
    if (v >= alphabet) throw DomainError("symbol " + std::to_string(v) + " outside alphabet of size " + std::to_string(alphabet));
  }
}

SymbolStream bernoulli_stream(double p, std::size_t length, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("bernoulli_stream: p must lie in [0,1]");
  SymbolStream s;
  s.alphabet = 2;
  s.provenance = Provenance::Bernoulli;
  s.description = "bernoulli(" + std::to_string(p) + ")";
  s.symbols.resize(length);
  Rng rng(seed);
  for (auto& v : s.symbols) v = rng.uniform() < p ? 1U : 0U;
  return s;
}

SymbolStream iet_orbit_stream(const CountableIET& iet, std::size_t alphabet, std::size_t length,
                              const FiberCoordinate& start) {
  if (alphabet < 2) throw DomainError("iet_orbit_stream: alphabet must have at least 2 symbols");
  SymbolStream s;
  s.alphabet = alphabet;
  s.provenance = Provenance::IETOrbit;
  s.description = to_string(iet.family()) + " orbit";
  s.symbols.resize(length);
  const std::size_t lump = alphabet - 1;
  FiberCoordinate p = start;
  for (std::size_t k = 0; k < length; ++k) {
    s.symbols[k] = static_cast<std::uint32_t>(std::min(p.index, lump));
    p = iet.apply(p);
  }
  return s;
}

SymbolStream read_stream(std::istream& in, std::size_t alphabet) {
  SymbolStream s;
  s.provenance = Provenance::External;
  std::string line;
  std::size_t line_no = 0;
  std::uint32_t max_symbol = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string token = line.substr(first, last - first + 1);
    if (token.find_first_not_of("0123456789") != std::string::npos)
      throw DomainError("symbol stream line " + std::to_string(line_no) + ": not a decimal symbol");
    const unsigned long v = std::stoul(token);
    if (v > std::numeric_limits<std::uint32_t>::max())
      throw DomainError("symbol stream line " + std::to_string(line_no) + ": symbol too large");
    s.symbols.push_back(static_cast<std::uint32_t>(v));
    max_symbol = std::max(max_symbol, static_cast<std::uint32_t>(v));
  }
  s.alphabet = alphabet ? alphabet : static_cast<std::size_t>(max_symbol) + 1;
  s.validate();
  return s;
}

void write_stream(std::ostream& out, const SymbolStream& s) {
  for (auto v : s.symbols) out << v << '\n';
}

namespace {

std::uint64_t checked_power(std::size_t base, std::size_t exp) {
  // A^L must stay below 2^63 for block codes to fit.
  constexpr std::uint64_t kLimit = std::uint64_t{1} << 63;
  std::uint64_t v = 1;
  for (std::size_t k = 0; k < exp; ++k) {
    if (v > kLimit / base) throw DomainError("block code A^L does not fit in 63 bits");
    v *= base;
    if (v >= kLimit) throw DomainError("block code A^L does not fit in 63 bits");
  }
  return v;
}

}  // namespace

double block_entropy(const SymbolStream& s, std::size_t block_length) {
  if (block_length == 0) return 0.0;
  const std::size_t n = s.symbols.size();
  if (n < block_length) throw InsufficientData("stream shorter than the block length");
  const std::uint64_t top = checked_power(s.alphabet, block_length - 1);
  const std::uint64_t a = s.alphabet;
  std::vector<std::uint64_t> codes;
  codes.reserve(n - block_length + 1);
  std::uint64_t code = 0;
  for (std::size_t k = 0; k < block_length; ++k) code = code * a + s.symbols[k];
  codes.push_back(code);
  for (std::size_t k = block_length; k < n; ++k) {
    code = (code - s.symbols[k - block_length] * top) * a + s.symbols[k];
    codes.push_back(code);
  }
  std::sort(codes.begin(), codes.end());
  const double total = static_cast<double>(codes.size());
  double h = 0.0;
  for (std::size_t k = 0; k < codes.size();) {
    std::size_t j = k;
    while (j < codes.size() && codes[j] == codes[k]) ++j;
    const double p = static_cast<double>(j - k) / total;
    h -= p * std::log(p);
    k = j;
  }
  return h;
}

double plugin_entropy_rate(const SymbolStream& s, std::size_t block_length) {
  if (block_length == 0) throw DomainError("plug-in estimator needs L >= 1");
  checked_power(s.alphabet, block_length);
  const double needed = static_cast<double>(s.alphabet) * std::ldexp(1.0, static_cast<int>(block_length));
  if (static_cast<double>(s.symbols.size()) < needed)
    throw InsufficientData("plug-in estimator with L = " + std::to_string(block_length) + " needs at least A*2^L = " +
                           std::to_string(static_cast<std::uint64_t>(needed)) + " symbols, got " +
                           std::to_string(s.symbols.size()));
  return std::max(0.0, block_entropy(s, block_length) - block_entropy(s, block_length - 1));
}

namespace {

// Suffix automaton with per-state singly linked edge lists.
class SuffixAutomaton {
 public:
  explicit SuffixAutomaton(std::size_t capacity) {
    len_.reserve(2 * capacity + 1);
    link_.reserve(2 * capacity + 1);
    head_.reserve(2 * capacity + 1);
    edges_.reserve(3 * capacity + 1);
    add_state(0, -1);
  }

  int transition(int state, std::uint32_t c) const {
    for (int e = head_[state]; e >= 0; e = edges_[e].next)
      if (edges_[e].symbol == c) return edges_[e].target;
    return -1;
  }

  int len(int state) const { return len_[state]; }
  int link(int state) const { return link_[state]; }

  void extend(std::uint32_t c) {
    const int cur = add_state(len_[last_] + 1, -1);
    int p = last_;
    while (p >= 0 && transition(p, c) < 0) {
      add_edge(p, c, cur);
      p = link_[p];
    }
    if (p < 0) {
      link_[cur] = 0;
    } else {
      const int q = transition(p, c);
      if (len_[p] + 1 == len_[q]) {
        link_[cur] = q;
      } else {
        const int clone = add_state(len_[p] + 1, link_[q]);
        for (int e = head_[q]; e >= 0; e = edges_[e].next) add_edge(clone, edges_[e].symbol, edges_[e].target);
        while (p >= 0 && transition(p, c) == q) {
          set_edge(p, c, clone);
          p = link_[p];
        }
        link_[q] = clone;
        link_[cur] = clone;
      }
    }
    last_ = cur;
  }

 private:
  struct Edge {
    std::uint32_t symbol;
    int target;
    int next;
  };

  int add_state(int length, int link) {
    len_.push_back(length);
    link_.push_back(link);
    head_.push_back(-1);
    return static_cast<int>(len_.size()) - 1;
  }

  void add_edge(int state, std::uint32_t c, int target) {
    edges_.push_back({c, target, head_[state]});
    head_[state] = static_cast<int>(edges_.size()) - 1;
  }

  void set_edge(int state, std::uint32_t c, int target) {
    for (int e = head_[state]; e >= 0; e = edges_[e].next)
      if (edges_[e].symbol == c) {
        edges_[e].target = target;
        return;
      }
  }

  std::vector<int> len_, link_, head_;
  std::vector<Edge> edges_;
  int last_ = 0;
};

}  // namespace

std::size_t lz76_complexity(const std::vector<std::uint32_t>& symbols) {
  if (symbols.empty()) return 0;
  // Each phrase is the shortest extension of the current match that does not
  // occur in the text before its last symbol. cur is the automaton state
  // holding the current match of length curlen.
  SuffixAutomaton sam(symbols.size());
  std::size_t phrases = 0;
  int cur = 0;
  int curlen = 0;
  for (std::size_t j = 0; j < symbols.size(); ++j) {
    const std::uint32_t c = symbols[j];
    const bool occurs = sam.transition(cur, c) >= 0;
    sam.extend(c);
    if (occurs) {
      cur = sam.transition(cur, c);
      ++curlen;
      while (sam.link(cur) >= 0 && sam.len(sam.link(cur)) >= curlen) cur = sam.link(cur);
      if (j + 1 == symbols.size()) ++phrases;
    } else {
      ++phrases;
      cur = 0;
      curlen = 0;
    }
  }
  return phrases;
}

double lz_entropy_rate(const SymbolStream& s) {
  const std::size_t n = s.symbols.size();
  if (n < 2) throw InsufficientData("LZ estimator needs at least 2 symbols");
  const double c = static_cast<double>(lz76_complexity(s.symbols));
  return c * std::log(static_cast<double>(n)) / static_cast<double>(n);
}

AbramovResult abramov(double h_base, double integral_r) {
  if (!(integral_r > 0.0) || !std::isfinite(integral_r)) throw DomainError("abramov: integral of r must be positive and finite");
  if (!(h_base >= 0.0)) throw DomainError("abramov: base entropy must be nonnegative");
  const double scale = 2.0 * integral_r;
  return {h_base / scale, scale};
}

}  // namespace suslab
