#ifndef NFG_RANDOM_HPP
#define NFG_RANDOM_HPP

#include <cstdint>
#include <random>

namespace nfg {

// Derives an independent stream seed from (base, stream). Used to split one
// user-facing seed into per-walk / per-hypothesis streams by counter.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// Deterministic random source. Distribution mapping is done by hand (not via
// <random> distributions) so that a given seed produces the same values on
// every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double strictly inside (0, 1).
  double uniform();

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal draw via the inverse CDF.
  double normal();

  double normal(double mu, double sigma) { return mu + sigma * normal(); }

  // Uniform index in [0, n), n > 0.
  std::size_t uniform_index(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace nfg

#endif  // NFG_RANDOM_HPP
