#pragma once

#include <cstdint>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "heavy_anchor/common.hpp"

namespace heavy_anchor {

class Game;
class LiftedLaplacian;

// Counter-based generator. stream(seed, i) depends only on (seed, i), so a
// parallel loop over i draws the same numbers as the serial one.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static SplitMix64 stream(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 g(seed ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
    g.next();
    return g;
  }

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // [0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

namespace kernels {

enum class Exec { serial, parallel };

const char* to_string(Exec e);
int max_threads();

// out = (L (x) I_n) x
void lifted_laplacian_apply(const LiftedLaplacian& op, const Eigen::Ref<const Vector>& x,
                            Eigen::Ref<Vector> out, Exec exec);

// out = bold F(x), one agent per iteration.
void extended_pseudo_gradient(const Game& game, const Eigen::Ref<const Vector>& stacked,
                              Eigen::Ref<Vector> out, Exec exec);

// Running extremes over sample pairs.
struct PairExtremes {
  double neg_monotone = -std::numeric_limits<double>::infinity();  // max -<dT,dx>/|dx|^2
  double lipschitz = 0.0;                                          // max |dT|/|dx|
  double inv_lipschitz = 0.0;                                      // max |dx|/|dT|
  std::uint64_t used = 0;
  std::uint64_t skipped = 0;
  bool unbounded_inverse = false;  // some pair had dT = 0 with dx != 0

  void add(const Eigen::Ref<const Vector>& dx, const Eigen::Ref<const Vector>& dT);
  void merge(const PairExtremes& o);
};

// Reduces f(i, acc) over i in [0, count). T needs merge(const T&); the merge
// must be order-independent for serial and parallel results to agree.
template <class T, class F>
T reduce_indexed(std::uint64_t count, const T& init, F&& f, Exec exec) {
  T total = init;
  if (exec == Exec::serial) {
    for (std::uint64_t i = 0; i < count; ++i) f(i, total);
    return total;
  }
#pragma omp parallel
  {
    T local = init;
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i) {
      f(static_cast<std::uint64_t>(i), local);
    }
#pragma omp critical(heavy_anchor_reduce)
    total.merge(local);
  }
  return total;
}

struct MaxValue {
  double value = -std::numeric_limits<double>::infinity();
  void merge(const MaxValue& o) {
    if (o.value > value) value = o.value;
  }
};

}  // namespace kernels
}  // namespace heavy_anchor
