#include "psrkit/random.hpp"

#include <cmath>

namespace psr {

double canonical_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int uniform_index(std::mt19937_64& rng, int n) {
  return static_cast<int>(rng() % static_cast<std::uint64_t>(n));
}

Eigen::VectorXd dirichlet_flat(std::mt19937_64& rng, int n) {
  Eigen::VectorXd gammas(n);
  for (int i = 0; i < n; ++i) {
    // Exp(1) via inverse CDF; 1 - u stays strictly positive.
    gammas[i] = -std::log(1.0 - canonical_uniform(rng));
  }
  double total = gammas.sum();
  Eigen::VectorXd w(n);
  double partial = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    w[i] = gammas[i] / total;
    partial += w[i];
  }
  w[n - 1] = 1.0 - partial;
  return w;
}

}  // namespace psr
