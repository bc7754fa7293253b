#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace psr {

// Uniform double in [0, 1) built directly from the generator's bits.
// std::uniform_real_distribution is implementation-defined; this is not,
// so seeded runs agree across platforms.
double canonical_uniform(std::mt19937_64& rng);

// Uniform index in [0, n).
int uniform_index(std::mt19937_64& rng, int n);

// One draw from the flat Dirichlet over n categories. The last entry is
// one minus the others, so the sum is exactly 1.0.
Eigen::VectorXd dirichlet_flat(std::mt19937_64& rng, int n);

}  // namespace psr
