#pragma once

#include <cstdint>
#include <random>

#include "geoaccel/linalg.hpp"

namespace geoaccel {

using Rng = std::mt19937_64;

// exp(Uniform(log lo, log hi))
double log_uniform(Rng& rng, double lo, double hi);

// Uniformly distributed orthogonal matrix (QR of a Gaussian matrix with the
// sign of R's diagonal fixed).
Matrix random_orthogonal(Rng& rng, int n);

// Symmetric H with smallest eigenvalue mu and largest L (n >= 2) and the
// remaining eigenvalues log-uniform in [mu, L]. For n = 1 the result is (mu).
Matrix random_spd(Rng& rng, int n, double mu, double L);

}  // namespace geoaccel
