#pragma once

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "geoaccel/continuous.hpp"
#include "geoaccel/linalg.hpp"
#include "geoaccel/methods.hpp"

namespace geoaccel {

// du/dt = A (u - u*). H is kept for the block construction.
struct LinearSystem {
  OdeKind kind;
  Matrix A;
  Vector u_star;
  Matrix H;
  HyperParams params;
};

// Blocks in the [z; g] (prox, AGM) or [x; p] (heavy ball) layout. An empty
// x_star means x* = 0.
LinearSystem build_prox_ode_matrix(const Matrix& H, double eta, const Vector& x_star = Vector());
LinearSystem build_agm_ode_matrix(const Matrix& H, double eta, double tau, double alpha,
                                  const Vector& x_star = Vector());
LinearSystem build_heavy_ball_matrix(const Matrix& H, double beta, double gamma,
                                     const Vector& x_star = Vector());

// Dispatch on kind using the relevant fields of `params`.
LinearSystem build_linear_system(OdeKind kind, const Matrix& H, const HyperParams& params,
                                 const Vector& x_star = Vector());

struct BlockPair {
  double lambda;
  Eigen::Matrix2d T;
  std::complex<double> nu_plus;
  std::complex<double> nu_minus;
};

// Conjugate A by diag(U, U), with H = U diag(lambda) U^T, then by the
// interleaving permutation P (P_{2i,i} = P_{2i+1,n+i} = 1).
Matrix block_diagonal_form(const LinearSystem& sys);
std::vector<BlockPair> block_diagonalize(const LinearSystem& sys);

// (a + d)^2 - 4 (a d - b c)
double block_discriminant(const Eigen::Matrix2d& T);
std::pair<std::complex<double>, std::complex<double>> block_eigenvalues(const Eigen::Matrix2d& T);

std::vector<std::complex<double>> dense_spectrum(const Matrix& A);
double spectral_abscissa(const Matrix& A);
// Computed from the closed-form block eigenvalues.
double spectral_abscissa(const LinearSystem& sys);

// max_j exp(t Re nu_j)
double decay_envelope(const LinearSystem& sys, double t);

// Guaranteed decay rates: prox sqrt(mu)/(sqrt(mu)+sqrt(L)), AGM sqrt(mu/L)/2,
// heavy ball sqrt(mu)/(sqrt(L)+sqrt(mu)).
double decay_rate_bound(OdeKind kind, double mu, double L);

// Constants used for certification: prox eta = sqrt(mu L) (tau = 1/eta,
// alpha = 1); AGM the Bregman AGM defaults; heavy ball beta =
// (sqrt L - sqrt mu)/(sqrt L + sqrt mu), gamma = 4/(sqrt L + sqrt mu)^2.
HyperParams certification_params(OdeKind kind, double mu, double L);

struct Certificate {
  OdeKind kind;
  double mu;
  double L;
  double rho_bound;
  double abscissa;
  bool pass;
  double worst_block_lambda;
  HyperParams params;
  Matrix H;
};

// mu, L from the spectrum of H. Throws std::invalid_argument for an AGM alpha
// outside [0, 1] or a non-SPD H.
Certificate verify_decay_bound(OdeKind kind, const Matrix& H, const HyperParams& params);

nlohmann::json to_json(const Certificate& cert);

}  // namespace geoaccel
