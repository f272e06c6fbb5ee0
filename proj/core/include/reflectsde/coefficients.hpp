#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "reflectsde/linalg.hpp"

namespace reflectsde {

/// Diffusion sigma: R^d -> R^{d x n}, drift b: R^d -> R^d and the partial
/// derivatives d_j sigma (each a d x n matrix). The stated bounds are what
/// `validate` checks against.
struct CoefficientSet {
  std::string name;
  int state_dim = 1;
  int noise_dim = 1;
  std::function<Mat(const Vec&)> sigma;
  std::function<Vec(const Vec&)> drift;
  std::function<Mat(const Vec&, int)> dsigma;
  double lipschitz_bound = 0.0;
  double sup_bound = 0.0;
};

/// Throws InvalidCoefficients unless, at `probes` pseudo-random points of
/// [-3, 3]^d, dsigma matches central differences of sigma (h = 1e-5, each
/// entry within 1e-6) and |sigma|, |b| (Frobenius / Euclidean) stay below
/// sup_bound.
void validate(const CoefficientSet& coef, int probes = 100, std::uint64_t seed = 0x5eed);

/// The Stratonovich-corrected drift
///   b~^i(x) = b^i(x) + 1/2 sum_{j, a} d_j sigma^{i a}(x) sigma^{j a}(x)
/// packaged as a coefficient set with the drift replaced.
CoefficientSet stratonovich_drift(const CoefficientSet& coef);

/// 1/2 tr(D sigma)(sigma) at x; the difference between the two drifts above.
Vec drift_correction(const CoefficientSet& coef, const Vec& x);

/// Largest |drift_correction| over the validation probes; zero for constant sigma.
double max_drift_correction(const CoefficientSet& coef, int probes = 100, std::uint64_t seed = 0x5eed);

namespace coefficients {

enum class Diffusion { Constant, DiagTanh };
enum class Drift { Zero, NegTanh };

/// sigma = scale * I (d x n, ones on the leading diagonal).
/// DiagTanh: sigma(x) = diag(1 + tanh(x_i) / 2), n = d.
/// NegTanh: b(x) = -tanh(x) componentwise.
CoefficientSet make(Diffusion diffusion, Drift drift, int state_dim, int noise_dim, double scale = 1.0);

CoefficientSet constant_sigma(int state_dim, int noise_dim, double scale, Drift drift = Drift::Zero);
CoefficientSet diag_tanh(int dim, Drift drift = Drift::Zero);

}  // namespace coefficients
}  // namespace reflectsde
