#include "reflectsde/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "reflectsde/error.hpp"
#include "reflectsde/philox.hpp"

namespace reflectsde {

namespace {

Vec probe_point(int dim, std::uint64_t seed, std::uint32_t index) {
  Vec x(dim);
  const philox::Key key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  for (int c = 0; c < dim; ++c) {
    const auto out = philox::philox4x32_10({index, static_cast<std::uint32_t>(c), 0xC0EF, 0}, key);
    x(c) = -3.0 + 6.0 * philox::to_open_unit(out[0], out[1]);
  }
  return x;
}

void require(bool cond, const std::string& what) {
  if (!cond) throw Error(Errc::InvalidCoefficients, what);
}

}  // namespace

void validate(const CoefficientSet& coef, int probes, std::uint64_t seed) {
  require(coef.sigma && coef.drift && coef.dsigma, coef.name + ": missing coefficient function");
  require(coef.state_dim >= 1 && coef.state_dim <= kMaxDim, coef.name + ": state_dim out of range");
  require(coef.noise_dim >= 1 && coef.noise_dim <= kMaxDim, coef.name + ": noise_dim out of range");
  const double h = 1e-5;
  for (int p = 0; p < probes; ++p) {
    const Vec x = probe_point(coef.state_dim, seed, static_cast<std::uint32_t>(p));
    const Mat s = coef.sigma(x);
    const Vec b = coef.drift(x);
    require(s.rows() == coef.state_dim && s.cols() == coef.noise_dim, coef.name + ": sigma has the wrong shape");
    require(b.size() == coef.state_dim, coef.name + ": drift has the wrong size");
    require(s.norm() <= coef.sup_bound * (1.0 + 1e-12), coef.name + ": |sigma| exceeds sup_bound");
    require(b.norm() <= coef.sup_bound * (1.0 + 1e-12), coef.name + ": |b| exceeds sup_bound");
    for (int j = 0; j < coef.state_dim; ++j) {
      Vec xp = x;
      Vec xm = x;
      xp(j) += h;
      xm(j) -= h;
      const Mat fd = (coef.sigma(xp) - coef.sigma(xm)) / (2.0 * h);
      const Mat an = coef.dsigma(x, j);
      require(an.rows() == fd.rows() && an.cols() == fd.cols(), coef.name + ": dsigma has the wrong shape");
      require((an - fd).cwiseAbs().maxCoeff() <= 1e-6,
              coef.name + ": dsigma disagrees with finite differences in direction " + std::to_string(j));
    }
  }
}

Vec drift_correction(const CoefficientSet& coef, const Vec& x) {
  const Mat s = coef.sigma(x);
  Vec corr = Vec::Zero(coef.state_dim);
  for (int j = 0; j < coef.state_dim; ++j) corr.noalias() += coef.dsigma(x, j) * s.row(j).transpose();
  return 0.5 * corr;
}

CoefficientSet stratonovich_drift(const CoefficientSet& coef) {
  CoefficientSet out = coef;
  out.name = coef.name + "+stratonovich";
  out.drift = [coef](const Vec& x) -> Vec { return coef.drift(x) + drift_correction(coef, x); };
  // |1/2 tr(D sigma) sigma| <= 1/2 |D sigma| |sigma| with |D sigma| bounded by the Lipschitz constant
  // in each of the d directions.
  out.sup_bound = coef.sup_bound * (1.0 + 0.5 * coef.lipschitz_bound * std::sqrt(double(coef.state_dim)));
  return out;
}

double max_drift_correction(const CoefficientSet& coef, int probes, std::uint64_t seed) {
  double best = 0.0;
  for (int p = 0; p < probes; ++p) {
    best = std::max(best, drift_correction(coef, probe_point(coef.state_dim, seed, static_cast<std::uint32_t>(p))).norm());
  }
  return best;
}

namespace coefficients {

CoefficientSet make(Diffusion diffusion, Drift drift, int state_dim, int noise_dim, double scale) {
  if (state_dim < 1 || state_dim > kMaxDim || noise_dim < 1 || noise_dim > kMaxDim) {
    throw Error(Errc::InvalidCoefficients, "dimension out of range");
  }
  CoefficientSet c;
  c.state_dim = state_dim;
  c.noise_dim = noise_dim;
  double sigma_bound = 0.0;
  double sigma_lip = 0.0;

  switch (diffusion) {
    case Diffusion::Constant: {
      if (!std::isfinite(scale)) throw Error(Errc::InvalidCoefficients, "sigma scale is not finite");
      Mat s = Mat::Zero(state_dim, noise_dim);
      for (int i = 0; i < std::min(state_dim, noise_dim); ++i) s(i, i) = scale;
      c.name = "constant";
      c.sigma = [s](const Vec&) { return s; };
      c.dsigma = [state_dim, noise_dim](const Vec&, int) -> Mat { return Mat::Zero(state_dim, noise_dim); };
      sigma_bound = s.norm();
      break;
    }
    case Diffusion::DiagTanh: {
      if (noise_dim != state_dim) throw Error(Errc::InvalidCoefficients, "diag_tanh needs noise_dim == state_dim");
      c.name = "diag_tanh";
      c.sigma = [state_dim](const Vec& x) -> Mat {
        Mat s = Mat::Zero(state_dim, state_dim);
        for (int i = 0; i < state_dim; ++i) s(i, i) = 1.0 + 0.5 * std::tanh(x(i));
        return s;
      };
      c.dsigma = [state_dim](const Vec& x, int j) -> Mat {
        Mat d = Mat::Zero(state_dim, state_dim);
        const double ch = std::cosh(x(j));
        d(j, j) = 0.5 / (ch * ch);
        return d;
      };
      sigma_bound = 1.5 * std::sqrt(double(state_dim));
      sigma_lip = 0.5;
      break;
    }
  }

  double drift_bound = 0.0;
  double drift_lip = 0.0;
  switch (drift) {
    case Drift::Zero:
      c.drift = [state_dim](const Vec&) -> Vec { return Vec::Zero(state_dim); };
      c.name += "/zero";
      break;
    case Drift::NegTanh:
      c.drift = [](const Vec& x) -> Vec { return -x.array().tanh().matrix(); };
      c.name += "/neg_tanh";
      drift_bound = std::sqrt(double(state_dim));
      drift_lip = 1.0;
      break;
  }
  c.sup_bound = std::max(sigma_bound, drift_bound);
  c.lipschitz_bound = std::max(sigma_lip, drift_lip);
  return c;
}

CoefficientSet constant_sigma(int state_dim, int noise_dim, double scale, Drift drift) {
  return make(Diffusion::Constant, drift, state_dim, noise_dim, scale);
}

CoefficientSet diag_tanh(int dim, Drift drift) { return make(Diffusion::DiagTanh, drift, dim, dim); }

}  // namespace coefficients
}  // namespace reflectsde
