#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "hfsc/errors.hpp"

namespace hfsc {

using Complex = std::complex<double>;

inline constexpr double kIntegrabilityRelTol = 1e-12;
inline constexpr double kDegenerateCAbsTol = 1e-14;
inline constexpr double kSigmaDistinctTol = 1e-10;

/// Microscopic lattice parameters behind the dispersion coefficients.
struct MicroParams {
  double kappa = 0.0;
  double mu = 0.0;   // bilinear exchange, X direction
  double mu1 = 0.0;  // bilinear exchange, Y direction
  double mu2 = 0.0;  // diagonal neighbor interaction
  double mu3 = 0.0;  // uniaxial anisotropy
};

/// Dispersion coefficients of
///   i u_t + a1 u_xx + a2 u_yy + a3 u_xy - a4 |u|^2 u = 0
/// together with the reduction slope k of xt = x + k*y.  The reduced
/// dispersion coefficient is c = a1 + a2 k^2 + a3 k, and integrability of
/// the reduced equation pins a4 = -2c.  Construct through build_model();
/// instances are immutable in spirit and safe to share across threads.
struct PhysicalModel {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double alpha3 = 0.0;
  double alpha4 = 0.0;  // always -2c, never free input
  double k = 0.0;
  double c = 0.0;  // alpha1 + alpha2 k^2 + alpha3 k
  std::optional<MicroParams> micro;
};

/// One discrete spectral point: eigenvalue sigma in the upper half-plane
/// with its constant vector (a, b).
struct SpectrumEntry {
  Complex sigma;
  Complex a;
  Complex b;
};

/// Validated discrete scattering data for an N-soliton solution.
struct SolitonSpectrum {
  std::vector<SpectrumEntry> entries;

  std::size_t size() const { return entries.size(); }
  const SpectrumEntry& operator[](std::size_t j) const { return entries[j]; }
};

struct SpaceTimePoint {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;

  double xtilde(const PhysicalModel& model) const { return x + model.k * y; }
};

namespace detail {

inline void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw Error(Errc::invalid_parameter,
                std::string("non-finite value for ") + name);
  }
}

}  // namespace detail

struct AlphaSet {
  double alpha1, alpha2, alpha3, alpha4;
};

/// Dispersion coefficients from the microscopic lattice parameters:
///   a1 = kappa^4 (mu + mu2),  a2 = kappa^4 (mu1 + mu2),
///   a3 = 2 kappa^4 mu2,       a4 = 2 kappa^4 mu3.
/// The returned alpha4 is the microscopic value; build_model() derives its
/// own alpha4 from the integrability constraint and ignores this one.
inline AlphaSet derive_alphas(double kappa, double mu, double mu1, double mu2,
                              double mu3) {
  detail::require_finite(kappa, "kappa");
  detail::require_finite(mu, "mu");
  detail::require_finite(mu1, "mu1");
  detail::require_finite(mu2, "mu2");
  detail::require_finite(mu3, "mu3");
  const double k4 = kappa * kappa * kappa * kappa;
  return AlphaSet{k4 * (mu + mu2), k4 * (mu1 + mu2), 2.0 * k4 * mu2,
                  2.0 * k4 * mu3};
}

/// Builds a model from (alpha1, alpha2, alpha3, k).  alpha4 is derived:
/// c = alpha1 + alpha2 k^2 + alpha3 k must be nonzero (otherwise the
/// reduced equation degenerates) and alpha4 = -2c.
inline PhysicalModel build_model(double alpha1, double alpha2, double alpha3,
                                 double k) {
  detail::require_finite(alpha1, "alpha1");
  detail::require_finite(alpha2, "alpha2");
  detail::require_finite(alpha3, "alpha3");
  detail::require_finite(k, "k");

  PhysicalModel m;
  m.alpha1 = alpha1;
  m.alpha2 = alpha2;
  m.alpha3 = alpha3;
  m.k = k;
  m.c = alpha1 + alpha2 * k * k + alpha3 * k;
  if (std::abs(m.c) <= kDegenerateCAbsTol) {
    throw Error(Errc::degenerate_model,
                "reduced dispersion coefficient c = alpha1 + alpha2*k^2 + "
                "alpha3*k vanishes; no soliton sector");
  }
  m.alpha4 = -2.0 * m.c;
  return m;
}

/// Same, starting from the microscopic parameters; the micro block is
/// attached for reference and alpha4 still follows the constraint.
inline PhysicalModel build_model_from_micro(const MicroParams& micro,
                                            double k) {
  const AlphaSet a = derive_alphas(micro.kappa, micro.mu, micro.mu1, micro.mu2,
                                   micro.mu3);
  PhysicalModel m = build_model(a.alpha1, a.alpha2, a.alpha3, k);
  m.micro = micro;
  return m;
}

/// Validates raw spectrum entries: every sigma strictly in the upper
/// half-plane, pairwise distinct (simple zeros), and a, b both nonzero.
inline SolitonSpectrum validate_spectrum(std::vector<SpectrumEntry> raw) {
  if (raw.empty()) {
    throw Error(Errc::invalid_parameter, "spectrum needs at least one entry");
  }
  for (std::size_t j = 0; j < raw.size(); ++j) {
    const SpectrumEntry& e = raw[j];
    if (!std::isfinite(e.sigma.real()) || !std::isfinite(e.sigma.imag()) ||
        !std::isfinite(e.a.real()) || !std::isfinite(e.a.imag()) ||
        !std::isfinite(e.b.real()) || !std::isfinite(e.b.imag())) {
      throw Error(Errc::invalid_parameter,
                  "non-finite spectrum entry " + std::to_string(j));
    }
    if (!(e.sigma.imag() > 0.0)) {
      throw Error(Errc::halfplane_violation,
                  "Im(sigma) must be positive, entry " + std::to_string(j));
    }
    if (std::abs(e.a) == 0.0 || std::abs(e.b) == 0.0) {
      throw Error(Errc::degenerate_vector,
                  "constant vector component vanishes, entry " +
                      std::to_string(j));
    }
  }
  for (std::size_t i = 0; i < raw.size(); ++i) {
    for (std::size_t j = i + 1; j < raw.size(); ++j) {
      if (std::abs(raw[i].sigma - raw[j].sigma) < kSigmaDistinctTol) {
        throw Error(Errc::simple_zero_violation,
                    "spectral points " + std::to_string(i) + " and " +
                        std::to_string(j) + " are not distinct");
      }
    }
  }
  SolitonSpectrum s;
  s.entries = std::move(raw);
  return s;
}

}  // namespace hfsc
