#pragma once

// Lorentzian-plus-dispersion lineshape
//
//   f(delta) = gamma (A gamma + B (delta - delta0)) / (gamma^2 + (delta - delta0)^2) + C
//
// fitted by Levenberg-Marquardt, and the resonance classification built on
// the ratio B/A.

#include <Eigen/Dense>
#include <unsupported/Eigen/LevenbergMarquardt>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "eitsim/errors.hpp"
#include "eitsim/propagation.hpp"

namespace eitsim {

enum class ResonanceClass { transmission, dispersive, absorption };

inline std::string to_string(ResonanceClass c) {
  switch (c) {
    case ResonanceClass::transmission: return "TRANSMISSION";
    case ResonanceClass::absorption: return "ABSORPTION";
    case ResonanceClass::dispersive: break;
  }
  return "DISPERSIVE";
}

struct LineshapeFit {
  double A = 0.0;
  double B = 0.0;
  double gamma_fit = 0.0;  // rad/s
  double delta0 = 0.0;     // rad/s
  double C = 0.0;
  double residual_norm = 0.0;  // rms
  ResonanceClass resonance = ResonanceClass::dispersive;
  bool converged = false;
  int iterations = 0;
};

inline double eval_model(const LineshapeFit& p, double delta) {
  const double x = delta - p.delta0;
  const double g = p.gamma_fit;
  return g * (p.A * g + p.B * x) / (g * g + x * x) + p.C;
}

/// TRANSMISSION iff A > 0 and |B/A| < 2, ABSORPTION iff A < 0 and
/// |B/A| < 2, DISPERSIVE otherwise (including A = 0 and |B/A| = 2).
inline ResonanceClass classify(const LineshapeFit& p) {
  if (p.A == 0.0 || !(std::abs(p.B) < 2.0 * std::abs(p.A))) return ResonanceClass::dispersive;
  return p.A > 0.0 ? ResonanceClass::transmission : ResonanceClass::absorption;
}

namespace detail {

inline double median(std::vector<double> v) {
  const std::size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + n / 2, v.end());
  double hi = v[n / 2];
  if (n % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + n / 2);
  return 0.5 * (lo + hi);
}

// Residuals and analytic Jacobian on normalized coordinates;
// parameters are (A, B, gamma, x0, C).
struct LineshapeResidual : Eigen::DenseFunctor<double> {
  LineshapeResidual(const std::vector<double>& x, const std::vector<double>& y)
      : Eigen::DenseFunctor<double>(5, static_cast<int>(x.size())), x_(x), y_(y) {}

  int operator()(const InputType& p, ValueType& r) const {
    for (std::size_t i = 0; i < x_.size(); ++i) {
      const double u = x_[i] - p[3];
      r[i] = p[2] * (p[0] * p[2] + p[1] * u) / (p[2] * p[2] + u * u) + p[4] - y_[i];
    }
    return 0;
  }

  int df(const InputType& p, JacobianType& j) const {
    for (std::size_t i = 0; i < x_.size(); ++i) {
      const Eigen::Index row = static_cast<Eigen::Index>(i);
      const double u = x_[i] - p[3];
      const double g = p[2];
      const double d = g * g + u * u;
      const double num = p[0] * g * g + p[1] * g * u;
      j(row, 0) = g * g / d;
      j(row, 1) = g * u / d;
      j(row, 2) = (2.0 * p[0] * g + p[1] * u) / d - 2.0 * g * num / (d * d);
      j(row, 3) = -p[1] * g / d + 2.0 * u * num / (d * d);
      j(row, 4) = 1.0;
    }
    return 0;
  }

 private:
  const std::vector<double>& x_;
  const std::vector<double>& y_;
};

// Half-width at half-extremum around index `peak`, linear interpolation
// between the samples straddling the half level. Returns 0 if neither side
// crosses.
inline double half_width(const std::vector<double>& x, const std::vector<double>& dev,
                         std::size_t peak) {
  const double half = 0.5 * std::abs(dev[peak]);
  double sum = 0.0;
  int found = 0;
  for (std::size_t i = peak; i + 1 < x.size(); ++i) {
    if (std::abs(dev[i + 1]) <= half) {
      const double a = std::abs(dev[i]) - half;
      const double b = half - std::abs(dev[i + 1]);
      sum += x[i] + (x[i + 1] - x[i]) * a / (a + b) - x[peak];
      ++found;
      break;
    }
  }
  for (std::size_t i = peak; i > 0; --i) {
    if (std::abs(dev[i - 1]) <= half) {
      const double a = std::abs(dev[i]) - half;
      const double b = half - std::abs(dev[i - 1]);
      sum += x[peak] - (x[i] - (x[i] - x[i - 1]) * a / (a + b));
      ++found;
      break;
    }
  }
  return found > 0 ? sum / found : 0.0;
}

}  // namespace detail

/// Least-squares fit of the lineshape to (delta, y).
///
/// Abscissa and ordinate are first mapped onto unit scales (scan midpoint and
/// half-span; initial offset and amplitude), which makes the iteration
/// invariant under shifts and affine rescaling of the data. The minimizer is
/// Eigen's MINPACK-style trust-region Levenberg-Marquardt (initial step
/// bound factor 100, Marquardt scaling) with relative parameter tolerance
/// 1e-10. After 200 iterations the best parameters so far are returned with
/// converged = false. Throws DegenerateData for fewer than 20 points or a
/// constant spectrum.
inline LineshapeFit fit(const std::vector<double>& delta, const std::vector<double>& y) {
  const std::size_t n = delta.size();
  if (y.size() != n) throw InvalidArgument("fit: delta and data sizes differ");
  if (n < 20) throw DegenerateData("fit: need at least 20 points");

  const double center = 0.5 * (delta.front() + delta.back());
  const double scale = 0.5 * (delta.back() - delta.front());
  if (!(scale > 0.0)) throw DegenerateData("fit: scan has zero span");

  // Initial guess on the raw data.
  const std::size_t outer = std::max<std::size_t>(1, n / 20);
  std::vector<double> wings;  // outer 10% of the scan, split between both ends
  for (std::size_t i = 0; i < outer; ++i) {
    wings.push_back(y[i]);
    wings.push_back(y[n - 1 - i]);
  }
  const double c0 = detail::median(wings);
  std::vector<double> dev(n);
  std::size_t peak = 0;
  for (std::size_t i = 0; i < n; ++i) {
    dev[i] = y[i] - c0;
    if (std::abs(dev[i]) > std::abs(dev[peak])) peak = i;
  }
  const double a0 = dev[peak];
  if (a0 == 0.0) throw DegenerateData("fit: spectrum is constant");

  std::vector<double> x(n);
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = (delta[i] - center) / scale;
    t[i] = dev[i] / std::abs(a0);
  }
  double g0 = detail::half_width(x, t, peak);
  if (!(g0 > 0.0)) g0 = 0.1;

  detail::LineshapeResidual functor(x, t);
  Eigen::LevenbergMarquardt<detail::LineshapeResidual> lm(functor);
  lm.setXtol(1e-10);
  lm.setFtol(1e-14);
  lm.setMaxfev(100000);
  Eigen::VectorXd p(5);
  p << a0 / std::abs(a0), 0.0, g0, x[peak], 0.0;

  namespace lms = Eigen::LevenbergMarquardtSpace;
  lms::Status status = lm.minimizeInit(p);
  if (status == lms::ImproperInputParameters) throw DegenerateData("fit: improper input");
  int iter = 0;
  while ((status == lms::NotStarted || status == lms::Running) && iter < 200) {
    status = lm.minimizeOneStep(p);
    ++iter;
  }
  const bool converged = status != lms::NotStarted && status != lms::Running &&
                         status != lms::TooManyFunctionEvaluation;
  Eigen::VectorXd resid(n);
  functor(p, resid);
  const double ss = resid.squaredNorm();

  if (p[2] < 0.0) {
    p[2] = -p[2];
    p[1] = -p[1];
  }
  const double ys = std::abs(a0);
  LineshapeFit out;
  out.A = p[0] * ys;
  out.B = p[1] * ys;
  out.gamma_fit = p[2] * scale;
  out.delta0 = p[3] * scale + center;
  out.C = p[4] * ys + c0;
  out.residual_norm = std::sqrt(ss / static_cast<double>(n)) * ys;
  out.resonance = classify(out);
  out.converged = converged;
  out.iterations = iter;
  return out;
}

inline LineshapeFit fit(const TransmissionSpectrum& spectrum) {
  return fit(spectrum.delta, spectrum.transmission);
}

}  // namespace eitsim
