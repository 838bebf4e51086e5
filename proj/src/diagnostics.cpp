#include "twopulse/diagnostics.hpp"

#include "twopulse/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace twopulse {

namespace {

template <class F>
double trapezoid(std::size_t n, double dt, F&& value) {
  if (n < 2) return 0.0;
  double sum = 0.5 * (value(0) + value(n - 1));
  for (std::size_t i = 1; i + 1 < n; ++i) sum += value(i);
  return sum * dt;
}

std::vector<double> magnitudes(std::span<const cplx> envelope) {
  std::vector<double> out(envelope.size());
  std::transform(envelope.begin(), envelope.end(), out.begin(),
                 [](cplx v) { return std::abs(v); });
  return out;
}

}  // namespace

double pulse_area(std::span<const cplx> envelope, const TimeAxis& axis) {
  if (envelope.size() < 2) return 0.0;
  cplx sum = 0.5 * (envelope.front() + envelope.back());
  for (std::size_t i = 1; i + 1 < envelope.size(); ++i) sum += envelope[i];
  return std::abs(sum * axis.dt());
}

double pulse_area_abs(std::span<const cplx> envelope, const TimeAxis& axis) {
  return trapezoid(envelope.size(), axis.dt(),
                   [&](std::size_t i) { return std::abs(envelope[i]); });
}

AreaReport measured_areas(const FieldState& fields, const TimeAxis& axis) {
  AreaReport r;
  r.theta_a = pulse_area(fields.omega_a, axis);
  r.theta_b = pulse_area(fields.omega_b, axis);
  r.theta_total = std::hypot(r.theta_a, r.theta_b);
  r.z_position = fields.z;
  return r;
}

namespace {

// 2 pi / sqrt(1 + exp(2u)) without overflow.
double area_curve(double u) {
  if (u > 0.0) return 2.0 * kPi * std::exp(-u) / std::sqrt(1.0 + std::exp(-2.0 * u));
  return 2.0 * kPi / std::sqrt(1.0 + std::exp(2.0 * u));
}

}  // namespace

AreaReport theoretical_areas(const MediumPrep& prep, const PropagationCoefficients& coeffs,
                             double z) {
  const double u = prep.inversion() * coeffs.kappa * z;
  AreaReport r;
  r.theta_a = area_curve(u);
  r.theta_b = area_curve(-u);
  r.theta_total = std::hypot(r.theta_a, r.theta_b);
  r.z_position = z;
  return r;
}

double transfer_length(const MediumPrep& prep, const PropagationCoefficients& coeffs,
                       double theta_b_in) {
  if (prep.inversion() == 0.0)
    throw DegenerateInversion("alpha2 == beta2: no Raman inversion, no transfer length");
  if (!(theta_b_in > 0.0 && theta_b_in < 2.0 * kPi))
    throw InvalidParameter("input Stokes Area must lie in (0, 2 pi)");
  if (!(coeffs.kappa > 0.0)) throw InvalidParameter("kappa must be > 0");
  const double ratio = 2.0 * kPi / theta_b_in;
  return std::log(ratio * ratio - 1.0) / (2.0 * coeffs.kappa * prep.inversion());
}

FluxResidual flux_residual_step(const FieldState& before, const FieldState& after,
                                std::span<const double> rho33_before,
                                std::span<const double> rho33_after, double mu,
                                const TimeAxis& axis) {
  const std::size_t n = axis.size();
  if (before.omega_a.size() != n || after.omega_a.size() != n || rho33_before.size() != n ||
      rho33_after.size() != n)
    throw InvalidParameter("flux residual inputs must be sampled on the time axis");
  const double dz = after.z - before.z;
  if (!(dz > 0.0)) throw InvalidParameter("snapshots must be ordered in Z");

  const auto flux = [](const FieldState& f, std::size_t i) {
    return std::norm(f.omega_a[i]) + std::norm(f.omega_b[i]);
  };
  const auto rho = [&](std::size_t i) { return 0.5 * (rho33_before[i] + rho33_after[i]); };
  const double dt = axis.dt();

  double peak = 0.0, max_res = 0.0, sum_sq = 0.0, max_dz = 0.0, max_dt = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    peak = std::max({peak, flux(before, i), flux(after, i)});
    double drho;
    if (n < 3) {
      drho = (rho(1) - rho(0)) / dt;
    } else if (i == 0) {
      drho = (-3.0 * rho(0) + 4.0 * rho(1) - rho(2)) / (2.0 * dt);
    } else if (i == n - 1) {
      drho = (3.0 * rho(n - 1) - 4.0 * rho(n - 2) + rho(n - 3)) / (2.0 * dt);
    } else {
      drho = (rho(i + 1) - rho(i - 1)) / (2.0 * dt);
    }
    const double z_term = (flux(after, i) - flux(before, i)) / dz;
    const double t_term = 2.0 * mu * drho;
    const double r = z_term + t_term;
    max_res = std::max(max_res, std::abs(r));
    sum_sq += r * r;
    max_dz = std::max(max_dz, std::abs(z_term));
    max_dt = std::max(max_dt, std::abs(t_term));
  }
  FluxResidual out;
  if (peak > 0.0) {
    out.per_step_max = max_res * dz / peak;
    out.per_step_l2 = std::sqrt(sum_sq / n) * dz / peak;
  }
  const double scale = std::max(max_dz, max_dt);
  if (scale > 0.0) out.relative = max_res / scale;
  return out;
}

std::vector<FluxResidual> poynting_residual(std::span<const Snapshot> snapshots, double mu,
                                            const TimeAxis& axis) {
  std::vector<FluxResidual> out;
  for (std::size_t k = 1; k < snapshots.size(); ++k)
    out.push_back(flux_residual_step(snapshots[k - 1].fields, snapshots[k].fields,
                                     snapshots[k - 1].rho33_avg, snapshots[k].rho33_avg, mu,
                                     axis));
  return out;
}

// --- fitting ---------------------------------------------------------------

namespace {

using Model = std::function<double(double t, const Eigen::Vector3d& p)>;

// Levenberg-Marquardt with a central-difference Jacobian.
Eigen::Vector3d least_squares(const Model& model, Eigen::Vector3d p,
                              const std::vector<double>& t, const std::vector<double>& y) {
  const auto residuals = [&](const Eigen::Vector3d& q) {
    Eigen::VectorXd r(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) r[i] = model(t[i], q) - y[i];
    return r;
  };
  double lambda = 1e-3;
  Eigen::VectorXd r = residuals(p);
  double cost = r.squaredNorm();
  for (int iter = 0; iter < 200; ++iter) {
    Eigen::MatrixXd jac(t.size(), 3);
    for (int k = 0; k < 3; ++k) {
      const double h = 1e-7 * std::max(1.0, std::abs(p[k]));
      Eigen::Vector3d up = p, dn = p;
      up[k] += h;
      dn[k] -= h;
      jac.col(k) = (residuals(up) - residuals(dn)) / (2.0 * h);
    }
    const Eigen::Matrix3d jtj = jac.transpose() * jac;
    const Eigen::Vector3d g = jac.transpose() * r;
    bool improved = false;
    for (int tries = 0; tries < 20 && !improved; ++tries) {
      Eigen::Matrix3d a = jtj;
      a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
      const Eigen::Vector3d step = a.ldlt().solve(-g);
      const Eigen::Vector3d trial = p + step;
      const Eigen::VectorXd rt = residuals(trial);
      const double ct = rt.squaredNorm();
      if (std::isfinite(ct) && ct < cost) {
        const double rel = (cost - ct) / std::max(cost, 1e-300);
        p = trial;
        r = rt;
        cost = ct;
        lambda = std::max(lambda * 0.3, 1e-12);
        improved = true;
        if (rel < 1e-15 || step.norm() < 1e-13 * (1.0 + p.norm())) return p;
      } else {
        lambda *= 10.0;
      }
    }
    if (!improved) break;
  }
  return p;
}

struct PeakShape {
  double amplitude;
  double center;
  double fwhm;
};

PeakShape peak_shape(const std::vector<double>& mag, const TimeAxis& axis) {
  const auto it = std::max_element(mag.begin(), mag.end());
  const int ip = static_cast<int>(it - mag.begin());
  const double half = 0.5 * *it;
  int l = ip, r = ip;
  while (l > 0 && mag[l] > half) --l;
  while (r + 1 < axis.n && mag[r] > half) ++r;
  const auto cross = [&](int lo, int hi) {
    const double y0 = mag[lo], y1 = mag[hi];
    const double frac = (y1 == y0) ? 0.5 : (half - y0) / (y1 - y0);
    return axis.at(lo) + frac * axis.dt();
  };
  const double tl = (mag[l] <= half && l < ip) ? cross(l, l + 1) : axis.at(l);
  const double tr = (mag[r] <= half && r > ip) ? cross(r - 1, r) : axis.at(r);
  return {*it, 0.0, std::max(tr - tl, axis.dt())};
}

struct FitWindow {
  std::vector<double> t, y;
};

FitWindow fit_window(const std::vector<double>& mag, const TimeAxis& axis, double center,
                     double half_width) {
  FitWindow w;
  for (int i = 0; i < axis.n; ++i) {
    const double t = axis.at(i);
    if (std::abs(t - center) <= half_width) {
      w.t.push_back(t);
      w.y.push_back(mag[i]);
    }
  }
  return w;
}

double rms(const Model& model, const Eigen::Vector3d& p, const FitWindow& w) {
  double sum = 0.0;
  for (std::size_t i = 0; i < w.t.size(); ++i) {
    const double d = model(w.t[i], p) - w.y[i];
    sum += d * d;
  }
  return std::sqrt(sum / std::max<std::size_t>(w.t.size(), 1));
}

// Mean |slope| of log|Omega| where |Omega| lies in [1e-4, 1e-2] of the peak.
double tail_slope(const std::vector<double>& mag, const TimeAxis& axis, int ip) {
  const double peak = mag[ip];
  const auto side_slope = [&](int from, int to, int step) -> std::optional<double> {
    double st = 0, sy = 0, stt = 0, sty = 0;
    int count = 0;
    for (int i = from; i != to; i += step) {
      const double v = mag[i];
      if (v >= 1e-4 * peak && v <= 1e-2 * peak) {
        const double t = axis.at(i), y = std::log(v);
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
        ++count;
      }
    }
    if (count < 3) return std::nullopt;
    const double den = count * stt - st * st;
    if (den == 0.0) return std::nullopt;
    return std::abs((count * sty - st * sy) / den);
  };
  const auto left = side_slope(ip, -1, -1);
  const auto right = side_slope(ip, axis.n, 1);
  if (left && right) return 0.5 * (*left + *right);
  if (left) return *left;
  if (right) return *right;
  return 0.0;
}

}  // namespace

SechFit fit_sech(std::span<const cplx> envelope, const TimeAxis& axis) {
  if (peak_count(envelope) > 1)
    throw NotSinglePulse("envelope has several peaks; inspect it with peak_count first");
  const auto mag = magnitudes(envelope);
  const int ip = static_cast<int>(std::max_element(mag.begin(), mag.end()) - mag.begin());
  const auto shape = peak_shape(mag, axis);
  const double center = peak_position(envelope, axis);
  const Model model = [](double t, const Eigen::Vector3d& p) {
    return p[0] / std::cosh((t - p[1]) / p[2]);
  };
  const auto window = fit_window(mag, axis, center, 3.0 * shape.fwhm);
  Eigen::Vector3d p(shape.amplitude, center, shape.fwhm / (2.0 * std::acosh(2.0)));
  p = least_squares(model, p, window.t, window.y);

  SechFit fit;
  fit.amplitude = p[0];
  fit.center = p[1];
  fit.width = std::abs(p[2]);
  fit.rms_misfit = rms(model, p, window) / std::abs(p[0]);
  fit.tail_slope = tail_slope(mag, axis, ip);
  return fit;
}

GaussianFit fit_gaussian(std::span<const cplx> envelope, const TimeAxis& axis) {
  if (peak_count(envelope) > 1)
    throw NotSinglePulse("envelope has several peaks; inspect it with peak_count first");
  const auto mag = magnitudes(envelope);
  const auto shape = peak_shape(mag, axis);
  const double center = peak_position(envelope, axis);
  const Model model = [](double t, const Eigen::Vector3d& p) {
    const double s = (t - p[1]) / p[2];
    return p[0] * std::exp(-0.5 * s * s);
  };
  const auto window = fit_window(mag, axis, center, 3.0 * shape.fwhm);
  Eigen::Vector3d p(shape.amplitude, center, shape.fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0))));
  p = least_squares(model, p, window.t, window.y);
  return {p[0], std::abs(p[2]), p[1], rms(model, p, window) / std::abs(p[0])};
}

int peak_count(std::span<const double> mag, double threshold_fraction) {
  if (mag.empty()) return 0;
  const double peak = *std::max_element(mag.begin(), mag.end());
  if (!(peak > 0.0)) return 0;
  const double threshold = threshold_fraction * peak;
  const std::size_t n = mag.size();
  int count = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && mag[j + 1] == mag[i]) ++j;
    const bool rises = (i == 0) || mag[i - 1] < mag[i];
    const bool falls = (j == n - 1) || mag[j + 1] < mag[i];
    if (rises && falls && mag[i] >= threshold) ++count;
    i = j + 1;
  }
  return count;
}

int peak_count(std::span<const cplx> envelope, double threshold_fraction) {
  const auto mag = magnitudes(envelope);
  return peak_count(std::span<const double>(mag), threshold_fraction);
}

double peak_position(std::span<const cplx> envelope, const TimeAxis& axis) {
  const auto mag = magnitudes(envelope);
  const int ip = static_cast<int>(std::max_element(mag.begin(), mag.end()) - mag.begin());
  double offset = 0.0;
  if (ip > 0 && ip + 1 < axis.n) {
    const double ym = mag[ip - 1], y0 = mag[ip], yp = mag[ip + 1];
    const double den = ym - 2.0 * y0 + yp;
    if (den < 0.0) offset = 0.5 * (ym - yp) / den;
  }
  return axis.at(ip) + offset * axis.dt();
}

double group_velocity(std::span<const FieldState> snapshots, Channel channel,
                      const TimeAxis& axis) {
  if (snapshots.size() < 2) throw InvalidParameter("group velocity needs two snapshots");
  double sz = 0, st = 0, szz = 0, szt = 0;
  const double n = static_cast<double>(snapshots.size());
  for (const auto& s : snapshots) {
    const auto& env = channel == Channel::pump_a ? s.omega_a : s.omega_b;
    const double t = peak_position(env, axis);
    sz += s.z;
    st += t;
    szz += s.z * s.z;
    szt += s.z * t;
  }
  const double den = n * szz - sz * sz;
  if (den == 0.0) throw InvalidParameter("snapshots must sit at distinct Z");
  return (n * szt - sz * st) / den;
}

double pump_depletion(const FieldState& input, const FieldState& output, const TimeAxis& axis) {
  const auto energy = [&](const FieldState& f) {
    return trapezoid(f.omega_a.size(), axis.dt(),
                     [&](std::size_t i) { return std::norm(f.omega_a[i]); });
  };
  const double in = energy(input);
  if (!(in > 0.0)) throw InvalidParameter("input pump carries no energy");
  return 1.0 - energy(output) / in;
}

std::optional<double> area_parity_location(std::span<const StepRecord> steps) {
  if (steps.empty()) return std::nullopt;
  double prev = steps[0].theta_a - steps[0].theta_b;
  if (prev <= 0.0) return steps[0].z;
  for (std::size_t k = 1; k < steps.size(); ++k) {
    const double cur = steps[k].theta_a - steps[k].theta_b;
    if (cur <= 0.0) {
      const double frac = prev / (prev - cur);
      return steps[k - 1].z + frac * (steps[k].z - steps[k - 1].z);
    }
    prev = cur;
  }
  return std::nullopt;
}

double envelope_discrepancy(const FieldState& first, const FieldState& second,
                            const FieldState& input) {
  double diff = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < input.omega_a.size(); ++i) {
    const double da = std::abs(first.omega_a[i]) - std::abs(second.omega_a[i]);
    const double db = std::abs(first.omega_b[i]) - std::abs(second.omega_b[i]);
    diff += da * da + db * db;
    norm += std::norm(input.omega_a[i]) + std::norm(input.omega_b[i]);
  }
  if (!(norm > 0.0)) throw InvalidParameter("input carries no energy");
  return std::sqrt(diff / norm);
}

std::vector<double> total_envelope(const FieldState& fields) {
  std::vector<double> out(fields.omega_a.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = std::sqrt(std::norm(fields.omega_a[i]) + std::norm(fields.omega_b[i]));
  return out;
}

std::vector<double> even_stations(double z_min, double z_max, int n) {
  if (n < 1) throw InvalidParameter("need at least one station");
  if (n == 1) return {z_max};
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k) out[k] = z_min + (z_max - z_min) * k / (n - 1);
  return out;
}

}  // namespace twopulse
