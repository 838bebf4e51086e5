#pragma once

// Field values between grid samples for the RK4 stages. Cubic Lagrange on a
// four-point stencil keeps the interpolation error at O(dT^4), so fixed-step
// RK4 retains fourth order when the drive is only known on the grid.

#include "twopulse/domain.hpp"

#include <algorithm>
#include <array>
#include <span>
#include <vector>

namespace twopulse {

class StageInterpolator {
 public:
  /// `n` grid samples, `substeps` RK4 steps per grid interval.
  StageInterpolator(int n, int substeps) : n_(n), m_(substeps) {
    const int n_frac = 2 * m_ + 1;
    weights_.resize(3 * n_frac);
    for (int offset = 0; offset < 3; ++offset) {
      for (int j = 0; j < n_frac; ++j) {
        const double s = offset + static_cast<double>(j) / (2 * m_) - 1.0;
        weights_[offset * n_frac + j] = {-s * (s - 1.0) * (s - 2.0) / 6.0,
                                         (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
                                         -(s + 1.0) * s * (s - 2.0) / 2.0,
                                         (s + 1.0) * s * (s - 1.0) / 6.0};
      }
    }
  }

  int substeps() const { return m_; }

  /// Value at t_i + (j / 2m) dT, j = 0 .. 2m.
  template <class T>
  T at(std::span<const T> f, int i, int j) const {
    if (j == 0) return f[i];
    if (j == 2 * m_) return f[i + 1];
    const double frac = static_cast<double>(j) / (2 * m_);
    if (n_ < 4) return f[i] + frac * (f[i + 1] - f[i]);
    const int start = std::clamp(i - 1, 0, n_ - 4);
    const auto& w = weights_[(i - start) * (2 * m_ + 1) + j];
    return w[0] * f[start] + w[1] * f[start + 1] + w[2] * f[start + 2] + w[3] * f[start + 3];
  }

 private:
  int n_;
  int m_;
  std::vector<std::array<double, 4>> weights_;
};

/// Both envelopes tabulated at every RK4 stage time: index i * 2m + j holds
/// the value at t_i + (j / 2m) dT. Shared by all atom classes that use the
/// same substep count.
struct StageFields {
  int substeps = 1;
  std::vector<cplx> a;
  std::vector<cplx> b;
};

/// One envelope tabulated like StageFields.
inline std::vector<cplx> make_stage_table(std::span<const cplx> f, int substeps) {
  const int n = static_cast<int>(f.size());
  const StageInterpolator interp(n, substeps);
  const int per = 2 * substeps;
  std::vector<cplx> out(static_cast<std::size_t>(per) * (n - 1) + 1);
  for (int i = 0; i + 1 < n; ++i)
    for (int j = 0; j < per; ++j) out[i * per + j] = interp.at(f, i, j);
  out.back() = f.back();
  return out;
}

inline StageFields make_stage_fields(std::span<const cplx> omega_a,
                                     std::span<const cplx> omega_b, int substeps) {
  const int n = static_cast<int>(omega_a.size());
  const StageInterpolator interp(n, substeps);
  StageFields out;
  out.substeps = substeps;
  const int per = 2 * substeps;
  out.a.resize(static_cast<std::size_t>(per) * (n - 1) + 1);
  out.b.resize(out.a.size());
  for (int i = 0; i + 1 < n; ++i) {
    for (int j = 0; j < per; ++j) {
      out.a[i * per + j] = interp.at(omega_a, i, j);
      out.b[i * per + j] = interp.at(omega_b, i, j);
    }
  }
  out.a.back() = omega_a.back();
  out.b.back() = omega_b.back();
  return out;
}

}  // namespace twopulse
