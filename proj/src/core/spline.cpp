#include "spline.hpp"

#include <algorithm>

namespace slmap {

CubicSpline::CubicSpline(std::vector<Complex> samples, double x0, double dx)
    : y_(std::move(samples)), x0_(x0), dx_(dx), n_(static_cast<int>(y_.size())) {
  require(n_ >= 2, Reason::InvalidArgument, "spline needs at least two samples");
  m_.assign(n_, Complex(0.0, 0.0));
  if (n_ == 2) return;

  // Tridiagonal system for the interior second derivatives, natural ends.
  const int m = n_ - 2;
  std::vector<double> diag(m, 4.0);
  std::vector<Complex> rhs(m);
  for (int i = 0; i < m; ++i)
    rhs[i] = 6.0 * (y_[i] - 2.0 * y_[i + 1] + y_[i + 2]) / (dx_ * dx_);
  for (int i = 1; i < m; ++i) {
    const double w = 1.0 / diag[i - 1];
    diag[i] -= w;
    rhs[i] -= w * rhs[i - 1];
  }
  m_[m] = rhs[m - 1] / diag[m - 1];
  for (int i = m - 2; i >= 0; --i) m_[i + 1] = (rhs[i] - m_[i + 2]) / diag[i];
}

Complex CubicSpline::operator()(double x) const {
  if (n_ == 2) {
    const double t = (x - x0_) / dx_;
    return (1.0 - t) * y_[0] + t * y_[1];
  }
  double s = (x - x0_) / dx_;
  int i = static_cast<int>(std::floor(s));
  i = std::clamp(i, 0, n_ - 2);
  const double a = s - static_cast<double>(i);
  const double b = 1.0 - a;
  return b * y_[i] + a * y_[i + 1] +
         ((b * b * b - b) * m_[i] + (a * a * a - a) * m_[i + 1]) * (dx_ * dx_) / 6.0;
}

}  // namespace slmap
