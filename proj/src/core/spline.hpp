#pragma once

#include <vector>

#include "types.hpp"

namespace slmap {

// Natural cubic spline through complex samples on a uniform grid.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<Complex> samples, double x0, double dx);

  Complex operator()(double x) const;

  double x_min() const { return x0_; }
  double x_max() const { return x0_ + dx_ * (static_cast<double>(n_) - 1.0); }

 private:
  std::vector<Complex> y_;
  std::vector<Complex> m_;  // second derivatives at the knots
  double x0_ = 0.0;
  double dx_ = 1.0;
  int n_ = 0;
};

}  // namespace slmap
