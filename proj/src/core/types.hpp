#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "errors.hpp"

namespace slmap {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

enum class BcKind { Robin, Dirichlet };

// sqrt(lambda) on the branch arg rho in [-pi/2, pi/2).
inline Complex rho_branch(Complex lambda) {
  Complex rho = std::sqrt(lambda);
  if (rho.real() < 0.0) rho = -rho;
  if (rho.real() == 0.0 && rho.imag() > 0.0) rho = -rho;
  return rho;
}

inline bool is_finite(Complex z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

// Sturm-Liouville problem -y'' + q y = lambda y on (0, pi).
// Robin:     y'(0) - h y(0) = 0,  y'(pi) + H y(pi) = 0.
// Dirichlet: y(0) = y(pi) = 0 (h, H stored as zero).
struct BoundaryProblem {
  std::vector<Complex> q;  // samples on the uniform grid over [0, pi]
  Complex h{0.0, 0.0};
  Complex H{0.0, 0.0};
  BcKind kind = BcKind::Robin;

  int grid_size() const { return static_cast<int>(q.size()); }
  double dx() const { return kPi / (grid_size() - 1); }
  double x_at(int i) const { return kPi * static_cast<double>(i) / (grid_size() - 1); }

  void validate() const {
    require(grid_size() >= 33, Reason::InvalidArgument, "grid_size must be >= 33");
    if (kind == BcKind::Dirichlet) {
      require(h == Complex(0.0, 0.0) && H == Complex(0.0, 0.0), Reason::InvalidArgument,
              "Dirichlet problems store h = H = 0");
    }
    for (Complex v : q)
      require(is_finite(v), Reason::InvalidArgument, "potential sample is not finite");
  }
};

// phi(x, lambda) and its normalized lambda-derivatives on the x-grid.
// lambda_order = nu stores (1/nu!) d^nu/dlambda^nu phi.
struct SolutionTrace {
  Complex lambda{};
  int lambda_order = 0;
  std::vector<Complex> values;
  std::vector<Complex> derivatives;  // d/dx
};

// Weyl solution Phi(x, lambda) and m_value = M(lambda).
struct WeylTrace {
  Complex lambda{};
  std::vector<Complex> values;
  std::vector<Complex> derivatives;
  Complex m_value{};
};

// Uniform grid on [0, pi] with grid_size() points shared across traces.
inline std::vector<double> x_grid(const BoundaryProblem& p) {
  std::vector<double> xs(p.grid_size());
  for (int i = 0; i < p.grid_size(); ++i) xs[i] = p.x_at(i);
  return xs;
}

}  // namespace slmap
