#pragma once

#include <vector>

#include "spline.hpp"
#include "types.hpp"

namespace slmap {

// Potential samples at half-step resolution for the RK4 stages on [0, x_end].
struct QSamples {
  std::vector<Complex> at;  // 2*n_steps + 1 spline values of q
  double step = 0.0;
  int n_steps = 0;
};

CubicSpline potential_spline(const BoundaryProblem& p);
QSamples sample_potential(const CubicSpline& q, double x_end, int n_steps);

// Classical RK4 for the variational chain
//   sigma_0''  = (q - lambda) sigma_0
//   sigma_nu'' = (q - lambda) sigma_nu - sigma_{nu-1},   nu = 1..nu_max,
// so that sigma_nu = (1/nu!) d^nu/dlambda^nu sigma_0 when sigma_nu(0) = sigma_nu'(0) = 0.
// State layout (sigma_0, sigma_0', sigma_1, sigma_1', ...). Records every
// record_stride steps, starting with the initial state.
std::vector<std::vector<Complex>> integrate_chain(const QSamples& qs, Complex lambda,
                                                  int nu_max,
                                                  const std::vector<Complex>& init,
                                                  int record_stride);

// phi(x, lambda) and its normalized lambda-derivative traces on the problem grid.
// Robin: phi(0) = 1, phi'(0) = h.  Dirichlet: phi(0) = 0, phi'(0) = 1.
std::vector<SolutionTrace> integrate_phi(const BoundaryProblem& p, Complex lambda,
                                         int nu_max, int refine = 4);

// State of the chain at an arbitrary x in [0, pi], integrated with a fixed step
// count so the result varies smoothly with x. Returns (value, derivative) per order.
struct PointState {
  std::vector<Complex> values;
  std::vector<Complex> derivatives;
};
PointState phi_at(const BoundaryProblem& p, Complex lambda, double x, int nu_max,
                  int refine = 4);

// Characteristic function whose zeros (with multiplicity) are the eigenvalues.
// Robin: Delta = phi'(pi) + H phi(pi). Dirichlet: value at pi of the sine-type solution.
Complex characteristic(const BoundaryProblem& p, Complex lambda, int refine = 4);

// Delta and its first nu_max lambda-derivatives (unnormalized d^k/dlambda^k).
std::vector<Complex> characteristic_derivatives(const BoundaryProblem& p, Complex lambda,
                                                int nu_max, int refine = 4);

WeylTrace integrate_weyl(const BoundaryProblem& p, Complex lambda, int refine = 4);

// Weyl function value only (cheaper than the full trace; same construction).
Complex weyl_m(const BoundaryProblem& p, Complex lambda, int refine = 4);

// Kernel D(x, lambda, xi): difference quotient of the Wronskian for separated
// arguments, cumulative integral of phi(t,lambda) phi(t,xi) otherwise.
double merge_threshold(Complex lambda);
Complex kernel_D(const BoundaryProblem& p, double x, Complex lambda, Complex xi,
                 int refine = 4);

// O(h^4) cumulative integral of f*g on a uniform grid using endpoint derivatives.
std::vector<Complex> cumulative_product_integral(const std::vector<Complex>& f,
                                                 const std::vector<Complex>& fp,
                                                 const std::vector<Complex>& g,
                                                 const std::vector<Complex>& gp,
                                                 double dx);

// Composite Simpson weights applied to samples on a uniform grid.
Complex simpson(const std::vector<Complex>& f, double dx);

}  // namespace slmap
