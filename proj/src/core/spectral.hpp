#pragma once

#include <optional>
#include <vector>

#include "ode.hpp"
#include "types.hpp"

namespace slmap {

// Eigenvalues ordered by nondecreasing modulus (ties broken by argument),
// multiple eigenvalues stored as consecutive equal entries. Index n in
// block_start refers to the paper numbering, which begins at first_index
// (0 for Robin, 1 for Dirichlet).
struct Spectrum {
  BcKind kind = BcKind::Robin;
  int first_index = 0;
  std::vector<Complex> eigenvalues;
  std::vector<int> block_start;  // per entry: index n in S owning the entry
  int N = 0;                     // stabilization index
  double r = 0.0;                // contour radius, |lambda_N| < r < |lambda_{N+1}|
  double c_asym = 0.0;           // sup of max(n,1) * |sqrt(lambda_n) - n|

  int count() const { return static_cast<int>(eigenvalues.size()); }
  int last_index() const { return first_index + count() - 1; }
  int pos(int n) const { return n - first_index; }  // paper index -> array position
  Complex lambda(int n) const { return eigenvalues[pos(n)]; }
  int multiplicity(int n_start) const;
  std::vector<int> block_starts() const;                 // the set S (computed range)
  std::vector<int> block_starts_upto(int n_max) const;   // S cap [first_index, n_max]
};

// Raw spectral data {lambda_n, M_n} with block structure; used both for the
// forward-computed data and for perturbed target data.
struct SpectralData {
  BcKind kind = BcKind::Robin;
  int first_index = 0;
  std::vector<Complex> lambdas;
  std::vector<Complex> weyl;
  std::vector<int> block_start;
  int N = 0;
  double r = 0.0;

  int count() const { return static_cast<int>(lambdas.size()); }
  int last_index() const { return first_index + count() - 1; }
  int pos(int n) const { return n - first_index; }
  int multiplicity(int n_start) const;
  std::vector<int> block_starts_upto(int n_max) const;
  void validate() const;
};

struct GeneralizedSpectralData {
  Spectrum spectrum;
  std::vector<Complex> alphas;
  std::vector<Complex> weyl_coeffs;

  SpectralData data_view() const;
};

struct ForwardOptions {
  int refine = 4;            // ODE steps per grid interval
  int residue_nodes = 64;    // trapezoid nodes per isolating circle
  bool cross_validate = true;
  double cross_validation_tol = 1e-6;
  int newton_max_iter = 80;
  double cluster_tol = 1e-7;  // scaled by max(1, |lambda|)
};

Spectrum find_eigenvalues(const BoundaryProblem& p, int count,
                          const ForwardOptions& opts = {});

// Generalized weight numbers alpha_{n+nu} = int_0^pi phi_{n+nu} phi_{n+m_n-1} dx,
// composite Simpson on the x-grid.
std::vector<Complex> compute_alphas(const BoundaryProblem& p, const Spectrum& spec,
                                    const ForwardOptions& opts = {});

// Triangular system sum_{k=0}^{nu} alpha_{n+nu-k} M_{n+m_n-k-1} = s * delta_{nu,0}
// per block, where s = +1 for Robin and -1 for Dirichlet data.
std::vector<Complex> alphas_to_weyl_coeffs(const std::vector<Complex>& alphas,
                                           const Spectrum& spec);
std::vector<Complex> weyl_coeffs_to_alphas(const std::vector<Complex>& weyl,
                                           const Spectrum& spec);

// Laurent coefficients {M_{n+nu}} at the block starting at paper index n_start,
// by trapezoidal contour quadrature of (lambda - lambda_n)^nu M(lambda).
std::vector<Complex> residues_of_weyl(const BoundaryProblem& p, const Spectrum& spec,
                                      int n_start, const ForwardOptions& opts = {});

GeneralizedSpectralData full_gsd(const BoundaryProblem& p, int count,
                                 const ForwardOptions& opts = {});

// Winding number of the characteristic function along the circle |z - center| = radius.
int winding_number(const BoundaryProblem& p, Complex center, double radius,
                   int refine = 4, int initial_samples = 256);

int duality_sign(BcKind kind);

}  // namespace slmap
