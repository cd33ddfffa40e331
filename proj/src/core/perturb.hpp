#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "partial_fraction.hpp"
#include "spectral.hpp"

namespace slmap {

// Per-index deviation weights. Robin: xi_n = |rho_n - rho~_n| + |M_n - M~_n|.
// Dirichlet: xi_n = |rho_n - rho~_n| + n^{-2} |M_n - M~_n|.
struct PerturbationMetrics {
  int first_index = 0;
  std::vector<double> xi;   // per entry
  std::vector<double> chi;  // 1/xi, or 0 when xi == 0
  double tail_norm = 0.0;   // (sum_{n>N} (n xi_n)^2)^{1/2}
  double contour_sup = 0.0; // max |hat M_N| over the contour quadrature nodes
  double first_block_shift = 0.0;  // max_{n<=N} |lambda_n - lambda~_n|, diagnostic only
};

// eta_n = (sum_{k>=1} 1/(k^2 (|n-k|+1)^2))^{1/2}; appears in stability
// estimates only, reported as a diagnostic sequence.
double eta_weight(int n);

struct CheckRecord {
  std::string id;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct CheckReport {
  std::vector<CheckRecord> records;
  bool pass = true;

  void add(const std::string& id, double measured, double bound);
};

double xi_weight(BcKind kind, int n, Complex la_model, Complex la_target,
                 Complex m_model, Complex m_target);

PerturbationMetrics compute_metrics(const SpectralData& model, const SpectralData& target,
                                    int N, double r, int contour_nodes = 256);

// Conditions of the contour-form closeness theorem: sup of |hat M_N| on the
// contour <= delta, weighted tail norm <= delta, and pole containment.
struct Theorem1Result {
  PerturbationMetrics metrics;
  CheckReport report;
};
Theorem1Result check_theorem1(const SpectralData& model, const SpectralData& target,
                              int N, double r, double delta, int contour_nodes = 256);

// Conditions of the discrete-form theorem: pairwise distinct target eigenvalues,
// moment closeness per model block up to order 2(m_k - 1), magnitude bounds
// delta^{1/m_k} / delta^{(1-m_k)/m_k}, and the weighted tail norm.
CheckReport check_theorem2(const SpectralData& model, const SpectralData& target,
                           int N, double delta);

// Splits the double eigenvalue block at paper index k into two simple poles:
//   M~_k = a/sqrt(delta) + M_k,  M~_{k+1} = -a/sqrt(delta),
//   la~_k = la_k + sqrt(delta),  la~_{k+1} = la_k - sqrt(delta) + c delta,
// with a = M_{k+1}/2 and c = M_k/a. Exact in the first two moments.
SpectralData split_double(const SpectralData& model, int k, double delta);

// Seeded tail perturbation rho~_n = rho_n + delta u_n/(2 n^2),
// M~_n = M_n + delta v_n/(2 n^2) for n > N, with |u_n|, |v_n| <= 1.
SpectralData perturb_simple_tail(const SpectralData& model, double delta, uint64_t seed,
                                 bool real_only = false);

}  // namespace slmap
