#pragma once

#include <Eigen/Dense>
#include <memory>
#include <unordered_map>
#include <vector>

#include "perturb.hpp"

namespace slmap {

struct Discretization {
  int contour_nodes = 256;  // quadrature nodes on the contour, even, >= 64
  int trunc_k = 60;         // retained discrete tail indices N+1 .. N+K
};

enum class WeylDiffMode {
  HatMN,           // partial-fraction difference built from the first N indices
  FullDifference,  // pointwise difference of the two Weyl functions (both problems known)
};

struct InverseOptions {
  Discretization disc{};
  int ode_refine = 4;
  int threads = 0;  // 0 = hardware concurrency
  bool strict = false;
  double delta0 = 1e-2;            // hypothesis ceiling enforced in strict mode
  double truncation_tol = 1e-8;    // budget for the discarded tail of the series
  double contour_standoff = 1e-9;  // minimal eigenvalue distance to the contour
  WeylDiffMode weyl_mode = WeylDiffMode::HatMN;
  const BoundaryProblem* target_problem = nullptr;  // for FullDifference mode
  bool eps_by_finite_difference = false;            // debug path for eps
};

struct Diagnostics {
  std::vector<double> op_norm_proxy;  // per grid point
  double max_op_norm_proxy = 0.0;
  double min_rcond = 1.0;
  double max_residual = 0.0;
  double contour_sup = 0.0;
  double tail_norm = 0.0;
  double truncation_estimate = 0.0;
  double first_block_shift = 0.0;     // diagnostic only, see the metrics
  std::vector<double> eta_tail;       // eta_{N+k}, k = 1..K; analysis-only
  int N = 0;
  double r = 0.0;
  int contour_nodes = 0;
  int trunc_k = 0;
  bool hypotheses_pass = true;
};

struct ReconstructionResult {
  std::vector<Complex> q_tilde;
  std::vector<Complex> eps0;
  std::vector<Complex> eps;
  Complex h_tilde{};
  Complex H_tilde{};
  Diagnostics diag;
};

// Mixed continuous/discrete element: contour samples followed by the
// interleaved tail entries (odd: value at la~_{N+k}; even: chi-scaled difference).
struct BanachElement {
  Eigen::VectorXcd coords;  // size contour_nodes + 2K
  int contour_nodes = 0;

  double bnorm() const;  // max over continuous part + max over discrete part
};

// Shared per-solve state: traces of phi at every contour node and tail
// eigenvalue, cumulative integrals for merged kernel arguments, weights.
class MainEquationWorkspace {
 public:
  MainEquationWorkspace(const BoundaryProblem& model, const SpectralData& model_data,
                        const SpectralData& target, const InverseOptions& opts);

  int grid_size() const { return model_.grid_size(); }
  int K() const { return K_; }
  int M_C() const { return M_C_; }
  int N() const { return N_; }
  double r() const { return r_; }
  int system_size() const { return M_C_ + 2 * K_; }
  const PerturbationMetrics& metrics() const { return metrics_; }
  const Diagnostics& setup_diagnostics() const { return setup_diag_; }
  const BoundaryProblem& model() const { return model_; }
  const SpectralData& model_data() const { return model_data_; }
  const SpectralData& target() const { return target_; }
  const std::vector<Complex>& contour() const { return contour_; }

  BanachElement build_psi(int gx) const;        // element at grid point gx
  BanachElement build_psi_prime(int gx) const;  // its x-derivative
  Eigen::MatrixXcd build_R(int gx) const;
  Eigen::MatrixXcd build_R_prime(int gx) const;

  double row_sum_proxy(const Eigen::MatrixXcd& R) const;

  // phi~ and phi~' at (grid point gx, probe lambda) from the solved element.
  std::pair<Complex, Complex> reconstruct_phi_tilde(int gx, Complex lambda,
                                                    const Eigen::VectorXcd& psi_t,
                                                    const Eigen::VectorXcd& psi_t_prime) const;

  // eps0 and eps0' at a grid point from the solved element and its derivative.
  std::pair<Complex, Complex> correction_at(int gx, const Eigen::VectorXcd& psi_t,
                                            const Eigen::VectorXcd& psi_t_prime) const;

  Complex phi_model(int gx, Complex lambda) const;        // cached or on-demand
  Complex kernel(int gx, int node_a, int node_b) const;   // D at cached nodes

 private:
  friend ReconstructionResult solve_inverse(const BoundaryProblem&, const SpectralData&,
                                            const SpectralData&, const InverseOptions&);

  struct Trace {
    std::vector<Complex> v, d;
  };

  void build_traces();
  void build_near_pair_integrals();
  Complex node_lambda(int node) const;
  const Trace& node_trace(int node) const;

  const BoundaryProblem& model_;
  SpectralData model_data_;
  SpectralData target_;
  InverseOptions opts_;
  int N_ = 0;
  double r_ = 0.0;
  int M_C_ = 0;
  int K_ = 0;

  std::vector<Complex> contour_;
  std::vector<Complex> hat_at_nodes_;  // weighted integrand factor per node
  PerturbationMetrics metrics_;
  PartialFraction hat_pf_;

  // node ids: [0, M_C) contour, then per k in 1..K: model lambda_{N+k} at
  // M_C + 2(k-1), target lambda~_{N+k} at M_C + 2(k-1) + 1.
  std::vector<Trace> traces_;
  std::vector<std::vector<Complex>> near_cum_;          // cumulative integrals
  std::vector<std::pair<int, int>> near_pairs_;         // node id pairs
  std::unordered_map<uint64_t, int> near_map_;
  int near_index(int a, int b) const;

  std::vector<double> xi_tail_;   // xi_{N+k}, k = 1..K
  std::vector<double> chi_tail_;  // chi_{N+k}
  std::vector<Complex> m_tail_;   // M_{N+k}
  std::vector<Complex> mt_tail_;  // M~_{N+k}

  Diagnostics setup_diag_;
};

// Solve (I + R) psi~ = psi by dense LU with partial pivoting.
// Throws SingularOperator on a vanishing pivot, ResidualTooLarge when the
// refined residual exceeds 1e-10 * |psi|.
Eigen::VectorXcd solve_main_equation(const Eigen::MatrixXcd& R, const Eigen::VectorXcd& psi,
                                     double* rcond = nullptr, double* residual = nullptr);

// The correction pair (eps0, eps = -2 eps0') on the grid, plus diagnostics.
struct Correction {
  std::vector<Complex> eps0;
  std::vector<Complex> eps;
  Diagnostics diag;
};
Correction compute_correction(const BoundaryProblem& model, const SpectralData& model_data,
                              const SpectralData& target, const InverseOptions& opts = {});

ReconstructionResult solve_inverse(const BoundaryProblem& model,
                                   const SpectralData& model_data,
                                   const SpectralData& target,
                                   const InverseOptions& opts = {});

// Convenience entry that computes the model data first.
ReconstructionResult solve_inverse(const BoundaryProblem& model, const SpectralData& target,
                                   const InverseOptions& opts = {});

}  // namespace slmap
