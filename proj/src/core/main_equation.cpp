#include "main_equation.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "parallel.hpp"

namespace slmap {

double BanachElement::bnorm() const {
  double c = 0.0, d = 0.0;
  for (int i = 0; i < coords.size(); ++i) {
    const double a = std::abs(coords[i]);
    if (i < contour_nodes) c = std::max(c, a);
    else d = std::max(d, a);
  }
  return c + d;
}

namespace {

double bnorm_of(const Eigen::VectorXcd& v, int contour_nodes) {
  double c = 0.0, d = 0.0;
  for (int i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (i < contour_nodes) c = std::max(c, a);
    else d = std::max(d, a);
  }
  return c + d;
}

uint64_t pair_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<uint64_t>(a) << 32) | static_cast<uint64_t>(b);
}

}  // namespace

MainEquationWorkspace::MainEquationWorkspace(const BoundaryProblem& model,
                                             const SpectralData& model_data,
                                             const SpectralData& target,
                                             const InverseOptions& opts)
    : model_(model), model_data_(model_data), target_(target), opts_(opts) {
  model_.validate();
  model_data_.validate();
  target_.validate();
  require(model_data_.kind == model_.kind, Reason::InvalidArgument,
          "model data does not match the problem kind");
  require(target_.kind == model_data_.kind &&
              target_.first_index == model_data_.first_index &&
              target_.count() == model_data_.count(),
          Reason::InvalidArgument, "target data must mirror the model index range");

  N_ = model_data_.N;
  r_ = model_data_.r;
  require(r_ > 0.0, Reason::InvalidArgument, "model data carries no contour radius");
  M_C_ = opts_.disc.contour_nodes;
  require(M_C_ >= 64 && M_C_ % 2 == 0, Reason::InvalidArgument,
          "contour_nodes must be even and at least 64");
  require(opts_.disc.trunc_k >= 20, Reason::InvalidArgument, "trunc_k must be at least 20");

  const int avail = model_data_.last_index() - N_;
  require(avail >= 1, Reason::InvalidArgument, "data provides no tail beyond N");
  K_ = std::min(opts_.disc.trunc_k, avail);

  contour_.resize(M_C_);
  for (int j = 0; j < M_C_; ++j) {
    const double th = 2.0 * kPi * j / M_C_;
    contour_[j] = r_ * Complex(std::cos(th), std::sin(th));
  }

  metrics_ = compute_metrics(model_data_, target_, N_, r_, M_C_);
  hat_pf_ = hat_MN(build_MN(model_data_, N_), build_MN(target_, N_));

  // discarded-series budget when the data extends beyond the retained K
  double tail2 = 0.0;
  for (int i = 0; i < model_data_.count(); ++i) {
    const int n = model_data_.first_index + i;
    if (n > N_ + K_)
      tail2 += static_cast<double>(n) * static_cast<double>(n) * metrics_.xi[i] * metrics_.xi[i];
  }
  setup_diag_.truncation_estimate = std::sqrt(tail2);
  require(setup_diag_.truncation_estimate <= opts_.truncation_tol,
          Reason::TruncationBudgetExceeded,
          "discarded tail beyond K exceeds the configured budget");

  // contour standoff for every pole actually used
  for (const auto* data : {&model_data_, &target_}) {
    for (int i = 0; i < data->count(); ++i) {
      const double gap = std::abs(std::abs(data->lambdas[i]) - r_);
      require(gap > opts_.contour_standoff, Reason::PoleOnContour,
              "eigenvalue within standoff of the contour");
    }
  }

  // containment hypotheses (strictness handled by the caller)
  setup_diag_.hypotheses_pass = true;
  for (int i = 0; i < target_.count(); ++i) {
    const int n = target_.first_index + i;
    const double mod = std::abs(target_.lambdas[i]);
    if ((n <= N_ && mod >= r_) || (n > N_ && mod <= r_))
      setup_diag_.hypotheses_pass = false;
  }

  hat_at_nodes_.resize(M_C_);
  if (opts_.weyl_mode == WeylDiffMode::FullDifference) {
    require(opts_.target_problem != nullptr, Reason::InvalidArgument,
            "full-difference mode needs the target problem");
    for (int j = 0; j < M_C_; ++j)
      hat_at_nodes_[j] = weyl_m(*opts_.target_problem, contour_[j], opts_.ode_refine) -
                         weyl_m(model_, contour_[j], opts_.ode_refine);
  } else {
    for (int j = 0; j < M_C_; ++j) hat_at_nodes_[j] = hat_pf_.eval(contour_[j]);
  }

  xi_tail_.resize(K_ + 1);
  chi_tail_.resize(K_ + 1);
  m_tail_.resize(K_ + 1);
  mt_tail_.resize(K_ + 1);
  for (int k = 1; k <= K_; ++k) {
    const int i = model_data_.pos(N_ + k);
    xi_tail_[k] = metrics_.xi[i];
    chi_tail_[k] = metrics_.chi[i];
    m_tail_[k] = model_data_.weyl[i];
    mt_tail_[k] = target_.weyl[i];
  }

  build_traces();
  build_near_pair_integrals();

  setup_diag_.contour_sup = metrics_.contour_sup;
  setup_diag_.tail_norm = metrics_.tail_norm;
  setup_diag_.first_block_shift = metrics_.first_block_shift;
  setup_diag_.eta_tail.resize(K_);
  for (int k = 1; k <= K_; ++k) setup_diag_.eta_tail[k - 1] = eta_weight(N_ + k);
  setup_diag_.N = N_;
  setup_diag_.r = r_;
  setup_diag_.contour_nodes = M_C_;
  setup_diag_.trunc_k = K_;
}

Complex MainEquationWorkspace::node_lambda(int node) const {
  if (node < M_C_) return contour_[node];
  const int k = (node - M_C_) / 2 + 1;
  if ((node - M_C_) % 2 == 0) return model_data_.lambdas[model_data_.pos(N_ + k)];
  return target_.lambdas[target_.pos(N_ + k)];
}

const MainEquationWorkspace::Trace& MainEquationWorkspace::node_trace(int node) const {
  return traces_[node];
}

void MainEquationWorkspace::build_traces() {
  const int total = M_C_ + 2 * K_;
  traces_.resize(total);
  parallel_for(total, opts_.threads, [&](int node) {
    const auto tr = integrate_phi(model_, node_lambda(node), 0, opts_.ode_refine);
    traces_[node].v = tr[0].values;
    traces_[node].d = tr[0].derivatives;
  });
}

void MainEquationWorkspace::build_near_pair_integrals() {
  const int total = M_C_ + 2 * K_;
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < total; ++a) {
    pairs.emplace_back(a, a);
    for (int b = a + 1; b < total; ++b)
      if (std::abs(node_lambda(a) - node_lambda(b)) <= merge_threshold(node_lambda(a)))
        pairs.emplace_back(a, b);
  }
  near_pairs_ = pairs;
  near_map_.clear();
  for (size_t i = 0; i < pairs.size(); ++i)
    near_map_[pair_key(pairs[i].first, pairs[i].second)] = static_cast<int>(i);
  near_cum_.resize(pairs.size());
  const double dx = model_.dx();
  parallel_for(static_cast<int>(pairs.size()), opts_.threads, [&](int idx) {
    const auto& [a, b] = near_pairs_[idx];
    const Trace& ta = traces_[a];
    const Trace& tb = traces_[b];
    near_cum_[idx] = cumulative_product_integral(ta.v, ta.d, tb.v, tb.d, dx);
  });
}

int MainEquationWorkspace::near_index(int a, int b) const {
  const auto it = near_map_.find(pair_key(a, b));
  return it == near_map_.end() ? -1 : it->second;
}

Complex MainEquationWorkspace::kernel(int gx, int a, int b) const {
  const Complex la = node_lambda(a);
  const Complex lb = node_lambda(b);
  if (std::abs(la - lb) > merge_threshold(la)) {
    const Trace& ta = traces_[a];
    const Trace& tb = traces_[b];
    return (ta.v[gx] * tb.d[gx] - ta.d[gx] * tb.v[gx]) / (la - lb);
  }
  const int idx = near_index(a, b);
  if (idx >= 0) return near_cum_[idx][gx];
  // cache miss: integrate the product directly (not expected on the hot path)
  const Trace& ta = traces_[a];
  const Trace& tb = traces_[b];
  const double dx = model_.dx();
  return cumulative_product_integral(ta.v, ta.d, tb.v, tb.d, dx)[gx];
}

Complex MainEquationWorkspace::phi_model(int gx, Complex lambda) const {
  const auto tr = integrate_phi(model_, lambda, 0, opts_.ode_refine);
  return tr[0].values[gx];
}

BanachElement MainEquationWorkspace::build_psi(int gx) const {
  BanachElement e;
  e.contour_nodes = M_C_;
  e.coords.resize(system_size());
  for (int i = 0; i < M_C_; ++i) e.coords[i] = traces_[i].v[gx];
  for (int k = 1; k <= K_; ++k) {
    const Trace& tm = traces_[M_C_ + 2 * (k - 1)];
    const Trace& tt = traces_[M_C_ + 2 * (k - 1) + 1];
    e.coords[M_C_ + 2 * (k - 1)] = tt.v[gx];
    e.coords[M_C_ + 2 * (k - 1) + 1] = chi_tail_[k] * (tm.v[gx] - tt.v[gx]);
  }
  return e;
}

BanachElement MainEquationWorkspace::build_psi_prime(int gx) const {
  BanachElement e;
  e.contour_nodes = M_C_;
  e.coords.resize(system_size());
  for (int i = 0; i < M_C_; ++i) e.coords[i] = traces_[i].d[gx];
  for (int k = 1; k <= K_; ++k) {
    const Trace& tm = traces_[M_C_ + 2 * (k - 1)];
    const Trace& tt = traces_[M_C_ + 2 * (k - 1) + 1];
    e.coords[M_C_ + 2 * (k - 1)] = tt.d[gx];
    e.coords[M_C_ + 2 * (k - 1) + 1] = chi_tail_[k] * (tm.d[gx] - tt.d[gx]);
  }
  return e;
}

// trace node ids: model lambda_{N+k} and target lambda~_{N+k}
static inline int trace_model(int M_C, int k) { return M_C + 2 * (k - 1); }
static inline int trace_target(int M_C, int k) { return M_C + 2 * (k - 1) + 1; }
// element coordinate ids: odd entry psi_{2k-1} and even entry psi_{2k}
static inline int coord_odd(int M_C, int k) { return M_C + 2 * (k - 1); }
static inline int coord_even(int M_C, int k) { return M_C + 2 * (k - 1) + 1; }

Eigen::MatrixXcd MainEquationWorkspace::build_R(int gx) const {
  const int M = system_size();
  Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(M, M);
  const double invMC = 1.0 / static_cast<double>(M_C_);

  // continuous rows
  for (int i = 0; i < M_C_; ++i) {
    for (int i2 = 0; i2 < M_C_; ++i2) {
      const Complex w = contour_[i2] * invMC * hat_at_nodes_[i2];
      if (w != Complex(0.0, 0.0)) R(i, i2) = w * kernel(gx, i, i2);
    }
    for (int k = 1; k <= K_; ++k) {
      const Complex Dlt = kernel(gx, i, trace_target(M_C_, k));
      const Complex Dlm = kernel(gx, i, trace_model(M_C_, k));
      R(i, coord_odd(M_C_, k)) = mt_tail_[k] * Dlt - m_tail_[k] * Dlm;
      R(i, coord_even(M_C_, k)) = -xi_tail_[k] * m_tail_[k] * Dlm;
    }
  }
  // discrete rows
  for (int j = 1; j <= K_; ++j) {
    const int ro = coord_odd(M_C_, j);   // equation for the value at lambda~_{N+j}
    const int re = coord_even(M_C_, j);  // equation for the chi-scaled difference
    const int tm = trace_model(M_C_, j);
    const int tt = trace_target(M_C_, j);
    for (int i2 = 0; i2 < M_C_; ++i2) {
      const Complex w = contour_[i2] * invMC * hat_at_nodes_[i2];
      if (w == Complex(0.0, 0.0)) continue;
      const Complex Dt = kernel(gx, tt, i2);
      R(ro, i2) = w * Dt;
      if (chi_tail_[j] != 0.0) R(re, i2) = chi_tail_[j] * w * (kernel(gx, tm, i2) - Dt);
    }
    for (int k = 1; k <= K_; ++k) {
      const int km = trace_model(M_C_, k);
      const int kt = trace_target(M_C_, k);
      const Complex D_tt = kernel(gx, tt, kt);
      const Complex D_tm = kernel(gx, tt, km);
      R(ro, coord_odd(M_C_, k)) = mt_tail_[k] * D_tt - m_tail_[k] * D_tm;
      R(ro, coord_even(M_C_, k)) = -xi_tail_[k] * m_tail_[k] * D_tm;
      if (chi_tail_[j] != 0.0) {
        const Complex D_mt = kernel(gx, tm, kt);
        const Complex D_mm = kernel(gx, tm, km);
        R(re, coord_odd(M_C_, k)) =
            chi_tail_[j] * (mt_tail_[k] * (D_mt - D_tt) - m_tail_[k] * (D_mm - D_tm));
        R(re, coord_even(M_C_, k)) =
            -chi_tail_[j] * xi_tail_[k] * m_tail_[k] * (D_mm - D_tm);
      }
    }
  }
  return R;
}

Eigen::MatrixXcd MainEquationWorkspace::build_R_prime(int gx) const {
  const int M = system_size();
  Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(M, M);
  const double invMC = 1.0 / static_cast<double>(M_C_);

  auto v = [&](int node) { return traces_[node].v[gx]; };

  for (int i = 0; i < M_C_; ++i) {
    for (int i2 = 0; i2 < M_C_; ++i2) {
      const Complex w = contour_[i2] * invMC * hat_at_nodes_[i2];
      if (w != Complex(0.0, 0.0)) R(i, i2) = w * v(i) * v(i2);
    }
    for (int k = 1; k <= K_; ++k) {
      const Complex vk_t = v(trace_target(M_C_, k));
      const Complex vk_m = v(trace_model(M_C_, k));
      R(i, coord_odd(M_C_, k)) = (mt_tail_[k] * vk_t - m_tail_[k] * vk_m) * v(i);
      R(i, coord_even(M_C_, k)) = -xi_tail_[k] * m_tail_[k] * v(i) * vk_m;
    }
  }
  for (int j = 1; j <= K_; ++j) {
    const int ro = coord_odd(M_C_, j);
    const int re = coord_even(M_C_, j);
    const Complex vt = v(trace_target(M_C_, j));
    const Complex dv = v(trace_model(M_C_, j)) - vt;
    for (int i2 = 0; i2 < M_C_; ++i2) {
      const Complex w = contour_[i2] * invMC * hat_at_nodes_[i2];
      if (w == Complex(0.0, 0.0)) continue;
      R(ro, i2) = w * vt * v(i2);
      if (chi_tail_[j] != 0.0) R(re, i2) = chi_tail_[j] * w * dv * v(i2);
    }
    for (int k = 1; k <= K_; ++k) {
      const Complex vk_t = v(trace_target(M_C_, k));
      const Complex vk_m = v(trace_model(M_C_, k));
      R(ro, coord_odd(M_C_, k)) = mt_tail_[k] * vt * vk_t - m_tail_[k] * vt * vk_m;
      R(ro, coord_even(M_C_, k)) = -xi_tail_[k] * m_tail_[k] * vt * vk_m;
      if (chi_tail_[j] != 0.0) {
        R(re, coord_odd(M_C_, k)) =
            chi_tail_[j] * (mt_tail_[k] * dv * vk_t - m_tail_[k] * dv * vk_m);
        R(re, coord_even(M_C_, k)) = -chi_tail_[j] * xi_tail_[k] * m_tail_[k] * dv * vk_m;
      }
    }
  }
  return R;
}

double MainEquationWorkspace::row_sum_proxy(const Eigen::MatrixXcd& R) const {
  double cont = 0.0, disc = 0.0;
  for (int i = 0; i < R.rows(); ++i) {
    double s = 0.0;
    for (int j = 0; j < R.cols(); ++j) s += std::abs(R(i, j));
    if (i < M_C_) cont = std::max(cont, s);
    else disc = std::max(disc, s);
  }
  return cont + disc;
}

std::pair<Complex, Complex> MainEquationWorkspace::reconstruct_phi_tilde(
    int gx, Complex lambda, const Eigen::VectorXcd& psi_t,
    const Eigen::VectorXcd& psi_t_prime) const {
  const auto probe = integrate_phi(model_, lambda, 0, opts_.ode_refine)[0];
  const double dx = model_.dx();
  const double invMC = 1.0 / static_cast<double>(M_C_);

  auto D_probe = [&](int node) -> Complex {
    const Complex lb = node_lambda(node);
    const Trace& tb = traces_[node];
    if (std::abs(lambda - lb) > merge_threshold(lambda)) {
      return (probe.values[gx] * tb.d[gx] - probe.derivatives[gx] * tb.v[gx]) / (lambda - lb);
    }
    return cumulative_product_integral(probe.values, probe.derivatives, tb.v, tb.d, dx)[gx];
  };

  Complex val = probe.values[gx];
  Complex der = probe.derivatives[gx];
  for (int i = 0; i < M_C_; ++i) {
    const Complex w = contour_[i] * invMC * hat_at_nodes_[i];
    if (w == Complex(0.0, 0.0)) continue;
    const Complex D = D_probe(i);
    val -= w * D * psi_t[i];
    der -= w * (probe.values[gx] * traces_[i].v[gx] * psi_t[i] + D * psi_t_prime[i]);
  }
  for (int k = 1; k <= K_; ++k) {
    const int nm = M_C_ + 2 * (k - 1);
    const int nt = nm + 1;
    const Complex Dt = D_probe(nt);
    const Complex Dm = D_probe(nm);
    const Complex at = psi_t[nm];                                  // odd entry
    const Complex am = psi_t[nm] + xi_tail_[k] * psi_t[nt];        // value at lambda_{N+k}
    const Complex at_p = psi_t_prime[nm];
    const Complex am_p = psi_t_prime[nm] + xi_tail_[k] * psi_t_prime[nt];
    val -= mt_tail_[k] * Dt * at - m_tail_[k] * Dm * am;
    der -= mt_tail_[k] * (probe.values[gx] * traces_[nt].v[gx] * at + Dt * at_p) -
           m_tail_[k] * (probe.values[gx] * traces_[nm].v[gx] * am + Dm * am_p);
  }
  return {val, der};
}

std::pair<Complex, Complex> MainEquationWorkspace::correction_at(
    int gx, const Eigen::VectorXcd& psi_t, const Eigen::VectorXcd& psi_t_prime) const {
  const double invMC = 1.0 / static_cast<double>(M_C_);
  Complex e0(0.0, 0.0), e0p(0.0, 0.0);
  for (int i = 0; i < M_C_; ++i) {
    const Complex w = contour_[i] * invMC * hat_at_nodes_[i];
    if (w == Complex(0.0, 0.0)) continue;
    e0 += w * traces_[i].v[gx] * psi_t[i];
    e0p += w * (traces_[i].d[gx] * psi_t[i] + traces_[i].v[gx] * psi_t_prime[i]);
  }
  for (int k = 1; k <= K_; ++k) {
    const int nm = M_C_ + 2 * (k - 1);
    const int nt = nm + 1;
    const Complex at = psi_t[nm];
    const Complex am = psi_t[nm] + xi_tail_[k] * psi_t[nt];
    const Complex at_p = psi_t_prime[nm];
    const Complex am_p = psi_t_prime[nm] + xi_tail_[k] * psi_t_prime[nt];
    e0 += mt_tail_[k] * traces_[nt].v[gx] * at - m_tail_[k] * traces_[nm].v[gx] * am;
    e0p += mt_tail_[k] * (traces_[nt].d[gx] * at + traces_[nt].v[gx] * at_p) -
           m_tail_[k] * (traces_[nm].d[gx] * am + traces_[nm].v[gx] * am_p);
  }
  return {e0, e0p};
}

Eigen::VectorXcd solve_main_equation(const Eigen::MatrixXcd& R, const Eigen::VectorXcd& psi,
                                     double* rcond, double* residual) {
  const int M = static_cast<int>(R.rows());
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(M, M) + R;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  const auto diag = lu.matrixLU().diagonal();
  for (int i = 0; i < M; ++i)
    require(std::abs(diag[i]) >= 1e-13, Reason::SingularOperator,
            "vanishing pivot in the LU factorization");
  Eigen::VectorXcd x = lu.solve(psi);
  Eigen::VectorXcd res = A * x - psi;
  const double pn = std::max(psi.lpNorm<Eigen::Infinity>(), 1e-300);
  if (res.lpNorm<Eigen::Infinity>() > 5e-11 * pn) x -= lu.solve(res);
  res = A * x - psi;
  require(res.lpNorm<Eigen::Infinity>() <= 5e-11 * pn, Reason::ResidualTooLarge,
          "main equation residual above tolerance");
  if (rcond) *rcond = lu.rcond();
  if (residual) *residual = res.lpNorm<Eigen::Infinity>();
  return x;
}

ReconstructionResult solve_inverse(const BoundaryProblem& model,
                                   const SpectralData& model_data,
                                   const SpectralData& target, const InverseOptions& opts) {
  MainEquationWorkspace ws(model, model_data, target, opts);

  if (opts.strict) {
    require(ws.setup_diagnostics().hypotheses_pass, Reason::HypothesisViolated,
            "target poles violate the contour containment hypothesis");
    const double measured =
        std::max(ws.metrics().contour_sup, ws.metrics().tail_norm);
    require(measured <= opts.delta0, Reason::HypothesisViolated,
            "perturbation exceeds the configured delta0");
  }

  const int g = ws.grid_size();
  ReconstructionResult out;
  out.eps0.resize(g);
  out.eps.resize(g);
  out.diag = ws.setup_diagnostics();
  out.diag.op_norm_proxy.resize(g);
  std::vector<double> rconds(g), residuals(g);
  std::vector<Complex> eps0p(g);

  parallel_for(g, opts.threads, [&](int gx) {
    const Eigen::MatrixXcd R = ws.build_R(gx);
    const Eigen::MatrixXcd Rp = ws.build_R_prime(gx);
    const BanachElement psi = ws.build_psi(gx);
    const BanachElement psip = ws.build_psi_prime(gx);

    const int M = static_cast<int>(R.rows());
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(M, M) + R;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
    const auto diag = lu.matrixLU().diagonal();
    for (int i = 0; i < M; ++i)
      require(std::abs(diag[i]) >= 1e-13, Reason::SingularOperator,
              "vanishing pivot at grid point " + std::to_string(gx));

    Eigen::VectorXcd psi_t = lu.solve(psi.coords);
    Eigen::VectorXcd res = A * psi_t - psi.coords;
    const double pn = std::max(bnorm_of(psi.coords, ws.M_C()), 1e-300);
    if (bnorm_of(res, ws.M_C()) > 1e-10 * pn) {
      psi_t -= lu.solve(res);
      res = A * psi_t - psi.coords;
    }
    require(bnorm_of(res, ws.M_C()) <= 1e-10 * pn, Reason::ResidualTooLarge,
            "main equation residual above tolerance at grid point " + std::to_string(gx));

    const Eigen::VectorXcd rhs2 = psip.coords - Rp * psi_t;
    const Eigen::VectorXcd psi_t_prime = lu.solve(rhs2);

    const auto [e0, e0p] = ws.correction_at(gx, psi_t, psi_t_prime);
    out.eps0[gx] = e0;
    eps0p[gx] = e0p;
    out.diag.op_norm_proxy[gx] = ws.row_sum_proxy(R);
    rconds[gx] = lu.rcond();
    residuals[gx] = bnorm_of(res, ws.M_C());
  });

  for (int gx = 0; gx < g; ++gx) {
    out.diag.max_op_norm_proxy = std::max(out.diag.max_op_norm_proxy,
                                          out.diag.op_norm_proxy[gx]);
    out.diag.min_rcond = std::min(out.diag.min_rcond, rconds[gx]);
    out.diag.max_residual = std::max(out.diag.max_residual, residuals[gx]);
  }

  if (opts.eps_by_finite_difference) {
    // debug path: 5-point stencil on the eps0 grid samples
    const double h = model.dx();
    auto d = [&](int i) -> Complex {
      auto f = [&](int j) { return out.eps0[j]; };
      if (i >= 2 && i + 2 < g)
        return (f(i - 2) - 8.0 * f(i - 1) + 8.0 * f(i + 1) - f(i + 2)) / (12.0 * h);
      if (i == 0)
        return (-25.0 * f(0) + 48.0 * f(1) - 36.0 * f(2) + 16.0 * f(3) - 3.0 * f(4)) /
               (12.0 * h);
      if (i == 1)
        return (-3.0 * f(0) - 10.0 * f(1) + 18.0 * f(2) - 6.0 * f(3) + f(4)) / (12.0 * h);
      if (i == g - 2)
        return -(-3.0 * f(g - 1) - 10.0 * f(g - 2) + 18.0 * f(g - 3) - 6.0 * f(g - 4) +
                 f(g - 5)) /
               (12.0 * h);
      return -(-25.0 * f(g - 1) + 48.0 * f(g - 2) - 36.0 * f(g - 3) + 16.0 * f(g - 4) -
               3.0 * f(g - 5)) /
             (12.0 * h);
    };
    for (int i = 0; i < g; ++i) out.eps[i] = -2.0 * d(i);
  } else {
    for (int i = 0; i < g; ++i) out.eps[i] = -2.0 * eps0p[i];
  }

  out.q_tilde.resize(g);
  for (int i = 0; i < g; ++i) out.q_tilde[i] = model.q[i] + out.eps[i];
  if (model.kind == BcKind::Robin) {
    out.h_tilde = model.h - out.eps0.front();
    out.H_tilde = model.H + out.eps0.back();
  } else {
    out.h_tilde = Complex(0.0, 0.0);
    out.H_tilde = Complex(0.0, 0.0);
  }
  return out;
}

ReconstructionResult solve_inverse(const BoundaryProblem& model, const SpectralData& target,
                                   const InverseOptions& opts) {
  ForwardOptions fwd;
  fwd.refine = opts.ode_refine;
  const GeneralizedSpectralData gsd = full_gsd(model, target.count(), fwd);
  return solve_inverse(model, gsd.data_view(), target, opts);
}

Correction compute_correction(const BoundaryProblem& model, const SpectralData& model_data,
                              const SpectralData& target, const InverseOptions& opts) {
  ReconstructionResult res = solve_inverse(model, model_data, target, opts);
  return {std::move(res.eps0), std::move(res.eps), res.diag};
}

}  // namespace slmap
