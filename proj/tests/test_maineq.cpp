#include <doctest.h>

#include <cmath>
#include <random>

#include "core/main_equation.hpp"
#include "core/presets.hpp"

using namespace slmap;

namespace {

struct Setup {
  BoundaryProblem problem;
  SpectralData model_data;
};

Setup zero_robin_setup(int count = 25, int grid = 257) {
  Setup s;
  s.problem = preset_problem("zero-robin", grid);
  s.model_data = full_gsd(s.problem, count, {}).data_view();
  return s;
}

InverseOptions small_opts() {
  InverseOptions o;
  o.disc.contour_nodes = 64;
  o.disc.trunc_k = 24;
  return o;
}

double l2_of(const std::vector<Complex>& f, double dx) {
  double acc = 0.0;
  for (size_t i = 0; i + 1 < f.size(); ++i)
    acc += 0.5 * dx * (std::norm(f[i]) + std::norm(f[i + 1]));
  return std::sqrt(acc);
}

}  // namespace

TEST_CASE("element at x = 0 for a Robin model") {
  const auto s = zero_robin_setup();
  const auto target = perturb_simple_tail(s.model_data, 1e-3, 3);
  MainEquationWorkspace ws(s.problem, s.model_data, target, small_opts());
  const auto psi = ws.build_psi(0);
  for (int i = 0; i < ws.M_C(); ++i)
    CHECK(psi.coords[i] == Complex(1.0, 0.0));
  for (int k = 1; k <= ws.K(); ++k) {
    CHECK(psi.coords[ws.M_C() + 2 * (k - 1)] == Complex(1.0, 0.0));
    CHECK(psi.coords[ws.M_C() + 2 * (k - 1) + 1] == Complex(0.0, 0.0));
  }
}

TEST_CASE("identity perturbation zeroes the chi-scaled entries and the operator") {
  const auto s = zero_robin_setup();
  MainEquationWorkspace ws(s.problem, s.model_data, s.model_data, small_opts());
  for (int gx : {0, 64, 128, 256}) {
    const auto psi = ws.build_psi(gx);
    for (int k = 1; k <= ws.K(); ++k)
      CHECK(psi.coords[ws.M_C() + 2 * (k - 1) + 1] == Complex(0.0, 0.0));
    const auto R = ws.build_R(gx);
    CHECK(R.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("the operator vanishes identically at x = 0") {
  const auto s = zero_robin_setup();
  const auto target = perturb_simple_tail(s.model_data, 1e-3, 11);
  MainEquationWorkspace ws(s.problem, s.model_data, target, small_opts());
  const auto R = ws.build_R(0);
  CHECK(R.cwiseAbs().maxCoeff() == 0.0);
  const auto Rp = ws.build_R_prime(0);
  CHECK(Rp.cwiseAbs().maxCoeff() > 0.0);  // d/dx D = phi phi is nonzero at 0
}

TEST_CASE("chi-scaled difference against the cosine closed form") {
  const auto s = zero_robin_setup();
  SpectralData target = s.model_data;
  const int pos = 1;  // paper index N+1 = 1
  const Complex la = s.model_data.lambdas[pos];
  const Complex la_t = la + 1e-3;
  target.lambdas[pos] = la_t;
  MainEquationWorkspace ws(s.problem, s.model_data, target, small_opts());
  const Complex rho = rho_branch(la);
  const Complex rho_t = rho_branch(la_t);
  const double xi = std::abs(rho - rho_t);
  const double chi = 1.0 / xi;
  for (int gx : {32, 128, 250}) {
    const double x = s.problem.x_at(gx);
    const Complex want = chi * (std::cos(rho * x) - std::cos(rho_t * x));
    const Complex got = ws.build_psi(gx).coords[ws.M_C() + 1];
    CHECK(std::abs(got - want) < 1e-8);
  }
}

TEST_CASE("dense solve of the main equation") {
  SUBCASE("zero operator returns the right-hand side") {
    Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(40, 40);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Random(40);
    const auto x = solve_main_equation(R, psi);
    CHECK((x - psi).lpNorm<Eigen::Infinity>() == 0.0);
  }
  SUBCASE("manufactured solution with a contraction") {
    std::mt19937 gen(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const int n = 60;
    Eigen::MatrixXcd R(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) R(i, j) = Complex(u(gen), u(gen));
    R *= 0.5 / R.cwiseAbs().rowwise().sum().maxCoeff();  // row sums <= 1/2
    Eigen::VectorXcd want(n);
    for (int i = 0; i < n; ++i) want[i] = Complex(u(gen), u(gen));
    const Eigen::VectorXcd psi = (Eigen::MatrixXcd::Identity(n, n) + R) * want;
    const auto got = solve_main_equation(R, psi);
    CHECK((got - want).lpNorm<Eigen::Infinity>() <= 1e-10 * want.lpNorm<Eigen::Infinity>());
    // Neumann-series bound |psi~| <= 2 |psi| for |R| <= 1/2
    CHECK(got.lpNorm<Eigen::Infinity>() <= 2.0 * psi.lpNorm<Eigen::Infinity>());
  }
  SUBCASE("vanishing pivot is reported as a singular operator") {
    Eigen::MatrixXcd R = -Eigen::MatrixXcd::Identity(8, 8);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Ones(8);
    CHECK_THROWS_AS((void)solve_main_equation(R, psi), Error);
  }
}

TEST_CASE("identity reconstruction is exact") {
  const auto s = zero_robin_setup();
  const auto res = solve_inverse(s.problem, s.model_data, s.model_data, small_opts());
  for (int i = 0; i < s.problem.grid_size(); ++i) {
    CHECK(std::abs(res.eps0[i]) <= 1e-14);
    CHECK(std::abs(res.q_tilde[i] - s.problem.q[i]) <= 1e-12);
  }
  CHECK(std::abs(res.h_tilde - s.problem.h) <= 1e-14);
  CHECK(std::abs(res.H_tilde - s.problem.H) <= 1e-14);
  CHECK(res.diag.max_op_norm_proxy == 0.0);
}

TEST_CASE("reconstructed solution satisfies the consistency identities") {
  const auto s = zero_robin_setup();
  const auto target = perturb_simple_tail(s.model_data, 1e-3, 29);
  const auto opts = small_opts();
  MainEquationWorkspace ws(s.problem, s.model_data, target, opts);

  for (int gx : {40, 170}) {
    const auto R = ws.build_R(gx);
    const auto Rp = ws.build_R_prime(gx);
    const auto psi = ws.build_psi(gx);
    const auto psip = ws.build_psi_prime(gx);
    const auto psi_t = solve_main_equation(R, psi.coords);
    const Eigen::VectorXcd rhs2 = psip.coords - Rp * psi_t;
    const auto psi_tp = solve_main_equation(R, rhs2);

    for (int k = 1; k <= std::min(ws.K(), 10); ++k) {
      const int i = ws.model_data().pos(ws.N() + k);
      const auto [v_t, d_t] =
          ws.reconstruct_phi_tilde(gx, target.lambdas[i], psi_t, psi_tp);
      const Complex odd = psi_t[ws.M_C() + 2 * (k - 1)];
      CHECK(std::abs(v_t - odd) < 1e-9);
      const auto [v_m, d_m] =
          ws.reconstruct_phi_tilde(gx, ws.model_data().lambdas[i], psi_t, psi_tp);
      const double xi = ws.metrics().xi[i];
      const Complex even = psi_t[ws.M_C() + 2 * (k - 1) + 1];
      CHECK(std::abs(v_m - (odd + xi * even)) < 1e-9);
    }
    // a contour probe: phi~ equals the continuous part of the solution
    const Complex la_probe = ws.contour()[7];
    const auto [v_c, d_c] = ws.reconstruct_phi_tilde(gx, la_probe, psi_t, psi_tp);
    CHECK(std::abs(v_c - psi_t[7]) < 1e-9);
  }

  SUBCASE("initial conditions of the target problem appear at x = 0") {
    const auto R0 = ws.build_R(0);
    const auto psi0 = ws.build_psi(0);
    const auto psi_t0 = solve_main_equation(R0, psi0.coords);
    const auto psi_tp0 = solve_main_equation(
        R0, Eigen::VectorXcd(ws.build_psi_prime(0).coords - ws.build_R_prime(0) * psi_t0));
    const auto [v, d] = ws.reconstruct_phi_tilde(0, Complex(0.37, 0.11), psi_t0, psi_tp0);
    CHECK(std::abs(v - 1.0) < 1e-12);  // D(0,.,.) = 0 keeps phi~(0) = 1
    // the slope at 0 is the perturbed coefficient h~ = h - eps0(0)
    const auto [e0, e0p] = ws.correction_at(0, psi_t0, psi_tp0);
    CHECK(std::abs(d - (s.problem.h - e0)) < 1e-12);
    CHECK(std::abs(e0) > 1e-5);  // genuinely different from h for this target
  }
}

TEST_CASE("identity perturbation keeps phi~ equal to phi at probes") {
  const auto s = zero_robin_setup();
  MainEquationWorkspace ws(s.problem, s.model_data, s.model_data, small_opts());
  const int gx = 100;
  const auto R = ws.build_R(gx);
  const auto psi = ws.build_psi(gx);
  const auto psi_t = solve_main_equation(R, psi.coords);
  const auto psi_tp = solve_main_equation(
      R, Eigen::VectorXcd(ws.build_psi_prime(gx).coords - ws.build_R_prime(gx) * psi_t));
  for (Complex probe : {Complex(0.21, 0.0), Complex(3.3, 0.4)}) {
    const auto [v, d] = ws.reconstruct_phi_tilde(gx, probe, psi_t, psi_tp);
    const auto direct = integrate_phi(s.problem, probe, 0);
    CHECK(std::abs(v - direct[0].values[gx]) < 1e-9);
    CHECK(std::abs(d - direct[0].derivatives[gx]) < 1e-9);
  }
}

TEST_CASE("analytic correction derivative matches the finite-difference debug path") {
  const auto s = zero_robin_setup();
  const auto target = perturb_simple_tail(s.model_data, 1e-3, 101);
  auto opts = small_opts();
  const auto analytic = solve_inverse(s.problem, s.model_data, target, opts);
  opts.eps_by_finite_difference = true;
  const auto fd = solve_inverse(s.problem, s.model_data, target, opts);
  double dev = 0.0;
  for (int i = 0; i < s.problem.grid_size(); ++i)
    dev = std::max(dev, std::abs(analytic.eps[i] - fd.eps[i]));
  CHECK(dev <= 1e-5);
}

TEST_CASE("correction size scales linearly in delta") {
  const auto s = zero_robin_setup();
  std::vector<double> ratios;
  for (double delta : {1e-2, 1e-3}) {
    const auto target = perturb_simple_tail(s.model_data, delta, 55);
    const auto cor = compute_correction(s.problem, s.model_data, target, small_opts());
    double sup = 0.0;
    for (const Complex v : cor.eps0) sup = std::max(sup, std::abs(v));
    ratios.push_back(sup / delta);
    CHECK(cor.diag.max_op_norm_proxy <= 10.0 * delta);
    const double eps_l2 = l2_of(cor.eps, s.problem.dx());
    CHECK(eps_l2 <= 10.0 * delta);
  }
  CHECK(ratios[0] / ratios[1] < 3.0);
  CHECK(ratios[1] / ratios[0] < 3.0);
}

TEST_CASE("round trip through the reconstructed potential") {
  const auto problem = preset_problem("zero-robin", 257);
  const auto gsd = full_gsd(problem, 41, {});
  const auto model_data = gsd.data_view();
  const auto target = perturb_simple_tail(model_data, 1e-3, 2024);
  InverseOptions opts;
  opts.disc.contour_nodes = 128;
  opts.disc.trunc_k = 40;
  const auto res = solve_inverse(problem, model_data, target, opts);

  BoundaryProblem rec;
  rec.q = res.q_tilde;
  rec.h = res.h_tilde;
  rec.H = res.H_tilde;
  rec.kind = problem.kind;
  ForwardOptions fwd;
  fwd.cross_validate = false;
  const auto back = full_gsd(rec, 11, fwd).data_view();
  for (int i = 0; i < back.count(); ++i) {
    const double dl = std::abs(back.lambdas[i] - target.lambdas[i]);
    CHECK(dl <= 1e-5 * (1.0 + std::abs(target.lambdas[i])));
    const double dm = std::abs(back.weyl[i] - target.weyl[i]);
    CHECK(dm <= 1e-4 * std::max(1.0, std::abs(target.weyl[i])));
  }
}

TEST_CASE("truncation budget guards the discarded tail") {
  const auto problem = preset_problem("zero-robin", 257);
  const auto model_data = full_gsd(problem, 41, {}).data_view();
  const auto target = perturb_simple_tail(model_data, 1e-3, 8);
  InverseOptions opts;
  opts.disc.contour_nodes = 64;
  opts.disc.trunc_k = 20;  // data extends to n = 40
  CHECK_THROWS_AS((void)solve_inverse(problem, model_data, target, opts), Error);
  try {
    (void)solve_inverse(problem, model_data, target, opts);
  } catch (const Error& e) {
    CHECK(e.reason() == Reason::TruncationBudgetExceeded);
  }
}

TEST_CASE("discretization limits are enforced") {
  const auto s = zero_robin_setup();
  const auto target = perturb_simple_tail(s.model_data, 1e-3, 6);
  SUBCASE("odd or small contour node counts are rejected") {
    InverseOptions opts;
    opts.disc.contour_nodes = 63;
    opts.disc.trunc_k = 24;
    CHECK_THROWS_AS(MainEquationWorkspace(s.problem, s.model_data, target, opts), Error);
    opts.disc.contour_nodes = 32;
    CHECK_THROWS_AS(MainEquationWorkspace(s.problem, s.model_data, target, opts), Error);
  }
  SUBCASE("trunc_k below 20 is rejected") {
    InverseOptions opts;
    opts.disc.contour_nodes = 64;
    opts.disc.trunc_k = 10;
    CHECK_THROWS_AS(MainEquationWorkspace(s.problem, s.model_data, target, opts), Error);
  }
  SUBCASE("a pole within the standoff of the contour is rejected") {
    SpectralData bad = target;
    bad.lambdas[2] = Complex(s.model_data.r, 0.0);  // |lambda| == r
    CHECK_THROWS_AS(MainEquationWorkspace(s.problem, s.model_data, bad, small_opts()),
                    Error);
    try {
      MainEquationWorkspace ws(s.problem, s.model_data, bad, small_opts());
    } catch (const Error& e) {
      CHECK(e.reason() == Reason::PoleOnContour);
    }
  }
}

TEST_CASE("solution at x = 0 equals the element itself") {
  const auto s = zero_robin_setup();
  const auto target = perturb_simple_tail(s.model_data, 1e-3, 77);
  MainEquationWorkspace ws(s.problem, s.model_data, target, small_opts());
  const auto psi = ws.build_psi(0);
  const auto psi_t = solve_main_equation(ws.build_R(0), psi.coords);
  CHECK((psi_t - psi.coords).lpNorm<Eigen::Infinity>() <= 1e-14);
}

TEST_CASE("strict mode rejects data outside the hypotheses") {
  const auto s = zero_robin_setup();
  SpectralData target = perturb_simple_tail(s.model_data, 1e-3, 4);
  // a tail eigenvalue pulled inside the contour breaks containment
  target.lambdas[1] = Complex(0.3, 0.0);
  auto opts = small_opts();
  opts.strict = true;
  CHECK_THROWS_AS((void)solve_inverse(s.problem, s.model_data, target, opts), Error);
  try {
    (void)solve_inverse(s.problem, s.model_data, target, opts);
  } catch (const Error& e) {
    CHECK(e.reason() == Reason::HypothesisViolated);
  }
  opts.strict = false;
  const auto res = solve_inverse(s.problem, s.model_data, target, opts);
  CHECK_FALSE(res.diag.hypotheses_pass);
}

TEST_CASE("full Weyl difference reproduces the data-driven reconstruction") {
  // both operators agree on the solution: their difference integrates an
  // analytic function around the contour
  const auto problem = preset_problem("zero-robin", 129);
  const auto model_data = full_gsd(problem, 25, {}).data_view();

  // zero-mean bump so the weighted tail sum of the data deviation converges
  BoundaryProblem bumped = problem;
  for (int i = 0; i < bumped.grid_size(); ++i)
    bumped.q[i] += 0.05 * Complex(1.0, 0.5) * std::sin(2.0 * bumped.x_at(i));
  ForwardOptions fwd;
  fwd.cross_validate = false;
  const auto target = full_gsd(bumped, 25, fwd).data_view();

  InverseOptions opts;
  opts.disc.contour_nodes = 64;
  opts.disc.trunc_k = 24;
  const auto data_driven = solve_inverse(problem, model_data, target, opts);

  opts.weyl_mode = WeylDiffMode::FullDifference;
  opts.target_problem = &bumped;
  const auto full_diff = solve_inverse(problem, model_data, target, opts);

  double dev = 0.0;
  for (int i = 0; i < problem.grid_size(); ++i)
    dev = std::max(dev, std::abs(data_driven.q_tilde[i] - full_diff.q_tilde[i]));
  CHECK(dev <= 1e-6);

  // and the reconstruction lands near the bumped potential
  std::vector<Complex> diff(problem.grid_size());
  for (int i = 0; i < problem.grid_size(); ++i)
    diff[i] = data_driven.q_tilde[i] - bumped.q[i];
  CHECK(l2_of(diff, problem.dx()) < 0.02);
}
