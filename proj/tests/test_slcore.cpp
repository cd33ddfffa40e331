#include <doctest.h>

#include <cmath>
#include <random>

#include "core/ode.hpp"
#include "core/presets.hpp"

using namespace slmap;

namespace {

BoundaryProblem zero_robin(int grid = 257) { return preset_problem("zero-robin", grid); }
BoundaryProblem zero_dirichlet(int grid = 257) {
  return preset_problem("zero-dirichlet", grid);
}

double rel_err(Complex got, Complex want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace

TEST_CASE("phi solves the constant-coefficient problem") {
  const auto p = zero_robin();
  const auto traces = integrate_phi(p, Complex(4.0, 0.0), 0);
  for (int i = 0; i < p.grid_size(); i += 16) {
    const double x = p.x_at(i);
    CHECK(std::abs(traces[0].values[i] - std::cos(2.0 * x)) < 1e-9);
    CHECK(std::abs(traces[0].derivatives[i] + 2.0 * std::sin(2.0 * x)) < 1e-9);
  }
}

TEST_CASE("phi at lambda = 0 is identically one") {
  const auto p = zero_robin();
  const auto traces = integrate_phi(p, Complex(0.0, 0.0), 0);
  for (int i = 0; i < p.grid_size(); ++i) {
    CHECK(std::abs(traces[0].values[i] - 1.0) < 1e-13);
    CHECK(std::abs(traces[0].derivatives[i]) < 1e-13);
  }
}

TEST_CASE("initial conditions by kind and order") {
  const auto pr = zero_robin();
  BoundaryProblem ph = pr;
  ph.h = Complex(0.4, -0.2);
  const auto tr = integrate_phi(ph, Complex(2.0, 1.0), 2);
  CHECK(tr[0].values[0] == Complex(1.0, 0.0));
  CHECK(tr[0].derivatives[0] == ph.h);
  for (int nu = 1; nu <= 2; ++nu) {
    CHECK(tr[nu].values[0] == Complex(0.0, 0.0));
    CHECK(tr[nu].derivatives[0] == Complex(0.0, 0.0));
  }
  const auto pd = zero_dirichlet();
  const auto td = integrate_phi(pd, Complex(2.0, 1.0), 0);
  CHECK(td[0].values[0] == Complex(0.0, 0.0));
  CHECK(td[0].derivatives[0] == Complex(1.0, 0.0));
}

TEST_CASE("first lambda-derivative against the analytic difference quotient") {
  // oracle: (cos(sqrt(1+e) x) - cos(sqrt(1-e) x)) / (2e), e = 1e-6
  const auto p = zero_robin();
  const auto traces = integrate_phi(p, Complex(1.0, 0.0), 1);
  const double e = 1e-6;
  for (int i = 0; i < p.grid_size(); i += 8) {
    const double x = p.x_at(i);
    const double fd = (std::cos(std::sqrt(1.0 + e) * x) - std::cos(std::sqrt(1.0 - e) * x)) /
                      (2.0 * e);
    CHECK(std::abs(traces[1].values[i] - fd) < 1e-8);
    CHECK(std::abs(traces[1].values[i] - (-0.5 * x * std::sin(x))) < 1e-8);
  }
}

TEST_CASE("variational trace matches a central difference of the integrated phi") {
  const auto p = preset_problem("smooth-complex", 257);
  const Complex la(5.3, 0.7);
  const double step = 1e-6 * std::max(1.0, std::abs(la));
  const auto tr = integrate_phi(p, la, 1);
  const auto plus = integrate_phi(p, la + step, 0);
  const auto minus = integrate_phi(p, la - step, 0);
  for (int i = 0; i < p.grid_size(); i += 32) {
    const Complex fd = (plus[0].values[i] - minus[0].values[i]) / (2.0 * step);
    CHECK(rel_err(tr[1].values[i], fd) < 1e-7);
  }
}

TEST_CASE("integration error drops at fourth order under step halving") {
  const auto p = preset_problem("smooth-complex", 257);
  const Complex la(7.3, 0.5);
  const Complex ref = integrate_phi(p, la, 0, 32)[0].values.back();
  const Complex c2 = integrate_phi(p, la, 0, 2)[0].values.back();
  const Complex c4 = integrate_phi(p, la, 0, 4)[0].values.back();
  const double e2 = std::abs(c2 - ref);
  const double e4 = std::abs(c4 - ref);
  CHECK(e4 > 0.0);
  CHECK(e2 / e4 >= 14.0);
}

TEST_CASE("Weyl function of the zero potential") {
  const auto p = zero_robin();
  SUBCASE("closed form cot(rho pi)/rho at a regular point") {
    for (double la : {0.25, 0.5, 2.6}) {
      const double rho = std::sqrt(la);
      const double want = std::cos(rho * kPi) / std::sin(rho * kPi) / rho;
      const auto w = integrate_weyl(p, Complex(la, 0.0));
      CHECK(std::abs(w.m_value - want) < 1e-9);
    }
  }
  SUBCASE("boundary conditions of the Weyl solution") {
    const auto w = integrate_weyl(p, Complex(0.25, 0.0));
    CHECK(std::abs(w.derivatives[0] - 1.0) < 1e-12);  // Phi'(0) - h Phi(0) = 1, h = 0
    CHECK(std::abs(w.derivatives.back() + p.H * w.values.back()) < 1e-9);
    CHECK(w.m_value == w.values[0]);
  }
  SUBCASE("pole raises NearEigenvalue") {
    CHECK_THROWS_AS((void)integrate_weyl(p, Complex(1.0, 0.0)), Error);
    try {
      (void)integrate_weyl(p, Complex(1.0, 0.0));
    } catch (const Error& e) {
      CHECK(e.reason() == Reason::NearEigenvalue);
    }
  }
}

TEST_CASE("Weyl normalization with nonzero h") {
  // U(Phi) = Phi'(0) - h Phi(0) = 1 keeps the poles at the eigenvalues
  auto p = zero_robin();
  p.h = Complex(0.3, 0.1);
  p.H = Complex(-0.2, 0.05);
  const auto w = integrate_weyl(p, Complex(0.37, 0.21));
  CHECK(std::abs(w.derivatives[0] - p.h * w.values[0] - 1.0) < 1e-12);
  CHECK(std::abs(w.derivatives.back() + p.H * w.values.back()) < 1e-9);
}

TEST_CASE("Dirichlet Weyl function of the zero potential") {
  const auto p = zero_dirichlet();
  for (double la : {0.25, 2.3}) {
    const double rho = std::sqrt(la);
    const double want = -rho * std::cos(rho * kPi) / std::sin(rho * kPi);
    const auto w = integrate_weyl(p, Complex(la, 0.0));
    CHECK(std::abs(w.m_value - want) < 1e-9);
    CHECK(std::abs(w.values[0] - 1.0) < 1e-12);
    CHECK(std::abs(w.values.back()) < 1e-9);
  }
}

TEST_CASE("characteristic function closed forms") {
  const auto p = zero_robin();
  CHECK(std::abs(characteristic(p, Complex(2.25, 0.0)) - 1.5) < 1e-9);
  for (int n = 0; n <= 3; ++n)
    CHECK(std::abs(characteristic(p, Complex(static_cast<double>(n) * n, 0.0), 8)) < 1e-9);
  const auto pd = zero_dirichlet();
  CHECK(std::abs(characteristic(pd, Complex(4.0, 0.0))) < 1e-9);
  const double rho = std::sqrt(2.25);
  CHECK(std::abs(characteristic(pd, Complex(2.25, 0.0)) - std::sin(rho * kPi) / rho) < 1e-9);
}

TEST_CASE("non-finite integration state is reported") {
  const auto p = zero_robin();
  CHECK_THROWS_AS((void)integrate_phi(p, Complex(0.0, 2e8), 0), Error);
}

TEST_CASE("kernel D closed form for the zero potential") {
  const auto p = zero_robin();
  const double rho = 1.3, th = 0.6;
  const Complex la(rho * rho, 0.0), xi(th * th, 0.0);
  for (double x : {0.5, 1.2, kPi}) {
    const double want = std::sin((rho - th) * x) / (2.0 * (rho - th)) +
                        std::sin((rho + th) * x) / (2.0 * (rho + th));
    CHECK(std::abs(kernel_D(p, x, la, xi) - want) < 1e-9);
  }
  SUBCASE("coincident arguments at lambda = 0 integrate to x") {
    for (double x : {0.3, 1.0, 2.5})
      CHECK(std::abs(kernel_D(p, x, Complex(0.0, 0.0), Complex(0.0, 0.0)) - x) < 1e-9);
  }
  SUBCASE("empty integral at x = 0") {
    CHECK(kernel_D(p, 0.0, la, xi) == Complex(0.0, 0.0));
    CHECK(kernel_D(p, 0.0, la, la) == Complex(0.0, 0.0));
  }
}

TEST_CASE("kernel D symmetry on random pairs") {
  const auto p = preset_problem("const-complex", 257);
  std::mt19937 gen(991);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const Complex la = 100.0 * Complex(u(gen), u(gen)) * 0.7;
    const Complex xi = 100.0 * Complex(u(gen), u(gen)) * 0.7;
    if (std::abs(la) > 100.0 || std::abs(xi) > 100.0) continue;
    const double x = 0.5 * (u(gen) + 1.0) * kPi;
    const Complex a = kernel_D(p, x, la, xi);
    const Complex b = kernel_D(p, x, xi, la);
    CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("kernel branches agree near the merge threshold") {
  const auto p = preset_problem("smooth-complex", 257);
  std::mt19937 gen(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 12; ++t) {
    const Complex la(6.0 * u(gen) + 1.0, 2.0 * u(gen) - 1.0);
    const double thr = merge_threshold(la);
    const double sep = thr * (1.0 + 9.0 * u(gen));  // in [thr, 10 thr]
    const Complex xi = la + sep * std::polar(1.0, 2.0 * kPi * u(gen));
    const Complex got = kernel_D(p, kPi, la, xi);  // quotient branch

    // the integral branch on the same arguments, assembled from public pieces
    const CubicSpline q = potential_spline(p);
    const int n_steps = 4 * (p.grid_size() - 1);
    const QSamples qs = sample_potential(q, kPi, n_steps);
    const std::vector<Complex> init{Complex(1.0), Complex(0.0)};
    const auto ra = integrate_chain(qs, la, 0, init, 1);
    const auto rb = integrate_chain(qs, xi, 0, init, 1);
    std::vector<Complex> fa(ra.size()), fap(ra.size()), fb(ra.size()), fbp(ra.size());
    for (size_t i = 0; i < ra.size(); ++i) {
      fa[i] = ra[i][0]; fap[i] = ra[i][1];
      fb[i] = rb[i][0]; fbp[i] = rb[i][1];
    }
    const Complex integral =
        cumulative_product_integral(fa, fap, fb, fbp, qs.step).back();
    CHECK(std::abs(got - integral) <= 1e-8 * std::max(1.0, std::abs(integral)));

    // independent coarse-grid Simpson oracle at its own accuracy
    const auto ta = integrate_phi(p, la, 0);
    const auto tb = integrate_phi(p, xi, 0);
    std::vector<Complex> prod(p.grid_size());
    for (int i = 0; i < p.grid_size(); ++i)
      prod[i] = ta[0].values[i] * tb[0].values[i];
    const Complex oracle = simpson(prod, p.dx());
    CHECK(std::abs(got - oracle) <= 2e-7 * std::max(1.0, std::abs(oracle)));
  }
}

TEST_CASE("x-derivative of D is phi(x,lambda) phi(x,xi)") {
  const auto p = preset_problem("const-complex", 257);
  const Complex la(3.1, 0.4), xi(7.7, -0.3);
  const double e = 1e-6;
  for (double x : {0.7, 1.9, 2.8}) {
    const Complex fd = (kernel_D(p, x + e, la, xi) - kernel_D(p, x - e, la, xi)) / (2.0 * e);
    const auto a = phi_at(p, la, x, 0);
    const auto b = phi_at(p, xi, x, 0);
    CHECK(std::abs(fd - a.values[0] * b.values[0]) < 1e-6);
  }
}

TEST_CASE("square-root branch keeps arg rho in [-pi/2, pi/2)") {
  CHECK(rho_branch(Complex(4.0, 0.0)) == Complex(2.0, 0.0));
  // negative real lambda maps to the lower half of the axis
  const Complex neg = rho_branch(Complex(-4.0, 0.0));
  CHECK(neg.real() == 0.0);
  CHECK(neg.imag() == -2.0);
  std::mt19937 gen(33);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int t = 0; t < 200; ++t) {
    const Complex la(u(gen), u(gen));
    const Complex rho = rho_branch(la);
    CHECK(std::abs(rho * rho - la) <= 1e-12 * (1.0 + std::abs(la)));
    const double a = std::arg(rho);
    CHECK(a >= -kPi / 2.0);
    CHECK(a < kPi / 2.0 + 1e-15);
  }
}

TEST_CASE("Wronskian identity ties D to the solution traces") {
  const auto p = preset_problem("smooth-complex", 257);
  const Complex la(2.2, 0.5), xi(11.4, -0.8);
  for (double x : {0.9, 2.1}) {
    const Complex D = kernel_D(p, x, la, xi);
    const auto a = phi_at(p, la, x, 0);
    const auto b = phi_at(p, xi, x, 0);
    const Complex wron = a.values[0] * b.derivatives[0] - a.derivatives[0] * b.values[0];
    CHECK(std::abs((la - xi) * D - wron) < 1e-9);
  }
}
