#include "find_double.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace slmap {

std::function<Complex(double)> potential_shape(const std::string& name) {
  if (name == "exp-ix")
    return [](double x) { return std::exp(Complex(0.0, 1.0) * x); };
  if (name == "exp-2ix")
    return [](double x) { return std::exp(Complex(0.0, 2.0) * x); };
  fail(Reason::InvalidArgument, "unknown potential shape '" + name + "'");
}

namespace {

// Characteristic function of q = c w(x) (Robin, h = H = 0) together with its
// derivatives in lambda (orders 1, 2) and in c (plain and mixed), from one
// pass of the coupled variational system.
struct FamilyDerivatives {
  Complex d, d_la, d_lala, d_c, d_lac;
};

struct FamilyIntegrator {
  std::vector<Complex> w_half;  // shape samples at half-step resolution
  double step = 0.0;
  int n_steps = 0;

  FamilyIntegrator(const std::function<Complex(double)>& w, int grid_size, int refine) {
    // sample the shape exactly as the emitted problem will carry it: grid
    // samples interpolated by the natural cubic spline
    std::vector<Complex> samples(grid_size);
    for (int i = 0; i < grid_size; ++i)
      samples[i] = w(kPi * static_cast<double>(i) / (grid_size - 1));
    const CubicSpline ws(std::move(samples), 0.0, kPi / (grid_size - 1));
    n_steps = refine * (grid_size - 1);
    step = kPi / n_steps;
    w_half.resize(2 * n_steps + 1);
    for (int i = 0; i <= 2 * n_steps; ++i) w_half[i] = ws(0.5 * step * i);
  }

  FamilyDerivatives run(Complex lambda, Complex c) const {
    // state: y, y', s1, s1', s2, s2', yc, yc', ylc, ylc'
    std::array<Complex, 10> y{};
    y[0] = 1.0;  // y(0) = 1, y'(0) = 0
    auto rhs = [&](Complex wv, const std::array<Complex, 10>& u,
                   std::array<Complex, 10>& du) {
      const Complex a = c * wv - lambda;
      du[0] = u[1];
      du[1] = a * u[0];
      du[2] = u[3];
      du[3] = a * u[2] - u[0];
      du[4] = u[5];
      du[5] = a * u[4] - u[2];
      du[6] = u[7];
      du[7] = a * u[6] + wv * u[0];
      du[8] = u[9];
      du[9] = a * u[8] - u[6] + wv * u[2];
    };
    std::array<Complex, 10> k1{}, k2{}, k3{}, k4{}, tmp{};
    for (int i = 0; i < n_steps; ++i) {
      const Complex w0 = w_half[2 * i];
      const Complex wh = w_half[2 * i + 1];
      const Complex w1 = w_half[2 * i + 2];
      rhs(w0, y, k1);
      for (int j = 0; j < 10; ++j) tmp[j] = y[j] + 0.5 * step * k1[j];
      rhs(wh, tmp, k2);
      for (int j = 0; j < 10; ++j) tmp[j] = y[j] + 0.5 * step * k2[j];
      rhs(wh, tmp, k3);
      for (int j = 0; j < 10; ++j) tmp[j] = y[j] + step * k3[j];
      rhs(w1, tmp, k4);
      for (int j = 0; j < 10; ++j)
        y[j] += step / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
    for (Complex v : y)
      require(is_finite(v), Reason::NonFiniteState, "family integration diverged");
    // Delta = y'(pi); s2 carries (1/2) d^2/dlambda^2
    return {y[1], y[3], 2.0 * y[5], y[7], y[9]};
  }
};

BoundaryProblem family_problem(const std::function<Complex(double)>& w, Complex c,
                               int grid_size) {
  BoundaryProblem p;
  p.q.resize(grid_size);
  for (int i = 0; i < grid_size; ++i)
    p.q[i] = c * w(kPi * static_cast<double>(i) / (grid_size - 1));
  return p;
}

// coarse gap scan used to pick a Newton seed inside the window
std::pair<Complex, Complex> scan_for_seed(const FamilyIntegrator& fi,
                                          const DoubleSearchOptions& opts) {
  double best_gap = std::numeric_limits<double>::infinity();
  Complex best_c = opts.c_seed;
  Complex best_la = opts.lambda_seed;
  const int np = std::max(3, opts.scan_points);
  for (int a = 0; a < np; ++a) {
    for (int b = 0; b < np; ++b) {
      const Complex c = opts.c_seed +
                        Complex(opts.scan_radius * (2.0 * a / (np - 1) - 1.0),
                                opts.scan_radius * (2.0 * b / (np - 1) - 1.0));
      // refine the first few eigenvalues by plain Newton from integer seeds
      std::vector<Complex> roots;
      for (int n = 0; n <= 4; ++n) {
        Complex la(static_cast<double>(n) * n, 0.0);
        bool ok = false;
        for (int it = 0; it < 40; ++it) {
          const auto fd = fi.run(la, c);
          if (!is_finite(fd.d) || std::abs(fd.d_la) == 0.0) break;
          const Complex stepv = fd.d / fd.d_la;
          la -= stepv;
          if (std::abs(stepv) <= 1e-11 * (1.0 + std::abs(la))) { ok = true; break; }
        }
        if (ok && is_finite(la)) roots.push_back(la);
      }
      for (size_t i = 0; i < roots.size(); ++i)
        for (size_t j = i + 1; j < roots.size(); ++j) {
          const double gap = std::abs(roots[i] - roots[j]);
          if (gap > 1e-9 && gap < best_gap) {
            best_gap = gap;
            best_c = c;
            best_la = 0.5 * (roots[i] + roots[j]);
          }
        }
    }
  }
  return {best_la, best_c};
}

}  // namespace

DoubleSearchResult find_double(const DoubleSearchOptions& opts) {
  const auto w = potential_shape(opts.shape);
  const FamilyIntegrator fi(w, opts.grid_size, opts.refine);

  Complex la = opts.lambda_seed;
  Complex c = opts.c_seed;
  if (opts.scan) std::tie(la, c) = scan_for_seed(fi, opts);

  bool converged = false;
  for (int it = 0; it < opts.max_iter; ++it) {
    FamilyDerivatives fd;
    try {
      fd = fi.run(la, c);
    } catch (const Error&) {
      fail(Reason::SearchFailed, "family integration left the finite domain");
    }
    const Complex det = fd.d_la * fd.d_lac - fd.d_c * fd.d_lala;
    require(std::abs(det) > 1e-300, Reason::SearchFailed,
            "singular Jacobian in the double-eigenvalue search");
    const Complex dla = (-fd.d * fd.d_lac + fd.d_c * fd.d_la) / det;
    const Complex dc = (-fd.d_la * fd.d_la + fd.d_lala * fd.d) / det;
    la += dla;
    c += dc;
    require(is_finite(la) && is_finite(c), Reason::SearchFailed,
            "double-eigenvalue search iterates diverged");
    if (std::abs(dla) <= 1e-13 * (1.0 + std::abs(la)) &&
        std::abs(dc) <= 1e-13 * (1.0 + std::abs(c))) {
      converged = true;
      break;
    }
  }
  require(converged, Reason::SearchFailed, "double-eigenvalue search hit the iteration budget");

  DoubleSearchResult res;
  res.problem = family_problem(w, c, opts.grid_size);
  const auto der = characteristic_derivatives(res.problem, la, 2, opts.refine);

  DoubleCertificate& cert = res.certificate;
  cert.lambda = la;
  cert.c = c;
  cert.abs_char = std::abs(der[0]);
  cert.abs_dchar = std::abs(der[1]);
  cert.abs_d2char = std::abs(der[2]);

  // isolating circle: stay clear of the neighboring simple eigenvalues
  double nearest = std::numeric_limits<double>::infinity();
  for (int n = 0; n <= 6; ++n) {
    Complex other(static_cast<double>(n) * n, 0.0);
    bool ok = false;
    for (int it = 0; it < 50; ++it) {
      const auto d2 = characteristic_derivatives(res.problem, other, 1, opts.refine);
      if (std::abs(d2[1]) == 0.0) break;
      const Complex stepv = d2[0] / d2[1];
      other -= stepv;
      if (std::abs(stepv) <= 1e-10 * (1.0 + std::abs(other))) { ok = true; break; }
    }
    if (ok && std::abs(other - la) > 1e-3) nearest = std::min(nearest, std::abs(other - la));
  }
  cert.isolating_radius = std::isfinite(nearest) ? std::min(0.45 * nearest, 1.0) : 0.5;
  cert.winding = winding_number(res.problem, la, cert.isolating_radius, opts.refine, 128);

  const bool pass = cert.abs_char <= 1e-9 && cert.abs_dchar <= 1e-8 &&
                    cert.abs_d2char >= 1e-4 && cert.winding == 2;
  require(pass, Reason::SearchFailed,
          "certificate failed: |D|=" + std::to_string(cert.abs_char) +
              " |D'|=" + std::to_string(cert.abs_dchar) +
              " |D''|=" + std::to_string(cert.abs_d2char) +
              " winding=" + std::to_string(cert.winding));
  return res;
}

}  // namespace slmap
