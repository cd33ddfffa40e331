#include "ode.hpp"

#include <algorithm>
#include <cmath>

namespace slmap {

CubicSpline potential_spline(const BoundaryProblem& p) {
  return CubicSpline(p.q, 0.0, p.dx());
}

QSamples sample_potential(const CubicSpline& q, double x_end, int n_steps) {
  QSamples qs;
  qs.n_steps = n_steps;
  qs.step = x_end / n_steps;
  qs.at.resize(2 * n_steps + 1);
  for (int i = 0; i <= 2 * n_steps; ++i) qs.at[i] = q(0.5 * qs.step * i);
  return qs;
}

namespace {

// RHS of the first-order chain system at potential value qv.
inline void chain_rhs(Complex qv, Complex lambda, int nu_max,
                      const std::vector<Complex>& y, std::vector<Complex>& dy) {
  const Complex a = qv - lambda;
  for (int nu = 0; nu <= nu_max; ++nu) {
    dy[2 * nu] = y[2 * nu + 1];
    Complex acc = a * y[2 * nu];
    if (nu > 0) acc -= y[2 * (nu - 1)];
    dy[2 * nu + 1] = acc;
  }
}

}  // namespace

std::vector<std::vector<Complex>> integrate_chain(const QSamples& qs, Complex lambda,
                                                  int nu_max,
                                                  const std::vector<Complex>& init,
                                                  int record_stride) {
  const int dim = 2 * (nu_max + 1);
  require(static_cast<int>(init.size()) == dim, Reason::InvalidArgument,
          "chain initial state has wrong dimension");
  std::vector<std::vector<Complex>> rec;
  rec.reserve(qs.n_steps / record_stride + 2);

  std::vector<Complex> y = init;
  std::vector<Complex> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
  const double h = qs.step;
  rec.push_back(y);

  for (int i = 0; i < qs.n_steps; ++i) {
    const Complex q0 = qs.at[2 * i];
    const Complex qh = qs.at[2 * i + 1];
    const Complex q1 = qs.at[2 * i + 2];

    chain_rhs(q0, lambda, nu_max, y, k1);
    for (int j = 0; j < dim; ++j) tmp[j] = y[j] + 0.5 * h * k1[j];
    chain_rhs(qh, lambda, nu_max, tmp, k2);
    for (int j = 0; j < dim; ++j) tmp[j] = y[j] + 0.5 * h * k2[j];
    chain_rhs(qh, lambda, nu_max, tmp, k3);
    for (int j = 0; j < dim; ++j) tmp[j] = y[j] + h * k3[j];
    chain_rhs(q1, lambda, nu_max, tmp, k4);
    for (int j = 0; j < dim; ++j)
      y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);

    if ((i + 1) % record_stride == 0) rec.push_back(y);
  }
  for (Complex v : y)
    require(is_finite(v), Reason::NonFiniteState, "ODE state is not finite");
  return rec;
}

namespace {

std::vector<Complex> phi_init(const BoundaryProblem& p, int nu_max) {
  std::vector<Complex> init(2 * (nu_max + 1), Complex(0.0, 0.0));
  if (p.kind == BcKind::Robin) {
    init[0] = 1.0;
    init[1] = p.h;
  } else {
    init[0] = 0.0;
    init[1] = 1.0;
  }
  return init;
}

std::vector<SolutionTrace> pack_traces(Complex lambda, int nu_max,
                                       const std::vector<std::vector<Complex>>& rec) {
  std::vector<SolutionTrace> traces(nu_max + 1);
  const int n = static_cast<int>(rec.size());
  for (int nu = 0; nu <= nu_max; ++nu) {
    traces[nu].lambda = lambda;
    traces[nu].lambda_order = nu;
    traces[nu].values.resize(n);
    traces[nu].derivatives.resize(n);
    for (int i = 0; i < n; ++i) {
      traces[nu].values[i] = rec[i][2 * nu];
      traces[nu].derivatives[i] = rec[i][2 * nu + 1];
    }
  }
  return traces;
}

}  // namespace

std::vector<SolutionTrace> integrate_phi(const BoundaryProblem& p, Complex lambda,
                                         int nu_max, int refine) {
  require(nu_max >= 0, Reason::InvalidArgument, "nu_max must be >= 0");
  p.validate();
  const CubicSpline q = potential_spline(p);
  const QSamples qs = sample_potential(q, kPi, refine * (p.grid_size() - 1));
  const auto rec = integrate_chain(qs, lambda, nu_max, phi_init(p, nu_max), refine);
  return pack_traces(lambda, nu_max, rec);
}

PointState phi_at(const BoundaryProblem& p, Complex lambda, double x, int nu_max,
                  int refine) {
  require(x >= 0.0 && x <= kPi, Reason::InvalidArgument, "x must lie in [0, pi]");
  PointState st;
  st.values.assign(nu_max + 1, Complex(0.0, 0.0));
  st.derivatives.assign(nu_max + 1, Complex(0.0, 0.0));
  const auto init = phi_init(p, nu_max);
  if (x == 0.0) {
    for (int nu = 0; nu <= nu_max; ++nu) {
      st.values[nu] = init[2 * nu];
      st.derivatives[nu] = init[2 * nu + 1];
    }
    return st;
  }
  const CubicSpline q = potential_spline(p);
  const int n_steps = refine * (p.grid_size() - 1);
  const QSamples qs = sample_potential(q, x, n_steps);
  const auto rec = integrate_chain(qs, lambda, nu_max, init, n_steps);
  const auto& y = rec.back();
  for (int nu = 0; nu <= nu_max; ++nu) {
    st.values[nu] = y[2 * nu];
    st.derivatives[nu] = y[2 * nu + 1];
  }
  return st;
}

Complex characteristic(const BoundaryProblem& p, Complex lambda, int refine) {
  return characteristic_derivatives(p, lambda, 0, refine)[0];
}

std::vector<Complex> characteristic_derivatives(const BoundaryProblem& p, Complex lambda,
                                                int nu_max, int refine) {
  const auto traces = integrate_phi(p, lambda, nu_max, refine);
  std::vector<Complex> out(nu_max + 1);
  double fact = 1.0;
  for (int nu = 0; nu <= nu_max; ++nu) {
    if (nu > 0) fact *= nu;
    const Complex v = traces[nu].values.back();
    const Complex d = traces[nu].derivatives.back();
    // traces are normalized by 1/nu!; report plain derivatives
    out[nu] = fact * (p.kind == BcKind::Robin ? d + p.H * v : v);
  }
  return out;
}

namespace {

// Cosine- and sine-type basis solutions c(0)=1, c'(0)=0 and s(0)=0, s'(0)=1.
struct Basis {
  std::vector<Complex> c, cp, s, sp;
};

Basis integrate_basis(const BoundaryProblem& p, Complex lambda, int refine) {
  const CubicSpline q = potential_spline(p);
  const QSamples qs = sample_potential(q, kPi, refine * (p.grid_size() - 1));
  const auto rc = integrate_chain(qs, lambda, 0, {Complex(1.0), Complex(0.0)}, refine);
  const auto rs = integrate_chain(qs, lambda, 0, {Complex(0.0), Complex(1.0)}, refine);
  Basis b;
  const int n = static_cast<int>(rc.size());
  b.c.resize(n); b.cp.resize(n); b.s.resize(n); b.sp.resize(n);
  for (int i = 0; i < n; ++i) {
    b.c[i] = rc[i][0]; b.cp[i] = rc[i][1];
    b.s[i] = rs[i][0]; b.sp[i] = rs[i][1];
  }
  return b;
}

}  // namespace

WeylTrace integrate_weyl(const BoundaryProblem& p, Complex lambda, int refine) {
  p.validate();
  const Basis b = integrate_basis(p, lambda, refine);
  const int n = static_cast<int>(b.c.size());
  const double scale = std::max({1.0, std::abs(b.c.back()), std::abs(b.cp.back()),
                                 std::abs(b.s.back()), std::abs(b.sp.back())});

  WeylTrace w;
  w.lambda = lambda;
  w.values.resize(n);
  w.derivatives.resize(n);

  if (p.kind == BcKind::Robin) {
    // phi = c + h s;  Delta = phi'(pi) + H phi(pi);  M = -V(s)/Delta;  Phi = s + M phi.
    const Complex Vs = b.sp.back() + p.H * b.s.back();
    const Complex delta = (b.cp.back() + p.h * b.sp.back()) + p.H * (b.c.back() + p.h * b.s.back());
    require(std::abs(delta) > 1e-8 * scale, Reason::NearEigenvalue,
            "lambda is too close to an eigenvalue for the Weyl solution");
    const Complex m = -Vs / delta;
    for (int i = 0; i < n; ++i) {
      w.values[i] = b.s[i] + m * (b.c[i] + p.h * b.s[i]);
      w.derivatives[i] = b.sp[i] + m * (b.cp[i] + p.h * b.sp[i]);
    }
    w.m_value = m;  // = Phi(0, lambda)
  } else {
    // Delta = s(pi);  M = -c(pi)/Delta;  Phi = c + M s, Phi(0)=1, Phi(pi)=0.
    const Complex delta = b.s.back();
    require(std::abs(delta) > 1e-8 * scale, Reason::NearEigenvalue,
            "lambda is too close to an eigenvalue for the Weyl solution");
    const Complex m = -b.c.back() / delta;
    for (int i = 0; i < n; ++i) {
      w.values[i] = b.c[i] + m * b.s[i];
      w.derivatives[i] = b.cp[i] + m * b.sp[i];
    }
    w.m_value = m;  // = Phi'(0, lambda)
  }
  return w;
}

Complex weyl_m(const BoundaryProblem& p, Complex lambda, int refine) {
  return integrate_weyl(p, lambda, refine).m_value;
}

double merge_threshold(Complex lambda) { return 1e-4 * (1.0 + std::abs(lambda)); }

std::vector<Complex> cumulative_product_integral(const std::vector<Complex>& f,
                                                 const std::vector<Complex>& fp,
                                                 const std::vector<Complex>& g,
                                                 const std::vector<Complex>& gp,
                                                 double dx) {
  const size_t n = f.size();
  std::vector<Complex> cum(n, Complex(0.0, 0.0));
  for (size_t i = 0; i + 1 < n; ++i) {
    const Complex p0 = f[i] * g[i];
    const Complex p1 = f[i + 1] * g[i + 1];
    const Complex d0 = fp[i] * g[i] + f[i] * gp[i];
    const Complex d1 = fp[i + 1] * g[i + 1] + f[i + 1] * gp[i + 1];
    cum[i + 1] = cum[i] + 0.5 * dx * (p0 + p1) + dx * dx / 12.0 * (d0 - d1);
  }
  return cum;
}

Complex kernel_D(const BoundaryProblem& p, double x, Complex lambda, Complex xi,
                 int refine) {
  require(x >= 0.0 && x <= kPi, Reason::InvalidArgument, "x must lie in [0, pi]");
  if (std::abs(lambda - xi) > merge_threshold(lambda)) {
    const PointState a = phi_at(p, lambda, x, 0, refine);
    const PointState b = phi_at(p, xi, x, 0, refine);
    return (a.values[0] * b.derivatives[0] - a.derivatives[0] * b.values[0]) / (lambda - xi);
  }
  if (x == 0.0) return Complex(0.0, 0.0);
  const CubicSpline q = potential_spline(p);
  const int n_steps = refine * (p.grid_size() - 1);
  const QSamples qs = sample_potential(q, x, n_steps);
  std::vector<Complex> init(2, Complex(0.0, 0.0));
  if (p.kind == BcKind::Robin) { init[0] = 1.0; init[1] = p.h; }
  else { init[0] = 0.0; init[1] = 1.0; }
  const auto ra = integrate_chain(qs, lambda, 0, init, 1);
  const auto rb = integrate_chain(qs, xi, 0, init, 1);
  const int n = static_cast<int>(ra.size());
  std::vector<Complex> fa(n), fap(n), fb(n), fbp(n);
  for (int i = 0; i < n; ++i) {
    fa[i] = ra[i][0]; fap[i] = ra[i][1];
    fb[i] = rb[i][0]; fbp[i] = rb[i][1];
  }
  return cumulative_product_integral(fa, fap, fb, fbp, qs.step).back();
}

Complex simpson(const std::vector<Complex>& f, double dx) {
  const int n = static_cast<int>(f.size()) - 1;  // intervals
  require(n >= 2, Reason::InvalidArgument, "Simpson needs at least three samples");
  Complex acc(0.0, 0.0);
  int even_part = n;
  if (n % 2 != 0) even_part = n - 3;  // close with a 3/8 block
  for (int i = 0; i + 2 <= even_part; i += 2)
    acc += dx / 3.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
  if (n % 2 != 0) {
    const int i = even_part;
    acc += 3.0 * dx / 8.0 * (f[i] + 3.0 * f[i + 1] + 3.0 * f[i + 2] + f[i + 3]);
  }
  return acc;
}

}  // namespace slmap
