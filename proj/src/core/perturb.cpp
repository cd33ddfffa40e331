#include "perturb.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace slmap {

void CheckReport::add(const std::string& id, double measured, double bound) {
  const bool ok = measured <= bound;
  records.push_back({id, measured, bound, ok});
  pass = pass && ok;
}

double xi_weight(BcKind kind, int n, Complex la_model, Complex la_target,
                 Complex m_model, Complex m_target) {
  const double drho = std::abs(rho_branch(la_model) - rho_branch(la_target));
  double dm = std::abs(m_model - m_target);
  if (kind == BcKind::Dirichlet) dm /= static_cast<double>(n) * static_cast<double>(n);
  return drho + dm;
}

namespace {

void check_compatible(const SpectralData& model, const SpectralData& target) {
  require(model.kind == target.kind && model.first_index == target.first_index,
          Reason::InvalidArgument, "model and target data have different shapes");
  require(model.count() == target.count(), Reason::InvalidArgument,
          "target data must cover the same index range as the model");
}

std::vector<Complex> contour_points(double r, int nodes) {
  std::vector<Complex> pts(nodes);
  for (int j = 0; j < nodes; ++j) {
    const double th = 2.0 * kPi * j / nodes;
    pts[j] = r * Complex(std::cos(th), std::sin(th));
  }
  return pts;
}

}  // namespace

double eta_weight(int n) {
  double acc = 0.0;
  const int k_max = std::max(4 * n, 4000);
  for (int k = 1; k <= k_max; ++k) {
    const double a = static_cast<double>(k);
    const double b = static_cast<double>(std::abs(n - k)) + 1.0;
    acc += 1.0 / (a * a * b * b);
  }
  return std::sqrt(acc);
}

PerturbationMetrics compute_metrics(const SpectralData& model, const SpectralData& target,
                                    int N, double r, int contour_nodes) {
  check_compatible(model, target);
  PerturbationMetrics m;
  m.first_index = model.first_index;
  m.xi.resize(model.count());
  m.chi.resize(model.count());
  double tail2 = 0.0;
  for (int i = 0; i < model.count(); ++i) {
    const int n = model.first_index + i;
    m.xi[i] = xi_weight(model.kind, n, model.lambdas[i], target.lambdas[i],
                        model.weyl[i], target.weyl[i]);
    m.chi[i] = m.xi[i] != 0.0 ? 1.0 / m.xi[i] : 0.0;
    if (n > N) tail2 += static_cast<double>(n) * static_cast<double>(n) * m.xi[i] * m.xi[i];
    else
      m.first_block_shift =
          std::max(m.first_block_shift, std::abs(model.lambdas[i] - target.lambdas[i]));
  }
  m.tail_norm = std::sqrt(tail2);

  const PartialFraction hat = hat_MN(build_MN(model, N), build_MN(target, N));
  double sup = 0.0;
  for (Complex z : contour_points(r, contour_nodes))
    sup = std::max(sup, std::abs(hat.eval(z)));
  m.contour_sup = sup;
  return m;
}

Theorem1Result check_theorem1(const SpectralData& model, const SpectralData& target,
                              int N, double r, double delta, int contour_nodes) {
  Theorem1Result res;
  res.metrics = compute_metrics(model, target, N, r, contour_nodes);

  for (int i = 0; i < target.count(); ++i) {
    const int n = target.first_index + i;
    const double mod = std::abs(target.lambdas[i]);
    require(std::abs(mod - r) > 1e-9, Reason::PoleOnContour,
            "target eigenvalue " + std::to_string(n) + " lies on the contour");
    if (n <= N)
      res.report.add("theorem1.containment.inside.n" + std::to_string(n), mod, r);
    else
      res.report.add("theorem1.containment.outside.n" + std::to_string(n), r, mod);
  }
  res.report.add("theorem1.contour_sup", res.metrics.contour_sup, delta);
  res.report.add("theorem1.tail_norm", res.metrics.tail_norm, delta);
  return res;
}

CheckReport check_theorem2(const SpectralData& model, const SpectralData& target,
                           int N, double delta) {
  check_compatible(model, target);
  CheckReport rep;

  // pairwise distinctness of the target eigenvalues
  for (int i = 0; i < target.count(); ++i)
    for (int j = i + 1; j < target.count(); ++j)
      require(std::abs(target.lambdas[i] - target.lambdas[j]) >
                  1e-12 * (1.0 + std::abs(target.lambdas[i])),
              Reason::DuplicateTargetEigenvalue,
              "target eigenvalues " + std::to_string(target.first_index + i) + " and " +
                  std::to_string(target.first_index + j) + " coincide");

  for (int k : model.block_starts_upto(N)) {
    const int m = model.multiplicity(k);
    const int b = model.pos(k);
    const Complex la0 = model.lambdas[b];
    const std::string blk = "theorem2.block" + std::to_string(k);

    for (int s = 0; s <= 2 * (m - 1); ++s) {
      Complex acc(0.0, 0.0);
      for (int j = 0; j < m; ++j)
        acc += std::pow(target.lambdas[b + j] - la0, s) * target.weyl[b + j];
      if (s <= m - 1) acc -= model.weyl[b + s];
      rep.add(blk + ".moment_s" + std::to_string(s), std::abs(acc), delta);
    }
    const double la_bound = std::pow(delta, 1.0 / m);
    const double m_bound = std::pow(delta, (1.0 - m) / static_cast<double>(m));
    for (int j = 0; j < m; ++j) {
      rep.add(blk + ".eig_shift_j" + std::to_string(j),
              std::abs(target.lambdas[b + j] - la0), la_bound);
      rep.add(blk + ".coeff_size_j" + std::to_string(j), std::abs(target.weyl[b + j]),
              m_bound);
    }
  }

  // weighted tail norm, shared with the contour-form conditions
  double tail2 = 0.0;
  for (int i = 0; i < model.count(); ++i) {
    const int n = model.first_index + i;
    if (n <= N) continue;
    const double xi = xi_weight(model.kind, n, model.lambdas[i], target.lambdas[i],
                                model.weyl[i], target.weyl[i]);
    tail2 += static_cast<double>(n) * static_cast<double>(n) * xi * xi;
  }
  rep.add("theorem2.tail_norm", std::sqrt(tail2), delta);
  return rep;
}

SpectralData split_double(const SpectralData& model, int k, double delta) {
  model.validate();
  require(delta > 0.0, Reason::InvalidArgument, "delta must be positive");
  require(model.multiplicity(k) == 2, Reason::InvalidArgument,
          "split_double needs a block of multiplicity 2");
  const int b = model.pos(k);
  const Complex M0 = model.weyl[b];
  const Complex M1 = model.weyl[b + 1];
  require(std::abs(M1) > 0.0, Reason::ZeroLeadingCoefficient,
          "leading coefficient M_{k+1} vanishes");
  const Complex a = M1 / 2.0;
  const Complex c = M0 / a;
  const double sq = std::sqrt(delta);

  SpectralData out = model;
  out.weyl[b] = a / sq + M0;
  out.weyl[b + 1] = -a / sq;
  out.lambdas[b] = model.lambdas[b] + sq;
  out.lambdas[b + 1] = model.lambdas[b] - sq + c * delta;
  out.block_start[b] = k;
  out.block_start[b + 1] = k + 1;
  return out;
}

SpectralData perturb_simple_tail(const SpectralData& model, double delta, uint64_t seed,
                                 bool real_only) {
  model.validate();
  require(delta >= 0.0, Reason::InvalidArgument, "delta must be nonnegative");
  SpectralData out = model;
  if (delta == 0.0) return out;

  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto draw = [&]() -> Complex {
    if (real_only) return Complex(unit(gen), 0.0);
    // deterministic rejection sampling on the unit disc
    for (;;) {
      const double re = unit(gen);
      const double im = unit(gen);
      if (re * re + im * im <= 1.0) return Complex(re, im);
    }
  };

  for (int i = 0; i < model.count(); ++i) {
    const int n = model.first_index + i;
    if (n <= model.N) continue;
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    const Complex u = draw();
    const Complex v = draw();
    const Complex rho = rho_branch(model.lambdas[i]) + delta * u / (2.0 * n2);
    out.lambdas[i] = rho * rho;
    out.weyl[i] = model.weyl[i] + delta * v / (2.0 * n2);
  }
  return out;
}

}  // namespace slmap
