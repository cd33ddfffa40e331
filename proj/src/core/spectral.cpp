#include "spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace slmap {

int duality_sign(BcKind kind) { return kind == BcKind::Robin ? 1 : -1; }

namespace {

template <typename T>
int multiplicity_impl(const T& s, int n_start) {
  int m = 0;
  for (int i = 0; i < s.count(); ++i)
    if (s.block_start[i] == n_start) ++m;
  require(m > 0, Reason::InvalidArgument, "block start not present in spectrum");
  return m;
}

template <typename T>
std::vector<int> block_starts_impl(const T& s, int n_max) {
  std::vector<int> out;
  for (int i = 0; i < s.count(); ++i) {
    const int n = s.first_index + i;
    if (n > n_max) break;
    if (s.block_start[i] == n) out.push_back(n);
  }
  return out;
}

}  // namespace

int Spectrum::multiplicity(int n_start) const { return multiplicity_impl(*this, n_start); }
std::vector<int> Spectrum::block_starts() const {
  return block_starts_impl(*this, last_index());
}
std::vector<int> Spectrum::block_starts_upto(int n_max) const {
  return block_starts_impl(*this, n_max);
}

int SpectralData::multiplicity(int n_start) const { return multiplicity_impl(*this, n_start); }
std::vector<int> SpectralData::block_starts_upto(int n_max) const {
  return block_starts_impl(*this, n_max);
}

void SpectralData::validate() const {
  require(lambdas.size() == weyl.size() && lambdas.size() == block_start.size(),
          Reason::InvalidArgument, "spectral data arrays disagree in length");
  for (int i = 0; i < count(); ++i) {
    const int n = first_index + i;
    require(block_start[i] <= n && block_start[i] >= first_index,
            Reason::BlockStructure, "block start must not exceed the entry index");
    if (i > 0 && block_start[i] == block_start[i - 1])
      require(lambdas[i] == lambdas[i - 1], Reason::BlockStructure,
              "entries of one block must carry equal eigenvalues");
  }
}

SpectralData GeneralizedSpectralData::data_view() const {
  SpectralData d;
  d.kind = spectrum.kind;
  d.first_index = spectrum.first_index;
  d.lambdas = spectrum.eigenvalues;
  d.weyl = weyl_coeffs;
  d.block_start = spectrum.block_start;
  d.N = spectrum.N;
  d.r = spectrum.r;
  return d;
}

int winding_number(const BoundaryProblem& p, Complex center, double radius,
                   int refine, int initial_samples) {
  int m = initial_samples;
  for (int attempt = 0; attempt < 8; ++attempt) {
    std::vector<Complex> vals(m);
    bool ok = true;
    for (int j = 0; j < m; ++j) {
      const double th = 2.0 * kPi * j / m;
      vals[j] = characteristic(p, center + radius * Complex(std::cos(th), std::sin(th)),
                               refine);
      if (vals[j] == Complex(0.0, 0.0)) { ok = false; break; }
    }
    if (ok) {
      double total = 0.0;
      double max_inc = 0.0;
      for (int j = 0; j < m; ++j) {
        const double inc = std::arg(vals[(j + 1) % m] / vals[j]);
        max_inc = std::max(max_inc, std::abs(inc));
        total += inc;
      }
      if (max_inc < 0.5 * kPi) {
        const double w = total / (2.0 * kPi);
        const long rounded = std::lround(w);
        require(std::abs(w - static_cast<double>(rounded)) < 0.2, Reason::RootCountMismatch,
                "winding number did not converge to an integer");
        return static_cast<int>(rounded);
      }
    }
    m *= 2;
  }
  fail(Reason::RootCountMismatch, "winding sampling failed to resolve the argument");
}

namespace {

struct CharAt {
  const BoundaryProblem& p;
  int refine;
  // Delta and Delta' at lambda.
  std::pair<Complex, Complex> operator()(Complex lambda) const {
    const auto d = characteristic_derivatives(p, lambda, 1, refine);
    return {d[0], d[1]};
  }
};

// Newton iteration on the characteristic function; accepts slow (linear)
// convergence near multiple roots, the cluster pass sorts those out.
std::optional<Complex> newton_root(const CharAt& f, Complex lambda0, int max_iter) {
  Complex la = lambda0;
  for (int it = 0; it < max_iter; ++it) {
    const auto [v, dv] = f(la);
    if (!is_finite(v) || !is_finite(dv)) return std::nullopt;
    if (std::abs(dv) == 0.0) return std::nullopt;
    const Complex step = v / dv;
    la -= step;
    if (!is_finite(la)) return std::nullopt;
    if (std::abs(step) <= 1e-13 * (1.0 + std::abs(la))) return la;
  }
  // accept stalled-but-close iterates (multiple roots converge linearly)
  const auto [v, dv] = f(la);
  if (is_finite(v) && std::abs(dv) > 0.0 && std::abs(v / dv) <= 1e-7 * (1.0 + std::abs(la)))
    return la;
  return std::nullopt;
}

struct Cluster {
  std::vector<Complex> members;
  Complex center{};
  double diameter = 0.0;
  int mult = 0;
};

double cluster_tol_at(double tol, Complex z) { return tol * std::max(1.0, std::abs(z)); }

}  // namespace

Spectrum find_eigenvalues(const BoundaryProblem& p, int count, const ForwardOptions& opts) {
  p.validate();
  require(count >= 1, Reason::InvalidArgument, "count must be positive");
  const int first = p.kind == BcKind::Robin ? 0 : 1;
  const CharAt f{p, opts.refine};

  // asymptotic centre of the spectrum shift, used as an extra seed offset
  Complex qmean(0.0, 0.0);
  for (Complex v : p.q) qmean += v;
  qmean /= static_cast<double>(p.q.size());
  const Complex shift =
      qmean + (p.kind == BcKind::Robin ? 2.0 / kPi * (p.h + p.H) : Complex(0.0, 0.0));

  std::vector<Complex> roots;
  for (int n = first; n <= first + count + 2; ++n) {
    const double nd = static_cast<double>(n);
    const std::vector<Complex> rho_seeds = {
        Complex(nd, 0.0),
        Complex(nd + 0.3, 0.3), Complex(nd + 0.3, -0.3),
        Complex(nd - 0.3, 0.3), Complex(nd - 0.3, -0.3)};
    bool any = false;
    for (Complex rs : rho_seeds) {
      if (auto root = newton_root(f, rs * rs, opts.newton_max_iter)) {
        roots.push_back(*root);
        any = true;
      }
    }
    if (!any) {
      if (auto root = newton_root(f, Complex(nd * nd, 0.0) + shift, opts.newton_max_iter))
        roots.push_back(*root);
      else
        fail(Reason::NewtonDivergence,
             "no seed converged for index " + std::to_string(n));
    }
  }

  // cluster converged roots
  std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
    return std::arg(a) < std::arg(b);
  });
  std::vector<Cluster> clusters;
  for (Complex z : roots) {
    bool placed = false;
    for (auto& c : clusters) {
      if (std::abs(z - c.center) <= cluster_tol_at(opts.cluster_tol, c.center)) {
        c.members.push_back(z);
        Complex mean(0.0, 0.0);
        for (Complex w : c.members) mean += w;
        c.center = mean / static_cast<double>(c.members.size());
        placed = true;
        break;
      }
    }
    if (!placed) clusters.push_back({{z}, z, 0.0, 0});
  }
  for (auto& c : clusters) {
    for (Complex a : c.members)
      for (Complex b : c.members) c.diameter = std::max(c.diameter, std::abs(a - b));
  }

  // multiplicity by winding number on an isolating circle
  for (size_t i = 0; i < clusters.size(); ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < clusters.size(); ++j)
      if (j != i) nearest = std::min(nearest, std::abs(clusters[i].center - clusters[j].center));
    double rad = 10.0 * clusters[i].diameter + 1e-6;
    if (std::isfinite(nearest)) rad = std::min(rad, 0.45 * nearest);
    rad = std::max(rad, 1e-8);
    int w = winding_number(p, clusters[i].center, rad, opts.refine, 64);
    if (w == 0) w = winding_number(p, clusters[i].center, 10.0 * rad, opts.refine, 128);
    require(w >= 1, Reason::RootCountMismatch, "cluster without enclosed zero");
    clusters[i].mult = w;
    if (w > 1) {
      // polish the cluster centre on the simple zero of the (m-1)-th
      // derivative; plain multiplicity-aware Newton is unstable at the
      // rounding floor of the characteristic function
      Complex la = clusters[i].center;
      for (int it = 0; it < 30; ++it) {
        const auto d = characteristic_derivatives(p, la, w, opts.refine);
        if (std::abs(d[w]) == 0.0) break;
        const Complex step = d[w - 1] / d[w];
        la -= step;
        if (!is_finite(la)) break;
        if (std::abs(step) <= 1e-14 * (1.0 + std::abs(la))) break;
      }
      if (is_finite(la)) clusters[i].center = la;
    }
  }

  std::sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
    if (std::abs(a.center) != std::abs(b.center)) return std::abs(a.center) < std::abs(b.center);
    return std::arg(a.center) < std::arg(b.center);
  });

  // choose the cut after `count` entries at a strict modulus increase
  std::vector<int> cum(clusters.size() + 1, 0);
  for (size_t i = 0; i < clusters.size(); ++i)
    cum[i + 1] = cum[i] + clusters[i].mult;
  size_t keep = 0;
  for (size_t i = 0; i < clusters.size(); ++i) {
    if (cum[i + 1] >= count && i + 1 < clusters.size() &&
        std::abs(clusters[i + 1].center) - std::abs(clusters[i].center) > 1e-8) {
      keep = i + 1;
      break;
    }
  }
  require(keep > 0, Reason::RootCountMismatch,
          "could not separate the requested number of eigenvalues by modulus");
  const int kept_entries = cum[keep];

  // census over the enclosing circle
  const double census_r =
      0.5 * (std::abs(clusters[keep - 1].center) + std::abs(clusters[keep].center));
  const int census = winding_number(p, Complex(0.0, 0.0), census_r, opts.refine,
                                    std::max(512, 16 * kept_entries));
  require(census == kept_entries, Reason::RootCountMismatch,
          "winding census found " + std::to_string(census) + " zeros, located " +
              std::to_string(kept_entries));

  Spectrum spec;
  spec.kind = p.kind;
  spec.first_index = first;
  for (size_t i = 0; i < keep; ++i) {
    const int start = first + static_cast<int>(spec.eigenvalues.size());
    for (int k = 0; k < clusters[i].mult; ++k) {
      spec.eigenvalues.push_back(clusters[i].center);
      spec.block_start.push_back(start);
    }
  }

  // stabilization index N and contour radius
  int n_min = first;
  for (int s : spec.block_starts())
    if (spec.multiplicity(s) > 1) n_min = std::max(n_min, s + spec.multiplicity(s) - 1);
  int N = -1;
  for (int n = n_min; n < spec.last_index(); ++n) {
    if (std::abs(spec.lambda(n + 1)) - std::abs(spec.lambda(n)) > 1e-8) {
      N = n;
      break;
    }
  }
  require(N >= 0, Reason::DegenerateSpectrum,
          "no stabilization index within the computed range");
  spec.N = N;
  spec.r = 0.5 * (std::abs(spec.lambda(N)) + std::abs(spec.lambda(N + 1)));

  double c_asym = 0.0;
  for (int n = first; n <= spec.last_index(); ++n) {
    const double dev = std::abs(rho_branch(spec.lambda(n)) - static_cast<double>(n));
    c_asym = std::max(c_asym, dev * std::max(1.0, static_cast<double>(n)));
  }
  spec.c_asym = c_asym;
  return spec;
}

std::vector<Complex> compute_alphas(const BoundaryProblem& p, const Spectrum& spec,
                                    const ForwardOptions& opts) {
  std::vector<Complex> alphas(spec.count());
  const double dx = p.dx();
  for (int s : spec.block_starts()) {
    const int m = spec.multiplicity(s);
    const auto traces = integrate_phi(p, spec.lambda(s), m - 1, opts.refine);
    const int g = p.grid_size();
    std::vector<Complex> integrand(g);
    for (int nu = 0; nu < m; ++nu) {
      for (int i = 0; i < g; ++i)
        integrand[i] = traces[nu].values[i] * traces[m - 1].values[i];
      alphas[spec.pos(s) + nu] = simpson(integrand, dx);
    }
    require(std::abs(alphas[spec.pos(s)]) >= 1e-10, Reason::DegenerateWeight,
            "weight number alpha_n vanishes at block " + std::to_string(s));
  }
  return alphas;
}

std::vector<Complex> alphas_to_weyl_coeffs(const std::vector<Complex>& alphas,
                                           const Spectrum& spec) {
  require(static_cast<int>(alphas.size()) == spec.count(), Reason::InvalidArgument,
          "alphas length mismatch");
  const double sign = duality_sign(spec.kind);
  std::vector<Complex> M(spec.count());
  for (int s : spec.block_starts()) {
    const int m = spec.multiplicity(s);
    const int b = spec.pos(s);
    require(std::abs(alphas[b]) >= 1e-10, Reason::DegenerateWeight,
            "alpha_n too small to solve the triangular system at block " + std::to_string(s));
    M[b + m - 1] = sign / alphas[b];
    for (int nu = 1; nu < m; ++nu) {
      Complex acc(0.0, 0.0);
      for (int k = 0; k < nu; ++k) acc += alphas[b + nu - k] * M[b + m - k - 1];
      M[b + m - 1 - nu] = -acc / alphas[b];
    }
  }
  return M;
}

std::vector<Complex> weyl_coeffs_to_alphas(const std::vector<Complex>& weyl,
                                           const Spectrum& spec) {
  require(static_cast<int>(weyl.size()) == spec.count(), Reason::InvalidArgument,
          "weyl coefficients length mismatch");
  const double sign = duality_sign(spec.kind);
  std::vector<Complex> alphas(spec.count());
  for (int s : spec.block_starts()) {
    const int m = spec.multiplicity(s);
    const int b = spec.pos(s);
    require(std::abs(weyl[b + m - 1]) >= 1e-13, Reason::DegenerateCoefficient,
            "leading Weyl coefficient vanishes at block " + std::to_string(s));
    alphas[b] = sign / weyl[b + m - 1];
    for (int nu = 1; nu < m; ++nu) {
      Complex acc(0.0, 0.0);
      for (int k = 1; k <= nu; ++k) acc += alphas[b + nu - k] * weyl[b + m - 1 - k];
      alphas[b + nu] = -acc / weyl[b + m - 1];
    }
  }
  return alphas;
}

std::vector<Complex> residues_of_weyl(const BoundaryProblem& p, const Spectrum& spec,
                                      int n_start, const ForwardOptions& opts) {
  const int m = spec.multiplicity(n_start);
  const Complex la0 = spec.lambda(n_start);
  double min_dist = std::numeric_limits<double>::infinity();
  for (int i = 0; i < spec.count(); ++i)
    if (spec.eigenvalues[i] != la0)
      min_dist = std::min(min_dist, std::abs(spec.eigenvalues[i] - la0));
  require(std::isfinite(min_dist) && min_dist > 1e-6, Reason::IsolationFailure,
          "no isolating circle around eigenvalue block " + std::to_string(n_start));
  const double rad = 0.5 * min_dist;

  const int nodes = opts.residue_nodes;
  std::vector<Complex> mvals(nodes), e(nodes);
  for (int j = 0; j < nodes; ++j) {
    const double th = 2.0 * kPi * j / nodes;
    e[j] = Complex(std::cos(th), std::sin(th));
    mvals[j] = weyl_m(p, la0 + rad * e[j], opts.refine);
  }
  std::vector<Complex> out(m);
  for (int nu = 0; nu < m; ++nu) {
    Complex acc(0.0, 0.0);
    for (int j = 0; j < nodes; ++j)
      acc += std::pow(rad * e[j], nu) * mvals[j] * e[j];
    out[nu] = acc * rad / static_cast<double>(nodes);
  }
  return out;
}

GeneralizedSpectralData full_gsd(const BoundaryProblem& p, int count,
                                 const ForwardOptions& opts) {
  GeneralizedSpectralData g;
  g.spectrum = find_eigenvalues(p, count, opts);
  g.alphas = compute_alphas(p, g.spectrum, opts);
  g.weyl_coeffs = alphas_to_weyl_coeffs(g.alphas, g.spectrum);

  if (opts.cross_validate) {
    const int n_hi = g.spectrum.first_index + std::min(count, g.spectrum.N + 5) - 1;
    for (int s : g.spectrum.block_starts_upto(n_hi)) {
      const auto res = residues_of_weyl(p, g.spectrum, s, opts);
      for (size_t nu = 0; nu < res.size(); ++nu) {
        const Complex a = g.weyl_coeffs[g.spectrum.pos(s) + static_cast<int>(nu)];
        const Complex b = res[nu];
        const double scale = std::max({1.0, std::abs(a), std::abs(b)});
        require(std::abs(a - b) <= opts.cross_validation_tol * scale,
                Reason::CrossValidationFailure,
                "weight-number and residue routes disagree at index " +
                    std::to_string(s + static_cast<int>(nu)));
      }
    }
  }
  return g;
}

}  // namespace slmap
