// slmap command-line front end: forward/inverse/roundtrip/sweep experiments
// over the C API of the solver library.

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "config.hpp"
#include "slmap/slmap.h"

namespace fs = std::filesystem;
using slmap_cli::Config;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitHypothesis = 3;
constexpr int kExitNumerical = 4;

struct CliError : std::runtime_error {
  int code;
  CliError(int c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

int status_to_exit(slmap_status s) {
  switch (s) {
    case SLMAP_OK: return kExitOk;
    case SLMAP_ERR_CONFIG: return kExitConfig;
    case SLMAP_ERR_HYPOTHESIS: return kExitHypothesis;
    default: return kExitNumerical;
  }
}

void check(slmap_status s, const std::string& what) {
  if (s != SLMAP_OK)
    throw CliError(status_to_exit(s), what + ": " + slmap_last_error());
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

using ProblemPtr = std::unique_ptr<slmap_problem, decltype(&slmap_problem_free)>;
using GsdPtr = std::unique_ptr<slmap_gsd, decltype(&slmap_gsd_free)>;
using ResultPtr = std::unique_ptr<slmap_result, decltype(&slmap_result_free)>;

ProblemPtr wrap(slmap_problem* p) { return ProblemPtr(p, &slmap_problem_free); }
GsdPtr wrap(slmap_gsd* g) { return GsdPtr(g, &slmap_gsd_free); }
ResultPtr wrap(slmap_result* r) { return ResultPtr(r, &slmap_result_free); }

std::vector<std::complex<double>> read_potential_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw CliError(kExitConfig, "cannot open potential file '" + path + "'");
  std::vector<std::complex<double>> q;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    double re = 0.0, im = 0.0;
    ss >> re >> im;
    if (ss.fail()) throw CliError(kExitConfig, "malformed potential record: " + line);
    q.emplace_back(re, im);
  }
  return q;
}

ProblemPtr make_model(const Config& cfg) {
  const long grid = cfg.get_int("model.grid_size", 257);
  slmap_problem* p = nullptr;
  if (cfg.has("model.preset")) {
    check(slmap_problem_preset(cfg.require("model.preset").c_str(),
                               static_cast<size_t>(grid), &p),
          "preset");
  } else if (cfg.has("model.potential_file")) {
    const auto q = read_potential_file(cfg.require("model.potential_file"));
    std::vector<slmap_complex> qc(q.size());
    for (size_t i = 0; i < q.size(); ++i) qc[i] = {q[i].real(), q[i].imag()};
    const auto h = cfg.get_pair("model.h", {0.0, 0.0});
    const auto H = cfg.get_pair("model.H", {0.0, 0.0});
    const std::string bc = cfg.get("model.bc", "robin");
    if (bc != "robin" && bc != "dirichlet")
      throw CliError(kExitConfig, "model.bc must be robin or dirichlet");
    check(slmap_problem_create(qc.data(), qc.size(), {h.first, h.second},
                               {H.first, H.second},
                               bc == "robin" ? SLMAP_BC_ROBIN : SLMAP_BC_DIRICHLET, &p),
          "model");
  } else {
    throw CliError(kExitConfig, "config needs model.preset or model.potential_file");
  }
  return wrap(p);
}

slmap_forward_options forward_options(const Config& cfg) {
  slmap_forward_options o;
  slmap_forward_options_default(&o);
  o.eig_count = static_cast<size_t>(cfg.get_int("forward.count", 61));
  o.ode_refine = static_cast<int>(cfg.get_int("forward.refine", 4));
  o.cross_validate = static_cast<int>(cfg.get_int("forward.cross_validate", 1));
  return o;
}

slmap_inverse_options inverse_options(const Config& cfg, bool strict) {
  slmap_inverse_options o;
  slmap_inverse_options_default(&o);
  o.contour_nodes = static_cast<int>(cfg.get_int("discretization.contour_nodes", 256));
  o.trunc_k = static_cast<int>(cfg.get_int("discretization.trunc_k", 60));
  o.ode_refine = static_cast<int>(cfg.get_int("forward.refine", 4));
  o.threads = static_cast<int>(cfg.get_int("discretization.threads", 0));
  o.strict = strict ? 1 : 0;
  o.delta0 = cfg.get_double("check.delta0", 1e-2);
  return o;
}

GsdPtr make_target(const Config& cfg, const GsdPtr& model_gsd, double delta,
                   uint64_t seed) {
  const std::string kind = cfg.get("perturbation.kind", "identity");
  slmap_gsd* t = nullptr;
  if (kind == "identity") {
    check(slmap_perturb_tail(model_gsd.get(), 0.0, seed, 0, &t), "perturbation");
  } else if (kind == "tail") {
    check(slmap_perturb_tail(model_gsd.get(), delta, seed, 0, &t), "perturbation");
  } else if (kind == "tail-real") {
    check(slmap_perturb_tail(model_gsd.get(), delta, seed, 1, &t), "perturbation");
  } else if (kind == "split") {
    const int block = static_cast<int>(
        cfg.get_int("perturbation.split_block", slmap_gsd_first_index(model_gsd.get())));
    check(slmap_split_double(model_gsd.get(), block, delta, &t), "perturbation");
  } else if (kind == "file") {
    const std::string path = cfg.require("perturbation.target_file");
    check(slmap_gsd_read(path.c_str(), &t), "target file");
  } else {
    throw CliError(kExitConfig, "unknown perturbation.kind '" + kind + "'");
  }
  return wrap(t);
}

double grid_l2(const std::vector<std::complex<double>>& f) {
  // composite Simpson of |f|^2 over [0, pi]
  const int n = static_cast<int>(f.size()) - 1;
  const double dx = M_PI / n;
  double acc = 0.0;
  int even_part = n % 2 == 0 ? n : n - 3;
  for (int i = 0; i + 2 <= even_part; i += 2)
    acc += dx / 3.0 *
           (std::norm(f[i]) + 4.0 * std::norm(f[i + 1]) + std::norm(f[i + 2]));
  if (n % 2 != 0) {
    const int i = even_part;
    acc += 3.0 * dx / 8.0 * (std::norm(f[i]) + 3.0 * std::norm(f[i + 1]) +
                             3.0 * std::norm(f[i + 2]) + std::norm(f[i + 3]));
  }
  return std::sqrt(acc);
}

std::vector<std::complex<double>> copy_q(const ProblemPtr& p) {
  std::vector<slmap_complex> buf(slmap_problem_grid_size(p.get()));
  check(slmap_problem_copy_q(p.get(), buf.data(), buf.size()), "copy q");
  std::vector<std::complex<double>> out(buf.size());
  for (size_t i = 0; i < buf.size(); ++i) out[i] = {buf[i].re, buf[i].im};
  return out;
}

std::vector<std::complex<double>> copy_q_tilde(const ResultPtr& r) {
  std::vector<slmap_complex> buf(slmap_result_grid_size(r.get()));
  check(slmap_result_copy_q_tilde(r.get(), buf.data(), buf.size()), "copy q~");
  std::vector<std::complex<double>> out(buf.size());
  for (size_t i = 0; i < buf.size(); ++i) out[i] = {buf[i].re, buf[i].im};
  return out;
}

// max over n <= N+10 of the scaled eigenvalue and coefficient deviations
struct GsdComparison {
  double eig_err = 0.0;
  double weyl_err = 0.0;
};

GsdComparison compare_gsd(const GsdPtr& a, const GsdPtr& b, int n_max) {
  // match entries by eigenvalue proximity: perturbed data need not be
  // modulus-ordered (a split pair lists the larger-modulus value first)
  GsdComparison cmp;
  const size_t count = std::min(slmap_gsd_count(a.get()), slmap_gsd_count(b.get()));
  const int first = slmap_gsd_first_index(a.get());
  std::vector<std::complex<double>> la(count), ma(count), lb(count), mb(count);
  for (size_t i = 0; i < count; ++i) {
    slmap_complex l{}, m{};
    check(slmap_gsd_entry(a.get(), i, &l, &m, nullptr), "gsd entry");
    la[i] = {l.re, l.im};
    ma[i] = {m.re, m.im};
    check(slmap_gsd_entry(b.get(), i, &l, &m, nullptr), "gsd entry");
    lb[i] = {l.re, l.im};
    mb[i] = {m.re, m.im};
  }
  std::vector<bool> used(count, false);
  for (size_t i = 0; i < count; ++i) {
    if (first + static_cast<int>(i) > n_max) break;
    size_t best = count;
    double best_d = 0.0;
    for (size_t j = 0; j < count; ++j) {
      if (used[j]) continue;
      const double d = std::abs(la[j] - lb[i]);
      if (best == count || d < best_d) {
        best = j;
        best_d = d;
      }
    }
    if (best == count) break;
    used[best] = true;
    cmp.eig_err = std::max(cmp.eig_err, best_d / (1.0 + std::abs(lb[i])));
    cmp.weyl_err = std::max(cmp.weyl_err, std::abs(ma[best] - mb[i]) /
                                              std::max(1.0, std::abs(mb[i])));
  }
  return cmp;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out.good()) throw CliError(kExitNumerical, "cannot write '" + path.string() + "'");
  out << text;
}

// manifest: config echo plus every measured constant, no timestamps so reruns
// with one seed are byte-identical
struct Manifest {
  std::map<std::string, std::string> rows;
  void put(const std::string& key, const std::string& value) { rows[key] = value; }
  void put(const std::string& key, double value) { rows[key] = fmt(value); }
  void write(const fs::path& dir) const {
    std::ostringstream out;
    out << "# slmap manifest v1\n";
    out << "version " << slmap_version() << "\n";
    for (const auto& [k, v] : rows) out << k << " = " << v << "\n";
    write_text(dir / "manifest.txt", out.str());
  }
};

void echo_config(const Config& cfg, Manifest& m) {
  for (const auto& [k, v] : cfg.entries()) m.put("config." + k, v);
}

void print_spectrum_summary(const GsdPtr& g) {
  std::cout << "N = " << slmap_gsd_N(g.get())
            << "  r = " << fmt(slmap_gsd_contour_radius(g.get())) << "\n";
  std::cout << "multiplicity table (block start: lambda, m):\n";
  const size_t count = slmap_gsd_count(g.get());
  const int first = slmap_gsd_first_index(g.get());
  size_t i = 0;
  while (i < count) {
    slmap_complex la{};
    int block = 0;
    check(slmap_gsd_entry(g.get(), i, &la, nullptr, &block), "gsd entry");
    size_t m = 1;
    int b2 = block;
    while (i + m < count) {
      check(slmap_gsd_entry(g.get(), i + m, nullptr, nullptr, &b2), "gsd entry");
      if (b2 != block) break;
      ++m;
    }
    std::cout << "  n=" << (first + i) << ": (" << fmt(la.re) << ", " << fmt(la.im)
              << ")  m=" << m << "\n";
    i += m;
  }
}

void write_diag(Manifest& m, const ResultPtr& res, const std::string& prefix) {
  slmap_diagnostics d{};
  check(slmap_result_diagnostics(res.get(), &d), "diagnostics");
  m.put(prefix + ".contour_sup", d.contour_sup);
  m.put(prefix + ".tail_norm", d.tail_norm);
  m.put(prefix + ".first_block_shift", d.first_block_shift);
  m.put(prefix + ".max_op_norm_proxy", d.max_op_norm_proxy);
  m.put(prefix + ".min_rcond", d.min_rcond);
  m.put(prefix + ".max_residual", d.max_residual);
  m.put(prefix + ".hypotheses_pass", d.hypotheses_pass ? "yes" : "no");
}

struct SweepRow {
  double delta = 0.0;
  bool failed = false;
  std::string failure;
  double q_err = 0.0, h_err = 0.0, H_err = 0.0;
  double contour_sup = 0.0, tail_norm = 0.0, proxy = 0.0;
  double rt_eig = 0.0, rt_weyl = 0.0;
  double a_re = 0.0, a_im = 0.0, c_re = 0.0, c_im = 0.0;  // split parameters
};

std::string sweep_csv(const std::vector<SweepRow>& rows, bool split, double slope,
                      bool slope_defined) {
  std::ostringstream out;
  out << "delta,q_l2_err,h_err,H_err,contour_sup,tail_norm,max_op_norm_proxy,"
         "rt_eig_err,rt_weyl_err";
  if (split) out << ",a_re,a_im,c_re,c_im";
  out << ",status\n";
  for (const auto& r : rows) {
    out << fmt(r.delta) << ',';
    if (r.failed) {
      out << ",,,,,,,";
      if (split) out << ",,,,";
      out << ",FAIL:" << r.failure << "\n";
      continue;
    }
    out << fmt(r.q_err) << ',' << fmt(r.h_err) << ',' << fmt(r.H_err) << ','
        << fmt(r.contour_sup) << ',' << fmt(r.tail_norm) << ',' << fmt(r.proxy) << ','
        << fmt(r.rt_eig) << ',' << fmt(r.rt_weyl);
    if (split)
      out << ',' << fmt(r.a_re) << ',' << fmt(r.a_im) << ',' << fmt(r.c_re) << ','
          << fmt(r.c_im);
    out << ",ok\n";
  }
  out << "# slope " << (slope_defined ? fmt(slope) : "undefined") << "\n";
  return out.str();
}

std::string sweep_dat(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "# delta q_l2_err h_err H_err contour_sup tail_norm proxy rt_eig rt_weyl\n";
  for (const auto& r : rows) {
    if (r.failed) continue;
    out << fmt(r.delta) << ' ' << fmt(r.q_err) << ' ' << fmt(r.h_err) << ' '
        << fmt(r.H_err) << ' ' << fmt(r.contour_sup) << ' ' << fmt(r.tail_norm) << ' '
        << fmt(r.proxy) << ' ' << fmt(r.rt_eig) << ' ' << fmt(r.rt_weyl) << "\n";
  }
  return out.str();
}

bool fit_slope(const std::vector<SweepRow>& rows, double* slope) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows)
    if (!r.failed && r.q_err > 0.0) pts.emplace_back(std::log(r.delta), std::log(r.q_err));
  if (pts.size() < 2) return false;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(pts.size());
  *slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return true;
}

struct TaskContext {
  Config cfg;
  fs::path out_dir;
  bool strict = false;
  uint64_t seed = 0;
  Manifest manifest;
};

// forward-solve a reconstructed potential for the round-trip comparison
GsdPtr forward_of_result(const TaskContext& ctx, const ProblemPtr& model,
                         const ResultPtr& res) {
  const auto qt = copy_q_tilde(res);
  std::vector<slmap_complex> qc(qt.size());
  for (size_t i = 0; i < qt.size(); ++i) qc[i] = {qt[i].real(), qt[i].imag()};
  slmap_problem* p2 = nullptr;
  check(slmap_problem_create(qc.data(), qc.size(), slmap_result_h_tilde(res.get()),
                             slmap_result_H_tilde(res.get()),
                             slmap_problem_bc_kind(model.get()), &p2),
        "reconstructed problem");
  auto problem2 = wrap(p2);
  slmap_forward_options fo = forward_options(ctx.cfg);
  fo.eig_count = static_cast<size_t>(
      ctx.cfg.get_int("forward.roundtrip_count",
                      static_cast<long>(std::min<size_t>(fo.eig_count, 16))));
  fo.cross_validate = 0;  // the comparison below is the check
  slmap_gsd* g = nullptr;
  check(slmap_forward(problem2.get(), &fo, &g), "forward of reconstruction");
  return wrap(g);
}

int task_forward(TaskContext& ctx) {
  auto model = make_model(ctx.cfg);
  const auto fo = forward_options(ctx.cfg);
  slmap_gsd* g = nullptr;
  check(slmap_forward(model.get(), &fo, &g), "forward");
  auto gsd = wrap(g);
  print_spectrum_summary(gsd);
  check(slmap_gsd_write(gsd.get(), (ctx.out_dir / "gsd.txt").string().c_str()),
        "write gsd");
  ctx.manifest.put("measured.N", static_cast<double>(slmap_gsd_N(gsd.get())));
  ctx.manifest.put("measured.r", slmap_gsd_contour_radius(gsd.get()));
  ctx.manifest.write(ctx.out_dir);
  return kExitOk;
}

int task_inverse(TaskContext& ctx, bool roundtrip) {
  auto model = make_model(ctx.cfg);
  const auto fo = forward_options(ctx.cfg);
  slmap_gsd* g = nullptr;
  check(slmap_forward(model.get(), &fo, &g), "forward");
  auto model_gsd = wrap(g);

  const double delta = ctx.cfg.get_double("perturbation.delta", 1e-3);
  auto target = make_target(ctx.cfg, model_gsd, delta, ctx.seed);

  slmap_theorem1_report t1{};
  const double delta0 = ctx.cfg.get_double("check.delta0", 1e-2);
  check(slmap_check_theorem1(model_gsd.get(), target.get(), delta0,
                             static_cast<int>(ctx.cfg.get_int(
                                 "discretization.contour_nodes", 256)),
                             &t1),
        "theorem1 check");
  ctx.manifest.put("measured.contour_sup", t1.contour_sup);
  ctx.manifest.put("measured.tail_norm", t1.tail_norm);

  const auto io = inverse_options(ctx.cfg, ctx.strict);
  slmap_result* r = nullptr;
  check(slmap_inverse(model.get(), model_gsd.get(), target.get(), &io, &r), "inverse");
  auto res = wrap(r);
  // result files appear only after the solve went through
  check(slmap_gsd_write(target.get(), (ctx.out_dir / "target.txt").string().c_str()),
        "write target");
  check(slmap_write_check_report(model_gsd.get(), target.get(), delta0, 1,
                                 (ctx.out_dir / "checks.txt").string().c_str()),
        "check report");
  check(slmap_result_write(res.get(), model.get(),
                           (ctx.out_dir / "reconstruction.txt").string().c_str()),
        "write reconstruction");
  write_diag(ctx.manifest, res, "measured");

  const auto q = copy_q(model);
  auto qt = copy_q_tilde(res);
  std::vector<std::complex<double>> diff(q.size());
  for (size_t i = 0; i < q.size(); ++i) diff[i] = qt[i] - q[i];
  ctx.manifest.put("measured.q_l2_err", grid_l2(diff));

  if (roundtrip) {
    auto rt = forward_of_result(ctx, model, res);
    const int n_max = slmap_gsd_N(model_gsd.get()) + 10;
    const auto cmp = compare_gsd(rt, target, n_max);
    ctx.manifest.put("measured.roundtrip_eig_err", cmp.eig_err);
    ctx.manifest.put("measured.roundtrip_weyl_err", cmp.weyl_err);
    std::ostringstream table;
    table << "# roundtrip comparison up to n = " << n_max << "\n";
    table << "# n re(lambda~) im(lambda~) re(lambda^) im(lambda^) re(M~) im(M~) re(M^) "
             "im(M^)\n";
    const size_t count = std::min(slmap_gsd_count(rt.get()), slmap_gsd_count(target.get()));
    const int first = slmap_gsd_first_index(rt.get());
    for (size_t i = 0; i < count && first + static_cast<int>(i) <= n_max; ++i) {
      slmap_complex lt{}, mt{}, lr{}, mr{};
      check(slmap_gsd_entry(target.get(), i, &lt, &mt, nullptr), "entry");
      check(slmap_gsd_entry(rt.get(), i, &lr, &mr, nullptr), "entry");
      table << (first + i) << ' ' << fmt(lt.re) << ' ' << fmt(lt.im) << ' ' << fmt(lr.re)
            << ' ' << fmt(lr.im) << ' ' << fmt(mt.re) << ' ' << fmt(mt.im) << ' '
            << fmt(mr.re) << ' ' << fmt(mr.im) << "\n";
    }
    write_text(ctx.out_dir / "roundtrip.txt", table.str());
    std::cout << "roundtrip: eig err " << fmt(cmp.eig_err) << ", M err "
              << fmt(cmp.weyl_err) << "\n";
  }
  ctx.manifest.write(ctx.out_dir);
  return kExitOk;
}

int task_sweep(TaskContext& ctx, bool split_demo) {
  auto model = make_model(ctx.cfg);
  const auto fo = forward_options(ctx.cfg);
  slmap_gsd* g = nullptr;
  check(slmap_forward(model.get(), &fo, &g), "forward");
  auto model_gsd = wrap(g);

  std::vector<double> deltas = ctx.cfg.get_list("perturbation.delta");
  if (deltas.empty()) throw CliError(kExitConfig, "sweep needs a perturbation.delta list");
  std::sort(deltas.rbegin(), deltas.rend());

  if (split_demo) ctx.cfg.set("perturbation.kind", "split");
  const auto q = copy_q(model);
  const slmap_complex h0 = slmap_problem_h(model.get());
  const slmap_complex H0 = slmap_problem_H(model.get());

  std::vector<SweepRow> rows;
  for (double delta : deltas) {
    SweepRow row;
    row.delta = delta;
    try {
      auto target = make_target(ctx.cfg, model_gsd, delta, ctx.seed);
      if (split_demo) {
        // the split parameters a = M_{k+1}/2, c = M_k/a of the perturbed block
        const int block = static_cast<int>(ctx.cfg.get_int(
            "perturbation.split_block", slmap_gsd_first_index(model_gsd.get())));
        const size_t pos = static_cast<size_t>(block -
                                               slmap_gsd_first_index(model_gsd.get()));
        slmap_complex m0{}, m1{};
        check(slmap_gsd_entry(model_gsd.get(), pos, nullptr, &m0, nullptr), "entry");
        check(slmap_gsd_entry(model_gsd.get(), pos + 1, nullptr, &m1, nullptr), "entry");
        const std::complex<double> M0(m0.re, m0.im), M1(m1.re, m1.im);
        const std::complex<double> a = M1 / 2.0;
        const std::complex<double> c = M0 / a;
        row.a_re = a.real();
        row.a_im = a.imag();
        row.c_re = c.real();
        row.c_im = c.imag();
        slmap_theorem2_report t2{};
        check(slmap_check_theorem2(model_gsd.get(), target.get(), delta, &t2),
              "theorem2 check");
        ctx.manifest.put("measured.theorem2_moment_low.delta" + fmt(delta),
                         t2.worst_moment_low);
      }
      slmap_theorem1_report t1{};
      check(slmap_check_theorem1(model_gsd.get(), target.get(), delta,
                                 static_cast<int>(ctx.cfg.get_int(
                                     "discretization.contour_nodes", 256)),
                                 &t1),
            "theorem1 check");
      row.contour_sup = t1.contour_sup;
      row.tail_norm = t1.tail_norm;

      const auto io = inverse_options(ctx.cfg, ctx.strict);
      slmap_result* r = nullptr;
      check(slmap_inverse(model.get(), model_gsd.get(), target.get(), &io, &r), "inverse");
      auto res = wrap(r);

      const auto qt = copy_q_tilde(res);
      std::vector<std::complex<double>> diff(q.size());
      for (size_t i = 0; i < q.size(); ++i) diff[i] = qt[i] - q[i];
      row.q_err = grid_l2(diff);
      const slmap_complex ht = slmap_result_h_tilde(res.get());
      const slmap_complex Ht = slmap_result_H_tilde(res.get());
      row.h_err = std::hypot(ht.re - h0.re, ht.im - h0.im);
      row.H_err = std::hypot(Ht.re - H0.re, Ht.im - H0.im);
      slmap_diagnostics d{};
      check(slmap_result_diagnostics(res.get(), &d), "diagnostics");
      row.proxy = d.max_op_norm_proxy;

      auto rt = forward_of_result(ctx, model, res);
      const auto cmp = compare_gsd(rt, target, slmap_gsd_N(model_gsd.get()) + 10);
      row.rt_eig = cmp.eig_err;
      row.rt_weyl = cmp.weyl_err;
    } catch (const CliError& e) {
      row.failed = true;
      row.failure = e.what();
      if (ctx.strict) throw;
    }
    rows.push_back(row);
  }

  double slope = 0.0;
  const bool has_slope = fit_slope(rows, &slope);
  write_text(ctx.out_dir / "sweep.csv", sweep_csv(rows, split_demo, slope, has_slope));
  write_text(ctx.out_dir / "sweep.dat", sweep_dat(rows));
  if (has_slope) {
    ctx.manifest.put("measured.slope", slope);
    std::cout << "slope " << fmt(slope) << "\n";
  } else {
    ctx.manifest.put("measured.slope", "undefined");
    std::cout << "slope undefined\n";
  }
  ctx.manifest.write(ctx.out_dir);
  return kExitOk;
}

int task_find_double(TaskContext& ctx) {
  const std::string shape = ctx.cfg.get("find_double.shape", "exp-ix");
  const auto cs = ctx.cfg.get_pair("find_double.c_seed", {2.0, 1.0});
  const auto ls = ctx.cfg.get_pair("find_double.lambda_seed", {1.0, 0.0});
  const long grid = ctx.cfg.get_int("model.grid_size", 257);
  const int scan = static_cast<int>(ctx.cfg.get_int("find_double.scan", 1));

  slmap_problem* p = nullptr;
  slmap_double_certificate cert{};
  check(slmap_find_double(shape.c_str(), {cs.first, cs.second}, {ls.first, ls.second},
                          static_cast<size_t>(grid), scan, &p, &cert),
        "find-double");
  auto problem = wrap(p);

  const auto q = copy_q(problem);
  std::ostringstream pot;
  for (const auto& v : q) pot << fmt(v.real()) << ' ' << fmt(v.imag()) << "\n";
  write_text(ctx.out_dir / "potential.txt", pot.str());

  ctx.manifest.put("certificate.lambda_re", cert.lambda.re);
  ctx.manifest.put("certificate.lambda_im", cert.lambda.im);
  ctx.manifest.put("certificate.c_re", cert.c.re);
  ctx.manifest.put("certificate.c_im", cert.c.im);
  ctx.manifest.put("certificate.abs_char", cert.abs_char);
  ctx.manifest.put("certificate.abs_dchar", cert.abs_dchar);
  ctx.manifest.put("certificate.abs_d2char", cert.abs_d2char);
  ctx.manifest.put("certificate.winding", static_cast<double>(cert.winding));
  std::cout << "double eigenvalue at lambda = (" << fmt(cert.lambda.re) << ", "
            << fmt(cert.lambda.im) << "), c = (" << fmt(cert.c.re) << ", "
            << fmt(cert.c.im) << "), winding " << cert.winding << "\n";

  slmap_forward_options fo = forward_options(ctx.cfg);
  fo.eig_count = static_cast<size_t>(ctx.cfg.get_int("forward.count", 8));
  slmap_gsd* g = nullptr;
  check(slmap_forward(problem.get(), &fo, &g), "forward of the found problem");
  auto gsd = wrap(g);
  print_spectrum_summary(gsd);
  check(slmap_gsd_write(gsd.get(), (ctx.out_dir / "gsd.txt").string().c_str()),
        "write gsd");
  ctx.manifest.write(ctx.out_dir);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slmap: forward/inverse spectral solver experiments"};
  std::string task, config_path, out_dir = "out";
  bool strict = false;
  uint64_t seed = 0;
  bool seed_set = false;
  app.add_option("task", task,
                 "forward | inverse | roundtrip | sweep | split-demo | find-double")
      ->required();
  app.add_option("--config", config_path, "configuration file")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--strict", strict, "fail on hypothesis violations");
  app.add_option("--seed", seed, "perturbation seed")->each([&](const std::string&) {
    seed_set = true;
  });
  CLI11_PARSE(app, argc, argv);

  try {
    TaskContext ctx{Config::load(config_path), fs::path(out_dir), strict, 0, {}};
    if (ctx.cfg.has("task") && ctx.cfg.require("task") != task)
      std::cerr << "note: config task '" << ctx.cfg.require("task")
                << "' overridden by command line '" << task << "'\n";
    ctx.seed = seed_set ? seed
                        : static_cast<uint64_t>(ctx.cfg.get_int("perturbation.seed", 42));
    ctx.strict = strict || ctx.cfg.get_int("check.strict", 0) != 0;
    fs::create_directories(ctx.out_dir);
    echo_config(ctx.cfg, ctx.manifest);
    ctx.manifest.put("effective.seed", static_cast<double>(ctx.seed));
    ctx.manifest.put("effective.strict", ctx.strict ? "yes" : "no");
    ctx.manifest.put("effective.grid_size",
                     std::to_string(ctx.cfg.get_int("model.grid_size", 257)));
    ctx.manifest.put("effective.count", std::to_string(ctx.cfg.get_int("forward.count", 61)));
    ctx.manifest.put("effective.refine", std::to_string(ctx.cfg.get_int("forward.refine", 4)));
    ctx.manifest.put("effective.contour_nodes",
                     std::to_string(ctx.cfg.get_int("discretization.contour_nodes", 256)));
    ctx.manifest.put("effective.trunc_k",
                     std::to_string(ctx.cfg.get_int("discretization.trunc_k", 60)));
    ctx.manifest.put("effective.delta0", ctx.cfg.get_double("check.delta0", 1e-2));

    if (task == "forward") return task_forward(ctx);
    if (task == "inverse") return task_inverse(ctx, false);
    if (task == "roundtrip") return task_inverse(ctx, true);
    if (task == "sweep") return task_sweep(ctx, false);
    if (task == "split-demo") return task_sweep(ctx, true);
    if (task == "find-double") return task_find_double(ctx);
    std::cerr << "unknown task '" << task << "'\n";
    return kExitConfig;
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
