#include "slmap/slmap.h"

#include <algorithm>
#include <cstring>
#include <memory>
#include <string>

#include "core/find_double.hpp"
#include "core/gsd_io.hpp"
#include "core/main_equation.hpp"
#include "core/presets.hpp"
#include "core/spectral.hpp"

using namespace slmap;

struct slmap_problem {
  BoundaryProblem p;
};
struct slmap_gsd {
  SpectralData data;
  std::vector<Complex> alphas;  // empty unless forward-computed
};
struct slmap_result {
  ReconstructionResult r;
};

namespace {

thread_local std::string g_last_error;
thread_local slmap_reason g_last_reason = SLMAP_REASON_NONE;

slmap_reason to_c_reason(Reason r) {
  switch (r) {
    case Reason::None: return SLMAP_REASON_NONE;
    case Reason::InvalidArgument: return SLMAP_REASON_INVALID_ARGUMENT;
    case Reason::NonFiniteState: return SLMAP_REASON_NON_FINITE_STATE;
    case Reason::NearEigenvalue: return SLMAP_REASON_NEAR_EIGENVALUE;
    case Reason::RootCountMismatch: return SLMAP_REASON_ROOT_COUNT_MISMATCH;
    case Reason::NewtonDivergence: return SLMAP_REASON_NEWTON_DIVERGENCE;
    case Reason::DegenerateSpectrum: return SLMAP_REASON_DEGENERATE_SPECTRUM;
    case Reason::DegenerateWeight: return SLMAP_REASON_DEGENERATE_WEIGHT;
    case Reason::DegenerateCoefficient: return SLMAP_REASON_DEGENERATE_COEFFICIENT;
    case Reason::IsolationFailure: return SLMAP_REASON_ISOLATION_FAILURE;
    case Reason::CrossValidationFailure: return SLMAP_REASON_CROSS_VALIDATION_FAILURE;
    case Reason::BlockStructure: return SLMAP_REASON_BLOCK_STRUCTURE;
    case Reason::PoleOnContour: return SLMAP_REASON_POLE_ON_CONTOUR;
    case Reason::DuplicateTargetEigenvalue: return SLMAP_REASON_DUPLICATE_TARGET_EIGENVALUE;
    case Reason::ZeroLeadingCoefficient: return SLMAP_REASON_ZERO_LEADING_COEFFICIENT;
    case Reason::TruncationBudgetExceeded: return SLMAP_REASON_TRUNCATION_BUDGET;
    case Reason::SingularOperator: return SLMAP_REASON_SINGULAR_OPERATOR;
    case Reason::ResidualTooLarge: return SLMAP_REASON_RESIDUAL_TOO_LARGE;
    case Reason::HypothesisViolated: return SLMAP_REASON_HYPOTHESIS_VIOLATED;
    case Reason::SearchFailed: return SLMAP_REASON_SEARCH_FAILED;
    case Reason::BadPreset: return SLMAP_REASON_BAD_PRESET;
    case Reason::Io: return SLMAP_REASON_IO;
  }
  return SLMAP_REASON_NONE;
}

slmap_status to_c_status(Reason r) {
  switch (r) {
    case Reason::InvalidArgument:
    case Reason::BadPreset:
      return SLMAP_ERR_CONFIG;
    case Reason::HypothesisViolated:
    case Reason::PoleOnContour:
    case Reason::DuplicateTargetEigenvalue:
      return SLMAP_ERR_HYPOTHESIS;
    case Reason::Io:
      return SLMAP_ERR_IO;
    default:
      return SLMAP_ERR_NUMERICAL;
  }
}

template <typename Fn>
slmap_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    g_last_reason = SLMAP_REASON_NONE;
    fn();
    return SLMAP_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    g_last_reason = to_c_reason(e.reason());
    return to_c_status(e.reason());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    g_last_reason = SLMAP_REASON_INVALID_ARGUMENT;
    return SLMAP_ERR_NUMERICAL;
  }
}

Complex from_c(slmap_complex z) { return Complex(z.re, z.im); }
slmap_complex to_c(Complex z) { return {z.real(), z.imag()}; }

}  // namespace

extern "C" {

const char* slmap_version(void) { return "slmap 1.0.0"; }
const char* slmap_last_error(void) { return g_last_error.c_str(); }
slmap_reason slmap_last_error_reason(void) { return g_last_reason; }

slmap_status slmap_problem_create(const slmap_complex* q, size_t grid_size, slmap_complex h,
                                  slmap_complex H, slmap_bc_kind kind, slmap_problem** out) {
  return guarded([&] {
    require(q != nullptr && out != nullptr, Reason::InvalidArgument, "null argument");
    auto p = std::make_unique<slmap_problem>();
    p->p.q.resize(grid_size);
    for (size_t i = 0; i < grid_size; ++i) p->p.q[i] = from_c(q[i]);
    p->p.h = from_c(h);
    p->p.H = from_c(H);
    p->p.kind = kind == SLMAP_BC_ROBIN ? BcKind::Robin : BcKind::Dirichlet;
    p->p.validate();
    *out = p.release();
  });
}

slmap_status slmap_problem_preset(const char* name, size_t grid_size, slmap_problem** out) {
  return guarded([&] {
    require(name != nullptr && out != nullptr, Reason::InvalidArgument, "null argument");
    auto p = std::make_unique<slmap_problem>();
    p->p = preset_problem(name, static_cast<int>(grid_size));
    *out = p.release();
  });
}

void slmap_problem_free(slmap_problem* p) { delete p; }

size_t slmap_problem_grid_size(const slmap_problem* p) {
  return p ? p->p.q.size() : 0;
}
slmap_bc_kind slmap_problem_bc_kind(const slmap_problem* p) {
  return p && p->p.kind == BcKind::Dirichlet ? SLMAP_BC_DIRICHLET : SLMAP_BC_ROBIN;
}
slmap_complex slmap_problem_h(const slmap_problem* p) {
  return p ? to_c(p->p.h) : slmap_complex{0.0, 0.0};
}
slmap_complex slmap_problem_H(const slmap_problem* p) {
  return p ? to_c(p->p.H) : slmap_complex{0.0, 0.0};
}

slmap_status slmap_problem_copy_q(const slmap_problem* p, slmap_complex* out,
                                  size_t capacity) {
  return guarded([&] {
    require(p != nullptr && out != nullptr, Reason::InvalidArgument, "null argument");
    require(capacity >= p->p.q.size(), Reason::InvalidArgument, "buffer too small");
    for (size_t i = 0; i < p->p.q.size(); ++i) out[i] = to_c(p->p.q[i]);
  });
}

void slmap_forward_options_default(slmap_forward_options* opts) {
  if (!opts) return;
  opts->eig_count = 61;
  opts->ode_refine = 4;
  opts->cross_validate = 1;
}

slmap_status slmap_forward(const slmap_problem* p, const slmap_forward_options* opts,
                           slmap_gsd** out) {
  return guarded([&] {
    require(p != nullptr && out != nullptr, Reason::InvalidArgument, "null argument");
    slmap_forward_options o;
    slmap_forward_options_default(&o);
    if (opts) o = *opts;
    ForwardOptions fwd;
    fwd.refine = o.ode_refine;
    fwd.cross_validate = o.cross_validate != 0;
    const GeneralizedSpectralData gsd =
        full_gsd(p->p, static_cast<int>(o.eig_count), fwd);
    auto g = std::make_unique<slmap_gsd>();
    g->data = gsd.data_view();
    g->alphas = gsd.alphas;
    *out = g.release();
  });
}

void slmap_gsd_free(slmap_gsd* g) { delete g; }
size_t slmap_gsd_count(const slmap_gsd* g) { return g ? g->data.lambdas.size() : 0; }
int slmap_gsd_first_index(const slmap_gsd* g) { return g ? g->data.first_index : 0; }
int slmap_gsd_N(const slmap_gsd* g) { return g ? g->data.N : 0; }
double slmap_gsd_contour_radius(const slmap_gsd* g) { return g ? g->data.r : 0.0; }
slmap_bc_kind slmap_gsd_bc_kind(const slmap_gsd* g) {
  return g && g->data.kind == BcKind::Dirichlet ? SLMAP_BC_DIRICHLET : SLMAP_BC_ROBIN;
}

slmap_status slmap_gsd_entry(const slmap_gsd* g, size_t i, slmap_complex* lambda,
                             slmap_complex* weyl, int* block_start) {
  return guarded([&] {
    require(g != nullptr, Reason::InvalidArgument, "null argument");
    require(i < g->data.lambdas.size(), Reason::InvalidArgument, "index out of range");
    if (lambda) *lambda = to_c(g->data.lambdas[i]);
    if (weyl) *weyl = to_c(g->data.weyl[i]);
    if (block_start) *block_start = g->data.block_start[i];
  });
}

slmap_status slmap_gsd_alpha(const slmap_gsd* g, size_t i, slmap_complex* alpha) {
  return guarded([&] {
    require(g != nullptr && alpha != nullptr, Reason::InvalidArgument, "null argument");
    require(i < g->alphas.size(), Reason::InvalidArgument,
            "no weight numbers stored for this data");
    *alpha = to_c(g->alphas[i]);
  });
}

slmap_status slmap_gsd_write(const slmap_gsd* g, const char* path) {
  return guarded([&] {
    require(g != nullptr && path != nullptr, Reason::InvalidArgument, "null argument");
    write_gsd(g->data, path);
  });
}

slmap_status slmap_gsd_read(const char* path, slmap_gsd** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, Reason::InvalidArgument, "null argument");
    auto g = std::make_unique<slmap_gsd>();
    g->data = read_gsd(path);
    *out = g.release();
  });
}

slmap_status slmap_perturb_tail(const slmap_gsd* model, double delta, uint64_t seed,
                                int real_only, slmap_gsd** out) {
  return guarded([&] {
    require(model != nullptr && out != nullptr, Reason::InvalidArgument, "null argument");
    auto g = std::make_unique<slmap_gsd>();
    g->data = perturb_simple_tail(model->data, delta, seed, real_only != 0);
    *out = g.release();
  });
}

slmap_status slmap_split_double(const slmap_gsd* model, int block_index, double delta,
                                slmap_gsd** out) {
  return guarded([&] {
    require(model != nullptr && out != nullptr, Reason::InvalidArgument, "null argument");
    auto g = std::make_unique<slmap_gsd>();
    g->data = split_double(model->data, block_index, delta);
    *out = g.release();
  });
}

slmap_status slmap_check_theorem1(const slmap_gsd* model, const slmap_gsd* target,
                                  double delta, int contour_nodes,
                                  slmap_theorem1_report* out) {
  return guarded([&] {
    require(model != nullptr && target != nullptr && out != nullptr,
            Reason::InvalidArgument, "null argument");
    const auto res = check_theorem1(model->data, target->data, model->data.N,
                                    model->data.r, delta,
                                    contour_nodes > 0 ? contour_nodes : 256);
    out->contour_sup = res.metrics.contour_sup;
    out->tail_norm = res.metrics.tail_norm;
    out->pass = res.report.pass ? 1 : 0;
  });
}

slmap_status slmap_check_theorem2(const slmap_gsd* model, const slmap_gsd* target,
                                  double delta, slmap_theorem2_report* out) {
  return guarded([&] {
    require(model != nullptr && target != nullptr && out != nullptr,
            Reason::InvalidArgument, "null argument");
    const CheckReport rep = check_theorem2(model->data, target->data, model->data.N, delta);
    out->pass = rep.pass ? 1 : 0;
    out->worst_moment = 0.0;
    out->worst_moment_low = 0.0;
    out->tail_norm = 0.0;
    for (const auto& rec : rep.records) {
      if (rec.id.find(".moment_s") != std::string::npos) {
        out->worst_moment = std::max(out->worst_moment, rec.measured);
        const auto pos = rec.id.find(".moment_s");
        const int s = std::stoi(rec.id.substr(pos + 9));
        const auto bpos = rec.id.find("block");
        const int k = std::stoi(rec.id.substr(bpos + 5));
        const int m = model->data.multiplicity(k);
        if (s < m) out->worst_moment_low = std::max(out->worst_moment_low, rec.measured);
      } else if (rec.id == "theorem2.tail_norm") {
        out->tail_norm = rec.measured;
      }
    }
  });
}

slmap_status slmap_write_check_report(const slmap_gsd* model, const slmap_gsd* target,
                                      double delta, int theorem, const char* path) {
  return guarded([&] {
    require(model != nullptr && target != nullptr && path != nullptr,
            Reason::InvalidArgument, "null argument");
    CheckReport rep;
    if (theorem == 1)
      rep = check_theorem1(model->data, target->data, model->data.N, model->data.r, delta)
                .report;
    else if (theorem == 2)
      rep = check_theorem2(model->data, target->data, model->data.N, delta);
    else
      fail(Reason::InvalidArgument, "theorem must be 1 or 2");
    write_check_report(rep, path);
  });
}

void slmap_inverse_options_default(slmap_inverse_options* opts) {
  if (!opts) return;
  opts->contour_nodes = 256;
  opts->trunc_k = 60;
  opts->ode_refine = 4;
  opts->threads = 0;
  opts->strict = 0;
  opts->delta0 = 1e-2;
  opts->eps_finite_difference = 0;
}

slmap_status slmap_inverse(const slmap_problem* model, const slmap_gsd* model_gsd,
                           const slmap_gsd* target, const slmap_inverse_options* opts,
                           slmap_result** out) {
  return guarded([&] {
    require(model != nullptr && target != nullptr && out != nullptr,
            Reason::InvalidArgument, "null argument");
    slmap_inverse_options o;
    slmap_inverse_options_default(&o);
    if (opts) o = *opts;
    InverseOptions io;
    io.disc.contour_nodes = o.contour_nodes;
    io.disc.trunc_k = o.trunc_k;
    io.ode_refine = o.ode_refine;
    io.threads = o.threads;
    io.strict = o.strict != 0;
    io.delta0 = o.delta0;
    io.eps_by_finite_difference = o.eps_finite_difference != 0;

    auto res = std::make_unique<slmap_result>();
    if (model_gsd)
      res->r = solve_inverse(model->p, model_gsd->data, target->data, io);
    else
      res->r = solve_inverse(model->p, target->data, io);
    *out = res.release();
  });
}

void slmap_result_free(slmap_result* r) { delete r; }
size_t slmap_result_grid_size(const slmap_result* r) { return r ? r->r.q_tilde.size() : 0; }

slmap_status slmap_result_copy_q_tilde(const slmap_result* r, slmap_complex* out,
                                       size_t capacity) {
  return guarded([&] {
    require(r != nullptr && out != nullptr, Reason::InvalidArgument, "null argument");
    require(capacity >= r->r.q_tilde.size(), Reason::InvalidArgument, "buffer too small");
    for (size_t i = 0; i < r->r.q_tilde.size(); ++i) out[i] = to_c(r->r.q_tilde[i]);
  });
}

slmap_status slmap_result_copy_eps0(const slmap_result* r, slmap_complex* out,
                                    size_t capacity) {
  return guarded([&] {
    require(r != nullptr && out != nullptr, Reason::InvalidArgument, "null argument");
    require(capacity >= r->r.eps0.size(), Reason::InvalidArgument, "buffer too small");
    for (size_t i = 0; i < r->r.eps0.size(); ++i) out[i] = to_c(r->r.eps0[i]);
  });
}

slmap_complex slmap_result_h_tilde(const slmap_result* r) {
  return r ? to_c(r->r.h_tilde) : slmap_complex{0.0, 0.0};
}
slmap_complex slmap_result_H_tilde(const slmap_result* r) {
  return r ? to_c(r->r.H_tilde) : slmap_complex{0.0, 0.0};
}

slmap_status slmap_result_diagnostics(const slmap_result* r, slmap_diagnostics* out) {
  return guarded([&] {
    require(r != nullptr && out != nullptr, Reason::InvalidArgument, "null argument");
    const Diagnostics& d = r->r.diag;
    out->contour_sup = d.contour_sup;
    out->tail_norm = d.tail_norm;
    out->first_block_shift = d.first_block_shift;
    out->max_op_norm_proxy = d.max_op_norm_proxy;
    out->min_rcond = d.min_rcond;
    out->max_residual = d.max_residual;
    out->N = d.N;
    out->r = d.r;
    out->contour_nodes = d.contour_nodes;
    out->trunc_k = d.trunc_k;
    out->hypotheses_pass = d.hypotheses_pass ? 1 : 0;
  });
}

slmap_status slmap_result_write(const slmap_result* r, const slmap_problem* model,
                                const char* path) {
  return guarded([&] {
    require(r != nullptr && model != nullptr && path != nullptr, Reason::InvalidArgument,
            "null argument");
    write_reconstruction(model->p, r->r, path);
  });
}

slmap_status slmap_find_double(const char* shape, slmap_complex c_seed,
                               slmap_complex lambda_seed, size_t grid_size, int scan,
                               slmap_problem** out, slmap_double_certificate* cert) {
  return guarded([&] {
    require(shape != nullptr && out != nullptr, Reason::InvalidArgument, "null argument");
    DoubleSearchOptions o;
    o.shape = shape;
    o.c_seed = from_c(c_seed);
    o.lambda_seed = from_c(lambda_seed);
    o.grid_size = static_cast<int>(grid_size);
    o.scan = scan != 0;
    const DoubleSearchResult res = find_double(o);
    auto p = std::make_unique<slmap_problem>();
    p->p = res.problem;
    if (cert) {
      cert->lambda = to_c(res.certificate.lambda);
      cert->c = to_c(res.certificate.c);
      cert->abs_char = res.certificate.abs_char;
      cert->abs_dchar = res.certificate.abs_dchar;
      cert->abs_d2char = res.certificate.abs_d2char;
      cert->winding = res.certificate.winding;
    }
    *out = p.release();
  });
}

}  // extern "C"
