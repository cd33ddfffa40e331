/*
 * slmap - forward and inverse solver for non-self-adjoint Sturm-Liouville
 * problems on (0, pi), driven by generalized spectral data {lambda_n, M_n}.
 *
 * C API over an opaque-handle core. Every function returns a status code;
 * on failure slmap_last_error() describes the problem for the calling thread.
 */
#ifndef SLMAP_H
#define SLMAP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SLMAP_API __declspec(dllexport)
#else
#define SLMAP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct {
  double re;
  double im;
} slmap_complex;

typedef enum {
  SLMAP_BC_ROBIN = 0,
  SLMAP_BC_DIRICHLET = 1,
} slmap_bc_kind;

typedef enum {
  SLMAP_OK = 0,
  SLMAP_ERR_INVALID_ARGUMENT = 1,
  SLMAP_ERR_CONFIG = 2,
  SLMAP_ERR_HYPOTHESIS = 3,
  SLMAP_ERR_NUMERICAL = 4,
  SLMAP_ERR_IO = 5,
} slmap_status;

/* fine-grained reason for the last failure on this thread */
typedef enum {
  SLMAP_REASON_NONE = 0,
  SLMAP_REASON_INVALID_ARGUMENT,
  SLMAP_REASON_NON_FINITE_STATE,
  SLMAP_REASON_NEAR_EIGENVALUE,
  SLMAP_REASON_ROOT_COUNT_MISMATCH,
  SLMAP_REASON_NEWTON_DIVERGENCE,
  SLMAP_REASON_DEGENERATE_SPECTRUM,
  SLMAP_REASON_DEGENERATE_WEIGHT,
  SLMAP_REASON_DEGENERATE_COEFFICIENT,
  SLMAP_REASON_ISOLATION_FAILURE,
  SLMAP_REASON_CROSS_VALIDATION_FAILURE,
  SLMAP_REASON_BLOCK_STRUCTURE,
  SLMAP_REASON_POLE_ON_CONTOUR,
  SLMAP_REASON_DUPLICATE_TARGET_EIGENVALUE,
  SLMAP_REASON_ZERO_LEADING_COEFFICIENT,
  SLMAP_REASON_TRUNCATION_BUDGET,
  SLMAP_REASON_SINGULAR_OPERATOR,
  SLMAP_REASON_RESIDUAL_TOO_LARGE,
  SLMAP_REASON_HYPOTHESIS_VIOLATED,
  SLMAP_REASON_SEARCH_FAILED,
  SLMAP_REASON_BAD_PRESET,
  SLMAP_REASON_IO,
} slmap_reason;

SLMAP_API const char* slmap_version(void);
SLMAP_API const char* slmap_last_error(void);
SLMAP_API slmap_reason slmap_last_error_reason(void);

typedef struct slmap_problem slmap_problem;
typedef struct slmap_gsd slmap_gsd;
typedef struct slmap_result slmap_result;

/* ---- problems ---------------------------------------------------------- */

/* q: grid_size samples of the potential on the uniform grid over [0, pi]. */
SLMAP_API slmap_status slmap_problem_create(const slmap_complex* q, size_t grid_size,
                                            slmap_complex h, slmap_complex H,
                                            slmap_bc_kind kind, slmap_problem** out);
SLMAP_API slmap_status slmap_problem_preset(const char* name, size_t grid_size,
                                            slmap_problem** out);
SLMAP_API void slmap_problem_free(slmap_problem* p);

SLMAP_API size_t slmap_problem_grid_size(const slmap_problem* p);
SLMAP_API slmap_bc_kind slmap_problem_bc_kind(const slmap_problem* p);
SLMAP_API slmap_complex slmap_problem_h(const slmap_problem* p);
SLMAP_API slmap_complex slmap_problem_H(const slmap_problem* p);
SLMAP_API slmap_status slmap_problem_copy_q(const slmap_problem* p, slmap_complex* out,
                                            size_t capacity);

/* ---- forward problem --------------------------------------------------- */

typedef struct {
  size_t eig_count;   /* eigenvalues to compute (indexing starts at 0/1)   */
  int ode_refine;     /* RK4 steps per grid interval, default 4            */
  int cross_validate; /* check M_n against contour residues, default on    */
} slmap_forward_options;

SLMAP_API void slmap_forward_options_default(slmap_forward_options* opts);

SLMAP_API slmap_status slmap_forward(const slmap_problem* p,
                                     const slmap_forward_options* opts, slmap_gsd** out);

SLMAP_API void slmap_gsd_free(slmap_gsd* g);
SLMAP_API size_t slmap_gsd_count(const slmap_gsd* g);
SLMAP_API int slmap_gsd_first_index(const slmap_gsd* g);
SLMAP_API int slmap_gsd_N(const slmap_gsd* g);
SLMAP_API double slmap_gsd_contour_radius(const slmap_gsd* g);
SLMAP_API slmap_bc_kind slmap_gsd_bc_kind(const slmap_gsd* g);

/* entry i (0-based array position; paper index is first_index + i) */
SLMAP_API slmap_status slmap_gsd_entry(const slmap_gsd* g, size_t i,
                                       slmap_complex* lambda, slmap_complex* weyl,
                                       int* block_start);
/* generalized weight number at position i; fails when the data was read
 * from a file or generated (weights live in forward-computed data only) */
SLMAP_API slmap_status slmap_gsd_alpha(const slmap_gsd* g, size_t i, slmap_complex* alpha);

SLMAP_API slmap_status slmap_gsd_write(const slmap_gsd* g, const char* path);
SLMAP_API slmap_status slmap_gsd_read(const char* path, slmap_gsd** out);

/* ---- perturbation generators and hypothesis checks --------------------- */

SLMAP_API slmap_status slmap_perturb_tail(const slmap_gsd* model, double delta,
                                          uint64_t seed, int real_only, slmap_gsd** out);
SLMAP_API slmap_status slmap_split_double(const slmap_gsd* model, int block_index,
                                          double delta, slmap_gsd** out);

typedef struct {
  double contour_sup; /* max |hat M_N| on the contour quadrature nodes */
  double tail_norm;   /* (sum_{n>N} (n xi_n)^2)^{1/2}                  */
  int pass;           /* all conditions hold at the given delta        */
} slmap_theorem1_report;

SLMAP_API slmap_status slmap_check_theorem1(const slmap_gsd* model, const slmap_gsd* target,
                                            double delta, int contour_nodes,
                                            slmap_theorem1_report* out);

typedef struct {
  int pass;                 /* all condition rows hold at the given delta */
  double worst_moment;      /* largest moment-condition residual          */
  double worst_moment_low;  /* largest residual among orders s < m_k      */
  double tail_norm;
} slmap_theorem2_report;

SLMAP_API slmap_status slmap_check_theorem2(const slmap_gsd* model, const slmap_gsd* target,
                                            double delta, slmap_theorem2_report* out);

/* full condition-by-condition report written as structured text */
SLMAP_API slmap_status slmap_write_check_report(const slmap_gsd* model,
                                                const slmap_gsd* target, double delta,
                                                int theorem, const char* path);

/* ---- inverse problem ---------------------------------------------------- */

typedef struct {
  int contour_nodes;     /* quadrature nodes on the contour, default 256   */
  int trunc_k;           /* retained tail indices, default 60              */
  int ode_refine;        /* default 4                                      */
  int threads;           /* 0 = hardware concurrency                       */
  int strict;            /* enforce closeness hypotheses before solving    */
  double delta0;         /* hypothesis ceiling in strict mode, default 1e-2 */
  int eps_finite_difference; /* debug: differentiate eps0 numerically      */
} slmap_inverse_options;

SLMAP_API void slmap_inverse_options_default(slmap_inverse_options* opts);

/* model_gsd may be NULL; the forward data is then computed on the fly. */
SLMAP_API slmap_status slmap_inverse(const slmap_problem* model, const slmap_gsd* model_gsd,
                                     const slmap_gsd* target,
                                     const slmap_inverse_options* opts, slmap_result** out);

SLMAP_API void slmap_result_free(slmap_result* r);
SLMAP_API size_t slmap_result_grid_size(const slmap_result* r);
SLMAP_API slmap_status slmap_result_copy_q_tilde(const slmap_result* r, slmap_complex* out,
                                                 size_t capacity);
SLMAP_API slmap_status slmap_result_copy_eps0(const slmap_result* r, slmap_complex* out,
                                              size_t capacity);
SLMAP_API slmap_complex slmap_result_h_tilde(const slmap_result* r);
SLMAP_API slmap_complex slmap_result_H_tilde(const slmap_result* r);

typedef struct {
  double contour_sup;
  double tail_norm;
  double first_block_shift; /* max |lambda_n - lambda~_n| over n <= N */
  double max_op_norm_proxy;
  double min_rcond;
  double max_residual;
  int N;
  double r;
  int contour_nodes;
  int trunc_k;
  int hypotheses_pass;
} slmap_diagnostics;

SLMAP_API slmap_status slmap_result_diagnostics(const slmap_result* r,
                                                slmap_diagnostics* out);
SLMAP_API slmap_status slmap_result_write(const slmap_result* r, const slmap_problem* model,
                                          const char* path);

/* ---- double-eigenvalue search ------------------------------------------ */

typedef struct {
  slmap_complex lambda;
  slmap_complex c;
  double abs_char;
  double abs_dchar;
  double abs_d2char;
  int winding;
} slmap_double_certificate;

/* shape: "exp-ix" or "exp-2ix"; pass scan != 0 to coarse-scan the c window */
SLMAP_API slmap_status slmap_find_double(const char* shape, slmap_complex c_seed,
                                         slmap_complex lambda_seed, size_t grid_size,
                                         int scan, slmap_problem** out,
                                         slmap_double_certificate* cert);

#ifdef __cplusplus
}
#endif

#endif /* SLMAP_H */
