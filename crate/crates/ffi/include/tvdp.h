#ifndef TVDP_H
#define TVDP_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every call.
typedef enum TvdpStatus {
  TVDP_STATUS_OK = 0,
  TVDP_STATUS_INVALID_ARGUMENT = 1,
  TVDP_STATUS_INFEASIBLE = 2,
  TVDP_STATUS_CAPACITY = 3,
  TVDP_STATUS_NULL_POINTER = 4,
  TVDP_STATUS_PANIC = 5,
} TvdpStatus;

// Composition algorithm for [`tvdp_compose`].
typedef enum TvdpComposeMode {
  TVDP_COMPOSE_MODE_EXACT = 0,
  TVDP_COMPOSE_MODE_TYPES = 1,
  // (eps, delta) composition without the TV constraint.
  TVDP_COMPOSE_MODE_KAIROUZ = 2,
} TvdpComposeMode;

// Channel handle.
typedef struct TvdpChannel TvdpChannel;

// Tradeoff curve handle.
typedef struct TvdpCurve TvdpCurve;

// Composition ledger handle.
typedef struct TvdpLedger TvdpLedger;

// Closed-form bounds over channels with given eps and eta.
typedef struct TvdpLdpBounds {
  double max_kl;
  double max_chi2;
  double max_tv;
  double kl_contraction;
  double chi2_output;
} TvdpLdpBounds;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer
// stays valid until the next call into the library on the same thread.
const char *tvdp_last_error(void);

// Library version as a static NUL-terminated string.
const char *tvdp_version(void);

// Boundary curve of an (eps, delta, eta) budget.
//
// # Safety
// `out` must be a valid pointer.
enum TvdpStatus tvdp_curve_from_budget(double eps,
                                       double delta,
                                       double eta,
                                       struct TvdpCurve **out);

// Curve from vertex arrays; the vertices must form a valid tradeoff curve.
//
// # Safety
// `xs` and `ys` must hold `n` values; `out` must be valid.
enum TvdpStatus tvdp_curve_new(const double *xs,
                               const double *ys,
                               uintptr_t n,
                               struct TvdpCurve **out);

// # Safety
// `curve` must come from this library or be null.
void tvdp_curve_free(struct TvdpCurve *curve);

// # Safety
// Pointers must be valid.
enum TvdpStatus tvdp_curve_vertex_count(const struct TvdpCurve *curve, uintptr_t *out);

// Copies up to `cap` vertices; `written` receives the number copied.
//
// # Safety
// `xs` and `ys` must have room for `cap` values.
enum TvdpStatus tvdp_curve_vertices(const struct TvdpCurve *curve,
                                    double *xs,
                                    double *ys,
                                    uintptr_t cap,
                                    uintptr_t *written);

// Value of the curve at `t` in [0, 1].
//
// # Safety
// Pointers must be valid.
enum TvdpStatus tvdp_curve_eval(const struct TvdpCurve *curve, double t, double *out);

// # Safety
// Pointers must be valid.
enum TvdpStatus tvdp_curve_tv(const struct TvdpCurve *curve, double *out);

// Smallest delta such that the curve is (eps, delta)-DP.
//
// # Safety
// Pointers must be valid.
enum TvdpStatus tvdp_curve_delta_for_epsilon(const struct TvdpCurve *curve,
                                             double eps,
                                             double *out);

// Pointwise maximum of `n` curves.
//
// # Safety
// `curves` must hold `n` valid handles.
enum TvdpStatus tvdp_curve_intersect(const struct TvdpCurve *const *curves,
                                     uintptr_t n,
                                     struct TvdpCurve **out);

// k-fold composition ledger. `tol` is used by the types mode only.
//
// # Safety
// `out` must be valid.
enum TvdpStatus tvdp_compose(double eps,
                             double delta,
                             double eta,
                             uintptr_t k,
                             enum TvdpComposeMode mode,
                             double tol,
                             struct TvdpLedger **out);

// # Safety
// `ledger` must come from this library or be null.
void tvdp_ledger_free(struct TvdpLedger *ledger);

// # Safety
// Pointers must be valid.
enum TvdpStatus tvdp_ledger_len(const struct TvdpLedger *ledger, uintptr_t *out);

// Entry `index`: its `j`, epsilon and delta.
//
// # Safety
// Pointers must be valid.
enum TvdpStatus tvdp_ledger_entry(const struct TvdpLedger *ledger,
                                  uintptr_t index,
                                  uintptr_t *j,
                                  double *eps,
                                  double *delta);

// Total variation after composition.
//
// # Safety
// Pointers must be valid.
enum TvdpStatus tvdp_ledger_tv(const struct TvdpLedger *ledger, double *out);

// # Safety
// Pointers must be valid.
enum TvdpStatus tvdp_ledger_to_curve(const struct TvdpLedger *ledger, struct TvdpCurve **out);

// Budget after subsampling with rate `p`.
//
// # Safety
// Out pointers must be valid.
enum TvdpStatus tvdp_subsample(double eps,
                               double delta,
                               double eta,
                               double p,
                               double *out_eps,
                               double *out_delta,
                               double *out_eta);

// Sup distance between the k-fold pure-DP curve and its Gaussian limit.
//
// # Safety
// `out` must be valid.
enum TvdpStatus tvdp_clt_gap(double eps, double eta, uintptr_t k, double *out);

// # Safety
// `out` must be valid.
enum TvdpStatus tvdp_laplace_tv(double eps, double *out);

// # Safety
// `out` must be valid.
enum TvdpStatus tvdp_gaussian_tv(double mu, double *out);

// # Safety
// `out` must be valid.
enum TvdpStatus tvdp_staircase_tv(double gamma, double eps, double sensitivity, double *out);

// Channel from a row-major `rows x cols` matrix.
//
// # Safety
// `data` must hold `rows * cols` values; `out` must be valid.
enum TvdpStatus tvdp_channel_new(const double *data,
                                 uintptr_t rows,
                                 uintptr_t cols,
                                 struct TvdpChannel **out);

// Extremal three-output channel for (eps, eta).
//
// # Safety
// `out` must be valid.
enum TvdpStatus tvdp_channel_q_star(double eps, double eta, struct TvdpChannel **out);

// # Safety
// `channel` must come from this library or be null.
void tvdp_channel_free(struct TvdpChannel *channel);

// Local-DP epsilon (may be infinity).
//
// # Safety
// Pointers must be valid.
enum TvdpStatus tvdp_channel_epsilon(const struct TvdpChannel *channel, double *out);

// Largest TV between two rows.
//
// # Safety
// Pointers must be valid.
enum TvdpStatus tvdp_channel_tv(const struct TvdpChannel *channel, double *out);

// Closed-form bounds; `tv_in` is the input TV for the chi-square bound.
//
// # Safety
// `out` must be valid.
enum TvdpStatus tvdp_ldp_bounds(double eps, double eta, double tv_in, struct TvdpLdpBounds *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TVDP_H */
