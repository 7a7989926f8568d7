#ifndef BIHARMONIC_REFLECT_H
#define BIHARMONIC_REFLECT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Boundary-condition pairs: I `u=∂ₙu=0`, II `u=Δu=0`, III `u=∂ₙΔu=0`,
// IV `∂ₙu=Δu=0`, V `∂ₙu=∂ₙΔu=0`.
typedef enum {
  BR_CASE_I = 1,
  BR_CASE_II = 2,
  BR_CASE_III = 3,
  BR_CASE_IV = 4,
  BR_CASE_V = 5,
} BrBoundaryCase;

// Status codes returned by every fallible call.
typedef enum {
  BR_OK = 0,
  BR_ERR_NULL_POINTER = 1,
  BR_ERR_INVALID_ARGUMENT = 2,
  BR_ERR_NON_CONVERGENCE = 3,
  BR_ERR_OUTSIDE_VALIDITY = 4,
  BR_ERR_DERIVATIVE_SINGULAR = 5,
  BR_ERR_DOMAIN_VIOLATION = 6,
  BR_ERR_NOT_ON_CURVE = 7,
  BR_ERR_UNSUPPORTED = 8,
  BR_ERR_SINGULAR_ARGUMENT = 9,
  BR_ERR_NOT_CONVERGED = 10,
  BR_ERR_QUADRATURE_FAILURE = 11,
  BR_ERR_BRANCH_CUT_CROSSING = 12,
  BR_ERR_INTERNAL = 13,
} BrStatus;

// An analytic curve handle.
typedef struct BrCurve BrCurve;

// A biharmonic field handle.
typedef struct BrField BrField;

// Continuation output: the continued value and its decomposition.
typedef struct {
  double value;
  double point_term;
  double correction;
  double quadrature_error_estimate;
  size_t truncation_k_used;
} BrContinuation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// # Safety
// `out` must be a valid pointer.
BrStatus br_curve_new_line(BrCurve **out);

// # Safety
// `out` must be a valid pointer.
BrStatus br_curve_new_circle(double radius, BrCurve **out);

// Implicit algebraic curve `Σ coeffs[t]·x^powers[2t]·y^powers[2t+1] = 0`
// with a reference point on the curve.
//
// # Safety
// `powers` must hold `2·n_terms` entries, `coeffs` must hold `n_terms`,
// and `out` must be a valid pointer.
BrStatus br_curve_new_implicit(const uint32_t *powers,
                               const double *coeffs,
                               size_t n_terms,
                               double ref_x,
                               double ref_y,
                               BrCurve **out);

// # Safety
// `curve` must be a pointer from a `br_curve_new_*` call, not yet freed.
void br_curve_free(BrCurve *curve);

// Reflects `(x, y)` across the curve; writes the image point.
//
// # Safety
// All pointers must be valid.
BrStatus br_curve_reflect(const BrCurve *curve, double x, double y, double *out_x, double *out_y);

// `order`-th derivative of the Schwarz function at `z = re + i·im`.
//
// # Safety
// All pointers must be valid.
BrStatus br_curve_schwarz(const BrCurve *curve,
                          double re,
                          double im,
                          uint32_t order,
                          double *out_re,
                          double *out_im);

// # Safety
// `out` must be a valid pointer.
BrStatus br_field_new(BrField **out);

// Appends a dictionary term. `slot_phi`: nonzero for the φ slot. `kind`:
// 0 = power `zⁿ`, 1 = `log z`, 2 = `z·log z` (`n` ignored for 1 and 2).
//
// # Safety
// `field` must be a live pointer from `br_field_new`.
BrStatus br_field_add_term(BrField *field,
                           int32_t slot_phi,
                           int32_t kind,
                           int32_t n,
                           double coeff_re,
                           double coeff_im);

// # Safety
// `field` must be a pointer from `br_field_new`, not yet freed.
void br_field_free(BrField *field);

// `∂^{dx+dy} u / ∂x^{dx}∂y^{dy}` at `(x, y)`, `dx + dy ≤ 3`.
//
// # Safety
// All pointers must be valid.
BrStatus br_field_eval(const BrField *field,
                       double x,
                       double y,
                       uint32_t dx,
                       uint32_t dy,
                       double *out);

// Continues the field across the curve at `(x, y)` under the given boundary
// case (case I uses the clamped point formula, II–V the general formula
// with a series kernel of `k_max` terms).
//
// # Safety
// All pointers must be valid.
BrStatus br_continue(const BrCurve *curve,
                     BrBoundaryCase case_,
                     const BrField *field,
                     double x,
                     double y,
                     size_t k_max,
                     BrContinuation *out);

// Static description of a status code.
const char *br_status_message(BrStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BIHARMONIC_REFLECT_H */
