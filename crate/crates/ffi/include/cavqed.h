#ifndef CAVQED_H
#define CAVQED_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Basis indices of the two-atom space.
 */
#define CAVQED_EE 0

#define CAVQED_EG 1

#define CAVQED_GE 2

#define CAVQED_GG 3

typedef enum CavqedStatus {
  CAVQED_STATUS_OK = 0,
  CAVQED_STATUS_NULL_POINTER = 1,
  CAVQED_STATUS_INVALID_PARAMS = 2,
  CAVQED_STATUS_INVALID_STATE = 3,
  CAVQED_STATUS_NO_CONVERGENCE = 4,
  CAVQED_STATUS_NUMERICAL_FAILURE = 5,
  CAVQED_STATUS_BUFFER_TOO_SMALL = 6,
  CAVQED_STATUS_OUT_OF_RANGE = 7,
  CAVQED_STATUS_PANIC = 99,
} CavqedStatus;

/**
 * System parameters λ, δ, γ.
 */
typedef struct CavqedParams CavqedParams;

/**
 * Two-atom density matrix.
 */
typedef struct CavqedState CavqedState;

/**
 * Sampled solution of the effective master equation.
 */
typedef struct CavqedTrajectory CavqedTrajectory;

/**
 * Joint detection probabilities.
 */
typedef struct CavqedJointProbs {
  double eg;
  double ge;
  double gg;
  double ee;
} CavqedJointProbs;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static NUL-terminated string.
 */
const char *cavqed_version(void);

/**
 * Message of the last failure on this thread; empty if none. Valid until
 * the next failing call on the same thread.
 */
const char *cavqed_last_error_message(void);

enum CavqedStatus cavqed_params_new(double lambda,
                                    double delta,
                                    double gamma,
                                    struct CavqedParams **out);

/**
 * Parameters with λ = δ = Ω, so that λ²/δ = Ω.
 */
enum CavqedStatus cavqed_params_from_effective(double omega,
                                               double gamma,
                                               struct CavqedParams **out);

void cavqed_params_free(struct CavqedParams *p);

/**
 * Effective coupling Ω = λ²/δ.
 */
enum CavqedStatus cavqed_params_omega(const struct CavqedParams *p, double *out);

/**
 * Closed-form state at time t, starting from |eg⟩.
 */
enum CavqedStatus cavqed_state_exact(double t,
                                     const struct CavqedParams *p,
                                     struct CavqedState **out);

/**
 * (|eg⟩ − i|ge⟩)/√2
 */
enum CavqedStatus cavqed_state_epr(struct CavqedState **out);

/**
 * Basis projector |i⟩⟨i|, i one of the `CAVQED_*` indices.
 */
enum CavqedStatus cavqed_state_basis(size_t index, struct CavqedState **out);

/**
 * State from 16 row-major entries given as separate real and imaginary
 * arrays. Rejected unless Hermitian, unit-trace and positive.
 */
enum CavqedStatus cavqed_state_from_entries(const double *re,
                                            const double *im,
                                            size_t len,
                                            struct CavqedState **out);

void cavqed_state_free(struct CavqedState *s);

/**
 * Copies the 16 row-major entries into `re` and `im`, each of length ≥ 16.
 */
enum CavqedStatus cavqed_state_entries(const struct CavqedState *s,
                                       double *re,
                                       double *im,
                                       size_t len);

/**
 * Wootters concurrence.
 */
enum CavqedStatus cavqed_concurrence(const struct CavqedState *s, double *out);

/**
 * ½(1 + ⅓Σ singular values of the correlation matrix).
 */
enum CavqedStatus cavqed_max_teleport_fidelity(const struct CavqedState *s, double *out);

/**
 * ⟨ψ_EPR|ρ|ψ_EPR⟩
 */
enum CavqedStatus cavqed_epr_fidelity(const struct CavqedState *s, double *out);

/**
 * Standard teleportation protocol fidelity averaged over the six Pauli
 * eigenstates.
 */
enum CavqedStatus cavqed_average_teleport_fidelity(const struct CavqedState *s, double *out);

/**
 * Tr ρ²
 */
enum CavqedStatus cavqed_purity(const struct CavqedState *s, double *out);

enum CavqedStatus cavqed_joint_probabilities(const struct CavqedState *s,
                                             struct CavqedJointProbs *out);

/**
 * β(φ) = ⟨σ₁ˣ(cos φ σ₂ˣ + sin φ σ₂ʸ)⟩
 */
enum CavqedStatus cavqed_bell_signal(const struct CavqedState *s, double phi, double *out);

/**
 * Amplitude and phase offset of β(φ) = A·cos(φ + φ₀).
 */
enum CavqedStatus cavqed_bell_fit(const struct CavqedState *s, double *amplitude, double *phase);

/**
 * Ω·ln4/((2k+1)π)
 */
double cavqed_gamma_max(uint32_t k, double omega);

/**
 * Piecewise closed form of F_max at t_k.
 */
double cavqed_closed_form_fmax(uint32_t k, double gamma, double omega);

/**
 * e^{−γ(2k+1)π/(2Ω)}
 */
double cavqed_closed_form_concurrence(uint32_t k, double gamma, double omega);

/**
 * t_k = (2k+1)π/(4Ω)
 */
double cavqed_interaction_time(uint32_t k, double omega);

/**
 * RK4 integration of the effective master equation from `rho0`, sampled
 * at the `n` increasing times in `times`, with step `dt`.
 */
enum CavqedStatus cavqed_integrate_effective(const struct CavqedState *rho0,
                                             const struct CavqedParams *p,
                                             const double *times,
                                             size_t n,
                                             double dt,
                                             struct CavqedTrajectory **out);

enum CavqedStatus cavqed_trajectory_len(const struct CavqedTrajectory *tr, size_t *out);

/**
 * Copy of the i-th sampled state.
 */
enum CavqedStatus cavqed_trajectory_state(const struct CavqedTrajectory *tr,
                                          size_t index,
                                          struct CavqedState **out);

void cavqed_trajectory_free(struct CavqedTrajectory *tr);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CAVQED_H */
