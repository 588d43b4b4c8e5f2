#ifndef SLAB_H
#define SLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

#define SLAB_OK 0

/**
 * A required pointer was null.
 */
#define SLAB_ERR_NULL -1

/**
 * The configuration text is not valid UTF-8.
 */
#define SLAB_ERR_UTF8 -2

/**
 * The configuration was rejected.
 */
#define SLAB_ERR_CONFIG -3

/**
 * A time step failed; the handle keeps the last good state.
 */
#define SLAB_ERR_STEP -4

/**
 * An index or buffer length is out of range.
 */
#define SLAB_ERR_ARGUMENT -5

/**
 * A Rust panic was caught at the boundary.
 */
#define SLAB_ERR_PANIC -6

/**
 * Opaque simulation handle.
 */
typedef struct SlabSim SlabSim;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failing call on this thread, or null if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *slab_last_error_message(void);

/**
 * Builds a simulation at t = 0 from `key = value` configuration text (the
 * same format the `slab` command reads). Output keys such as `output_dir`
 * are accepted and ignored.
 */
int32_t slab_sim_create(const char *config, struct SlabSim **out);

/**
 * Releases a handle; null is ignored.
 */
void slab_sim_free(struct SlabSim *sim);

/**
 * Advances `steps` time steps. On failure the handle holds the state
 * after the last successful step.
 */
int32_t slab_sim_advance(struct SlabSim *sim, uintptr_t steps);

int32_t slab_sim_time(const struct SlabSim *sim, double *out);

int32_t slab_sim_step_index(const struct SlabSim *sim, uintptr_t *out);

/**
 * Discrete mass `sum |psi|^2 * cell volume` of the current level.
 */
int32_t slab_sim_mass(const struct SlabSim *sim, double *out);

/**
 * Grid points along x and y (`ny` is 1 in 1D). Field values are stored
 * x-fastest: index `i + nx * j`.
 */
int32_t slab_sim_shape(const struct SlabSim *sim, uintptr_t *nx, uintptr_t *ny);

/**
 * Copies the current field into `re` and `im`, each holding `len` values;
 * `len` must equal `nx * ny`.
 */
int32_t slab_sim_copy_field(const struct SlabSim *sim, double *re, double *im, uintptr_t len);

/**
 * Boundary wave number in use on an edge (0 west/left, 1 east/right,
 * 2 south, 3 north), averaged along the edge in 2D.
 */
int32_t slab_sim_k0(const struct SlabSim *sim, uint32_t edge, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SLAB_H */
