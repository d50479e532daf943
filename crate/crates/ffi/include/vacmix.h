#ifndef VACMIX_H
#define VACMIX_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum VacmixStatus {
  VACMIX_STATUS_OK = 0,
  VACMIX_STATUS_NULL_POINTER = 1,
  VACMIX_STATUS_INVALID_UTF8 = 2,
  // Bad configuration, unreadable file or malformed table.
  VACMIX_STATUS_CONFIG = 3,
  // Invalid physical input or a failed computation.
  VACMIX_STATUS_COMPUTATION = 4,
  VACMIX_STATUS_BUFFER_TOO_SMALL = 5,
  VACMIX_STATUS_PANIC = 6,
} VacmixStatus;

// Eigenstates of the configured block of the effective Hamiltonian.
typedef struct VacmixBlock VacmixBlock;

// A parsed run configuration.
typedef struct VacmixConfig VacmixConfig;

// Populations of one propagated run.
typedef struct VacmixSeries VacmixSeries;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, a static string.
const char *vacmix_version(void);

// Message of the last failed call on this thread, or NULL. Valid until the
// next call into the library from the same thread.
const char *vacmix_last_error(void);

// The built-in default configuration.
//
// # Safety
// `out` must be valid for writing a pointer.
enum VacmixStatus vacmix_config_default(struct VacmixConfig **out);

// Parses TOML text. Relative file names resolve against `base_dir`, or the
// working directory when it is NULL.
//
// # Safety
// `toml` and a non-null `base_dir` must be NUL-terminated strings; `out`
// must be valid for writing a pointer.
enum VacmixStatus vacmix_config_parse(const char *toml,
                                      const char *base_dir,
                                      struct VacmixConfig **out);

// Writes the 64-character SHA-256 of the canonical configuration and a
// terminating NUL; `len` must be at least 65.
//
// # Safety
// `config` must come from this library; `buf` must hold `len` bytes.
enum VacmixStatus vacmix_config_hash(const struct VacmixConfig *config, char *buf, size_t len);

// # Safety
// `config` must come from this library or be NULL, and is not used after.
void vacmix_config_free(struct VacmixConfig *config);

// Diagonalizes the block selected by `[atom]` (level n, m_j, parity) under
// the configured bath and flags.
//
// # Safety
// `config` must come from this library; `out` must be valid for writing a
// pointer.
enum VacmixStatus vacmix_block_compute(const struct VacmixConfig *config, struct VacmixBlock **out);

// Number of eigenstates, 0 for NULL.
//
// # Safety
// `block` must come from this library or be NULL.
size_t vacmix_block_dim(const struct VacmixBlock *block);

// Re E of each eigenstate in eV.
//
// # Safety
// `block` must come from this library; `out` must hold `len` doubles.
enum VacmixStatus vacmix_block_energies(const struct VacmixBlock *block, double *out, size_t len);

// −2 Im E of each eigenstate in eV.
//
// # Safety
// `block` must come from this library; `out` must hold `len` doubles.
enum VacmixStatus vacmix_block_rates(const struct VacmixBlock *block, double *out, size_t len);

// Participation ratio of each eigenstate in the bare basis.
//
// # Safety
// `block` must come from this library; `out` must hold `len` doubles.
enum VacmixStatus vacmix_block_participation(const struct VacmixBlock *block,
                                             double *out,
                                             size_t len);

// Dominant bare-state label of eigenstate `k`, owned by the block; NULL
// when out of range.
//
// # Safety
// `block` must come from this library or be NULL.
const char *vacmix_block_label(const struct VacmixBlock *block, size_t k);

// # Safety
// `block` must come from this library or be NULL, and is not used after.
void vacmix_block_free(struct VacmixBlock *block);

// Propagates one generator variant ("oracle", "oracle-n2", "lindblad",
// "bloch-redfield", "effective", optionally suffixed "-rwa") with the
// `[dynamics]` settings. Nothing is written to disk.
//
// # Safety
// `config` must come from this library, `run` must be a NUL-terminated
// string and `out` must be valid for writing a pointer.
enum VacmixStatus vacmix_propagate(const struct VacmixConfig *config,
                                   const char *run,
                                   struct VacmixSeries **out);

// Number of time points, 0 for NULL.
//
// # Safety
// `series` must come from this library or be NULL.
size_t vacmix_series_rows(const struct VacmixSeries *series);

// Number of observed populations, 0 for NULL.
//
// # Safety
// `series` must come from this library or be NULL.
size_t vacmix_series_columns(const struct VacmixSeries *series);

// Label of column `k`, owned by the series; NULL when out of range.
//
// # Safety
// `series` must come from this library or be NULL.
const char *vacmix_series_name(const struct VacmixSeries *series, size_t k);

// Time grid in fs.
//
// # Safety
// `series` must come from this library; `out` must hold `len` doubles.
enum VacmixStatus vacmix_series_times(const struct VacmixSeries *series, double *out, size_t len);

// Populations, row-major with rows × columns entries.
//
// # Safety
// `series` must come from this library; `out` must hold `len` doubles.
enum VacmixStatus vacmix_series_values(const struct VacmixSeries *series, double *out, size_t len);

// # Safety
// `series` must come from this library or be NULL, and is not used after.
void vacmix_series_free(struct VacmixSeries *series);

// ∫ R_nl R_n'l' r³ dr in Bohr radii, for |l − l'| = 1.
//
// # Safety
// `out` must be valid for writing a double.
enum VacmixStatus vacmix_radial_integral(uint32_t n,
                                         uint32_t l,
                                         uint32_t n2,
                                         uint32_t l2,
                                         double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VACMIX_H */
