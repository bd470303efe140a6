#ifndef SCT_H
#define SCT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes. Zero is success, everything else is an error.
typedef enum SctStatus {
  SCT_STATUS_OK = 0,
  SCT_STATUS_NULL_POINTER = 1,
  SCT_STATUS_INVALID_UTF8 = 2,
  SCT_STATUS_CONFIG = 3,
  SCT_STATUS_IO = 4,
  SCT_STATUS_FORMAT = 5,
  SCT_STATUS_INFEASIBLE = 6,
  SCT_STATUS_INVALID_ARGUMENT = 7,
  SCT_STATUS_BUFFER_TOO_SMALL = 8,
  SCT_STATUS_PANIC = 9,
} SctStatus;

// Transmission chain selector.
typedef enum SctChain {
  SCT_CHAIN_DIGITAL = 0,
  SCT_CHAIN_ANALOG = 1,
  SCT_CHAIN_BASELINE = 2,
} SctChain;

// Opaque trial configuration.
typedef struct SctConfig SctConfig;

// Opaque trial result.
typedef struct SctReport SctReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *sct_version(void);

// Copies the last error message of this thread into `buf`.
//
// Returns the message length excluding the terminator, 0 when there is none.
// When `buf_len` is too small the message is truncated but still terminated.
//
// # Safety
// `buf` must be null or point to `buf_len` writable bytes.
size_t sct_last_error_message(char *buf, size_t buf_len);

// Default configuration. Never null.
struct SctConfig *sct_config_default(void);

// Parses `key = value` config text.
//
// # Safety
// `text` must be a NUL-terminated string, `out` a valid pointer.
enum SctStatus sct_config_parse(const char *text, struct SctConfig **out);

// Reads a config file.
//
// # Safety
// `path` must be a NUL-terminated string, `out` a valid pointer.
enum SctStatus sct_config_from_file(const char *path, struct SctConfig **out);

// # Safety
// `cfg` must be null or a handle from this library, not yet freed.
void sct_config_free(struct SctConfig *cfg);

// # Safety
// `cfg` must be a live config handle.
enum SctStatus sct_config_set_seed(struct SctConfig *cfg, uint64_t seed);

// Channel symbols per source pixel; must be positive.
//
// # Safety
// `cfg` must be a live config handle.
enum SctStatus sct_config_set_rate(struct SctConfig *cfg, double rate);

// # Safety
// `cfg` must be a live config handle.
enum SctStatus sct_config_set_snr_db(struct SctConfig *cfg, double snr_db);

// # Safety
// `cfg` must be a live config handle.
enum SctStatus sct_config_set_chain(struct SctConfig *cfg, enum SctChain chain);

// # Safety
// `cfg` must be a live config handle.
enum SctStatus sct_config_set_correction(struct SctConfig *cfg, bool enabled);

// Runs one trial.
//
// # Safety
// `cfg` must be a live config handle, `out` a valid pointer.
enum SctStatus sct_run_trial(const struct SctConfig *cfg, struct SctReport **out);

// # Safety
// `report` must be null or a handle from this library, not yet freed.
void sct_report_free(struct SctReport *report);

// Copies the reconstructed 8-bit image, row-major, into `buf`.
//
// # Safety
// `report` must be a live report handle; `buf` must point to `buf_len`
// writable bytes.
enum SctStatus sct_report_image(const struct SctReport *report, uint8_t *buf, size_t buf_len);

// CRC-16 of a byte buffer, as used for packet checks.
//
// # Safety
// `data` must point to `len` readable bytes (or be null with `len == 0`).
uint16_t sct_crc16(const uint8_t *data, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCT_H */
