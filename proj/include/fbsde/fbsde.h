/* C interface to the fbsde solver library. */
#ifndef FBSDE_FBSDE_H
#define FBSDE_FBSDE_H

#include <stddef.h>

#if defined(_WIN32)
#define FBSDE_API __declspec(dllexport)
#else
#define FBSDE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fbsde_status {
  FBSDE_OK = 0,
  FBSDE_ERR_INVALID_ARGUMENT = 1,
  FBSDE_ERR_OUT_OF_DOMAIN = 2,
  FBSDE_ERR_DIVERGED = 3,
  FBSDE_ERR_NON_CONVERGENCE = 4,
  FBSDE_ERR_SINGULAR = 5,
  FBSDE_ERR_MISSING_EXACT = 6,
  FBSDE_ERR_IO = 7,
  FBSDE_ERR_USAGE = 8,
  FBSDE_ERR_INTERNAL = 9
} fbsde_status;

typedef enum fbsde_format { FBSDE_FORMAT_MARKDOWN = 0, FBSDE_FORMAT_CSV = 1 } fbsde_format;

typedef enum fbsde_row_status {
  FBSDE_ROW_OK = 0,
  FBSDE_ROW_DIVERGED = 1,
  FBSDE_ROW_NON_CONVERGENCE = 2
} fbsde_row_status;

/* Opaque handles. */
typedef struct fbsde_config fbsde_config;
typedef struct fbsde_report fbsde_report;

typedef struct fbsde_row {
  int k;
  int n_steps;
  int status; /* fbsde_row_status */
  double err_y;
  double err_z;
  double err_gamma;
  double err_a;
  int has_control;
  double err_control;
  size_t grid_points;
  double seconds;
} fbsde_row;

/* Rates are NaN when undefined. */
typedef struct fbsde_rates {
  double y;
  double z;
  double gamma;
  double a;
  double control;
} fbsde_rates;

typedef struct fbsde_values {
  double y;
  double z;
  double gamma;
  double a;
} fbsde_values;

/* Message of the last failed call on this thread; "" if none. */
FBSDE_API const char* fbsde_last_error(void);
FBSDE_API const char* fbsde_status_string(fbsde_status status);

/* Bits in the mantissa of the working precision (53 or 64). */
FBSDE_API int fbsde_precision_bits(void);

/* Scaled multistep coefficients alpha_{k,i} dt, i = 0..k; out needs k+1 slots. */
FBSDE_API fbsde_status fbsde_coefficients(int k, double* out, size_t len);

/* Gauss-Hermite rule for weight exp(-x^2); both arrays need ng slots. */
FBSDE_API fbsde_status fbsde_gauss_hermite(int ng, double* nodes, double* weights, size_t len);

/* Command-line style configuration (argv without the program name). */
FBSDE_API fbsde_status fbsde_config_parse(int argc, const char* const* argv, fbsde_config** out);
FBSDE_API fbsde_status fbsde_config_from_text(const char* text, fbsde_config** out);
FBSDE_API void fbsde_config_free(fbsde_config* cfg);
FBSDE_API size_t fbsde_config_warning_count(const fbsde_config* cfg);
FBSDE_API const char* fbsde_config_warning(const fbsde_config* cfg, size_t i);
FBSDE_API int fbsde_config_equal(const fbsde_config* a, const fbsde_config* b);

/* Writes at most cap bytes including the terminator; *needed receives the
 * full length plus one. Pass buf = NULL to query the size. */
FBSDE_API fbsde_status fbsde_config_serialize(const fbsde_config* cfg, char* buf, size_t cap,
                                              size_t* needed);

/* Single run with n_steps time steps; numeric and exact values at (t0, x0).
 * exact may be NULL. */
FBSDE_API fbsde_status fbsde_solve(const fbsde_config* cfg, int n_steps, fbsde_values* numeric,
                                   fbsde_values* exact);

/* Convergence sweep over the configured N values. Diverged and
 * non-converged runs are rows, not errors. */
FBSDE_API fbsde_status fbsde_sweep(const fbsde_config* cfg, fbsde_report** out);
FBSDE_API void fbsde_report_free(fbsde_report* report);
FBSDE_API size_t fbsde_report_row_count(const fbsde_report* report);
FBSDE_API fbsde_status fbsde_report_row(const fbsde_report* report, size_t i, fbsde_row* out);
FBSDE_API fbsde_status fbsde_report_rates(const fbsde_report* report, fbsde_rates* out);
FBSDE_API fbsde_status fbsde_report_render(const fbsde_report* report, fbsde_format format,
                                           char* buf, size_t cap, size_t* needed);
FBSDE_API fbsde_status fbsde_report_write(const fbsde_report* report, const char* path,
                                          fbsde_format format);

/* Least-squares rate of errors against ns; FBSDE_ERR_INVALID_ARGUMENT when
 * undefined. */
FBSDE_API fbsde_status fbsde_fit_rate(const double* errors, const int* ns, size_t len,
                                      double* rate);

/* Full command-line driver writing to stdout/stderr; returns the exit code. */
FBSDE_API int fbsde_cli_main(int argc, const char* const* argv);

#ifdef __cplusplus
}
#endif

#endif /* FBSDE_FBSDE_H */
