#ifndef PAIRSIM_H
#define PAIRSIM_H

/* C interface to the pair-source simulator.
 *
 * Every function returns a pairsim_status. On failure the message of the last
 * error on the calling thread is available from pairsim_last_error(). Handles
 * are opaque and must be released with the matching *_free function. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PAIRSIM_API __declspec(dllexport)
#else
#define PAIRSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pairsim_status {
  PAIRSIM_OK = 0,
  PAIRSIM_USAGE_ERROR = 1,   /* bad handle or argument */
  PAIRSIM_CONFIG_ERROR = 2,  /* configuration, lookup or file-format problem */
  PAIRSIM_IO_ERROR = 3,
  PAIRSIM_NUMERIC_ERROR = 4  /* solver, fit or inversion failure */
} pairsim_status;

typedef struct pairsim_scenario pairsim_scenario;
typedef struct pairsim_histogram pairsim_histogram;

PAIRSIM_API const char* pairsim_version(void);
/* Message of the last failure on this thread; empty after success. */
PAIRSIM_API const char* pairsim_last_error(void);

/* Scenarios */
PAIRSIM_API pairsim_status pairsim_scenario_load(const char* path, pairsim_scenario** out);
PAIRSIM_API pairsim_status pairsim_scenario_parse(const char* text, pairsim_scenario** out);
PAIRSIM_API void pairsim_scenario_free(pairsim_scenario* scenario);
PAIRSIM_API pairsim_status pairsim_scenario_kind(const pairsim_scenario* scenario,
                                                 const char** kind);
/* Writes all output files into out_dir. seed_override is used when
 * has_seed_override is non-zero. */
PAIRSIM_API pairsim_status pairsim_scenario_run(const pairsim_scenario* scenario,
                                                const char* out_dir, int has_seed_override,
                                                uint64_t seed_override);

/* Analysis of a histogram or scan CSV into a report file. */
typedef struct pairsim_analyze_options {
  double spacing_ns;    /* expected peak spacing, default 12.5 */
  int beamsplitter;     /* non-zero: pairs split by a 50/50 coupler */
  int no_pileup;        /* non-zero: skip pile-up correction */
  double singles_1_hz;  /* accidental subtraction for scans when all four > 0 */
  double singles_2_hz;
  double window_ns;
  double duration_s;
} pairsim_analyze_options;

PAIRSIM_API void pairsim_analyze_options_init(pairsim_analyze_options* options);
PAIRSIM_API pairsim_status pairsim_analyze_file(const char* input_path,
                                                const pairsim_analyze_options* options,
                                                const char* report_path);

/* Poling-period design. Writes report.txt and spectrum.csv into out_dir.
 * model_params may be NULL when n_params is 0. */
typedef struct pairsim_qpm_options {
  const char* model;  /* lithium_niobate, constant, cauchy */
  const double* model_params;
  size_t n_params;
  double temperature_c;
  double pump_nm;
  double signal_nm;
  double length_mm;
  double grid_start_nm;  /* 0 = signal - 120 nm */
  double grid_stop_nm;   /* 0 = signal + 120 nm */
  size_t grid_points;    /* 0 = 2401 */
} pairsim_qpm_options;

PAIRSIM_API void pairsim_qpm_options_init(pairsim_qpm_options* options);
PAIRSIM_API pairsim_status pairsim_qpm_design(const pairsim_qpm_options* options,
                                              const char* out_dir);
PAIRSIM_API pairsim_status pairsim_qpm_period(const char* model, const double* model_params,
                                              size_t n_params, double pump_nm, double signal_nm,
                                              double temperature_c, double* period_um);

/* Histograms */
PAIRSIM_API pairsim_status pairsim_histogram_load(const char* path, pairsim_histogram** out);
PAIRSIM_API void pairsim_histogram_free(pairsim_histogram* histogram);
PAIRSIM_API pairsim_status pairsim_histogram_bins(const pairsim_histogram* histogram,
                                                  size_t* bins, double* origin_ns,
                                                  double* bin_width_ns);
/* Copies up to capacity counts into counts. */
PAIRSIM_API pairsim_status pairsim_histogram_counts(const pairsim_histogram* histogram,
                                                    uint64_t* counts, size_t capacity);
PAIRSIM_API pairsim_status pairsim_histogram_sca(const pairsim_histogram* histogram,
                                                 double center_ns, double width_ns,
                                                 double duration_s, double* rate_hz);

/* Numeric helpers */
PAIRSIM_API pairsim_status pairsim_conjugate_wavelength(double pump_nm, double signal_nm,
                                                        double* idler_nm);
PAIRSIM_API pairsim_status pairsim_estimate_efficiency(double singles_1_hz, double singles_2_hz,
                                                       double coincidences_hz,
                                                       double pump_power_uw,
                                                       double pump_wavelength_nm, double* eta);
PAIRSIM_API pairsim_status pairsim_fit_visibility(const double* phases_rad, const double* counts,
                                                  size_t n, double* visibility, double* sigma);
PAIRSIM_API pairsim_status pairsim_bell_significance(double visibility, double sigma,
                                                     double* sigmas, double* chsh);

#ifdef __cplusplus
}
#endif

#endif /* PAIRSIM_H */
