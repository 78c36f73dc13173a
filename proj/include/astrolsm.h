/* C interface to the astrocyte liquid state machine library.
 *
 * All functions returning alsm_status set a thread-local message readable
 * via alsm_last_error() on failure. Handles are opaque; every *_free /
 * *_close / *_destroy accepts NULL.
 */
#ifndef ASTROLSM_H
#define ASTROLSM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum alsm_status {
  ALSM_OK = 0,
  ALSM_ERR_CONFIG = 2,   /* invalid configuration or precondition violation */
  ALSM_ERR_IO = 3,       /* missing or unreadable/unwritable artifacts */
  ALSM_ERR_DIVERGED = 4, /* a simulation or training run produced non-finite values */
  ALSM_ERR_INTERNAL = 5
} alsm_status;

const char* alsm_version(void);

/* Message for the most recent failure on this thread; never NULL. */
const char* alsm_last_error(void);

typedef struct alsm_config alsm_config;
typedef struct alsm_dataset alsm_dataset;
typedef struct alsm_reservoir alsm_reservoir;

/* ---- configuration ---- */

/* All defaults; never fails except on allocation. */
alsm_config* alsm_config_default(void);
alsm_status alsm_config_load(const char* path, alsm_config** out);
alsm_status alsm_config_parse(const char* json_text, alsm_config** out);
void alsm_config_set_seed(alsm_config* cfg, uint64_t seed);
void alsm_config_set_jobs(alsm_config* cfg, int jobs);
void alsm_config_free(alsm_config* cfg);

/* ---- pipeline stages ---- */

alsm_status alsm_run_generate(const alsm_config* cfg, const char* out_dir);
alsm_status alsm_run_train(const alsm_config* cfg, const char* dataset_dir, const char* out_dir);
alsm_status alsm_run_sweep(const alsm_config* cfg, const char* dataset_dir, const char* out_dir);
alsm_status alsm_run_analyze(const alsm_config* cfg, const char* records_csv,
                             const char* out_dir);
alsm_status alsm_run_plot(const alsm_config* cfg, const char* analysis_dir, const char* out_dir);

/* ---- dataset inspection ---- */

alsm_status alsm_dataset_open(const char* dir, alsm_dataset** out);
void alsm_dataset_close(alsm_dataset* dataset);
alsm_status alsm_dataset_counts(const alsm_dataset* dataset, size_t* train, size_t* val,
                                size_t* test);

/* ---- direct reservoir access ---- */

/* Builds the reservoir the config describes (seed derived from the global
 * seed exactly as the train stage derives it). */
alsm_status alsm_reservoir_create(const alsm_config* cfg, alsm_reservoir** out);
void alsm_reservoir_destroy(alsm_reservoir* reservoir);

/* Length of the feature vector (the configured neuron count), or -1 on NULL. */
int alsm_reservoir_feature_dim(const alsm_reservoir* reservoir);

/* window: 150 doubles (50 time steps x 3 state dims, row-major), already
 * normalized; features: out buffer of feature_dim doubles. */
alsm_status alsm_reservoir_features(const alsm_reservoir* reservoir, const double* window,
                                    size_t window_len, double* features, size_t features_len);

#ifdef __cplusplus
}
#endif

#endif /* ASTROLSM_H */
