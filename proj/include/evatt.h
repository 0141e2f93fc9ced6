#ifndef EVATT_H
#define EVATT_H

/* C interface to the event-camera attention toolkit: ternary event frames,
 * frame similarity metrics, the spiking next-frame predictor, the learned
 * frame-quality estimator and the config-driven experiment commands.
 *
 * Every function that can fail returns an evatt_status; on failure
 * evatt_last_error() holds a message for the calling thread. Objects are
 * opaque handles created and destroyed through this interface only. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define EVATT_API __declspec(dllexport)
#else
#define EVATT_API __attribute__((visibility("default")))
#endif

typedef enum evatt_status {
  EVATT_OK = 0,
  EVATT_ERR_RANGE = 1,     /* value outside its admissible interval */
  EVATT_ERR_GEOMETRY = 2,  /* coordinates outside the sensor geometry */
  EVATT_ERR_PARSE = 3,     /* malformed input text */
  EVATT_ERR_DIMENSION = 4, /* shape mismatch between operands */
  EVATT_ERR_CONFIG = 5,    /* invalid or incomplete configuration */
  EVATT_ERR_IO = 6,        /* filesystem failure */
  EVATT_ERR_DIVERGED = 7,  /* non-finite loss or gradient */
  EVATT_ERR_INVALID = 8,   /* other contract violation */
  EVATT_ERR_UNKNOWN = 9
} evatt_status;

EVATT_API const char* evatt_last_error(void);
EVATT_API const char* evatt_version(void);

/* ---- ternary event frames (cells hold -1, 0 or +1) ---- */

typedef struct evatt_frame evatt_frame;

EVATT_API evatt_status evatt_frame_create(int width, int height,
                                          evatt_frame** out);
EVATT_API evatt_status evatt_frame_from_cells(int width, int height,
                                              const int8_t* cells,
                                              evatt_frame** out);
EVATT_API void evatt_frame_destroy(evatt_frame* frame);
EVATT_API evatt_status evatt_frame_size(const evatt_frame* frame, int* width,
                                        int* height);
/* Copies width*height row-major cells into out. */
EVATT_API evatt_status evatt_frame_cells(const evatt_frame* frame,
                                         int8_t* out);
EVATT_API evatt_status evatt_frame_nonzero_count(const evatt_frame* frame,
                                                 int* out);

/* Adds ceil(level * nonzero) spurious events on empty cells. */
EVATT_API evatt_status evatt_inject_noise(const evatt_frame* frame,
                                          double level, uint64_t seed,
                                          evatt_frame** out);

/* ---- frame similarity ---- */

EVATT_API evatt_status evatt_mss(const evatt_frame* a, const evatt_frame* b,
                                 double* out);
EVATT_API evatt_status evatt_esim(const evatt_frame* a, const evatt_frame* b,
                                  double* out);
/* Esim over frames polarized with a window x window majority vote. */
EVATT_API evatt_status evatt_region_esim(const evatt_frame* a,
                                         const evatt_frame* b, int window,
                                         double* out);
EVATT_API evatt_status evatt_relative_esim(double esim_noisy,
                                           double esim_clean, double* out);

/* ---- event streams ---- */

typedef struct evatt_stream evatt_stream;

EVATT_API evatt_status evatt_stream_read_aer(const char* path,
                                             evatt_stream** out);
EVATT_API evatt_status evatt_stream_from_events(
    int width, int height, const int64_t* t, const int32_t* x,
    const int32_t* y, const int32_t* p, size_t count, evatt_stream** out);
EVATT_API void evatt_stream_destroy(evatt_stream* stream);
EVATT_API evatt_status evatt_stream_count(const evatt_stream* stream,
                                          size_t* out);
EVATT_API evatt_status evatt_stream_write_aer(const evatt_stream* stream,
                                              const char* path);
/* Equal-time binning of one frame: events in [t_start + index*dt,
 * t_start + (index+1)*dt), net-polarity sign per cell. */
EVATT_API evatt_status evatt_bin_frame(const evatt_stream* stream,
                                       int64_t t_start, int64_t dt, int index,
                                       evatt_frame** out);

/* ---- spiking next-frame predictor ---- */

typedef struct evatt_predictor evatt_predictor;

EVATT_API evatt_status evatt_predictor_load(const char* checkpoint_path,
                                            evatt_predictor** out);
EVATT_API void evatt_predictor_destroy(evatt_predictor* predictor);
EVATT_API evatt_status evatt_predictor_geometry(
    const evatt_predictor* predictor, int* width, int* height);
/* Clears the temporal state (membrane potentials and spikes). */
EVATT_API evatt_status evatt_predictor_reset(evatt_predictor* predictor);
/* Feeds one frame, returns the argmax prediction of the next frame and
 * advances the temporal state. */
EVATT_API evatt_status evatt_predictor_step(evatt_predictor* predictor,
                                            const evatt_frame* input,
                                            evatt_frame** prediction);
/* Class probabilities of the last step: 3*width*height doubles, class-major
 * (no-event plane, then positive, then negative). */
EVATT_API evatt_status evatt_predictor_probs(const evatt_predictor* predictor,
                                             double* out);

/* ---- learned frame-quality estimator ---- */

typedef struct evatt_evaluator evatt_evaluator;

EVATT_API evatt_status evatt_evaluator_load(const char* checkpoint_path,
                                            evatt_evaluator** out);
EVATT_API void evatt_evaluator_destroy(evatt_evaluator* evaluator);
/* Estimated region-4 Esim of prediction against reference, in [0, 1]. */
EVATT_API evatt_status evatt_estimate_esim(evatt_evaluator* evaluator,
                                           const evatt_frame* reference,
                                           const evatt_frame* prediction,
                                           double* out);

/* ---- config-driven experiment commands (mirror the CLI) ---- */

typedef struct evatt_config evatt_config;

EVATT_API evatt_status evatt_config_create(evatt_config** out);
EVATT_API evatt_status evatt_config_load(const char* path, evatt_config** out);
EVATT_API void evatt_config_destroy(evatt_config* config);
/* Dotted "section.key" form, same as --set on the CLI. */
EVATT_API evatt_status evatt_config_set(evatt_config* config, const char* key,
                                        const char* value);

EVATT_API evatt_status evatt_cmd_gen_data(const evatt_config* config);
EVATT_API evatt_status evatt_cmd_train(const evatt_config* config,
                                       const char* target);
EVATT_API evatt_status evatt_cmd_metrics(const evatt_config* config);
EVATT_API evatt_status evatt_cmd_run_attention(const evatt_config* config);
EVATT_API evatt_status evatt_cmd_compare(const evatt_config* config);
EVATT_API evatt_status evatt_cmd_dump_frames(const evatt_config* config);

#ifdef __cplusplus
}
#endif

#endif /* EVATT_H */
