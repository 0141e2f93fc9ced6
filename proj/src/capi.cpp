#include "evatt.h"

#include <cstring>
#include <string>

#include "core/aer_io.hpp"
#include "core/attention.hpp"
#include "core/commands.hpp"
#include "core/error.hpp"
#include "core/metrics.hpp"

namespace {

thread_local std::string g_last_error;

evatt_status status_of(evatt::ErrorKind kind) {
  using evatt::ErrorKind;
  switch (kind) {
    case ErrorKind::Range: return EVATT_ERR_RANGE;
    case ErrorKind::Geometry: return EVATT_ERR_GEOMETRY;
    case ErrorKind::Parse: return EVATT_ERR_PARSE;
    case ErrorKind::Dimension: return EVATT_ERR_DIMENSION;
    case ErrorKind::Config: return EVATT_ERR_CONFIG;
    case ErrorKind::Io: return EVATT_ERR_IO;
    case ErrorKind::Diverged: return EVATT_ERR_DIVERGED;
    case ErrorKind::Invalid: return EVATT_ERR_INVALID;
  }
  return EVATT_ERR_UNKNOWN;
}

template <typename F>
evatt_status wrap(F&& body) {
  try {
    body();
    return EVATT_OK;
  } catch (const evatt::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return EVATT_ERR_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown error";
    return EVATT_ERR_UNKNOWN;
  }
}

evatt_status null_arg(const char* what) {
  g_last_error = std::string(what) + " must not be null";
  return EVATT_ERR_INVALID;
}

}  // namespace

struct evatt_frame {
  evatt::EventFrame frame;
};

struct evatt_stream {
  evatt::EventStream stream;
};

struct evatt_predictor {
  evatt::PredictorModel model;
  evatt::PredictorState state;
  evatt::ProbFrame last_probs;
  bool has_probs = false;
};

struct evatt_evaluator {
  evatt::EvaluatorModel model;
};

struct evatt_config {
  evatt::Config config;
};

extern "C" {

const char* evatt_last_error(void) { return g_last_error.c_str(); }

const char* evatt_version(void) { return "0.1.0"; }

/* ---- frames ---- */

namespace {

void require_geometry(int width, int height) {
  if (width < 1 || height < 1)
    evatt::fail(evatt::ErrorKind::Range,
                "frame geometry must be at least 1x1");
}

}  // namespace

evatt_status evatt_frame_create(int width, int height, evatt_frame** out) {
  if (!out) return null_arg("out");
  return wrap([&] {
    require_geometry(width, height);
    *out = new evatt_frame{evatt::EventFrame({width, height})};
  });
}

evatt_status evatt_frame_from_cells(int width, int height,
                                    const int8_t* cells, evatt_frame** out) {
  if (!out) return null_arg("out");
  if (!cells) return null_arg("cells");
  return wrap([&] {
    require_geometry(width, height);
    evatt::EventFrame frame({width, height});
    for (std::size_t i = 0; i < frame.cells.size(); ++i) {
      const int8_t v = cells[i];
      if (v < -1 || v > 1)
        evatt::fail(evatt::ErrorKind::Range,
                    "cells must hold -1, 0 or +1");
      frame.cells[i] = v;
    }
    *out = new evatt_frame{std::move(frame)};
  });
}

void evatt_frame_destroy(evatt_frame* frame) { delete frame; }

evatt_status evatt_frame_size(const evatt_frame* frame, int* width,
                              int* height) {
  if (!frame) return null_arg("frame");
  if (width) *width = frame->frame.geom.width;
  if (height) *height = frame->frame.geom.height;
  return EVATT_OK;
}

evatt_status evatt_frame_cells(const evatt_frame* frame, int8_t* out) {
  if (!frame) return null_arg("frame");
  if (!out) return null_arg("out");
  std::memcpy(out, frame->frame.cells.data(), frame->frame.cells.size());
  return EVATT_OK;
}

evatt_status evatt_frame_nonzero_count(const evatt_frame* frame, int* out) {
  if (!frame) return null_arg("frame");
  if (!out) return null_arg("out");
  *out = frame->frame.nonzero_count();
  return EVATT_OK;
}

evatt_status evatt_inject_noise(const evatt_frame* frame, double level,
                                uint64_t seed, evatt_frame** out) {
  if (!frame) return null_arg("frame");
  if (!out) return null_arg("out");
  return wrap([&] {
    *out = new evatt_frame{
        evatt::inject_noise(frame->frame, level, seed).frame};
  });
}

/* ---- metrics ---- */

evatt_status evatt_mss(const evatt_frame* a, const evatt_frame* b,
                       double* out) {
  if (!a || !b) return null_arg("frame");
  if (!out) return null_arg("out");
  return wrap([&] { *out = evatt::mss(a->frame, b->frame).value; });
}

evatt_status evatt_esim(const evatt_frame* a, const evatt_frame* b,
                        double* out) {
  if (!a || !b) return null_arg("frame");
  if (!out) return null_arg("out");
  return wrap([&] { *out = evatt::esim(a->frame, b->frame).value; });
}

evatt_status evatt_region_esim(const evatt_frame* a, const evatt_frame* b,
                               int window, double* out) {
  if (!a || !b) return null_arg("frame");
  if (!out) return null_arg("out");
  return wrap(
      [&] { *out = evatt::region_esim(a->frame, b->frame, window).value; });
}

evatt_status evatt_relative_esim(double esim_noisy, double esim_clean,
                                 double* out) {
  if (!out) return null_arg("out");
  return wrap([&] { *out = evatt::relative_esim(esim_noisy, esim_clean); });
}

/* ---- streams ---- */

evatt_status evatt_stream_read_aer(const char* path, evatt_stream** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return wrap([&] { *out = new evatt_stream{evatt::read_aer(path)}; });
}

evatt_status evatt_stream_from_events(int width, int height, const int64_t* t,
                                      const int32_t* x, const int32_t* y,
                                      const int32_t* p, size_t count,
                                      evatt_stream** out) {
  if (!out) return null_arg("out");
  if (count > 0 && (!t || !x || !y || !p)) return null_arg("event arrays");
  return wrap([&] {
    evatt::EventStream stream;
    stream.geom = {width, height};
    if (width <= 0 || height <= 0)
      evatt::fail(evatt::ErrorKind::Geometry, "non-positive geometry");
    stream.events.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      if (p[i] != 1 && p[i] != -1)
        evatt::fail(evatt::ErrorKind::Range, "polarity must be +1 or -1");
      if (x[i] < 0 || x[i] >= width || y[i] < 0 || y[i] >= height)
        evatt::fail(evatt::ErrorKind::Geometry, "event outside geometry");
      stream.events.push_back({t[i], x[i], y[i], p[i]});
    }
    *out = new evatt_stream{std::move(stream)};
  });
}

void evatt_stream_destroy(evatt_stream* stream) { delete stream; }

evatt_status evatt_stream_count(const evatt_stream* stream, size_t* out) {
  if (!stream) return null_arg("stream");
  if (!out) return null_arg("out");
  *out = stream->stream.events.size();
  return EVATT_OK;
}

evatt_status evatt_stream_write_aer(const evatt_stream* stream,
                                    const char* path) {
  if (!stream) return null_arg("stream");
  if (!path) return null_arg("path");
  return wrap([&] { evatt::write_aer(stream->stream, path); });
}

evatt_status evatt_bin_frame(const evatt_stream* stream, int64_t t_start,
                             int64_t dt, int index, evatt_frame** out) {
  if (!stream) return null_arg("stream");
  if (!out) return null_arg("out");
  return wrap([&] {
    if (index < 0)
      evatt::fail(evatt::ErrorKind::Range, "frame index must be >= 0");
    evatt::FrameSequence seq = evatt::bin_events(stream->stream, t_start, dt);
    if (index < seq.count()) {
      *out = new evatt_frame{std::move(seq.frames[index])};
    } else {
      evatt::EventFrame empty(stream->stream.geom, index);
      *out = new evatt_frame{std::move(empty)};
    }
  });
}

/* ---- predictor ---- */

evatt_status evatt_predictor_load(const char* checkpoint_path,
                                  evatt_predictor** out) {
  if (!checkpoint_path) return null_arg("checkpoint_path");
  if (!out) return null_arg("out");
  return wrap([&] {
    auto* p = new evatt_predictor{};
    try {
      p->model = evatt::predictor_from_checkpoint(
          evatt::load_checkpoint(checkpoint_path));
      p->state = evatt::initial_state(p->model, 1);
    } catch (...) {
      delete p;
      throw;
    }
    *out = p;
  });
}

void evatt_predictor_destroy(evatt_predictor* predictor) { delete predictor; }

evatt_status evatt_predictor_geometry(const evatt_predictor* predictor,
                                      int* width, int* height) {
  if (!predictor) return null_arg("predictor");
  if (width) *width = predictor->model.arch.geom.width;
  if (height) *height = predictor->model.arch.geom.height;
  return EVATT_OK;
}

evatt_status evatt_predictor_reset(evatt_predictor* predictor) {
  if (!predictor) return null_arg("predictor");
  return wrap([&] {
    predictor->state = evatt::initial_state(predictor->model, 1);
    predictor->has_probs = false;
  });
}

evatt_status evatt_predictor_step(evatt_predictor* predictor,
                                  const evatt_frame* input,
                                  evatt_frame** prediction) {
  if (!predictor) return null_arg("predictor");
  if (!input) return null_arg("input");
  if (!prediction) return null_arg("prediction");
  return wrap([&] {
    auto [state, probs] =
        evatt::predict_next(predictor->model, predictor->state, input->frame);
    predictor->state = std::move(state);
    predictor->last_probs = std::move(probs);
    predictor->has_probs = true;
    *prediction = new evatt_frame{evatt::sample_events(
        predictor->last_probs, evatt::SampleMode::argmax)};
  });
}

evatt_status evatt_predictor_probs(const evatt_predictor* predictor,
                                   double* out) {
  if (!predictor) return null_arg("predictor");
  if (!out) return null_arg("out");
  if (!predictor->has_probs) {
    g_last_error = "no step has been taken yet";
    return EVATT_ERR_INVALID;
  }
  std::memcpy(out, predictor->last_probs.p.data(),
              predictor->last_probs.p.size() * sizeof(double));
  return EVATT_OK;
}

/* ---- evaluator ---- */

evatt_status evatt_evaluator_load(const char* checkpoint_path,
                                  evatt_evaluator** out) {
  if (!checkpoint_path) return null_arg("checkpoint_path");
  if (!out) return null_arg("out");
  return wrap([&] {
    *out = new evatt_evaluator{evatt::evaluator_from_checkpoint(
        evatt::load_checkpoint(checkpoint_path))};
  });
}

void evatt_evaluator_destroy(evatt_evaluator* evaluator) { delete evaluator; }

evatt_status evatt_estimate_esim(evatt_evaluator* evaluator,
                                 const evatt_frame* reference,
                                 const evatt_frame* prediction, double* out) {
  if (!evaluator) return null_arg("evaluator");
  if (!reference || !prediction) return null_arg("frame");
  if (!out) return null_arg("out");
  return wrap([&] {
    *out = evatt::estimate_esim(evaluator->model, reference->frame,
                                prediction->frame);
  });
}

/* ---- config & commands ---- */

evatt_status evatt_config_create(evatt_config** out) {
  if (!out) return null_arg("out");
  return wrap([&] { *out = new evatt_config{}; });
}

evatt_status evatt_config_load(const char* path, evatt_config** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return wrap([&] { *out = new evatt_config{evatt::Config::from_file(path)}; });
}

void evatt_config_destroy(evatt_config* config) { delete config; }

evatt_status evatt_config_set(evatt_config* config, const char* key,
                              const char* value) {
  if (!config) return null_arg("config");
  if (!key) return null_arg("key");
  if (!value) return null_arg("value");
  return wrap([&] { config->config.set(key, value); });
}

evatt_status evatt_cmd_gen_data(const evatt_config* config) {
  if (!config) return null_arg("config");
  return wrap([&] { evatt::cmd_gen_data(config->config); });
}

evatt_status evatt_cmd_train(const evatt_config* config, const char* target) {
  if (!config) return null_arg("config");
  if (!target) return null_arg("target");
  return wrap([&] { evatt::cmd_train(config->config, target); });
}

evatt_status evatt_cmd_metrics(const evatt_config* config) {
  if (!config) return null_arg("config");
  return wrap([&] { evatt::cmd_metrics(config->config); });
}

evatt_status evatt_cmd_run_attention(const evatt_config* config) {
  if (!config) return null_arg("config");
  return wrap([&] { evatt::cmd_run_attention(config->config); });
}

evatt_status evatt_cmd_compare(const evatt_config* config) {
  if (!config) return null_arg("config");
  return wrap([&] { evatt::cmd_compare(config->config); });
}

evatt_status evatt_cmd_dump_frames(const evatt_config* config) {
  if (!config) return null_arg("config");
  return wrap([&] { evatt::cmd_dump_frames(config->config); });
}

}  // extern "C"
