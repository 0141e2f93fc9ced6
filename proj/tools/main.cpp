#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <evatt.h>

namespace {

const char* status_name(evatt_status s) {
  switch (s) {
    case EVATT_OK: return "ok";
    case EVATT_ERR_RANGE: return "range";
    case EVATT_ERR_GEOMETRY: return "geometry";
    case EVATT_ERR_PARSE: return "parse";
    case EVATT_ERR_DIMENSION: return "dimension";
    case EVATT_ERR_CONFIG: return "config";
    case EVATT_ERR_IO: return "io";
    case EVATT_ERR_DIVERGED: return "diverged";
    case EVATT_ERR_INVALID: return "invalid";
    case EVATT_ERR_UNKNOWN: break;
  }
  return "unknown";
}

struct CommonOpts {
  std::string config_path;
  std::string seed;
  std::string out_root;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("-c,--config", opts.config_path,
                  "INI experiment config file");
  cmd->add_option("--seed", opts.seed, "Master seed (sets main.seed)");
  cmd->add_option("--out-root", opts.out_root,
                  "Output directory root (sets main.out_root)");
  cmd->add_option("--set", opts.sets,
                  "Override a config entry, dotted key=value form");
}

int report(evatt_status s) {
  std::fprintf(stderr, "error: %s [%s]\n", evatt_last_error(),
               status_name(s));
  return 1;
}

// Config assembly shared by every subcommand: file, then the convenience
// flags, then explicit --set overrides (strongest).
evatt_status build_config(const CommonOpts& opts, evatt_config** out) {
  evatt_status s = opts.config_path.empty()
                       ? evatt_config_create(out)
                       : evatt_config_load(opts.config_path.c_str(), out);
  if (s != EVATT_OK) return s;
  if (!opts.seed.empty()) {
    s = evatt_config_set(*out, "main.seed", opts.seed.c_str());
    if (s != EVATT_OK) return s;
  }
  if (!opts.out_root.empty()) {
    s = evatt_config_set(*out, "main.out_root", opts.out_root.c_str());
    if (s != EVATT_OK) return s;
  }
  for (const std::string& kv : opts.sets) {
    const std::size_t eq = kv.find('=');
    s = evatt_config_set(*out, kv.substr(0, eq).c_str(),
                         kv.substr(eq + 1).c_str());
    if (s != EVATT_OK) return s;
  }
  return EVATT_OK;
}

template <typename Run>
int with_config(const CommonOpts& opts, Run run) {
  for (const std::string& kv : opts.sets) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::fprintf(stderr, "error: --set expects key=value, got '%s'\n",
                   kv.c_str());
      return 1;
    }
  }
  evatt_config* cfg = nullptr;
  evatt_status s = build_config(opts, &cfg);
  if (s != EVATT_OK) {
    if (cfg) evatt_config_destroy(cfg);
    return report(s);
  }
  s = run(cfg);
  evatt_config_destroy(cfg);
  return s == EVATT_OK ? 0 : report(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-camera predictive attention toolkit"};
  app.require_subcommand(1);
  int rc = 0;

  CommonOpts gen_opts;
  CLI::App* gen = app.add_subcommand(
      "gen-data", "Generate the bouncing-shapes event dataset");
  add_common(gen, gen_opts);
  gen->callback([&] {
    rc = with_config(gen_opts,
                     [](evatt_config* c) { return evatt_cmd_gen_data(c); });
  });

  CommonOpts train_opts;
  std::string train_target;
  CLI::App* train =
      app.add_subcommand("train", "Train the predictor or the evaluator");
  train->add_option("target", train_target, "predictor or evaluator")
      ->required();
  add_common(train, train_opts);
  train->callback([&] {
    rc = with_config(train_opts, [&](evatt_config* c) {
      return evatt_cmd_train(c, train_target.c_str());
    });
  });

  CommonOpts metrics_opts;
  CLI::App* metrics = app.add_subcommand(
      "metrics", "Frame similarity metrics over AER files or the built-in "
                 "shifted-ball scenario");
  add_common(metrics, metrics_opts);
  metrics->callback([&] {
    rc = with_config(metrics_opts,
                     [](evatt_config* c) { return evatt_cmd_metrics(c); });
  });

  CommonOpts run_opts;
  CLI::App* run = app.add_subcommand(
      "run-attention", "Run the gated sensor-predictor loop and write traces");
  add_common(run, run_opts);
  run->callback([&] {
    rc = with_config(run_opts, [](evatt_config* c) {
      return evatt_cmd_run_attention(c);
    });
  });

  CommonOpts cmp_opts;
  CLI::App* cmp = app.add_subcommand(
      "compare", "Compare gating policies at matched attention rates");
  add_common(cmp, cmp_opts);
  cmp->callback([&] {
    rc = with_config(cmp_opts,
                     [](evatt_config* c) { return evatt_cmd_compare(c); });
  });

  CommonOpts dump_opts;
  CLI::App* dump = app.add_subcommand(
      "dump-frames", "Render an AER file to PGM images, one per time bin");
  add_common(dump, dump_opts);
  dump->callback([&] {
    rc = with_config(dump_opts,
                     [](evatt_config* c) { return evatt_cmd_dump_frames(c); });
  });

  CLI11_PARSE(app, argc, argv);
  return rc;
}
