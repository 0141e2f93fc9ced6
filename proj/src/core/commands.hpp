#pragma once

#include <string>

#include "core/config.hpp"
#include "core/scene.hpp"

namespace evatt {

// Output root precedence: main.out_root in the config, then the
// EVATT_OUT_ROOT environment variable, then "out".
std::string resolve_out_root(const Config& cfg);

// Reads the manifest written by cmd_gen_data and bins every AER file with
// the configured frame interval. Fails with a Config error when the dataset
// has not been generated yet.
Dataset load_dataset(const Config& cfg);

void cmd_gen_data(const Config& cfg);
void cmd_train(const Config& cfg, const std::string& target);
void cmd_metrics(const Config& cfg);
void cmd_run_attention(const Config& cfg);
void cmd_compare(const Config& cfg);
void cmd_dump_frames(const Config& cfg);

}  // namespace evatt
