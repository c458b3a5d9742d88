#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sgn/config/config.hpp"
#include "sgn/io/protocol.hpp"
#include "sgn/io/skeleton.hpp"
#include "sgn/model/checkpoint.hpp"
#include "sgn/model/model.hpp"
#include "sgn/train/trainer.hpp"

namespace sgn {

struct PreparedData {
  std::vector<SkeletonSequence> records;  // ghost-free, translated to the first frame
  DatasetManifest manifest;
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
  std::size_t ghosts_dropped = 0;
};

// Loads the configured source, drops ghost bodies, translates every body to its
// first frame and assigns splits.
PreparedData prepare_data(const RunConfig& config);

struct RunOptions {
  std::filesystem::path out_dir;           // empty: nothing is written
  std::ostream* log = nullptr;
  std::optional<std::size_t> stop_after;   // stop after this epoch (checkpoint kept)
};

struct RunResult {
  std::vector<MetricsRow> rows;
  std::optional<EvalResult> test;
  std::size_t parameter_count = 0;
};

// Trains for config.train.epochs, starting after `resume->epoch` when given.
// Writes run_config.toml, metrics.csv, checkpoint.bin (after every epoch),
// params.txt and, once finished, report.json and per_class.csv into out_dir.
template <typename T>
RunResult run_training(const RunConfig& config, const PreparedData& data, const RunOptions& options,
                       const Checkpoint<T>* resume = nullptr);

template <typename T>
Checkpoint<T> make_checkpoint(const RunConfig& config, const SGNModel<T>& model, std::size_t epoch,
                              const std::vector<MetricsRow>& rows, const AdamState<T>* optimizer);

// Rebuilds a model from a checkpoint's stored configuration and tensors.
template <typename T>
SGNModel<T> model_from_checkpoint(const Checkpoint<T>& ckpt, RunConfig* config_out = nullptr);

std::string metrics_csv(const std::vector<MetricsRow>& rows);

}  // namespace sgn
