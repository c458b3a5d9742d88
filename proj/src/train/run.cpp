#include "sgn/train/run.hpp"

#include <fstream>
#include <iostream>

#include <json.hpp>

#include "sgn/error.hpp"
#include "sgn/io/canonical.hpp"
#include "sgn/preprocess/preprocess.hpp"
#include "sgn/train/synthetic.hpp"
#include "sgn/util.hpp"

namespace sgn {

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace

PreparedData prepare_data(const RunConfig& config) {
  PreparedData data;
  std::vector<SkeletonSequence> raw;
  IdLists ids;
  if (config.data.source == DataSource::synthetic) {
    raw = make_synthetic(config.data.synthetic);
    ids.train_ids = {1};
    ids.test_ids = {2};
  } else {
    std::ifstream in(config.data.path);
    if (!in) throw DataError("cannot open canonical data file " + config.data.path);
    raw = load_canonical(in);
    ids = default_id_lists(config.data.dataset, config.data.protocol);
  }
  if (!config.data.train_ids.empty()) ids.train_ids = config.data.train_ids;
  if (!config.data.test_ids.empty()) ids.test_ids = config.data.test_ids;

  for (auto& seq : raw) {
    if (seq.joints != config.model.num_joints) {
      throw DataError("record '" + seq.source + "' has " + std::to_string(seq.joints) + " joints, model expects " +
                      std::to_string(config.model.num_joints));
    }
    if (is_ghost(seq)) {
      ++data.ghosts_dropped;
      continue;
    }
    data.records.push_back(translate_to_first_frame(seq, config.data.translation_joint));
  }
  const bool carve = config.data.source == DataSource::canonical;
  SplitOptions split;
  split.validation_fraction = carve ? config.data.validation_fraction : 0.0;
  split.seed = config.seed;
  split.num_classes = config.model.num_classes;
  data.manifest = split_protocol(data.records, config.data.protocol, ids, split);
  data.train = data.manifest.indices(Split::train);
  data.val = data.manifest.indices(Split::val);
  data.test = data.manifest.indices(Split::test);
  return data;
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::string out = metrics_header() + '\n';
  for (const auto& r : rows) out += metrics_line(r) + '\n';
  return out;
}

template <typename T>
Checkpoint<T> make_checkpoint(const RunConfig& config, const SGNModel<T>& model, std::size_t epoch,
                              const std::vector<MetricsRow>& rows, const AdamState<T>* optimizer) {
  Checkpoint<T> ckpt;
  ckpt.config_text = config.to_text();
  ckpt.epoch = epoch;
  ckpt.metrics = metrics_csv(rows);
  ckpt.tensors = model.state();
  if (optimizer != nullptr) ckpt.optimizer = *optimizer;
  return ckpt;
}

template <typename T>
SGNModel<T> model_from_checkpoint(const Checkpoint<T>& ckpt, RunConfig* config_out) {
  RunConfig config = RunConfig::from_tree(ConfigTree::parse_text(ckpt.config_text, "checkpoint"));
  SGNModel<T> model(config.model);
  model.load_state(ckpt.tensors);
  if (config_out != nullptr) *config_out = config;
  return model;
}

template <typename T>
RunResult run_training(const RunConfig& config, const PreparedData& data, const RunOptions& options,
                       const Checkpoint<T>* resume) {
  config.validate();
  SGNModel<T> model(config.model);
  Trainer<T> trainer(model, config.train);
  RunResult result;
  std::size_t start_epoch = 1;
  if (resume != nullptr) {
    model.load_state(resume->tensors);
    if (resume->optimizer) trainer.optimizer() = *resume->optimizer;
    result.rows = parse_metrics_csv(resume->metrics);
    start_epoch = resume->epoch + 1;
  }
  result.parameter_count = model.parameter_count();

  const bool write = !options.out_dir.empty();
  if (write) {
    std::filesystem::create_directories(options.out_dir);
    write_file(options.out_dir / "run_config.toml", config.to_text());
    write_file(options.out_dir / "params.txt", parameter_manifest(model.state()));
    write_file(options.out_dir / "metrics.csv", metrics_csv(result.rows));
  }
  if (options.log) {
    *options.log << "model: " << result.parameter_count << " parameters; train " << data.train.size() << ", val "
                 << data.val.size() << ", test " << data.test.size() << " records\n";
  }

  EvalOptions val_options;
  val_options.views = config.train.eval_views;
  val_options.seed = derive_seed(config.seed, {0x76616c});
  val_options.batch_size = config.train.batch_size;

  for (std::size_t epoch = start_epoch; epoch <= config.train.epochs; ++epoch) {
    MetricsRow row = trainer.train_epoch(data.records, data.train, epoch);
    if (config.train.validate_every > 0 && !data.val.empty() && epoch % config.train.validate_every == 0) {
      row.val_accuracy = evaluate(model, data.records, data.val, val_options).accuracy;
    }
    if (config.deterministic) row.seconds = 0.0;
    result.rows.push_back(row);
    if (options.log) *options.log << metrics_line(row) << '\n';
    if (write) {
      std::ofstream(options.out_dir / "metrics.csv", std::ios::app) << metrics_line(row) << '\n';
      const auto ckpt = make_checkpoint(config, model, epoch, result.rows, &trainer.optimizer());
      save_checkpoint(options.out_dir / "checkpoint.bin", ckpt);
      if (config.train.checkpoint_every > 0 && epoch % config.train.checkpoint_every == 0) {
        save_checkpoint(options.out_dir / ("checkpoint_epoch" + std::to_string(epoch) + ".bin"), ckpt);
      }
    }
    if (options.stop_after && epoch >= *options.stop_after) return result;
  }

  if (!data.test.empty()) {
    EvalOptions test_options = val_options;
    test_options.seed = derive_seed(config.seed, {0x74657374});
    result.test = evaluate(model, data.records, data.test, test_options);
    if (options.log) *options.log << "test accuracy: " << format_double(result.test->accuracy) << '\n';
    if (write) {
      nlohmann::ordered_json report;
      report["parameters"] = result.parameter_count;
      report["epochs"] = config.train.epochs;
      report["test_accuracy"] = result.test->accuracy;
      report["test_sources"] = result.test->sources.size();
      write_file(options.out_dir / "report.json", report.dump(2) + '\n');
      write_file(options.out_dir / "per_class.csv", per_class_csv(*result.test));
    }
  }
  return result;
}

template RunResult run_training(const RunConfig&, const PreparedData&, const RunOptions&, const Checkpoint<float>*);
template RunResult run_training(const RunConfig&, const PreparedData&, const RunOptions&, const Checkpoint<double>*);
template Checkpoint<float> make_checkpoint(const RunConfig&, const SGNModel<float>&, std::size_t,
                                           const std::vector<MetricsRow>&, const AdamState<float>*);
template Checkpoint<double> make_checkpoint(const RunConfig&, const SGNModel<double>&, std::size_t,
                                            const std::vector<MetricsRow>&, const AdamState<double>*);
template SGNModel<float> model_from_checkpoint(const Checkpoint<float>&, RunConfig*);
template SGNModel<double> model_from_checkpoint(const Checkpoint<double>&, RunConfig*);

}  // namespace sgn
