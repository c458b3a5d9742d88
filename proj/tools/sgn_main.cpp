// sgn: convert, train, eval, resume, inspect and verify from the command line.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sgn/config/config.hpp"
#include "sgn/error.hpp"
#include "sgn/io/canonical.hpp"
#include "sgn/io/ntu.hpp"
#include "sgn/model/checkpoint.hpp"
#include "sgn/model/frame_level.hpp"
#include "sgn/preprocess/preprocess.hpp"
#include "sgn/train/run.hpp"
#include "sgn/util.hpp"
#include "sgn/verify/acceptance.hpp"

namespace fs = std::filesystem;
using namespace sgn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerify = 1;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

// Verification failures travel as an exception so every command shares one exit path.
struct VerifyFailure {};

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

// ------------------------------------------------------------------ config

struct ConfigFlags {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  bool deterministic = false;
};

RunConfig resolve_config(const ConfigFlags& flags) {
  ConfigTree tree;
  fs::path base;
  if (!flags.config.empty()) {
    tree = ConfigTree::load(flags.config);
    base = fs::path(flags.config).parent_path();
  }
  for (const auto& s : flags.sets) tree.apply_override(s);
  if (flags.seed) tree.set_raw("seed", std::to_string(*flags.seed));
  if (flags.deterministic) tree.set_raw("deterministic", "true");
  RunConfig config = RunConfig::from_tree(tree);
  // Relative data paths are taken from the config file's directory.
  if (!config.data.path.empty() && fs::path(config.data.path).is_relative() && !base.empty()) {
    config.data.path = (base / config.data.path).lexically_normal().string();
  }
  config.validate();
  return config;
}

// Byte 12 of a checkpoint holds sizeof(T), after the 8-byte magic and the u32 version.
Precision checkpoint_precision(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  char head[13] = {};
  in.read(head, sizeof head);
  if (in.gcount() != sizeof head || std::string(head, 8) != kCheckpointMagic) {
    throw SchemaError(path.string() + " is not a checkpoint");
  }
  if (head[12] == 4) return Precision::float32;
  if (head[12] == 8) return Precision::float64;
  throw SchemaError(path.string() + ": unsupported element width " + std::to_string(int(head[12])));
}

template <typename F>
auto dispatch(Precision p, F&& f) {
  if (p == Precision::float64) return f(double{});
  return f(float{});
}

// Checkpoint config with --set overrides layered on top.
RunConfig checkpoint_config(const std::string& config_text, const std::vector<std::string>& sets) {
  ConfigTree tree = ConfigTree::parse_text(config_text, "checkpoint");
  for (const auto& s : sets) tree.apply_override(s);
  RunConfig config = RunConfig::from_tree(tree);
  config.validate();
  return config;
}

// ----------------------------------------------------------------- convert

std::vector<fs::path> skeleton_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError("not a readable directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".skeleton") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

int cmd_convert(const fs::path& input, const fs::path& output, const std::string& dataset) {
  std::size_t clips = 0, bodies = 0, ghosts = 0, kept = 0;
  std::ostringstream text;
  write_canonical_header(text);
  for (const auto& file : skeleton_files(input)) {
    std::ifstream in(file);
    if (!in) throw DataError("cannot open " + file.string());
    std::vector<SkeletonSequence> parsed;
    try {
      parsed = parse_ntu_skeleton(in, file.stem().string(), dataset);
    } catch (const ParseError& e) {
      throw DataError(file.string() + ": " + e.what());
    }
    ++clips;
    bodies += parsed.size();
    for (const auto& seq : split_multi_person(parsed)) {
      text << write_canonical(seq) << '\n';
      ++kept;
    }
  }
  ghosts = bodies - kept;
  write_text(output, text.str());
  std::cout << "files " << clips << ", bodies " << bodies << ", dropped ghosts " << ghosts << ", sequences written "
            << kept << " -> " << output.string() << '\n';
  return kExitOk;
}

// ------------------------------------------------------------- train/eval

template <typename T>
int train_as(const RunConfig& config, const fs::path& out_dir) {
  const PreparedData data = prepare_data(config);
  RunOptions options;
  options.out_dir = out_dir;
  options.log = &std::cout;
  const RunResult result = run_training<T>(config, data, options);
  if (result.test) std::cout << "test accuracy " << format_double(result.test->accuracy) << '\n';
  return kExitOk;
}

template <typename T>
int resume_as(const fs::path& checkpoint, const fs::path& out_dir) {
  const Checkpoint<T> ckpt = load_checkpoint<T>(checkpoint);
  const RunConfig config = checkpoint_config(ckpt.config_text, {});
  if (ckpt.epoch >= config.train.epochs) {
    std::cout << "checkpoint already at final epoch " << ckpt.epoch << '\n';
  }
  const PreparedData data = prepare_data(config);
  RunOptions options;
  options.out_dir = out_dir;
  options.log = &std::cout;
  const RunResult result = run_training<T>(config, data, options, &ckpt);
  if (result.test) std::cout << "test accuracy " << format_double(result.test->accuracy) << '\n';
  return kExitOk;
}

template <typename T>
int eval_as(const fs::path& checkpoint, const std::vector<std::string>& sets, const fs::path& out_dir) {
  const Checkpoint<T> ckpt = load_checkpoint<T>(checkpoint);
  const RunConfig config = checkpoint_config(ckpt.config_text, sets);
  SGNModel<T> model = model_from_checkpoint(ckpt);
  const PreparedData data = prepare_data(config);
  if (data.test.empty()) throw DataError("the test split is empty");
  EvalOptions options;
  options.views = config.train.eval_views;
  options.seed = derive_seed(config.seed, {0x74657374});
  options.batch_size = config.train.batch_size;
  const EvalResult result = evaluate(model, data.records, data.test, options);
  std::cout << "test accuracy " << format_double(result.accuracy) << " over " << result.sources.size()
            << " source clips (epoch " << ckpt.epoch << ")\n";
  if (!out_dir.empty()) {
    nlohmann::ordered_json report;
    report["checkpoint"] = checkpoint.string();
    report["epoch"] = ckpt.epoch;
    report["parameters"] = model.parameter_count();
    report["test_accuracy"] = result.accuracy;
    report["test_sources"] = result.sources.size();
    write_text(out_dir / "eval_report.json", report.dump(2) + '\n');
    write_text(out_dir / "eval_per_class.csv", per_class_csv(result));
  }
  return kExitOk;
}

// ----------------------------------------------------------------- inspect

struct InspectFlags {
  ConfigFlags config;
  std::string checkpoint;
  fs::path out_dir;
  std::size_t record = 0;
  std::size_t frame = 0;
  std::size_t scale = 0;
  std::string split = "test";
  std::size_t limit = 0;
};

template <typename T>
SGNModel<T> inspected_model(const InspectFlags& f, RunConfig& config) {
  if (!f.checkpoint.empty()) {
    const Checkpoint<T> ckpt = load_checkpoint<T>(f.checkpoint);
    config = checkpoint_config(ckpt.config_text, f.config.sets);
    return model_from_checkpoint(ckpt);
  }
  return SGNModel<T>(config.model);
}

Precision inspected_precision(const InspectFlags& f, RunConfig& config) {
  if (!f.checkpoint.empty()) return checkpoint_precision(f.checkpoint);
  if (f.config.config.empty()) throw ConfigError("inspect needs --config or --checkpoint");
  config = resolve_config(f.config);
  return config.precision;
}

template <typename T>
int params_as(const InspectFlags& f, RunConfig config) {
  const SGNModel<T> model = inspected_model<T>(f, config);
  std::cout << "total " << model.parameter_count() << '\n';
  for (const auto& [name, count] : model.parameter_breakdown()) std::cout << name << ' ' << count << '\n';
  return kExitOk;
}

const std::vector<std::size_t>& split_indices(const PreparedData& data, const std::string& split) {
  if (split == "train") return data.train;
  if (split == "val") return data.val;
  if (split == "test") return data.test;
  throw ConfigError("--split must be train, val or test");
}

// Highest counts first, ties to the lower joint index.
std::vector<std::size_t> top5_joints(const std::vector<std::size_t>& counts) {
  std::vector<std::size_t> order(counts.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });
  order.resize(std::min<std::size_t>(5, order.size()));
  return order;
}

template <typename T>
int smp_as(const InspectFlags& f, RunConfig config) {
  SGNModel<T> model = inspected_model<T>(f, config);
  model.set_mode(Mode::eval);
  if (f.scale >= model.num_scales()) throw ConfigError("--scale is a scale index below " + std::to_string(model.num_scales()));
  const std::size_t frames = config.model.scales[f.scale];
  const PreparedData data = prepare_data(config);
  std::vector<std::size_t> picked = split_indices(data, f.split);
  if (f.limit > 0 && picked.size() > f.limit) picked.resize(f.limit);

  const std::size_t joints = config.model.num_joints;
  std::vector<std::size_t> totals(joints, 0);
  std::map<int, std::vector<std::size_t>> per_action;
  nlohmann::ordered_json sequences = nlohmann::ordered_json::array();
  for (std::size_t idx : picked) {
    const SkeletonSequence view = sample_clips(data.records[idx], frames, SamplingMode::deterministic_first, 0);
    const std::vector<SkeletonSequence> one{view};
    const ScaleOutput<T> out = model.forward_scale(stack_coords<T>(one), f.scale);
    const SmpProbe probe = smp_probe(out.smp_argmax, joints);
    auto& action = per_action[view.label];
    action.resize(joints, 0);
    for (std::size_t j = 0; j < joints; ++j) {
      totals[j] += probe.counts[j];
      action[j] += probe.counts[j];
    }
    sequences.push_back({{"source", view.source}, {"body", view.body_id}, {"label", view.label},
                         {"total", probe.total()}, {"top5", probe.top5}});
  }

  std::string csv = "joint_index,count\n";
  for (std::size_t j = 0; j < joints; ++j) csv += std::to_string(j) + ',' + std::to_string(totals[j]) + '\n';
  nlohmann::ordered_json summary;
  summary["scale"] = frames;
  summary["sequences"] = picked.size();
  nlohmann::ordered_json actions = nlohmann::ordered_json::object();
  for (const auto& [label, counts] : per_action) {
    actions[std::to_string(label)] = top5_joints(counts);
  }
  summary["top5_per_action"] = actions;
  summary["per_sequence"] = sequences;

  const fs::path dir = f.out_dir.empty() ? fs::path(".") : f.out_dir;
  write_text(dir / "smp_counts.csv", csv);
  write_text(dir / "smp_summary.json", summary.dump(2) + '\n');
  std::cout << picked.size() << " sequences at T=" << frames << " -> " << (dir / "smp_counts.csv").string() << ", "
            << (dir / "smp_summary.json").string() << '\n';
  return kExitOk;
}

template <typename T>
int graph_as(const InspectFlags& f, RunConfig config) {
  SGNModel<T> model = inspected_model<T>(f, config);
  model.set_mode(Mode::eval);
  if (f.scale >= model.num_scales()) throw ConfigError("--scale is a scale index below " + std::to_string(model.num_scales()));
  const std::size_t frames = config.model.scales[f.scale];
  if (f.frame >= frames) throw ConfigError("--frame must be below " + std::to_string(frames));
  const PreparedData data = prepare_data(config);
  if (f.record >= data.records.size()) {
    throw ConfigError("--record must be below " + std::to_string(data.records.size()));
  }
  const std::vector<SkeletonSequence> one{
      sample_clips(data.records[f.record], frames, SamplingMode::deterministic_first, 0)};
  const ScaleOutput<T> out = model.forward_scale(stack_coords<T>(one), f.scale);
  const std::size_t J = config.model.num_joints;
  const auto& g = out.adjacency.values();
  std::ostringstream csv;
  csv.precision(9);
  for (std::size_t i = 0; i < J; ++i) {
    for (std::size_t j = 0; j < J; ++j) {
      if (j) csv << ',';
      csv << g[(f.frame * J + i) * J + j];
    }
    csv << '\n';
  }
  if (f.out_dir.empty()) {
    std::cout << csv.str();
  } else {
    write_text(f.out_dir / "graph.csv", csv.str());
    std::cout << "G_t for record " << f.record << " ('" << one[0].source << "'), frame " << f.frame << " of " << frames
              << " -> " << (f.out_dir / "graph.csv").string() << '\n';
  }
  return kExitOk;
}

// ------------------------------------------------------------------ verify

int cmd_verify(bool inject_fault, bool all, const fs::path& fixture_dir, const fs::path& work_dir) {
  std::vector<CriterionResult> results;
  for (auto& r : run_property_suite(inject_fault)) {
    r.name = "property " + std::to_string(r.id) + ": " + r.name;
    results.push_back(std::move(r));
  }
  AcceptanceOptions options;
  options.fixture_dir = fixture_dir;
  options.work_dir = work_dir;
  options.only = {1, 2, 3, 4, 5, 7, 8};
  if (!fixture_dir.empty() && fs::is_directory(fixture_dir / "ntu")) options.only.insert(9);
  if (all) options.only.insert({6, 10, 11});
  for (auto& r : run_acceptance(options)) {
    r.name = "criterion " + std::to_string(r.id) + ": " + r.name;
    results.push_back(std::move(r));
  }
  std::size_t failed = 0;
  for (const auto& r : results) {
    if (!r.passed) ++failed;
    std::printf("%s  %s -- %s (%.2fs)\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str(), r.seconds);
  }
  std::printf("%zu checks, %zu passed, %zu failed\n", results.size(), results.size() - failed, failed);
  std::fflush(stdout);
  if (failed > 0) throw VerifyFailure{};
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"skeleton action recognition: convert, train, eval, inspect, verify"};
  app.require_subcommand(1);

  // convert
  auto* convert = app.add_subcommand("convert", "parse a directory of .skeleton files into one canonical file");
  std::string conv_in, conv_out, conv_dataset = "ntu60";
  convert->add_option("--input", conv_in, "directory of .skeleton files")->required();
  convert->add_option("--output", conv_out, "canonical output file")->required();
  convert->add_option("--dataset", conv_dataset, "dataset name stored in each record");

  // train
  auto* train = app.add_subcommand("train", "train a model from a config");
  ConfigFlags train_flags;
  std::string train_out;
  train->add_option("--config", train_flags.config, "config file")->required();
  train->add_option("--set", train_flags.sets, "override, key=value (repeatable)");
  train->add_option("--seed", train_flags.seed, "run seed");
  train->add_flag("--deterministic", train_flags.deterministic, "reproducible metrics (zero timings)");
  train->add_option("--out-dir", train_out, "run directory")->required();

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on its test split");
  std::string eval_ckpt, eval_out;
  std::vector<std::string> eval_sets;
  eval->add_option("--checkpoint", eval_ckpt, "checkpoint file")->required();
  eval->add_option("--set", eval_sets, "override, key=value (repeatable)");
  eval->add_option("--out-dir", eval_out, "where eval_report.json goes");

  // resume
  auto* resume = app.add_subcommand("resume", "continue training from a checkpoint");
  std::string resume_ckpt, resume_out;
  resume->add_option("--checkpoint", resume_ckpt, "checkpoint file")->required();
  resume->add_option("--out-dir", resume_out, "run directory")->required();

  // inspect
  auto* inspect = app.add_subcommand("inspect", "parameter counts, SMP joint counts, graph dumps");
  inspect->require_subcommand(1);
  InspectFlags inspect_flags;
  auto add_source = [&](CLI::App* sub) {
    sub->add_option("--config", inspect_flags.config.config, "config file");
    sub->add_option("--checkpoint", inspect_flags.checkpoint, "checkpoint file");
    sub->add_option("--set", inspect_flags.config.sets, "override, key=value (repeatable)");
  };
  auto* params = inspect->add_subcommand("params", "total and per-module parameter counts");
  add_source(params);
  auto* smp = inspect->add_subcommand("smp", "count SMP winning joints over a split");
  add_source(smp);
  smp->add_option("--out-dir", inspect_flags.out_dir, "where smp_counts.csv and smp_summary.json go");
  smp->add_option("--scale", inspect_flags.scale, "scale index (default 0)");
  smp->add_option("--split", inspect_flags.split, "train, val or test (default test)");
  smp->add_option("--limit", inspect_flags.limit, "at most this many sequences (0: all)");
  auto* graph = inspect->add_subcommand("graph", "dump one frame's adjacency as CSV");
  add_source(graph);
  graph->add_option("--out-dir", inspect_flags.out_dir, "write graph.csv here instead of stdout");
  graph->add_option("--scale", inspect_flags.scale, "scale index (default 0)");
  graph->add_option("--record", inspect_flags.record, "record index after ghost removal (default 0)");
  graph->add_option("--frame", inspect_flags.frame, "frame within the sampled clip (default 0)");

  // verify
  auto* verify = app.add_subcommand("verify", "run the property suite and the fast acceptance checks");
  bool inject = false, verify_all = false;
  std::string fixture_dir = SGN_DEFAULT_FIXTURES, verify_work;
  verify->add_flag("--inject-fault", inject, "add an op with a wrong backward; must be reported");
  verify->add_flag("--all", verify_all, "include the slow training criteria");
  verify->add_option("--fixtures", fixture_dir, "directory holding ntu/*.skeleton for the parser check");
  verify->add_option("--out-dir", verify_work, "scratch directory for training runs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*convert) return cmd_convert(conv_in, conv_out, conv_dataset);
    if (*train) {
      const RunConfig config = resolve_config(train_flags);
      return dispatch(config.precision, [&](auto tag) { return train_as<decltype(tag)>(config, train_out); });
    }
    if (*eval) {
      return dispatch(checkpoint_precision(eval_ckpt),
                      [&](auto tag) { return eval_as<decltype(tag)>(eval_ckpt, eval_sets, eval_out); });
    }
    if (*resume) {
      return dispatch(checkpoint_precision(resume_ckpt),
                      [&](auto tag) { return resume_as<decltype(tag)>(resume_ckpt, resume_out); });
    }
    if (*inspect) {
      RunConfig config;
      const Precision p = inspected_precision(inspect_flags, config);
      if (*params) return dispatch(p, [&](auto tag) { return params_as<decltype(tag)>(inspect_flags, config); });
      if (*smp) return dispatch(p, [&](auto tag) { return smp_as<decltype(tag)>(inspect_flags, config); });
      return dispatch(p, [&](auto tag) { return graph_as<decltype(tag)>(inspect_flags, config); });
    }
    if (*verify) return cmd_verify(inject, verify_all, fixture_dir, verify_work);
  } catch (const VerifyFailure&) {
    return kExitVerify;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DimensionError& e) {
    std::cerr << "shape error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
