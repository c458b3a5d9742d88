#include "sgn/io/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "sgn/error.hpp"
#include "sgn/util.hpp"

namespace sgn {

Protocol parse_protocol(std::string_view name) {
  if (name == "cross-subject") return Protocol::cross_subject;
  if (name == "cross-view") return Protocol::cross_view;
  if (name == "cross-setup") return Protocol::cross_setup;
  if (name == "same-subject") return Protocol::same_subject;
  throw ConfigError("unknown protocol '" + std::string(name) +
                    "' (expected cross-subject, cross-view, cross-setup or same-subject)");
}

std::string_view protocol_name(Protocol p) {
  switch (p) {
    case Protocol::cross_subject: return "cross-subject";
    case Protocol::cross_view: return "cross-view";
    case Protocol::cross_setup: return "cross-setup";
    case Protocol::same_subject: return "same-subject";
  }
  return "unknown";
}

std::string_view split_name(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "unknown";
}

IdLists default_id_lists(std::string_view dataset, Protocol protocol) {
  static const std::vector<int> ntu60_subjects = {1,  2,  4,  5,  8,  9,  13, 14, 15, 16,
                                                  17, 18, 19, 25, 27, 28, 31, 34, 35, 38};
  static const std::vector<int> ntu120_extra_subjects = {45, 46, 47, 49, 50, 52, 53, 54, 55, 56, 57,
                                                         58, 59, 70, 74, 78, 80, 81, 82, 83, 84, 85,
                                                         86, 89, 91, 92, 93, 94, 95, 97, 98, 100, 103};
  IdLists ids;
  switch (protocol) {
    case Protocol::cross_subject:
      ids.train_ids = ntu60_subjects;
      if (dataset == "ntu120") {
        ids.train_ids.insert(ids.train_ids.end(), ntu120_extra_subjects.begin(), ntu120_extra_subjects.end());
      }
      break;
    case Protocol::cross_view:
      ids.train_ids = {2, 3};
      break;
    case Protocol::cross_setup:
      for (int s = 2; s <= 32; s += 2) ids.train_ids.push_back(s);
      break;
    case Protocol::same_subject:
      break;
  }
  return ids;
}

std::size_t DatasetManifest::count(Split s) const {
  return static_cast<std::size_t>(std::count(assignment.begin(), assignment.end(), s));
}

std::vector<std::size_t> DatasetManifest::indices(Split s) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == s) out.push_back(i);
  }
  return out;
}

std::string DatasetManifest::digest(std::span<const SkeletonSequence> records) const {
  std::string text = std::string(protocol_name(protocol)) + '\n' + dataset + '\n' +
                     std::to_string(num_classes) + '\n';
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    text += records[i].source + '\t' + std::to_string(records[i].body_id) + '\t' +
            std::string(split_name(assignment[i])) + '\n';
  }
  return sha256_hex(text);
}

namespace {

int protocol_key(const SkeletonSequence& r, Protocol p) {
  switch (p) {
    case Protocol::cross_subject: return r.subject_id;
    case Protocol::cross_view: return r.camera_id;
    case Protocol::cross_setup: return r.setup_id;
    case Protocol::same_subject: return r.label;
  }
  return 0;
}

}  // namespace

DatasetManifest split_protocol(std::span<const SkeletonSequence> records, Protocol protocol,
                               const IdLists& ids, const SplitOptions& options) {
  if (options.validation_fraction < 0.0 || options.validation_fraction >= 1.0) {
    throw ConfigError("validation fraction must lie in [0, 1)");
  }
  DatasetManifest manifest;
  manifest.protocol = protocol;
  manifest.dataset = records.empty() ? std::string() : records.front().dataset;
  int max_label = -1;
  for (const auto& r : records) max_label = std::max(max_label, r.label);
  manifest.num_classes = options.num_classes ? options.num_classes : static_cast<std::size_t>(max_label + 1);
  manifest.assignment.assign(records.size(), Split::test);

  if (protocol == Protocol::same_subject) {
    // Half of each class's source clips train, half test.
    std::map<int, std::vector<std::string>> sources_of_class;
    for (const auto& r : records) {
      auto& list = sources_of_class[r.label];
      if (std::find(list.begin(), list.end(), r.source) == list.end()) list.push_back(r.source);
    }
    std::set<std::string> train_sources;
    for (auto& [label, list] : sources_of_class) {
      std::sort(list.begin(), list.end());
      std::mt19937_64 rng(derive_seed(options.seed, {static_cast<std::uint64_t>(label), 0x55}));
      std::shuffle(list.begin(), list.end(), rng);
      train_sources.insert(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(list.size() / 2));
    }
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (train_sources.count(records[i].source)) manifest.assignment[i] = Split::train;
    }
  } else {
    const std::set<int> train(ids.train_ids.begin(), ids.train_ids.end());
    const std::set<int> test(ids.test_ids.begin(), ids.test_ids.end());
    for (std::size_t i = 0; i < records.size(); ++i) {
      const int key = protocol_key(records[i], protocol);
      if (train.count(key)) {
        manifest.assignment[i] = Split::train;
      } else if (test.empty() || test.count(key)) {
        manifest.assignment[i] = Split::test;
      } else {
        throw ProtocolError("record " + std::to_string(i) + " ('" + records[i].source + "') has " +
                            std::string(protocol_name(protocol)) + " id " + std::to_string(key) +
                            " in neither the train nor the test list");
      }
    }
  }

  if (options.validation_fraction > 0.0) {
    // Carve by source clip so all bodies of one clip stay together.
    std::vector<std::string> train_sources;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (manifest.assignment[i] == Split::train) train_sources.push_back(records[i].source);
    }
    std::sort(train_sources.begin(), train_sources.end());
    train_sources.erase(std::unique(train_sources.begin(), train_sources.end()), train_sources.end());
    std::mt19937_64 rng(derive_seed(options.seed, {0x7661}));
    std::shuffle(train_sources.begin(), train_sources.end(), rng);
    const auto n_val = static_cast<std::size_t>(
        std::llround(options.validation_fraction * static_cast<double>(train_sources.size())));
    const std::set<std::string> val(train_sources.begin(), train_sources.begin() + static_cast<std::ptrdiff_t>(n_val));
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (manifest.assignment[i] == Split::train && val.count(records[i].source)) {
        manifest.assignment[i] = Split::val;
      }
    }
  }
  return manifest;
}

}  // namespace sgn
