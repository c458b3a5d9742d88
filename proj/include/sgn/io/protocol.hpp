#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sgn/io/skeleton.hpp"

namespace sgn {

enum class Protocol { cross_subject, cross_view, cross_setup, same_subject };
enum class Split { train, val, test };

Protocol parse_protocol(std::string_view name);
std::string_view protocol_name(Protocol p);
std::string_view split_name(Split s);

// Training ids for the protocol's key (subject, camera or setup). When test_ids
// is empty every id outside train_ids is a test id; otherwise an id in neither
// list is a ProtocolError.
struct IdLists {
  std::vector<int> train_ids;
  std::vector<int> test_ids;
};

// Train-side id lists published with the NTU RGB+D releases.
IdLists default_id_lists(std::string_view dataset, Protocol protocol);

struct DatasetManifest {
  std::string dataset;
  std::size_t num_classes = 0;
  Protocol protocol = Protocol::cross_subject;
  std::vector<Split> assignment;  // parallel to the record list

  std::size_t count(Split s) const;
  std::vector<std::size_t> indices(Split s) const;
  // SHA-256 over protocol, class count and every (source, body, split) triple.
  std::string digest(std::span<const SkeletonSequence> records) const;
};

struct SplitOptions {
  double validation_fraction = 0.0;  // share of training source clips moved to val
  std::uint64_t seed = 0;
  std::size_t num_classes = 0;       // 0 -> 1 + max label
};

// Deterministic in (records' metadata, ids, options).
DatasetManifest split_protocol(std::span<const SkeletonSequence> records, Protocol protocol,
                               const IdLists& ids, const SplitOptions& options = {});

}  // namespace sgn
