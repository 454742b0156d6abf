#pragma once

// Generated review histories whose usefulness label is a known function of
// three extractable features, flipped on a fixed number of comments.

#include <cstdint>
#include <string>
#include <vector>

#include "cra/ingest.hpp"
#include "cra/model.hpp"

namespace cra::testing {

struct SyntheticOptions {
  std::size_t comments = 2000;
  /// Comments whose noise-free verdict is "not useful".
  std::size_t clean_negatives = 224;
  /// Labels flipped useful -> not useful and not useful -> useful.
  std::size_t flips_to_negative = 178;
  std::size_t flips_to_positive = 22;
  std::uint64_t seed = 2024;
};

/// What the generator intended for one comment.
struct SyntheticTruth {
  std::string comment_id;
  bool trigger = false;
  int sentiment = 0;
  bool similar = false;
  bool clean_useful = false;
  bool label = false;
};

/// Useful unless the comment triggered nothing and is either negative or
/// unrelated to the code it sits on.
bool latent_useful(bool trigger, int sentiment, bool similar);

struct SyntheticData {
  ReviewDump dump;
  /// One label per comment, by the change author.
  std::vector<UsefulnessLabel> labels;
  std::vector<SyntheticTruth> truth;
};

SyntheticData generate_synthetic(const SyntheticOptions& options = {});

}  // namespace cra::testing
