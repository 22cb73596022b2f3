#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fatigue/boosting.hpp"
#include "fatigue/landmarks.hpp"

namespace fatigue {

struct FrameScore {
  std::uint64_t frame_id = 0;
  double probability = 0.0;
};

struct StreamVerdict {
  std::vector<FrameScore> frames;  // scored frames, input order
  double mean_prob = 0.0;
  bool fatigue = false;            // mean_prob >= decision_threshold
  double decision_threshold = 0.5;
  std::vector<std::uint64_t> skipped;  // frames whose geometry could not be scored
};

/// Compensated (Neumaier) mean; the result does not depend on input order
/// beyond the final rounding.
double mean_probability(std::span<const double> probabilities);

StreamVerdict aggregate(std::vector<FrameScore> frames, double decision_threshold = 0.5);

/// Scores every frame, skipping frames with degenerate eye/mouth geometry.
/// Throws EmptyStream, or AllFramesDegenerate if nothing could be scored.
StreamVerdict score_stream(const Ensemble& ensemble, std::span<const LandmarkFrame> frames,
                           double decision_threshold = 0.5);

}  // namespace fatigue
