#include <cmath>

#include "fatigue/error.hpp"
#include "fatigue/features.hpp"
#include "fatigue/stream.hpp"

namespace fatigue {

double mean_probability(std::span<const double> probabilities) {
  if (probabilities.empty()) throw Error(ErrorCode::EmptyStream, "no probabilities to average");
  double sum = 0.0;
  double compensation = 0.0;
  for (double p : probabilities) {
    const double t = sum + p;
    if (std::abs(sum) >= std::abs(p)) {
      compensation += (sum - t) + p;
    } else {
      compensation += (p - t) + sum;
    }
    sum = t;
  }
  return (sum + compensation) / static_cast<double>(probabilities.size());
}

StreamVerdict aggregate(std::vector<FrameScore> frames, double decision_threshold) {
  if (frames.empty()) throw Error(ErrorCode::EmptyStream, "no scored frames");
  if (!(decision_threshold >= 0.0 && decision_threshold <= 1.0)) {
    throw Error(ErrorCode::InvalidProbability, "decision threshold must lie in [0, 1]");
  }
  std::vector<double> probs;
  probs.reserve(frames.size());
  for (const auto& f : frames) {
    if (!(f.probability >= 0.0 && f.probability <= 1.0)) {
      throw Error(ErrorCode::InvalidProbability, "frame probability outside [0, 1]");
    }
    probs.push_back(f.probability);
  }
  StreamVerdict verdict;
  verdict.mean_prob = mean_probability(probs);
  verdict.fatigue = verdict.mean_prob >= decision_threshold;
  verdict.decision_threshold = decision_threshold;
  verdict.frames = std::move(frames);
  return verdict;
}

StreamVerdict score_stream(const Ensemble& ensemble, std::span<const LandmarkFrame> frames,
                           double decision_threshold) {
  if (frames.empty()) throw Error(ErrorCode::EmptyStream, "stream has no frames");
  std::vector<FrameScore> scored;
  std::vector<std::uint64_t> skipped;
  for (const auto& frame : frames) {
    FeatureVector features;
    try {
      features = extract_features(frame);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateHorizontal) throw;
      skipped.push_back(frame.frame_id);
      continue;
    }
    const auto row = feature_row(features, ensemble.feature_names);
    scored.push_back({frame.frame_id, ensemble.predict_proba(row)});
  }
  if (scored.empty()) {
    throw Error(ErrorCode::AllFramesDegenerate, "all " + std::to_string(frames.size()) + " frames were skipped");
  }
  auto verdict = aggregate(std::move(scored), decision_threshold);
  verdict.skipped = std::move(skipped);
  return verdict;
}

}  // namespace fatigue
