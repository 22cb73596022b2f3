#include <array>
#include <cmath>

#include "fatigue/error.hpp"
#include "fatigue/features.hpp"

namespace fatigue {

namespace {

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

SixPointSet contiguous_six(const LandmarkFrame& frame, std::size_t first) {
  const auto& p = frame.points;
  return {p[first], p[first + 1], p[first + 2], p[first + 3], p[first + 4], p[first + 5]};
}

constexpr std::array<std::string_view, 4> kColumns = {"ear_left", "ear_right", "ear", "mar"};

// Marks maximal runs of `hit` frames that are at least min_len long.
std::size_t mark_runs(const std::vector<bool>& hit, std::size_t min_len, std::vector<bool>& mask) {
  mask.assign(hit.size(), false);
  std::size_t count = 0;
  std::size_t i = 0;
  while (i < hit.size()) {
    if (!hit[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < hit.size() && hit[j]) ++j;
    if (j - i >= min_len) {
      ++count;
      for (std::size_t k = i; k < j; ++k) mask[k] = true;
    }
    i = j;
  }
  return count;
}

}  // namespace

void FeatureMatrix::push_row(std::span<const double> values) {
  if (values.size() != names_.size()) {
    throw Error(ErrorCode::ArityMismatch, "row has " + std::to_string(values.size()) + " values, expected " +
                                              std::to_string(names_.size()));
  }
  values_.insert(values_.end(), values.begin(), values.end());
}

double aspect_ratio(const SixPointSet& s) {
  const double horizontal = distance(s.corner_first, s.corner_second);
  if (horizontal == 0.0) throw Error(ErrorCode::DegenerateHorizontal, "corner points coincide");
  const double vertical = distance(s.top_first, s.bottom_first) + distance(s.top_second, s.bottom_second);
  return vertical / (2.0 * horizontal);
}

SixPointSet eye_points(const LandmarkFrame& frame, Eye eye) {
  return contiguous_six(frame, eye == Eye::Left ? landmark_index::kLeftEyeFirst : landmark_index::kRightEyeFirst);
}

SixPointSet inner_lip_points(const LandmarkFrame& frame) {
  namespace li = landmark_index;
  const auto& p = frame.points;
  return {p[li::kInnerLipLeftCorner],  p[li::kInnerLipUpperLeft],  p[li::kInnerLipUpperRight],
          p[li::kInnerLipRightCorner], p[li::kInnerLipLowerRight], p[li::kInnerLipLowerLeft]};
}

EyeAspect compute_ear(const LandmarkFrame& frame) {
  auto ratio = [&](Eye eye, const char* name) {
    try {
      return aspect_ratio(eye_points(frame, eye));
    } catch (const Error& e) {
      throw Error(e.code(), std::string(name) + " eye of frame " + std::to_string(frame.frame_id) + ": " + e.what());
    }
  };
  EyeAspect out;
  out.left = ratio(Eye::Left, "left");
  out.right = ratio(Eye::Right, "right");
  out.mean = (out.left + out.right) / 2.0;
  return out;
}

double compute_mar(const LandmarkFrame& frame) {
  try {
    return aspect_ratio(inner_lip_points(frame));
  } catch (const Error& e) {
    throw Error(e.code(), "inner lip of frame " + std::to_string(frame.frame_id) + ": " + e.what());
  }
}

FeatureVector extract_features(const LandmarkFrame& frame) {
  const auto ear = compute_ear(frame);
  return {ear.left, ear.right, ear.mean, compute_mar(frame)};
}

std::span<const std::string_view> feature_columns() { return kColumns; }

std::optional<double> feature_value(const FeatureVector& f, std::string_view column) {
  if (column == "ear_left") return f.ear_left;
  if (column == "ear_right") return f.ear_right;
  if (column == "ear") return f.ear;
  if (column == "mar") return f.mar;
  return std::nullopt;
}

std::vector<std::string> default_feature_names() { return {"ear", "mar"}; }

std::vector<double> feature_row(const FeatureVector& features, const std::vector<std::string>& names) {
  std::vector<double> row;
  row.reserve(names.size());
  for (const auto& name : names) {
    const auto value = feature_value(features, name);
    if (!value) throw Error(ErrorCode::ArityMismatch, "feature '" + name + "' is not produced by the extractor");
    row.push_back(*value);
  }
  return row;
}

FeatureMatrix build_feature_matrix(std::span<const LandmarkFrame> frames, const std::vector<std::string>& names) {
  FeatureMatrix matrix(names);
  for (const auto& frame : frames) matrix.push_row(feature_row(extract_features(frame), names));
  return matrix;
}

EventSeries detect_events(std::span<const FeatureVector> series, const EventConfig& config) {
  if (series.empty()) throw Error(ErrorCode::EmptySeries, "no frames to scan");
  if (!(config.fps > 0.0) || !std::isfinite(config.fps)) throw Error(ErrorCode::NonPositiveFps, "fps must be > 0");
  if (!(config.ear_threshold > 0.0) || !(config.mar_threshold > 0.0)) {
    throw Error(ErrorCode::InvalidThreshold, "thresholds must be > 0");
  }
  if (config.min_event_frames < 1) throw Error(ErrorCode::InvalidThreshold, "min_event_frames must be >= 1");

  std::vector<bool> closed(series.size());
  std::vector<bool> open_mouth(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    closed[i] = series[i].ear < config.ear_threshold;
    open_mouth[i] = series[i].mar > config.mar_threshold;
  }
  EventSeries out;
  out.blink_count = mark_runs(closed, config.min_event_frames, out.blink_mask);
  out.yawn_count = mark_runs(open_mouth, config.min_event_frames, out.yawn_mask);
  const double minutes = static_cast<double>(series.size()) / config.fps / 60.0;
  out.blink_frequency_per_min = static_cast<double>(out.blink_count) / minutes;
  return out;
}

}  // namespace fatigue
