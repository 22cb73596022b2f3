#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fatigue/feature_matrix.hpp"
#include "fatigue/landmarks.hpp"

namespace fatigue {

/// Six contour points of an eye or mouth. The two corners span the
/// horizontal extent; (top_first, bottom_first) and (top_second,
/// bottom_second) are the vertical pairs.
struct SixPointSet {
  Point corner_first;
  Point top_first;
  Point top_second;
  Point corner_second;
  Point bottom_second;
  Point bottom_first;
};

/// (|top_first - bottom_first| + |top_second - bottom_second|) / (2 |corner_first - corner_second|).
/// Throws DegenerateHorizontal when the corners coincide.
double aspect_ratio(const SixPointSet& points);

enum class Eye { Left, Right };

SixPointSet eye_points(const LandmarkFrame& frame, Eye eye);
/// Corners 60/64, vertical pairs (61, 67) and (63, 65).
SixPointSet inner_lip_points(const LandmarkFrame& frame);

struct EyeAspect {
  double left = 0.0;
  double right = 0.0;
  double mean = 0.0;
};

EyeAspect compute_ear(const LandmarkFrame& frame);
double compute_mar(const LandmarkFrame& frame);

struct FeatureVector {
  double ear_left = 0.0;
  double ear_right = 0.0;
  double ear = 0.0;
  double mar = 0.0;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

FeatureVector extract_features(const LandmarkFrame& frame);

/// Column names of FeatureVector in declaration order.
std::span<const std::string_view> feature_columns();
std::optional<double> feature_value(const FeatureVector& features, std::string_view column);

/// Learner inputs used when nothing else is requested: the two indicators.
std::vector<std::string> default_feature_names();

/// Selects `names` from each frame's FeatureVector. Throws ArityMismatch if a
/// name is not a FeatureVector column; geometry errors propagate.
FeatureMatrix build_feature_matrix(std::span<const LandmarkFrame> frames, const std::vector<std::string>& names);
std::vector<double> feature_row(const FeatureVector& features, const std::vector<std::string>& names);

// --- threshold events -----------------------------------------------------

struct EventConfig {
  double ear_threshold = 0.75;
  double mar_threshold = 0.5;
  std::size_t min_event_frames = 2;
  double fps = 30.0;
};

struct EventSeries {
  std::size_t blink_count = 0;
  double blink_frequency_per_min = 0.0;
  std::size_t yawn_count = 0;
  std::vector<bool> blink_mask;  // frames belonging to a counted blink
  std::vector<bool> yawn_mask;   // frames belonging to a counted yawn
};

/// A blink is a maximal run of at least min_event_frames frames with
/// ear < ear_threshold; a yawn is the same with mar > mar_threshold.
EventSeries detect_events(std::span<const FeatureVector> series, const EventConfig& config);

}  // namespace fatigue
