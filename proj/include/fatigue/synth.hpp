#pragma once

#include <cstddef>
#include <cstdint>

#include "fatigue/landmarks.hpp"

namespace fatigue {

/// Canonical frontal face in pixel units. Eye and inner-lip vertical extents
/// scale linearly with an openness parameter; at openness 1 they equal
/// eye_height / mouth_height.
struct FaceTemplate {
  double center_x = 320.0;
  double center_y = 260.0;
  double eye_width = 30.0;
  double eye_height = 12.0;
  double mouth_width = 40.0;
  double mouth_height = 32.0;
};

struct OpennessRange {
  double lo = 0.0;
  double hi = 1.0;
};

struct StateProfile {
  OpennessRange eye;
  OpennessRange mouth;
};

/// Fatigued samples present either through the eyes (drowsy) or through the
/// mouth (yawning); yawn_share of them are yawning. Alert and fatigued
/// ranges may overlap, which sets the difficulty of the task.
struct SynthSpec {
  std::size_t n_samples = 1000;
  double fatigue_fraction = 0.5;
  double noise_sigma = 0.5;
  std::uint64_t seed = 0;
  FaceTemplate face;
  StateProfile alert{{0.45, 1.0}, {0.0, 0.4}};
  StateProfile drowsy{{0.0, 0.5}, {0.0, 0.4}};
  StateProfile yawning{{0.45, 1.0}, {0.35, 1.0}};
  double yawn_share = 0.5;
  double frame_rate = 30.0;  // timestamps are frame_id / frame_rate

  /// Throws InvalidSpec.
  void validate() const;
};

/// Noise-free face with the given eye and mouth openness.
LandmarkFrame make_face(const FaceTemplate& face, double eye_openness, double mouth_openness,
                        std::uint64_t frame_id = 0);

/// Labeled dataset with exactly floor(n * fatigue_fraction) fatigued samples,
/// deterministic per seed.
Dataset generate(const SynthSpec& spec);

}  // namespace fatigue
