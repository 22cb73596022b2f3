#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "fatigue/error.hpp"
#include "fatigue/synth.hpp"

namespace fatigue {

namespace {

enum class State { Alert, Drowsy, Yawning };

void place_eye(LandmarkPoints& p, std::size_t first, double cx, double cy, const FaceTemplate& face,
               double openness) {
  const double half_w = face.eye_width / 2.0;
  const double sixth_w = face.eye_width / 6.0;
  const double half_h = face.eye_height * openness / 2.0;
  p[first + 0] = {cx - half_w, cy};
  p[first + 1] = {cx - sixth_w, cy - half_h};
  p[first + 2] = {cx + sixth_w, cy - half_h};
  p[first + 3] = {cx + half_w, cy};
  p[first + 4] = {cx + sixth_w, cy + half_h};
  p[first + 5] = {cx - sixth_w, cy + half_h};
}

void place_inner_lip(LandmarkPoints& p, double cx, double cy, const FaceTemplate& face, double openness) {
  namespace li = landmark_index;
  const double half_w = face.mouth_width / 2.0;
  const double quarter_w = face.mouth_width / 4.0;
  const double half_h = face.mouth_height * openness / 2.0;
  p[li::kInnerLipLeftCorner] = {cx - half_w, cy};
  p[li::kInnerLipUpperLeft] = {cx - quarter_w, cy - half_h};
  p[li::kInnerLipUpperMid] = {cx, cy - half_h};
  p[li::kInnerLipUpperRight] = {cx + quarter_w, cy - half_h};
  p[li::kInnerLipRightCorner] = {cx + half_w, cy};
  p[li::kInnerLipLowerRight] = {cx + quarter_w, cy + half_h};
  p[li::kInnerLipLowerMid] = {cx, cy + half_h};
  p[li::kInnerLipLowerLeft] = {cx - quarter_w, cy + half_h};
}

// Jaw, brows, nose and outer lip: fixed points that carry no signal.
void place_static(LandmarkPoints& p, const FaceTemplate& face) {
  const double cx = face.center_x;
  const double cy = face.center_y;
  for (std::size_t i = 0; i <= 16; ++i) {
    const double t = std::numbers::pi * static_cast<double>(i) / 16.0;
    p[i] = {cx - 100.0 * std::cos(t), cy + 20.0 + 110.0 * std::sin(t)};
  }
  for (std::size_t i = 0; i < 5; ++i) {
    const double arch = 8.0 * std::sin(std::numbers::pi * static_cast<double>(i) / 4.0);
    p[17 + i] = {cx - 80.0 + 15.0 * static_cast<double>(i), cy - 60.0 - arch};
    p[26 - i] = {cx + 80.0 - 15.0 * static_cast<double>(i), cy - 60.0 - arch};
  }
  for (std::size_t i = 0; i < 4; ++i) p[27 + i] = {cx, cy - 40.0 + 16.0 * static_cast<double>(i)};
  for (std::size_t i = 0; i < 5; ++i) {
    p[31 + i] = {cx - 20.0 + 10.0 * static_cast<double>(i), cy + 20.0 + (i == 2 ? 4.0 : 0.0)};
  }
  const double mouth_y = cy + 60.0;
  for (std::size_t i = 0; i < 12; ++i) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / 12.0;
    p[48 + i] = {cx - 32.0 * std::cos(t), mouth_y - 24.0 * std::sin(t)};
  }
}

void check_range(const OpennessRange& r, const char* what) {
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo < 0.0 || r.lo > r.hi) {
    throw Error(ErrorCode::InvalidSpec, std::string(what) + " openness range must satisfy 0 <= lo <= hi");
  }
}

}  // namespace

void SynthSpec::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidSpec, what); };
  if (n_samples < 1) fail("n_samples must be >= 1");
  if (!(fatigue_fraction >= 0.0 && fatigue_fraction <= 1.0)) fail("fatigue_fraction must lie in [0, 1]");
  if (!std::isfinite(noise_sigma) || noise_sigma < 0.0) fail("noise_sigma must be finite and >= 0");
  if (!(yawn_share >= 0.0 && yawn_share <= 1.0)) fail("yawn_share must lie in [0, 1]");
  if (!(frame_rate > 0.0) || !std::isfinite(frame_rate)) fail("frame_rate must be > 0");
  for (double v : {face.eye_width, face.eye_height, face.mouth_width, face.mouth_height}) {
    if (!(v > 0.0) || !std::isfinite(v)) fail("face template dimensions must be > 0");
  }
  if (!std::isfinite(face.center_x) || !std::isfinite(face.center_y)) fail("face center must be finite");
  check_range(alert.eye, "alert eye");
  check_range(alert.mouth, "alert mouth");
  check_range(drowsy.eye, "drowsy eye");
  check_range(drowsy.mouth, "drowsy mouth");
  check_range(yawning.eye, "yawning eye");
  check_range(yawning.mouth, "yawning mouth");
}

LandmarkFrame make_face(const FaceTemplate& face, double eye_openness, double mouth_openness,
                        std::uint64_t frame_id) {
  LandmarkFrame frame;
  frame.frame_id = frame_id;
  place_static(frame.points, face);
  const double eye_y = face.center_y - 30.0;
  place_eye(frame.points, landmark_index::kLeftEyeFirst, face.center_x - 45.0, eye_y, face, eye_openness);
  place_eye(frame.points, landmark_index::kRightEyeFirst, face.center_x + 45.0, eye_y, face, eye_openness);
  place_inner_lip(frame.points, face.center_x, face.center_y + 60.0, face, mouth_openness);
  return frame;
}

Dataset generate(const SynthSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n_samples;
  const auto fatigued = static_cast<std::size_t>(std::floor(static_cast<double>(n) * spec.fatigue_fraction));
  const auto yawning = static_cast<std::size_t>(std::floor(static_cast<double>(fatigued) * spec.yawn_share));

  std::vector<State> states;
  states.reserve(n);
  states.insert(states.end(), yawning, State::Yawning);
  states.insert(states.end(), fatigued - yawning, State::Drowsy);
  states.insert(states.end(), n - fatigued, State::Alert);

  std::mt19937_64 rng(spec.seed);
  std::shuffle(states.begin(), states.end(), rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&](const OpennessRange& r) { return r.lo + (r.hi - r.lo) * unit(rng); };

  Dataset dataset;
  dataset.provenance = "synthetic (seed " + std::to_string(spec.seed) + ")";
  dataset.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const StateProfile& profile =
        states[i] == State::Alert ? spec.alert : (states[i] == State::Drowsy ? spec.drowsy : spec.yawning);
    const double eye = draw(profile.eye);
    const double mouth = draw(profile.mouth);
    Sample sample;
    sample.frame = make_face(spec.face, eye, mouth, i);
    sample.frame.timestamp_s = static_cast<double>(i) / spec.frame_rate;
    if (spec.noise_sigma > 0.0) {
      std::normal_distribution<double> noise(0.0, spec.noise_sigma);
      for (auto& p : sample.frame.points) {
        p.x += noise(rng);
        p.y += noise(rng);
      }
    }
    sample.label = states[i] == State::Alert ? Label::NonFatigue : Label::Fatigue;
    dataset.samples.push_back(std::move(sample));
  }
  return dataset;
}

}  // namespace fatigue
