// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../test_support.hpp"
#include "fatigue/boosting.hpp"
#include "fatigue/cli.hpp"
#include "fatigue/evaluation.hpp"
#include "fatigue/features.hpp"
#include "fatigue/stream.hpp"
#include "fatigue/synth.hpp"
#include "json.hpp"

namespace {

using namespace fatigue;
namespace oracle = fatigue::testing::oracle;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit_s;  // <= 0: no limit
  std::function<Outcome()> body;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Shared dataset for criteria 2 and 7.
Dataset synthetic_benchmark() {
  SynthSpec spec;
  spec.n_samples = 2000;
  spec.fatigue_fraction = 0.5;
  spec.noise_sigma = 0.5;
  spec.seed = 1;
  return generate(spec);
}

// Best accuracy of any rule "x < t" or "x >= t" predicting fatigue.
double best_threshold_accuracy(std::vector<double> values, const std::vector<Label>& labels) {
  std::vector<std::size_t> order(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  const double n = static_cast<double>(values.size());
  const auto total_pos = static_cast<double>(std::count(labels.begin(), labels.end(), Label::Fatigue));
  double pos_below = 0.0;
  double neg_below = 0.0;
  double best = std::max(total_pos, n - total_pos) / n;
  for (std::size_t k = 0; k < order.size(); ++k) {
    (labels[order[k]] == Label::Fatigue ? pos_below : neg_below) += 1.0;
    if (k + 1 < order.size() && values[order[k + 1]] == values[order[k]]) continue;
    const double neg_above = (n - total_pos) - neg_below;
    const double pos_above = total_pos - pos_below;
    best = std::max(best, (pos_below + neg_above) / n);
    best = std::max(best, (neg_below + pos_above) / n);
  }
  return best;
}

Outcome published_counts() {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run({"evaluate", "--from-counts", "1626,198,304,1850"}, out, err);
  if (code != 0) return {false, "exit " + std::to_string(code) + ": " + err.str()};
  const auto report = nlohmann::json::parse(out.str());
  const double sens = 100.0 * report["sensitivity"].get<double>();
  const double acc = 100.0 * report["accuracy"].get<double>();
  const bool pass = std::abs(sens - 89.14) <= 0.01 && std::abs(acc - 87.37) <= 0.02;
  return {pass, "sensitivity " + fmt("%.4f", sens) + "%, accuracy " + fmt("%.4f", acc) + "%"};
}

Outcome synthetic_benchmark_beats_baseline() {
  const Dataset data = synthetic_benchmark();
  const auto frames = data.frames();
  const auto labels = data.labels();
  std::vector<double> ear;
  std::vector<double> mar;
  for (const auto& f : frames) {
    const auto fv = extract_features(f);
    ear.push_back(fv.ear);
    mar.push_back(fv.mar);
  }
  const double base_ear = best_threshold_accuracy(ear, labels);
  const double base_mar = best_threshold_accuracy(mar, labels);

  SplitSpec split;
  split.train_fraction = 0.7;
  split.seed = 1;
  const auto [train_set, test_set] = split_dataset(data, split);
  TrainConfig cfg;
  cfg.num_trees = 200;
  cfg.max_depth = 4;
  cfg.learning_rate = 0.1;
  cfg.lambda = 1.0;
  const auto names = default_feature_names();
  const auto train_labels = train_set.labels();
  const auto model = train(build_feature_matrix(train_set.frames(), names), train_labels, cfg);
  const auto test_frames = test_set.frames();
  const auto cm = confusion(model.predict_proba(build_feature_matrix(test_frames, names)), test_set.labels());
  const double acc = accuracy(cm);
  const double sens = sensitivity(cm);
  const bool pass = base_ear <= 0.80 && base_mar <= 0.80 && acc >= 0.90 && sens >= 0.88;
  return {pass, "baseline ear " + fmt("%.4f", base_ear) + ", mar " + fmt("%.4f", base_mar) + "; model accuracy " +
                    fmt("%.4f", acc) + ", sensitivity " + fmt("%.4f", sens)};
}

Outcome gradient_oracle() {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> margin(-10.0, 10.0);
  std::bernoulli_distribution coin(0.5);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double m = margin(rng);
    const int y = coin(rng) ? 1 : 0;
    const auto gh = logistic_grad_hess(m, y ? Label::Fatigue : Label::NonFatigue);
    worst = std::max({worst, std::abs(gh.g - oracle::fd_gradient(m, y)), std::abs(gh.h - oracle::fd_hessian(m, y))});
  }
  return {worst <= 1e-6, "max abs deviation " + fmt("%.3g", worst) + " over 1000 pairs"};
}

Outcome split_oracle() {
  std::mt19937_64 rng(47);
  int agree = 0;
  int with_split = 0;
  const int instances = 600;
  for (int i = 0; i < instances; ++i) {
    const auto inst = testing::random_split_instance(rng, 12, 3);
    const auto fast = best_split(inst.rows, inst.x, inst.grad, inst.config);
    const auto slow = oracle::brute_force_split(inst.rows, inst.x, inst.grad, inst.config);
    bool same = fast.has_value() == slow.has_value();
    if (same && fast) {
      ++with_split;
      same = fast->feature_index == slow->feature_index && fast->threshold == slow->threshold &&
             std::abs(fast->gain - slow->gain) <= 1e-9;
    }
    agree += same ? 1 : 0;
  }
  return {agree == instances, std::to_string(agree) + "/" + std::to_string(instances) + " agree (" +
                                  std::to_string(with_split) + " with a split)"};
}

Outcome leaf_oracle() {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> g(-100.0, 100.0);
  std::uniform_real_distribution<double> h(0.0, 50.0);
  std::uniform_real_distribution<double> l(0.0, 5.0);
  double worst = 0.0;
  int count = 0;
  while (count < 1000) {
    const double G = g(rng);
    const double H = h(rng);
    const double lam = l(rng);
    if (H + lam < 1e-2) continue;
    worst = std::max(worst, std::abs(leaf_weight(G, H, lam) - oracle::minimize_leaf_objective(G, H, lam)));
    ++count;
  }
  return {worst <= 1e-6, "max abs deviation " + fmt("%.3g", worst) + " over 1000 triples"};
}

Outcome geometry_invariants() {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> coord(-50.0, 50.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> log_scale(std::log(0.1), std::log(10.0));
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    std::array<Point, 6> p;
    for (auto& q : p) q = {coord(rng), coord(rng)};
    auto as_set = [](const std::array<Point, 6>& a) { return SixPointSet{a[0], a[1], a[2], a[3], a[4], a[5]}; };
    const double base = aspect_ratio(as_set(p));
    const double theta = angle(rng);
    const double s = std::exp(log_scale(rng));
    const double tx = coord(rng) * 10;
    const double ty = coord(rng) * 10;
    auto moved = p;
    for (auto& q : moved) {
      q = {s * (std::cos(theta) * q.x - std::sin(theta) * q.y) + tx, s * (std::sin(theta) * q.x + std::cos(theta) * q.y) + ty};
    }
    worst = std::max(worst, std::abs(aspect_ratio(as_set(moved)) - base) / base);
  }
  SynthSpec closed;
  closed.n_samples = 20;
  closed.fatigue_fraction = 1.0;
  closed.yawn_share = 0.0;
  closed.noise_sigma = 0.0;
  closed.drowsy.eye = {0.0, 0.0};
  bool zero = true;
  for (const auto& s : generate(closed).samples) zero = zero && compute_ear(s.frame).mean == 0.0;
  zero = zero && compute_ear(make_face(FaceTemplate{}, 0.0, 0.5)).mean == 0.0;
  return {worst <= 1e-9 && zero,
          "max relative deviation " + fmt("%.3g", worst) + "; closed eye EAR " + (zero ? "exactly 0" : "nonzero")};
}

Outcome descent() {
  const Dataset data = synthetic_benchmark();
  SplitSpec split;
  split.train_fraction = 0.7;
  split.seed = 1;
  const auto train_set = split_dataset(data, split).first;
  const auto labels = train_set.labels();
  TrainConfig cfg;
  cfg.num_trees = 50;
  cfg.max_depth = 4;
  cfg.learning_rate = 0.1;
  cfg.lambda = 1.0;
  std::vector<double> losses;
  train(build_feature_matrix(train_set.frames(), default_feature_names()), labels, cfg,
        [&](std::size_t, std::span<const double> margins) { losses.push_back(mean_logloss(margins, labels)); });
  double worst_rise = 0.0;
  for (std::size_t i = 1; i < losses.size(); ++i) worst_rise = std::max(worst_rise, losses[i] - losses[i - 1]);
  const bool pass = losses.size() == 50 && worst_rise <= 1e-9;
  return {pass, std::to_string(losses.size()) + " rounds, loss " + fmt("%.5f", losses.front()) + " -> " +
                    fmt("%.5f", losses.back()) + ", max rise " + fmt("%.3g", worst_rise)};
}

Outcome determinism_and_round_trips() {
  testing::TempDir dir;
  SynthSpec spec;
  spec.n_samples = 1000;
  spec.noise_sigma = 1.5;
  spec.seed = 8;
  const Dataset data = generate(spec);
  TrainConfig cfg;
  cfg.num_trees = 80;
  cfg.max_depth = 5;
  const auto names = default_feature_names();
  const auto x = build_feature_matrix(data.frames(), names);
  const auto labels = data.labels();
  const auto model_a = train(x, labels, cfg);
  const auto model_b = train(x, labels, cfg);
  save_model(model_a, dir / "a.json");
  save_model(model_b, dir / "b.json");
  const bool identical = testing::read_file(dir / "a.json") == testing::read_file(dir / "b.json");

  const Ensemble loaded = load_model(dir / "a.json");
  const auto reference = model_a.predict_proba(x);
  bool model_ok = loaded.predict_proba(x) == reference;
  for (std::size_t r = 0; r < x.rows(); ++r) model_ok = model_ok && loaded.predict_margin(x.row(r)) == model_a.predict_margin(x.row(r));

  bool data_ok = true;
  for (auto format : {DataFormat::Csv, DataFormat::Jsonl}) {
    const auto path = dir / (format == DataFormat::Csv ? "d.csv" : "d.jsonl");
    write_dataset(data, path, format);
    const Dataset back = load_dataset(path, format);
    data_ok = data_ok && back.samples == data.samples &&
              model_a.predict_proba(build_feature_matrix(back.frames(), names)) == reference;
  }
  return {identical && model_ok && data_ok, std::string("model files ") + (identical ? "identical" : "differ") +
                                                "; model round trip " + (model_ok ? "bitwise" : "drifted") +
                                                "; dataset round trip " + (data_ok ? "bitwise" : "drifted")};
}

Outcome stream_aggregation() {
  std::mt19937_64 rng(83);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> len(1, 500);
  double worst_perm = 0.0;
  double worst_concat = 0.0;
  bool verdicts = true;
  for (int t = 0; t < 300; ++t) {
    std::vector<double> a(len(rng));
    std::vector<double> b(len(rng));
    for (auto& p : a) p = u(rng);
    for (auto& p : b) p = u(rng);
    auto shuffled = a;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const double ma = mean_probability(a);
    const double thr = u(rng);
    worst_perm = std::max(worst_perm, std::abs(mean_probability(shuffled) - ma));
    std::vector<FrameScore> fa;
    std::vector<FrameScore> fs;
    for (std::size_t i = 0; i < a.size(); ++i) {
      fa.push_back({i, a[i]});
      fs.push_back({i, shuffled[i]});
    }
    verdicts = verdicts && aggregate(fa, thr).fatigue == aggregate(fs, thr).fatigue;
    auto joined = a;
    joined.insert(joined.end(), b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    worst_concat = std::max(worst_concat, std::abs(mean_probability(joined) - (na * ma + nb * mean_probability(b)) / (na + nb)));
  }
  const auto example = aggregate({{0, 0.2}, {1, 0.4}, {2, 0.9}}, 0.5);
  const bool example_ok = std::abs(example.mean_prob - 0.5) <= 1e-12 && example.fatigue;
  const bool pass = worst_perm <= 1e-12 && worst_concat <= 1e-12 && verdicts && example_ok;
  return {pass, "permutation " + fmt("%.3g", worst_perm) + ", concatenation " + fmt("%.3g", worst_concat) +
                    "; [0.2, 0.4, 0.9] -> " + fmt("%.15g", example.mean_prob) + (example.fatigue ? " fatigue" : " non-fatigue")};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "published confusion counts", 1.0, published_counts},
      {2, "synthetic benchmark beats single-feature baseline", 30.0, synthetic_benchmark_beats_baseline},
      {3, "gradient and hessian vs finite differences", 1.0, gradient_oracle},
      {4, "split search vs brute force", 10.0, split_oracle},
      {5, "leaf weight vs numeric minimization", 0.0, leaf_oracle},
      {6, "aspect ratio geometry invariants", 0.0, geometry_invariants},
      {7, "training loss descent over 50 rounds", 0.0, descent},
      {8, "determinism and bitwise round trips", 0.0, determinism_and_round_trips},
      {9, "stream aggregation", 0.0, stream_aggregation},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.body();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.time_limit_s <= 0.0 || elapsed < c.time_limit_s;
    const bool pass = outcome.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("%s  %d  %-52s %s (%.3f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), outcome.detail.c_str(),
                elapsed, in_time ? "" : ", over time limit");
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
