#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fatigue/feature_matrix.hpp"
#include "fatigue/landmarks.hpp"

namespace fatigue {

struct TrainConfig {
  std::size_t num_trees = 2000;
  std::size_t max_depth = 6;
  double lambda = 1.0;             // L2 penalty on leaf weights
  double gamma = 0.0;              // penalty per additional leaf
  double learning_rate = 0.1;      // shrinkage applied to every tree
  double min_child_hessian = 1e-3;
  double base_score = 0.5;         // initial probability
  std::uint64_t seed = 0;

  /// Throws InvalidConfig when a bound is violated.
  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// First and second derivative of the loss with respect to the margin.
struct GradPair {
  double g = 0.0;
  double h = 0.0;
};

inline constexpr double kMinHessian = 1e-16;

/// Numerically stable logistic function.
double sigmoid(double margin);

/// Negative log-likelihood of `label` under probability sigmoid(margin).
double logistic_loss(double margin, Label label);

/// g = p - y, h = max(p (1 - p), kMinHessian) with p = sigmoid(margin).
GradPair logistic_grad_hess(double margin, Label label);

/// Minimizer of G w + (H + lambda) w^2 / 2. Throws SingularLeaf when H + lambda == 0.
double leaf_weight(double grad_sum, double hess_sum, double lambda);

/// Reduction of the regularized second-order objective obtained by splitting
/// a node into (left, right), minus gamma.
double split_gain(double grad_left, double hess_left, double grad_right, double hess_right, double lambda,
                  double gamma);

struct SplitDecision {
  std::size_t feature_index = 0;
  double threshold = 0.0;  // rows with value < threshold go left
  double gain = 0.0;

  friend bool operator==(const SplitDecision&, const SplitDecision&) = default;
};

/// Exact greedy search over every feature and every midpoint between
/// adjacent distinct values. Candidates whose children fall below
/// min_child_hessian are skipped. Returns the highest positive gain; gains
/// within kGainTieTolerance (relative) of the maximum tie and resolve to the
/// lowest feature index, then the lowest threshold.
std::optional<SplitDecision> best_split(std::span<const std::size_t> rows, const FeatureMatrix& features,
                                        std::span<const GradPair> grad, const TrainConfig& config);

inline constexpr double kGainTieTolerance = 1e-12;

struct TreeNode {
  bool is_leaf = true;
  std::size_t feature_index = 0;
  double threshold = 0.0;
  double gain = 0.0;    // split nodes only
  double weight = 0.0;  // leaves only, margin units before shrinkage
  std::int32_t left = -1;
  std::int32_t right = -1;

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Flattened binary tree; node 0 is the root and children follow their
/// parent in depth-first order.
class Tree {
 public:
  Tree() = default;
  explicit Tree(std::vector<TreeNode> nodes);

  /// A tree consisting of one leaf.
  static Tree leaf(double weight);

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t leaf_count() const;
  std::size_t depth() const;

  /// Leaf weight reached by `row`.
  double evaluate(std::span<const double> row) const;

  friend bool operator==(const Tree&, const Tree&) = default;

 private:
  std::vector<TreeNode> nodes_;
};

struct Ensemble {
  std::vector<Tree> trees;
  double base_margin = 0.0;
  double learning_rate = 0.1;
  std::vector<std::string> feature_names;
  TrainConfig config;

  /// base_margin + learning_rate * sum of tree outputs. Throws ArityMismatch
  /// or NonFiniteFeature.
  double predict_margin(std::span<const double> row) const;
  double predict_proba(std::span<const double> row) const;
  std::vector<double> predict_proba(const FeatureMatrix& rows) const;

  friend bool operator==(const Ensemble&, const Ensemble&) = default;
};

/// Called after each boosting round with the updated training margins.
using RoundObserver = std::function<void(std::size_t round, std::span<const double> margins)>;

/// Second-order boosting of depth-limited trees under the logistic loss.
/// Deterministic: no sampling is performed, so identical inputs give
/// identical ensembles.
Ensemble train(const FeatureMatrix& features, std::span<const Label> labels, const TrainConfig& config,
               const RoundObserver& observer = {});

/// Mean logistic loss of `margins` against `labels`.
double mean_logloss(std::span<const double> margins, std::span<const Label> labels);

// --- model files ------------------------------------------------------------

inline constexpr int kModelFormatVersion = 1;

std::string serialize_model(const Ensemble& ensemble);
/// Throws ModelFormatError or VersionMismatch.
Ensemble parse_model(std::string_view text);

void save_model(const Ensemble& ensemble, const std::filesystem::path& path);
Ensemble load_model(const std::filesystem::path& path);

}  // namespace fatigue
