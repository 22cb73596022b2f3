#include <algorithm>
#include <cmath>
#include <numeric>

#include "fatigue/boosting.hpp"
#include "fatigue/error.hpp"

namespace fatigue {

namespace {

// Largest double strictly below 1; keeps sigmoid inside the open interval.
const double kBelowOne = std::nextafter(1.0, 0.0);

double midpoint(double lo, double hi) {
  const double mid = (lo + hi) / 2.0;
  // Adjacent doubles can round the midpoint onto `lo`, which would send both
  // values right.
  return mid > lo ? mid : hi;
}

void scan_feature(std::size_t feature, std::span<const std::size_t> sorted_rows, const FeatureMatrix& x,
                  std::span<const GradPair> grad, double grad_total, double hess_total, const TrainConfig& config,
                  std::vector<SplitDecision>& out) {
  double grad_left = 0.0;
  double hess_left = 0.0;
  for (std::size_t i = 0; i + 1 < sorted_rows.size(); ++i) {
    const std::size_t row = sorted_rows[i];
    grad_left += grad[row].g;
    hess_left += grad[row].h;
    const double value = x.at(row, feature);
    const double next = x.at(sorted_rows[i + 1], feature);
    if (!(value < next)) continue;
    const double grad_right = grad_total - grad_left;
    const double hess_right = hess_total - hess_left;
    if (hess_left < config.min_child_hessian || hess_right < config.min_child_hessian) continue;
    if (hess_left + config.lambda <= 0.0 || hess_right + config.lambda <= 0.0) continue;
    const double gain =
        split_gain(grad_left, hess_left, grad_right, hess_right, config.lambda, config.gamma);
    out.push_back({feature, midpoint(value, next), gain});
  }
}

// Candidates arrive ordered by (feature, threshold), so the first one within
// tolerance of the maximum is the tie-break winner.
std::optional<SplitDecision> select_split(const std::vector<SplitDecision>& candidates) {
  if (candidates.empty()) return std::nullopt;
  double best = candidates.front().gain;
  for (const auto& c : candidates) best = std::max(best, c.gain);
  if (!(best > 0.0)) return std::nullopt;
  const double floor = best - kGainTieTolerance * best;
  for (const auto& c : candidates) {
    if (c.gain >= floor) return c;
  }
  return std::nullopt;
}

void sort_rows_by_feature(std::vector<std::size_t>& rows, const FeatureMatrix& x, std::size_t feature) {
  std::stable_sort(rows.begin(), rows.end(),
                   [&](std::size_t a, std::size_t b) { return x.at(a, feature) < x.at(b, feature); });
}

class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& x, std::span<const GradPair> grad, const TrainConfig& config,
              std::span<double> tree_output)
      : x_(x), grad_(grad), config_(config), tree_output_(tree_output) {}

  Tree build(std::vector<std::vector<std::size_t>> sorted) {
    nodes_.clear();
    grow(std::move(sorted), 0);
    return Tree(std::move(nodes_));
  }

 private:
  std::int32_t grow(std::vector<std::vector<std::size_t>> sorted, std::size_t depth) {
    const auto& rows = sorted.front();
    double grad_total = 0.0;
    double hess_total = 0.0;
    for (std::size_t r : rows) {
      grad_total += grad_[r].g;
      hess_total += grad_[r].h;
    }
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.emplace_back();

    std::optional<SplitDecision> split;
    if (depth < config_.max_depth && rows.size() >= 2) {
      candidates_.clear();
      for (std::size_t f = 0; f < x_.cols(); ++f) {
        scan_feature(f, sorted[f], x_, grad_, grad_total, hess_total, config_, candidates_);
      }
      split = select_split(candidates_);
    }

    if (!split) {
      const double weight = leaf_weight(grad_total, hess_total, config_.lambda);
      for (std::size_t r : rows) tree_output_[r] = weight;
      TreeNode& leaf = nodes_[static_cast<std::size_t>(id)];
      leaf.is_leaf = true;
      leaf.weight = weight;
      return id;
    }

    std::vector<std::vector<std::size_t>> left(sorted.size());
    std::vector<std::vector<std::size_t>> right(sorted.size());
    for (std::size_t f = 0; f < sorted.size(); ++f) {
      for (std::size_t r : sorted[f]) {
        (x_.at(r, split->feature_index) < split->threshold ? left[f] : right[f]).push_back(r);
      }
    }
    sorted.clear();
    sorted.shrink_to_fit();

    const std::int32_t left_id = grow(std::move(left), depth + 1);
    const std::int32_t right_id = grow(std::move(right), depth + 1);
    TreeNode& node = nodes_[static_cast<std::size_t>(id)];
    node.is_leaf = false;
    node.feature_index = split->feature_index;
    node.threshold = split->threshold;
    node.gain = split->gain;
    node.left = left_id;
    node.right = right_id;
    return id;
  }

  const FeatureMatrix& x_;
  std::span<const GradPair> grad_;
  const TrainConfig& config_;
  std::span<double> tree_output_;
  std::vector<TreeNode> nodes_;
  std::vector<SplitDecision> candidates_;
};

}  // namespace

void TrainConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (num_trees < 1) fail("num_trees must be >= 1");
  if (max_depth < 1) fail("max_depth must be >= 1");
  if (!std::isfinite(lambda) || lambda < 0.0) fail("lambda must be finite and >= 0");
  if (!std::isfinite(gamma) || gamma < 0.0) fail("gamma must be finite and >= 0");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) fail("learning_rate must lie in (0, 1]");
  if (!std::isfinite(min_child_hessian) || min_child_hessian < 0.0) fail("min_child_hessian must be >= 0");
  if (!(base_score > 0.0 && base_score < 1.0)) fail("base_score must lie in (0, 1)");
}

double sigmoid(double margin) {
  double p;
  if (margin >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-margin));
  } else {
    const double e = std::exp(margin);
    p = e / (1.0 + e);
  }
  return std::clamp(p, std::numeric_limits<double>::denorm_min(), kBelowOne);
}

double logistic_loss(double margin, Label label) {
  // log(1 + e^m) - y m, arranged to avoid overflow.
  const double y = label == Label::Fatigue ? 1.0 : 0.0;
  return std::max(margin, 0.0) - margin * y + std::log1p(std::exp(-std::abs(margin)));
}

GradPair logistic_grad_hess(double margin, Label label) {
  const double p = sigmoid(margin);
  const double q = sigmoid(-margin);
  const double g = label == Label::Fatigue ? -q : p;
  return {g, std::max(p * q, kMinHessian)};
}

double leaf_weight(double grad_sum, double hess_sum, double lambda) {
  const double denom = hess_sum + lambda;
  if (!(denom > 0.0)) throw Error(ErrorCode::SingularLeaf, "H + lambda must be positive");
  return -grad_sum / denom;
}

double split_gain(double grad_left, double hess_left, double grad_right, double hess_right, double lambda,
                  double gamma) {
  const double grad_total = grad_left + grad_right;
  const double hess_total = hess_left + hess_right;
  const double children =
      grad_left * grad_left / (hess_left + lambda) + grad_right * grad_right / (hess_right + lambda);
  const double parent = grad_total * grad_total / (hess_total + lambda);
  return 0.5 * (children - parent) - gamma;
}

std::optional<SplitDecision> best_split(std::span<const std::size_t> rows, const FeatureMatrix& features,
                                        std::span<const GradPair> grad, const TrainConfig& config) {
  if (rows.size() < 2) return std::nullopt;
  double grad_total = 0.0;
  double hess_total = 0.0;
  for (std::size_t r : rows) {
    grad_total += grad[r].g;
    hess_total += grad[r].h;
  }
  std::vector<SplitDecision> candidates;
  std::vector<std::size_t> sorted;
  for (std::size_t f = 0; f < features.cols(); ++f) {
    sorted.assign(rows.begin(), rows.end());
    sort_rows_by_feature(sorted, features, f);
    scan_feature(f, sorted, features, grad, grad_total, hess_total, config, candidates);
  }
  return select_split(candidates);
}

Tree::Tree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

Tree Tree::leaf(double weight) {
  TreeNode node;
  node.weight = weight;
  return Tree({node});
}

std::size_t Tree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf; }));
}

std::size_t Tree::depth() const {
  std::size_t deepest = 0;
  std::vector<std::pair<std::int32_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [id, d] = stack.back();
    stack.pop_back();
    const auto& node = nodes_[static_cast<std::size_t>(id)];
    deepest = std::max(deepest, d);
    if (!node.is_leaf) {
      stack.emplace_back(node.left, d + 1);
      stack.emplace_back(node.right, d + 1);
    }
  }
  return deepest;
}

double Tree::evaluate(std::span<const double> row) const {
  std::size_t id = 0;
  while (!nodes_[id].is_leaf) {
    const auto& node = nodes_[id];
    id = static_cast<std::size_t>(row[node.feature_index] < node.threshold ? node.left : node.right);
  }
  return nodes_[id].weight;
}

double Ensemble::predict_margin(std::span<const double> row) const {
  if (row.size() != feature_names.size()) {
    throw Error(ErrorCode::ArityMismatch, "row has " + std::to_string(row.size()) + " features, model expects " +
                                              std::to_string(feature_names.size()));
  }
  for (double v : row) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteFeature, "feature value is not finite");
  }
  double sum = 0.0;
  for (const auto& tree : trees) sum += tree.evaluate(row);
  return base_margin + learning_rate * sum;
}

double Ensemble::predict_proba(std::span<const double> row) const { return sigmoid(predict_margin(row)); }

std::vector<double> Ensemble::predict_proba(const FeatureMatrix& rows) const {
  std::vector<double> out;
  out.reserve(rows.rows());
  for (std::size_t r = 0; r < rows.rows(); ++r) out.push_back(predict_proba(rows.row(r)));
  return out;
}

double mean_logloss(std::span<const double> margins, std::span<const Label> labels) {
  if (margins.size() != labels.size() || margins.empty()) {
    throw Error(ErrorCode::LengthMismatch, "margins and labels must be non-empty and equally long");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < margins.size(); ++i) total += logistic_loss(margins[i], labels[i]);
  return total / static_cast<double>(margins.size());
}

Ensemble train(const FeatureMatrix& features, std::span<const Label> labels, const TrainConfig& config,
               const RoundObserver& observer) {
  config.validate();
  const std::size_t n = features.rows();
  if (features.cols() == 0) throw Error(ErrorCode::ArityMismatch, "no feature columns");
  if (n != labels.size()) {
    throw Error(ErrorCode::ArityMismatch, std::to_string(n) + " feature rows but " +
                                              std::to_string(labels.size()) + " labels");
  }
  const auto positives = std::count(labels.begin(), labels.end(), Label::Fatigue);
  if (n < 2 || positives == 0 || static_cast<std::size_t>(positives) == n) {
    throw Error(ErrorCode::DegenerateLabels, "training needs at least one sample of each class");
  }
  for (std::size_t r = 0; r < n; ++r) {
    for (double v : features.row(r)) {
      if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteFeature, "row " + std::to_string(r) + " is not finite");
    }
  }

  Ensemble ensemble;
  ensemble.base_margin = std::log(config.base_score / (1.0 - config.base_score));
  ensemble.learning_rate = config.learning_rate;
  ensemble.feature_names = features.names();
  ensemble.config = config;
  ensemble.trees.reserve(config.num_trees);

  std::vector<std::vector<std::size_t>> presorted(features.cols());
  for (std::size_t f = 0; f < features.cols(); ++f) {
    presorted[f].resize(n);
    std::iota(presorted[f].begin(), presorted[f].end(), std::size_t{0});
    sort_rows_by_feature(presorted[f], features, f);
  }

  // Per-row running sum of tree outputs; margins are recomputed from it the
  // same way predict_margin does, so observers see exactly the model output.
  std::vector<double> output_sum(n, 0.0);
  std::vector<double> margins(n, ensemble.base_margin);
  std::vector<double> tree_output(n, 0.0);
  std::vector<GradPair> grad(n);
  for (std::size_t round = 0; round < config.num_trees; ++round) {
    for (std::size_t r = 0; r < n; ++r) grad[r] = logistic_grad_hess(margins[r], labels[r]);
    TreeBuilder builder(features, grad, config, tree_output);
    ensemble.trees.push_back(builder.build(presorted));
    for (std::size_t r = 0; r < n; ++r) {
      output_sum[r] += tree_output[r];
      margins[r] = ensemble.base_margin + ensemble.learning_rate * output_sum[r];
    }
    if (observer) observer(round, margins);
  }
  return ensemble;
}

}  // namespace fatigue
