#include <cmath>
#include <fstream>
#include <sstream>

#include "fatigue/boosting.hpp"
#include "fatigue/error.hpp"
#include "json.hpp"

namespace fatigue {

namespace {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

constexpr std::string_view kObjective = "binary:logistic";

[[noreturn]] void format_error(const std::string& detail) { throw Error(ErrorCode::ModelFormatError, detail); }

const json& require(const json& object, const char* key) {
  if (!object.is_object() || !object.contains(key)) format_error(std::string("missing field '") + key + "'");
  return object.at(key);
}

double require_number(const json& object, const char* key) {
  const auto& value = require(object, key);
  if (!value.is_number()) format_error(std::string("field '") + key + "' is not a number");
  const double v = value.get<double>();
  if (!std::isfinite(v)) format_error(std::string("field '") + key + "' is not finite");
  return v;
}

std::uint64_t require_unsigned(const json& object, const char* key) {
  const auto& value = require(object, key);
  if (!value.is_number_unsigned()) format_error(std::string("field '") + key + "' is not a non-negative integer");
  return value.get<std::uint64_t>();
}

ordered_json config_to_json(const TrainConfig& c) {
  ordered_json out;
  out["num_trees"] = c.num_trees;
  out["max_depth"] = c.max_depth;
  out["lambda"] = c.lambda;
  out["gamma"] = c.gamma;
  out["learning_rate"] = c.learning_rate;
  out["min_child_hessian"] = c.min_child_hessian;
  out["base_score"] = c.base_score;
  out["seed"] = c.seed;
  return out;
}

TrainConfig config_from_json(const json& j) {
  TrainConfig c;
  c.num_trees = require_unsigned(j, "num_trees");
  c.max_depth = require_unsigned(j, "max_depth");
  c.lambda = require_number(j, "lambda");
  c.gamma = require_number(j, "gamma");
  c.learning_rate = require_number(j, "learning_rate");
  c.min_child_hessian = require_number(j, "min_child_hessian");
  c.base_score = require_number(j, "base_score");
  c.seed = require_unsigned(j, "seed");
  try {
    c.validate();
  } catch (const Error& e) {
    format_error(std::string("config: ") + e.what());
  }
  return c;
}

Tree tree_from_json(const json& j, std::size_t feature_count) {
  const auto& nodes_json = require(j, "nodes");
  if (!nodes_json.is_array() || nodes_json.empty()) format_error("tree has no nodes");
  const std::size_t count = nodes_json.size();
  std::vector<TreeNode> nodes(count);
  std::vector<int> parents(count, 0);
  for (std::size_t i = 0; i < count; ++i) {
    const auto& nj = nodes_json[i];
    if (require_unsigned(nj, "node_id") != i) format_error("node ids must be 0..n-1 in order");
    const auto& kind = require(nj, "kind");
    TreeNode& node = nodes[i];
    if (kind == "leaf") {
      node.is_leaf = true;
      node.weight = require_number(nj, "weight");
    } else if (kind == "split") {
      node.is_leaf = false;
      node.feature_index = require_unsigned(nj, "feature_index");
      if (node.feature_index >= feature_count) format_error("feature_index out of range");
      node.threshold = require_number(nj, "threshold");
      node.gain = require_number(nj, "gain");
      const auto left = require_unsigned(nj, "left_id");
      const auto right = require_unsigned(nj, "right_id");
      // Children after their parent rules out cycles.
      if (left <= i || right <= i || left >= count || right >= count || left == right) {
        format_error("invalid child ids at node " + std::to_string(i));
      }
      node.left = static_cast<std::int32_t>(left);
      node.right = static_cast<std::int32_t>(right);
      ++parents[left];
      ++parents[right];
    } else {
      format_error("unknown node kind");
    }
  }
  if (parents[0] != 0) format_error("root has a parent");
  for (std::size_t i = 1; i < count; ++i) {
    if (parents[i] != 1) format_error("node " + std::to_string(i) + " must have exactly one parent");
  }
  return Tree(std::move(nodes));
}

}  // namespace

std::string serialize_model(const Ensemble& ensemble) {
  ordered_json out;
  out["format_version"] = kModelFormatVersion;
  out["objective"] = kObjective;
  out["feature_names"] = ensemble.feature_names;
  out["base_margin"] = ensemble.base_margin;
  out["learning_rate"] = ensemble.learning_rate;
  out["config"] = config_to_json(ensemble.config);
  auto trees = ordered_json::array();
  for (const auto& tree : ensemble.trees) {
    auto nodes = ordered_json::array();
    const auto& tn = tree.nodes();
    for (std::size_t i = 0; i < tn.size(); ++i) {
      ordered_json node;
      node["node_id"] = i;
      if (tn[i].is_leaf) {
        node["kind"] = "leaf";
        node["weight"] = tn[i].weight;
      } else {
        node["kind"] = "split";
        node["feature_index"] = tn[i].feature_index;
        node["threshold"] = tn[i].threshold;
        node["gain"] = tn[i].gain;
        node["left_id"] = tn[i].left;
        node["right_id"] = tn[i].right;
      }
      nodes.push_back(std::move(node));
    }
    trees.push_back({{"nodes", std::move(nodes)}});
  }
  out["trees"] = std::move(trees);
  return out.dump(1) + "\n";
}

Ensemble parse_model(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    format_error(std::string("not a valid model document: ") + e.what());
  }
  if (!root.is_object()) format_error("model document must be an object");
  const auto& version = require(root, "format_version");
  if (!version.is_number_integer()) format_error("format_version is not an integer");
  if (version.get<long long>() != kModelFormatVersion) {
    throw Error(ErrorCode::VersionMismatch, "model format_version " + version.dump() + " is not supported (expected " +
                                                std::to_string(kModelFormatVersion) + ")");
  }
  if (require(root, "objective") != kObjective) format_error("unsupported objective");

  Ensemble ensemble;
  const auto& names = require(root, "feature_names");
  if (!names.is_array() || names.empty()) format_error("feature_names must be a non-empty array");
  for (const auto& name : names) {
    if (!name.is_string()) format_error("feature_names must hold strings");
    ensemble.feature_names.push_back(name.get<std::string>());
  }
  ensemble.base_margin = require_number(root, "base_margin");
  ensemble.learning_rate = require_number(root, "learning_rate");
  ensemble.config = config_from_json(require(root, "config"));
  const auto& trees = require(root, "trees");
  if (!trees.is_array() || trees.empty()) format_error("model must contain at least one tree");
  for (const auto& tree : trees) ensemble.trees.push_back(tree_from_json(tree, ensemble.feature_names.size()));
  return ensemble;
}

void save_model(const Ensemble& ensemble, const std::filesystem::path& path) {
  const std::string text = serialize_model(ensemble);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write failure on '" + path.string() + "'");
}

Ensemble load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_model(buffer.str());
}

}  // namespace fatigue
