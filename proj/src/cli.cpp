#include "fatigue/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "fatigue/boosting.hpp"
#include "fatigue/error.hpp"
#include "fatigue/evaluation.hpp"
#include "fatigue/features.hpp"
#include "fatigue/landmarks.hpp"
#include "fatigue/stream.hpp"
#include "fatigue/synth.hpp"
#include "json.hpp"

namespace fatigue::cli {

namespace {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct Options {
  // synth
  std::size_t n = 1000;
  double fatigue_fraction = 0.5;
  double noise = 0.5;
  std::string format;
  // shared
  std::uint64_t seed = 0;
  std::string out;
  std::string data;
  std::string model;
  double threshold = 0.5;
  // train
  std::size_t trees = 2000;
  std::size_t depth = 6;
  double lambda = 1.0;
  double gamma = 0.0;
  double learning_rate = 0.1;
  bool eval_split = false;
  double train_fraction = 0.7;
  std::string features = "ear,mar";
  // features
  double ear_threshold = 0.75;
  double mar_threshold = 0.5;
  std::size_t min_event_frames = 2;
  double fps = 30.0;
  // evaluate
  std::vector<std::uint64_t> from_counts;
  // replay
  std::string manifest;
};

std::vector<std::string> split_names(const std::string& list) {
  std::vector<std::string> names;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) names.push_back(item);
  }
  return names;
}

// Every option of the subcommand with its effective value, defaults
// included, in declaration order.
std::vector<std::string> resolved_argv(const CLI::App& sub) {
  std::vector<std::string> argv{sub.get_name()};
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_name() == "--help" || opt->get_name().empty()) continue;
    const std::string flag = opt->get_name();
    if (opt->get_expected_min() == 0) {
      if (opt->count() > 0 && opt->as<bool>()) argv.push_back(flag);
      continue;
    }
    std::string value;
    if (opt->count() > 0) {
      const auto& results = opt->results();
      for (std::size_t i = 0; i < results.size(); ++i) value += (i ? "," : "") + results[i];
    } else {
      value = opt->get_default_str();
      if (value.empty()) continue;
    }
    argv.push_back(flag);
    argv.push_back(value);
  }
  return argv;
}

ordered_json make_manifest(const CLI::App& sub, std::vector<std::string> inputs, std::vector<std::string> outputs,
                           std::uint64_t seed) {
  ordered_json m;
  m["tool"] = kToolName;
  m["version"] = kToolVersion;
  m["command"] = sub.get_name();
  const auto argv = resolved_argv(sub);
  ordered_json config = ordered_json::object();
  for (std::size_t i = 1; i < argv.size(); ++i) {
    const std::string key = argv[i].substr(2);
    if (i + 1 < argv.size() && argv[i + 1].rfind("--", 0) != 0) {
      config[key] = argv[i + 1];
      ++i;
    } else {
      config[key] = true;
    }
  }
  m["config"] = std::move(config);
  m["inputs"] = std::move(inputs);
  m["outputs"] = std::move(outputs);
  m["seed"] = seed;
  m["argv"] = argv;
  return m;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  file << text;
  file.flush();
  if (!file) throw Error(ErrorCode::IoError, "write failure on '" + path.string() + "'");
}

std::string manifest_path(const std::string& out) { return out + ".manifest.json"; }

void emit(std::ostream& out, ordered_json report, const ordered_json& manifest) {
  report["manifest"] = manifest;
  out << report.dump(2) << '\n';
}

std::optional<double> metric_or_null(double (*metric)(const ConfusionMatrix&), const ConfusionMatrix& cm) {
  try {
    return metric(cm);
  } catch (const Error&) {
    return std::nullopt;
  }
}

ordered_json metrics_json(const ConfusionMatrix& cm, double threshold) {
  ordered_json r;
  r["counts"] = {{"tp", cm.tp}, {"fn", cm.fn}, {"fp", cm.fp}, {"tn", cm.tn}};
  r["total"] = cm.total();
  const auto acc = metric_or_null(&accuracy, cm);
  const auto sens = metric_or_null(&sensitivity, cm);
  r["accuracy"] = acc ? ordered_json(*acc) : ordered_json(nullptr);
  r["sensitivity"] = sens ? ordered_json(*sens) : ordered_json(nullptr);
  r["decision_threshold"] = threshold;
  return r;
}

std::vector<Label> labels_of(const Dataset& d) {
  if (!d.labeled()) throw Error(ErrorCode::MixedLabeling, d.provenance + " has no labels");
  return d.labels();
}

ConfusionMatrix evaluate_model(const Ensemble& model, const Dataset& data, double threshold) {
  const auto frames = data.frames();
  const auto matrix = build_feature_matrix(frames, model.feature_names);
  return confusion(model.predict_proba(matrix), labels_of(data), threshold);
}

// --- commands ---------------------------------------------------------------

int cmd_synth(const Options& o, const CLI::App& sub, std::ostream& out) {
  SynthSpec spec;
  spec.n_samples = o.n;
  spec.fatigue_fraction = o.fatigue_fraction;
  spec.noise_sigma = o.noise;
  spec.seed = o.seed;
  const Dataset dataset = generate(spec);
  const DataFormat format = o.format.empty() ? format_from_path(o.out) : parse_data_format(o.format);
  write_dataset(dataset, o.out, format);
  const auto manifest = make_manifest(sub, {}, {o.out}, o.seed);
  write_text(manifest_path(o.out), manifest.dump(2) + "\n");

  std::size_t fatigued = 0;
  for (const auto& s : dataset.samples) fatigued += s.label == Label::Fatigue ? 1 : 0;
  ordered_json report;
  report["command"] = "synth";
  report["samples"] = dataset.size();
  report["fatigued"] = fatigued;
  report["format"] = to_string(format);
  report["out"] = o.out;
  emit(out, std::move(report), manifest);
  return kSuccess;
}

int cmd_features(const Options& o, const CLI::App& sub, std::ostream& out, std::ostream& err) {
  const Dataset dataset = load_dataset(o.data);
  std::vector<FeatureVector> series;
  series.reserve(dataset.size());
  std::ostringstream csv;
  csv << "frame_id,ear_left,ear_right,ear,mar\n";
  for (const auto& s : dataset.samples) {
    const auto f = extract_features(s.frame);
    series.push_back(f);
    csv << s.frame.frame_id << ',' << format_double(f.ear_left) << ',' << format_double(f.ear_right) << ','
        << format_double(f.ear) << ',' << format_double(f.mar) << '\n';
  }
  EventConfig events_config{o.ear_threshold, o.mar_threshold, o.min_event_frames, o.fps};
  const auto events = detect_events(series, events_config);

  ordered_json report;
  report["command"] = "features";
  report["frames"] = series.size();
  report["blink_count"] = events.blink_count;
  report["blink_frequency_per_min"] = events.blink_frequency_per_min;
  report["yawn_count"] = events.yawn_count;

  if (o.out.empty()) {
    const auto manifest = make_manifest(sub, {o.data}, {}, o.seed);
    out << csv.str();
    report["manifest"] = manifest;
    err << report.dump() << '\n';
  } else {
    write_text(o.out, csv.str());
    const auto manifest = make_manifest(sub, {o.data}, {o.out}, o.seed);
    write_text(manifest_path(o.out), manifest.dump(2) + "\n");
    report["out"] = o.out;
    emit(out, std::move(report), manifest);
  }
  return kSuccess;
}

int cmd_train(const Options& o, const CLI::App& sub, std::ostream& out) {
  const Dataset dataset = load_dataset(o.data);
  TrainConfig config;
  config.num_trees = o.trees;
  config.max_depth = o.depth;
  config.lambda = o.lambda;
  config.gamma = o.gamma;
  config.learning_rate = o.learning_rate;
  config.seed = o.seed;
  config.validate();

  Dataset train_set = dataset;
  Dataset test_set;
  if (o.eval_split) {
    std::tie(train_set, test_set) = split_dataset(dataset, SplitSpec{o.train_fraction, o.seed, true});
  }
  const auto names = split_names(o.features);
  const auto frames = train_set.frames();
  const auto matrix = build_feature_matrix(frames, names);
  const auto labels = labels_of(train_set);
  double final_logloss = 0.0;
  const Ensemble model = train(matrix, labels, config, [&](std::size_t round, std::span<const double> margins) {
    if (round + 1 == config.num_trees) final_logloss = mean_logloss(margins, labels);
  });
  save_model(model, o.out);
  const auto manifest = make_manifest(sub, {o.data}, {o.out}, o.seed);
  write_text(manifest_path(o.out), manifest.dump(2) + "\n");

  ordered_json report;
  report["command"] = "train";
  report["trees"] = model.trees.size();
  report["feature_names"] = model.feature_names;
  report["train_samples"] = train_set.size();
  report["train_logloss"] = final_logloss;
  if (o.eval_split) {
    auto metrics = metrics_json(evaluate_model(model, test_set, o.threshold), o.threshold);
    metrics["test_samples"] = test_set.size();
    report["evaluation"] = std::move(metrics);
  }
  report["out"] = o.out;
  emit(out, std::move(report), manifest);
  return kSuccess;
}

int cmd_evaluate(const Options& o, const CLI::App& sub, std::ostream& out) {
  ordered_json report;
  report["command"] = "evaluate";
  ConfusionMatrix cm;
  std::vector<std::string> inputs;
  if (!o.from_counts.empty()) {
    cm = {o.from_counts[0], o.from_counts[1], o.from_counts[2], o.from_counts[3]};
    if (cm.total() == 0) throw Error(ErrorCode::EmptyMatrix, "all counts are zero");
    report["source"] = "counts";
  } else {
    if (o.model.empty() || o.data.empty()) {
      throw CLI::RequiredError("evaluate needs --model and --data, or --from-counts");
    }
    const Ensemble model = load_model(o.model);
    const Dataset data = load_dataset(o.data);
    cm = evaluate_model(model, data, o.threshold);
    inputs = {o.model, o.data};
    report["source"] = "model";
  }
  const auto metrics = metrics_json(cm, o.threshold);
  for (const auto& [key, value] : metrics.items()) report[key] = value;
  emit(out, std::move(report), make_manifest(sub, inputs, {}, o.seed));
  return kSuccess;
}

int cmd_predict(const Options& o, const CLI::App& sub, std::ostream& out, std::ostream& err) {
  const Ensemble model = load_model(o.model);
  const Dataset data = load_dataset(o.data);
  std::ostringstream csv;
  csv << "frame_id,margin,probability\n";
  for (const auto& s : data.samples) {
    const auto row = feature_row(extract_features(s.frame), model.feature_names);
    const double margin = model.predict_margin(row);
    csv << s.frame.frame_id << ',' << format_double(margin) << ',' << format_double(sigmoid(margin)) << '\n';
  }
  ordered_json report;
  report["command"] = "predict";
  report["rows"] = data.size();
  if (o.out.empty()) {
    out << csv.str();
    report["manifest"] = make_manifest(sub, {o.model, o.data}, {}, o.seed);
    err << report.dump() << '\n';
  } else {
    write_text(o.out, csv.str());
    const auto manifest = make_manifest(sub, {o.model, o.data}, {o.out}, o.seed);
    write_text(manifest_path(o.out), manifest.dump(2) + "\n");
    report["out"] = o.out;
    emit(out, std::move(report), manifest);
  }
  return kSuccess;
}

int cmd_stream(const Options& o, const CLI::App& sub, std::ostream& out) {
  const Ensemble model = load_model(o.model);
  const Dataset data = load_dataset(o.data);
  const auto frames = data.frames();
  const auto verdict = score_stream(model, frames, o.threshold);
  ordered_json report;
  report["command"] = "stream";
  auto per_frame = ordered_json::array();
  for (const auto& f : verdict.frames) per_frame.push_back({{"frame_id", f.frame_id}, {"probability", f.probability}});
  report["frames"] = std::move(per_frame);
  report["scored"] = verdict.frames.size();
  report["skipped"] = verdict.skipped.size();
  report["skipped_frame_ids"] = verdict.skipped;
  report["mean_prob"] = verdict.mean_prob;
  report["decision_threshold"] = verdict.decision_threshold;
  report["verdict"] = verdict.fatigue ? "fatigue" : "non-fatigue";
  emit(out, std::move(report), make_manifest(sub, {o.model, o.data}, {}, o.seed));
  return kSuccess;
}

int cmd_replay(const Options& o, std::ostream& out, std::ostream& err) {
  std::ifstream file(o.manifest, std::ios::binary);
  if (!file) throw Error(ErrorCode::IoError, "cannot open '" + o.manifest + "' for reading");
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(file);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::IoError, std::string("malformed manifest: ") + e.what());
  }
  // A report printed to stdout embeds its manifest under "manifest".
  if (manifest.contains("manifest")) manifest = manifest["manifest"];
  if (!manifest.contains("argv") || !manifest["argv"].is_array() || manifest["argv"].empty()) {
    throw Error(ErrorCode::IoError, "manifest has no argv");
  }
  const auto argv = manifest["argv"].get<std::vector<std::string>>();
  if (argv.front() == "replay") throw Error(ErrorCode::IoError, "refusing to replay a replay");
  return run(argv, out, err);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Fatigue recognition from facial landmarks: EAR/MAR features and boosted trees", kToolName};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  app.option_defaults()->always_capture_default();

  auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic landmark dataset");
  synth->add_option("--n", o.n, "Number of samples");
  synth->add_option("--fatigue-fraction", o.fatigue_fraction, "Fraction of fatigued samples");
  synth->add_option("--noise", o.noise, "Coordinate noise sigma in pixels");
  synth->add_option("--seed", o.seed, "Random seed");
  synth->add_option("--out", o.out, "Output dataset path")->required();
  synth->add_option("--format", o.format, "csv or jsonl (default: from extension)");

  auto* features = app.add_subcommand("features", "Per-frame EAR/MAR features and blink/yawn events");
  features->add_option("--data", o.data, "Landmark dataset (.csv or .jsonl)")->required();
  features->add_option("--out", o.out, "Feature CSV path (default: stdout)");
  features->add_option("--ear-threshold", o.ear_threshold, "Blink threshold on EAR");
  features->add_option("--mar-threshold", o.mar_threshold, "Yawn threshold on MAR");
  features->add_option("--min-event-frames", o.min_event_frames, "Minimum run length of an event");
  features->add_option("--fps", o.fps, "Frame rate of the sequence");

  auto* train_cmd = app.add_subcommand("train", "Train a boosted-tree fatigue classifier");
  train_cmd->add_option("--data", o.data, "Labeled landmark dataset")->required();
  train_cmd->add_option("--out", o.out, "Model file path")->required();
  train_cmd->add_option("--trees", o.trees, "Boosting rounds");
  train_cmd->add_option("--depth", o.depth, "Maximum tree depth");
  train_cmd->add_option("--lambda", o.lambda, "L2 penalty on leaf weights");
  train_cmd->add_option("--gamma", o.gamma, "Penalty per leaf");
  train_cmd->add_option("--learning-rate", o.learning_rate, "Shrinkage per tree");
  train_cmd->add_option("--seed", o.seed, "Seed for the evaluation split");
  train_cmd->add_flag("--eval-split", o.eval_split, "Hold out a test split and report its metrics");
  train_cmd->add_option("--train-fraction", o.train_fraction, "Training share of the split");
  train_cmd->add_option("--threshold", o.threshold, "Decision threshold for reported metrics");
  train_cmd->add_option("--features", o.features, "Comma-separated feature columns");

  auto* evaluate = app.add_subcommand("evaluate", "Confusion counts, accuracy and sensitivity");
  evaluate->add_option("--model", o.model, "Model file");
  evaluate->add_option("--data", o.data, "Labeled landmark dataset");
  evaluate->add_option("--threshold", o.threshold, "Decision threshold");
  auto* counts = evaluate->add_option("--from-counts", o.from_counts, "TP,FN,FP,TN counts")
                     ->delimiter(',')
                     ->expected(4);
  counts->excludes(evaluate->get_option("--model"));
  counts->excludes(evaluate->get_option("--data"));

  auto* predict = app.add_subcommand("predict", "Per-frame fatigue probabilities");
  predict->add_option("--model", o.model, "Model file")->required();
  predict->add_option("--data", o.data, "Landmark dataset")->required();
  predict->add_option("--out", o.out, "Probability CSV path (default: stdout)");

  auto* stream = app.add_subcommand("stream", "Stream-level verdict from the mean frame probability");
  stream->add_option("--model", o.model, "Model file")->required();
  stream->add_option("--data", o.data, "Frame-ordered landmark sequence")->required();
  stream->add_option("--threshold", o.threshold, "Decision threshold on the mean probability");

  auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  replay->add_option("--manifest", o.manifest, "Manifest file")->required();

  std::vector<std::string> argv_storage{kToolName};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    if (synth->parsed()) return cmd_synth(o, *synth, out);
    if (features->parsed()) return cmd_features(o, *features, out, err);
    if (train_cmd->parsed()) return cmd_train(o, *train_cmd, out);
    if (evaluate->parsed()) return cmd_evaluate(o, *evaluate, out);
    if (predict->parsed()) return cmd_predict(o, *predict, out, err);
    if (stream->parsed()) return cmd_stream(o, *stream, out);
    if (replay->parsed()) return cmd_replay(o, out, err);
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kDomainError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDomainError;
  }
  return kUsageError;
}

}  // namespace fatigue::cli
