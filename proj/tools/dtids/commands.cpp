#include "commands.hpp"

#include <algorithm>
#include <cctype>
#include <iostream>
#include <map>

#include "dtids/checkpoint.hpp"
#include "dtids/error.hpp"
#include "dtids/experiment.hpp"
#include "dtids/pipeline.hpp"
#include "dtids/report.hpp"
#include "dtids/synthgen.hpp"

namespace fs = std::filesystem;

namespace dtids::cli {

namespace {

fs::path output_dir(const Settings& s) {
  const fs::path out = s.require("out");
  fs::create_directories(out);
  return out;
}

fs::path existing(const std::string& path, std::string_view what) {
  if (!fs::exists(path)) throw ConfigError(std::string(what) + " not found: " + path);
  return path;
}

std::string schema_for(const fs::path& csv, const std::string& given) {
  if (!given.empty()) return existing(given, "schema file").string();
  fs::path p = csv;
  p.replace_extension(".schema");
  return existing(p.string(), "schema file").string();
}

TabularDataset load_raw(const fs::path& csv, const std::string& schema) {
  const std::vector<SourceFile> files{{existing(csv.string(), "data file"), SensorSchema::load(schema)}};
  TabularDataset ds = ingest(files);
  encode_labels(ds);
  return ds;
}

std::string model_title(ModelKind kind) {
  switch (kind) {
    case ModelKind::presnet: return "P-ResNet";
    case ModelKind::mlp: return "MLP";
    case ModelKind::fcn: return "FCN";
    case ModelKind::single_channel: return "Single-channel DNN";
    case ModelKind::multi_channel: return "Multi-channel DNN";
  }
  return "model";
}

Task task_for(const ArchSpec& spec) {
  if (spec.classes == task_classes(Task::binary)) return Task::binary;
  if (spec.classes == task_classes(Task::multiclass)) return Task::multiclass;
  throw ConfigError("checkpoint has " + std::to_string(spec.classes) + " classes; no task matches");
}

const TabularDataset& pick_split(const PreparedSplits& p, const std::string& name) {
  if (name == "train") return p.train;
  if (name == "val") return p.val;
  if (name == "test") return p.test;
  throw ConfigError("--split must be train, val or test, got '" + name + "'");
}

void apply_learning_rate(TrainConfig& tc, const Settings& s) {
  tc.optimizer = parse_optimizer(s.get("optimizer"));
  if (s.has("lr")) tc.set_learning_rate(s.number("lr"));
}

// Metrics plus the fields report needs to label the row.
void write_metrics(const fs::path& dir, const MetricsReport& m, const std::string& model, Task task,
                   const std::string& split) {
  KeyValueFile kv;
  kv.add("model", model);
  kv.add("task", std::string(to_string(task)));
  kv.add("split", split);
  kv.add("label_convention", std::string(kLabelConvention));
  const KeyValueFile metrics = metrics_to_kv(m);
  for (const auto& e : metrics.entries()) kv.add(e.key, e.value);
  kv.save(dir / "metrics.txt");
  write_file(dir / "confusion.csv", confusion_csv(m.confusion));
}

void say(const std::string& line) { std::cerr << line << '\n'; }

}  // namespace

void run_synth(Settings& s) {
  const fs::path out = output_dir(s);
  std::vector<BenchmarkPart> parts;
  if (s.has("scenario") == s.has("benchmark")) throw ConfigError("synth: give exactly one of --scenario or --benchmark");
  if (s.has("scenario")) {
    SynthConfig cfg = SynthConfig::load(s.get("scenario"));
    if (s.has("seed")) cfg.seed = static_cast<std::uint64_t>(s.integer("seed"));
    parts.push_back({"", cfg});
  } else {
    parts = make_benchmark(s.get("benchmark"), s.has("seed") ? static_cast<std::uint64_t>(s.integer("seed")) : 1);
  }
  std::vector<std::string> outputs;
  for (const auto& part : parts) {
    const fs::path dir = part.name.empty() ? out : out / part.name;
    const SynthOutput data = generate(part.config);
    data.save(dir);
    part.config.to_kv().save(dir / "scenario.txt");
    const std::string prefix = part.name.empty() ? "" : part.name + "/";
    outputs.push_back(prefix + "combined/combined.csv");
    outputs.push_back(prefix + "scenario.txt");
    say("synth: " + std::to_string(data.combined.rows()) + " rows -> " + dir.string());
  }
  s.write_manifest(out, outputs);
}

void run_prepare(Settings& s) {
  const fs::path raw = existing(s.require("raw"), "raw data");
  std::vector<SourceFile> sources;
  if (fs::is_directory(raw)) {
    const fs::path schemas = s.has("schemas") ? existing(s.get("schemas"), "schema directory") : raw;
    sources = discover_sources(raw, schemas);
  } else {
    sources.push_back({raw, SensorSchema::load(schema_for(raw, s.get("schemas")))});
  }
  PrepareConfig cfg;
  cfg.seed = static_cast<std::uint64_t>(s.integer("seed"));
  cfg.esd_alpha = s.number("esd_alpha");
  cfg.esd_max_outliers = s.count("esd_max_outliers");
  cfg.prune_threshold = s.number("prune_threshold");
  cfg.validate();

  const fs::path out = output_dir(s);
  TabularDataset ds = ingest(sources);
  encode_labels(ds);
  const PreparedData prepared = prepare(ds, cfg);
  prepared.save(out);
  say("prepare: " + std::to_string(ds.rows()) + " rows, " + std::to_string(prepared.train.features()) +
      " features kept, " + std::to_string(prepared.prune.dropped().size()) + " dropped");
  s.write_manifest(out, {"train.csv", "val.csv", "test.csv", "scaler.txt", "imputer.txt", "correlation.csv",
                         "dropped.txt", "outliers.csv", "summary.txt"});
}

void run_train(Settings& s) {
  const fs::path data_dir = existing(s.require("data"), "prepared directory");
  const ModelKind kind = parse_model_kind(s.get("model"));
  if (kind != ModelKind::presnet && kind != ModelKind::mlp && kind != ModelKind::fcn) {
    throw ConfigError("--model must be presnet, mlp or fcn");
  }
  const Task task = parse_task(s.get("task"));
  const std::size_t window = s.count("window");
  const auto seed = static_cast<std::uint64_t>(s.integer("seed"));

  TrainConfig tc;
  tc.epochs = static_cast<int>(s.integer("epochs"));
  tc.batch_size = s.count("batch");
  tc.seed = seed;
  apply_learning_rate(tc, s);
  // An implicit patience never exceeds a short epoch budget.
  if (!s.is_explicit("patience") && tc.epochs < s.integer("patience")) s.set("patience", std::to_string(tc.epochs));
  if (s.get("patience") != "none" && s.integer("patience") > 0) tc.patience = static_cast<int>(s.integer("patience"));
  else tc.patience = std::nullopt;
  tc.validate();

  const PreparedSplits splits = PreparedSplits::load(data_dir);
  const Domain train_set = to_domain(splits.train, window, task);
  const Domain val_set = to_domain(splits.val, window, task);
  const Domain test_set = to_domain(splits.test, window, task, DomainRole::target);
  const std::size_t channels = splits.train.features();
  const std::size_t classes = task_classes(task);
  Network net = kind == ModelKind::presnet ? build_presnet(channels, window, classes, seed)
                                           : build_baseline(kind, channels, window, classes, seed);

  tc.on_epoch = [](const EpochRecord& r) {
    say("epoch " + std::to_string(r.epoch) + "  loss " + format_double(r.train_loss) + "  acc " +
        format_double(r.train_accuracy) + "  val_loss " + format_double(r.val_loss) + "  val_acc " +
        format_double(r.val_accuracy));
  };
  auto [history, training_seconds] = time_block([&] { return train(net, train_set, val_set, tc); });
  MetricsReport report = evaluate(net, test_set);
  report.training_seconds = training_seconds;

  const fs::path out = output_dir(s);
  save_checkpoint(net, out / "checkpoint.bin");
  write_file(out / "history.csv", history_csv(history));
  write_metrics(out, report, model_title(kind), task, "test");
  KeyValueFile timing;
  timing.add("training_seconds", format_double(training_seconds));
  timing.add("testing_seconds", format_double(report.testing_seconds));
  timing.add("best_epoch", std::to_string(history.best_epoch));
  timing.add("stopped_early", history.stopped_early ? "true" : "false");
  timing.save(out / "timing.txt");
  write_file(out / "epoch_timing.csv", epoch_timing_csv(history));
  say("train: " + model_title(kind) + " test accuracy " + format_double(report.accuracy));
  s.write_manifest(out, {"checkpoint.bin", "history.csv", "metrics.txt", "confusion.csv"});
}

void run_evaluate(Settings& s) {
  Network net = load_checkpoint(existing(s.require("checkpoint"), "checkpoint"));
  const PreparedSplits splits = PreparedSplits::load(existing(s.require("data"), "prepared directory"));
  const std::string split = s.get("split");
  const Task task = task_for(net.spec());
  const Domain data = to_domain(pick_split(splits, split), net.spec().window, task, DomainRole::target);
  const MetricsReport report = evaluate(net, data);

  const fs::path out = output_dir(s);
  write_metrics(out, report, model_title(net.spec().kind), task, split);
  KeyValueFile timing;
  timing.add("testing_seconds", format_double(report.testing_seconds));
  timing.save(out / "timing.txt");
  say("evaluate: accuracy " + format_double(report.accuracy));
  s.write_manifest(out, {"metrics.txt", "confusion.csv"});
}

void run_transfer(Settings& s) {
  const fs::path source_csv = s.require("source"), target_csv = s.require("target");
  TabularDataset source = load_raw(source_csv, schema_for(source_csv, s.get("source_schema")));
  TabularDataset target = load_raw(target_csv, schema_for(target_csv, s.get("target_schema")));
  Imputer::fit(source).apply(source);
  Imputer::fit(target).apply(target);

  TransferExperimentConfig cfg;
  cfg.channels = s.has("channels") ? s.list("channels") : transfer_channels();
  cfg.window = s.count("window");
  cfg.source_stride = s.count("source_stride");
  cfg.target_stride = s.count("stride");
  cfg.source_epochs = static_cast<int>(s.integer("source_epochs"));
  cfg.target_epochs = static_cast<int>(s.integer("epochs"));
  cfg.batch_size = s.count("batch");
  cfg.optimizer = parse_optimizer(s.get("optimizer"));
  cfg.policy = parse_freeze_policy(s.get("freeze"));

  std::vector<std::uint64_t> seeds;
  if (s.has("seed")) {
    seeds.push_back(static_cast<std::uint64_t>(s.integer("seed")));
  } else {
    for (const auto& t : s.list("seeds")) {
      const auto v = parse_int(t);
      if (!v || *v < 0) throw ConfigError("--seeds: bad seed '" + t + "'");
      seeds.push_back(static_cast<std::uint64_t>(*v));
    }
  }
  if (seeds.empty()) throw ConfigError("transfer: no seeds given");

  const fs::path out = output_dir(s);
  std::string table = "seed,transferred_val_acc,scratch_val_acc,difference\n";
  KeyValueFile timing;
  double sum_transferred = 0.0, sum_scratch = 0.0;
  std::vector<std::string> outputs{"comparison.csv", "summary.txt"};
  for (const auto seed : seeds) {
    cfg.seed = seed;
    auto [outcome, seconds] = time_block([&] { return run_transfer_experiment(source, target, cfg); });
    const fs::path dir = out / ("seed-" + std::to_string(seed));
    fs::create_directories(dir);
    save_checkpoint(outcome.single, dir / "source.bin");
    save_checkpoint(outcome.transferred_net, dir / "transferred.bin");
    save_checkpoint(outcome.scratch_net, dir / "scratch.bin");
    write_file(dir / "source_history.csv", history_csv(outcome.source));
    write_file(dir / "transferred_history.csv", history_csv(outcome.transferred));
    write_file(dir / "scratch_history.csv", history_csv(outcome.scratch));
    for (const char* f : {"source.bin", "transferred.bin", "scratch.bin"})
      outputs.push_back("seed-" + std::to_string(seed) + "/" + f);

    const double a = outcome.transferred_accuracy(), b = outcome.scratch_accuracy();
    sum_transferred += a;
    sum_scratch += b;
    table += std::to_string(seed) + "," + format_double(a) + "," + format_double(b) + "," + format_double(a - b) + "\n";
    timing.add("seed_" + std::to_string(seed) + "_seconds", format_double(seconds));
    say("transfer: seed " + std::to_string(seed) + "  transferred " + format_double(a) + "  scratch " +
        format_double(b));
  }
  const double n = static_cast<double>(seeds.size());
  const double mean_t = sum_transferred / n, mean_s = sum_scratch / n;
  table += "mean," + format_double(mean_t) + "," + format_double(mean_s) + "," + format_double(mean_t - mean_s) + "\n";
  write_file(out / "comparison.csv", table);

  KeyValueFile summary;
  summary.add("label_convention", std::string(kLabelConvention));
  summary.add("seeds", std::to_string(seeds.size()));
  summary.add("mean_transferred_val_acc", format_double(mean_t));
  summary.add("mean_scratch_val_acc", format_double(mean_s));
  summary.add("transfer_not_worse", mean_t >= mean_s ? "true" : "false");
  summary.save(out / "summary.txt");
  timing.save(out / "timing.txt");
  std::cout << table;
  s.write_manifest(out, outputs);
}

void run_report(Settings& s) {
  const auto runs = s.list("runs");
  if (runs.empty()) throw ConfigError("report: no run directories given");
  std::vector<ComparisonRow> rows;
  std::vector<History> curves;
  std::map<std::string, int> seen;
  for (const auto& run : runs) {
    const fs::path dir = existing(run, "run directory");
    const auto metrics = KeyValueFile::load(dir / "metrics.txt");
    ComparisonRow row;
    row.model = metrics.get_or("model", dir.filename().string());
    row.metrics = metrics_from_kv(metrics);
    if (fs::exists(dir / "timing.txt")) {
      const auto timing = KeyValueFile::load(dir / "timing.txt");
      if (auto v = timing.get("training_seconds")) row.training_seconds = parse_double(*v);
      if (auto v = timing.get("testing_seconds")) row.testing_seconds = parse_double(*v);
    }
    rows.push_back(row);
    curves.push_back(fs::exists(dir / "history.csv")
                         ? parse_history_csv(read_file(dir / "history.csv"), (dir / "history.csv").string())
                         : History{});
    ++seen[row.model];
  }
  // Disambiguate repeated model names by run directory.
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (seen[rows[i].model] > 1) rows[i].model += " (" + fs::path(runs[i]).filename().string() + ")";
  }

  const fs::path out = output_dir(s);
  write_file(out / "comparison.csv", comparison_csv(rows));
  write_file(out / "resources.csv", resources_csv(rows));
  std::vector<std::string> outputs{"comparison.csv", "resources.csv"};
  fs::create_directories(out / "curves");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (curves[i].epochs.empty()) continue;
    std::string slug;
    for (char c : rows[i].model) slug += std::isalnum(static_cast<unsigned char>(c)) ? static_cast<char>(std::tolower(c)) : '_';
    write_file(out / "curves" / (slug + ".csv"), history_csv(curves[i]));
    outputs.push_back("curves/" + slug + ".csv");
  }
  std::cout << comparison_table(rows);
  s.write_manifest(out, outputs);
}

void run_command(Settings& s) {
  static const std::map<std::string, void (*)(Settings&), std::less<>> commands{
      {"synth", run_synth},   {"prepare", run_prepare},   {"train", run_train},
      {"evaluate", run_evaluate}, {"transfer", run_transfer}, {"report", run_report}};
  auto it = commands.find(s.command());
  if (it == commands.end()) throw ConfigError("unknown command '" + s.command() + "'");
  it->second(s);
}

}  // namespace dtids::cli
