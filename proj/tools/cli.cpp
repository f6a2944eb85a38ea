#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "rgseg/classifier.hpp"
#include "rgseg/components.hpp"
#include "rgseg/dataset.hpp"
#include "rgseg/error.hpp"
#include "rgseg/grow.hpp"
#include "rgseg/image_io.hpp"
#include "rgseg/metrics.hpp"
#include "rgseg/model.hpp"
#include "rgseg/synth.hpp"
#include "rgseg/train.hpp"
#include "rgseg/tune.hpp"

namespace rgseg::cli {

namespace fs = std::filesystem;

namespace {

std::string fmt_double(double v) {
  if (std::isnan(v)) return "NaN";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_list(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParameterError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw ParameterError("not a number: '" + s + "'");
  return v;
}

/// "start:stop:step" (inclusive) or a comma separated list.
std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> grid;
  if (spec.find(':') != std::string::npos) {
    const auto parts = split_list(spec, ':');
    if (parts.size() != 3) throw ParameterError("grid range must be start:stop:step");
    const double start = parse_double(parts[0]);
    const double stop = parse_double(parts[1]);
    const double step = parse_double(parts[2]);
    if (!(step > 0.0) || stop < start) throw ParameterError("bad grid range '" + spec + "'");
    const long n = std::lround(std::floor((stop - start) / step + 1e-9)) + 1;
    for (long i = 0; i < n; ++i) {
      // Round away accumulated binary noise (0.15000000000000002 -> 0.15).
      grid.push_back(std::round((start + i * step) * 1e12) / 1e12);
    }
  } else {
    for (const auto& item : split_list(spec)) grid.push_back(parse_double(item));
  }
  if (grid.empty()) throw ParameterError("threshold grid is empty");
  return grid;
}

void ensure_parent(const fs::path& file) {
  if (file.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(file.parent_path(), ec);
    if (ec) throw IoError("cannot create " + file.parent_path().string() + ": " + ec.message());
  }
}

std::ofstream open_out(const fs::path& file) {
  ensure_parent(file);
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + file.string());
  return out;
}

// Reads `key=value` lines; blank lines and lines starting with '#' are
// skipped.
std::vector<std::pair<std::string, std::string>> read_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  int lineno = 0;
  const auto trim = [](std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return std::string();
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParameterError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    }
    entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return entries;
}

bool truthy(const std::string& v) {
  return v == "1" || v == "true" || v == "yes" || v == "on";
}

struct ClassifierChoice {
  enum class Kind { oracle, pmap, model } kind = Kind::oracle;
  fs::path path;
};

ClassifierChoice parse_classifier(const std::string& spec) {
  if (spec == "oracle") return {ClassifierChoice::Kind::oracle, {}};
  if (spec.rfind("pmap:", 0) == 0) return {ClassifierChoice::Kind::pmap, spec.substr(5)};
  if (spec.rfind("model:", 0) == 0) return {ClassifierChoice::Kind::model, spec.substr(6)};
  throw ParameterError("classifier must be oracle, pmap:<path> or model:<path>, got '" + spec + "'");
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  fs::path out_dir;
  int n = 5;
  std::uint64_t seed = 0;
  SynthParams params;
};

void cmd_synth(const SynthArgs& a, std::ostream& log) {
  if (a.n < 1) throw ParameterError("--n must be >= 1");
  validate(a.params);
  std::mt19937_64 seeds(a.seed);
  std::vector<Triple> triples;
  std::ostringstream manifest;
  manifest << "id,height,width,channels,foreground,roi\n";
  for (int i = 0; i < a.n; ++i) {
    SynthParams p = a.params;
    p.rng_seed = seeds();
    SynthImage s = generate_synthetic(p);
    char id[32];
    std::snprintf(id, sizeof(id), "img%03d", i);
    manifest << id << ',' << p.height << ',' << p.width << ',' << p.channels << ','
             << s.truth.count() << ',' << s.roi.count() << '\n';
    triples.push_back({id, std::move(s.image), std::move(s.truth), std::move(s.roi)});
  }
  save_dataset(a.out_dir, triples);
  open_out(a.out_dir / "manifest.csv") << manifest.str();
  log << manifest.str();
  log << "wrote " << a.n << " triples to " << a.out_dir.string() << '\n';
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  fs::path data_dir;
  fs::path model_out;
  fs::path loss_csv;
  int n_val = 3;
  std::string exclude;
  std::uint64_t split_seed = 0;
  bool no_pretrain = false;
  bool no_augment = false;
  ClassifierConfig classifier;
  FeatureSpec features;
  TrainConfig train;
};

void cmd_train(TrainArgs a, std::ostream& log) {
  a.train.pretrain = !a.no_pretrain;
  a.train.augment = !a.no_augment;
  a.train.validate();
  a.classifier.validate();
  if (!fs::is_directory(a.data_dir)) throw IoError("data directory not found: " + a.data_dir.string());
  auto triples = load_dataset(a.data_dir);
  if (triples.empty()) throw DataError("no images in " + a.data_dir.string());
  a.features.channels = triples.front().image.channels();
  const DatasetSplit split =
      split_dataset(std::move(triples), a.n_val, split_list(a.exclude), a.split_seed);
  log << "training on " << split.train.size() << " images, validating on "
      << split.validation.size() << '\n';

  const FitResult result = fit(make_model(a.classifier, a.features), split, a.train);
  const fs::path csv = a.loss_csv.empty() ? fs::path(a.model_out.string() + ".loss.csv") : a.loss_csv;
  std::ofstream out = open_out(csv);
  out << "epoch,train_loss,val_loss\n";
  for (const auto& e : result.history) {
    out << e.epoch << ',' << fmt_double(e.train_loss) << ',' << fmt_double(e.val_loss) << '\n';
    log << "epoch " << e.epoch << " train " << e.train_loss << " val " << e.val_loss << '\n';
  }
  if (!out) throw IoError("write failed: " + csv.string());
  ensure_parent(a.model_out);
  save_model(result.model, a.model_out);
  log << "model written to " << a.model_out.string() << '\n';
}

// ---------------------------------------------------------------------------
// grow / baseline

struct GrowArgs {
  fs::path image;
  fs::path roi;
  fs::path gt;
  std::string classifier = "oracle";
  fs::path out;
  fs::path snapshots;
  fs::path votes;
  ClassifierConfig config;
  GrowConfig grow;
};

std::unique_ptr<Classifier> build_classifier(const ClassifierChoice& choice, const fs::path& gt,
                                             const ClassifierConfig& config) {
  switch (choice.kind) {
    case ClassifierChoice::Kind::oracle:
      if (gt.empty()) throw ParameterError("the oracle classifier needs --gt");
      return oracle_classifier(load_mask(gt), config);
    case ClassifierChoice::Kind::pmap:
      return probmap_classifier(load_pmap(choice.path), config);
    case ClassifierChoice::Kind::model:
      return model_classifier(load_model(choice.path));
  }
  throw ParameterError("unknown classifier");
}

void cmd_grow(const GrowArgs& a, std::ostream& log) {
  a.grow.validate();
  const Image img = load_image(a.image);
  const Mask roi = load_mask(a.roi);
  const auto classifier = build_classifier(parse_classifier(a.classifier), a.gt, a.config);
  const GrowResult result = grow_region(img, roi, *classifier, a.grow);
  ensure_parent(a.out);
  save_mask(a.out, result.mask);
  log << "grew " << result.mask.count() << " pixels in " << result.iterations << " iterations ("
      << result.pixels_evaluated << " tiles classified)\n";
  if (!a.votes.empty()) {
    ensure_parent(a.votes);
    save_pmap(a.votes, result.votes.average_map());
  }
  if (!a.snapshots.empty()) {
    fs::create_directories(a.snapshots);
    for (long it = 0; it <= result.iterations; ++it) {
      char name[32];
      std::snprintf(name, sizeof(name), "iter%05ld.pgm", it);
      save_mask(a.snapshots / name, result.snapshot(it));
    }
  }
}

struct BaselineArgs {
  fs::path pmap;
  fs::path roi;
  fs::path out;
  double threshold = 0.5;
};

void cmd_baseline(const BaselineArgs& a, std::ostream& log) {
  const ProbMap map = load_pmap(a.pmap);
  const Mask roi = load_mask(a.roi);
  const Mask mask = dense_threshold_segment(map, roi, a.threshold);
  ensure_parent(a.out);
  save_mask(a.out, mask);
  log << "thresholded " << mask.count() << " pixels at " << a.threshold << '\n';
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  fs::path pred_dir;
  fs::path gt_dir;
  fs::path roi_dir;
  fs::path out;
  std::string method = "rgseg";
  bool keep_largest = false;
  int connectivity = 8;
};

struct Summary {
  double mean = 0.0;
  double std = 0.0;
};

// Population statistics; NaN as soon as one value is undefined.
Summary summarize(const std::vector<double>& values) {
  if (values.empty()) return {std::nan(""), std::nan("")};
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / n)};
}

void cmd_eval(const EvalArgs& a, std::ostream& log) {
  const auto preds = list_by_stem(a.pred_dir);
  const auto gts = list_by_stem(a.gt_dir);
  const auto rois = list_by_stem(a.roi_dir);
  const std::map<std::string, fs::path> gt_map(gts.begin(), gts.end());
  const std::map<std::string, fs::path> roi_map(rois.begin(), rois.end());
  const std::map<std::string, fs::path> pred_map(preds.begin(), preds.end());
  for (const auto& [stem, path] : preds) {
    if (!gt_map.count(stem) || !roi_map.count(stem)) {
      throw DataError("unpaired file '" + stem + "': missing truth or RoI");
    }
  }
  for (const auto& [stem, path] : gts) {
    if (!pred_map.count(stem)) throw DataError("unpaired file '" + stem + "': missing prediction");
  }
  if (preds.empty()) throw DataError("no predictions in " + a.pred_dir.string());

  const std::string postproc = a.keep_largest ? "Largest" : "All";
  std::ofstream out = open_out(a.out);
  out << "image_id,method,postproc,dice,jaccard,mssd\n";
  std::vector<double> d;
  std::vector<double> j;
  std::vector<double> m;
  for (const auto& [stem, path] : preds) {
    const MetricReport r = evaluate(load_mask(path), load_mask(gt_map.at(stem)),
                                    load_mask(roi_map.at(stem)), a.keep_largest, a.connectivity);
    const double mv = r.mssd ? *r.mssd : std::nan("");
    out << stem << ',' << a.method << ',' << postproc << ',' << fmt_double(r.dice) << ','
        << fmt_double(r.jaccard) << ',' << fmt_double(mv) << '\n';
    d.push_back(r.dice);
    j.push_back(r.jaccard);
    m.push_back(mv);
  }
  const Summary sd = summarize(d);
  const Summary sj = summarize(j);
  const Summary sm = summarize(m);
  out << "mean," << a.method << ',' << postproc << ',' << fmt_double(sd.mean) << ','
      << fmt_double(sj.mean) << ',' << fmt_double(sm.mean) << '\n';
  out << "std," << a.method << ',' << postproc << ',' << fmt_double(sd.std) << ','
      << fmt_double(sj.std) << ',' << fmt_double(sm.std) << '\n';
  if (!out) throw IoError("write failed: " + a.out.string());

  char line[256];
  std::snprintf(line, sizeof(line), "%s | %s | %.4f ± %.4f | %.4f ± %.4f | %.4f ± %.4f\n",
                a.method.c_str(), postproc.c_str(), sd.mean, sd.std, sj.mean, sj.std, sm.mean,
                sm.std);
  log << "Method | Post-processing | Dice | Jaccard | MSSD\n" << line;
}

// ---------------------------------------------------------------------------
// tune

struct TuneArgs {
  fs::path data_dir;
  std::string classifier = "oracle";
  std::string method = "grow";
  std::string metric = "all";
  std::string grid = "0.05:0.95:0.05";
  fs::path report;
  int n_val = 3;
  std::string exclude;
  std::uint64_t split_seed = 0;
  bool keep_largest = false;
  ClassifierConfig config;
  GrowConfig grow;
};

void cmd_tune(const TuneArgs& a, std::ostream& log) {
  const std::vector<double> grid = parse_grid(a.grid);
  std::vector<Metric> metrics;
  if (a.metric == "all") {
    metrics = {Metric::dice, Metric::jaccard, Metric::mssd};
  } else {
    for (const auto& name : split_list(a.metric)) metrics.push_back(parse_metric(name));
  }
  if (a.method != "grow" && a.method != "baseline") {
    throw ParameterError("--method must be grow or baseline");
  }
  const ClassifierChoice choice = parse_classifier(a.classifier);
  if (a.method == "baseline" && choice.kind != ClassifierChoice::Kind::pmap) {
    throw ParameterError("the baseline method needs a pmap:<dir> classifier");
  }
  GrowConfig grow = a.grow;
  grow.threshold = 0.5;
  grow.validate();

  auto triples = load_dataset(a.data_dir);
  std::vector<Triple> validation;
  if (a.n_val == 0) {
    validation = split_dataset(std::move(triples), 0, split_list(a.exclude), a.split_seed).train;
  } else {
    validation =
        split_dataset(std::move(triples), a.n_val, split_list(a.exclude), a.split_seed).validation;
  }
  if (validation.empty()) throw DataError("no validation images");

  std::shared_ptr<Classifier> shared_model;
  if (choice.kind == ClassifierChoice::Kind::model) shared_model = model_classifier(load_model(choice.path));

  // Per-image classifier state, bound once and reused across thresholds.
  struct Bound {
    std::unique_ptr<Classifier> owned;
    std::unique_ptr<const ImageScorer> scorer;
    ProbMap map;
    Frontier seeds;
  };
  std::map<std::string, Bound> bound;
  for (const auto& t : validation) {
    Bound b;
    const Classifier* c = nullptr;
    if (choice.kind == ClassifierChoice::Kind::oracle) {
      b.owned = oracle_classifier(t.truth, a.config);
      c = b.owned.get();
    } else if (choice.kind == ClassifierChoice::Kind::pmap) {
      b.map = load_pmap(choice.path / (t.id + ".pmap"));
      b.owned = probmap_classifier(b.map, a.config);
      c = b.owned.get();
    } else {
      c = shared_model.get();
    }
    if (a.method == "grow") {
      b.scorer = c->bind(t.image);
      b.seeds = sample_seeds(t.roi, grow.n_seeds, grow.rng_seed);
    }
    bound.emplace(t.id, std::move(b));
  }

  const Segmenter segment = [&](const Triple& t, double threshold) {
    const Bound& b = bound.at(t.id);
    if (a.method == "baseline") return dense_threshold_segment(b.map, t.roi, threshold);
    GrowConfig g = grow;
    g.threshold = threshold;
    return grow_from_seeds(*b.scorer, t.roi, b.seeds, g).mask;
  };
  const auto results = tune_thresholds(segment, validation, metrics, grid, a.keep_largest);

  std::ofstream out = open_out(a.report);
  out << "metric,threshold,score\n";
  for (const auto& r : results) {
    out << to_string(r.metric) << ',' << fmt_double(r.threshold) << ',' << fmt_double(r.score)
        << '\n';
    log << to_string(r.metric) << ": threshold " << r.threshold << " score " << r.score << '\n';
  }
  if (!out) throw IoError("write failed: " + a.report.string());
}

// ---------------------------------------------------------------------------

void add_classifier_shape(CLI::App* app, ClassifierConfig& config) {
  app->add_option("--tile-size", config.tile_size, "Classifier input tile side (pixels)");
  app->add_option("--out-size", config.out_size, "Predicted neighborhood side (odd)");
}

void add_grow_options(CLI::App* app, GrowConfig& grow) {
  app->add_option("--seeds", grow.n_seeds, "Number of random seed pixels drawn from the RoI");
  app->add_option("--batch-size", grow.batch_size, "Frontier pixels per classifier batch");
  app->add_option("--seed", grow.rng_seed, "Seed sampling RNG seed");
  app->add_option("--max-iterations", grow.max_iterations, "Iteration cap (0 = height x width)");
  app->add_option("--threads", grow.n_threads, "Worker threads per classifier batch");
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Region-growing segmentation with neighborhood classifiers", "rgseg"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default()->multi_option_policy(
      CLI::MultiOptionPolicy::TakeLast);
  std::string config_unused;
  app.add_option("--config", config_unused,
                 "key=value file supplying defaults for the subcommand's flags");

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a synthetic vessel dataset");
  s->add_option("--out", synth.out_dir, "Output dataset directory")->required();
  s->add_option("--n", synth.n, "Number of images");
  s->add_option("--seed", synth.seed, "RNG seed");
  s->add_option("--height", synth.params.height, "Image height");
  s->add_option("--width", synth.params.width, "Image width");
  s->add_option("--channels", synth.params.channels, "Image channels (1 or 3)");
  s->add_option("--trees", synth.params.n_trees, "Vessel trees per image");
  s->add_option("--branch-prob", synth.params.branch_prob, "Branching probability per step");
  s->add_option("--width-min", synth.params.width_min, "Minimum vessel width");
  s->add_option("--width-max", synth.params.width_max, "Maximum vessel width");
  s->add_option("--noise", synth.params.noise_sigma, "Gaussian noise standard deviation");
  s->add_flag("--separate-trees", synth.params.separate_trees, "Keep trees from touching");

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train the reference neighborhood classifier");
  t->add_option("--data", train.data_dir, "Dataset directory")->required();
  t->add_option("--model-out", train.model_out, "Model file to write")->required();
  t->add_option("--loss-csv", train.loss_csv, "Loss history CSV (default <model-out>.loss.csv)");
  t->add_option("--epochs", train.train.epochs, "Training epochs");
  t->add_option("--batch-size", train.train.batch_size, "Mini-batch size");
  t->add_option("--lr", train.train.learning_rate, "SGD learning rate");
  t->add_option("--boundary-weight", train.train.boundary_weight, "Loss weight on truth contours");
  t->add_option("--samples-per-count", train.train.samples_per_count,
                "Training tiles per neighborhood count per epoch");
  t->add_option("--val-samples-per-count", train.train.val_samples_per_count,
                "Validation tiles per neighborhood count");
  t->add_option("--pretrain-samples", train.train.pretrain_samples,
                "Pre-training tiles (0 = 10 x samples-per-count)");
  t->add_flag("--no-pretrain", train.no_pretrain, "Skip the balanced pre-training epoch");
  t->add_flag("--no-augment", train.no_augment, "Disable rotation/brightness/contrast augmentation");
  t->add_option("--brightness", train.train.brightness, "Brightness shift range");
  t->add_option("--contrast", train.train.contrast, "Contrast scale range");
  t->add_option("--n-val", train.n_val, "Validation images");
  t->add_option("--exclude", train.exclude, "Comma separated image ids to drop");
  t->add_option("--split-seed", train.split_seed, "Train/validation split seed");
  t->add_option("--seed", train.train.rng_seed, "Training RNG seed");
  add_classifier_shape(t, train.classifier);
  t->add_option("--pool-grid", train.features.pool_grid, "Mean-pooling grid side");
  t->add_option("--center-window", train.features.center_window, "Raw centre window side (odd)");

  GrowArgs grow;
  auto* g = app.add_subcommand("grow", "Segment one image by region growing");
  g->add_option("--image", grow.image, "Input image")->required();
  g->add_option("--roi", grow.roi, "Region-of-interest mask")->required();
  g->add_option("--classifier", grow.classifier, "oracle | pmap:<file> | model:<file>");
  g->add_option("--gt", grow.gt, "Ground-truth mask (oracle classifier only)");
  g->add_option("--threshold", grow.grow.threshold, "Admission threshold on the average vote");
  g->add_option("--out", grow.out, "Output mask (PGM)")->required();
  g->add_option("--snapshots", grow.snapshots, "Directory for per-iteration masks");
  g->add_option("--votes", grow.votes, "Write the average vote field as PMAP");
  add_classifier_shape(g, grow.config);
  add_grow_options(g, grow.grow);

  BaselineArgs baseline;
  auto* b = app.add_subcommand("baseline", "Dense thresholding of a probability map");
  b->add_option("--pmap", baseline.pmap, "Probability map (PMAPv1)")->required();
  b->add_option("--roi", baseline.roi, "Region-of-interest mask")->required();
  b->add_option("--threshold", baseline.threshold, "Probability threshold");
  b->add_option("--out", baseline.out, "Output mask (PGM)")->required();

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "Score predicted masks against ground truth");
  e->add_option("--pred", eval.pred_dir, "Directory of predicted masks")->required();
  e->add_option("--gt", eval.gt_dir, "Directory of ground-truth masks")->required();
  e->add_option("--roi", eval.roi_dir, "Directory of RoI masks")->required();
  e->add_option("--out", eval.out, "CSV output")->required();
  e->add_option("--method", eval.method, "Method label for the CSV");
  e->add_flag("--keep-largest", eval.keep_largest, "Keep only the largest predicted object");
  e->add_option("--connectivity", eval.connectivity, "Component connectivity (4 or 8)");

  TuneArgs tune;
  auto* u = app.add_subcommand("tune", "Pick the admission threshold per metric on validation");
  u->add_option("--data", tune.data_dir, "Dataset directory")->required();
  u->add_option("--classifier", tune.classifier, "oracle | pmap:<dir> | model:<file>");
  u->add_option("--method", tune.method, "grow | baseline");
  u->add_option("--metric", tune.metric, "dice | jaccard | mssd | all (comma list allowed)");
  u->add_option("--grid", tune.grid, "start:stop:step or comma list of thresholds");
  u->add_option("--report", tune.report, "CSV report")->required();
  u->add_option("--n-val", tune.n_val, "Validation images (0 = tune on every image)");
  u->add_option("--exclude", tune.exclude, "Comma separated image ids to drop");
  u->add_option("--split-seed", tune.split_seed, "Train/validation split seed");
  u->add_flag("--keep-largest", tune.keep_largest, "Score only the largest predicted object");
  add_classifier_shape(u, tune.config);
  add_grow_options(u, tune.grow);

  try {
    // Config file values are inserted right after the subcommand name so
    // that flags given on the command line (parsed later) take precedence.
    std::vector<std::string> args;
    std::optional<fs::path> config_path;
    for (std::size_t i = 0; i < raw_args.size(); ++i) {
      if (raw_args[i] == "--config" && i + 1 < raw_args.size()) {
        config_path = raw_args[++i];
      } else if (raw_args[i].rfind("--config=", 0) == 0) {
        config_path = raw_args[i].substr(9);
      } else {
        args.push_back(raw_args[i]);
      }
    }
    if (config_path) {
      const auto sub = std::find_if(args.begin(), args.end(),
                                    [](const std::string& a) { return a.rfind("-", 0) != 0; });
      if (sub == args.end()) throw ParameterError("--config needs a subcommand");
      CLI::App* target = app.get_subcommand(*sub);
      std::vector<std::string> injected;
      for (const auto& [key, value] : read_config(*config_path)) {
        const CLI::Option* opt = target->get_option_no_throw("--" + key);
        if (opt == nullptr) throw ParameterError("unknown config key '" + key + "'");
        if (opt->get_expected_min() == 0) {
          if (truthy(value)) injected.push_back("--" + key);
        } else {
          injected.push_back("--" + key);
          injected.push_back(value);
        }
      }
      args.insert(sub + 1, injected.begin(), injected.end());
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& ex) {
    return app.exit(ex, out, err);
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return 2;
  }

  try {
    if (*s) cmd_synth(synth, err);
    if (*t) cmd_train(train, err);
    if (*g) cmd_grow(grow, err);
    if (*b) cmd_baseline(baseline, err);
    if (*e) cmd_eval(eval, err);
    if (*u) cmd_tune(tune, err);
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace rgseg::cli
