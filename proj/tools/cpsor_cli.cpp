// Command-line driver: generate, discretize, learn-dbn, train, eval, ablate,
// compare-dbn, plot.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cpsor/ablation.hpp"
#include "cpsor/cognitive_dbn.hpp"
#include "cpsor/dbn.hpp"
#include "cpsor/discretizer.hpp"
#include "cpsor/graph_builder.hpp"
#include "cpsor/metrics.hpp"
#include "cpsor/neural.hpp"
#include "cpsor/pipeline.hpp"
#include "cpsor/plotting.hpp"
#include "cpsor/scenario.hpp"
#include "cpsor/text_format.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace cpsor;

namespace {

constexpr int kRunSchemaVersion = 1;

// Exit code 2: an input artifact the command depends on is absent.
struct MissingArtifact : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_file(const std::string& path, const std::string& what) {
  if (path.empty() || !fs::is_regular_file(path)) throw MissingArtifact(what + " not found: " + path);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw std::runtime_error("cannot create directory " + dir);
}

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

std::vector<data::Episode> load_episodes(const std::string& dir) {
  if (!fs::is_directory(dir)) throw MissingArtifact("dataset directory not found: " + dir);
  auto episodes = data::load_dataset(dir);
  if (episodes.empty()) throw MissingArtifact("dataset is empty: " + dir);
  pipeline::sort_canonical(episodes);
  return episodes;
}

std::vector<std::size_t> select(const pipeline::Split& split, const std::string& which, std::size_t n) {
  if (which == "train") return split.train;
  if (which == "valid") return split.valid;
  if (which == "test") return split.test;
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  return all;
}

// Episodes, split and cognitive frames shared by the learning commands.
struct Prepared {
  std::vector<data::Episode> episodes;
  pipeline::Split split;
  disc::Discretizer discretizer;
  std::vector<std::vector<CognitiveFrame>> frames;
};

struct SplitOptions {
  std::uint64_t seed = 1;
  double train = 0.7;
  double valid = 0.15;
};

struct DiscretizerOptions {
  std::string path;  // fitted on the training split when empty
  std::uint64_t seed = 7;
};

Prepared prepare(const std::string& data_dir, const SplitOptions& so, const DiscretizerOptions& dopt) {
  Prepared p;
  p.episodes = load_episodes(data_dir);
  p.split = pipeline::split_episodes(p.episodes, so.seed, so.train, so.valid);
  if (!dopt.path.empty()) {
    require_file(dopt.path, "discretizer");
    p.discretizer = disc::Discretizer::from_json(read_file(dopt.path));
  } else {
    disc::DiscretizerConfig dc;
    dc.seed = dopt.seed;
    p.discretizer = disc::Discretizer::fit(pipeline::subset(p.episodes, p.split.train), dc);
  }
  p.frames = pipeline::discretize(p.discretizer, p.episodes);
  return p;
}

// Replaces discretizer frames by ground-truth annotations from the reference SOR DBN.
void annotate_reference(Prepared& p, const CognitiveEncoding& encoding) {
  const auto truth = sim::reference_sor_dbn(encoding);
  for (std::size_t i = 0; i < p.episodes.size(); ++i) {
    p.frames[i] = sim::annotate_ground_truth(p.episodes[i], truth, p.episodes[i].seed, encoding);
  }
}

void add_split_options(CLI::App* cmd, SplitOptions& so) {
  cmd->add_option("--split-seed", so.seed, "Seed of the stratified episode split");
  cmd->add_option("--train-fraction", so.train, "Fraction of episodes per scenario used for training");
  cmd->add_option("--valid-fraction", so.valid, "Fraction of episodes per scenario used for validation");
}

void add_discretizer_options(CLI::App* cmd, DiscretizerOptions& d) {
  cmd->add_option("--discretizer", d.path, "Fitted discretizer JSON (fitted on the training split when omitted)");
  cmd->add_option("--discretizer-seed", d.seed, "k-means seed when fitting the discretizer");
}

struct SearchFlags {
  std::string prior = "sor";
  std::string penalty = "params";
  std::uint64_t seed = 1;
  int restarts = 8;
  double alpha = 0.0;
  int max_parents = 4;
};

void add_search_options(CLI::App* cmd, SearchFlags& s) {
  cmd->add_option("--prior", s.prior, "Structure prior: sor, none or ordinary (fixed hand-coded structure)")
      ->check(CLI::IsMember({"sor", "none", "ordinary"}));
  cmd->add_option("--penalty", s.penalty, "BIC penalty: params or nodes")->check(CLI::IsMember({"params", "nodes"}));
  cmd->add_option("--search-seed", s.seed, "Hill-climb restart seed");
  cmd->add_option("--restarts", s.restarts, "Random restarts")->check(CLI::PositiveNumber);
  cmd->add_option("--alpha", s.alpha, "Dirichlet pseudo-count for CPT estimation")->check(CLI::NonNegativeNumber);
  cmd->add_option("--max-parents", s.max_parents, "Parent limit per node")->check(CLI::PositiveNumber);
}

dbn::SearchOptions search_options(const SearchFlags& s) {
  dbn::SearchOptions o;
  o.prior = s.prior == "none" ? dbn::Prior::None : dbn::Prior::Sor;
  o.penalty = s.penalty == "nodes" ? dbn::Penalty::Nodes : dbn::Penalty::Params;
  o.seed = s.seed;
  o.restarts = s.restarts;
  o.alpha = s.alpha;
  o.max_parents = s.max_parents;
  return o;
}

struct TrainFlags {
  nn::TrainConfig train;
  nn::ModelDims dims;
  double history = 3.0;
  double horizon = 1.0;
  std::size_t stride = 25;
  double d_close = graph::kDefaultCloseDistance;
};

void add_train_options(CLI::App* cmd, TrainFlags& t, bool with_horizon) {
  cmd->add_option("--epochs", t.train.epochs, "Training epochs")->check(CLI::NonNegativeNumber);
  cmd->add_option("--lr", t.train.learning_rate, "Learning rate")->check(CLI::PositiveNumber);
  cmd->add_option("--momentum", t.train.momentum, "Momentum coefficient")->check(CLI::Range(0.0, 0.999999));
  cmd->add_option("--batch", t.train.batch_size, "Mini-batch size")->check(CLI::PositiveNumber);
  cmd->add_option("--clip", t.train.clip_norm, "Gradient-norm clip (0 disables)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--gcn-dim", t.dims.gcn, "GCN hidden width")->check(CLI::PositiveNumber);
  cmd->add_option("--lstm-dim", t.dims.lstm, "LSTM hidden width")->check(CLI::PositiveNumber);
  cmd->add_option("--attn-dim", t.dims.attn, "Attention width")->check(CLI::PositiveNumber);
  cmd->add_option("--history", t.history, "Observed history in seconds")->check(CLI::PositiveNumber);
  if (with_horizon) cmd->add_option("--horizon", t.horizon, "Prediction horizon in seconds")->check(CLI::PositiveNumber);
  cmd->add_option("--stride", t.stride, "Window stride in steps")->check(CLI::PositiveNumber);
  cmd->add_option("--d-close", t.d_close, "Physical graph distance cutoff in metres")->check(CLI::PositiveNumber);
}

std::shared_ptr<const graph::CognitiveWeights> load_weights(const std::string& path, const CognitiveEncoding& enc) {
  require_file(path, "DBN document");
  return std::make_shared<graph::CognitiveWeights>(dbn::deserialize(read_file(path)), enc);
}

// ---------------------------------------------------------------- generate

struct GenerateFlags {
  std::string out;
  int episodes = 20;
  std::vector<int> scenarios{1, 2, 3, 4};
  std::vector<std::string> emotions{"anger", "fright", "neutral"};
  std::uint64_t seed = 1;
  double duration = 10.0;
  double trigger = 4.0;
};

int cmd_generate(const GenerateFlags& f) {
  std::vector<Emotion> emotions;
  for (const auto& name : f.emotions) {
    auto e = sim::emotion_from_string(name);
    if (!e) throw std::invalid_argument("unknown emotion: " + name);
    emotions.push_back(*e);
  }
  sim::ScenarioConfig base;
  base.duration = f.duration;
  base.trigger_time = f.trigger;
  const auto plan = pipeline::dataset_plan(f.scenarios, emotions, f.episodes, f.seed, base);
  ensure_dir(f.out);
  std::vector<std::pair<std::string, sim::ScenarioConfig>> manifest;
  for (const auto& entry : plan) {
    data::write_episode(sim::generate_episode(entry.config), f.out, entry.stem);
    manifest.emplace_back(entry.stem, entry.config);
  }
  write_file(join(f.out, "manifest.json"), sim::manifest_json(manifest));
  std::cerr << "wrote " << plan.size() << " episodes to " << f.out << '\n';
  return 0;
}

// ---------------------------------------------------------------- discretize

struct DiscretizeFlags {
  std::string data, out;
  SplitOptions split;
  DiscretizerOptions disc;
};

int cmd_discretize(const DiscretizeFlags& f) {
  const auto p = prepare(f.data, f.split, f.disc);
  ensure_dir(f.out);
  write_file(join(f.out, "discretizer.json"), p.discretizer.to_json());
  write_file(join(f.out, "frames.csv"), disc::frames_to_csv(p.frames));
  return 0;
}

// ---------------------------------------------------------------- learn-dbn

struct LearnFlags {
  std::string data, out, log;
  std::string cognition = "discretizer";
  std::string split_name = "train";
  int scenario = 0;
  SplitOptions split;
  DiscretizerOptions disc;
  SearchFlags search;
};

dbn::DiscreteData scenario_data(const Prepared& p, const std::vector<std::size_t>& idx, int scenario,
                                const CognitiveEncoding& enc) {
  std::vector<std::size_t> keep;
  for (auto i : idx) {
    if (scenario == 0 || p.episodes[i].scenario_id == scenario) keep.push_back(i);
  }
  return pipeline::dbn_data(p.frames, keep, enc);
}

int cmd_learn_dbn(const LearnFlags& f) {
  const CognitiveEncoding enc;
  auto p = prepare(f.data, f.split, f.disc);
  if (f.cognition == "reference") annotate_reference(p, enc);
  const auto data = scenario_data(p, select(p.split, f.split_name, p.episodes.size()), f.scenario, enc);
  if (data.total_frames() == 0) throw MissingArtifact("no frames for the selected split and scenario");

  std::ostringstream log;
  log << "prior " << f.search.prior << "\npenalty " << f.search.penalty << "\nframes " << data.total_frames() << '\n';
  dbn::DbnModel model;
  if (f.search.prior == "ordinary") {
    model = pipeline::fit_ordinary(data, enc, f.search.alpha);
  } else {
    const auto result = dbn::hill_climb(enc.nodes(), data, search_options(f.search));
    for (std::size_t r = 0; r < result.restart_scores.size(); ++r) {
      log << "restart " << r << " score " << format_number(result.restart_scores[r], 12) << " steps "
          << result.restart_steps[r] << '\n';
    }
    model = result.model;
  }
  log << "intra_edges " << model.structure.intra_edges.size() << '\n';
  log << "bic_params " << format_number(dbn::bic_score(model, data, dbn::Penalty::Params), 12) << '\n';
  log << "bic_nodes " << format_number(dbn::bic_score(model, data, dbn::Penalty::Nodes), 12) << '\n';
  write_file(f.out, dbn::serialize(model));
  write_file(f.log.empty() ? f.out + ".bic.log" : f.log, log.str());
  return 0;
}

// ---------------------------------------------------------------- train

struct TrainCmdFlags {
  std::string data, out, variant = "cpsor", dbn;
  SplitOptions split;
  DiscretizerOptions disc;
  TrainFlags t;
};

nn::Encoder make_encoder(nn::Variant variant, const graph::FeatureNormalizer& normalizer, double d_close,
                         std::shared_ptr<const graph::CognitiveWeights> weights) {
  nn::Encoder enc;
  enc.variant = variant;
  enc.normalizer = normalizer;
  enc.d_close = d_close;
  enc.cognitive = std::move(weights);
  return enc;
}

int cmd_train(const TrainCmdFlags& f) {
  const auto variant = nn::variant_from_string(f.variant);
  const CognitiveEncoding encoding;
  std::shared_ptr<const graph::CognitiveWeights> weights;
  if (variant != nn::Variant::P) {
    if (f.dbn.empty()) throw MissingArtifact("variant " + f.variant + " requires --dbn");
    weights = load_weights(f.dbn, encoding);
  }
  const auto p = prepare(f.data, f.split, f.disc);
  const auto train_s = pipeline::windows(p.episodes, p.frames, p.split.train, f.t.history, f.t.horizon, f.t.stride);
  const auto valid_s = pipeline::windows(p.episodes, p.frames, p.split.valid, f.t.history, f.t.horizon, f.t.stride);
  if (train_s.empty()) throw MissingArtifact("no training windows; episodes are too short or the split is empty");
  const auto normalizer = graph::FeatureNormalizer::fit(train_s);
  const auto enc = make_encoder(variant, normalizer, f.t.d_close, weights);
  const auto train_e = enc.encode_all(train_s);
  const auto valid_e = enc.encode_all(valid_s);

  nn::ModelDims dims = f.t.dims;
  dims.cog_in = encoding.accel_states();
  dims.future_steps = static_cast<int>(data::steps_for(f.t.horizon));
  auto params = nn::PredictorParams::xavier(dims, f.t.train.seed);
  params.output_scale = nn::fit_output_scale(train_e);
  const auto result = nn::fit(train_e, valid_e.empty() ? train_e : valid_e, params, f.t.train);

  ensure_dir(f.out);
  write_file(join(f.out, "weights.txt"), nn::weights_to_text(result.params, variant));
  write_file(join(f.out, "losses.csv"), nn::loss_csv(result.losses));
  write_file(join(f.out, "discretizer.json"), p.discretizer.to_json());
  if (weights) write_file(join(f.out, "dbn.txt"), read_file(f.dbn));
  json run;
  run["schema_version"] = kRunSchemaVersion;
  run["variant"] = std::string(nn::to_string(variant));
  run["normalizer"] = json::parse(normalizer.to_json());
  run["d_close"] = f.t.d_close;
  run["history_s"] = f.t.history;
  run["horizon_s"] = f.t.horizon;
  run["stride"] = f.t.stride;
  run["split"] = {{"seed", f.split.seed}, {"train", p.split.train}, {"valid", p.split.valid}, {"test", p.split.test}};
  run["best_epoch"] = result.best_epoch;
  run["train_windows"] = train_s.size();
  run["valid_windows"] = valid_s.size();
  write_file(join(f.out, "run.json"), run.dump(2) + "\n");
  std::cerr << "trained " << f.variant << " on " << train_s.size() << " windows, best epoch " << result.best_epoch
            << '\n';
  return 0;
}

// ---------------------------------------------------------------- eval

// A trained run directory reloaded for inference.
struct LoadedRun {
  json run;
  nn::Variant variant = nn::Variant::P;
  nn::PredictorParams params;
  nn::Encoder encoder;
  disc::Discretizer discretizer;
};

LoadedRun load_run(const std::string& dir) {
  const auto run_path = join(dir, "run.json");
  require_file(run_path, "run file");
  require_file(join(dir, "weights.txt"), "weights file");
  require_file(join(dir, "discretizer.json"), "discretizer");
  LoadedRun r;
  r.run = json::parse(read_file(run_path));
  if (r.run.value("schema_version", 0) != kRunSchemaVersion) throw std::runtime_error("unsupported run schema version");
  r.params = nn::weights_from_text(read_file(join(dir, "weights.txt")), &r.variant);
  r.discretizer = disc::Discretizer::from_json(read_file(join(dir, "discretizer.json")));
  std::shared_ptr<const graph::CognitiveWeights> weights;
  if (r.variant != nn::Variant::P) weights = load_weights(join(dir, "dbn.txt"), CognitiveEncoding{});
  r.encoder = make_encoder(r.variant, graph::FeatureNormalizer::from_json(r.run["normalizer"].dump()),
                           r.run["d_close"].get<double>(), weights);
  return r;
}

struct RunSamples {
  std::vector<data::Sample> samples;
  std::vector<nn::EncodedSample> encoded;
};

RunSamples run_samples(const LoadedRun& r, const std::vector<data::Episode>& episodes, const std::string& which) {
  pipeline::Split split;
  split.train = r.run["split"]["train"].get<std::vector<std::size_t>>();
  split.valid = r.run["split"]["valid"].get<std::vector<std::size_t>>();
  split.test = r.run["split"]["test"].get<std::vector<std::size_t>>();
  for (const auto* part : {&split.train, &split.valid, &split.test}) {
    for (auto i : *part) {
      if (i >= episodes.size()) throw std::runtime_error("run split does not match the dataset");
    }
  }
  const auto frames = pipeline::discretize(r.discretizer, episodes);
  RunSamples out;
  out.samples = pipeline::windows(episodes, frames, select(split, which, episodes.size()),
                                  r.run["history_s"].get<double>(), r.run["horizon_s"].get<double>(),
                                  r.run["stride"].get<std::size_t>());
  out.encoded = r.encoder.encode_all(out.samples);
  return out;
}

struct EvalFlags {
  std::string data, run, out, split = "test";
};

int cmd_eval(const EvalFlags& f) {
  const auto r = load_run(f.run);
  const auto episodes = load_episodes(f.data);
  const auto rs = run_samples(r, episodes, f.split);
  if (rs.samples.empty()) throw MissingArtifact("no windows in split " + f.split);
  const double horizon = r.run["horizon_s"].get<double>();
  std::map<int, std::pair<eval::Trajectories, eval::Trajectories>> groups;
  for (std::size_t i = 0; i < rs.samples.size(); ++i) {
    const auto pred = nn::forward(rs.encoded[i], r.params).prediction;
    for (int key : {0, rs.samples[i].scenario_id}) {
      groups[key].first.push_back(pred);
      groups[key].second.push_back(rs.encoded[i].target);
    }
  }
  std::vector<eval::MetricReport> reports;
  for (const auto& [scenario, pt] : groups) {
    eval::MetricReport rep;
    rep.variant = std::string(nn::to_string(r.variant));
    rep.scenario_id = scenario;
    rep.n_samples = pt.first.size();
    rep.horizons.push_back(eval::horizon_metrics(pt.first, pt.second, horizon));
    reports.push_back(rep);
  }
  const auto csv = eval::reports_csv(reports);
  if (f.out.empty()) {
    std::cout << csv;
  } else {
    write_file(f.out, csv);
  }
  return 0;
}

// ---------------------------------------------------------------- ablate

struct AblateFlags {
  std::string data, out;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::vector<double> horizons{1.0, 2.0, 3.0};
  std::vector<std::string> variants{"p", "cp", "cpsor"};
  SplitOptions split;
  std::uint64_t discretizer_seed = 7;
  SearchFlags search;
  TrainFlags t;
};

int cmd_ablate(const AblateFlags& f) {
  eval::AblationConfig cfg;
  cfg.seeds = f.seeds;
  cfg.horizons = f.horizons;
  cfg.variants.clear();
  for (const auto& v : f.variants) cfg.variants.push_back(nn::variant_from_string(v));
  cfg.train_fraction = f.split.train;
  cfg.valid_fraction = f.split.valid;
  cfg.discretizer.seed = f.discretizer_seed;
  cfg.search = search_options(f.search);
  cfg.train = f.t.train;
  cfg.dims = f.t.dims;
  cfg.history_s = f.t.history;
  cfg.stride = f.t.stride;
  cfg.d_close = f.t.d_close;
  auto episodes = load_episodes(f.data);
  const auto result = eval::run_ablation(std::move(episodes), cfg, &std::cerr);
  const auto summary = eval::aggregate(result.rows);
  ensure_dir(f.out);
  write_file(join(f.out, "ablation_runs.csv"), eval::ablation_csv(result.rows));
  std::vector<eval::AblationRow> per_scenario, overall;
  for (const auto& row : summary) (row.scenario_id == 0 ? overall : per_scenario).push_back(row);
  write_file(join(f.out, "ablation.csv"), eval::ablation_csv(per_scenario));
  write_file(join(f.out, "ablation_overall.csv"), eval::ablation_csv(overall));
  write_file(join(f.out, "ablation.md"), eval::ablation_markdown(summary));
  return 0;
}

// ---------------------------------------------------------------- compare-dbn

struct CompareFlags {
  std::string data, out;
  std::string cognition = "discretizer";
  SplitOptions split;
  DiscretizerOptions disc;
  SearchFlags search;
};

int cmd_compare_dbn(const CompareFlags& f) {
  const CognitiveEncoding enc;
  auto p = prepare(f.data, f.split, f.disc);
  if (f.cognition == "reference") annotate_reference(p, enc);
  const auto all = select(p.split, "all", p.episodes.size());
  std::vector<int> scenarios;
  for (const auto& e : p.episodes) {
    if (std::find(scenarios.begin(), scenarios.end(), e.scenario_id) == scenarios.end()) scenarios.push_back(e.scenario_id);
  }
  std::sort(scenarios.begin(), scenarios.end());
  std::vector<eval::DbnComparison> reports;
  for (int s : scenarios) {
    const auto data = scenario_data(p, all, s, enc);
    const auto sor = dbn::hill_climb(enc.nodes(), data, search_options(f.search)).model;
    const auto ordinary = pipeline::fit_ordinary(data, enc, f.search.alpha);
    reports.push_back(eval::compare_dbn(data, sor, ordinary, s));
    std::cerr << "scenario " << s << ": BIC sor " << format_number(reports.back().bic_sor_params, 9) << ", ordinary "
              << format_number(reports.back().bic_ordinary_params, 9) << '\n';
  }
  ensure_dir(f.out);
  write_file(join(f.out, "dbn_comparison.csv"), eval::comparison_csv(reports));
  write_file(join(f.out, "dbn_curves.csv"), eval::curves_csv(reports));
  return 0;
}

// ---------------------------------------------------------------- plot

struct PlotFlags {
  std::string kind = "metrics", format = "svg", out, input, metric = "rmse", data, split = "test", title;
  std::optional<double> horizon;
  std::vector<std::string> runs;
  std::size_t sample = 0;
};

std::vector<plot::Bar> bars_from_csv(const std::string& text, const std::string& metric,
                                     std::optional<double> horizon) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty metrics file");
  const auto header = split(line, ',');
  auto col = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw std::runtime_error("metrics file has no column " + name);
  };
  const auto cv = col("variant"), cs = col("scenario_id"), ch = col("horizon_s"), cm = col(metric);
  std::vector<plot::Bar> bars;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) throw std::runtime_error("malformed metrics row: " + line);
    const double h = parse_number(cells[ch]);
    if (horizon && h != *horizon) continue;
    const std::string scen = cells[cs] == "0" ? "all" : "s" + cells[cs];
    bars.push_back({scen + " " + format_number(h, 6) + "s", cells[cv], parse_number(cells[cm])});
  }
  return bars;
}

int cmd_plot(const PlotFlags& f) {
  std::string text;
  if (f.kind == "metrics") {
    require_file(f.input, "metrics file");
    const auto bars = bars_from_csv(read_file(f.input), f.metric, f.horizon);
    text = f.format == "svg" ? plot::bars_svg(bars, f.title.empty() ? "Test " + f.metric : f.title)
                             : plot::bars_csv(bars);
  } else {
    if (f.runs.empty()) throw MissingArtifact("trajectory plots need at least one --run");
    const auto episodes = load_episodes(f.data);
    plot::Polyline history{"history", {}}, truth{"truth", {}};
    std::vector<plot::Polyline> predictions;
    for (std::size_t k = 0; k < f.runs.size(); ++k) {
      const auto r = load_run(f.runs[k]);
      const auto rs = run_samples(r, episodes, f.split);
      if (f.sample >= rs.samples.size()) throw std::invalid_argument("--sample is out of range for " + f.runs[k]);
      const auto& s = rs.samples[f.sample];
      if (k == 0) {
        for (const auto& st : s.history.front()) history.points.emplace_back(st.x, st.y);
        for (const auto& fp : s.future) truth.points.emplace_back(fp.x, fp.y);
      } else if (s.future.size() != truth.points.size() || s.future.front().x != truth.points.front().first) {
        throw std::invalid_argument("runs disagree on the selected sample");
      }
      const auto pred = nn::forward(rs.encoded[f.sample], r.params).prediction;
      plot::Polyline line{std::string(nn::to_string(r.variant)), {}};
      for (Eigen::Index i = 0; i < pred.rows(); ++i) line.points.emplace_back(pred(i, 0), pred(i, 1));
      predictions.push_back(std::move(line));
    }
    const auto series = plot::trajectory_series(std::move(history), std::move(truth), std::move(predictions));
    text = f.format == "svg" ? plot::trajectory_svg(series, f.title.empty() ? "Ego trajectory" : f.title)
                             : plot::trajectory_csv(series);
  }
  if (f.out.empty()) {
    std::cout << text;
  } else {
    write_file(f.out, text);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cognition-aware trajectory prediction pipeline"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with option values per [command] section; flags win");
  app.allow_config_extras(CLI::config_extras_mode::error);
  int schema_version = kRunSchemaVersion;
  app.add_option("--schema-version", schema_version, "Configuration schema version")->check(CLI::Range(1, 1));

  GenerateFlags gen;
  auto* c_gen = app.add_subcommand("generate", "Simulate episodes for every (scenario, emotion) cell");
  c_gen->add_option("--out", gen.out, "Output dataset directory")->required();
  c_gen->add_option("--episodes", gen.episodes, "Episodes per cell")->check(CLI::NonNegativeNumber);
  c_gen->add_option("--scenarios", gen.scenarios, "Scenario ids")->delimiter(',')->check(CLI::Range(1, 4));
  c_gen->add_option("--emotions", gen.emotions, "Emotion profiles")->delimiter(',');
  c_gen->add_option("--seed", gen.seed, "First episode seed of each cell");
  c_gen->add_option("--duration", gen.duration, "Episode length in seconds")->check(CLI::PositiveNumber);
  c_gen->add_option("--trigger", gen.trigger, "Scenario trigger time in seconds")->check(CLI::NonNegativeNumber);

  DiscretizeFlags dis;
  auto* c_dis = app.add_subcommand("discretize", "Fit the discretizer and export cognitive frames");
  c_dis->add_option("--data", dis.data, "Dataset directory")->required();
  c_dis->add_option("--out", dis.out, "Output directory")->required();
  add_split_options(c_dis, dis.split);
  add_discretizer_options(c_dis, dis.disc);

  LearnFlags learn;
  auto* c_learn = app.add_subcommand("learn-dbn", "Learn a cognitive DBN and write its document and BIC log");
  c_learn->add_option("--data", learn.data, "Dataset directory")->required();
  c_learn->add_option("--out", learn.out, "DBN document path")->required();
  c_learn->add_option("--log", learn.log, "BIC log path (default <out>.bic.log)");
  c_learn->add_option("--cognition", learn.cognition, "Frame source: discretizer or reference (ground-truth DBN)")
      ->check(CLI::IsMember({"discretizer", "reference"}));
  c_learn->add_option("--split", learn.split_name, "Episodes used: train, valid, test or all")
      ->check(CLI::IsMember({"train", "valid", "test", "all"}));
  c_learn->add_option("--scenario", learn.scenario, "Restrict to one scenario (0 = all)")->check(CLI::Range(0, 4));
  add_split_options(c_learn, learn.split);
  add_discretizer_options(c_learn, learn.disc);
  add_search_options(c_learn, learn.search);

  TrainCmdFlags tr;
  auto* c_train = app.add_subcommand("train", "Train one predictor variant");
  c_train->add_option("--data", tr.data, "Dataset directory")->required();
  c_train->add_option("--out", tr.out, "Run directory")->required();
  c_train->add_option("--variant", tr.variant, "p, cp or cpsor")->check(CLI::IsMember({"p", "cp", "cpsor"}));
  c_train->add_option("--dbn", tr.dbn, "DBN document (required for cp and cpsor)");
  c_train->add_option("--seed", tr.t.train.seed, "Initialization and shuffling seed");
  add_split_options(c_train, tr.split);
  add_discretizer_options(c_train, tr.disc);
  add_train_options(c_train, tr.t, true);

  EvalFlags ev;
  auto* c_eval = app.add_subcommand("eval", "Score a trained run; writes a metric report CSV");
  c_eval->add_option("--data", ev.data, "Dataset directory")->required();
  c_eval->add_option("--run", ev.run, "Run directory written by train")->required();
  c_eval->add_option("--out", ev.out, "Report path (stdout when omitted)");
  c_eval->add_option("--split", ev.split, "train, valid, test or all")
      ->check(CLI::IsMember({"train", "valid", "test", "all"}));

  AblateFlags ab;
  auto* c_ab = app.add_subcommand("ablate", "Train P, CP and CPSOR on identical splits and compare");
  c_ab->add_option("--data", ab.data, "Dataset directory")->required();
  c_ab->add_option("--out", ab.out, "Output directory")->required();
  c_ab->add_option("--seeds", ab.seeds, "Repetition seeds")->delimiter(',');
  c_ab->add_option("--horizons", ab.horizons, "Prediction horizons in seconds")->delimiter(',');
  c_ab->add_option("--variants", ab.variants, "Variants to train")->delimiter(',')
      ->check(CLI::IsMember({"p", "cp", "cpsor"}));
  c_ab->add_option("--discretizer-seed", ab.discretizer_seed, "k-means seed of the discretizer");
  add_split_options(c_ab, ab.split);
  add_search_options(c_ab, ab.search);
  add_train_options(c_ab, ab.t, false);

  CompareFlags cmp;
  auto* c_cmp = app.add_subcommand("compare-dbn", "Per-scenario BIC and P(Ego_a | Npc_a) of SOR vs ordinary DBN");
  c_cmp->add_option("--data", cmp.data, "Dataset directory")->required();
  c_cmp->add_option("--out", cmp.out, "Output directory")->required();
  c_cmp->add_option("--cognition", cmp.cognition, "Frame source: discretizer or reference (ground-truth DBN)")
      ->check(CLI::IsMember({"discretizer", "reference"}));
  add_split_options(c_cmp, cmp.split);
  add_discretizer_options(c_cmp, cmp.disc);
  add_search_options(c_cmp, cmp.search);

  PlotFlags pl;
  auto* c_plot = app.add_subcommand("plot", "Metric bars or predicted-vs-true trajectories");
  c_plot->add_option("--kind", pl.kind, "metrics or trajectory")->check(CLI::IsMember({"metrics", "trajectory"}));
  c_plot->add_option("--format", pl.format, "svg or csv")->check(CLI::IsMember({"svg", "csv"}));
  c_plot->add_option("--out", pl.out, "Output path (stdout when omitted)");
  c_plot->add_option("--input", pl.input, "Metrics CSV from eval or ablate (metrics plots)");
  c_plot->add_option("--metric", pl.metric, "rmse, mae, ade or fde")->check(CLI::IsMember({"rmse", "mae", "ade", "fde"}));
  c_plot->add_option("--horizon", pl.horizon, "Only bars at this horizon (all when omitted)");
  c_plot->add_option("--data", pl.data, "Dataset directory (trajectory plots)");
  c_plot->add_option("--run", pl.runs, "Run directory; repeat once per variant (trajectory plots)");
  c_plot->add_option("--split", pl.split, "Split the sample is drawn from")
      ->check(CLI::IsMember({"train", "valid", "test", "all"}));
  c_plot->add_option("--sample", pl.sample, "Window index within the split");
  c_plot->add_option("--title", pl.title, "Figure title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*c_gen) return cmd_generate(gen);
    if (*c_dis) return cmd_discretize(dis);
    if (*c_learn) return cmd_learn_dbn(learn);
    if (*c_train) return cmd_train(tr);
    if (*c_eval) return cmd_eval(ev);
    if (*c_ab) return cmd_ablate(ab);
    if (*c_cmp) return cmd_compare_dbn(cmp);
    if (*c_plot) return cmd_plot(pl);
  } catch (const MissingArtifact& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
