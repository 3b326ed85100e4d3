// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Optional arguments restrict the run to criteria whose key contains them.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli_helpers.hpp"
#include "cpsor/ablation.hpp"
#include "cpsor/cognitive_dbn.hpp"
#include "cpsor/dbn.hpp"
#include "cpsor/discretizer.hpp"
#include "cpsor/metrics.hpp"
#include "cpsor/pipeline.hpp"
#include "cpsor/scenario.hpp"
#include "cpsor/text_format.hpp"
#include "dbn_oracle.hpp"
#include "metric_oracle.hpp"
#include "neural_fixtures.hpp"
#include "test_util.hpp"

using namespace cpsor;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

dbn::DiscreteData sampled(const dbn::DbnModel& m, std::size_t frames, std::uint64_t seed, std::size_t len = 100) {
  dbn::DiscreteData d;
  d.n_nodes = m.structure.size();
  for (std::size_t k = 0; k * len < frames; ++k) d.sequences.push_back(dbn::sample(m, len, seed * 1000 + k));
  return d;
}

Outcome inference_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 5;
    const auto m = test::random_model(rng, n, 4, 0.5, false);
    const int query = static_cast<int>(rng() % static_cast<unsigned>(n));
    std::map<int, int> ev;
    for (int i = 0; i < n; ++i) {
      if (i != query && rng() % 3 == 0) ev[i] = static_cast<int>(rng() % m.structure.nodes[i].cardinality);
    }
    const auto got = dbn::infer_conditional(m, query, ev);
    const auto want = test::brute_conditional(m, query, ev);
    for (std::size_t k = 0; k < want.size(); ++k) worst = std::max(worst, std::abs(got[k] - want[k]));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-10 && secs < 10.0, "max abs error " + fmt("%.3g", worst) + ", " + fmt("%.2f", secs) + " s"};
}

Outcome search_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(99);
  const auto dags = test::all_three_node_dags();
  int ties = 0, runs = 0;
  for (int g = 0; g < 5; ++g) {
    auto truth = test::random_model(rng, 3, 3, 0.0, false);
    truth.structure.intra_edges = dags[static_cast<std::size_t>(g * 5 + 2) % dags.size()];
    for (int i = 0; i < 3; ++i) truth.intra[i] = test::make_cpt(truth.structure, i, rng);
    const auto data = sampled(truth, 10000, static_cast<std::uint64_t>(g + 1));
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& edges : dags) {
      auto s = truth.structure;
      s.intra_edges = edges;
      best = std::max(best, dbn::bic_score(dbn::mle_fit(s, data), data));
    }
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      dbn::SearchOptions opt;
      opt.prior = dbn::Prior::None;
      opt.inter = dbn::InterPolicy::None;
      opt.seed = seed;
      const auto r = dbn::hill_climb(truth.structure.nodes, data, opt);
      ++runs;
      ties += std::abs(r.bic - best) <= 1e-9 * std::abs(best);
    }
  }
  const double secs = seconds_since(t0);
  return {ties == runs && secs < 30.0,
          std::to_string(ties) + "/" + std::to_string(runs) + " runs tie the exhaustive optimum, " +
              fmt("%.2f", secs) + " s"};
}

// S -> O1 -> O2, O1 -> R1, O2 -> R2, R1 -> R2; every node has 3 states.
dbn::DbnModel sor_ground_truth() {
  dbn::DbnModel m;
  using dbn::Layer;
  m.structure.nodes = {{"S", 3, Layer::S}, {"O1", 3, Layer::O}, {"O2", 3, Layer::O}, {"R1", 3, Layer::R},
                       {"R2", 3, Layer::R}};
  m.structure.intra_edges = {{0, 1}, {1, 2}, {1, 3}, {2, 4}, {3, 4}};
  for (int v = 0; v < 5; ++v) {
    dbn::Cpt c;
    c.child = v;
    c.parents = m.structure.parents(v);
    c.child_cardinality = 3;
    c.parent_cardinalities.assign(c.parents.size(), 3);
    const std::size_t rows = c.rows();
    for (std::size_t r = 0; r < rows; ++r) {
      // The child mostly follows the sum of its parent states.
      int digit_sum = 0;
      for (std::size_t x = r; x > 0; x /= 3) digit_sum += static_cast<int>(x % 3);
      for (int s = 0; s < 3; ++s) {
        c.table.push_back(c.parents.empty() ? 1.0 / 3.0 : (s == digit_sum % 3 ? 0.7 : 0.15));
      }
    }
    m.intra.push_back(c);
  }
  return m;
}

Outcome structure_recovery() {
  const auto t0 = Clock::now();
  const auto truth = sor_ground_truth();
  std::vector<int> shd;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto data = sampled(truth, 10000, seed + 100);
    dbn::SearchOptions opt;
    opt.prior = dbn::Prior::Sor;
    opt.inter = dbn::InterPolicy::None;
    opt.seed = seed;
    shd.push_back(dbn::structural_hamming_distance(dbn::hill_climb(truth.structure.nodes, data, opt).model.structure,
                                                   truth.structure));
  }
  std::vector<int> sorted = shd;
  std::sort(sorted.begin(), sorted.end());
  const int median = sorted[2];
  const double secs = seconds_since(t0);
  std::string list;
  for (int d : shd) list += (list.empty() ? "" : ",") + std::to_string(d);
  return {median <= 1 && secs < 60.0,
          "median SHD " + std::to_string(median) + " (" + list + "), " + fmt("%.2f", secs) + " s"};
}

Outcome gradient_check() {
  const auto t0 = Clock::now();
  auto prob = test::tiny_problem(nn::Variant::CPSOR);
  std::vector<nn::EncodedSample> batch(prob.samples.begin(), prob.samples.begin() + 3);
  double worst = 0.0;
  std::size_t n_params = 0;
  for (std::uint64_t seed : {101u, 202u, 303u}) {
    auto params = nn::PredictorParams::xavier(prob.dims, seed);
    params.output_scale = nn::fit_output_scale(batch);
    n_params = params.size();
    worst = std::max(worst, test::max_gradient_error(batch, params));
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-4 && n_params <= 2000 && secs < 60.0,
          std::to_string(n_params) + " params, max relative error " + fmt("%.3g", worst) + ", " + fmt("%.2f", secs) +
              " s"};
}

Outcome metric_oracle() {
  std::mt19937_64 rng(77);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto [pred, truth] = test::random_instance(rng);
    const auto want = test::oracle_metrics(pred, truth);
    const auto h = eval::horizon_metrics(test::to_matrices(pred), test::to_matrices(truth), 1.0);
    for (std::size_t k = 0; k < want.rmse.size(); ++k) worst = std::max(worst, std::abs(h.rmse_per_step[k] - want.rmse[k]));
    worst = std::max({worst, std::abs(h.mae - want.mae), std::abs(h.ade - want.ade), std::abs(h.fde - want.fde)});
  }
  const auto [pred, truth] = test::random_instance(rng);
  const auto same = eval::horizon_metrics(test::to_matrices(truth), test::to_matrices(truth), 1.0);
  bool zeros = same.rmse == 0.0 && same.mae == 0.0 && same.ade == 0.0 && same.fde == 0.0;
  for (double r : same.rmse_per_step) zeros = zeros && r == 0.0;
  return {worst <= 1e-12 && zeros,
          "max abs error " + fmt("%.3g", worst) + (zeros ? ", identical input gives zeros" : ", nonzero on identical input")};
}

Outcome state_calculus() {
  int bad = 0, checked = 0;
  auto expect = [&](bool ok) {
    ++checked;
    bad += !ok;
  };
  const std::pair<double, RiskGrade> ttc_rows[] = {
      {10.0, RiskGrade::Safe},     {2.01, RiskGrade::Safe},    {2.0, RiskGrade::Moderate},
      {1.75, RiskGrade::Moderate}, {1.51, RiskGrade::Moderate}, {1.5, RiskGrade::Danger},
      {1.0, RiskGrade::Danger},    {0.05, RiskGrade::Danger},
      {std::numeric_limits<double>::infinity(), RiskGrade::Safe}};
  for (const auto& [ttc, grade] : ttc_rows) expect(disc::ttc_risk_grade(ttc) == grade);
  const std::pair<double, int> bin_rows[] = {{0.0, 0},   {0.1, 0},   {0.2, 1},  {0.3, 1},   {1.0, 5},
                                             {-0.1, -1}, {-0.2, -1}, {-0.3, -2}, {-6.0, -30}, {3.9, 19}};
  for (const auto& [a, bin] : bin_rows) expect(disc::bin_acceleration(a) == bin);
  for (int k = -400; k <= 400; ++k) {
    const double a = k * 0.0137;
    const auto [lo, hi] = disc::bin_interval(disc::bin_acceleration(a));
    expect(lo <= a && a < hi && std::abs(hi - lo - 0.2) < 1e-12);
  }
  const std::pair<double, ManLateral> steer_rows[] = {
      {-30.0, ManLateral::LeftTurn}, {-4.001, ManLateral::LeftTurn}, {-4.0, ManLateral::Straight},
      {0.0, ManLateral::Straight},   {4.0, ManLateral::Straight},    {4.001, ManLateral::RightTurn},
      {30.0, ManLateral::RightTurn}};
  for (const auto& [deg, m] : steer_rows) expect(disc::lateral_maneuver(deg) == m);
  return {bad == 0, std::to_string(checked - bad) + "/" + std::to_string(checked) + " rows reproduced"};
}

Outcome emotion_clustering() {
  const data::PadSample centers[3] = {{disc::kAngerExemplar[0], disc::kAngerExemplar[1], disc::kAngerExemplar[2]},
                                      {0.5, 0.0, 0.2},
                                      {disc::kFrightExemplar[0], disc::kFrightExemplar[1], disc::kFrightExemplar[2]}};
  const Emotion truth_of[3] = {Emotion::Anger, Emotion::Neutral, Emotion::Fright};
  double worst = 1.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.1);
    std::vector<data::PadSample> pads;
    std::vector<Emotion> truth;
    for (int i = 0; i < 200; ++i) {
      for (int c = 0; c < 3; ++c) {
        pads.push_back({centers[c].pleased + noise(rng), centers[c].aroused + noise(rng),
                        centers[c].dominant + noise(rng)});
        truth.push_back(truth_of[c]);
      }
    }
    const auto r = disc::emotion_states(pads, seed);
    std::size_t hit = 0;
    for (std::size_t i = 0; i < pads.size(); ++i) hit += r.labels[i] == truth[i];
    worst = std::min(worst, static_cast<double>(hit) / static_cast<double>(pads.size()));
  }
  return {worst >= 0.95, "worst purity " + fmt("%.4f", worst) + " over 10 seeds"};
}

std::vector<data::Episode> synthetic_dataset() {
  std::vector<data::Episode> episodes;
  for (const auto& e : pipeline::dataset_plan({1, 2, 3, 4}, {Emotion::Anger, Emotion::Fright, Emotion::Neutral}, 20, 1)) {
    episodes.push_back(sim::generate_episode(e.config));
  }
  return episodes;
}

Outcome ablation_direction() {
  const auto t0 = Clock::now();
  eval::AblationConfig cfg;
  cfg.horizons = {1.0};
  const auto result = eval::run_ablation(synthetic_dataset(), cfg, &std::cerr);
  const double p = eval::mean_rmse(result.rows, nn::Variant::P, 1.0);
  const double cp = eval::mean_rmse(result.rows, nn::Variant::CP, 1.0);
  const double cpsor = eval::mean_rmse(result.rows, nn::Variant::CPSOR, 1.0);
  const double gain = (p - cpsor) / p;
  const double secs = seconds_since(t0);
  return {cpsor < cp && cp < p && gain >= 0.05 && secs < 1800.0,
          "RMSE P " + fmt("%.4f", p) + ", CP " + fmt("%.4f", cp) + ", CPSOR " + fmt("%.4f", cpsor) + " (" +
              fmt("%.2f", 100 * gain) + "% below P), " + fmt("%.0f", secs) + " s"};
}

Outcome sor_vs_ordinary() {
  const CognitiveEncoding enc;
  const auto truth = sim::reference_sor_dbn(enc);
  const auto episodes = synthetic_dataset();
  std::string detail;
  bool all = true;
  for (int s = 1; s <= 4; ++s) {
    std::vector<std::vector<CognitiveFrame>> frames;
    for (const auto& ep : episodes) {
      if (ep.scenario_id == s) frames.push_back(sim::annotate_ground_truth(ep, truth, ep.seed, enc));
    }
    const auto data = encode_sequences(frames, enc);
    const auto sor = dbn::hill_climb(enc.nodes(), data);
    const auto ordinary = pipeline::fit_ordinary(data, enc);
    const double bic_ord = dbn::bic_score(ordinary, data);
    all = all && sor.bic >= bic_ord;
    detail += (detail.empty() ? "" : "; ") + std::string("s") + std::to_string(s) + " " + fmt("%.1f", sor.bic) +
              " vs " + fmt("%.1f", bic_ord);
  }
  return {all, "BIC SOR vs ordinary: " + detail};
}

Outcome determinism() {
  const auto root = test::fresh_dir(test::temp_dir("acceptance_determinism"));
  auto pipeline_run = [&](const std::string& dir) {
    fs::create_directories(dir);
    const std::string data = dir + "/data";
    int rc = test::run_cli("generate --out " + data + " --episodes 2 --duration 6 --trigger 2 --seed 3");
    rc |= test::run_cli("learn-dbn --data " + data + " --restarts 2 --out " + dir + "/dbn.txt");
    rc |= test::run_cli("train --data " + data + " --dbn " + dir + "/dbn.txt --out " + dir +
                        "/run --epochs 3 --gcn-dim 4 --lstm-dim 6 --attn-dim 4 --history 1 --horizon 1 --stride 10");
    rc |= test::run_cli("eval --data " + data + " --run " + dir + "/run --out " + dir + "/eval.csv");
    return rc;
  };
  if (pipeline_run(root + "/a") != 0 || pipeline_run(root + "/b") != 0) return {false, "a pipeline step failed"};
  std::size_t files = 0, differ = 0;
  for (const auto& e : fs::recursive_directory_iterator(root + "/a")) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), root + "/a");
    ++files;
    differ += read_file(e.path().string()) != read_file((fs::path(root + "/b") / rel).string());
  }
  return {differ == 0 && files > 0, std::to_string(files - differ) + "/" + std::to_string(files) + " files identical"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"dbn-inference-oracle", inference_oracle},
      {"bic-search-oracle", search_oracle},
      {"structure-recovery", structure_recovery},
      {"gradient-check", gradient_check},
      {"metric-oracle", metric_oracle},
      {"state-calculus", state_calculus},
      {"emotion-clustering", emotion_clustering},
      {"ablation-direction", ablation_direction},
      {"sor-vs-ordinary-dbn", sor_vs_ordinary},
      {"determinism", determinism},
  };
  int failed = 0;
  for (const auto& [key, run] : criteria) {
    bool selected = argc < 2;
    for (int i = 1; i < argc; ++i) selected = selected || key.find(argv[i]) != std::string::npos;
    if (!selected) continue;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << key << ": " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
