#include "cpsor/ablation.hpp"

#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <tuple>

#include "cpsor/pipeline.hpp"
#include "cpsor/text_format.hpp"

namespace cpsor::eval {
namespace {

std::string num(double v) { return format_number(v, 9); }

AblationRow score(const std::vector<const nn::EncodedSample*>& samples, const nn::PredictorParams& params,
                  std::uint64_t seed, nn::Variant variant, double horizon, int scenario) {
  Trajectories preds, truths;
  for (const auto* s : samples) {
    preds.push_back(nn::forward(*s, params).prediction);
    truths.push_back(s->target);
  }
  const auto h = horizon_metrics(preds, truths, horizon);
  return {seed, variant, horizon, scenario, samples.size(), h.rmse, h.mae, h.ade, h.fde};
}

}  // namespace

AblationResult run_ablation(std::vector<data::Episode> episodes, const AblationConfig& config, std::ostream* log) {
  if (episodes.empty()) throw std::invalid_argument("ablation needs episodes");
  pipeline::sort_canonical(episodes);
  const CognitiveEncoding encoding;
  AblationResult result;
  for (std::uint64_t seed : config.seeds) {
    const auto split = pipeline::split_episodes(episodes, seed, config.train_fraction, config.valid_fraction);
    if (split.valid.empty() || split.test.empty()) throw std::invalid_argument("split leaves no validation or test episodes");
    disc::DiscretizerConfig dcfg = config.discretizer;
    const auto discretizer = disc::Discretizer::fit(pipeline::subset(episodes, split.train), dcfg);
    const auto frames = pipeline::discretize(discretizer, episodes);
    const auto train_data = pipeline::dbn_data(frames, split.train, encoding);

    std::shared_ptr<const graph::CognitiveWeights> sor_weights, ordinary_weights;
    for (auto v : config.variants) {
      if (v == nn::Variant::CPSOR && !sor_weights) {
        dbn::SearchOptions opts = config.search;
        opts.prior = dbn::Prior::Sor;
        opts.seed = seed;
        const auto found = dbn::hill_climb(encoding.nodes(), train_data, opts);
        sor_weights = std::make_shared<graph::CognitiveWeights>(found.model, encoding);
        if (log != nullptr) *log << "seed " << seed << ": SOR-DBN " << found.model.structure.intra_edges.size()
                                 << " edges, BIC " << num(found.bic) << '\n';
      }
      if (v == nn::Variant::CP && !ordinary_weights) {
        ordinary_weights = std::make_shared<graph::CognitiveWeights>(
            pipeline::fit_ordinary(train_data, encoding, config.search.alpha), encoding);
      }
    }

    for (double horizon : config.horizons) {
      const auto train_s = pipeline::windows(episodes, frames, split.train, config.history_s, horizon, config.stride);
      const auto valid_s = pipeline::windows(episodes, frames, split.valid, config.history_s, horizon, config.stride);
      const auto test_s = pipeline::windows(episodes, frames, split.test, config.history_s, horizon, config.stride);
      if (train_s.empty() || valid_s.empty() || test_s.empty()) throw std::invalid_argument("episodes too short for the windows");
      const auto normalizer = graph::FeatureNormalizer::fit(train_s);
      for (auto variant : config.variants) {
        nn::Encoder enc;
        enc.variant = variant;
        enc.normalizer = normalizer;
        enc.d_close = config.d_close;
        if (variant == nn::Variant::CP) enc.cognitive = ordinary_weights;
        if (variant == nn::Variant::CPSOR) enc.cognitive = sor_weights;
        const auto train_e = enc.encode_all(train_s);
        const auto valid_e = enc.encode_all(valid_s);
        const auto test_e = enc.encode_all(test_s);
        nn::ModelDims dims = config.dims;
        dims.cog_in = encoding.accel_states();
        dims.future_steps = static_cast<int>(data::steps_for(horizon));
        auto params = nn::PredictorParams::xavier(dims, seed);
        params.output_scale = nn::fit_output_scale(train_e);
        nn::TrainConfig tc = config.train;
        tc.seed = seed;
        const auto trained = nn::fit(train_e, valid_e, params, tc);

        std::map<int, std::vector<const nn::EncodedSample*>> by_scenario;
        for (std::size_t i = 0; i < test_s.size(); ++i) {
          by_scenario[0].push_back(&test_e[i]);
          by_scenario[test_s[i].scenario_id].push_back(&test_e[i]);
        }
        for (const auto& [scenario, items] : by_scenario) {
          result.rows.push_back(score(items, trained.params, seed, variant, horizon, scenario));
        }
        if (log != nullptr) {
          *log << "seed " << seed << " horizon " << num(horizon) << " variant " << nn::to_string(variant)
               << ": best epoch " << trained.best_epoch << ", test RMSE " << num(result.rows[result.rows.size() - by_scenario.size()].rmse)
               << '\n';
        }
      }
    }
  }
  return result;
}

std::vector<AblationRow> aggregate(const std::vector<AblationRow>& rows) {
  std::map<std::tuple<int, double, int>, std::pair<AblationRow, int>> acc;
  for (const auto& r : rows) {
    auto& [sum, count] = acc[{static_cast<int>(r.variant), r.horizon_s, r.scenario_id}];
    if (count == 0) {
      sum = r;
      sum.seed = 0;
      sum.n_samples = 0;
      sum.rmse = sum.mae = sum.ade = sum.fde = 0.0;
    }
    sum.n_samples += r.n_samples;
    sum.rmse += r.rmse;
    sum.mae += r.mae;
    sum.ade += r.ade;
    sum.fde += r.fde;
    ++count;
  }
  std::vector<AblationRow> out;
  for (auto& [key, entry] : acc) {
    auto& [sum, count] = entry;
    const double n = static_cast<double>(count);
    sum.rmse /= n;
    sum.mae /= n;
    sum.ade /= n;
    sum.fde /= n;
    out.push_back(sum);
  }
  return out;
}

double mean_rmse(const std::vector<AblationRow>& rows, nn::Variant variant, double horizon_s, int scenario_id) {
  double total = 0.0;
  int count = 0;
  for (const auto& r : rows) {
    if (r.variant == variant && r.horizon_s == horizon_s && r.scenario_id == scenario_id) {
      total += r.rmse;
      ++count;
    }
  }
  if (count == 0) throw std::invalid_argument("no rows for the requested variant and horizon");
  return total / count;
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
  std::ostringstream out;
  out << "seed,variant,horizon_s,scenario_id,n_samples,rmse,mae,ade,fde\n";
  for (const auto& r : rows) {
    out << r.seed << ',' << nn::to_string(r.variant) << ',' << num(r.horizon_s) << ',' << r.scenario_id << ','
        << r.n_samples << ',' << num(r.rmse) << ',' << num(r.mae) << ',' << num(r.ade) << ',' << num(r.fde) << '\n';
  }
  return out.str();
}

std::string ablation_markdown(const std::vector<AblationRow>& aggregated) {
  auto fixed = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  std::map<double, std::map<int, std::map<nn::Variant, AblationRow>>> table;
  for (const auto& r : aggregated) table[r.horizon_s][r.scenario_id][r.variant] = r;
  std::ostringstream out;
  for (const auto& [horizon, scenarios] : table) {
    out << "### Horizon " << num(horizon) << " s\n\n";
    out << "| Scenario | Variant | ADE | FDE | RMSE | vs P | vs CP |\n";
    out << "|---|---|---|---|---|---|---|\n";
    for (const auto& [scenario, variants] : scenarios) {
      for (const auto& [variant, r] : variants) {
        std::string vs_p = "", vs_cp = "";
        if (auto p = variants.find(nn::Variant::P); p != variants.end() && variant != nn::Variant::P) {
          vs_p = relative_change(p->second.rmse, r.rmse);
        }
        if (auto cp = variants.find(nn::Variant::CP); cp != variants.end() && variant == nn::Variant::CPSOR) {
          vs_cp = relative_change(cp->second.rmse, r.rmse);
        }
        out << "| " << (scenario == 0 ? std::string("all") : std::to_string(scenario)) << " | "
            << nn::to_string(variant) << " | " << fixed(r.ade) << " | " << fixed(r.fde) << " | " << fixed(r.rmse)
            << " | " << vs_p << " | " << vs_cp << " |\n";
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace cpsor::eval
