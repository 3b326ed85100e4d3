#include "cpsor/discretizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "cpsor/ttc.hpp"
#include "json.hpp"

namespace cpsor::disc {
namespace {

Eigen::VectorXd pad_vector(const data::PadSample& p) {
  Eigen::VectorXd v(3);
  v << p.pleased, p.aroused, p.dominant;
  return v;
}

Eigen::VectorXd exemplar(const double (&e)[3]) {
  Eigen::VectorXd v(3);
  v << e[0], e[1], e[2];
  return v;
}

double quantile(std::vector<double> sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

// ranks[c] = position of cluster c when sorted ascending by score (stable).
std::vector<int> rank_ascending(const std::vector<double>& score) {
  std::vector<int> order(score.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return score[static_cast<std::size_t>(a)] < score[static_cast<std::size_t>(b)]; });
  std::vector<int> ranks(score.size());
  for (std::size_t r = 0; r < order.size(); ++r) ranks[static_cast<std::size_t>(order[r])] = static_cast<int>(r);
  return ranks;
}

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> r(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) r[static_cast<std::size_t>(j)] = m(i, j);
    rows.push_back(r);
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = n == 0 ? 0 : static_cast<Eigen::Index>(rows[0].size());
  Eigen::MatrixXd m(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].get<double>();
  return m;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

RiskGrade ttc_risk_grade(double ttc) {
  if (std::isnan(ttc) || ttc <= 0.0) throw std::domain_error("ttc must be positive");
  if (ttc > 2.0) return RiskGrade::Safe;
  if (ttc > 1.5) return RiskGrade::Moderate;
  return RiskGrade::Danger;
}

int bin_acceleration(double a, double width) {
  if (std::isnan(a) || std::isinf(a)) throw std::domain_error("acceleration must be finite");
  if (!(width > 0.0)) throw std::domain_error("bin width must be positive");
  int bin = static_cast<int>(std::floor(a / width));
  // guard against a/width rounding across a bin edge
  if (a < bin * width) --bin;
  if (a >= (bin + 1) * width) ++bin;
  return bin;
}

std::pair<double, double> bin_interval(int bin, double width) {
  return {bin * width, (bin + 1) * width};
}

ManLateral lateral_maneuver(double steer_deg) {
  if (std::isnan(steer_deg)) throw std::domain_error("steering angle is NaN");
  if (steer_deg < -kSteerThresholdDeg) return ManLateral::LeftTurn;
  if (steer_deg > kSteerThresholdDeg) return ManLateral::RightTurn;
  return ManLateral::Straight;
}

double autocorrelation(std::span<const double> series, std::size_t k) {
  if (k >= series.size()) throw std::invalid_argument("lag must be smaller than the series length");
  const std::size_t m = series.size() - k;
  const auto current = series.subspan(k, m);
  const auto lagged = series.subspan(0, m);
  const double mc = std::accumulate(current.begin(), current.end(), 0.0) / static_cast<double>(m);
  const double ml = std::accumulate(lagged.begin(), lagged.end(), 0.0) / static_cast<double>(m);
  double cov = 0.0, vc = 0.0, vl = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double a = current[i] - mc;
    const double b = lagged[i] - ml;
    cov += a * b;
    vc += a * a;
    vl += b * b;
  }
  if (vc <= 0.0 || vl <= 0.0) throw std::domain_error("degenerate series: zero variance");
  return std::clamp(cov / std::sqrt(vc * vl), -1.0, 1.0);
}

WindowSelection select_window(std::span<const double> series, double threshold, std::size_t cap) {
  WindowSelection out;
  out.steps = cap;
  for (std::size_t s = 1; s <= cap; ++s) {
    std::vector<double> down;
    for (std::size_t i = 0; i < series.size(); i += s) down.push_back(series[i]);
    if (down.size() < 3) break;
    double ac = 0.0;
    try {
      ac = autocorrelation(down, 1);
    } catch (const std::domain_error&) {
      out.degenerate = true;
      out.capped = true;
      return out;
    }
    if (ac < threshold) {
      out.steps = s;
      return out;
    }
  }
  out.capped = true;
  return out;
}

EmotionClustering emotion_states(std::span<const data::PadSample> pad_series, std::uint64_t seed) {
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(pad_series.size()), 3);
  for (std::size_t i = 0; i < pad_series.size(); ++i) {
    pts.row(static_cast<Eigen::Index>(i)) = pad_vector(pad_series[i]).transpose();
  }
  auto fit = kmeans(pts, 3, seed);
  auto& model = fit.model;

  const Eigen::VectorXd targets[2] = {exemplar(kAngerExemplar), exemplar(kFrightExemplar)};
  const Emotion names[2] = {Emotion::Anger, Emotion::Fright};
  bool cluster_used[3] = {false, false, false};
  bool target_used[2] = {false, false};
  model.label_map.assign(3, static_cast<int>(Emotion::Neutral));
  for (int round = 0; round < 2; ++round) {
    double best = std::numeric_limits<double>::infinity();
    int best_c = -1, best_t = -1;
    bool tie = false;
    for (int c = 0; c < 3; ++c) {
      if (cluster_used[c]) continue;
      for (int t = 0; t < 2; ++t) {
        if (target_used[t]) continue;
        const double d = (model.centroids.row(c).transpose() - targets[t]).norm();
        if (d < best) {
          best = d;
          best_c = c;
          best_t = t;
          tie = false;
        } else if (d == best && (c == best_c || t == best_t)) {
          // equal pairs that are disjoint assign the same labels in either order
          tie = true;
        }
      }
    }
    if (tie) throw std::runtime_error("emotion label assignment tie");
    cluster_used[best_c] = true;
    target_used[best_t] = true;
    model.label_map[static_cast<std::size_t>(best_c)] = static_cast<int>(names[best_t]);
  }

  EmotionClustering out;
  out.labels.reserve(pad_series.size());
  for (int a : fit.assignment) out.labels.push_back(static_cast<Emotion>(model.label_map[static_cast<std::size_t>(a)]));
  out.model = std::move(model);
  return out;
}

Emotion classify_emotion(const ClusterModel& model, const data::PadSample& pad) {
  return static_cast<Emotion>(model.label_map[static_cast<std::size_t>(model.nearest(pad_vector(pad)))]);
}

Eigen::VectorXd control_features(std::span<const data::VehicleState> window) {
  if (window.empty()) throw std::invalid_argument("empty control window");
  const double n = static_cast<double>(window.size());
  Eigen::VectorXd f = Eigen::VectorXd::Zero(6);
  for (const auto& s : window) {
    f(0) += s.throttle;
    f(1) += s.brake;
    f(2) += s.steer_deg;
  }
  f.head(3) /= n;
  for (const auto& s : window) {
    f(3) += (s.throttle - f(0)) * (s.throttle - f(0));
    f(4) += (s.brake - f(1)) * (s.brake - f(1));
    f(5) += (s.steer_deg - f(2)) * (s.steer_deg - f(2));
  }
  f.tail(3) = (f.tail(3) / n).cwiseSqrt();
  return f;
}

std::vector<Eigen::VectorXd> control_windows(const std::vector<data::VehicleState>& ego,
                                             std::size_t window) {
  std::vector<Eigen::VectorXd> out;
  for (std::size_t start = 0; start + window <= ego.size(); start += window) {
    out.push_back(control_features(std::span(ego).subspan(start, window)));
  }
  return out;
}

std::pair<ManLongi, ObjStyle> ManeuverModel::classify(const Eigen::VectorXd& features) const {
  const Eigen::VectorXd z = (features - feature_mean).cwiseQuotient(feature_scale);
  const auto c = static_cast<std::size_t>(model.nearest(z));
  return {longi_of_cluster[c], style_of_cluster[c]};
}

ManeuverClustering maneuver_and_style(const std::vector<Eigen::VectorXd>& windows,
                                      std::uint64_t seed) {
  if (windows.empty()) throw std::invalid_argument("no control windows to cluster");
  const auto n = static_cast<Eigen::Index>(windows.size());
  Eigen::MatrixXd raw(n, 6);
  for (Eigen::Index i = 0; i < n; ++i) raw.row(i) = windows[static_cast<std::size_t>(i)].transpose();

  ManeuverModel m;
  m.feature_mean = raw.colwise().mean().transpose();
  m.feature_scale = ((raw.rowwise() - m.feature_mean.transpose()).array().square().colwise().mean())
                        .sqrt()
                        .transpose();
  for (Eigen::Index j = 0; j < 6; ++j) {
    if (m.feature_scale(j) <= 1e-12) m.feature_scale(j) = 1.0;
  }
  const Eigen::MatrixXd z =
      (raw.rowwise() - m.feature_mean.transpose()).array().rowwise() / m.feature_scale.transpose().array();
  auto fit = kmeans(z, 3, seed);

  std::vector<double> drive(3), spread(3);
  for (int c = 0; c < 3; ++c) {
    const Eigen::VectorXd centroid_raw =
        fit.model.centroids.row(c).transpose().cwiseProduct(m.feature_scale) + m.feature_mean;
    drive[static_cast<std::size_t>(c)] = centroid_raw(0) - centroid_raw(1);
    spread[static_cast<std::size_t>(c)] = fit.model.centroids.row(c).tail(3).sum();
  }
  const auto drive_rank = rank_ascending(drive);
  const auto spread_rank = rank_ascending(spread);
  m.longi_of_cluster.resize(3);
  m.style_of_cluster.resize(3);
  for (std::size_t c = 0; c < 3; ++c) {
    // ascending drive: 0 -> Decelerate, 2 -> Accelerate
    m.longi_of_cluster[c] = static_cast<ManLongi>(2 - drive_rank[c]);
    m.style_of_cluster[c] = static_cast<ObjStyle>(spread_rank[c]);
    fit.model.label_map[c] = static_cast<int>(m.longi_of_cluster[c]);
  }
  m.model = std::move(fit.model);

  ManeuverClustering out;
  for (int a : fit.assignment) {
    out.labels.emplace_back(m.longi_of_cluster[static_cast<std::size_t>(a)],
                            m.style_of_cluster[static_cast<std::size_t>(a)]);
  }
  out.model = std::move(m);
  return out;
}

SubStyle sub_style(double score, std::span<const double> population) {
  if (population.empty()) throw std::invalid_argument("empty style population");
  std::vector<double> sorted(population.begin(), population.end());
  std::sort(sorted.begin(), sorted.end());
  const double lo = quantile(sorted, 1.0 / 3.0);
  const double hi = quantile(sorted, 2.0 / 3.0);
  if (score > hi) return SubStyle::Aggressive;
  if (score < lo) return SubStyle::Conservative;
  return SubStyle::Neutral;
}

RiskGrade step_risk_grade(const data::Episode& episode, std::size_t step) {
  double ttc = std::numeric_limits<double>::infinity();
  const auto& ego = episode.ego()[step];
  for (std::size_t v = 1; v < episode.tracks.size(); ++v) {
    ttc = std::min(ttc, sim::compute_ttc(ego, episode.tracks[v][step]));
  }
  if (ttc <= 0.0) return RiskGrade::Danger;
  return ttc_risk_grade(ttc);
}

Discretizer Discretizer::fit(const std::vector<data::Episode>& episodes,
                             const DiscretizerConfig& config) {
  if (episodes.empty()) throw std::invalid_argument("cannot fit a discretizer on no episodes");
  Discretizer d;
  d.config = config;
  std::vector<data::PadSample> pads;
  std::vector<Eigen::VectorXd> windows;
  for (const auto& ep : episodes) {
    pads.insert(pads.end(), ep.ego_pad.begin(), ep.ego_pad.end());
    auto w = control_windows(ep.ego());
    windows.insert(windows.end(), w.begin(), w.end());
    d.style_population.push_back(ep.sub_style_score);
  }
  d.emotion = emotion_states(pads, config.seed).model;
  d.maneuver = maneuver_and_style(windows, config.seed + 1).model;
  return d;
}

std::vector<CognitiveFrame> Discretizer::frames(const data::Episode& episode) const {
  const std::size_t n = episode.steps();
  if (n < kControlWindow) throw std::invalid_argument("episode shorter than one control window");
  const auto style = sub_style(episode.sub_style_score, style_population);
  std::vector<CognitiveFrame> out(n);
  const auto& ego = episode.ego();
  for (std::size_t k = 0; k < n; ++k) {
    auto& f = out[k];
    f.risk_grade = step_risk_grade(episode, k);
    f.npc_a_bin = episode.tracks.size() > 1
                      ? bin_acceleration(episode.tracks[1][k].a, config.accel_bin_width)
                      : 0;
    f.ego_a_bin = bin_acceleration(ego[k].a, config.accel_bin_width);
    f.emo_cluster = classify_emotion(emotion, episode.ego_pad[k]);
    f.sub_style = style;
    const std::size_t end = std::max(k + 1, kControlWindow);
    const auto feats = control_features(std::span(ego).subspan(end - kControlWindow, kControlWindow));
    std::tie(f.man_longi, f.obj_style) = maneuver.classify(feats);
    f.man_lateral = lateral_maneuver(ego[k].steer_deg);
  }
  return out;
}

std::string Discretizer::to_json() const {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["accel_bin_width"] = config.accel_bin_width;
  j["seed"] = config.seed;
  j["emotion_centroids"] = matrix_json(emotion.centroids);
  j["emotion_labels"] = emotion.label_map;
  j["maneuver_centroids"] = matrix_json(maneuver.model.centroids);
  j["maneuver_mean"] = std::vector<double>(maneuver.feature_mean.data(),
                                           maneuver.feature_mean.data() + maneuver.feature_mean.size());
  j["maneuver_scale"] = std::vector<double>(maneuver.feature_scale.data(),
                                            maneuver.feature_scale.data() + maneuver.feature_scale.size());
  std::vector<int> longi, style;
  for (auto v : maneuver.longi_of_cluster) longi.push_back(static_cast<int>(v));
  for (auto v : maneuver.style_of_cluster) style.push_back(static_cast<int>(v));
  j["maneuver_longi"] = longi;
  j["maneuver_style"] = style;
  j["style_population"] = style_population;
  return j.dump(2) + "\n";
}

Discretizer Discretizer::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.at("schema_version").get<int>() != 1) throw std::runtime_error("unsupported discretizer schema");
  Discretizer d;
  d.config.accel_bin_width = j.at("accel_bin_width").get<double>();
  d.config.seed = j.at("seed").get<std::uint64_t>();
  d.emotion.centroids = matrix_from_json(j.at("emotion_centroids"));
  d.emotion.k = static_cast<int>(d.emotion.centroids.rows());
  d.emotion.label_map = j.at("emotion_labels").get<std::vector<int>>();
  d.maneuver.model.centroids = matrix_from_json(j.at("maneuver_centroids"));
  d.maneuver.model.k = static_cast<int>(d.maneuver.model.centroids.rows());
  d.maneuver.feature_mean = vector_from_json(j.at("maneuver_mean"));
  d.maneuver.feature_scale = vector_from_json(j.at("maneuver_scale"));
  for (int v : j.at("maneuver_longi").get<std::vector<int>>()) d.maneuver.longi_of_cluster.push_back(static_cast<ManLongi>(v));
  for (int v : j.at("maneuver_style").get<std::vector<int>>()) d.maneuver.style_of_cluster.push_back(static_cast<ObjStyle>(v));
  d.maneuver.model.label_map.clear();
  for (auto v : d.maneuver.longi_of_cluster) d.maneuver.model.label_map.push_back(static_cast<int>(v));
  d.style_population = j.at("style_population").get<std::vector<double>>();
  return d;
}

std::string frames_to_csv(const std::vector<std::vector<CognitiveFrame>>& sequences) {
  std::ostringstream out;
  out << "sequence,step";
  for (auto name : kCognitiveNodeNames) out << ',' << name;
  out << '\n';
  for (std::size_t s = 0; s < sequences.size(); ++s) {
    for (std::size_t k = 0; k < sequences[s].size(); ++k) {
      const auto& f = sequences[s][k];
      out << s << ',' << k << ',' << f.npc_a_bin << ',' << to_string(f.risk_grade) << ','
          << to_string(f.emo_cluster) << ',' << f.ego_a_bin << ',' << to_string(f.sub_style) << ','
          << to_string(f.obj_style) << ',' << to_string(f.man_longi) << ','
          << to_string(f.man_lateral) << ',' << f.behavior().label() << '\n';
    }
  }
  return out.str();
}

}  // namespace cpsor::disc
