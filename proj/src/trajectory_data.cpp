#include "cpsor/trajectory_data.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "cpsor/text_format.hpp"
#include "json.hpp"

namespace cpsor::data {
namespace {

constexpr const char* kCsvHeader =
    "t,vehicle_id,x,y,v,a,steer_deg,throttle,brake,heading_rad,pad_p,pad_a,pad_d";
constexpr std::size_t kCsvColumns = 13;
constexpr double kTimeTolerance = 1e-6;

[[noreturn]] void fail(const std::string& source, const std::string& what) {
  throw DatasetError(source + ": " + what);
}

void check_state(const VehicleState& s, const std::string& source, const std::string& where) {
  const double fields[] = {s.t, s.x, s.y, s.v, s.a, s.steer_deg, s.throttle, s.brake,
                           s.heading_rad};
  for (double f : fields) {
    if (!std::isfinite(f)) fail(source, "non-finite value, " + where);
  }
  if (s.v < 0.0) fail(source, "v negative, " + where);
  if (s.throttle < 0.0 || s.throttle > 1.0) fail(source, "throttle out of range, " + where);
  if (s.brake < 0.0 || s.brake > 1.0) fail(source, "brake out of range, " + where);
}

void check_pad(const PadSample& p, const std::string& source, const std::string& where) {
  for (double c : {p.pleased, p.aroused, p.dominant}) {
    if (!std::isfinite(c) || c < -1.0 || c > 1.0) fail(source, "PAD value out of range, " + where);
  }
}

void check_scenario(int scenario_id, const std::string& source) {
  if (scenario_id < 1 || scenario_id > 4) {
    fail(source, "unknown scenario_id " + std::to_string(scenario_id));
  }
}

std::string num(double v) { return format_number(v, kTextDigits); }

}  // namespace

std::vector<std::string> Episode::vehicle_ids() const {
  std::vector<std::string> ids{ego_id};
  ids.insert(ids.end(), npc_ids.begin(), npc_ids.end());
  return ids;
}

std::size_t steps_for(double seconds) {
  return static_cast<std::size_t>(std::llround(seconds / kTimeStep));
}

void validate_episode(const Episode& episode, const std::string& source) {
  check_scenario(episode.scenario_id, source);
  if (episode.ego_id.empty()) fail(source, "missing ego_id");
  const auto ids = episode.vehicle_ids();
  if (episode.tracks.size() != ids.size()) fail(source, "track count does not match vehicle ids");
  const std::size_t n = episode.steps();
  if (episode.ego_pad.size() != n) fail(source, "ego PAD series length mismatch");
  for (std::size_t v = 0; v < ids.size(); ++v) {
    const auto& track = episode.tracks[v];
    if (track.size() != n) fail(source, "vehicle " + ids[v] + " has a different time grid");
    for (std::size_t k = 0; k < n; ++k) {
      const std::string where = "vehicle " + ids[v] + " step " + std::to_string(k);
      if (track[k].vehicle_id != ids[v]) fail(source, "vehicle id mismatch, " + where);
      check_state(track[k], source, where);
      if (std::abs(track[k].t - episode.tracks[0][k].t) > kTimeTolerance) {
        fail(source, "vehicles not on a shared time grid, " + where);
      }
      if (k > 0 && std::abs(track[k].t - track[k - 1].t - kTimeStep) > kTimeTolerance) {
        fail(source, "non-uniform timestamps, " + where);
      }
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    check_pad(episode.ego_pad[k], source, "step " + std::to_string(k));
  }
}

std::string episode_to_csv(const Episode& episode) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (std::size_t k = 0; k < episode.steps(); ++k) {
    for (std::size_t v = 0; v < episode.tracks.size(); ++v) {
      const auto& s = episode.tracks[v][k];
      out << num(s.t) << ',' << s.vehicle_id << ',' << num(s.x) << ',' << num(s.y) << ','
          << num(s.v) << ',' << num(s.a) << ',' << num(s.steer_deg) << ',' << num(s.throttle)
          << ',' << num(s.brake) << ',' << num(s.heading_rad) << ',';
      if (v == 0) {
        const auto& p = episode.ego_pad[k];
        out << num(p.pleased) << ',' << num(p.aroused) << ',' << num(p.dominant);
      } else {
        out << ",,";
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string episode_sidecar_json(const Episode& episode) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["scenario_id"] = episode.scenario_id;
  j["ego_id"] = episode.ego_id;
  j["npc_ids"] = episode.npc_ids;
  j["sub_style_score"] = quantize(episode.sub_style_score, kTextDigits);
  j["seed"] = episode.seed;
  j["meta"] = episode.meta;
  return j.dump(2) + "\n";
}

Episode episode_from_text(const std::string& csv, const std::string& sidecar_json,
                          const std::string& source) {
  Episode ep;
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(sidecar_json);
    if (meta.at("schema_version").get<int>() != kSchemaVersion) {
      fail(source, "unsupported schema_version");
    }
    ep.scenario_id = meta.at("scenario_id").get<int>();
    ep.ego_id = meta.at("ego_id").get<std::string>();
    ep.npc_ids = meta.at("npc_ids").get<std::vector<std::string>>();
    ep.sub_style_score = meta.at("sub_style_score").get<double>();
    ep.seed = meta.at("seed").get<std::uint64_t>();
    if (meta.contains("meta")) ep.meta = meta["meta"].get<std::map<std::string, std::string>>();
  } catch (const nlohmann::json::exception& e) {
    fail(source, std::string("malformed sidecar: ") + e.what());
  }
  check_scenario(ep.scenario_id, source);

  const auto ids = ep.vehicle_ids();
  std::map<std::string, std::size_t> slot;
  for (std::size_t i = 0; i < ids.size(); ++i) slot[ids[i]] = i;
  ep.tracks.assign(ids.size(), {});

  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || trim(line) != kCsvHeader) {
    fail(source, "missing columns: header must be '" + std::string(kCsvHeader) + "'");
  }
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const std::string where = "row " + std::to_string(row);
    const auto f = split(line, ',');
    if (f.size() != kCsvColumns) fail(source, "missing columns, " + where);
    VehicleState s;
    PadSample pad;
    bool has_pad = false;
    try {
      s.t = parse_number(f[0]);
      s.vehicle_id = std::string(trim(f[1]));
      s.x = parse_number(f[2]);
      s.y = parse_number(f[3]);
      s.v = parse_number(f[4]);
      s.a = parse_number(f[5]);
      s.steer_deg = parse_number(f[6]);
      s.throttle = parse_number(f[7]);
      s.brake = parse_number(f[8]);
      s.heading_rad = parse_number(f[9]);
      has_pad = !trim(f[10]).empty() || !trim(f[11]).empty() || !trim(f[12]).empty();
      if (has_pad) {
        pad = {parse_number(f[10]), parse_number(f[11]), parse_number(f[12])};
      }
    } catch (const std::invalid_argument& e) {
      fail(source, std::string(e.what()) + ", " + where);
    }
    const auto it = slot.find(s.vehicle_id);
    if (it == slot.end()) fail(source, "unknown vehicle_id '" + s.vehicle_id + "', " + where);
    check_state(s, source, where);
    auto& track = ep.tracks[it->second];
    if (!track.empty() && std::abs(s.t - track.back().t - kTimeStep) > kTimeTolerance) {
      fail(source, "non-uniform timestamps, " + where);
    }
    if (it->second == 0) {
      if (!has_pad) fail(source, "missing PAD values for ego, " + where);
      check_pad(pad, source, where);
      ep.ego_pad.push_back(pad);
    } else if (has_pad) {
      fail(source, "PAD values given for non-ego vehicle, " + where);
    }
    track.push_back(std::move(s));
  }
  validate_episode(ep, source);
  return ep;
}

void write_episode(const Episode& episode, const std::string& dir, const std::string& stem) {
  std::filesystem::create_directories(dir);
  const auto base = std::filesystem::path(dir) / stem;
  write_file(base.string() + ".csv", episode_to_csv(episode));
  write_file(base.string() + ".json", episode_sidecar_json(episode));
}

Episode load_episode(const std::string& csv_path, const std::string& json_path) {
  return episode_from_text(read_file(csv_path), read_file(json_path), csv_path);
}

std::vector<Episode> load_dataset(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw DatasetError(dir + ": not a dataset directory");
  std::vector<std::string> stems;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    auto csv = entry.path();
    csv.replace_extension(".csv");
    if (fs::exists(csv)) stems.push_back(entry.path().stem().string());
  }
  std::sort(stems.begin(), stems.end());
  std::vector<Episode> episodes;
  episodes.reserve(stems.size());
  for (const auto& stem : stems) {
    const auto base = fs::path(dir) / stem;
    episodes.push_back(load_episode(base.string() + ".csv", base.string() + ".json"));
  }
  return episodes;
}

std::vector<Sample> window_samples(const Episode& episode, double t_p, double t_f,
                                   std::size_t stride, const std::vector<CognitiveFrame>* frames,
                                   std::size_t episode_index) {
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");
  const std::size_t hist = steps_for(t_p);
  const std::size_t fut = steps_for(t_f);
  if (hist < 1 || fut < 1) throw std::invalid_argument("history and future windows must be non-empty");
  if (frames != nullptr && frames->size() != episode.steps()) {
    throw std::invalid_argument("cognitive frame count does not match episode length");
  }
  const std::size_t n = episode.steps();
  std::vector<Sample> out;
  if (n < hist + fut) return out;
  const auto ids = episode.vehicle_ids();
  for (std::size_t start = 0; start + hist + fut <= n; start += stride) {
    Sample s;
    s.scenario_id = episode.scenario_id;
    s.episode_index = episode_index;
    s.start_step = start;
    s.vehicle_ids = ids;
    s.history.reserve(ids.size());
    for (const auto& track : episode.tracks) {
      s.history.emplace_back(track.begin() + static_cast<std::ptrdiff_t>(start),
                             track.begin() + static_cast<std::ptrdiff_t>(start + hist));
    }
    if (frames != nullptr) {
      s.cognition.assign(frames->begin() + static_cast<std::ptrdiff_t>(start),
                         frames->begin() + static_cast<std::ptrdiff_t>(start + hist));
    }
    for (std::size_t k = start + hist; k < start + hist + fut; ++k) {
      const auto& e = episode.ego()[k];
      s.future.push_back({e.t, e.x, e.y});
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace cpsor::data
