// Copyright 2026 The mpeval Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mpeval/io.h"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "json.hpp"
#include "mpeval/status.h"

namespace mpeval {
namespace {

using Json = nlohmann::json;

// Field accessors bound to one input line. Paths are dotted for objects and
// bracketed for arrays, e.g. "lanes[2].centerline[0]".
class LineReader {
 public:
  explicit LineReader(int line) : line_(line) {}

  absl::Status Schema(absl::string_view field, absl::string_view reason) const {
    return MakeError(ErrorKind::kSchemaError,
                     absl::StrCat("line ", line_, ", field ", field, ": ", reason));
  }

  absl::Status AtLine(const absl::Status& status) const {
    if (status.ok()) return status;
    const std::optional<ErrorKind> kind = GetErrorKind(status);
    absl::string_view message = status.message();
    if (kind) {
      absl::ConsumePrefix(&message, ErrorKindName(*kind));
      absl::ConsumePrefix(&message, ": ");
    }
    return MakeError(kind.value_or(ErrorKind::kInvariantViolation),
                     absl::StrCat("line ", line_, ": ", message));
  }

  absl::StatusOr<Json> Parse(absl::string_view text) const {
    Json doc = Json::parse(text.begin(), text.end(), nullptr, false);
    if (doc.is_discarded()) return Schema("<root>", "malformed JSON");
    if (!doc.is_object()) return Schema("<root>", "expected an object");
    return doc;
  }

  absl::StatusOr<const Json*> Required(const Json& obj, absl::string_view key,
                                       absl::string_view path) const {
    const auto it = obj.find(std::string(key));
    if (it == obj.end()) return Schema(Join(path, key), "missing");
    return &*it;
  }

  static const Json* Optional(const Json& obj, absl::string_view key) {
    const auto it = obj.find(std::string(key));
    if (it == obj.end() || it->is_null()) return nullptr;
    return &*it;
  }

  absl::StatusOr<double> Number(const Json& v, absl::string_view path) const {
    if (!v.is_number()) return Schema(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) return Schema(path, "must be finite");
    return d;
  }

  absl::StatusOr<std::string> String(const Json& v, absl::string_view path) const {
    if (!v.is_string()) return Schema(path, "expected a string");
    return v.get<std::string>();
  }

  absl::StatusOr<std::int64_t> Integer(const Json& v, absl::string_view path) const {
    if (!v.is_number_integer()) return Schema(path, "expected an integer");
    return v.get<std::int64_t>();
  }

  absl::StatusOr<const Json*> Array(const Json& v, absl::string_view path) const {
    if (!v.is_array()) return Schema(path, "expected an array");
    return &v;
  }

  absl::StatusOr<const Json*> Object(const Json& v, absl::string_view path) const {
    if (!v.is_object()) return Schema(path, "expected an object");
    return &v;
  }

  absl::StatusOr<std::vector<double>> Tuple(const Json& v, std::size_t size,
                                            absl::string_view path) const {
    if (!v.is_array() || v.size() != size) {
      return Schema(path, absl::StrCat("expected ", size, " numbers"));
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < size; ++i) {
      MPEVAL_ASSIGN_OR_RETURN(const double d, Number(v[i], Index(path, i)));
      out.push_back(d);
    }
    return out;
  }

  absl::StatusOr<Vec2> Point(const Json& v, absl::string_view path) const {
    MPEVAL_ASSIGN_OR_RETURN(const std::vector<double> xy, Tuple(v, 2, path));
    return Vec2(xy[0], xy[1]);
  }

  absl::StatusOr<Polyline> Points(const Json& v, absl::string_view path) const {
    MPEVAL_ASSIGN_OR_RETURN(const Json* arr, Array(v, path));
    Polyline out;
    for (std::size_t i = 0; i < arr->size(); ++i) {
      MPEVAL_ASSIGN_OR_RETURN(Vec2 p, Point((*arr)[i], Index(path, i)));
      out.push_back(p);
    }
    return out;
  }

  absl::StatusOr<std::vector<TimedPoint>> States(const Json& v,
                                                 absl::string_view path) const {
    MPEVAL_ASSIGN_OR_RETURN(const Json* arr, Array(v, path));
    std::vector<TimedPoint> out;
    for (std::size_t i = 0; i < arr->size(); ++i) {
      MPEVAL_ASSIGN_OR_RETURN(const std::vector<double> txy,
                              Tuple((*arr)[i], 3, Index(path, i)));
      out.push_back(TimedPoint{txy[0], Vec2(txy[1], txy[2])});
    }
    return out;
  }

  absl::StatusOr<std::vector<std::string>> Strings(const Json& v,
                                                   absl::string_view path) const {
    MPEVAL_ASSIGN_OR_RETURN(const Json* arr, Array(v, path));
    std::vector<std::string> out;
    for (std::size_t i = 0; i < arr->size(); ++i) {
      MPEVAL_ASSIGN_OR_RETURN(std::string s, String((*arr)[i], Index(path, i)));
      out.push_back(std::move(s));
    }
    return out;
  }

  absl::StatusOr<std::vector<double>> Numbers(const Json& v,
                                              absl::string_view path) const {
    MPEVAL_ASSIGN_OR_RETURN(const Json* arr, Array(v, path));
    std::vector<double> out;
    for (std::size_t i = 0; i < arr->size(); ++i) {
      MPEVAL_ASSIGN_OR_RETURN(const double d, Number((*arr)[i], Index(path, i)));
      out.push_back(d);
    }
    return out;
  }

  static std::string Join(absl::string_view path, absl::string_view key) {
    return path.empty() ? std::string(key) : absl::StrCat(path, ".", key);
  }
  static std::string Index(absl::string_view path, std::size_t i) {
    return absl::StrCat(path, "[", i, "]");
  }

 private:
  int line_;
};

absl::StatusOr<Lane> ParseLane(const LineReader& r, const Json& v,
                               const std::string& path) {
  MPEVAL_ASSIGN_OR_RETURN(const Json* obj, r.Object(v, path));
  MPEVAL_ASSIGN_OR_RETURN(const Json* id_json, r.Required(*obj, "id", path));
  MPEVAL_ASSIGN_OR_RETURN(std::string id, r.String(*id_json, LineReader::Join(path, "id")));
  MPEVAL_ASSIGN_OR_RETURN(const Json* cl_json, r.Required(*obj, "centerline", path));
  MPEVAL_ASSIGN_OR_RETURN(Polyline centerline,
                          r.Points(*cl_json, LineReader::Join(path, "centerline")));
  std::vector<std::string> successors;
  std::vector<std::string> merges;
  if (const Json* s = LineReader::Optional(*obj, "successors")) {
    MPEVAL_ASSIGN_OR_RETURN(successors,
                            r.Strings(*s, LineReader::Join(path, "successors")));
  }
  if (const Json* m = LineReader::Optional(*obj, "merges_with")) {
    MPEVAL_ASSIGN_OR_RETURN(merges, r.Strings(*m, LineReader::Join(path, "merges_with")));
  }
  return Lane(std::move(id), std::move(centerline), std::move(successors),
              std::move(merges));
}

absl::StatusOr<AgentTrack> ParseAgent(const LineReader& r, const Json& v,
                                      const std::string& path) {
  MPEVAL_ASSIGN_OR_RETURN(const Json* obj, r.Object(v, path));
  AgentTrack agent;
  MPEVAL_ASSIGN_OR_RETURN(const Json* id_json, r.Required(*obj, "id", path));
  MPEVAL_ASSIGN_OR_RETURN(agent.id, r.String(*id_json, LineReader::Join(path, "id")));
  MPEVAL_ASSIGN_OR_RETURN(const Json* cat_json, r.Required(*obj, "category", path));
  MPEVAL_ASSIGN_OR_RETURN(const std::string category,
                          r.String(*cat_json, LineReader::Join(path, "category")));
  const std::optional<AgentCategory> parsed = ParseAgentCategory(category);
  if (!parsed) {
    return r.Schema(LineReader::Join(path, "category"),
                    absl::StrCat("unknown category '", category, "'"));
  }
  agent.category = *parsed;
  if (const Json* d = LineReader::Optional(*obj, "dims")) {
    MPEVAL_ASSIGN_OR_RETURN(const std::vector<double> lw,
                            r.Tuple(*d, 2, LineReader::Join(path, "dims")));
    agent.dims = AgentDims{lw[0], lw[1]};
  }
  MPEVAL_ASSIGN_OR_RETURN(const Json* obs, r.Required(*obj, "observed", path));
  MPEVAL_ASSIGN_OR_RETURN(agent.observed,
                          r.States(*obs, LineReader::Join(path, "observed")));
  if (const Json* f = LineReader::Optional(*obj, "future")) {
    MPEVAL_ASSIGN_OR_RETURN(agent.future, r.States(*f, LineReader::Join(path, "future")));
  }
  return agent;
}

Json PointJson(const Vec2& p) { return Json::array({p.x(), p.y()}); }

Json PointsJson(const Polyline& points) {
  Json out = Json::array();
  for (const Vec2& p : points) out.push_back(PointJson(p));
  return out;
}

Json StatesJson(const std::vector<TimedPoint>& states) {
  Json out = Json::array();
  for (const TimedPoint& s : states) {
    out.push_back(Json::array({s.t, s.position.x(), s.position.y()}));
  }
  return out;
}

template <typename T, typename Parser>
absl::StatusOr<std::vector<T>> ParseLines(absl::string_view text, Parser parse) {
  std::vector<T> out;
  int line_number = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_number;
    if (absl::StripAsciiWhitespace(line).empty()) continue;
    MPEVAL_ASSIGN_OR_RETURN(T value, parse(line, line_number));
    out.push_back(std::move(value));
  }
  return out;
}

}  // namespace

absl::StatusOr<Scene> ParseSceneLine(absl::string_view line, int line_number) {
  const LineReader r(line_number);
  MPEVAL_ASSIGN_OR_RETURN(const Json doc, r.Parse(line));
  Scene scene;
  MPEVAL_ASSIGN_OR_RETURN(const Json* id, r.Required(doc, "scene_id", ""));
  MPEVAL_ASSIGN_OR_RETURN(scene.scene_id, r.String(*id, "scene_id"));
  for (const auto& [key, target] :
       {std::pair{"frequency_hz", &scene.frequency_hz},
        std::pair{"history_s", &scene.history_s},
        std::pair{"horizon_s", &scene.horizon_s}}) {
    MPEVAL_ASSIGN_OR_RETURN(const Json* v, r.Required(doc, key, ""));
    MPEVAL_ASSIGN_OR_RETURN(*target, r.Number(*v, key));
  }
  MPEVAL_ASSIGN_OR_RETURN(const Json* focal, r.Required(doc, "focal_agent", ""));
  MPEVAL_ASSIGN_OR_RETURN(scene.focal_agent, r.String(*focal, "focal_agent"));
  if (const Json* av = LineReader::Optional(doc, "av_agent")) {
    MPEVAL_ASSIGN_OR_RETURN(scene.av_agent, r.String(*av, "av_agent"));
  }
  MPEVAL_ASSIGN_OR_RETURN(const Json* lanes_json, r.Required(doc, "lanes", ""));
  MPEVAL_ASSIGN_OR_RETURN(const Json* lanes, r.Array(*lanes_json, "lanes"));
  for (std::size_t i = 0; i < lanes->size(); ++i) {
    MPEVAL_ASSIGN_OR_RETURN(Lane lane,
                            ParseLane(r, (*lanes)[i], LineReader::Index("lanes", i)));
    scene.lanes.push_back(std::move(lane));
  }
  if (const Json* area = LineReader::Optional(doc, "drivable_area")) {
    MPEVAL_ASSIGN_OR_RETURN(const Json* rings, r.Array(*area, "drivable_area"));
    for (std::size_t i = 0; i < rings->size(); ++i) {
      MPEVAL_ASSIGN_OR_RETURN(
          Polyline ring, r.Points((*rings)[i], LineReader::Index("drivable_area", i)));
      scene.drivable_area.push_back(std::move(ring));
    }
  }
  MPEVAL_ASSIGN_OR_RETURN(const Json* agents_json, r.Required(doc, "agents", ""));
  MPEVAL_ASSIGN_OR_RETURN(const Json* agents, r.Array(*agents_json, "agents"));
  for (std::size_t i = 0; i < agents->size(); ++i) {
    MPEVAL_ASSIGN_OR_RETURN(
        AgentTrack agent, ParseAgent(r, (*agents)[i], LineReader::Index("agents", i)));
    scene.agents.push_back(std::move(agent));
  }
  MPEVAL_RETURN_IF_ERROR(r.AtLine(ValidateScene(scene)));
  return scene;
}

absl::StatusOr<PredictionSet> ParsePredictionLine(absl::string_view line,
                                                  int line_number) {
  const LineReader r(line_number);
  MPEVAL_ASSIGN_OR_RETURN(const Json doc, r.Parse(line));
  PredictionSet pred;
  MPEVAL_ASSIGN_OR_RETURN(const Json* scene_id, r.Required(doc, "scene_id", ""));
  MPEVAL_ASSIGN_OR_RETURN(pred.scene_id, r.String(*scene_id, "scene_id"));
  MPEVAL_ASSIGN_OR_RETURN(const Json* agent_id, r.Required(doc, "agent_id", ""));
  MPEVAL_ASSIGN_OR_RETURN(pred.agent_id, r.String(*agent_id, "agent_id"));
  MPEVAL_ASSIGN_OR_RETURN(const Json* modes_json, r.Required(doc, "modes", ""));
  MPEVAL_ASSIGN_OR_RETURN(const Json* modes, r.Array(*modes_json, "modes"));
  if (modes->empty()) return r.Schema("modes", "at least one mode required");
  for (std::size_t k = 0; k < modes->size(); ++k) {
    const std::string path = LineReader::Index("modes", k);
    MPEVAL_ASSIGN_OR_RETURN(Polyline mode, r.Points((*modes)[k], path));
    if (mode.empty()) return r.Schema(path, "mode has no points");
    if (k > 0 && mode.size() != pred.modes.front().size()) {
      return r.Schema(path, absl::StrCat("has ", mode.size(), " points, mode 0 has ",
                                         pred.modes.front().size()));
    }
    pred.modes.push_back(std::move(mode));
  }
  for (const auto& [key, target] :
       {std::pair{"probabilities", &pred.probabilities},
        std::pair{"goal_scores", &pred.goal_scores}}) {
    const Json* v = LineReader::Optional(doc, key);
    if (v == nullptr) continue;
    MPEVAL_ASSIGN_OR_RETURN(std::vector<double> values, r.Numbers(*v, key));
    if (values.size() != pred.modes.size()) {
      return r.Schema(key, absl::StrCat("has ", values.size(), " entries for ",
                                        pred.modes.size(), " modes"));
    }
    *target = std::move(values);
  }
  MPEVAL_RETURN_IF_ERROR(r.AtLine(ValidatePredictionSet(pred, std::nullopt)));
  return pred;
}

absl::StatusOr<IntentClusterSet> ParseClusterSetLine(absl::string_view line,
                                                     int line_number) {
  const LineReader r(line_number);
  MPEVAL_ASSIGN_OR_RETURN(const Json doc, r.Parse(line));
  IntentClusterSet set;
  MPEVAL_ASSIGN_OR_RETURN(const Json* scene_id, r.Required(doc, "scene_id", ""));
  MPEVAL_ASSIGN_OR_RETURN(set.scene_id, r.String(*scene_id, "scene_id"));
  MPEVAL_ASSIGN_OR_RETURN(const Json* agent_id, r.Required(doc, "agent_id", ""));
  MPEVAL_ASSIGN_OR_RETURN(set.agent_id, r.String(*agent_id, "agent_id"));
  MPEVAL_ASSIGN_OR_RETURN(const Json* num_goals, r.Required(doc, "num_goals", ""));
  MPEVAL_ASSIGN_OR_RETURN(const std::int64_t n, r.Integer(*num_goals, "num_goals"));
  if (n < 0 || n > 1'000'000) return r.Schema("num_goals", "out of range");
  set.num_goals = static_cast<int>(n);

  MPEVAL_ASSIGN_OR_RETURN(const Json* clusters_json, r.Required(doc, "clusters", ""));
  MPEVAL_ASSIGN_OR_RETURN(const Json* clusters, r.Array(*clusters_json, "clusters"));
  for (std::size_t k = 0; k < clusters->size(); ++k) {
    const std::string path = LineReader::Index("clusters", k);
    MPEVAL_ASSIGN_OR_RETURN(const Json* obj, r.Object((*clusters)[k], path));
    IntentCluster cluster;
    MPEVAL_ASSIGN_OR_RETURN(const Json* gamma, r.Required(*obj, "gamma", path));
    MPEVAL_ASSIGN_OR_RETURN(cluster.gamma, r.Number(*gamma, LineReader::Join(path, "gamma")));
    MPEVAL_ASSIGN_OR_RETURN(const Json* mu, r.Required(*obj, "mu", path));
    MPEVAL_ASSIGN_OR_RETURN(cluster.mu, r.Point(*mu, LineReader::Join(path, "mu")));
    MPEVAL_ASSIGN_OR_RETURN(const Json* dir, r.Required(*obj, "direction", path));
    MPEVAL_ASSIGN_OR_RETURN(cluster.direction,
                            r.Point(*dir, LineReader::Join(path, "direction")));
    MPEVAL_ASSIGN_OR_RETURN(const Json* sigma_json, r.Required(*obj, "sigma", path));
    const std::string sigma_path = LineReader::Join(path, "sigma");
    if (!sigma_json->is_array() || sigma_json->size() != 2) {
      return r.Schema(sigma_path, "expected a 2x2 matrix");
    }
    for (int i = 0; i < 2; ++i) {
      MPEVAL_ASSIGN_OR_RETURN(Vec2 row,
                              r.Point((*sigma_json)[i], LineReader::Index(sigma_path, i)));
      cluster.sigma.row(i) = row.transpose();
    }
    MPEVAL_ASSIGN_OR_RETURN(const Json* lanes, r.Required(*obj, "lanes", path));
    MPEVAL_ASSIGN_OR_RETURN(cluster.lanes,
                            r.Strings(*lanes, LineReader::Join(path, "lanes")));
    MPEVAL_ASSIGN_OR_RETURN(const Json* members_json, r.Required(*obj, "members", path));
    const std::string members_path = LineReader::Join(path, "members");
    MPEVAL_ASSIGN_OR_RETURN(const Json* members, r.Array(*members_json, members_path));
    for (std::size_t i = 0; i < members->size(); ++i) {
      const std::string mp = LineReader::Index(members_path, i);
      MPEVAL_ASSIGN_OR_RETURN(const Json* m, r.Object((*members)[i], mp));
      MPEVAL_ASSIGN_OR_RETURN(const Json* gi, r.Required(*m, "goal_index", mp));
      MPEVAL_ASSIGN_OR_RETURN(const std::int64_t index,
                              r.Integer(*gi, LineReader::Join(mp, "goal_index")));
      if (index < 0 || index >= set.num_goals) {
        return r.Schema(LineReader::Join(mp, "goal_index"), "out of range");
      }
      MPEVAL_ASSIGN_OR_RETURN(const Json* a, r.Required(*m, "alpha", mp));
      MPEVAL_ASSIGN_OR_RETURN(const double alpha,
                              r.Number(*a, LineReader::Join(mp, "alpha")));
      cluster.members.push_back({static_cast<int>(index), alpha});
    }
    set.clusters.push_back(std::move(cluster));
  }

  MPEVAL_ASSIGN_OR_RETURN(const Json* alpha_json, r.Required(doc, "alpha", ""));
  MPEVAL_ASSIGN_OR_RETURN(const Json* alpha, r.Array(*alpha_json, "alpha"));
  if (alpha->size() != static_cast<std::size_t>(set.num_goals)) {
    return r.Schema("alpha", "expected one row per goal");
  }
  for (std::size_t n = 0; n < alpha->size(); ++n) {
    MPEVAL_ASSIGN_OR_RETURN(std::vector<double> row,
                            r.Numbers((*alpha)[n], LineReader::Index("alpha", n)));
    if (row.size() != set.clusters.size()) {
      return r.Schema(LineReader::Index("alpha", n), "expected one entry per cluster");
    }
    set.alpha.push_back(std::move(row));
  }

  MPEVAL_ASSIGN_OR_RETURN(const Json* discarded_json, r.Required(doc, "discarded", ""));
  MPEVAL_ASSIGN_OR_RETURN(const Json* discarded, r.Array(*discarded_json, "discarded"));
  for (std::size_t i = 0; i < discarded->size(); ++i) {
    const std::string path = LineReader::Index("discarded", i);
    MPEVAL_ASSIGN_OR_RETURN(const Json* d, r.Object((*discarded)[i], path));
    MPEVAL_ASSIGN_OR_RETURN(const Json* gi, r.Required(*d, "goal_index", path));
    MPEVAL_ASSIGN_OR_RETURN(const std::int64_t index,
                            r.Integer(*gi, LineReader::Join(path, "goal_index")));
    if (index < 0 || index >= set.num_goals) {
      return r.Schema(LineReader::Join(path, "goal_index"), "out of range");
    }
    MPEVAL_ASSIGN_OR_RETURN(const Json* reason_json, r.Required(*d, "reason", path));
    MPEVAL_ASSIGN_OR_RETURN(const std::string reason,
                            r.String(*reason_json, LineReader::Join(path, "reason")));
    const std::optional<DiscardReason> parsed = ParseDiscardReason(reason);
    if (!parsed) return r.Schema(LineReader::Join(path, "reason"), "unknown reason");
    set.discarded.push_back({static_cast<int>(index), *parsed});
  }
  return set;
}

std::string SceneToJsonLine(const Scene& scene) {
  Json doc;
  doc["scene_id"] = scene.scene_id;
  doc["frequency_hz"] = scene.frequency_hz;
  doc["history_s"] = scene.history_s;
  doc["horizon_s"] = scene.horizon_s;
  doc["focal_agent"] = scene.focal_agent;
  if (scene.av_agent) doc["av_agent"] = *scene.av_agent;
  doc["lanes"] = Json::array();
  for (const Lane& lane : scene.lanes) {
    doc["lanes"].push_back({{"id", lane.id},
                            {"centerline", PointsJson(lane.centerline)},
                            {"successors", lane.successors},
                            {"merges_with", lane.merges_with}});
  }
  doc["drivable_area"] = Json::array();
  for (const Polyline& ring : scene.drivable_area) {
    doc["drivable_area"].push_back(PointsJson(ring));
  }
  doc["agents"] = Json::array();
  for (const AgentTrack& agent : scene.agents) {
    Json a = {{"id", agent.id},
              {"category", AgentCategoryName(agent.category)},
              {"observed", StatesJson(agent.observed)},
              {"future", StatesJson(agent.future)}};
    if (agent.dims) a["dims"] = Json::array({agent.dims->length, agent.dims->width});
    doc["agents"].push_back(std::move(a));
  }
  return doc.dump();
}

std::string PredictionToJsonLine(const PredictionSet& prediction) {
  Json doc;
  doc["scene_id"] = prediction.scene_id;
  doc["agent_id"] = prediction.agent_id;
  doc["modes"] = Json::array();
  for (const Polyline& mode : prediction.modes) doc["modes"].push_back(PointsJson(mode));
  if (prediction.probabilities) doc["probabilities"] = *prediction.probabilities;
  if (prediction.goal_scores) doc["goal_scores"] = *prediction.goal_scores;
  return doc.dump();
}

std::string ClusterSetToJsonLine(const IntentClusterSet& set) {
  Json doc;
  doc["scene_id"] = set.scene_id;
  doc["agent_id"] = set.agent_id;
  doc["num_goals"] = set.num_goals;
  doc["clusters"] = Json::array();
  for (const IntentCluster& c : set.clusters) {
    Json members = Json::array();
    for (const ClusterMember& m : c.members) {
      members.push_back({{"goal_index", m.goal_index}, {"alpha", m.alpha}});
    }
    doc["clusters"].push_back(
        {{"gamma", c.gamma},
         {"mu", PointJson(c.mu)},
         {"direction", PointJson(c.direction)},
         {"sigma", Json::array({Json::array({c.sigma(0, 0), c.sigma(0, 1)}),
                                Json::array({c.sigma(1, 0), c.sigma(1, 1)})})},
         {"lanes", c.lanes},
         {"members", std::move(members)}});
  }
  doc["alpha"] = set.alpha;
  doc["discarded"] = Json::array();
  for (const DiscardedGoal& d : set.discarded) {
    doc["discarded"].push_back(
        {{"goal_index", d.goal_index}, {"reason", DiscardReasonName(d.reason)}});
  }
  return doc.dump();
}

absl::StatusOr<std::vector<Scene>> ParseScenes(absl::string_view text) {
  return ParseLines<Scene>(text, ParseSceneLine);
}

absl::StatusOr<std::vector<PredictionSet>> ParsePredictions(absl::string_view text) {
  return ParseLines<PredictionSet>(text, ParsePredictionLine);
}

absl::StatusOr<std::vector<IntentClusterSet>> ParseClusterSets(absl::string_view text) {
  return ParseLines<IntentClusterSet>(text, ParseClusterSetLine);
}

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

absl::Status WriteFile(const std::string& path, absl::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) return absl::DataLossError(absl::StrCat("short write to ", path));
  return absl::OkStatus();
}

absl::StatusOr<std::vector<Scene>> LoadScenes(const std::string& path) {
  MPEVAL_ASSIGN_OR_RETURN(const std::string text, ReadFile(path));
  return ParseScenes(text);
}

absl::StatusOr<std::vector<PredictionSet>> LoadPredictions(const std::string& path) {
  MPEVAL_ASSIGN_OR_RETURN(const std::string text, ReadFile(path));
  return ParsePredictions(text);
}

absl::StatusOr<std::vector<IntentClusterSet>> LoadClusterSets(const std::string& path) {
  MPEVAL_ASSIGN_OR_RETURN(const std::string text, ReadFile(path));
  return ParseClusterSets(text);
}

std::string ScenesToJsonl(const std::vector<Scene>& scenes) {
  std::string out;
  for (const Scene& s : scenes) absl::StrAppend(&out, SceneToJsonLine(s), "\n");
  return out;
}

std::string PredictionsToJsonl(const std::vector<PredictionSet>& predictions) {
  std::string out;
  for (const PredictionSet& p : predictions) {
    absl::StrAppend(&out, PredictionToJsonLine(p), "\n");
  }
  return out;
}

std::string ClusterSetsToJsonl(const std::vector<IntentClusterSet>& sets) {
  std::string out;
  for (const IntentClusterSet& s : sets) {
    absl::StrAppend(&out, ClusterSetToJsonLine(s), "\n");
  }
  return out;
}

std::string Sha256Hex(absl::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int size = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &size, EVP_sha256(), nullptr);
  std::string out;
  for (unsigned int i = 0; i < size; ++i) absl::StrAppendFormat(&out, "%02x", digest[i]);
  return out;
}

}  // namespace mpeval
