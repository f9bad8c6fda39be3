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

#include "mpeval/report.h"

#include <cmath>
#include <cstdlib>
#include <set>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "mpeval/status.h"

namespace mpeval {
namespace {

using Json = nlohmann::json;

std::string FormatValue(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return absl::StrFormat("%.6g", value);
}

Json ValueJson(double value) {
  if (!std::isfinite(value)) return FormatValue(value);
  return RoundSignificant(value);
}

absl::StatusOr<double> ValueFromJson(const Json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    if (s == "nan") return std::nan("");
  }
  return MakeError(ErrorKind::kSchemaError, "report value is not a number");
}

std::string CsvField(absl::string_view field) {
  if (field.find_first_of(",\"\n") == absl::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

Json RecordJson(const SceneRecord& r) {
  Json metrics = Json::object();
  for (const auto& [name, value] : r.metrics) metrics[name] = ValueJson(value);
  return {{"scene_id", r.scene_id},
          {"agent_id", r.agent_id},
          {"experiment", r.experiment},
          {"metrics", std::move(metrics)},
          {"failures", r.failures},
          {"flags", r.flags},
          {"annotations", r.annotations}};
}

Json SummaryJson(const ExperimentSummary& s) {
  Json metrics = Json::object();
  for (const auto& [name, agg] : s.metrics) {
    metrics[name] = {{"mean", ValueJson(agg.mean)},
                     {"count", agg.count},
                     {"excluded", agg.excluded}};
  }
  Json dataset = Json::object();
  for (const auto& [name, value] : s.dataset_metrics) dataset[name] = ValueJson(value);
  return {{"experiment", s.experiment},
          {"records", s.records},
          {"failed_records", s.failed_records},
          {"metrics", std::move(metrics)},
          {"dataset_metrics", std::move(dataset)},
          {"flag_counts", s.flag_counts}};
}

template <typename T>
absl::StatusOr<T> Get(const Json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    return MakeError(ErrorKind::kSchemaError, absl::StrCat("report field ", key, " missing"));
  }
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    return MakeError(ErrorKind::kSchemaError,
                     absl::StrCat("report field ", key, " has the wrong type"));
  }
}

absl::StatusOr<std::map<std::string, double>> ValueMap(const Json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_object()) {
    return MakeError(ErrorKind::kSchemaError, absl::StrCat("report field ", key, " missing"));
  }
  std::map<std::string, double> out;
  for (const auto& [name, v] : it->items()) {
    MPEVAL_ASSIGN_OR_RETURN(out[name], ValueFromJson(v));
  }
  return out;
}

absl::StatusOr<MetricReport> ReportFromJson(const Json& doc) {
  MetricReport report;
  if (!doc.is_object()) return MakeError(ErrorKind::kSchemaError, "report is not an object");
  MPEVAL_ASSIGN_OR_RETURN(report.version, Get<std::string>(doc, "version"));
  MPEVAL_ASSIGN_OR_RETURN(report.config, Get<Json>(doc, "config"));
  MPEVAL_ASSIGN_OR_RETURN(report.input_digests,
                          (Get<std::map<std::string, std::string>>(doc, "input_digests")));
  MPEVAL_ASSIGN_OR_RETURN(const Json records, Get<Json>(doc, "records"));
  if (!records.is_array()) return MakeError(ErrorKind::kSchemaError, "records is not an array");
  for (const Json& r : records) {
    SceneRecord record;
    MPEVAL_ASSIGN_OR_RETURN(record.scene_id, Get<std::string>(r, "scene_id"));
    MPEVAL_ASSIGN_OR_RETURN(record.agent_id, Get<std::string>(r, "agent_id"));
    MPEVAL_ASSIGN_OR_RETURN(record.experiment, Get<std::string>(r, "experiment"));
    MPEVAL_ASSIGN_OR_RETURN(record.metrics, ValueMap(r, "metrics"));
    MPEVAL_ASSIGN_OR_RETURN(record.failures,
                            (Get<std::map<std::string, std::string>>(r, "failures")));
    MPEVAL_ASSIGN_OR_RETURN(record.flags, Get<std::vector<std::string>>(r, "flags"));
    MPEVAL_ASSIGN_OR_RETURN(record.annotations,
                            (Get<std::map<std::string, std::string>>(r, "annotations")));
    report.records.push_back(std::move(record));
  }
  MPEVAL_ASSIGN_OR_RETURN(const Json summaries, Get<Json>(doc, "summaries"));
  if (!summaries.is_array()) {
    return MakeError(ErrorKind::kSchemaError, "summaries is not an array");
  }
  for (const Json& s : summaries) {
    ExperimentSummary summary;
    MPEVAL_ASSIGN_OR_RETURN(summary.experiment, Get<std::string>(s, "experiment"));
    MPEVAL_ASSIGN_OR_RETURN(summary.records, Get<int>(s, "records"));
    MPEVAL_ASSIGN_OR_RETURN(summary.failed_records, Get<int>(s, "failed_records"));
    MPEVAL_ASSIGN_OR_RETURN(summary.dataset_metrics, ValueMap(s, "dataset_metrics"));
    MPEVAL_ASSIGN_OR_RETURN(summary.flag_counts,
                            (Get<std::map<std::string, int>>(s, "flag_counts")));
    MPEVAL_ASSIGN_OR_RETURN(const Json metrics, Get<Json>(s, "metrics"));
    if (!metrics.is_object()) {
      return MakeError(ErrorKind::kSchemaError, "summary metrics is not an object");
    }
    for (const auto& [name, m] : metrics.items()) {
      MetricAggregate agg;
      const auto mean = m.find("mean");
      if (mean == m.end()) return MakeError(ErrorKind::kSchemaError, "aggregate without mean");
      MPEVAL_ASSIGN_OR_RETURN(agg.mean, ValueFromJson(*mean));
      MPEVAL_ASSIGN_OR_RETURN(agg.count, Get<int>(m, "count"));
      MPEVAL_ASSIGN_OR_RETURN(agg.excluded, Get<int>(m, "excluded"));
      summary.metrics[name] = agg;
    }
    report.summaries.push_back(std::move(summary));
  }
  return report;
}

}  // namespace

double RoundSignificant(double value) {
  if (!std::isfinite(value)) return value;
  return std::strtod(absl::StrFormat("%.6g", value).c_str(), nullptr);
}

std::vector<ExperimentSummary> Aggregate(const std::vector<SceneRecord>& records) {
  std::map<std::string, std::vector<const SceneRecord*>> by_experiment;
  for (const SceneRecord& r : records) by_experiment[r.experiment].push_back(&r);

  std::vector<ExperimentSummary> out;
  for (const auto& [experiment, group] : by_experiment) {
    ExperimentSummary summary;
    summary.experiment = experiment;
    summary.records = static_cast<int>(group.size());
    std::set<std::string> names;
    for (const SceneRecord* r : group) {
      if (!r->failures.empty()) ++summary.failed_records;
      for (const std::string& flag : r->flags) ++summary.flag_counts[flag];
      for (const auto& [name, value] : r->metrics) names.insert(name);
    }
    for (const std::string& name : names) {
      double sum = 0.0;
      MetricAggregate agg;
      for (const SceneRecord* r : group) {
        const auto it = r->metrics.find(name);
        if (it != r->metrics.end() && std::isfinite(it->second)) {
          sum += it->second;
          ++agg.count;
        } else {
          ++agg.excluded;
        }
      }
      agg.mean = agg.count > 0 ? sum / agg.count : std::nan("");
      summary.metrics[name] = agg;
    }
    out.push_back(std::move(summary));
  }
  return out;
}

std::string WriteReportJson(const MetricReport& report) {
  Json doc;
  doc["version"] = report.version;
  doc["config"] = report.config;
  doc["input_digests"] = report.input_digests;
  doc["records"] = Json::array();
  for (const SceneRecord& r : report.records) doc["records"].push_back(RecordJson(r));
  doc["summaries"] = Json::array();
  for (const ExperimentSummary& s : report.summaries) {
    doc["summaries"].push_back(SummaryJson(s));
  }
  return doc.dump(2) + "\n";
}

absl::StatusOr<MetricReport> ParseReportJson(absl::string_view text) {
  const Json doc = Json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded()) return MakeError(ErrorKind::kSchemaError, "report is not JSON");
  return ReportFromJson(doc);
}

std::string WriteReportCsv(const MetricReport& report) {
  std::set<std::string> names;
  for (const SceneRecord& r : report.records) {
    for (const auto& [name, value] : r.metrics) names.insert(name);
  }
  for (const ExperimentSummary& s : report.summaries) {
    for (const auto& [name, value] : s.dataset_metrics) names.insert(name);
  }
  std::string out = "scene_id,agent_id,experiment";
  for (const std::string& name : names) absl::StrAppend(&out, ",", CsvField(name));
  absl::StrAppend(&out, ",flags,failures\n");

  const auto append_row = [&](absl::string_view scene, absl::string_view agent,
                              absl::string_view experiment, const auto& lookup,
                              absl::string_view flags, absl::string_view failures) {
    absl::StrAppend(&out, CsvField(scene), ",", CsvField(agent), ",",
                    CsvField(experiment));
    for (const std::string& name : names) {
      const std::optional<double> v = lookup(name);
      absl::StrAppend(&out, ",", v ? FormatValue(*v) : "");
    }
    absl::StrAppend(&out, ",", CsvField(flags), ",", CsvField(failures), "\n");
  };

  for (const ExperimentSummary& s : report.summaries) {
    for (const SceneRecord& r : report.records) {
      if (r.experiment != s.experiment) continue;
      std::vector<std::string> failed;
      for (const auto& [group, message] : r.failures) failed.push_back(group);
      append_row(
          r.scene_id, r.agent_id, r.experiment,
          [&](const std::string& name) -> std::optional<double> {
            const auto it = r.metrics.find(name);
            if (it == r.metrics.end()) return std::nullopt;
            return it->second;
          },
          absl::StrJoin(r.flags, ";"), absl::StrJoin(failed, ";"));
    }
    append_row(
        "AGGREGATE", "", s.experiment,
        [&](const std::string& name) -> std::optional<double> {
          const auto d = s.dataset_metrics.find(name);
          if (d != s.dataset_metrics.end()) return d->second;
          const auto it = s.metrics.find(name);
          if (it == s.metrics.end() || it->second.count == 0) return std::nullopt;
          return it->second.mean;
        },
        "", "");
  }
  return out;
}

std::string ComparisonTable(const std::vector<MetricReport>& reports,
                            const std::vector<std::string>& metrics) {
  std::vector<std::string> columns = metrics;
  if (columns.empty()) {
    std::set<std::string> names;
    for (const MetricReport& report : reports) {
      for (const ExperimentSummary& s : report.summaries) {
        for (const auto& [name, agg] : s.metrics) names.insert(name);
        for (const auto& [name, value] : s.dataset_metrics) names.insert(name);
      }
    }
    columns.assign(names.begin(), names.end());
  }
  std::string out = "| experiment | n | failed |";
  std::string rule = "|---|---|---|";
  for (const std::string& c : columns) {
    absl::StrAppend(&out, " ", c, " |");
    rule += "---|";
  }
  absl::StrAppend(&out, "\n", rule, "\n");
  for (const MetricReport& report : reports) {
    for (const ExperimentSummary& s : report.summaries) {
      absl::StrAppend(&out, "| ", s.experiment, " | ", s.records, " | ",
                      s.failed_records, " |");
      for (const std::string& c : columns) {
        std::string cell = "-";
        if (const auto d = s.dataset_metrics.find(c); d != s.dataset_metrics.end()) {
          cell = absl::StrFormat("%.3f", d->second);
        } else if (const auto m = s.metrics.find(c);
                   m != s.metrics.end() && m->second.count > 0) {
          cell = absl::StrFormat("%.3f", m->second.mean);
        }
        absl::StrAppend(&out, " ", cell, " |");
      }
      out += "\n";
    }
  }
  return out;
}

}  // namespace mpeval
