#include <cmath>
#include <sstream>

#include "detail.hpp"

namespace cotran::harness {
namespace {

Json element_to_json(const GroupElement& g) {
  Json key = Json::array();
  for (const std::int64_t v : g.key()) key.push_back(v);
  return Json{{"text", g.str()}, {"key", std::move(key)}};
}

Json entry_to_json(const LawEntry& e) {
  Json argmax = Json::array();
  for (const GroupElement& g : e.argmax) argmax.push_back(element_to_json(g));
  Json metrics = Json::object();
  for (const auto& [k, v] : e.metrics) metrics[k] = v;
  return Json{{"law", e.law},
              {"max_residual", e.max_residual},
              {"argmax_triple", std::move(argmax)},
              {"tol", e.tol},
              {"samples", e.samples},
              {"pass", e.pass},
              {"note", e.note},
              {"metrics", std::move(metrics)}};
}

LawEntry entry_from_json(const Json& j) {
  LawEntry e;
  e.law = j.at("law").get<std::string>();
  e.max_residual = j.at("max_residual").get<double>();
  e.tol = j.at("tol").get<double>();
  e.samples = j.at("samples").get<std::size_t>();
  e.pass = j.at("pass").get<bool>();
  e.note = j.at("note").get<std::string>();
  for (const Json& a : j.at("argmax_triple")) {
    std::vector<std::int64_t> key;
    for (const Json& v : a.at("key")) key.push_back(v.get<std::int64_t>());
    e.argmax.push_back(GroupElement::from_key(key));
  }
  for (auto it = j.at("metrics").begin(); it != j.at("metrics").end(); ++it)
    e.metrics[it.key()] = it.value().get<double>();
  return e;
}

}  // namespace

Json report_to_json(const RunResult& result, const ProblemSpec& spec) {
  Json entries = Json::array();
  for (const LawEntry& e : result.report.entries) entries.push_back(entry_to_json(e));
  Json doc{{"schema_version", 1},
           {"command", result.command},
           {"radius", spec.radius},
           {"seed", spec.seed},
           {"aggregate_pass", result.report.aggregate_pass()},
           {"exit_code", result.exit_code},
           {"wall_time_sec", result.report.wall_time_sec},
           {"entries", std::move(entries)}};
  if (!result.artifacts.is_null()) doc["artifacts"] = result.artifacts;
  return doc;
}

bool replay(const Json& report_doc, const ProblemSpec& spec, std::string* why) {
  auto explain = [why](const std::string& s) {
    if (why) *why = s;
    return false;
  };
  if (!report_doc.is_object() || !report_doc.contains("schema_version"))
    throw SpecError("replay: not a report document");
  if (report_doc.at("schema_version") != 1)
    throw SpecError("replay: report schema_version mismatch");
  if (!report_doc.contains("command") ||
      report_doc.at("command").get<std::string>() != spec.command)
    throw SpecError("replay: report was produced by a different command");

  const RunResult fresh = execute(spec);

  if (!report_doc.contains("entries") || !report_doc.at("entries").is_array())
    throw SpecError("replay: report has no entries");
  for (const Json& ej : report_doc.at("entries")) {
    LawEntry stored;
    try {
      stored = entry_from_json(ej);
    } catch (const std::exception& e) {
      return explain(std::string("malformed entry: ") + e.what());
    }
    if (stored.law == "construction") {
      const LawEntry* mine = fresh.report.find("construction");
      if (!mine) return explain("construction failure does not reproduce");
      if (mine->note != stored.note)
        return explain("construction failure differs: " + mine->note);
      continue;
    }
    if (stored.samples == 0 && stored.argmax.empty()) continue;  // informational stub
    const auto it = fresh.replayers.find(stored.law);
    if (it == fresh.replayers.end())
      return explain("law '" + stored.law + "' is not produced by this spec");
    double r = 0.0;
    try {
      r = it->second(stored);
    } catch (const std::exception& e) {
      return explain("law '" + stored.law + "': " + e.what());
    }
    if (!(std::fabs(r - stored.max_residual) <= 1e-12)) {
      std::ostringstream os;
      os << "law '" << stored.law << "': recorded " << stored.max_residual << ", re-evaluated "
         << r;
      return explain(os.str());
    }
  }
  if (why) why->clear();
  return true;
}

}  // namespace cotran::harness
