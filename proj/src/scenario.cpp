#include "segmarket/scenario.hpp"

#include <fstream>
#include <set>
#include <string>
#include <vector>

namespace segmarket {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw validation_error("unknown_field",
                             "unknown field '" + it.key() + "' in " + where);
    }
  }
}

double require_number(const json& obj, const std::string& key,
                      const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number()) {
    throw validation_error("missing_field",
                           where + " requires numeric field '" + key + "'");
  }
  return obj[key].get<double>();
}

std::vector<double> require_array(const json& obj, const std::string& key,
                                  const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_array()) {
    throw validation_error("missing_field",
                           where + " requires array field '" + key + "'");
  }
  std::vector<double> out;
  for (const auto& v : obj[key]) {
    if (!v.is_number()) {
      throw validation_error("bad_argument", where + "." + key + " must be numeric");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

MeetingFunction parse_meeting(const json& obj) {
  if (!obj.is_object() || !obj.contains("family") || !obj["family"].is_string()) {
    throw validation_error("missing_field", "meeting requires a 'family' string");
  }
  const std::string family = obj["family"].get<std::string>();
  if (family == "ces") {
    reject_unknown(obj, {"family", "alpha", "beta", "rho"}, "meeting");
    return MeetingFunction::ces(require_number(obj, "alpha", "meeting"),
                                require_number(obj, "beta", "meeting"),
                                require_number(obj, "rho", "meeting"));
  }
  if (family == "urnball") {
    reject_unknown(obj, {"family", "alpha", "beta"}, "meeting");
    return MeetingFunction::urn_ball(require_number(obj, "alpha", "meeting"),
                                     require_number(obj, "beta", "meeting"));
  }
  throw validation_error("bad_argument", "unknown meeting family '" + family + "'");
}

Prior parse_prior(const json& obj) {
  if (!obj.is_object()) {
    throw validation_error("missing_field", "prior must be an object");
  }
  if (obj.contains("kind")) {
    if (obj["kind"] != "uniform") {
      throw validation_error("bad_argument", "unknown prior kind");
    }
    reject_unknown(obj, {"kind", "n"}, "prior");
    if (!obj.contains("n") || !obj["n"].is_number_integer()) {
      throw validation_error("missing_field", "uniform prior requires integer 'n'");
    }
    return Prior::uniform(obj["n"].get<int>());
  }
  reject_unknown(obj, {"grid", "weights"}, "prior");
  return Prior::from_points(require_array(obj, "grid", "prior"),
                            require_array(obj, "weights", "prior"));
}

SurplusSplit parse_split(const json& obj) {
  if (!obj.is_object() || !obj.contains("kind") || !obj["kind"].is_string()) {
    throw validation_error("missing_field", "lambda requires a 'kind' string");
  }
  const std::string kind = obj["kind"].get<std::string>();
  if (kind == "constant") {
    reject_unknown(obj, {"kind", "ell"}, "lambda");
    return SurplusSplit::constant(require_number(obj, "ell", "lambda"));
  }
  if (kind == "table") {
    reject_unknown(obj, {"kind", "values"}, "lambda");
    return SurplusSplit::table(require_array(obj, "values", "lambda"));
  }
  throw validation_error("bad_argument", "unknown lambda kind '" + kind + "'");
}

std::pair<Segmentation, std::string> parse_segmentation(const json& obj,
                                                        const Prior& prior) {
  if (!obj.is_object() || !obj.contains("kind") || !obj["kind"].is_string()) {
    throw validation_error("missing_field", "segmentation requires a 'kind' string");
  }
  const std::string kind = obj["kind"].get<std::string>();
  if (kind == "perfect") {
    reject_unknown(obj, {"kind"}, "segmentation");
    return {perfect_segmentation(prior), kind};
  }
  if (kind == "pooled") {
    reject_unknown(obj, {"kind"}, "segmentation");
    return {pooled_segmentation(prior), kind};
  }
  if (kind == "binary") {
    reject_unknown(obj, {"kind", "cutoff_index", "split"}, "segmentation");
    if (!obj.contains("cutoff_index") || !obj["cutoff_index"].is_number_integer()) {
      throw validation_error("missing_field",
                             "binary segmentation requires integer 'cutoff_index'");
    }
    const double split =
        obj.contains("split") ? require_number(obj, "split", "segmentation") : 1.0;
    return {binary_segmentation(prior, obj["cutoff_index"].get<int>(), split)
                .segmentation,
            kind};
  }
  if (kind == "explicit") {
    reject_unknown(obj, {"kind", "submarkets"}, "segmentation");
    if (!obj.contains("submarkets") || !obj["submarkets"].is_array()) {
      throw validation_error("missing_field",
                             "explicit segmentation requires 'submarkets'");
    }
    Segmentation seg;
    for (const auto& sub : obj["submarkets"]) {
      reject_unknown(sub, {"weight", "posterior"}, "submarket");
      Submarket s;
      s.weight = require_number(sub, "weight", "submarket");
      s.posterior = require_array(sub, "posterior", "submarket");
      seg.submarkets.push_back(std::move(s));
    }
    seg.validate(prior);
    const auto consistency = verify_consistency(prior, seg);
    if (!consistency.consistent) {
      throw validation_error("inconsistent_segmentation",
                             "explicit segmentation is not Bayes-consistent "
                             "(residual " +
                                 std::to_string(consistency.max_residual) + ")");
    }
    return {std::move(seg), kind};
  }
  throw validation_error("bad_argument", "unknown segmentation kind '" + kind + "'");
}

}  // namespace

Scenario parse_scenario(const json& doc) {
  if (!doc.is_object()) {
    throw validation_error("bad_argument", "scenario must be a JSON object");
  }
  reject_unknown(doc, {"meeting", "prior", "k", "lambda", "segmentation", "mesh"},
                 "scenario");
  for (const char* key : {"meeting", "prior", "k", "lambda"}) {
    if (!doc.contains(key)) {
      throw validation_error("missing_field",
                             std::string("scenario requires '") + key + "'");
    }
  }

  Scenario sc;
  sc.meeting = parse_meeting(doc["meeting"]);
  sc.prior = parse_prior(doc["prior"]);
  sc.k = require_number(doc, "k", "scenario");
  if (!(sc.k > 0.0)) {
    throw validation_error("bad_argument", "k must be positive");
  }
  sc.split = parse_split(doc["lambda"]);
  sc.split.validate(sc.prior);
  if (doc.contains("segmentation")) {
    auto [seg, kind] = parse_segmentation(doc["segmentation"], sc.prior);
    sc.segmentation = std::move(seg);
    sc.segmentation_kind = kind;
  } else {
    sc.segmentation = perfect_segmentation(sc.prior);
    sc.segmentation_kind = "perfect";
  }
  if (doc.contains("mesh")) {
    if (!doc["mesh"].is_number_integer()) {
      throw validation_error("bad_argument", "mesh must be an integer");
    }
    sc.mesh = doc["mesh"].get<int>();
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw validation_error("io_error", "cannot open scenario file '" + path + "'");
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw validation_error("parse_error", std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

}  // namespace segmarket
