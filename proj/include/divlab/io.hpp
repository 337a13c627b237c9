#pragma once

// JSON file formats.
//
// Diversity:   {"points": ["a","b","c"], "values": {"a b": "1", ..., "a b c": "2"}}
//              every subset of size >= 2 exactly once; singletons may appear
//              only with value 0.
// Function:    {"base": <diversity or path>, "values": {"": "0", "a": "1", ...},
//              "support": "a"}  (support optional)
// Query:       {"frame": "a b", "values": {...over subsets of frame...}, "epsilon": "0"}
//
// Subset keys are space-separated labels; values are "p/q" or decimal strings.
// Output is canonical: keys by cardinality, then by member positions, values
// in lowest terms.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "divlab/tower.hpp"

namespace divlab::io {

using Json = nlohmann::ordered_json;

inline Error parse_error_at(const std::string& text, std::size_t byte, const std::string& what) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return Error(ErrorKind::kParse, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + what);
}

inline Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw parse_error_at(text, e.byte == 0 ? 0 : e.byte - 1, e.what());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kParse, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Rat parse_rat(const Json& v, const std::string& where) {
  if (!v.is_string()) throw Error(ErrorKind::kParse, where + ": value must be a string");
  return Rat::parse(v.get<std::string>());
}

/// Subset of `labels` named by a space-separated key; "" is the empty set.
inline SubsetKey parse_subset(const std::vector<std::string>& labels, const std::string& key) {
  SubsetKey s;
  std::istringstream in(key);
  std::string tok;
  while (in >> tok) {
    std::size_t i = 0;
    while (i < labels.size() && labels[i] != tok) ++i;
    if (i == labels.size()) throw Error(ErrorKind::kStructural, "unknown point \"" + tok + "\" in key \"" + key + "\"");
    if (s.contains(i)) throw Error(ErrorKind::kStructural, "point \"" + tok + "\" repeated in key \"" + key + "\"");
    s = s.with(i);
  }
  return s;
}

inline std::string subset_name(const std::vector<std::string>& labels, SubsetKey s) {
  std::string out;
  for (auto i : s.members()) {
    if (!out.empty()) out += ' ';
    out += labels[i];
  }
  return out;
}

/// Masks over n points in canonical key order.
inline std::vector<SubsetKey> canonical_order(std::size_t n) {
  std::vector<SubsetKey> out;
  for (std::uint32_t m = 0; m < subset_count(n); ++m) out.emplace_back(m);
  std::sort(out.begin(), out.end(), [](SubsetKey a, SubsetKey b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a.members() < b.members();
  });
  return out;
}

namespace detail {

/// Reads a key -> value object into a table over the subsets of `labels`.
/// Subsets with fewer than `min_size` members are optional and must be zero.
inline std::vector<Rat> read_table(const Json& obj, const std::vector<std::string>& labels, std::size_t min_size) {
  if (!obj.is_object()) throw Error(ErrorKind::kParse, "\"values\" must be an object");
  std::vector<Rat> table(subset_count(labels.size()));
  std::vector<bool> seen(table.size(), false);
  for (const auto& [key, v] : obj.items()) {
    const SubsetKey s = parse_subset(labels, key);
    if (seen[s.bits()]) throw Error(ErrorKind::kStructural, "subset \"" + subset_name(labels, s) + "\" given twice");
    seen[s.bits()] = true;
    table[s.bits()] = parse_rat(v, "\"" + key + "\"");
    if (s.size() < min_size && !table[s.bits()].is_zero()) {
      throw Error(ErrorKind::kStructural, "subset \"" + key + "\" must have value 0");
    }
  }
  std::vector<std::string> missing;
  for (auto s : canonical_order(labels.size())) {
    if (s.size() >= min_size && !seen[s.bits()]) missing.push_back("\"" + subset_name(labels, s) + "\"");
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 8; ++i) list += (i ? ", " : "") + missing[i];
    if (missing.size() > 8) list += ", ... (" + std::to_string(missing.size()) + " in total)";
    throw Error(ErrorKind::kStructural, "missing subsets: " + list);
  }
  return table;
}

inline Json write_table(std::span<const Rat> table, const std::vector<std::string>& labels, std::size_t min_size) {
  Json out = Json::object();
  for (auto s : canonical_order(labels.size())) {
    if (s.size() >= min_size) out[subset_name(labels, s)] = table[s.bits()].to_string();
  }
  return out;
}

inline std::vector<std::string> read_labels(const Json& j) {
  if (!j.is_object() || !j.contains("points") || !j["points"].is_array()) {
    throw Error(ErrorKind::kParse, "expected an object with a \"points\" array");
  }
  std::vector<std::string> labels;
  for (const auto& p : j["points"]) {
    if (!p.is_string()) throw Error(ErrorKind::kParse, "point labels must be strings");
    labels.push_back(p.get<std::string>());
  }
  return labels;
}

}  // namespace detail

inline FiniteDiversity diversity_from_json(const Json& j, std::size_t cap = kDefaultGroundCap) {
  auto labels = detail::read_labels(j);
  if (labels.empty()) throw Error(ErrorKind::kStructural, "ground set must be nonempty");
  divlab::detail::check_labels(labels);
  divlab::detail::check_ground_size(labels.size(), cap);
  if (!j.contains("values")) throw Error(ErrorKind::kParse, "missing \"values\"");
  auto table = detail::read_table(j["values"], labels, 2);
  return FiniteDiversity(std::move(labels), std::move(table), cap);
}

inline Json to_json(const FiniteDiversity& d) {
  Json j;
  j["points"] = d.labels();
  j["values"] = detail::write_table(d.table(), d.labels(), 2);
  return j;
}

inline FiniteDiversity parse_diversity(const std::string& text, std::size_t cap = kDefaultGroundCap) {
  return diversity_from_json(parse_json(text), cap);
}

/// Canonical text: two-space indent, trailing newline.
inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline std::string serialize(const FiniteDiversity& d) { return dump(to_json(d)); }

inline Json to_json(const MetricSpace& m) {
  Json j;
  j["points"] = m.labels();
  Json rows = Json::array();
  for (std::size_t a = 0; a < m.size(); ++a) {
    Json row = Json::array();
    for (std::size_t b = 0; b < m.size(); ++b) row.push_back(m(a, b).to_string());
    rows.push_back(row);
  }
  j["dist"] = rows;
  return j;
}

/// Table over every subset of `base`, including the empty set.
inline std::vector<Rat> function_values(const Json& values, const FiniteDiversity& base) {
  return detail::read_table(values, base.labels(), 0);
}

inline Json function_values_json(std::span<const Rat> table, const FiniteDiversity& base) {
  return detail::write_table(table, base.labels(), 0);
}

/// Resolves "base" (inline object, or a path relative to `dir`).
inline FiniteDiversity function_base(const Json& j, const std::filesystem::path& dir, std::size_t cap) {
  if (!j.contains("base")) throw Error(ErrorKind::kParse, "missing \"base\"");
  const Json& b = j["base"];
  if (b.is_string()) {
    std::filesystem::path p = b.get<std::string>();
    if (p.is_relative()) p = dir / p;
    return parse_diversity(read_file(p), cap);
  }
  return diversity_from_json(b, cap);
}

struct FunctionFile {
  std::shared_ptr<const FiniteDiversity> base;
  std::vector<Rat> values;
  std::optional<SubsetKey> support;
};

/// Reads a function file without checking admissibility.
inline FunctionFile read_function(const std::string& text, const std::filesystem::path& dir = ".",
                                  std::size_t cap = kDefaultGroundCap) {
  const Json j = parse_json(text);
  FunctionFile out;
  out.base = share(function_base(j, dir, cap));
  if (!j.contains("values")) throw Error(ErrorKind::kParse, "missing \"values\"");
  out.values = function_values(j["values"], *out.base);
  if (j.contains("support")) {
    if (!j["support"].is_string()) throw Error(ErrorKind::kParse, "\"support\" must be a string");
    out.support = parse_subset(out.base->labels(), j["support"].get<std::string>());
  }
  return out;
}

inline Json to_json(const AdmissibleFunction& f, bool inline_base = true) {
  Json j;
  if (inline_base) j["base"] = to_json(f.base());
  j["values"] = function_values_json(f.table(), f.base());
  if (f.support()) j["support"] = subset_name(f.base().labels(), *f.support());
  return j;
}

/// Query against `host`; values range over the subsets of the frame.
inline RealizationQuery read_query(const std::string& text, std::shared_ptr<const FiniteDiversity> host) {
  const Json j = parse_json(text);
  if (!j.is_object() || !j.contains("frame") || !j["frame"].is_string()) {
    throw Error(ErrorKind::kParse, "query needs a \"frame\" string");
  }
  const SubsetKey frame = parse_subset(host->labels(), j["frame"].get<std::string>());
  if (frame.empty()) throw Error(ErrorKind::kEmptySubset, "query frame is empty");
  if (!j.contains("values")) throw Error(ErrorKind::kParse, "missing \"values\"");
  auto sub = share(restrict(*host, frame));
  std::vector<Rat> values = function_values(j["values"], *sub);
  const Rat eps = j.contains("epsilon") ? parse_rat(j["epsilon"], "epsilon") : Rat{0};
  RealizationQuery q{host, frame, AdmissibleFunction(sub, std::move(values)), eps};
  divlab::detail::check_query(q);
  return q;
}

inline Json to_json(const ValidationReport& r, const std::vector<std::string>& labels) {
  Json j;
  j["ok"] = r.ok();
  Json vs = Json::array();
  for (const auto& v : r.violations) {
    Json w = Json::array();
    for (auto s : v.witnesses) w.push_back(subset_name(labels, s));
    vs.push_back(Json{{"rule", v.rule}, {"witnesses", w}, {"lhs", v.lhs.to_string()}, {"rhs", v.rhs.to_string()}});
  }
  j["violations"] = vs;
  return j;
}

inline Json rat_json(const Rat& r) { return Json{{"value", r.to_string()}, {"decimal", r.to_double()}}; }

inline GrowthPolicy policy_from_json(const Json& j) {
  GrowthPolicy p;
  if (!j.is_object()) throw Error(ErrorKind::kParse, "policy must be an object");
  for (const auto& [key, v] : j.items()) {
    if (key == "rounds") p.rounds = v.get<std::size_t>();
    else if (key == "support_size_max") p.support_size_max = v.get<std::size_t>();
    else if (key == "value_granularity") p.value_granularity = parse_rat(v, key);
    else if (key == "diameter_cap") p.diameter_cap = parse_rat(v, key);
    else if (key == "generator_mix") {
      p.star_weight = v.value("star", 0.0);
      p.rejection_weight = v.value("rejection", 0.0);
    } else if (key == "max_retries") p.max_retries = v.get<std::size_t>();
    else if (key == "ground_cap") p.ground_cap = v.get<std::size_t>();
    else throw Error(ErrorKind::kParse, "unknown policy field \"" + key + "\"");
  }
  p.check();
  return p;
}

inline Json to_json(const GrowthPolicy& p) {
  return Json{{"rounds", p.rounds},
              {"support_size_max", p.support_size_max},
              {"value_granularity", p.value_granularity.to_string()},
              {"diameter_cap", p.diameter_cap.to_string()},
              {"generator_mix", Json{{"star", p.star_weight}, {"rejection", p.rejection_weight}}},
              {"max_retries", p.max_retries},
              {"ground_cap", p.ground_cap}};
}

/// The initial diversity is stored so replay can be checked on load.
inline Json to_json(const FiniteDiversity& initial, const TowerState& t, const GrowthPolicy& p) {
  Json hist = Json::array();
  FiniteDiversity d = initial;
  for (const auto& h : t.history) {
    hist.push_back(Json{{"round", h.round},
                        {"support", subset_name(d.labels(), h.support)},
                        {"label", h.label},
                        {"values", detail::write_table(h.values, d.labels(), 0)}});
    d = std::get<FiniteDiversity>(amalgamate(d, h.values, h.label, kMaxGroundSize));
  }
  return Json{{"seed", t.seed}, {"policy", to_json(p)}, {"initial", to_json(initial)}, {"history", hist},
              {"current", to_json(t.current)}};
}

struct TowerFile {
  FiniteDiversity initial;
  TowerState state;
  GrowthPolicy policy;
};

/// Reads a tower file and checks that replaying its history reproduces "current".
inline TowerFile tower_from_json(const Json& j) {
  GrowthPolicy policy = policy_from_json(j.at("policy"));
  FiniteDiversity initial = diversity_from_json(j.at("initial"), kMaxGroundSize);
  TowerState state;
  state.seed = j.at("seed").get<std::uint64_t>();
  FiniteDiversity d = initial;
  for (const auto& h : j.at("history")) {
    HistoryEntry e;
    e.round = h.at("round").get<std::size_t>();
    e.label = h.at("label").get<std::string>();
    e.support = parse_subset(d.labels(), h.at("support").get<std::string>());
    e.values = detail::read_table(h.at("values"), d.labels(), 0);
    auto next = amalgamate(d, e.values, e.label, kMaxGroundSize);
    if (!std::holds_alternative<FiniteDiversity>(next)) {
      throw Error(ErrorKind::kStructural, "history round " + std::to_string(e.round) + " duplicates a point");
    }
    d = std::get<FiniteDiversity>(std::move(next));
    state.history.push_back(std::move(e));
  }
  state.current = diversity_from_json(j.at("current"), kMaxGroundSize);
  if (!(state.current == d)) throw Error(ErrorKind::kStructural, "tower history does not replay to \"current\"");
  return {std::move(initial), std::move(state), policy};
}

}  // namespace divlab::io
