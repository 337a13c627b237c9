// divlab: command-line front end. Reports go to stdout as JSON, a one-line
// summary goes to stderr. Exit 0 = ok/found, 1 = fail/none-found, 2 = usage,
// parse or input error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "divlab/divlab.hpp"

namespace fs = std::filesystem;
using divlab::io::Json;

namespace {

constexpr int kOk = 0;
constexpr int kNegative = 1;
constexpr int kUsage = 2;

struct Globals {
  bool oracle = false;
  std::uint64_t seed = 0;
  std::size_t cap = divlab::kDefaultGroundCap;
};

int emit(const Json& report, bool positive, const std::string& summary) {
  std::cout << divlab::io::dump(report);
  std::cerr << summary << "\n";
  return positive ? kOk : kNegative;
}

Json verdict(const char* v) { return Json{{"verdict", v}}; }

divlab::FiniteDiversity load_diversity(const std::string& path, const Globals& g) {
  return divlab::io::parse_diversity(divlab::io::read_file(path), g.cap);
}

divlab::io::FunctionFile load_function(const std::string& path, const Globals& g) {
  return divlab::io::read_function(divlab::io::read_file(path), fs::path(path).parent_path(), g.cap);
}

divlab::SubsetKey subset_arg(const divlab::FiniteDiversity& d, const std::string& text) {
  return divlab::io::parse_subset(d.labels(), text);
}

Json map_json(const divlab::PartialIsomorphism& phi) {
  Json m = Json::object();
  auto pairs = phi.pairs();
  std::sort(pairs.begin(), pairs.end());
  for (const auto& [x, y] : pairs) m[phi.source().label(x)] = phi.target().label(y);
  return m;
}

// ---- core and bounds ------------------------------------------------------

int cmd_validate(const std::string& input, const Globals& g) {
  const auto d = load_diversity(input, g);
  if (g.oracle) {
    const bool ok = divlab::oracle::is_diversity(d);
    Json r = verdict(ok ? "ok" : "fail");
    r["method"] = "full-enumeration";
    return emit(r, ok, ok ? "valid diversity" : "not a diversity");
  }
  const auto rep = divlab::validate(d);
  Json r = verdict(rep.ok() ? "ok" : "fail");
  r["violations"] = divlab::io::to_json(rep, d.labels())["violations"];
  return emit(r, rep.ok(),
              rep.ok() ? "valid diversity" : std::to_string(rep.violations.size()) + " violation(s)");
}

int cmd_metric(const std::string& input, const Globals& g) {
  const auto d = load_diversity(input, g);
  return emit(divlab::io::to_json(divlab::induced_metric(d)), true, "induced metric on " + std::to_string(d.size()) +
                                                                        " points");
}

int cmd_bounds(const std::string& input, const std::string& which, const Globals& g) {
  const auto d = load_diversity(input, g);
  const auto m = divlab::induced_metric(d);
  divlab::SteinerConfig cfg;
  if (g.oracle) cfg.method = divlab::SteinerMethod::kExhaustive;
  if (which == "diam") return emit(divlab::io::to_json(divlab::diameter_diversity(m)), true, "diameter diversity");
  if (which == "steiner") return emit(divlab::io::to_json(divlab::steiner_diversity(m, cfg)), true, "Steiner diversity");
  const auto rep = divlab::sandwich_check(d, cfg);
  Json r = verdict(rep.ok() ? "ok" : "fail");
  r["violations"] = divlab::io::to_json(rep, d.labels())["violations"];
  return emit(r, rep.ok(), rep.ok() ? "diameter <= delta <= Steiner holds" : "sandwich violated");
}

// ---- extension ------------------------------------------------------------

int cmd_admissible(const std::string& input, const Globals& g) {
  const auto ff = load_function(input, g);
  const bool ok = g.oracle ? divlab::oracle::is_admissible(*ff.base, ff.values)
                           : divlab::is_admissible(*ff.base, ff.values).ok();
  Json r = verdict(ok ? "ok" : "fail");
  if (!g.oracle) {
    r["violations"] = divlab::io::to_json(divlab::is_admissible(*ff.base, ff.values), ff.base->labels())["violations"];
  }
  if (ok && ff.support) {
    const divlab::AdmissibleFunction f(ff.base, ff.values);
    const bool has = divlab::has_support(*ff.base, f, *ff.support);
    r["support"] = Json{{"claimed", divlab::io::subset_name(ff.base->labels(), *ff.support)}, {"holds", has}};
    if (!has) {
      r["verdict"] = "fail";
      return emit(r, false, "admissible, but the declared support does not hold");
    }
  }
  return emit(r, ok, ok ? "admissible" : "not admissible");
}

std::vector<divlab::AdmissibleFunction> load_family(const std::vector<std::string>& paths, const Globals& g) {
  std::vector<divlab::AdmissibleFunction> family;
  for (const auto& p : paths) {
    const auto ff = load_function(p, g);
    // Members naming the same base file share it, as the evaluator requires.
    auto base = family.empty() || !(family.front().base() == *ff.base) ? ff.base : family.front().base_ptr();
    family.emplace_back(base, ff.values, ff.support);
  }
  return family;
}

int cmd_hatdelta(const std::vector<std::string>& inputs, const Globals& g) {
  const auto family = load_family(inputs, g);
  const divlab::Rat v = g.oracle ? divlab::oracle::hat_delta(family) : divlab::hat_delta(family);
  Json r = verdict("ok");
  r["value"] = v.to_string();
  r["decimal"] = v.to_double();
  return emit(r, true, "hat delta = " + v.to_string());
}

int cmd_extend(const std::string& input, const std::string& support, const Globals& g) {
  const auto ff = load_function(input, g);
  const divlab::AdmissibleFunction f(ff.base, ff.values);
  const divlab::SubsetKey s = subset_arg(*ff.base, support);
  const auto local = divlab::restrict_function(f, s);
  if (g.oracle) {
    auto values = divlab::oracle::extend_from_support(*ff.base, s, local);
    return emit(divlab::io::to_json(divlab::AdmissibleFunction(ff.base, std::move(values), s)), true,
                "maximal extension from {" + support + "} (oracle)");
  }
  return emit(divlab::io::to_json(divlab::extend_from_support(*ff.base, s, local)), true,
              "maximal extension from {" + support + "}");
}

int cmd_support_check(const std::string& input, const std::string& support, const Globals& g) {
  const auto ff = load_function(input, g);
  const divlab::AdmissibleFunction f(ff.base, ff.values);
  const divlab::SubsetKey s = subset_arg(*ff.base, support);
  const bool has = divlab::has_support(*ff.base, f, s);
  return emit(verdict(has ? "ok" : "fail"), has, has ? "support holds" : "not a support");
}

int cmd_amalgamate(const std::string& input, const std::string& label, const Globals& g) {
  const auto ff = load_function(input, g);
  const divlab::AdmissibleFunction f(ff.base, ff.values);
  const auto res = divlab::amalgamate(f, label, g.cap);
  if (const auto* id = std::get_if<divlab::Identified>(&res)) {
    Json r = verdict("found");
    r["identified"] = ff.base->label(id->point);
    return emit(r, true, "f is realised by existing point " + ff.base->label(id->point));
  }
  return emit(divlab::io::to_json(std::get<divlab::FiniteDiversity>(res)), true, "adjoined point " + label);
}

// ---- homogeneity ----------------------------------------------------------

int cmd_realize(const std::string& host_path, const std::string& query_path, const Globals& g) {
  auto host = divlab::share(load_diversity(host_path, g));
  const auto q = divlab::io::read_query(divlab::io::read_file(query_path), host);
  const auto x = divlab::realize(q);
  if (!x) {
    Json r = verdict("none-found");
    const divlab::Rat deficit = divlab::extension_deficit(*host, std::span(&q, 1));
    r["best_error"] = deficit.to_string();
    return emit(r, false, "no host point realises the query");
  }
  Json r = verdict("found");
  r["point"] = host->label(*x);
  r["error"] = divlab::realization_error(*host, q.frame, q.f, *x).to_string();
  return emit(r, true, "realised by " + host->label(*x));
}

int cmd_iso(const std::string& a_path, const std::string& b_path, bool embed, const Globals& g) {
  const auto a = load_diversity(a_path, g);
  const auto b = load_diversity(b_path, g);
  const auto phi = embed ? divlab::find_embedding(a, b) : divlab::find_isomorphism(a, b, {!g.oracle});
  if (!phi) return emit(verdict("none-found"), false, embed ? "no embedding" : "not isomorphic");
  if (!phi->holds()) throw divlab::Error(divlab::ErrorKind::kInvalidPartialIso, "search returned a bad map");
  Json r = verdict("found");
  r["map"] = map_json(*phi);
  return emit(r, true, embed ? "embedding found" : "isomorphic");
}

std::vector<std::size_t> gamma_arg(const divlab::FiniteDiversity& host, const std::string& text) {
  std::vector<std::size_t> out;
  std::istringstream in(text);
  for (std::string tok; in >> tok;) {
    const auto i = host.index_of(tok);
    if (!i) throw divlab::Error(divlab::ErrorKind::kStructural, "unknown label \"" + tok + "\" in --gamma");
    out.push_back(*i);
  }
  return out;
}

int cmd_perturb(const std::string& host_path, const std::string& query_path, const std::string& gamma_text,
                const std::optional<std::string>& eps0_text, const std::optional<std::string>& eps_text,
                const Globals& g) {
  auto host = divlab::share(load_diversity(host_path, g));
  const auto q = divlab::io::read_query(divlab::io::read_file(query_path), host);
  const auto gamma = gamma_arg(*host, gamma_text);
  divlab::Rat eps0;
  if (eps0_text) {
    eps0 = divlab::Rat::parse(*eps0_text);
  } else if (eps_text) {
    eps0 = divlab::perturbation_step(divlab::Rat::parse(*eps_text), q.frame.size());
  } else {
    throw divlab::Error(divlab::ErrorKind::kInvalidArgument, "one of --eps0 or --epsilon is required");
  }
  const auto out = divlab::perturb_to_admissible(*host, q.frame, q.f, gamma, eps0);
  Json r = divlab::io::to_json(out);
  r["eps0"] = eps0.to_string();
  return emit(r, true, "perturbed onto {" + gamma_text + "}");
}

// ---- tower ----------------------------------------------------------------

int cmd_grow(std::optional<std::size_t> rounds, const std::optional<std::string>& policy_path,
             const std::optional<std::string>& initial_path, const std::optional<std::string>& out, const Globals& g) {
  divlab::GrowthPolicy policy;
  if (policy_path) policy = divlab::io::policy_from_json(divlab::io::parse_json(divlab::io::read_file(*policy_path)));
  if (rounds) policy.rounds = *rounds;
  divlab::TowerState state;
  state.seed = g.seed;
  if (initial_path) state.current = load_diversity(*initial_path, g);
  const divlab::FiniteDiversity initial = state.current;
  divlab::Rng rng(g.seed);
  state = divlab::grow(std::move(state), policy, rng);
  const Json tower = divlab::io::to_json(initial, state, policy);
  const std::string summary =
      "grew " + std::to_string(policy.rounds) + " round(s) to " + std::to_string(state.current.size()) + " points";
  if (out) {
    std::ofstream f(*out, std::ios::binary);
    if (!f) throw divlab::Error(divlab::ErrorKind::kInvalidArgument, "cannot write " + *out);
    f << divlab::io::dump(tower);
    Json r = verdict("ok");
    r["out"] = *out;
    r["points"] = state.current.size();
    return emit(r, true, summary);
  }
  return emit(tower, true, summary);
}

int cmd_deficit(const std::string& tower_path, std::size_t battery_size, const std::string& kind,
                std::size_t frame_max, const std::optional<std::string>& csv_path, const Globals& g) {
  const auto tf = divlab::io::tower_from_json(divlab::io::parse_json(divlab::io::read_file(tower_path)));
  divlab::BatterySpec spec;
  spec.size = battery_size;
  spec.kind = kind == "kappa" ? divlab::BatteryKind::kKappa : divlab::BatteryKind::kRandom;
  spec.frame_size_max = frame_max;
  const auto rows = divlab::history_deficits(tf.initial, tf.state.history, tf.policy, spec, g.seed);
  Json trace = Json::array();
  for (const auto& row : rows) {
    trace.push_back(Json{{"round", row.round}, {"deficit", row.deficit.to_string()}, {"decimal", row.deficit.to_double()}});
  }
  if (csv_path) {
    std::ofstream f(*csv_path, std::ios::binary);
    if (!f) throw divlab::Error(divlab::ErrorKind::kInvalidArgument, "cannot write " + *csv_path);
    f << "round,deficit,decimal\n";
    for (const auto& row : rows) f << row.round << "," << row.deficit.to_string() << "," << row.deficit.to_double() << "\n";
  }
  Json r = verdict("ok");
  r["trace"] = trace;
  return emit(r, true, "final deficit " + rows.back().deficit.to_string());
}

int exit_code_for(divlab::ErrorKind k) {
  using divlab::ErrorKind;
  switch (k) {
    case ErrorKind::kNotAdmissible:
    case ErrorKind::kDistortionTooLarge:
    case ErrorKind::kInvalidPartialIso:
    case ErrorKind::kInfeasibleInterval:
    case ErrorKind::kGenerationExhausted:
    case ErrorKind::kMixedBase:
      return kNegative;
    default:
      return kUsage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact computations on finite diversities."};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_flag("--oracle", g.oracle, "Use brute-force evaluators where available");
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--cap", g.cap, "Ground-set size cap")->check(CLI::Range(std::size_t{1}, divlab::kMaxGroundSize))
      ->capture_default_str();

  std::string input, which = "sandwich", support, label, host, query, gamma, second, kind = "random";
  std::vector<std::string> inputs;
  std::optional<std::string> eps0, eps, policy, initial, out, tower, csv;
  std::optional<std::size_t> rounds;
  std::size_t battery = 50, frame_max = 3;

  auto* validate = app.add_subcommand("validate", "Check the diversity axioms");
  validate->add_option("input,--input", input, "Diversity JSON")->required();
  auto* metric = app.add_subcommand("metric", "Print the induced metric");
  metric->add_option("input,--input", input, "Diversity JSON")->required();
  auto* bounds = app.add_subcommand("bounds", "Diameter and Steiner diversities of the induced metric");
  bounds->add_option("input,--input", input, "Diversity JSON")->required();
  bounds->add_option("--which", which, "diam, steiner or sandwich")
      ->check(CLI::IsMember({"diam", "steiner", "sandwich"}))
      ->capture_default_str();
  auto* adm = app.add_subcommand("admissible-check", "Check a function file for admissibility");
  adm->add_option("input,--input", input, "Function JSON")->required();
  auto* hat = app.add_subcommand("hatdelta", "Extension diversity of a family of functions");
  hat->add_option("--inputs", inputs, "Function JSON files over one base")->required();
  auto* ext = app.add_subcommand("extend", "Maximal extension of f restricted to a support");
  ext->add_option("input,--input", input, "Function JSON")->required();
  ext->add_option("--support", support, "Space-separated labels")->required();
  auto* sup = app.add_subcommand("support-check", "Check whether a subset is a support of f");
  sup->add_option("input,--input", input, "Function JSON")->required();
  sup->add_option("--support", support, "Space-separated labels")->required();
  auto* amal = app.add_subcommand("amalgamate", "Adjoin the point realising f");
  amal->add_option("input,--input", input, "Function JSON")->required();
  amal->add_option("--label", label, "Label of the new point")->required();
  auto* real = app.add_subcommand("realize", "Find a host point realising a query");
  real->add_option("--host", host, "Host diversity JSON")->required();
  real->add_option("--query", query, "Query JSON")->required();
  auto* iso = app.add_subcommand("iso", "Isomorphism search");
  iso->add_option("a", input, "Diversity JSON")->required();
  iso->add_option("b", second, "Diversity JSON")->required();
  auto* emb = app.add_subcommand("embed", "Embedding search");
  emb->add_option("small", input, "Diversity JSON")->required();
  emb->add_option("big", second, "Diversity JSON")->required();
  auto* pert = app.add_subcommand("perturb", "Perturb a query function onto an image frame");
  pert->add_option("--host", host, "Host diversity JSON")->required();
  pert->add_option("--query", query, "Query JSON giving the frame and f")->required();
  pert->add_option("--gamma", gamma, "Image labels, one per frame point in frame order")->required();
  auto* eps0_opt = pert->add_option("--eps0", eps0, "Perturbation step");
  pert->add_option("--epsilon", eps, "Target error; the step is derived from it")->excludes(eps0_opt);
  auto* grow = app.add_subcommand("grow", "Grow a tower of one-point extensions");
  grow->add_option("--rounds", rounds, "Rounds (overrides the policy)");
  grow->add_option("--policy", policy, "Growth policy JSON");
  grow->add_option("--initial", initial, "Initial diversity JSON (default: one point x0)");
  grow->add_option("--out", out, "Write the tower JSON here instead of stdout");
  auto* def = app.add_subcommand("deficit", "Extension deficit after each round of a tower");
  def->add_option("--tower", tower, "Tower JSON")->required();
  def->add_option("--battery", battery, "Queries per round")->capture_default_str();
  def->add_option("--kind", kind, "random or kappa")->check(CLI::IsMember({"random", "kappa"}))->capture_default_str();
  def->add_option("--frame-max", frame_max, "Largest query frame")->capture_default_str();
  def->add_option("--csv", csv, "Write round,deficit,decimal CSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (validate->parsed()) return cmd_validate(input, g);
    if (metric->parsed()) return cmd_metric(input, g);
    if (bounds->parsed()) return cmd_bounds(input, which, g);
    if (adm->parsed()) return cmd_admissible(input, g);
    if (hat->parsed()) return cmd_hatdelta(inputs, g);
    if (ext->parsed()) return cmd_extend(input, support, g);
    if (sup->parsed()) return cmd_support_check(input, support, g);
    if (amal->parsed()) return cmd_amalgamate(input, label, g);
    if (real->parsed()) return cmd_realize(host, query, g);
    if (iso->parsed()) return cmd_iso(input, second, false, g);
    if (emb->parsed()) return cmd_iso(input, second, true, g);
    if (pert->parsed()) return cmd_perturb(host, query, gamma, eps0, eps, g);
    if (grow->parsed()) return cmd_grow(rounds, policy, initial, out, g);
    if (def->parsed()) return cmd_deficit(*tower, battery, kind, frame_max, csv, g);
  } catch (const divlab::Error& e) {
    std::cout << divlab::io::dump(Json{{"verdict", "fail"},
                                       {"error", Json{{"kind", divlab::to_string(e.kind())}, {"message", e.what()}}}});
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const Json::exception& e) {
    std::cout << divlab::io::dump(Json{{"verdict", "fail"}, {"error", Json{{"kind", "ParseError"}, {"message", e.what()}}}});
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
