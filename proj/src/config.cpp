// SPDX-FileCopyrightText: 2026 The kgmg authors
// SPDX-License-Identifier: Apache-2.0

#include "kgmg/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "kgmg/errors.hpp"

namespace kgmg {

using nlohmann::json;

const char* to_string(StudyKind kind) noexcept {
  switch (kind) {
    case StudyKind::Contraction: return "contraction";
    case StudyKind::Convergence: return "convergence";
    case StudyKind::Complexity: return "complexity";
    case StudyKind::Conditioning: return "conditioning";
  }
  return "unknown";
}

StudyKind study_kind_from_name(std::string_view name) {
  for (StudyKind k : {StudyKind::Contraction, StudyKind::Convergence, StudyKind::Complexity,
                      StudyKind::Conditioning}) {
    if (name == to_string(k)) return k;
  }
  fail(ErrorCode::InvalidArgument, "unknown study kind '" + std::string(name) +
                                       "' (expected contraction, convergence, complexity or conditioning)");
}

const char* to_string(RhsKind kind) noexcept {
  switch (kind) {
    case RhsKind::Zero: return "zero";
    case RhsKind::Manufactured: return "manufactured";
    case RhsKind::Random: return "random";
  }
  return "unknown";
}

namespace {

// JSON pointer of every object key -> line of the key.
using LineMap = std::map<std::string, int>;

LineMap key_lines(std::string_view text) {
  LineMap lines;
  std::vector<std::string> paths{""};
  std::vector<bool> object{false};
  std::string last_key;
  int line = 1;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
    } else if (c == '"') {
      std::string s;
      for (++i; i < text.size() && text[i] != '"'; ++i) {
        if (text[i] == '\\' && i + 1 < text.size()) ++i;
        s.push_back(text[i]);
      }
      std::size_t k = i + 1;
      while (k < text.size() && (text[k] == ' ' || text[k] == '\t' || text[k] == '\r' || text[k] == '\n')) ++k;
      if (k < text.size() && text[k] == ':' && object.back()) {
        last_key = paths.back() + "/" + s;
        lines.emplace(last_key, line);
      }
    } else if (c == '{' || c == '[') {
      paths.push_back(object.back() ? last_key : paths.back());
      object.push_back(c == '{');
    } else if ((c == '}' || c == ']') && paths.size() > 1) {
      paths.pop_back();
      object.pop_back();
    }
  }
  return lines;
}

int line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

class Reader {
 public:
  Reader(const json& node, std::string path, const LineMap& lines, std::string_view source)
      : node_(node), path_(std::move(path)), lines_(lines), source_(source) {}

  [[noreturn]] void error(const std::string& key, const std::string& message) const {
    const std::string where = key.empty() ? path_ : path_ + "/" + key;
    auto it = lines_.find(where);
    int line = it != lines_.end() ? it->second : 1;
    if (it == lines_.end() && !path_.empty()) {
      auto parent = lines_.find(path_);
      if (parent != lines_.end()) line = parent->second;
    }
    fail(ErrorCode::Parse, std::string(source_) + ":" + std::to_string(line) + ": " +
                               (where.empty() ? "document" : "'" + where.substr(1) + "'") + ": " + message);
  }

  void allow(std::initializer_list<const char*> keys) const {
    if (!node_.is_object()) error("", "expected an object");
    const std::set<std::string> known(keys.begin(), keys.end());
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!known.count(it.key())) {
        std::string list;
        for (const auto& k : known) list += (list.empty() ? "" : ", ") + k;
        error(it.key(), "unknown key (allowed: " + list + ")");
      }
    }
  }

  bool has(const char* key) const { return node_.contains(key) && !node_.at(key).is_null(); }

  Reader child(const char* key) const { return Reader(node_.at(key), path_ + "/" + key, lines_, source_); }

  double number(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_number()) error(key, "expected a number");
    return v.get<double>();
  }

  long long integer(const char* key, long long fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned()) error(key, "expected an integer");
    return v.get<long long>();
  }

  bool boolean(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_boolean()) error(key, "expected true or false");
    return v.get<bool>();
  }

  std::string string(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_string()) error(key, "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const char* key, std::vector<double> fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_array()) error(key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) error(key, "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  template <class F>
  auto guarded(const char* key, F&& f) const {
    try {
      return f();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Parse) throw;
      error(key, e.what());
    }
  }

 private:
  const json& node_;
  std::string path_;
  const LineMap& lines_;
  std::string_view source_;
};

int checked_int(const Reader& r, const char* key, long long fallback, long long lo, long long hi) {
  const long long v = r.integer(key, fallback);
  if (v < lo || v > hi) {
    r.error(key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return static_cast<int>(v);
}

}  // namespace

StudyConfig parse_study_config(std::string_view text, std::string_view source) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    fail(ErrorCode::Parse, std::string(source) + ":" + std::to_string(line_of_offset(text, e.byte)) +
                               ": malformed JSON (" + e.what() + ")");
  }
  const LineMap lines = key_lines(text);
  const Reader root(doc, "", lines, source);
  root.allow({"manifold", "m", "operator", "hierarchy", "mg", "study", "rhs", "thresholds", "output",
              "basis_cache", "seed"});

  StudyConfig cfg;
  ProblemSpec& p = cfg.problem;
  p.manifold = root.guarded("manifold", [&] { return Manifold::from_name(root.string("manifold", "torus")); });
  p.m = checked_int(root, "m", 3, 3, 6);
  p.base = p.manifold.is_torus() ? 4 : 0;

  if (root.has("operator")) {
    const Reader op = root.child("operator");
    op.allow({"c", "advection", "c0"});
    p.op.c = op.number("c", p.op.c);
    p.op.c0 = op.number("c0", p.op.c0);
    if (op.has("advection")) {
      const auto a = op.numbers("advection", {});
      if (a.size() != 2) op.error("advection", "expected two components");
      p.op.advection = std::array<double, 2>{a[0], a[1]};
    }
    op.guarded("c", [&] {
      p.op.validate(p.manifold);
      return 0;
    });
  }
  if (root.has("hierarchy")) {
    const Reader h = root.child("hierarchy");
    h.allow({"levels", "base", "rho_max"});
    p.levels = checked_int(h, "levels", p.levels, 0, 8);
    p.base = checked_int(h, "base", p.base, p.manifold.is_torus() ? 2 : 0, p.manifold.is_torus() ? 256 : 6);
    p.rho_max = h.number("rho_max", p.rho_max);
    if (!(p.rho_max >= 1.0)) h.error("rho_max", "must be >= 1");
  }
  if (root.has("mg")) {
    const Reader mg = root.child("mg");
    mg.allow({"tau", "nu1", "nu2", "eps_max", "max_iters", "gamma_target", "truncation", "two_grid"});
    MgConfig& m = cfg.mg;
    m.tau = checked_int(mg, "tau", m.tau, 1, 8);
    m.nu1 = checked_int(mg, "nu1", m.nu1, 1, 1024);
    m.nu2 = checked_int(mg, "nu2", m.nu2, 0, 1024);
    m.eps_max = mg.number("eps_max", m.eps_max);
    m.max_iters = checked_int(mg, "max_iters", m.max_iters, 0, 100000);
    m.gamma_target = mg.number("gamma_target", m.gamma_target);
    if (mg.has("truncation")) m.truncation = mg.number("truncation", 0.0);
    m.two_grid = mg.boolean("two_grid", m.two_grid);
    mg.guarded("gamma_target", [&] {
      m.validate();
      return 0;
    });
  }
  cfg.kind = root.guarded("study", [&] { return study_kind_from_name(root.string("study", "contraction")); });
  if (root.has("rhs")) {
    const std::string rhs = root.string("rhs", "manufactured");
    if (rhs == "zero") {
      cfg.rhs = RhsKind::Zero;
    } else if (rhs == "manufactured") {
      cfg.rhs = RhsKind::Manufactured;
    } else if (rhs == "random") {
      cfg.rhs = RhsKind::Random;
    } else {
      root.error("rhs", "expected zero, manufactured or random");
    }
  }
  if (root.has("thresholds")) {
    const Reader t = root.child("thresholds");
    t.allow({"nu_sweep", "spread_max", "explicit_max_n", "order_min", "k_sweep", "iteration_spread_max",
             "cg_growth_min", "complexity_band", "complexity_min_level", "kappa_ratio", "riesz_band",
             "diag_ratio_max", "decay_r2_min", "norm_band", "smoothing_band", "smoothing_decay_max", "quadrature_refine"});
    Thresholds& th = cfg.thresholds;
    if (t.has("nu_sweep")) {
      th.nu_sweep.clear();
      for (double v : t.numbers("nu_sweep", {})) {
        if (v < 1 || v != static_cast<int>(v)) t.error("nu_sweep", "entries must be positive integers");
        th.nu_sweep.push_back(static_cast<int>(v));
      }
      if (th.nu_sweep.empty()) t.error("nu_sweep", "must not be empty");
    }
    th.spread_max = t.number("spread_max", th.spread_max);
    th.explicit_max_n = static_cast<std::size_t>(
        checked_int(t, "explicit_max_n", static_cast<long long>(th.explicit_max_n), 0,
                    static_cast<long long>(kDenseIterationGuard)));
    th.order_min = t.number("order_min", th.order_min);
    th.k_sweep = t.numbers("k_sweep", th.k_sweep);
    for (double k : th.k_sweep) {
      if (!(k > 0.0)) t.error("k_sweep", "entries must be positive");
    }
    th.iteration_spread_max = checked_int(t, "iteration_spread_max", th.iteration_spread_max, 0, 1000);
    th.cg_growth_min = t.number("cg_growth_min", th.cg_growth_min);
    th.complexity_band = t.number("complexity_band", th.complexity_band);
    th.complexity_min_level = checked_int(t, "complexity_min_level", th.complexity_min_level, 0, 8);
    if (t.has("kappa_ratio")) {
      const auto k = t.numbers("kappa_ratio", {});
      if (k.size() != 2 || !(k[0] <= k[1])) t.error("kappa_ratio", "expected [low, high]");
      th.kappa_ratio = {k[0], k[1]};
    }
    th.riesz_band = t.number("riesz_band", th.riesz_band);
    th.diag_ratio_max = t.number("diag_ratio_max", th.diag_ratio_max);
    th.decay_r2_min = t.number("decay_r2_min", th.decay_r2_min);
    th.norm_band = t.number("norm_band", th.norm_band);
    th.smoothing_band = t.number("smoothing_band", th.smoothing_band);
    th.smoothing_decay_max = t.number("smoothing_decay_max", th.smoothing_decay_max);
    th.quadrature_refine = checked_int(t, "quadrature_refine", th.quadrature_refine, 0, 3);
  }
  if (root.has("output")) {
    const Reader o = root.child("output");
    o.allow({"dir", "csv", "json"});
    cfg.output.dir = o.string("dir", cfg.output.dir.string());
    cfg.output.csv = o.string("csv", cfg.output.csv);
    cfg.output.json = o.string("json", cfg.output.json);
  }
  if (root.has("basis_cache")) p.basis_cache = root.string("basis_cache", "");
  {
    const long long seed = root.integer("seed", 1);
    if (seed < 0) root.error("seed", "must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(seed);
  }
  return cfg;
}

StudyConfig load_study_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_study_config(ss.str(), path.string());
}

std::string to_json(const StudyConfig& cfg) {
  const ProblemSpec& p = cfg.problem;
  const Thresholds& t = cfg.thresholds;
  json j;
  j["manifold"] = std::string(p.manifold.name());
  j["m"] = p.m;
  j["operator"] = {{"c", p.op.c}, {"c0", p.op.c0}};
  j["operator"]["advection"] = p.op.advection ? json(*p.op.advection) : json(nullptr);
  j["hierarchy"] = {{"levels", p.levels}, {"base", p.base}, {"rho_max", p.rho_max}};
  j["mg"] = {{"tau", cfg.mg.tau},
             {"nu1", cfg.mg.nu1},
             {"nu2", cfg.mg.nu2},
             {"eps_max", cfg.mg.eps_max},
             {"max_iters", cfg.mg.max_iters},
             {"gamma_target", cfg.mg.gamma_target},
             {"two_grid", cfg.mg.two_grid}};
  j["mg"]["truncation"] = cfg.mg.truncation ? json(*cfg.mg.truncation) : json(nullptr);
  j["study"] = to_string(cfg.kind);
  if (cfg.rhs) {
    j["rhs"] = to_string(*cfg.rhs);
  } else {
    j["rhs"] = nullptr;
  }
  j["thresholds"] = {{"nu_sweep", t.nu_sweep},
                     {"spread_max", t.spread_max},
                     {"explicit_max_n", t.explicit_max_n},
                     {"order_min", t.order_min},
                     {"k_sweep", t.k_sweep},
                     {"iteration_spread_max", t.iteration_spread_max},
                     {"cg_growth_min", t.cg_growth_min},
                     {"complexity_band", t.complexity_band},
                     {"complexity_min_level", t.complexity_min_level},
                     {"kappa_ratio", t.kappa_ratio},
                     {"riesz_band", t.riesz_band},
                     {"diag_ratio_max", t.diag_ratio_max},
                     {"decay_r2_min", t.decay_r2_min},
                     {"norm_band", t.norm_band},
                     {"smoothing_band", t.smoothing_band},
                     {"smoothing_decay_max", t.smoothing_decay_max},
                     {"quadrature_refine", t.quadrature_refine}};
  j["output"] = {{"dir", cfg.output.dir.string()}, {"csv", cfg.output.csv}, {"json", cfg.output.json}};
  j["basis_cache"] = p.basis_cache ? json(p.basis_cache->string()) : json(nullptr);
  j["seed"] = cfg.seed;
  return j.dump(2);
}

}  // namespace kgmg
