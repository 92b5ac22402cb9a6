// SPDX-FileCopyrightText: 2026 The kgmg authors
// SPDX-License-Identifier: Apache-2.0

#include "kgmg/report.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "kgmg/errors.hpp"
#include "kgmg/matrix.hpp"

namespace kgmg {

Check& StudyReport::check(std::string name, double value, std::string relation, double threshold,
                          double threshold_high, std::string note) {
  Check c;
  c.name = std::move(name);
  c.value = value;
  c.relation = std::move(relation);
  c.threshold = threshold;
  c.threshold_high = threshold_high;
  c.note = std::move(note);
  if (c.relation == "<=") {
    c.pass = value <= threshold;
  } else if (c.relation == ">=") {
    c.pass = value >= threshold;
  } else if (c.relation == "<") {
    c.pass = value < threshold;
  } else if (c.relation == "in") {
    c.pass = value >= threshold && value <= threshold_high;
  } else {
    fail(ErrorCode::Internal, "report: unknown relation " + c.relation);
  }
  checks.push_back(std::move(c));
  return checks.back();
}

void StudyReport::finalize() {
  pass = !checks.empty();
  for (const auto& c : checks) pass = pass && c.pass;
}

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

template <class T>
std::string cell(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_floating_point_v<T>) {
    return num(*v);
  } else {
    return std::to_string(*v);
  }
}

template <class T>
nlohmann::ordered_json jcell(const std::optional<T>& v) {
  if (!v) return nullptr;
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(*v)) return num(*v);
  }
  return *v;
}

}  // namespace

std::string to_csv(const StudyReport& report) {
  std::string out =
      "level,N,nu1,nu2,tau,contraction,iterations,flops,method,outside_theory,h,q,rho,kappa,theta,nnz,K,"
      "cg_iterations,l2_error,order\n";
  for (const auto& r : report.rows) {
    out += std::to_string(r.level) + "," + std::to_string(r.N) + "," + cell(r.nu1) + "," + cell(r.nu2) + "," +
           cell(r.tau) + "," + cell(r.contraction) + "," + cell(r.iterations) + "," + cell(r.flops) + "," +
           r.method + "," + (r.outside_theory ? "1" : "0") + "," + cell(r.h) + "," + cell(r.q) + "," +
           cell(r.rho) + "," + cell(r.kappa) + "," + cell(r.theta) + "," + cell(r.nnz) + "," +
           cell(r.truncation_K) + "," + cell(r.cg_iterations) + "," + cell(r.l2_error) + "," + cell(r.order) +
           "\n";
  }
  return out;
}

std::string to_json(const StudyReport& report, const StudyConfig* config) {
  nlohmann::ordered_json j;
  j["study"] = to_string(report.kind);
  j["pass"] = report.pass;
  j["nu_star"] = jcell(report.nu_star);
  j["K_star"] = jcell(report.k_star);
  auto& rows = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : report.rows) {
    nlohmann::ordered_json row;
    row["level"] = r.level;
    row["N"] = r.N;
    row["nu1"] = jcell(r.nu1);
    row["nu2"] = jcell(r.nu2);
    row["tau"] = jcell(r.tau);
    row["contraction"] = jcell(r.contraction);
    row["iterations"] = jcell(r.iterations);
    row["flops_per_iteration"] = jcell(r.flops);
    row["method"] = r.method;
    row["outside_theory"] = r.outside_theory;
    row["h"] = jcell(r.h);
    row["q"] = jcell(r.q);
    row["rho"] = jcell(r.rho);
    row["kappa"] = jcell(r.kappa);
    row["theta"] = jcell(r.theta);
    row["nnz"] = jcell(r.nnz);
    row["K"] = jcell(r.truncation_K);
    row["cg_iterations"] = jcell(r.cg_iterations);
    row["l2_error"] = jcell(r.l2_error);
    row["order"] = jcell(r.order);
    rows.push_back(std::move(row));
  }
  auto& checks = j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : report.checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["value"] = std::isfinite(c.value) ? nlohmann::ordered_json(c.value) : nlohmann::ordered_json(num(c.value));
    e["relation"] = c.relation;
    e["threshold"] = c.threshold;
    if (c.relation == "in") e["threshold_high"] = c.threshold_high;
    e["pass"] = c.pass;
    if (!c.note.empty()) e["note"] = c.note;
    checks.push_back(std::move(e));
  }
  j["notes"] = report.notes;
  j["wall_seconds"] = report.wall_seconds;
  if (config) j["config"] = nlohmann::ordered_json::parse(to_json(*config));
  return j.dump(2) + "\n";
}

WrittenFiles write_report(const StudyReport& report, const StudyConfig& config) {
  const std::string kind = to_string(report.kind);
  WrittenFiles files;
  std::filesystem::create_directories(config.output.dir);
  files.csv = config.output.dir / (config.output.csv.empty() ? kind + ".csv" : config.output.csv);
  files.json = config.output.dir / (config.output.json.empty() ? kind + ".json" : config.output.json);
  write_file_atomic(files.csv, to_csv(report));
  write_file_atomic(files.json, to_json(report, &config));
  return files;
}

}  // namespace kgmg
