#include "mee/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "mee/error.hpp"

namespace mee {

const char* to_string(Check check) {
  switch (check) {
    case Check::none: return "none";
    case Check::sigma: return "sigma";
    case Check::relative: return "relative";
    case Check::upper_bound: return "upper_bound";
    case Check::lower_bound: return "lower_bound";
    case Check::factor: return "factor";
  }
  return "none";
}

Check check_from_string(const std::string& name) {
  for (Check c : {Check::none, Check::sigma, Check::relative, Check::upper_bound, Check::lower_bound,
                  Check::factor}) {
    if (name == to_string(c)) return c;
  }
  throw ParseError("unknown check kind", {{"check", name}});
}

Quantity make_quantity(std::string name, double measured, std::optional<double> std_error,
                       std::optional<double> reference, Check check, double tolerance, std::string note) {
  Quantity q{std::move(name), measured, std_error, reference, check, tolerance, std::nullopt, std::move(note)};
  if (check == Check::none || !reference) {
    return q;
  }
  const double ref = *reference;
  const double se = std_error.value_or(0.0);
  switch (check) {
    case Check::sigma: q.pass = std::abs(measured - ref) <= tolerance * se; break;
    case Check::relative: q.pass = std::abs(measured - ref) <= tolerance * std::abs(ref); break;
    case Check::upper_bound: q.pass = measured <= ref + tolerance * se; break;
    case Check::lower_bound: q.pass = measured >= ref - tolerance * se; break;
    case Check::factor:
      q.pass = measured > 0.0 && ref > 0.0 && std::max(measured / ref, ref / measured) <= tolerance;
      break;
    case Check::none: break;
  }
  return q;
}

std::string to_csv(const Curve& curve) {
  std::ostringstream out;
  for (std::size_t i = 0; i < curve.columns.size(); ++i) {
    out << (i ? "," : "") << curve.columns[i];
  }
  out << '\n';
  char buf[64];
  for (const auto& row : curve.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      out << (i ? "," : "") << buf;
    }
    out << '\n';
  }
  return out.str();
}

bool ExperimentReport::passed() const {
  for (const auto& q : quantities) {
    if (q.pass && !*q.pass) return false;
  }
  return true;
}

const Quantity* ExperimentReport::find(const std::string& quantity) const {
  for (const auto& q : quantities) {
    if (q.name == quantity) return &q;
  }
  return nullptr;
}

namespace {

nlohmann::json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<double> read_optional(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

nlohmann::json to_json(const ExperimentReport& report) {
  nlohmann::json quantities = nlohmann::json::array();
  for (const auto& q : report.quantities) {
    quantities.push_back({{"name", q.name},
                          {"measured", q.measured},
                          {"std_error", optional_number(q.std_error)},
                          {"reference", q.reference ? nlohmann::json(*q.reference) : nlohmann::json("no reference")},
                          {"check", to_string(q.check)},
                          {"tolerance", q.tolerance},
                          {"pass", q.pass ? nlohmann::json(*q.pass) : nlohmann::json(nullptr)},
                          {"note", q.note}});
  }
  nlohmann::json curves = nlohmann::json::object();
  for (const auto& [name, curve] : report.curves) {
    curves[name] = {{"columns", curve.columns}, {"rows", curve.rows}};
  }
  return {{"name", report.name},
          {"inputs", report.inputs},
          {"quantities", quantities},
          {"curves", curves},
          {"pass", report.passed()}};
}

ExperimentReport report_from_json(const nlohmann::json& j) {
  try {
    ExperimentReport r;
    r.name = j.at("name").get<std::string>();
    r.inputs = j.at("inputs");
    for (const auto& q : j.at("quantities")) {
      Quantity quantity;
      quantity.name = q.at("name").get<std::string>();
      quantity.measured = q.at("measured").get<double>();
      quantity.std_error = read_optional(q, "std_error");
      if (q.at("reference").is_number()) quantity.reference = q.at("reference").get<double>();
      quantity.check = check_from_string(q.at("check").get<std::string>());
      quantity.tolerance = q.at("tolerance").get<double>();
      if (!q.at("pass").is_null()) quantity.pass = q.at("pass").get<bool>();
      quantity.note = q.at("note").get<std::string>();
      r.quantities.push_back(std::move(quantity));
    }
    for (const auto& [name, c] : j.at("curves").items()) {
      r.curves[name] = Curve{c.at("columns").get<std::vector<std::string>>(),
                             c.at("rows").get<std::vector<std::vector<double>>>()};
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed experiment report: ") + e.what());
  }
}

}  // namespace mee
