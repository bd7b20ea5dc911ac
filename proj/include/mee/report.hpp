#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace mee {

enum class Check {
  none,         // informational, or no reference available
  sigma,        // |measured - reference| <= tolerance · std_error
  relative,     // |measured - reference| <= tolerance · |reference|
  upper_bound,  // measured <= reference + tolerance · std_error
  lower_bound,  // measured >= reference - tolerance · std_error
  factor,       // max(measured/reference, reference/measured) <= tolerance
};

const char* to_string(Check check);
Check check_from_string(const std::string& name);

struct Quantity {
  std::string name;
  double measured = 0.0;
  std::optional<double> std_error;
  std::optional<double> reference;  // absent means "no reference"
  Check check = Check::none;
  double tolerance = 0.0;
  std::optional<bool> pass;
  std::string note;

  bool operator==(const Quantity&) const = default;
};

/// Evaluates `check` and fills `pass`.
Quantity make_quantity(std::string name, double measured, std::optional<double> std_error,
                       std::optional<double> reference, Check check, double tolerance, std::string note = {});

struct Curve {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  bool operator==(const Curve&) const = default;
};

std::string to_csv(const Curve& curve);

struct ExperimentReport {
  std::string name;
  nlohmann::json inputs = nlohmann::json::object();
  std::vector<Quantity> quantities;
  std::map<std::string, Curve> curves;

  bool passed() const;
  const Quantity* find(const std::string& quantity) const;

  bool operator==(const ExperimentReport&) const = default;
};

nlohmann::json to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::json& j);

}  // namespace mee
