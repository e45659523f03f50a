#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bikegeo/curve.hpp"
#include "bikegeo/vendor_json.hpp"

namespace bikegeo {

// Parsed command-line run: round-trips losslessly through JSON so a run can be
// replayed from its config file.
struct RunConfig {
  std::string command;
  std::string curve = "circle";  // analytic id: circle | line | gamma_kn
  std::string curve_file;        // overrides `curve` when set
  int folds = 1;
  int k = 1;
  int n = 4;
  std::vector<double> ell;
  std::vector<double> eps;
  std::vector<double> lambda;
  int samples = 1024;
  double tol = 1e-6;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  std::string format = "json";  // json | csv

  void validate() const;  // throws std::invalid_argument
  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);

  // Front track named by the config (built or loaded).
  Curve front() const;
};

// Homogeneous result records -> deterministic table file. Columns are sorted;
// floats carry 17 significant digits; JSON and CSV round-trip bit-exactly.
void export_table(const std::vector<nlohmann::json>& records, const std::string& format,
                  const std::string& path);
std::vector<nlohmann::json> import_table_csv(const std::string& path);

}  // namespace bikegeo
