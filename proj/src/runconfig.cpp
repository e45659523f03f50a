#include "bikegeo/runconfig.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "bikegeo/io.hpp"

namespace bikegeo {

void RunConfig::validate() const {
  auto positive_finite = [](const std::vector<double>& xs, const char* name) {
    for (double x : xs)
      if (!(x > 0.0) || !std::isfinite(x))
        throw std::invalid_argument(std::string(name) + " values must be positive and finite");
  };
  positive_finite(ell, "--ell");
  positive_finite(eps, "--eps");
  positive_finite(lambda, "--lambda");
  if (samples < 8) throw std::invalid_argument("--samples must be at least 8");
  if (!(tol > 0.0) || !std::isfinite(tol)) throw std::invalid_argument("--tol must be positive");
  if (folds < 1) throw std::invalid_argument("--folds must be at least 1");
  if (k < 1 || n < 2) throw std::invalid_argument("--k/--n must be positive (n >= 2)");
  if (format != "json" && format != "csv")
    throw std::invalid_argument("--format must be json or csv");
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  j["curve"] = curve;
  j["curve_file"] = curve_file;
  j["folds"] = folds;
  j["k"] = k;
  j["n"] = n;
  j["ell"] = ell;
  j["eps"] = eps;
  j["lambda"] = lambda;
  j["samples"] = samples;
  j["tol"] = tol;
  j["out_dir"] = out_dir;
  j["seed"] = seed;
  j["format"] = format;
  return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig c;
  c.command = j.value("command", "");
  c.curve = j.value("curve", "circle");
  c.curve_file = j.value("curve_file", "");
  c.folds = j.value("folds", 1);
  c.k = j.value("k", 1);
  c.n = j.value("n", 4);
  c.ell = j.value("ell", std::vector<double>{});
  c.eps = j.value("eps", std::vector<double>{});
  c.lambda = j.value("lambda", std::vector<double>{});
  c.samples = j.value("samples", 1024);
  c.tol = j.value("tol", 1e-6);
  c.out_dir = j.value("out_dir", ".");
  c.seed = j.value("seed", std::uint64_t{1});
  c.format = j.value("format", "json");
  return c;
}

Curve RunConfig::front() const {
  if (!curve_file.empty()) return read_curve_csv(curve_file);
  CurveSpec spec;
  if (curve == "circle" || curve == "circle_multi") {
    spec.id = "circle_multi";
    spec.param["n_folds"] = folds;
  } else if (curve == "line") {
    spec.id = "line";
  } else if (curve == "gamma_kn") {
    spec.id = "gamma_kn";
    spec.param["k"] = k;
    spec.param["n"] = n;
  } else {
    throw std::invalid_argument("unknown --curve '" + curve + "'");
  }
  return build_curve(spec, samples);
}

void export_table(const std::vector<nlohmann::json>& records, const std::string& format,
                  const std::string& path) {
  std::set<std::string> cols;
  for (const auto& rec : records)
    for (auto it = rec.begin(); it != rec.end(); ++it) cols.insert(it.key());
  for (const auto& rec : records) {
    if (rec.size() != cols.size())
      throw std::invalid_argument("export_table: mixed record shapes");
    for (const auto& c : cols)
      if (!rec.contains(c)) throw std::invalid_argument("export_table: mixed record shapes");
  }

  if (format == "json") {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& rec : records) {
      nlohmann::json row;
      for (const auto& c : cols) row[c] = rec.at(c);
      out.push_back(row);
    }
    write_json(path, out);
    return;
  }
  if (format != "csv") throw std::invalid_argument("export_table: format must be json|csv");

  std::ostringstream out;
  bool first = true;
  for (const auto& c : cols) {
    out << (first ? "" : ",") << c;
    first = false;
  }
  out << "\n";
  for (const auto& rec : records) {
    first = true;
    for (const auto& c : cols) {
      out << (first ? "" : ",");
      first = false;
      const auto& v = rec.at(c);
      if (v.is_number_float())
        out << format_double(v.get<double>());
      else if (v.is_number_integer())
        out << v.get<long long>();
      else
        out << v.get<std::string>();
    }
    out << "\n";
  }
  atomic_write(path, out.str());
}

std::vector<nlohmann::json> import_table_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string header;
  std::getline(in, header);
  std::vector<std::string> cols;
  {
    std::stringstream ss(header);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
  }
  std::vector<nlohmann::json> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    nlohmann::json rec;
    size_t i = 0;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      double v = std::strtod(cell.c_str(), &end);
      if (end && *end == '\0')
        rec[cols.at(i)] = v;
      else
        rec[cols.at(i)] = cell;
      ++i;
    }
    out.push_back(rec);
  }
  return out;
}

}  // namespace bikegeo
