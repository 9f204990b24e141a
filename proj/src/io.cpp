#include "spaceopt/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "spaceopt/errors.hpp"

namespace spaceopt {

namespace {

std::string path_str(const std::filesystem::path& p) { return p.string(); }

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

SearchSpace space_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("dims") || !j["dims"].is_array()) {
    throw ValidationError("space document must be an object with a 'dims' array");
  }
  std::vector<ParamDomain> dims;
  for (const auto& dj : j["dims"]) {
    if (!dj.is_object()) throw ValidationError("each dim must be an object");
    for (const char* key : {"name", "min", "max"}) {
      if (!dj.contains(key)) {
        throw ValidationError(std::string("dim missing required key '") + key + "'");
      }
    }
    ParamDomain d;
    d.name = dj["name"].get<std::string>();
    d.scale = dj.contains("scale") ? parse_scale(dj["scale"].get<std::string>())
                                   : Scale::kLinear;
    d.lower = dj["min"].get<double>();
    d.upper = dj["max"].get<double>();
    if (dj.contains("grid")) {
      std::size_t dropped = 0;
      for (const auto& g : dj["grid"]) {
        const double v = g.get<double>();
        if (v >= d.lower && v <= d.upper) {
          d.grid.push_back(v);
        } else {
          ++dropped;
        }
      }
      if (dropped > 0) {
        std::cerr << "spaceopt: note: dimension '" << d.name << "': dropped "
                  << dropped << " grid value(s) outside [" << d.lower << ", "
                  << d.upper << "]\n";
      }
    }
    d.validate();
    dims.push_back(std::move(d));
  }
  return SearchSpace(std::move(dims));
}

Json space_to_json(const SearchSpace& space) {
  Json j;
  j["dims"] = Json::array();
  for (const auto& d : space.dims()) {
    Json dj;
    dj["name"] = d.name;
    dj["scale"] = std::string(scale_name(d.scale));
    dj["min"] = d.lower;
    dj["max"] = d.upper;
    if (!d.grid.empty()) dj["grid"] = d.grid;
    j["dims"].push_back(std::move(dj));
  }
  return j;
}

Json space_to_json(const RatedSpace& generated) {
  Json j = space_to_json(generated.space);
  j["provenance"] = {{"kind", "random"},
                     {"rate", generated.rate},
                     {"seed", generated.seed.value}};
  return j;
}

SearchSpace load_space_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open space file '" + path_str(path) + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path_str(path) + ": " + e.what());
  }
  try {
    return space_from_json(j);
  } catch (const ValidationError& e) {
    throw ValidationError(path_str(path) + ": " + e.what());
  }
}

void save_space_file(const std::filesystem::path& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path_str(path) + "'");
  out << doc.dump(2) << "\n";
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    // trim
    std::size_t b = cell.find_first_not_of(" \t\r");
    std::size_t e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

}  // namespace

Dataset load_observations_csv(const std::filesystem::path& path,
                              const SearchSpace& space, bool negate) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open data file '" + path_str(path) + "'");

  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError(path_str(path) + ": empty file (header row expected)");
  }
  const std::vector<std::string> header = split_csv_line(line);

  const int d = space.ndim();
  std::vector<int> col_to_dim(header.size(), -1);
  int objective_col = -1;
  std::vector<bool> seen(static_cast<std::size_t>(d), false);
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "objective") {
      if (objective_col >= 0) {
        throw ValidationError(path_str(path) + ": duplicate 'objective' column");
      }
      objective_col = static_cast<int>(c);
      continue;
    }
    const int k = space.dim_index(header[c]);
    if (k < 0) {
      throw ValidationError(path_str(path) + ": column '" + header[c] +
                            "' does not match any space dimension");
    }
    if (seen[static_cast<std::size_t>(k)]) {
      throw ValidationError(path_str(path) + ": duplicate column '" + header[c] + "'");
    }
    seen[static_cast<std::size_t>(k)] = true;
    col_to_dim[c] = k;
  }
  if (objective_col < 0) {
    throw ValidationError(path_str(path) + ": missing 'objective' column");
  }
  for (int k = 0; k < d; ++k) {
    if (!seen[static_cast<std::size_t>(k)]) {
      throw ValidationError(path_str(path) + ": missing column '" +
                            space.dim(k).name + "'");
    }
  }

  std::vector<Observation> obs;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw ValidationError(path_str(path) + ":" + std::to_string(line_no) +
                            ": expected " + std::to_string(header.size()) +
                            " cells, got " + std::to_string(cells.size()));
    }
    Observation o;
    o.x.resize(d);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      char* end = nullptr;
      const double v = std::strtod(cells[c].c_str(), &end);
      if (end == cells[c].c_str() || *end != '\0' || !std::isfinite(v)) {
        throw ValidationError(path_str(path) + ":" + std::to_string(line_no) +
                              ": column " + std::to_string(c + 1) + " ('" +
                              header[c] + "'): '" + cells[c] +
                              "' is not a finite number");
      }
      if (static_cast<int>(c) == objective_col) {
        o.y = negate ? -v : v;
      } else {
        o.x[col_to_dim[c]] = v;
      }
    }
    if (!space.contains(o.x)) {
      for (int k = 0; k < d; ++k) {
        if (!space.dim(k).contains(o.x[k])) {
          throw ValidationError(path_str(path) + ":" + std::to_string(line_no) +
                                ": value " + format_double(o.x[k]) +
                                " outside dimension '" + space.dim(k).name + "' [" +
                                format_double(space.dim(k).lower) + ", " +
                                format_double(space.dim(k).upper) + "]");
        }
      }
    }
    obs.push_back(std::move(o));
  }
  return Dataset(space, std::move(obs));
}

Json model_to_json(const GpModel& model) {
  Json j;
  j["kernel"] = {{"amplitude", model.params().amplitude},
                 {"inv_lengthscales", std::vector<double>(
                                          model.params().inv_lengthscales.begin(),
                                          model.params().inv_lengthscales.end())},
                 {"noise_var", model.params().noise_var}};
  j["standardization"] = {{"y_mean", model.y_mean()},
                          {"y_std", model.y_std()},
                          {"degenerate_targets", model.diagnostics().degenerate_targets}};
  j["fit"] = {{"iterations", model.diagnostics().iterations},
              {"converged", model.diagnostics().converged},
              {"log_posterior", model.diagnostics().log_posterior}};
  Json rows = Json::array();
  for (int i = 0; i < model.n_train(); ++i) {
    Json row = Json::array();
    for (int k = 0; k < model.train_x().cols(); ++k) {
      row.push_back(model.train_x()(i, k));
    }
    row.push_back(model.train_y_standardized()[i]);
    rows.push_back(std::move(row));
  }
  j["train_unit_x_and_standardized_y"] = std::move(rows);
  return j;
}

std::string file_digest_hex(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path_str(path) + "' for digest");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

Json make_manifest(std::uint64_t seed,
                   const std::vector<std::filesystem::path>& inputs, Json config) {
  Json j;
  j["tool"] = std::string(kToolName) + " " + kToolVersion;
  j["seed"] = seed;
  Json in = Json::object();
  for (const auto& p : inputs) in[p.string()] = file_digest_hex(p);
  j["inputs"] = std::move(in);
  if (!config.empty()) j["config"] = std::move(config);
  return j;
}

std::string csv_manifest_line(std::uint64_t seed) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "# seed=%llu tool=%s %s",
                static_cast<unsigned long long>(seed), kToolName, kToolVersion);
  return buf;
}

}  // namespace spaceopt
