#include "coherence/state_io.hpp"

#include <fstream>

#include "coherence/error.hpp"

namespace coherence {

namespace {

std::vector<std::vector<double>> read_real_grid(const nlohmann::json& j, const char* field) {
  if (!j.is_array()) throw ValidationError(std::string("state JSON: '") + field + "' must be an array of rows");
  std::vector<std::vector<double>> grid;
  for (const auto& row : j) {
    if (!row.is_array()) throw ValidationError(std::string("state JSON: '") + field + "' rows must be arrays");
    std::vector<double> values;
    for (const auto& v : row) {
      if (!v.is_number()) throw ValidationError(std::string("state JSON: '") + field + "' entries must be numbers");
      values.push_back(v.get<double>());
    }
    grid.push_back(std::move(values));
  }
  return grid;
}

}  // namespace

nlohmann::json matrix_to_json(const ComplexMatrix& m) {
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    nlohmann::json re_row = nlohmann::json::array();
    nlohmann::json im_row = nlohmann::json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) {
      re_row.push_back(m(r, c).real());
      im_row.push_back(m(r, c).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  return {{"re", std::move(re)}, {"im", std::move(im)}};
}

ComplexMatrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("re")) throw ValidationError("matrix JSON: missing 're'");
  const auto re = read_real_grid(j.at("re"), "re");
  const std::size_t rows = re.size();
  const std::size_t cols = rows == 0 ? 0 : re.front().size();
  std::vector<std::vector<double>> im;
  if (j.contains("im")) {
    im = read_real_grid(j.at("im"), "im");
    if (im.size() != rows) throw ValidationError("matrix JSON: 're' and 'im' row counts differ");
  }
  std::vector<Complex> entries;
  entries.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (re[r].size() != cols) throw ValidationError("matrix JSON: ragged 're' row " + std::to_string(r));
    if (!im.empty() && im[r].size() != cols) throw ValidationError("matrix JSON: ragged 'im' row " + std::to_string(r));
    for (std::size_t c = 0; c < cols; ++c) entries.emplace_back(re[r][c], im.empty() ? 0.0 : im[r][c]);
  }
  return ComplexMatrix(rows, cols, std::move(entries));
}

DensityMatrix density_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("state JSON: expected an object");
  ComplexMatrix m = matrix_from_json(j);
  if (j.contains("dim")) {
    if (!j.at("dim").is_number_integer()) throw ValidationError("state JSON: 'dim' must be an integer");
    const auto dim = j.at("dim").get<long long>();
    if (dim < 1 || static_cast<std::size_t>(dim) != m.rows() || m.rows() != m.cols()) {
      throw ValidationError("state JSON: 'dim' = " + std::to_string(dim) + " does not match a " +
                            std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + " matrix");
    }
  }
  return DensityMatrix(std::move(m));
}

nlohmann::json density_to_json(const DensityMatrix& rho, std::optional<std::size_t> local_dim) {
  nlohmann::json j = matrix_to_json(rho.matrix());
  j["dim"] = rho.dim();
  if (local_dim) j["local_dim"] = *local_dim;
  return j;
}

BlochState bloch_from_json(const nlohmann::json& j) {
  auto component = [&](const char* key, bool required) {
    if (!j.contains(key)) {
      if (required) throw ValidationError(std::string("Bloch JSON: missing '") + key + "'");
      return 0.0;
    }
    if (!j.at(key).is_number()) throw ValidationError(std::string("Bloch JSON: '") + key + "' must be a number");
    return j.at(key).get<double>();
  };
  BlochState b{component("nx", true), component("ny", false), component("nz", true)};
  validate(b);
  return b;
}

nlohmann::json bloch_to_json(const BlochState& b) { return {{"nx", b.nx}, {"ny", b.ny}, {"nz", b.nz}}; }

StateSource state_source_from_json(const nlohmann::json& j) {
  if (j.is_object() && j.contains("nx")) return {bloch_to_density(bloch_from_json(j)), std::nullopt};
  DensityMatrix rho = density_from_json(j);
  std::optional<std::size_t> local_dim;
  if (j.contains("local_dim")) {
    if (!j.at("local_dim").is_number_integer()) throw ValidationError("state JSON: 'local_dim' must be an integer");
    const auto d = j.at("local_dim").get<long long>();
    if (d < 2 || static_cast<std::size_t>(d * d) != rho.dim()) {
      throw ValidationError("state JSON: 'local_dim' = " + std::to_string(d) + " inconsistent with dim " +
                            std::to_string(rho.dim()));
    }
    local_dim = static_cast<std::size_t>(d);
  }
  return {std::move(rho), local_dim};
}

StateSource load_state_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open state file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("state file '" + path + "': " + e.what());
  }
  return state_source_from_json(j);
}

}  // namespace coherence
