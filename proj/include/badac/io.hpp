#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "badac/config.hpp"
#include "badac/core.hpp"
#include "badac/errors.hpp"
#include "badac/rng.hpp"

namespace badac {

// Shortest decimal form that parses back to the identical double.
inline std::string format_double(double value) {
  char buffer[40];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

inline double parse_double(std::string_view text) {
  double value = 0.0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  require(result.ec == std::errc() && result.ptr == text.data() + text.size(),
          errc::io_failure, "malformed number '" + std::string(text) + "'");
  return value;
}

inline long long parse_int(std::string_view text) {
  long long value = 0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  require(result.ec == std::errc() && result.ptr == text.data() + text.size(),
          errc::io_failure, "malformed integer '" + std::string(text) + "'");
  return value;
}

inline constexpr std::string_view kDatasetHeader =
    "instance_id,class_label,point_index,x,y,sigma";

// One row per point; empty class_label means unlabeled. LF line endings and
// round-trip float formatting make the file bit-stable.
inline void write_dataset_csv(const Dataset& data, std::ostream& out) {
  out << kDatasetHeader << '\n';
  for (std::size_t i = 0; i < data.instances.size(); ++i) {
    const Instance& inst = data.instances[i];
    for (std::size_t j = 0; j < inst.size(); ++j) {
      out << i << ',';
      if (inst.label) out << *inst.label;
      out << ',' << j << ',' << format_double(inst.grid[j]) << ','
          << format_double(inst.values[j]) << ',' << format_double(inst.sigmas[j]) << '\n';
    }
  }
}

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

}  // namespace detail

inline Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), errc::io_failure, "empty dataset file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == kDatasetHeader, errc::missing_columns,
          "unexpected dataset header '" + line + "'");

  std::vector<Instance> instances;
  long long current_id = -1;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = detail::split_csv(line);
    require(fields.size() == 6, errc::missing_columns, "expected 6 columns per row");
    const long long id = parse_int(fields[0]);
    if (id != current_id) {
      require(id == static_cast<long long>(instances.size()), errc::io_failure,
              "instance ids must be consecutive from 0");
      current_id = id;
      instances.emplace_back();
      if (!fields[1].empty()) {
        instances.back().label = static_cast<int>(parse_int(fields[1]));
      }
    }
    Instance& inst = instances.back();
    require(parse_int(fields[2]) == static_cast<long long>(inst.size()), errc::io_failure,
            "point_index out of order");
    inst.grid.push_back(parse_double(fields[3]));
    inst.values.push_back(parse_double(fields[4]));
    inst.sigmas.push_back(parse_double(fields[5]));
  }
  return make_dataset(std::move(instances));
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), errc::io_failure, "cannot open '" + path.string() + "' for writing");
  out << text;
  require(out.good(), errc::io_failure, "failed writing '" + path.string() + "'");
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), errc::io_failure, "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void write_dataset_file(const Dataset& data, const std::filesystem::path& path) {
  std::ostringstream out;
  write_dataset_csv(data, out);
  write_text_file(path, out.str());
}

inline Dataset read_dataset_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), errc::io_failure, "cannot open '" + path.string() + "'");
  return read_dataset_csv(in);
}

// FNV-1a over the canonical config serialization; embedded in metadata so
// artifacts can be traced back to their exact configuration.
inline std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

inline nlohmann::json config_to_json(const ExperimentConfig& config) {
  nlohmann::json j{
      {"kind", experiment_kind_name(config.kind)},
      {"n_train", config.n_train},
      {"n_test", config.n_test},
      {"outlier_fraction", config.outlier_fraction},
      {"grid_points", config.grid_points},
      {"seed", config.seed},
      {"anomaly_prior", anomaly_prior_mode_name(effective_anomaly_prior(config))},
      {"contamination_fraction", config.contamination_fraction},
      {"algorithms", config.algorithms},
      {"knn_k", config.knn_k},
      {"admission_threshold", config.admission_threshold},
      {"threads", config.threads},
  };
  if (config.rws_n) j["rws_n"] = *config.rws_n;
  return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig config;
  try {
    if (j.contains("kind")) config.kind = experiment_kind_from_name(j.at("kind"));
    if (j.contains("n_train")) config.n_train = j.at("n_train").get<std::size_t>();
    if (j.contains("n_test")) config.n_test = j.at("n_test").get<std::size_t>();
    if (j.contains("outlier_fraction")) {
      config.outlier_fraction = j.at("outlier_fraction").get<double>();
    }
    if (j.contains("grid_points")) config.grid_points = j.at("grid_points").get<std::size_t>();
    if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("anomaly_prior")) {
      config.anomaly_prior = anomaly_prior_mode_from_name(j.at("anomaly_prior"));
    }
    if (j.contains("contamination_fraction")) {
      config.contamination_fraction = j.at("contamination_fraction").get<double>();
    }
    if (j.contains("rws_n")) config.rws_n = j.at("rws_n").get<std::size_t>();
    if (j.contains("algorithms")) {
      config.algorithms = j.at("algorithms").get<std::vector<std::string>>();
    }
    if (j.contains("knn_k")) config.knn_k = j.at("knn_k").get<std::size_t>();
    if (j.contains("admission_threshold")) {
      config.admission_threshold = j.at("admission_threshold").get<double>();
    }
    if (j.contains("threads")) config.threads = j.at("threads").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    fail(errc::config_invalid, std::string("bad config: ") + e.what());
  }
  validate_config(config);
  return config;
}

inline ExperimentConfig load_config_file(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    fail(errc::config_invalid, std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

inline std::uint64_t config_hash(const ExperimentConfig& config) {
  return fnv1a(config_to_json(config).dump());
}

inline nlohmann::json dataset_metadata(const ExperimentConfig& config) {
  return nlohmann::json{
      {"generator", CounterRng::kGeneratorName},
      {"seed", config.seed},
      {"config", config_to_json(config)},
      {"config_hash", config_hash(config)},
  };
}

}  // namespace badac
