#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "trapgen/analytic.hpp"
#include "trapgen/incoherent.hpp"
#include "trapgen/optics.hpp"
#include "trapgen/sweep.hpp"

namespace trapgen::cli {

inline constexpr int kSchemaVersion = 1;

/// Config problem located at a line of the source text (0 when unknown).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& msg, std::size_t line)
      : std::runtime_error(line > 0 ? "config line " + std::to_string(line) + ": " + msg : "config: " + msg),
        line_(line) {}
  [[nodiscard]] std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct GridConfig {
  std::size_t n = 1024;
  double dx = 0.0;  // m at the mask plane
};

struct ScanConfig {
  std::vector<double> z_values;  // m, image side
};

struct MetricsConfig {
  double probe_fraction = 0.1;           // probe radius / a_img
  std::optional<double> input_intensity;  // W/m^2
  std::optional<double> alpha0;           // uK per W/m^2
  std::optional<double> mass;             // kg
};

struct SimulateConfig {
  SystemSpec sys;
  MaskSpec mask;
  FilterSpec filter;
  double iris_units = 1.0;  // recorded for the manifest
  GridConfig grid;
  std::optional<ScanConfig> scan;
  MetricsConfig metrics;
};

struct TalbotConfig {
  SystemSpec sys;
  MaskSpec mask;
  FilterSpec filter;
  GridConfig grid;
  ScanConfig scan;
  bool coherent = true;
  std::optional<SourceSpec> source;
  double probe_fraction = 0.1;
};

struct SweepConfig {
  SystemSpec sys;
  double a = 0.0;
  std::vector<double> t_a_magnitudes;
  double t_b = 1.0;
  Range phi;
  Range b;
  std::optional<std::pair<double, double>> search;  // b bracket for the refined optimum
};

/// Parsed document plus the raw text for line lookup.
struct Document {
  nlohmann::ordered_json json;
  std::string text;
};

Document load_document(const std::string& path);
Document parse_document(std::string text);

SimulateConfig parse_simulate(const Document& doc);
TalbotConfig parse_talbot(const Document& doc);
SweepConfig parse_sweep(const Document& doc);

}  // namespace trapgen::cli
