#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "diagnostics.hpp"
#include "flow.hpp"

namespace yamabe {

struct GridSpec {
  int n = 3;
  int m = 32;
  std::vector<double> lengths = {1.0, 1.0, 1.0};
  bool operator==(const GridSpec&) const = default;
};

/// Generator for a positive field (initial factor u0 or background factor v).
///   constant:    value
///   cosine:      1 + amplitude cos(2 pi mode x_axis / L_axis)
///   bandlimited: exp(amplitude * s), s a seeded odd band-limited shape, max|s| = 1
///   delta:       bandlimited shape with amplitude calibrated so min R = -delta
///                (initial data only)
/// The result is multiplied by `scale`.
struct FieldSpec {
  std::string kind = "constant";
  double value = 1.0;
  double amplitude = 0.0;
  int axis = 0;
  int mode = 1;
  std::uint64_t seed = 1;
  int kmax = 2;
  double scale = 1.0;
  bool operator==(const FieldSpec&) const = default;
};

struct BackgroundSpec {
  std::string kind = "flat";  // flat | conformally_flat
  std::optional<FieldSpec> v;
  bool operator==(const BackgroundSpec&) const = default;
};

struct SequenceSpec {
  int count = 8;
  /// Empty means delta_i = 1/i.
  std::vector<double> deltas;
  std::string shape = "bandlimited";  // bandlimited | cosine
  std::uint64_t base_seed = 1;
  /// Member i uses seed base_seed + (i-1) * seed_stride; 0 keeps one fixed shape.
  std::uint64_t seed_stride = 0;
  int kmax = 2;
  bool operator==(const SequenceSpec&) const = default;

  std::vector<double> schedule() const;
};

struct OutputSpec {
  std::string dir = "out";
  bool plots = true;
  bool snapshot = false;
  bool operator==(const OutputSpec&) const = default;
};

struct ExperimentConfig {
  GridSpec grid;
  BackgroundSpec background;
  FieldSpec initial;
  FlowConfig flow;
  DiagnosticsConfig diagnostics;
  SequenceSpec sequence;
  OutputSpec output;
  bool operator==(const ExperimentConfig&) const = default;

  /// Cross-field validation (grid, p0 threshold, generator parameters).
  void validate() const;
};

/// Parses the JSON config schema. Unknown keys and type errors are rejected
/// with a ValidationError naming the JSON path.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
/// Canonical JSON with every default filled in; parse_config round-trips it.
std::string canonical_config(const ExperimentConfig& cfg);

}  // namespace yamabe
