#pragma once

#include <string>
#include <utility>
#include <vector>

#include "diagnostics.hpp"

namespace yamabe {

inline constexpr const char* kTrajectoryCsvHeader =
    "t,dt,u_min,u_max,vol_g,R_min,R_max,R_l1,vol_identity_residual,evoR_residual_l2,lp_dist_initial,"
    "lp_dist_flat,moser_ratio";

/// Creates the directory (and parents); IoError on failure.
void ensure_directory(const std::string& dir);

/// One row per record, doubles printed with 17 significant digits so that
/// read_trajectory_csv reproduces them bitwise.
void write_trajectory_csv(const std::string& path, const std::vector<DiagnosticsRecord>& records);
std::vector<DiagnosticsRecord> read_trajectory_csv(const std::string& path);

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};
/// Minimal SVG line plot.
void write_svg_plot(const std::string& path, const std::string& title, const std::string& x_label,
                    const std::vector<PlotSeries>& series, bool log_y = false);

// Raw field snapshot: 32-byte little-endian header followed by m^n float64.
//   bytes  0..7   magic "YMBFLD01"
//   bytes  8..11  uint32 n
//   bytes 12..15  uint32 m
//   bytes 16..31  float32 side lengths L_1..L_4 (unused entries 0)
inline constexpr char kSnapshotMagic[8] = {'Y', 'M', 'B', 'F', 'L', 'D', '0', '1'};
void write_snapshot(const std::string& path, const ScalarField& field);
ScalarField read_snapshot(const std::string& path);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace yamabe
