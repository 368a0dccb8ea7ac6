#include "outputs.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace yamabe {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw IoError("write failed: " + path);
}

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void write_trajectory_csv(const std::string& path, const std::vector<DiagnosticsRecord>& records) {
  std::ostringstream os;
  os << kTrajectoryCsvHeader << '\n';
  for (const auto& r : records) {
    const double row[] = {r.t,     r.dt,   r.u_min,  r.u_max,
                          r.vol_g, r.R_min, r.R_max, r.R_l1,
                          r.vol_identity_residual,   r.evoR_residual_l2,
                          r.lp_dist_initial,         r.lp_dist_flat,
                          r.moser_ratio};
    for (std::size_t k = 0; k < std::size(row); ++k) os << (k ? "," : "") << fmt(row[k]);
    os << '\n';
  }
  write_text_file(path, os.str());
}

std::vector<DiagnosticsRecord> read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::string line;
  if (!std::getline(in, line) || line != kTrajectoryCsvHeader)
    throw ValidationError(path + ": unexpected CSV header");
  std::vector<DiagnosticsRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      double x = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0')
        throw ValidationError(path + ":" + std::to_string(lineno) + ": bad number \"" + cell + "\"");
      v.push_back(x);
    }
    if (v.size() != 13) throw ValidationError(path + ":" + std::to_string(lineno) + ": expected 13 columns");
    DiagnosticsRecord r;
    r.t = v[0];
    r.dt = v[1];
    r.u_min = v[2];
    r.u_max = v[3];
    r.vol_g = v[4];
    r.R_min = v[5];
    r.R_max = v[6];
    r.R_l1 = v[7];
    r.vol_identity_residual = v[8];
    r.evoR_residual_l2 = v[9];
    r.lp_dist_initial = v[10];
    r.lp_dist_flat = v[11];
    r.moser_ratio = v[12];
    out.push_back(r);
  }
  return out;
}

void write_svg_plot(const std::string& path, const std::string& title, const std::string& x_label,
                    const std::vector<PlotSeries>& series, bool log_y) {
  constexpr double W = 640, H = 400, L = 70, R = 20, T = 40, B = 50;
  auto ty = [&](double y) { return log_y ? std::log10(std::max(y, 1e-300)) : y; };
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (auto [x, y] : s.points) {
      if (log_y && !(y > 0.0)) continue;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, ty(y));
      y1 = std::max(y1, ty(y));
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (ty(y) - y0) / (y1 - y0) * (H - T - B); };

  static const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title << "</text>\n"
     << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n"
     << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n"
     << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label
     << "</text>\n"
     << "<text x=\"" << L << "\" y=\"" << H - B + 16 << "\" font-size=\"10\">" << fmt(x0) << "</text>\n"
     << "<text x=\"" << W - R << "\" y=\"" << H - B + 16 << "\" text-anchor=\"end\" font-size=\"10\">" << fmt(x1)
     << "</text>\n"
     << "<text x=\"4\" y=\"" << H - B << "\" font-size=\"10\">" << (log_y ? "1e" : "") << fmt(y0) << "</text>\n"
     << "<text x=\"4\" y=\"" << T + 4 << "\" font-size=\"10\">" << (log_y ? "1e" : "") << fmt(y1) << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* c = colours[k % std::size(colours)];
    os << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
    for (auto [x, y] : series[k].points) {
      if (log_y && !(y > 0.0)) continue;
      os << px(x) << ',' << py(y) << ' ';
    }
    os << "\"/>\n";
    os << "<text x=\"" << W - R - 4 << "\" y=\"" << T + 14 * (k + 1) << "\" text-anchor=\"end\" font-size=\"11\" fill=\""
       << c << "\">" << series[k].label << "</text>\n";
  }
  os << "</svg>\n";
  write_text_file(path, os.str());
}

void write_snapshot(const std::string& path, const ScalarField& field) {
  const auto& grid = field.grid();
  unsigned char header[32] = {};
  std::memcpy(header, kSnapshotMagic, 8);
  std::uint32_t n = std::uint32_t(grid.dim()), m = std::uint32_t(grid.points_per_axis());
  std::memcpy(header + 8, &n, 4);
  std::memcpy(header + 12, &m, 4);
  for (int k = 0; k < grid.dim(); ++k) {
    float l = float(grid.length(k));
    std::memcpy(header + 16 + 4 * k, &l, 4);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(header), sizeof header);
  out.write(reinterpret_cast<const char*>(field.values().data()), std::streamsize(sizeof(double) * field.size()));
  if (!out) throw IoError("write failed: " + path);
}

ScalarField read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  unsigned char header[32];
  if (!in.read(reinterpret_cast<char*>(header), sizeof header)) throw ValidationError(path + ": truncated header");
  if (std::memcmp(header, kSnapshotMagic, 8) != 0) throw ValidationError(path + ": not a field snapshot");
  std::uint32_t n, m;
  std::memcpy(&n, header + 8, 4);
  std::memcpy(&m, header + 12, 4);
  if (n < 3 || n > 4) throw ValidationError(path + ": bad dimension in header");
  std::vector<double> lengths(n);
  for (std::uint32_t k = 0; k < n; ++k) {
    float l;
    std::memcpy(&l, header + 16 + 4 * k, 4);
    lengths[k] = l;
  }
  PeriodicGrid grid(int(n), int(m), lengths);
  std::vector<double> values(grid.size());
  if (!in.read(reinterpret_cast<char*>(values.data()), std::streamsize(sizeof(double) * values.size())))
    throw ValidationError(path + ": truncated data");
  return ScalarField(grid, std::move(values));
}

}  // namespace yamabe
