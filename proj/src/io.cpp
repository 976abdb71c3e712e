#include "risim/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace risim {

namespace {

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::ofstream open_out(const std::string& path, bool binary) {
  std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  return f;
}

std::ifstream open_in(const std::string& path, bool binary) {
  std::ifstream f(path, binary ? std::ios::binary : std::ios::in);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  return f;
}

std::vector<unsigned char> to_gray(const ReflectivityMap& map) {
  double peak = map.values.size() ? map.values.maxCoeff() : 0.0;
  std::vector<unsigned char> bytes((size_t)map.nx * map.ny, 0);
  if (peak <= 0.0) return bytes;
  size_t i = 0;
  for (int iy = map.ny - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < map.nx; ++ix) {
      long v = std::lround(255.0 * map.at(ix, iy) / peak);
      bytes[i++] = (unsigned char)std::min(255l, std::max(0l, v));
    }
  }
  return bytes;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

void write_pgm(const std::string& path, const ReflectivityMap& map) {
  auto f = open_out(path, true);
  f << "P5\n" << map.nx << " " << map.ny << "\n255\n";
  auto bytes = to_gray(map);
  f.write((const char*)bytes.data(), (std::streamsize)bytes.size());
}

void write_map_csv(const std::string& path, const ReflectivityMap& map) {
  auto f = open_out(path, false);
  for (int iy = map.ny - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < map.nx; ++ix) {
      if (ix) f << ",";
      f << fmt_double(map.at(ix, iy));
    }
    f << "\n";
  }
}

ReflectivityMap read_map_csv(const std::string& path) {
  auto f = open_in(path, false);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("empty map file: " + path);
  int ny = (int)rows.size();
  int nx = (int)rows[0].size();
  ReflectivityMap map(nx, ny);
  for (int r = 0; r < ny; ++r) {
    if ((int)rows[r].size() != nx) throw std::runtime_error("ragged map file: " + path);
    int iy = ny - 1 - r;
    for (int ix = 0; ix < nx; ++ix) map.at(ix, iy) = rows[r][ix];
  }
  return map;
}

void write_csi_csv(const std::string& path, const CsiMeasurement& csi, const SceneConfig& cfg) {
  auto f = open_out(path, false);
  f << "config_id,subcarrier_index,frequency_hz,real,imag\n";
  for (int s = 0; s < csi.h.size(); ++s) {
    f << csi.config_id << "," << s << "," << fmt_double(cfg.subcarrier_frequency(s)) << ","
      << fmt_double(csi.h[s].real()) << "," << fmt_double(csi.h[s].imag()) << "\n";
  }
}

void write_transfer_matrix(const std::string& path, const TransferMatrix& H) {
  const auto rows = (std::uint64_t)H.h.rows();
  const auto cols = (std::uint64_t)H.h.cols();
  if (ends_with(path, ".csv")) {
    auto f = open_out(path, false);
    f << rows << "," << cols << "\n";
    for (std::uint64_t r = 0; r < rows; ++r) {
      for (std::uint64_t c = 0; c < cols; ++c) {
        if (c) f << ",";
        f << fmt_double(H.h(r, c).real()) << "," << fmt_double(H.h(r, c).imag());
      }
      f << "\n";
    }
    return;
  }
  auto f = open_out(path, true);
  f.write("RISH", 4);
  f.write((const char*)&rows, 8);
  f.write((const char*)&cols, 8);
  for (std::uint64_t r = 0; r < rows; ++r) {
    for (std::uint64_t c = 0; c < cols; ++c) {
      double re = H.h(r, c).real();
      double im = H.h(r, c).imag();
      f.write((const char*)&re, 8);
      f.write((const char*)&im, 8);
    }
  }
}

TransferMatrix read_transfer_matrix(const std::string& path) {
  if (ends_with(path, ".csv")) {
    auto f = open_in(path, false);
    std::string line;
    if (!std::getline(f, line)) throw std::runtime_error("empty matrix file: " + path);
    std::uint64_t rows = 0, cols = 0;
    if (std::sscanf(line.c_str(), "%llu,%llu", (unsigned long long*)&rows,
                    (unsigned long long*)&cols) != 2) {
      throw std::runtime_error("bad matrix header in " + path);
    }
    TransferMatrix H;
    H.h.resize((Eigen::Index)rows, (Eigen::Index)cols);
    for (std::uint64_t r = 0; r < rows; ++r) {
      if (!std::getline(f, line)) throw std::runtime_error("truncated matrix file: " + path);
      std::stringstream ss(line);
      std::string cell;
      for (std::uint64_t c = 0; c < cols; ++c) {
        if (!std::getline(ss, cell, ',')) throw std::runtime_error("short row in " + path);
        double re = std::stod(cell);
        if (!std::getline(ss, cell, ',')) throw std::runtime_error("short row in " + path);
        double im = std::stod(cell);
        H.h((Eigen::Index)r, (Eigen::Index)c) = cdouble(re, im);
      }
    }
    return H;
  }
  auto f = open_in(path, true);
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, "RISH", 4) != 0) {
    throw std::runtime_error("not a transfer matrix file: " + path);
  }
  std::uint64_t rows = 0, cols = 0;
  f.read((char*)&rows, 8);
  f.read((char*)&cols, 8);
  if (!f) throw std::runtime_error("truncated matrix file: " + path);
  TransferMatrix H;
  H.h.resize((Eigen::Index)rows, (Eigen::Index)cols);
  for (std::uint64_t r = 0; r < rows; ++r) {
    for (std::uint64_t c = 0; c < cols; ++c) {
      double re, im;
      f.read((char*)&re, 8);
      f.read((char*)&im, 8);
      if (!f) throw std::runtime_error("truncated matrix file: " + path);
      H.h((Eigen::Index)r, (Eigen::Index)c) = cdouble(re, im);
    }
  }
  return H;
}

void write_residuals_csv(const std::string& path, const std::vector<double>& primal_residual,
                         const std::vector<double>& data_objective) {
  if (primal_residual.size() != data_objective.size()) {
    throw std::invalid_argument("residual and objective traces must align");
  }
  auto f = open_out(path, false);
  f << "iteration,primal_residual,objective\n";
  for (size_t i = 0; i < primal_residual.size(); ++i) {
    f << (i + 1) << "," << fmt_double(primal_residual[i]) << "," << fmt_double(data_objective[i])
      << "\n";
  }
}

void write_results_csv(const std::string& path, const std::vector<MetricReport>& rows,
                       const std::vector<std::string>& config_paths) {
  if (rows.size() != config_paths.size()) {
    throw std::invalid_argument("one config path per result row required");
  }
  auto f = open_out(path, false);
  f << "scene,method,ris_size,bits,rmse,ssim,config\n";
  for (size_t i = 0; i < rows.size(); ++i) {
    const MetricReport& r = rows[i];
    f << r.scene << "," << r.method << "," << r.ris_size << "," << r.bits << ","
      << fmt_double(r.rmse) << "," << fmt_double(r.ssim) << "," << config_paths[i] << "\n";
  }
}

void write_montage_pgm(const std::string& path, const std::vector<ReflectivityMap>& maps) {
  if (maps.empty()) throw std::invalid_argument("montage needs at least one tile");
  int nx = maps[0].nx, ny = maps[0].ny;
  for (const auto& m : maps) {
    if (m.nx != nx || m.ny != ny) throw std::invalid_argument("montage tiles must share size");
  }
  int width = (int)maps.size() * nx + (int)maps.size() - 1;
  std::vector<std::vector<unsigned char>> tiles;
  tiles.reserve(maps.size());
  for (const auto& m : maps) tiles.push_back(to_gray(m));

  auto f = open_out(path, true);
  f << "P5\n" << width << " " << ny << "\n255\n";
  for (int row = 0; row < ny; ++row) {
    for (size_t t = 0; t < tiles.size(); ++t) {
      if (t) f.put((char)255);
      f.write((const char*)&tiles[t][(size_t)row * nx], nx);
    }
  }
}

}  // namespace risim
