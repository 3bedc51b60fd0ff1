#include "kslab/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace kslab {

namespace {

void put_le32(std::string& out, std::uint32_t x) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((x >> (8 * b)) & 0xff));
}

void put_le64(std::string& out, std::uint64_t x) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((x >> (8 * b)) & 0xff));
}

void put_f64(std::string& out, double x) {
  std::uint64_t bits;
  std::memcpy(&bits, &x, sizeof bits);
  put_le64(out, bits);
}

std::uint32_t get_le32(const unsigned char* p) {
  std::uint32_t x = 0;
  for (int b = 3; b >= 0; --b) x = (x << 8) | p[b];
  return x;
}

std::uint64_t get_le64(const unsigned char* p) {
  std::uint64_t x = 0;
  for (int b = 7; b >= 0; --b) x = (x << 8) | p[b];
  return x;
}

double get_f64(const unsigned char* p) {
  const std::uint64_t bits = get_le64(p);
  double x;
  std::memcpy(&x, &bits, sizeof x);
  return x;
}

void write_all(const std::string& path, const std::string& data) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string timeseries_header(
    const std::vector<std::pair<int, int>>& energy_set) {
  std::string h =
      "t,dt,mass,mass_drift,sup_u,min_u,min_v,min_w,key_id_res,kid0_res,"
      "envelope_margin,comparison_margin";
  for (const auto& [p, q] : energy_set)
    h += ",energy_" + std::to_string(p) + "_" + std::to_string(q);
  h += ",exp_moment";
  return h;
}

std::string timeseries_line(const DiagnosticsRow& r) {
  std::string line = format_g17(r.t);
  const double base[] = {r.dt,    r.mass,  r.mass_drift,     r.sup_u,
                         r.min_u, r.min_v, r.min_w,          r.key_id_res,
                         r.kid0_res, r.envelope_margin, r.comparison_margin};
  for (double x : base) {
    line += ',';
    line += format_g17(x);
  }
  for (double e : r.energies) {
    line += ',';
    line += format_g17(e);
  }
  line += ',';
  line += format_g17(r.exp_moment);
  return line;
}

void write_timeseries_csv(const std::string& path,
                          const DiagnosticsReport& report) {
  std::string out = timeseries_header(report.energy_set);
  out += '\n';
  for (const auto& row : report.rows) {
    out += timeseries_line(row);
    out += '\n';
  }
  write_all(path, out);
}

void write_field_dump(const std::string& path, const Field& f, double t) {
  const Grid& g = *f.grid;
  std::string out = "KSF1";
  put_le32(out, static_cast<std::uint32_t>(g.dim));
  for (int a = 0; a < g.dim; ++a)
    put_le32(out, static_cast<std::uint32_t>(g.extent[a]));
  for (int a = 0; a < g.dim; ++a) put_f64(out, g.length[a]);
  put_f64(out, t);
  for (double x : f.v) put_f64(out, x);
  write_all(path, out);
}

FieldDump read_field_dump(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open field dump: " + path);
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(data.data());
  const std::size_t n = data.size();

  auto need = [&](std::size_t at, std::size_t bytes) {
    if (at + bytes > n)
      throw std::runtime_error("truncated field dump: " + path);
  };

  need(0, 4);
  if (std::memcmp(p, "KSF1", 4) != 0)
    throw std::runtime_error("not a field dump (bad magic): " + path);
  std::size_t off = 4;

  need(off, 4);
  const int dim = static_cast<int>(get_le32(p + off));
  off += 4;
  if (dim < 1 || dim > 3)
    throw std::runtime_error("field dump has unsupported dimension: " + path);

  std::vector<int> extents(dim);
  for (int a = 0; a < dim; ++a) {
    need(off, 4);
    extents[a] = static_cast<int>(get_le32(p + off));
    off += 4;
  }
  std::vector<double> lengths(dim);
  for (int a = 0; a < dim; ++a) {
    need(off, 8);
    lengths[a] = get_f64(p + off);
    off += 8;
  }

  FieldDump d;
  d.field = Field(build_grid(dim, extents, lengths));
  need(off, 8);
  d.t = get_f64(p + off);
  off += 8;
  need(off, 8 * d.field.size());
  for (std::size_t i = 0; i < d.field.size(); ++i, off += 8)
    d.field.v[i] = get_f64(p + off);
  if (off != n)
    throw std::runtime_error("trailing bytes in field dump: " + path);
  return d;
}

void write_pgm(const std::string& path, const Field& f) {
  const Grid& g = *f.grid;
  if (g.dim != 2)
    throw std::invalid_argument("pgm preview needs a 2d field");
  const double lo = *std::min_element(f.v.begin(), f.v.end());
  const double hi = *std::max_element(f.v.begin(), f.v.end());
  const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;

  std::string out = "P5\n" + std::to_string(g.extent[0]) + " " +
                    std::to_string(g.extent[1]) + "\n255\n";
  out.reserve(out.size() + f.size());
  for (double x : f.v) {
    const int v = static_cast<int>(std::lround((x - lo) * scale));
    out.push_back(static_cast<char>(std::clamp(v, 0, 255)));
  }
  write_all(path, out);
}

void write_manifest(
    const std::string& path,
    const std::vector<std::pair<std::string, std::string>>& entries) {
  std::string out;
  for (const auto& [k, v] : entries) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  write_all(path, out);
}

}  // namespace kslab
