#pragma once

#include <string>
#include <utility>
#include <vector>

#include "kslab/diagnostics.hpp"
#include "kslab/grid.hpp"

// On-disk formats.
//
// Time series: CSV, one header row then one record per sample, all fields
// numeric and printed with %.17g so a rerun of the same binary reproduces
// the file byte for byte.  Unlimited-precision round trip: 17 significant
// digits recover the exact double.
//
// Field dumps: binary, magic "KSF1", every scalar little-endian regardless
// of host order.  Layout after the magic: i32 dim, i32 extent per axis,
// f64 length per axis, f64 time, then ncell f64 cell values with x fastest.
//
// Previews: binary PGM (P5), 8 bits, field linearly mapped onto 0..255.
//
// Manifests: plain "key=value" lines in the order given.

namespace kslab {

std::string format_g17(double x);

std::string timeseries_header(
    const std::vector<std::pair<int, int>>& energy_set);
std::string timeseries_line(const DiagnosticsRow& row);
void write_timeseries_csv(const std::string& path,
                          const DiagnosticsReport& report);

struct FieldDump {
  Field field;
  double t = 0.0;
};

void write_field_dump(const std::string& path, const Field& f, double t);
FieldDump read_field_dump(const std::string& path);

// 2d grids only; the image row order follows the grid's y order.
void write_pgm(const std::string& path, const Field& f);

void write_manifest(
    const std::string& path,
    const std::vector<std::pair<std::string, std::string>>& entries);

}  // namespace kslab
