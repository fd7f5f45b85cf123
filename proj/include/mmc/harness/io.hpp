#pragma once

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "mmc/stepper.hpp"

namespace mmc::harness {

/// Column names of the series file, comma separated.
const std::string& series_columns();

/// One series row; reals use 17 significant digits.
std::string format_series_row(long step, double t, const StepReport& r);

/// Writes a series CSV: optional `# ` comment lines, the column row, then rows.
class SeriesWriter {
 public:
  /// Throws Error if the file cannot be opened.
  SeriesWriter(const std::string& path, const std::vector<std::string>& comments);
  void write(long step, double t, const StepReport& r);
  void flush();

 private:
  struct Closer {
    void operator()(std::FILE* f) const noexcept { std::fclose(f); }
  };
  std::unique_ptr<std::FILE, Closer> file_;
  std::string path_;
};

/// A nodal field on the uniform n x n periodic grid at time t.
/// values[j * n + i] is the value at (i h, j h).
struct Snapshot {
  int n = 0;
  double L = 0.0;
  double t = 0.0;
  std::string field;  // "phi1" or "phi2"
  std::vector<double> values;
};

Snapshot make_snapshot(const NodalField& f, double t, const std::string& field);

/// Header `# n=<n> L=<L> t=<t> field=<name>`, a layout line, then n rows of n values.
std::string format_snapshot(const Snapshot& s);
/// Throws Error if the file cannot be written.
void write_snapshot(const std::string& path, const Snapshot& s);
/// Throws Error on malformed input.
Snapshot parse_snapshot(const std::string& text);
Snapshot read_snapshot(const std::string& path);

/// %.17g
std::string format_real(double v);

}  // namespace mmc::harness
