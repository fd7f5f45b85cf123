#include "mmc/harness/io.hpp"

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mmc/errors.hpp"

namespace mmc::harness {

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::string& series_columns() {
  static const std::string cols =
      "step,t,mass1,mass2,mass3,min1,max1,min2,max2,min3,max3,"
      "E_total,E_entropy,E_enthalpy,E_gradient,newton_iters,residual";
  return cols;
}

std::string format_series_row(long step, double t, const StepReport& r) {
  std::string row = std::to_string(step);
  auto add = [&](double v) {
    row += ',';
    row += format_real(v);
  };
  add(t);
  for (double m : r.mass) add(m);
  for (int i = 0; i < 3; ++i) {
    add(r.min[i]);
    add(r.max[i]);
  }
  add(r.energy.total);
  add(r.energy.entropy);
  add(r.energy.enthalpy);
  add(r.energy.gradient);
  row += ',' + std::to_string(r.newton_iters);
  add(r.final_residual);
  return row;
}

SeriesWriter::SeriesWriter(const std::string& path, const std::vector<std::string>& comments)
    : file_(std::fopen(path.c_str(), "w")), path_(path) {
  if (!file_) throw Error("cannot open series file '" + path + "': " + std::strerror(errno));
  for (const auto& c : comments) std::fprintf(file_.get(), "# %s\n", c.c_str());
  std::fprintf(file_.get(), "%s\n", series_columns().c_str());
}

void SeriesWriter::write(long step, double t, const StepReport& r) {
  const std::string row = format_series_row(step, t, r);
  if (std::fprintf(file_.get(), "%s\n", row.c_str()) < 0) {
    throw Error("write to '" + path_ + "' failed");
  }
}

void SeriesWriter::flush() { std::fflush(file_.get()); }

Snapshot make_snapshot(const NodalField& f, double t, const std::string& field) {
  const auto v = f.values();
  return {f.mesh().nodes_per_side(), f.mesh().length(), t, field, {v.begin(), v.end()}};
}

std::string format_snapshot(const Snapshot& s) {
  std::string out = "# n=" + std::to_string(s.n) + " L=" + format_real(s.L) +
                    " t=" + format_real(s.t) + " field=" + s.field + "\n";
  out += "# layout=row-major rows=j(y) cols=i(x)\n";
  for (int j = 0; j < s.n; ++j) {
    for (int i = 0; i < s.n; ++i) {
      if (i > 0) out += ',';
      out += format_real(s.values[static_cast<std::size_t>(j) * s.n + i]);
    }
    out += '\n';
  }
  return out;
}

void write_snapshot(const std::string& path, const Snapshot& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open snapshot file '" + path + "'");
  out << format_snapshot(s);
  if (!out) throw Error("write to '" + path + "' failed");
}

namespace {

double parse_real(const std::string& token, const char* what) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (token.empty() || *end != '\0' || errno == ERANGE) {
    throw Error(std::string("snapshot: bad ") + what + " '" + token + "'");
  }
  return v;
}

}  // namespace

Snapshot parse_snapshot(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) throw Error("snapshot: missing header");
  Snapshot s;
  bool have_n = false, have_L = false, have_t = false;
  std::istringstream head(line.substr(2));
  std::string item;
  while (head >> item) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error("snapshot: bad header item '" + item + "'");
    const std::string key = item.substr(0, eq), value = item.substr(eq + 1);
    if (key == "n") {
      s.n = static_cast<int>(parse_real(value, "n"));
      have_n = true;
    } else if (key == "L") {
      s.L = parse_real(value, "L");
      have_L = true;
    } else if (key == "t") {
      s.t = parse_real(value, "t");
      have_t = true;
    } else if (key == "field") {
      s.field = value;
    }
  }
  if (!have_n || !have_L || !have_t || s.field.empty() || s.n < 1) {
    throw Error("snapshot: incomplete header");
  }
  if (!std::getline(in, line) || line.rfind("#", 0) != 0) throw Error("snapshot: missing layout line");
  s.values.reserve(static_cast<std::size_t>(s.n) * s.n);
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string token;
    int cols = 0;
    while (std::getline(row, token, ',')) {
      s.values.push_back(parse_real(token, "value"));
      ++cols;
    }
    if (cols != s.n) throw Error("snapshot: row " + std::to_string(rows) + " has wrong length");
    ++rows;
  }
  if (rows != s.n) throw Error("snapshot: expected " + std::to_string(s.n) + " rows");
  return s;
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open snapshot file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_snapshot(ss.str());
}

}  // namespace mmc::harness
