#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "kerrwave/core/errors.hpp"
#include "kerrwave/core/fields.hpp"

namespace kerrwave {

// One measured quantity against its acceptance threshold. criterion 0 marks
// auxiliary checks that belong to no numbered criterion.
struct Check {
  int criterion = 0;
  std::string name;
  double value = 0.0;
  std::string tolerance;
  bool pass = false;
};

// Columns of doubles; footer rows carry fitted slopes and similar scalars.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, double>> footer;
};

struct ExperimentResult {
  std::string experiment;
  std::vector<Check> checks;
  std::vector<Table> tables;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

inline std::string format_number(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

inline std::string format_check(const Check& c) {
  std::ostringstream s;
  s << (c.pass ? "PASS" : "FAIL") << "  " << c.name << " = " << std::setprecision(6) << c.value << "  (" << c.tolerance
    << ")";
  return s.str();
}

namespace detail {

inline std::ofstream open_for_write(const std::filesystem::path& p) {
  std::ofstream f(p);
  if (!f) throw StructuralError("cannot write " + p.string());
  return f;
}

}  // namespace detail

inline void write_csv(const Table& t, const std::filesystem::path& path) {
  auto f = detail::open_for_write(path);
  for (std::size_t i = 0; i < t.columns.size(); ++i) f << (i ? "," : "") << t.columns[i];
  f << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) f << (i ? "," : "") << format_number(row[i]);
    f << "\n";
  }
  for (const auto& [key, value] : t.footer) f << key << "," << format_number(value) << "\n";
}

// CSV per table, an "x y" series file per non-leading column, and summary.txt.
inline void emit_report(const ExperimentResult& r, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw StructuralError("cannot create output directory " + dir.string());
  for (const auto& t : r.tables) {
    write_csv(t, dir / (t.name + ".csv"));
    for (std::size_t c = 1; c < t.columns.size(); ++c) {
      auto f = detail::open_for_write(dir / (t.name + "." + t.columns[c] + ".dat"));
      for (const auto& row : t.rows)
        if (c < row.size()) f << format_number(row[0]) << " " << format_number(row[c]) << "\n";
    }
  }
  auto f = detail::open_for_write(dir / "summary.txt");
  f << "experiment " << r.experiment << "\n";
  for (const auto& c : r.checks) f << "criterion " << c.criterion << "  " << format_check(c) << "\n";
  f << (r.all_pass() ? "all checks passed" : "some checks failed") << "\n";
}

// Flat binary snapshot: int32 rows1, rows2, rows3, n_x2, then float64 t, then
// u1, u2, u3 row-major (rows ordered x1 < 0 block first).
inline void write_snapshot(const Field2D& f, double t, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StructuralError("cannot write " + path.string());
  const std::int32_t dims[4] = {f.rows1, f.rows2, f.rows3, f.n_x2};
  out.write(reinterpret_cast<const char*>(dims), sizeof dims);
  out.write(reinterpret_cast<const char*>(&t), sizeof t);
  for (int c = 0; c < 3; ++c)
    out.write(reinterpret_cast<const char*>(f.comp(c).data()),
              static_cast<std::streamsize>(f.comp(c).size() * sizeof(double)));
}

inline Field2D read_snapshot(const std::filesystem::path& path, double& t) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StructuralError("cannot read " + path.string());
  std::int32_t dims[4];
  in.read(reinterpret_cast<char*>(dims), sizeof dims);
  in.read(reinterpret_cast<char*>(&t), sizeof t);
  Field2D f;
  f.rows1 = dims[0];
  f.rows2 = dims[1];
  f.rows3 = dims[2];
  f.n_x2 = dims[3];
  const int rows[3] = {f.rows1, f.rows2, f.rows3};
  for (int c = 0; c < 3; ++c) {
    f.comp(c).resize(static_cast<std::size_t>(rows[c]) * f.n_x2);
    in.read(reinterpret_cast<char*>(f.comp(c).data()), static_cast<std::streamsize>(f.comp(c).size() * sizeof(double)));
  }
  if (!in) throw StructuralError("truncated snapshot " + path.string());
  f.time_stamp = t;
  return f;
}

}  // namespace kerrwave
