#include "cli/plot.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "switchjump/errors.hpp"

namespace switchjump::cli {

namespace {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  }
  std::set<std::string> distinct(const std::string& name) const {
    std::set<std::string> out;
    const int c = column(name);
    if (c < 0) return out;
    for (const auto& r : rows) {
      if (static_cast<std::size_t>(c) < r.size()) out.insert(r[static_cast<std::size_t>(c)]);
    }
    return out;
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

Table read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("plot: cannot read report '" + path + "'");
  Table t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (t.header.empty()) {
      t.header = split(line);
    } else {
      t.rows.push_back(split(line));
    }
  }
  return t;
}

void require_columns(const Table& t, const std::vector<std::string>& names, const std::string& kind) {
  for (const auto& n : names) {
    if (t.column(n) < 0) throw ConfigurationError("plot: " + kind + " report lacks column '" + n + "'");
  }
}

}  // namespace

void emit_plot_script(const std::string& report_csv, const std::string& kind, const std::string& script_path) {
  static const std::vector<std::string> kinds{"paths", "periodicity", "cesaro", "lyapunov"};
  if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) {
    throw ConfigurationError("plot: unknown kind '" + kind + "'");
  }
  const Table t = read_csv(report_csv);
  const std::string data = std::filesystem::path(report_csv).filename().string();

  std::ostringstream gp;
  gp << "# gnuplot script for " << data << " (" << kind << ")\n";
  gp << "set datafile separator ','\n";
  gp << "set datafile commentschars '#'\n";
  gp << "set terminal pngcairo size 900,600\n";
  gp << "set output '" << std::filesystem::path(script_path).stem().string() << ".png'\n";
  gp << "file = '" << data << "'\n";

  if (t.rows.empty()) {
    gp << "# warning: " << data << " has no data rows; nothing to plot\n";
  } else if (kind == "paths") {
    require_columns(t, {"path", "t", "x_1"}, kind);
    const auto paths = t.distinct("path");
    gp << "set xlabel 't'\nset ylabel 'x_1'\n";
    gp << "plot";
    int shown = 0;
    for (const auto& p : paths) {
      if (shown == 20) break;
      gp << (shown++ ? ", \\\n    " : " ") << "file using (column('path') == " << p
         << " ? column('t') : NaN):(column('x_1')) with lines notitle";
    }
    gp << '\n';
  } else if (kind == "periodicity") {
    require_columns(t, {"t", "x_1"}, kind);
    gp << "binwidth = 0.1\nbin(x) = binwidth * floor(x / binwidth)\n";
    gp << "set xlabel 'x_1'\nset ylabel 'count'\n";
    gp << "plot";
    int k = 0;
    for (const auto& lag : t.distinct("t")) {
      gp << (k++ ? ", \\\n    " : " ") << "file using (column('t') == " << lag
         << " ? bin(column('x_1')) : NaN):(1.0) smooth freq with steps title 't = " << lag << "'";
    }
    gp << '\n';
  } else if (kind == "cesaro") {
    require_columns(t, {"start", "n", "mean", "ci_low", "ci_high"}, kind);
    gp << "set xlabel 'periods n'\nset ylabel 'Cesaro average'\n";
    gp << "plot";
    int k = 0;
    for (const auto& s : t.distinct("start")) {
      gp << (k++ ? ", \\\n    " : " ") << "file using (column('start') == " << s
         << " ? column('n') : NaN):(column('mean')):(column('ci_low')):(column('ci_high')) with yerrorlines title 'start "
         << s << "'";
    }
    gp << '\n';
  } else {
    require_columns(t, {"radius", "regime", "sup"}, kind);
    gp << "set xlabel 'radius'\nset ylabel 'sup L_i V'\n";
    gp << "plot";
    int k = 0;
    for (const auto& r : t.distinct("regime")) {
      gp << (k++ ? ", \\\n    " : " ") << "file using (column('regime') == " << r
         << " ? column('radius') : NaN):(column('sup')) with linespoints title 'regime " << r << "'";
    }
    gp << '\n';
  }

  std::ofstream out(script_path);
  if (!out) throw ConfigurationError("plot: cannot write '" + script_path + "'");
  out << gp.str();
}

}  // namespace switchjump::cli
