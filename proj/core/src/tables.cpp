#include "aeig/tables.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace aeig {

namespace {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

class LineParser {
 public:
  LineParser(std::filesystem::path path, std::size_t line) : path_(std::move(path)), line_(line) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw TableError(path_.string() + ":" + std::to_string(line_) + ": " + what);
  }

  double number(const std::string& cell) const {
    try {
      std::size_t used = 0;
      const double v = std::stod(cell, &used);
      if (used != cell.size()) fail("trailing characters in number '" + cell + "'");
      return v;
    } catch (const std::logic_error&) {
      fail("expected a number, found '" + cell + "'");
    }
  }

  std::size_t integer(const std::string& cell) const {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
      fail("expected a nonnegative integer, found '" + cell + "'");
    }
    return v;
  }

  template <typename F>
  auto parse_enum(const std::string& cell, F parse) const {
    try {
      return parse(cell);
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }

 private:
  std::filesystem::path path_;
  std::size_t line_;
};

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TableError(path.string() + ": cannot open table");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty()) throw TableError(path.string() + ": table is empty");
  return lines;
}

}  // namespace

std::string trial_table_header(std::size_t n_regions) {
  std::string h = "k,strategy,planner,trial,h_true,h_est";
  for (std::size_t i = 0; i < n_regions; ++i) h += ",rho_bar_" + std::to_string(i);
  for (std::size_t i = 0; i < n_regions; ++i) h += ",rho_hat_" + std::to_string(i);
  return h;
}

std::string aggregate_table_header() {
  return "k,strategy,planner,n_trials,h_true_q1,h_true_median,h_true_q3,"
         "h_est_q1,h_est_median,h_est_q3,gap_q1,gap_median,gap_q3";
}

void write_trial_table(std::ostream& os, Strategy strategy, PlannerKind planner, std::size_t trial,
                       const TrialMetrics& m) {
  const std::size_t n = m.rho_bar.empty() ? 0 : m.rho_bar.front().size();
  os << trial_table_header(n) << '\n';
  for (std::size_t k = 0; k < m.horizon(); ++k) {
    os << k << ',' << to_string(strategy) << ',' << to_string(planner) << ',' << trial << ','
       << format_number(m.h_true[k]) << ',' << format_number(m.h_est[k]);
    for (double v : m.rho_bar[k]) os << ',' << format_number(v);
    for (double v : m.rho_hat[k]) os << ',' << format_number(v);
    os << '\n';
  }
}

void write_aggregate_table(std::ostream& os, Strategy strategy, PlannerKind planner,
                           const QuartileSummary& s) {
  os << aggregate_table_header() << '\n';
  for (std::size_t k = 0; k < s.horizon(); ++k) {
    os << k << ',' << to_string(strategy) << ',' << to_string(planner) << ',' << s.n_trials;
    for (const Quartiles* q : {&s.h_true, &s.h_est, &s.gap}) {
      os << ',' << format_number(q->q1[k]) << ',' << format_number(q->median[k]) << ','
         << format_number(q->q3[k]);
    }
    os << '\n';
  }
}

TrialTable read_trial_table(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  const auto header = split(lines.front());
  if (header.size() < 8 || (header.size() - 6) % 2 != 0 ||
      lines.front().rfind("k,strategy,planner,trial,h_true,h_est", 0) != 0) {
    throw TableError(path.string() + ":1: not a trial table header");
  }
  TrialTable t;
  t.n_regions = (header.size() - 6) / 2;
  if (lines.front() != trial_table_header(t.n_regions)) {
    throw TableError(path.string() + ":1: unexpected column names");
  }
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const LineParser p(path, l + 1);
    const auto cells = split(lines[l]);
    if (cells.size() != header.size()) {
      p.fail("expected " + std::to_string(header.size()) + " columns, found " +
             std::to_string(cells.size()));
    }
    if (p.integer(cells[0]) != l - 1) p.fail("step index out of sequence");
    const Strategy s = p.parse_enum(cells[1], parse_strategy);
    const PlannerKind pk = p.parse_enum(cells[2], parse_planner_kind);
    const std::size_t trial = p.integer(cells[3]);
    if (l == 1) {
      t.strategy = s;
      t.planner = pk;
      t.trial = trial;
    } else if (s != t.strategy || pk != t.planner || trial != t.trial) {
      p.fail("strategy/planner/trial changes mid-table");
    }
    t.h_true.push_back(p.number(cells[4]));
    t.h_est.push_back(p.number(cells[5]));
    std::vector<double> bar(t.n_regions), hat(t.n_regions);
    for (std::size_t i = 0; i < t.n_regions; ++i) {
      bar[i] = p.number(cells[6 + i]);
      hat[i] = p.number(cells[6 + t.n_regions + i]);
    }
    t.rho_bar.push_back(std::move(bar));
    t.rho_hat.push_back(std::move(hat));
  }
  return t;
}

AggregateTable read_aggregate_table(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.front() != aggregate_table_header()) {
    throw TableError(path.string() + ":1: not an aggregate table header");
  }
  AggregateTable t;
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const LineParser p(path, l + 1);
    const auto cells = split(lines[l]);
    if (cells.size() != 13) p.fail("expected 13 columns, found " + std::to_string(cells.size()));
    if (p.integer(cells[0]) != l - 1) p.fail("step index out of sequence");
    const Strategy s = p.parse_enum(cells[1], parse_strategy);
    const PlannerKind pk = p.parse_enum(cells[2], parse_planner_kind);
    const std::size_t n_trials = p.integer(cells[3]);
    if (l == 1) {
      t.strategy = s;
      t.planner = pk;
      t.summary.n_trials = n_trials;
    } else if (s != t.strategy || pk != t.planner || n_trials != t.summary.n_trials) {
      p.fail("strategy/planner/n_trials changes mid-table");
    }
    std::size_t c = 4;
    for (Quartiles* q : {&t.summary.h_true, &t.summary.h_est, &t.summary.gap}) {
      q->q1.push_back(p.number(cells[c++]));
      q->median.push_back(p.number(cells[c++]));
      q->q3.push_back(p.number(cells[c++]));
    }
  }
  return t;
}

}  // namespace aeig
