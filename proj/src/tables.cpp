#include "leakstudy/tables.hpp"

#include <cmath>
#include <map>
#include <set>

#include <fmt/format.h>

#include "leakstudy/csv.hpp"

namespace leakstudy {

std::string fmt_num(double x) {
  if (std::isnan(x)) return "NaN";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{}", x);
}

std::string fmt_opt(const std::optional<double>& x) { return x ? fmt_num(*x) : ""; }

std::string stars_for(const std::optional<double>& p) {
  if (!p) return "";
  return significance_stars(*p);
}

namespace {

std::vector<std::string> study_fields(const StudyRow& r) {
  return {window_label(r.window), std::to_string(r.test.n), fmt_num(r.test.estimate), fmt_opt(r.test.std_err),
          fmt_opt(r.test.t), fmt_opt(r.test.p)};
}

std::string pct(double x, int digits = 2) { return fmt::format("{:.{}f}%", 100.0 * x, digits); }
std::string fixed(const std::optional<double>& x, int digits = 3) {
  if (!x) return "n/a";
  if (std::isinf(*x)) return *x > 0 ? "inf" : "-inf";
  return fmt::format("{:.{}f}", *x, digits);
}

}  // namespace

void write_study_csv(std::ostream& out, const std::vector<StudyRow>& rows) {
  CsvWriter w(out);
  w.row({"window", "n", "estimate", "std_err", "t", "p"});
  for (const auto& r : rows) w.row(study_fields(r));
}

void write_volume_csv(std::ostream& out, const std::vector<StudyRow>& rows) {
  CsvWriter w(out);
  w.row({"window", "n", "estimate", "std_err", "t", "p", "display_pct", "raw_pct"});
  for (const auto& r : rows) {
    auto f = study_fields(r);
    f.push_back(fmt_num(display_percent(r.test.estimate)));
    f.push_back(fmt_num(100.0 * r.test.estimate));
    w.row(f);
  }
}

void write_regression_csv(std::ostream& out, const RegressionTable& table) {
  CsvWriter w(out);
  w.row({"term", "coefficient", "std_err", "t", "p", "stars"});
  for (const auto& r : table.rows) {
    w.row({r.term, fmt_num(r.coefficient), fmt_num(r.std_err), fmt_num(r.t), fmt_num(r.p), r.stars});
  }
  w.row({"_r2", fmt_num(table.r2), "", "", "", ""});
  w.row({"_f", fmt_opt(table.f_stat), "", "", "", ""});
  w.row({"_f_p", fmt_opt(table.f_p_value), "", "", "", ""});
  w.row({"_n", std::to_string(table.n), "", "", "", ""});
}

void write_correlation_csv(std::ostream& out, const CorrelationMatrix& m) {
  CsvWriter w(out);
  std::vector<std::string> header{"variable"};
  header.insert(header.end(), m.names.begin(), m.names.end());
  w.row(header);
  for (std::size_t i = 0; i < m.names.size(); ++i) {
    std::vector<std::string> row{m.names[i]};
    for (std::size_t j = 0; j < m.names.size(); ++j) {
      const double v = m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      row.push_back(std::isnan(v) ? "" : fmt_num(v));
    }
    w.row(row);
  }
}

std::string markdown_daily_study(const std::string& title, const std::vector<StudyRow>& days,
                                 const std::vector<StudyRow>& windows) {
  std::string s = fmt::format("### {}\n\n", title);
  s += "| Day | N | AAR | t-stat | p-value |\n|---:|---:|---:|---:|---:|\n";
  for (const auto& r : days) {
    s += fmt::format("| {} | {} | {}{} | {} | {} |\n", r.window.first, r.test.n, pct(r.test.estimate),
                     stars_for(r.test.p), fixed(r.test.t), fixed(r.test.p));
  }
  s += "\n| Window | N | CAAR | t-stat | p-value |\n|:---|---:|---:|---:|---:|\n";
  for (const auto& r : windows) {
    s += fmt::format("| {} | {} | {}{} | {} | {} |\n", window_label(r.window), r.test.n, pct(r.test.estimate),
                     stars_for(r.test.p), fixed(r.test.t), fixed(r.test.p));
  }
  return s + "\n";
}

std::string markdown_intraday_study(const std::string& title, const std::vector<PanelGroup>& groups,
                                    const std::vector<std::vector<StudyRow>>& rows) {
  std::string s = fmt::format("### {}\n\n| Minutes |", title);
  std::string rule = "|---:|";
  for (const auto& g : groups) {
    s += fmt::format(" {} CAAR | N | t-stat | p-value |", g.label);
    rule += "---:|---:|---:|---:|";
  }
  s += "\n" + rule + "\n";
  const std::size_t n_rows = rows.empty() ? 0 : rows.front().size();
  for (std::size_t i = 0; i < n_rows; ++i) {
    s += fmt::format("| {} |", rows.front()[i].window.last);
    for (const auto& col : rows) {
      const auto& r = col[i];
      if (r.test.n == 0) {
        s += " n/a | 0 | n/a | n/a |";
        continue;
      }
      s += fmt::format(" {}{} | {} | {} | {} |", pct(r.test.estimate, 3), stars_for(r.test.p), r.test.n,
                       fixed(r.test.t), fixed(r.test.p));
    }
    s += "\n";
  }
  return s + "\n";
}

std::string markdown_volume_study(const std::string& title, const std::vector<StudyRow>& periods,
                                  const std::vector<StudyRow>& cumulative, const std::string& period_label) {
  std::string s = fmt::format("### {}\n\n", title);
  s += fmt::format("| {} | N | AAV (log pts) | AAV | t-stat | p-value |\n|---:|---:|---:|---:|---:|---:|\n",
                   period_label);
  for (const auto& r : periods) {
    s += fmt::format("| {} | {} | {:.4f} | {:.1f}%{} | {} | {} |\n", r.window.last, r.test.n, r.test.estimate,
                     display_percent(r.test.estimate), stars_for(r.test.p), fixed(r.test.t), fixed(r.test.p));
  }
  s += "\n| Window | N | CAAV (log pts) | CAAV | t-stat | p-value |\n|:---|---:|---:|---:|---:|---:|\n";
  for (const auto& r : cumulative) {
    s += fmt::format("| {} | {} | {:.4f} | {:.1f}%{} | {} | {} |\n", window_label(r.window), r.test.n,
                     r.test.estimate, display_percent(r.test.estimate), stars_for(r.test.p), fixed(r.test.t),
                     fixed(r.test.p));
  }
  return s + "\n";
}

std::string markdown_regressions(const std::string& title, const std::vector<std::string>& column_labels,
                                 const std::vector<RegressionTable>& columns) {
  std::string s = fmt::format("### {}\n\n| Variable |", title);
  std::string rule = "|:---|";
  for (const auto& l : column_labels) {
    s += fmt::format(" {} |", l);
    rule += "---:|";
  }
  s += "\n" + rule + "\n";

  // Union of terms in first-seen order; fixed-effect dummies are summarised.
  std::vector<std::string> terms;
  std::set<std::string> seen;
  for (const auto& c : columns) {
    for (const auto& r : c.rows) {
      if (r.term.find(':') != std::string::npos) continue;
      if (seen.insert(r.term).second) terms.push_back(r.term);
    }
  }
  for (const auto& term : terms) {
    std::string coef_line = fmt::format("| {} |", term);
    std::string se_line = "| |";
    for (const auto& c : columns) {
      const CoefficientRow* row = nullptr;
      for (const auto& r : c.rows) {
        if (r.term == term) row = &r;
      }
      if (row) {
        coef_line += fmt::format(" {:.4f}{} |", row->coefficient, row->stars);
        se_line += fmt::format(" ({:.4f}) |", row->std_err);
      } else {
        coef_line += " |";
        se_line += " |";
      }
    }
    s += coef_line + "\n" + se_line + "\n";
  }
  for (const char* fe : {"timeofday", "day", "year", "region"}) {
    std::string line = fmt::format("| {} FE |", fe);
    for (const auto& c : columns) {
      bool has = false;
      for (const auto& r : c.rows) {
        if (r.term.rfind(std::string(fe) + ":", 0) == 0) has = true;
      }
      line += has ? " Yes |" : " No |";
    }
    s += line + "\n";
  }
  std::string r2 = "| R² |";
  std::string f = "| F-stat |";
  std::string n = "| N |";
  for (const auto& c : columns) {
    r2 += fmt::format(" {:.3f} |", c.r2);
    f += c.f_stat ? fmt::format(" {:.3f}{} |", *c.f_stat, stars_for(c.f_p_value)) : std::string(" n/a |");
    n += fmt::format(" {} |", c.n);
  }
  return s + r2 + "\n" + f + "\n" + n + "\n\n";
}

std::string markdown_correlations(const std::string& title, const CorrelationMatrix& m) {
  std::string s = fmt::format("### {}\n\n| |", title);
  std::string rule = "|:---|";
  for (const auto& n : m.names) {
    s += fmt::format(" {} |", n);
    rule += "---:|";
  }
  s += "\n" + rule + "\n";
  for (std::size_t i = 0; i < m.names.size(); ++i) {
    s += fmt::format("| {} |", m.names[i]);
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      s += std::isnan(v) ? " n/a |" : fmt::format(" {:.2f} |", v);
    }
    for (std::size_t j = i + 1; j < m.names.size(); ++j) s += " |";
    s += "\n";
  }
  return s + "\n";
}

}  // namespace leakstudy
