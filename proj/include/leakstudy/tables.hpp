#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "leakstudy/cross_section.hpp"
#include "leakstudy/event_study.hpp"

namespace leakstudy {

// Shortest round-trip text for a double; empty optionals render empty.
std::string fmt_num(double x);
std::string fmt_opt(const std::optional<double>& x);

// window,n,estimate,std_err,t,p
void write_study_csv(std::ostream& out, const std::vector<StudyRow>& rows);

// Study columns plus display_pct = 100(exp(x)-1) and raw_pct = 100x.
void write_volume_csv(std::ostream& out, const std::vector<StudyRow>& rows);

// term,coefficient,std_err,t,p,stars followed by _r2, _f, _f_p, _n rows.
void write_regression_csv(std::ostream& out, const RegressionTable& table);

void write_correlation_csv(std::ostream& out, const CorrelationMatrix& m);

// Markdown renderings. Percent cells carry stars from the reported p-value.
std::string markdown_daily_study(const std::string& title, const std::vector<StudyRow>& days,
                                 const std::vector<StudyRow>& windows);
std::string markdown_intraday_study(const std::string& title, const std::vector<PanelGroup>& groups,
                                    const std::vector<std::vector<StudyRow>>& rows);
std::string markdown_volume_study(const std::string& title, const std::vector<StudyRow>& periods,
                                  const std::vector<StudyRow>& cumulative, const std::string& period_label);
std::string markdown_regressions(const std::string& title, const std::vector<std::string>& column_labels,
                                 const std::vector<RegressionTable>& columns);
std::string markdown_correlations(const std::string& title, const CorrelationMatrix& m);

// Stars for a reported p-value: *** < 1%, ** < 5%, * < 10%.
std::string stars_for(const std::optional<double>& p);

}  // namespace leakstudy
