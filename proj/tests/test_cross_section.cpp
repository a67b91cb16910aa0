#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "leakstudy/cross_section.hpp"
#include "leakstudy/error.hpp"
#include "support.hpp"

using namespace leakstudy;

namespace {

const CoefficientRow& row_of(const RegressionTable& t, const std::string& term) {
  const auto it = std::find_if(t.rows.begin(), t.rows.end(), [&](const CoefficientRow& r) { return r.term == term; });
  REQUIRE(it != t.rows.end());
  return *it;
}

}  // namespace

TEST_CASE("covariate transforms") {
  CHECK(std::log(534.49) == doctest::Approx(6.281).epsilon(1e-4));
  CHECK(signed_log(0.0) == 0.0);
  CHECK(signed_log(-std::expm1(2.0)) == doctest::Approx(-2.0));
  CHECK(signed_log(std::expm1(2.0)) == doctest::Approx(2.0));
}

TEST_CASE("time of day buckets") {
  const int session = 390;
  CHECK(time_of_day_bucket({SessionClass::PreMarket, 0, {}}, session) == TimeOfDay::PreMarket);
  CHECK(time_of_day_bucket({SessionClass::InSession, 59, {}}, session) == TimeOfDay::FirstHour);
  CHECK(time_of_day_bucket({SessionClass::InSession, 60, {}}, session) == TimeOfDay::MidSession);
  CHECK(time_of_day_bucket({SessionClass::InSession, 330, {}}, session) == TimeOfDay::LastHour);
  CHECK(time_of_day_bucket({SessionClass::PostMarket, 0, {}}, session) == TimeOfDay::PostMarket);
}

TEST_CASE("fixed effect parsing") {
  const auto fes = parse_fixed_effects("timeofday,day,year");
  CHECK(fes.size() == 3);
  CHECK_THROWS_AS(parse_fixed_effects("month"), Error);
}

TEST_CASE("design layout") {
  auto data = testsupport::synthetic_cross_section(1, 40, 0.1);
  data.events[3].firm.reset();
  data.events[5].car.reset();
  const auto d = build_design(data.events, DesignSpec{{FixedEffect::Region}, std::nullopt, true});
  CHECK(d.dropped_incomplete == 2);
  CHECK(d.X.rows() == 38);
  CHECK(d.names[0] == "const");
  CHECK(d.names[1] == "issue_size");
  CHECK(d.names[11] == "ln_mktcap");
  // Regions sorted: APAC is the reference level.
  CHECK(d.names[13] == "region:EU");
  CHECK(d.names[14] == "region:NA");
  CHECK(d.names.size() == 15);

  SUBCASE("option dummy changes only its own column") {
    auto flipped = data.events;
    flipped[0].issue.has_option = !flipped[0].issue.has_option;
    const auto d2 = build_design(flipped, DesignSpec{{FixedEffect::Region}, std::nullopt, true});
    const Eigen::MatrixXd diff = d2.X - d.X;
    CHECK(diff.cwiseAbs().sum() == 1.0);
    CHECK(std::fabs(diff(0, 4)) == 1.0);
  }
  SUBCASE("samples") {
    const auto fin = build_design(data.events, DesignSpec{{}, SectorClass::Financial, false});
    const auto non = build_design(data.events, DesignSpec{{}, SectorClass::NonFinancial, false});
    CHECK(fin.X.rows() + non.X.rows() + static_cast<Eigen::Index>(fin.dropped_incomplete + non.dropped_incomplete) == 40);
  }
  SUBCASE("empty sample") {
    std::vector<CrossSectionEvent> none;
    try {
      build_design(none, DesignSpec{});
      FAIL("expected an empty sample");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptySample);
    }
  }
}

TEST_CASE("regression recovers coefficients and nests R2") {
  const auto data = testsupport::synthetic_cross_section(2, 100, 0.2);
  double prev = -1.0;
  std::vector<FixedEffect> fes{FixedEffect::TimeOfDay, FixedEffect::DayOfWeek};
  for (FixedEffect extra : {FixedEffect::Year, FixedEffect::Region}) {
    const auto t = regress(build_design(data.events, DesignSpec{fes, std::nullopt, false}));
    CHECK(t.r2 >= prev - 1e-12);
    prev = t.r2;
    fes.push_back(extra);
  }
  const auto full = regress(build_design(data.events, DesignSpec{fes, std::nullopt, false}));
  CHECK(full.r2 >= prev - 1e-12);
  CHECK(full.n == 100);
  for (const auto& [name, b] : data.truth) {
    const auto& r = row_of(full, name);
    CHECK(std::fabs(r.coefficient - b) < 3.0 * r.std_err);
  }
}

TEST_CASE("regression is invariant to row order") {
  auto data = testsupport::synthetic_cross_section(3, 80, 0.3);
  const DesignSpec spec{{FixedEffect::Year}, std::nullopt, false};
  const auto a = regress(build_design(data.events, spec));
  std::reverse(data.events.begin(), data.events.end());
  const auto b = regress(build_design(data.events, spec));
  for (std::size_t j = 0; j < a.rows.size(); ++j) {
    CHECK(b.rows[j].coefficient == doctest::Approx(a.rows[j].coefficient).epsilon(1e-9));
    CHECK(b.rows[j].std_err == doctest::Approx(a.rows[j].std_err).epsilon(1e-9));
  }
  CHECK(b.r2 == doctest::Approx(a.r2).epsilon(1e-12));
}

TEST_CASE("duplicate covariate is a singular design") {
  auto data = testsupport::synthetic_cross_section(4, 60, 0.3);
  // Every event carries a single bond, so bonds_in_issue duplicates the constant.
  for (auto& e : data.events) e.issue.n_bonds = 1;
  try {
    regress(build_design(data.events, DesignSpec{}));
    FAIL("expected a singular design");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularDesign);
    CHECK(std::string(e.what()).find("bonds_in_issue") != std::string::npos);
  }
}

TEST_CASE("robust standard errors differ but share coefficients") {
  const auto data = testsupport::synthetic_cross_section(5, 100, 0.5);
  const auto d = build_design(data.events, DesignSpec{});
  const auto a = regress(d, false);
  const auto b = regress(d, true);
  for (std::size_t j = 0; j < a.rows.size(); ++j) {
    CHECK(a.rows[j].coefficient == doctest::Approx(b.rows[j].coefficient));
    CHECK(b.rows[j].std_err > 0.0);
  }
}

TEST_CASE("stars") {
  CHECK(significance_stars(0.005) == "***");
  CHECK(significance_stars(0.03) == "**");
  CHECK(significance_stars(0.07) == "*");
  CHECK(significance_stars(0.2).empty());
}

TEST_CASE("correlations") {
  Eigen::MatrixXd m(5, 3);
  m << 1, 2, 7, 2, 4, 7, 3, 6, 7, 4, 8, 7, 5, 11, 7;
  const auto c = correlations(m, {"a", "b", "k"});
  CHECK(c.values(0, 0) == 1.0);
  CHECK(c.values(0, 1) > 0.99);
  CHECK(c.values(0, 1) == c.values(1, 0));
  CHECK(std::isnan(c.values(0, 2)));
  CHECK_THROWS_AS(correlations(m.topRows(1), {"a", "b", "k"}), Error);
}
