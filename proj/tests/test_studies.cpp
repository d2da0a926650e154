#include <cstdlib>
#include <filesystem>

#include "doctest.h"
#include "exseq/cache.hpp"
#include "exseq/report.hpp"
#include "exseq/studies.hpp"
#include "exseq/verify.hpp"
#include "json.hpp"

using namespace exseq;

TEST_CASE("config text mirrors the flags") {
  StudyConfig cfg;
  apply_config_text(cfg,
                    "# sweep\n"
                    "operators = curl3d, div3d\n"
                    "p_min = 3\n"
                    "p-max = 5  # inline comment\n"
                    "s = 0, 0.5\n"
                    "dual-offset = 4\n"
                    "format = json\n");
  CHECK(cfg.operators.size() == 2);
  CHECK(cfg.operators[1] == ProjectorId::div3d);
  CHECK(cfg.p_min == 3);
  CHECK(cfg.p_max == 5);
  CHECK(cfg.s_values == std::vector<double>{0.0, 0.5});
  CHECK(cfg.dual_offset == 4);
  CHECK(cfg.format == "json");
  CHECK_NOTHROW(validate(cfg));
  CHECK_THROWS(apply_config_text(cfg, "colour = red\n"));
  CHECK_THROWS(apply_config_text(cfg, "p-min\n"));
}

TEST_CASE("validation") {
  StudyConfig ok;
  CHECK_NOTHROW(validate(ok));
  int line = 0;
  auto bad = [&line](auto mutate) {
    ++line;
    CAPTURE(line);
    StudyConfig c;
    mutate(c);
    CHECK_THROWS_AS(validate(c), std::runtime_error);
  };
  bad([](StudyConfig& c) { c.p_min = 5, c.p_max = 4; });
  bad([](StudyConfig& c) { c.p_max = study_p_cap + 1; });
  bad([](StudyConfig& c) { c.s_values = {1.5}; });  // above the 3D limit
  bad([](StudyConfig& c) { c.operators = {ProjectorId::curl2d}, c.s_values = {2.0}; });  // exclusive 2D limit
  bad([](StudyConfig& c) { c.operators = {ProjectorId::grad1d}, c.p_min = 0; });
  bad([](StudyConfig& c) { c.format = "xml"; });
  bad([](StudyConfig& c) { c.operators.clear(); });
  bad([](StudyConfig& c) { c.p_max = 12, c.dual_offset = 12, c.s_values = {0.5}; });  // beyond the master basis degree
  StudyConfig s2;
  s2.operators = {ProjectorId::curl2d};
  s2.s_values = {1.9};
  CHECK_NOTHROW(validate(s2));
  CHECK(parse_operators("all").size() == all_projectors().size());
  CHECK(parse_operators("curl3d,curl3d").size() == 1);
  CHECK_THROWS(parse_operators("curl4d"));
  CHECK_THROWS(parse_s_values("0,x"));
}

TEST_CASE("rates and norms") {
  CHECK(theory_rate(ProjectorId::curl3d, 0.0) == doctest::Approx(1.0));
  CHECK(theory_rate(ProjectorId::curl3d, 0.5) > theory_rate(ProjectorId::curl3d, 0.0));
  CHECK(s_limit(ProjectorId::grad1d) == doctest::Approx(2.0));
  CHECK(s_limit(ProjectorId::grad3d) == doctest::Approx(1.0));
  CHECK(error_norm_name(ProjectorId::curl3d, 0.0) == "Hcurl");
}

TEST_CASE("slope fitting window") {
  CHECK(upper_half_start(2, 10) == 6);
  CHECK(upper_half_start(1, 16) == 9);
  std::vector<int> p;
  std::vector<double> y;
  for (int k = 2; k <= 10; ++k) {
    p.push_back(k);
    y.push_back(3.0 * std::pow(k, -2.5));
  }
  CHECK(upper_half_slope(p, y) == doctest::Approx(-2.5));
  // early points are outside the window
  y[0] = 1e6;
  CHECK(upper_half_slope(p, y) == doctest::Approx(-2.5));
  CHECK(std::isnan(upper_half_slope({2, 3}, {1.0, 0.0})));
}

TEST_CASE("small convergence study") {
  StudyConfig cfg;
  cfg.operators = {ProjectorId::curl2d, ProjectorId::grad1d};
  cfg.p_min = 1;
  cfg.p_max = 4;
  ConvergenceResult a = run_convergence(cfg);
  ConvergenceResult b = run_convergence(cfg);
  REQUIRE(a.records.size() == b.records.size());
  CHECK(!a.records.empty());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].error == b.records[i].error);
    CHECK(a.records[i].flag.empty());
    // same norm on both sides: never better than the best approximation
    if (a.records[i].norm == a.records[i].best_norm) CHECK(a.records[i].ratio >= 1.0 - 1e-8);
    CHECK(!a.records[i].wall_time);
  }
  // sorted by operator, field, s, p
  for (std::size_t i = 1; i < a.records.size(); ++i) {
    const auto& x = a.records[i - 1];
    const auto& y = a.records[i];
    if (x.op == y.op && x.field == y.field && x.s == y.s) CHECK(x.p < y.p);
  }
  CHECK(a.records.front().op == "curl2d");
  CHECK(a.records.back().op == "grad1d");
  CHECK(!a.slopes.empty());
  CHECK(to_csv(convergence_table(a, false)) == to_csv(convergence_table(b, false)));
}

TEST_CASE("polynomial targets are reproduced") {
  StudyConfig cfg;
  cfg.operators = {ProjectorId::div3d, ProjectorId::grad2d};
  cfg.suite = "poly";
  cfg.p_min = 2;
  cfg.p_max = 3;
  for (const auto& r : run_convergence(cfg).records) {
    CAPTURE(r.op);
    CHECK(r.flag == "exact");
  }
}

TEST_CASE("duality study") {
  auto recs = run_duality(ProjectorId::grad2d, "phi2_entire", 2, 4, 6);
  REQUIRE(recs.size() == 3);
  for (const auto& r : recs) {
    CHECK(r.gap > 0.0);
    CHECK(r.gap < 1.0);
    CHECK(r.p_stability < 0.05);
  }
  CHECK_THROWS(run_duality(ProjectorId::curl3d, "u3_entire", 2, 4, 6));
}

TEST_CASE("CSV and JSON rendering") {
  Table t{{"name", "value", "flag", "n"}, {}};
  t.rows.push_back({std::string("a,b"), 1.5, true, 3LL});
  t.rows.push_back({std::string("say \"hi\""), NAN, false, Value()});
  const std::string csv = to_csv(t);
  CHECK(csv ==
        "name,value,flag,n\r\n"
        "\"a,b\",1.5000000000e+00,true,3\r\n"
        "\"say \"\"hi\"\"\",nan,false,\r\n");
  auto j = nlohmann::ordered_json::parse(to_json(t));
  CHECK(j.size() == 2);
  std::vector<std::string> keys;
  for (auto& [k, v] : j[0].items()) keys.push_back(k);
  CHECK(keys == t.columns);
  CHECK(j[1]["value"].is_null());
  CHECK(j[0]["value"].get<double>() == 1.5);
  CHECK(format_double(-INFINITY) == "-inf");
  CHECK_THROWS(render(t, "xml"));
}

TEST_CASE("dimension table and verification subset") {
  for (const auto& r : dims_table(0, 4)) {
    CAPTURE(r.space);
    CHECK(r.match);
  }
  VerifyOptions opt;
  opt.p_max = 3;
  opt.projection_samples = 10;
  opt.sections = {"exact", "projection", "friedrichs", "endpoints"};
  auto rows = run_verification(opt);
  CHECK(!rows.empty());
  for (const auto& r : rows) {
    CAPTURE(r.name);
    CHECK(r.pass);
  }
  CHECK(all_pass(rows));
  opt.sections = {"nonsense"};
  CHECK_THROWS(run_verification(opt));
}

TEST_CASE("matrix cache round trip") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "exseq_cache_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  setenv("EXSEQ_CACHE_DIR", dir.c_str(), 1);
  CHECK(cache_enabled());
  Mat a = Mat::Random(3, 4), b = Mat::Random(2, 1);
  cache_store("probe", {a, b});
  std::vector<Mat> got;
  REQUIRE(cache_load("probe", got));
  REQUIRE(got.size() == 2);
  CHECK(got[0] == a);
  CHECK(got[1] == b);
  CHECK(!cache_load("missing", got));
  // a fresh cell fills the cache and a second one reads it back
  Mat v(4, 3);
  v << 0, 0, 0, 1.1, 0, 0, 0, 0.9, 0, 0.1, 0.1, 1;
  auto g1 = sobolev_gram(Cell::make(v), 4);
  auto g2 = sobolev_gram(Cell::make(v), 4);
  CHECK((g1->H(0.5) - g2->H(0.5)).norm() < 1e-13);
  CHECK(std::distance(fs::directory_iterator(dir), fs::directory_iterator()) >= 2);
  unsetenv("EXSEQ_CACHE_DIR");
  CHECK(!cache_enabled());
  fs::remove_all(dir);
}
