#include <cmath>
#include <limits>
#include <string>

#include "confheat/error.hpp"
#include "confheat/experiment.hpp"
#include "confheat/report.hpp"
#include "doctest.h"

using namespace confheat;
using namespace confheat::experiment;

TEST_CASE("defaults are filled in") {
  const Validation v = validate_config(R"({"experiment":"diffuse"})");
  REQUIRE(v.ok());
  const Json e = v.config->effective();
  CHECK(e.at("experiment") == "diffuse");
  CHECK(e.at("params").at("t") == 0.5);
  CHECK(e.at("params").contains("dim"));
  CHECK_FALSE(e.contains("output"));
  CHECK_FALSE(e.contains("threads"));
}

TEST_CASE("every experiment validates with defaults") {
  for (const auto& name : experiment_names()) {
    const Validation v = validate_document(Json{{"experiment", name}});
    CHECK_MESSAGE(v.ok(), name);
  }
}

TEST_CASE("validation collects every error") {
  const Validation one = validate_config(R"({"experiment":"diffuse","params":{"t":-1}})");
  CHECK_FALSE(one.ok());
  CHECK(one.errors.size() == 1);
  const Validation two = validate_config(R"({"experiment":"diffuse","params":{"t":-1,"pad":-2}})");
  CHECK(two.errors.size() == 2);
  const Validation unknown = validate_config(R"({"experiment":"diffuse","colour":"red"})");
  CHECK(unknown.errors.size() == 1);
  CHECK_FALSE(validate_config("{not json").ok());
  CHECK_FALSE(validate_config(R"({"experiment":"no-such"})").ok());
  CHECK_FALSE(validate_config(R"({"params":{}})").ok());
  CHECK_FALSE(validate_config(R"({"experiment":"diffuse","replicas":0})").ok());
}

TEST_CASE("overrides") {
  Json doc = Json::parse(R"({"experiment":"semigroup-exp"})");
  apply_override(doc, "seed=7");
  apply_override(doc, "a=0.25");
  apply_override(doc, "params.shape=box");
  apply_override(doc, "center=[0.5,0]");
  CHECK(doc.at("seed") == 7);
  CHECK(doc.at("params").at("a") == 0.25);
  CHECK(doc.at("params").at("shape") == "box");
  CHECK(doc.at("params").at("center").size() == 2);
  CHECK_THROWS_AS(apply_override(doc, "novalue"), InputError);
  CHECK_THROWS_AS(apply_override(doc, "=3"), InputError);
}

TEST_CASE("csv formatting") {
  CHECK(report::csv_field("plain") == "plain");
  CHECK(report::csv_field("a,b") == "\"a,b\"");
  CHECK(report::csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(report::format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(report::format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(report::format_number(std::nan("")).empty());
  CHECK(report::format_number(0.1) == "0.1");
  CHECK(report::number(std::nan("")).is_null());

  report::Report r("x", Json::object());
  r.add({"q", Json{{"k", 1}}, 1.5, 0.0});
  const std::string csv = r.csv();
  CHECK(csv.rfind("experiment,row,quantity,inputs,estimate,std_error,reference,bound,verdict\r\n", 0) == 0);
  CHECK(csv.find("\"{\"\"k\"\":1}\"") != std::string::npos);
  const Json j = Json::parse(r.json());
  CHECK(j.at("schema") == "confheat-report/1");
  CHECK(j.at("verdict") == "pass");
}

TEST_CASE("verdicts combine worst first") {
  CHECK(combine(Verdict::kPass, Verdict::kInconclusive) == Verdict::kInconclusive);
  CHECK(combine(Verdict::kFail, Verdict::kInconclusive) == Verdict::kFail);
  CHECK(to_string(Verdict::kPass) == "pass");
}

TEST_CASE("rho with unequal particle counts reports inf") {
  const Validation v = validate_config(R"({"experiment":"rho","params":{"dim":1,"a":{"dim":1,"window_radius":2,
      "points":[[[0.0],1]]},"b":{"dim":1,"window_radius":2,"points":[[[0.0],1],[[1.0],1]]}}})");
  REQUIRE(v.ok());
  const report::Report r = run(*v.config);
  CHECK(r.verdict() == Verdict::kPass);
  CHECK(r.csv().find(",inf,") != std::string::npos);
}

TEST_CASE("reports do not depend on the thread count") {
  Validation v = validate_config(R"({"experiment":"semigroup-exp","replicas":500,"seed":3})");
  REQUIRE(v.ok());
  CHECK(run(*v.config, 1).json() == run(*v.config, 3).json());
}

TEST_CASE("phi zero gives one exactly") {
  const Validation v = validate_config(R"({"experiment":"semigroup-exp","replicas":50,"params":{"a":0}})");
  REQUIRE(v.ok());
  const report::Report r = run(*v.config);
  CHECK(r.verdict() == Verdict::kPass);
  for (const auto& row : r.rows()) CHECK(row.estimate == 1.0);
}

TEST_CASE("invariance with too small a pad is a configuration error") {
  const Validation v = validate_config(
      R"({"experiment":"invariance","replicas":100,"params":{"functional":"count","t":0.5,"outer_radius":3}})");
  REQUIRE(v.ok());
  CHECK_THROWS_AS(run(*v.config), ConfigurationError);
}
