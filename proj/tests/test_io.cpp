#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "volspec/errors.hpp"
#include "volspec/io.hpp"
#include "volspec/simulate.hpp"
#include "volspec/verify.hpp"

using namespace volspec;
namespace fs = std::filesystem;

namespace {

fs::path temp_path(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "volspec_test_io";
  fs::create_directories(dir);
  return dir / name;
}

std::string read_all(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("curve spec parsing") {
  CHECK(parse_curve_spec("const:1.0") == VolatilityCurve::constant(1.0));
  CHECK(parse_curve_spec("quartic:0.02,0.2,0.5") == VolatilityCurve::shifted_quartic(0.02, 0.2, 0.5));
  CHECK(parse_curve_spec("cos:10, 0.5") == VolatilityCurve::cosine_perturbation(10, 0.5));
  CHECK(parse_curve_spec("quartic:0.02,0.2,0.5").sigma2(0.0) == doctest::Approx(1.05625e-3));
}

TEST_CASE("curve spec errors carry a position") {
  auto message = [](const std::string& spec) {
    try {
      (void)parse_curve_spec(spec);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  const auto missing = message("quartic:0.02,0.2");
  CHECK(missing.find("position") != std::string::npos);
  CHECK(message("const:abc").find("position 6") != std::string::npos);
  CHECK(message("quartic:0.02,x,0.5").find("position 13") != std::string::npos);
  CHECK(message("wave:1").find("unknown curve kind") != std::string::npos);
  CHECK(message("const").find("position 0") != std::string::npos);
  CHECK(message("cos:2.5,0.5").find("integer") != std::string::npos);
  CHECK_THROWS_AS(parse_curve_spec("const:-1"), DomainError);
  CHECK_THROWS_AS(parse_curve_spec("quartic:-0.01,1,0.5"), DomainError);
}

TEST_CASE("curve spec round trip") {
  for (const std::string spec : {"const:1.0", "const:0.1", "quartic:0.02,0.2,0.5", "quartic:1e-3,-1e-4,0.3333333333333333",
                                 "cos:7,0.9"}) {
    const auto curve = parse_curve_spec(spec);
    const auto again = parse_curve_spec(format_curve_spec(curve));
    CHECK(again == curve);
    CHECK(format_curve_spec(again) == format_curve_spec(curve));
  }
}

TEST_CASE("curve tables") {
  const auto path = temp_path("sine.csv");
  const auto curve = sine_test_curve(257);
  write_curve_table(curve, path);
  const auto loaded = parse_curve_spec("table:" + path.string());
  CHECK(loaded == curve);
  CHECK(format_curve_spec(loaded, path.string()) == "table:" + path.string());
  CHECK_THROWS_AS(format_curve_spec(loaded), ConfigError);

  const auto bad = temp_path("bad.csv");
  {
    std::ofstream out(bad);
    out << "t,sigma\n0,1\n0.25,0.5\n0.5,-0.2\n1,1\n";
  }
  try {
    (void)parse_curve_spec("table:" + bad.string());
    FAIL("expected a positivity error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("t=") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_curve_spec("table:" + temp_path("missing.csv").string()), IoError);
}

TEST_CASE("observation CSV round trip is exact") {
  const auto q = VolatilityCurve::shifted_quartic(0.02, 0.2, 0.5);
  const auto obs = simulate_observations(q, 1000, 0.01, 3);
  const auto path = temp_path("obs.csv");
  write_observations_csv(obs, path);
  const auto back = read_observations_csv(path, 0.01);
  CHECK(back.n == 1000);
  CHECK(back.values == obs.values);
  write_observations_csv(back, path);
  const auto first = read_all(path);
  write_observations_csv(obs, path);
  CHECK(read_all(path) == first);
  CHECK(first.rfind("i,y\n1,", 0) == 0);
}

TEST_CASE("malformed observation CSV") {
  std::istringstream no_header("1,0.5\n");
  CHECK_THROWS_AS(read_observations_csv(no_header, 0.0), ConfigError);
  std::istringstream gap("i,y\n1,0.5\n3,0.1\n");
  CHECK_THROWS_AS(read_observations_csv(gap, 0.0), ConfigError);
  std::istringstream junk("i,y\n1,zz\n");
  CHECK_THROWS_AS(read_observations_csv(junk, 0.0), ConfigError);
  std::istringstream empty("i,y\n");
  CHECK_THROWS_AS(read_observations_csv(empty, 0.0), ConfigError);
}

TEST_CASE("mc config JSON") {
  const auto c = mc_config_from_json(Json::parse(R"({"curve":"quartic:0.02,0.2,0.5","reps":10,"weight_mode":"oracle"})"));
  CHECK(c.reps == 10);
  CHECK(c.n == 30000);
  CHECK(c.weight_mode == WeightMode::oracle);
  CHECK(c.curve == VolatilityCurve::shifted_quartic(0.02, 0.2, 0.5));
  const auto again = mc_config_from_json(to_json(c));
  CHECK(to_json(again).dump() == to_json(c).dump());
  CHECK_THROWS_AS(mc_config_from_json(Json::parse(R"({"curve":"const:1","bogus":1})")), ConfigError);
  CHECK_THROWS_AS(mc_config_from_json(Json::parse(R"({"n":100})")), ConfigError);
  CHECK_THROWS_AS(mc_config_from_json(Json::parse(R"({"curve":"const:1","n":"many"})")), ConfigError);
  CHECK_THROWS_AS(mc_config_from_json(Json::parse(R"({"curve":"const:1","n":100,"blocks":7})")), ConfigError);
}

TEST_CASE("report JSON has a stable key order") {
  const std::vector<double> samples = {1.0, 2.0, 3.0};
  McConfig c;
  c.curve_spec = "const:1";
  const auto j = to_json(summarize(samples, 2.0, 1.0), c);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"reps", "true_iv", "asymptotic_sd", "mean", "bias", "sd", "rmse",
                                         "rmse_over_asymptotic", "quantiles", "config"});
  CHECK(j.dump().find("wall") == std::string::npos);
}

TEST_CASE("samples CSV") {
  const std::vector<double> samples = {0.5, 0.25};
  const auto path = temp_path("samples.csv");
  write_samples_csv(summarize(samples, 0.0, 1.0), path);
  CHECK(read_all(path) == "rep,iv_hat\n0,0.5\n1,0.25\n");
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3, 5.173611111111111e-4, -2.5e-300, 1e300}) CHECK(std::stod(format_double(v)) == v);
}
