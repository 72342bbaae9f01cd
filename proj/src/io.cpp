#include "volspec/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "volspec/errors.hpp"

namespace volspec {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double parse_number(std::string_view field, std::size_t position, std::string_view context) {
  const std::string text = trim(field);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    std::ostringstream msg;
    msg << context << ": expected a number at position " << position << ", got '" << text << "'";
    throw ConfigError(msg.str());
  }
  return v;
}

std::vector<std::pair<std::string_view, std::size_t>> split_fields(std::string_view body,
                                                                   std::size_t offset) {
  std::vector<std::pair<std::string_view, std::size_t>> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = body.find(',', start);
    out.emplace_back(body.substr(start, comma - start), offset + start);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

VolatilityCurve parse_curve_spec(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw ConfigError("curve spec '" + std::string(text) +
                      "': expected '<kind>:' at position 0 (kinds: const, quartic, cos, table)");
  const std::string kind = trim(text.substr(0, colon));
  const std::string_view body = text.substr(colon + 1);
  const std::size_t offset = colon + 1;
  const std::string context = "curve spec '" + std::string(text) + "'";
  auto fields = [&](std::size_t expected) {
    auto f = split_fields(body, offset);
    if (f.size() != expected) {
      std::ostringstream msg;
      msg << context << ": kind '" << kind << "' takes " << expected << " field(s), got "
          << f.size() << " (at position " << (f.size() < expected ? text.size() : f[expected].second)
          << ")";
      throw ConfigError(msg.str());
    }
    return f;
  };
  if (kind == "const") {
    const auto f = fields(1);
    return VolatilityCurve::constant(parse_number(f[0].first, f[0].second, context));
  }
  if (kind == "quartic") {
    const auto f = fields(3);
    return VolatilityCurve::shifted_quartic(parse_number(f[0].first, f[0].second, context),
                                            parse_number(f[1].first, f[1].second, context),
                                            parse_number(f[2].first, f[2].second, context));
  }
  if (kind == "cos") {
    const auto f = fields(2);
    const double n = parse_number(f[0].first, f[0].second, context);
    if (n != std::floor(n) || n < 1)
      throw ConfigError(context + ": cos frequency must be a positive integer (position " +
                        std::to_string(f[0].second) + ")");
    return VolatilityCurve::cosine_perturbation(static_cast<std::int64_t>(n),
                                                parse_number(f[1].first, f[1].second, context));
  }
  if (kind == "table") {
    const std::string path = trim(body);
    if (path.empty()) throw ConfigError(context + ": missing table path at position " + std::to_string(offset));
    return read_curve_table(path);
  }
  throw ConfigError(context + ": unknown curve kind '" + kind + "' at position 0");
}

std::string format_curve_spec(const VolatilityCurve& curve, std::string_view table_path) {
  const auto& p = curve.params();
  if (const auto* c = std::get_if<ConstantCurve>(&p)) return "const:" + format_double(c->sigma);
  if (const auto* q = std::get_if<ShiftedQuarticCurve>(&p))
    return "quartic:" + format_double(q->a) + "," + format_double(q->b) + "," + format_double(q->c);
  if (const auto* c = std::get_if<CosinePerturbationCurve>(&p))
    return "cos:" + std::to_string(c->n_freq) + "," + format_double(c->alpha);
  if (table_path.empty()) throw ConfigError("format_curve_spec: tabulated curve needs its table path");
  return "table:" + std::string(table_path);
}

VolatilityCurve read_curve_table(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  std::vector<Knot> knots;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string row = trim(line);
    if (row.empty()) continue;
    if (line_no == 1 && row == "t,sigma") continue;
    const auto comma = row.find(',');
    const std::string context = path.string() + " line " + std::to_string(line_no);
    if (comma == std::string::npos) throw ConfigError(context + ": expected 't,sigma'");
    knots.push_back({parse_number(std::string_view(row).substr(0, comma), 0, context),
                     parse_number(std::string_view(row).substr(comma + 1), comma + 1, context)});
  }
  return VolatilityCurve::tabulated(std::move(knots));
}

void write_curve_table(const VolatilityCurve& curve, const std::filesystem::path& path) {
  const auto* tab = std::get_if<TabulatedCurve>(&curve.params());
  if (tab == nullptr) throw ConfigError("write_curve_table: curve is not tabulated");
  auto out = open_out(path);
  out << "t,sigma\n";
  for (const auto& k : tab->knots) out << format_double(k.t) << ',' << format_double(k.sigma) << '\n';
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void write_observations_csv(const ObservationSeries& obs, std::ostream& out) {
  out << "i,y\n";
  for (std::size_t i = 0; i < obs.values.size(); ++i)
    out << (i + 1) << ',' << format_double(obs.values[i]) << '\n';
}

void write_observations_csv(const ObservationSeries& obs, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_observations_csv(obs, out);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

ObservationSeries read_observations_csv(std::istream& in, double delta) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "i,y")
    throw ConfigError("observation CSV: expected header 'i,y'");
  ObservationSeries obs;
  obs.delta = delta;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string row = trim(line);
    if (row.empty()) continue;
    const auto comma = row.find(',');
    const std::string context = "observation CSV line " + std::to_string(line_no);
    if (comma == std::string::npos) throw ConfigError(context + ": expected 'i,y'");
    const double index = parse_number(std::string_view(row).substr(0, comma), 0, context);
    if (index != static_cast<double>(obs.values.size() + 1))
      throw ConfigError(context + ": rows must be numbered 1..n in order");
    obs.values.push_back(parse_number(std::string_view(row).substr(comma + 1), comma + 1, context));
  }
  obs.n = obs.values.size();
  if (obs.n == 0) throw ConfigError("observation CSV: no rows");
  return obs;
}

ObservationSeries read_observations_csv(const std::filesystem::path& path, double delta) {
  auto in = open_in(path);
  return read_observations_csv(in, delta);
}

std::string to_string(WeightMode mode) { return mode == WeightMode::adaptive ? "adaptive" : "oracle"; }
std::string to_string(BiasCorrection mode) { return mode == BiasCorrection::paper ? "paper" : "exact"; }
std::string to_string(SpotKernel kernel) { return kernel == SpotKernel::box ? "box" : "local-linear"; }

std::string to_string(PilotMode mode) {
  return mode == PilotMode::first_frequency ? "first-frequency" : "all-frequencies";
}

PilotMode parse_pilot_mode(std::string_view text) {
  if (text == "first-frequency") return PilotMode::first_frequency;
  if (text == "all-frequencies") return PilotMode::all_frequencies;
  throw ConfigError("pilot must be 'first-frequency' or 'all-frequencies', got '" + std::string(text) + "'");
}

WeightMode parse_weight_mode(std::string_view text) {
  if (text == "adaptive") return WeightMode::adaptive;
  if (text == "oracle") return WeightMode::oracle;
  throw ConfigError("weight mode must be 'adaptive' or 'oracle', got '" + std::string(text) + "'");
}

BiasCorrection parse_bias_correction(std::string_view text) {
  if (text == "paper") return BiasCorrection::paper;
  if (text == "exact") return BiasCorrection::exact;
  throw ConfigError("bias correction must be 'paper' or 'exact', got '" + std::string(text) + "'");
}

SpotKernel parse_spot_kernel(std::string_view text) {
  if (text == "box") return SpotKernel::box;
  if (text == "local-linear") return SpotKernel::local_linear;
  throw ConfigError("spot kernel must be 'box' or 'local-linear', got '" + std::string(text) + "'");
}

Json to_json(const EstimatorConfig& c) {
  Json j;
  j["n"] = c.grid.n();
  j["blocks"] = c.grid.blocks();
  j["h"] = c.grid.h();
  j["J"] = c.J;
  j["delta"] = c.delta;
  const double h0 = c.h0();
  j["h0"] = std::isinf(h0) ? Json(nullptr) : Json(h0);
  j["weight_mode"] = to_string(c.weight_mode);
  j["bias_correction"] = to_string(c.bias_correction);
  j["spot_kernel"] = to_string(c.spot_kernel);
  j["spot_bandwidth"] = c.spot_bandwidth;
  j["pilot_leave_one_out"] = c.pilot_leave_one_out;
  j["pilot"] = to_string(c.pilot);
  return j;
}

Json to_json(const IvEstimate& e) {
  Json j;
  j["iv_hat"] = e.iv_hat;
  j["asymptotic_sd"] = e.asymptotic_sd ? Json(*e.asymptotic_sd) : Json(nullptr);
  j["config"] = to_json(e.config);
  return j;
}

Json to_json(const SpotEstimate& e) {
  Json j;
  j["bandwidth"] = e.bandwidth;
  j["centers"] = e.centers;
  j["values"] = e.values;
  return j;
}

Json to_json(const FisherReport& r) {
  Json j;
  j["theta"] = r.theta;
  j["h0"] = r.h0;
  j["J"] = r.J ? Json(*r.J) : Json(nullptr);
  j["value_closed"] = r.value_closed;
  j["value_partial"] = r.value_partial ? Json(*r.value_partial) : Json(nullptr);
  j["lan_normalized"] = r.lan_normalized;
  return j;
}

Json to_json(const SeriesIdentity& s) {
  Json j;
  j["lambda"] = s.lambda;
  j["J"] = s.J;
  j["lhs"] = s.lhs;
  j["tail"] = s.tail;
  j["rhs"] = s.rhs;
  j["diff"] = s.difference();
  return j;
}

Json to_json(const McConfig& c) {
  Json j;
  j["curve"] = c.curve_spec;
  j["n"] = c.n;
  j["delta"] = c.delta;
  j["blocks"] = c.blocks;
  j["J"] = c.J;
  j["reps"] = c.reps;
  j["base_seed"] = c.base_seed;
  j["weight_mode"] = to_string(c.weight_mode);
  j["bias_correction"] = to_string(c.bias_correction);
  j["spot_kernel"] = to_string(c.spot_kernel);
  j["spot_bandwidth"] = c.spot_bandwidth;
  j["pilot_leave_one_out"] = c.pilot_leave_one_out;
  j["pilot"] = to_string(c.pilot);
  return j;
}

Json to_json(const McReport& r, const McConfig& c) {
  Json j;
  j["reps"] = r.reps;
  j["true_iv"] = r.true_value;
  j["asymptotic_sd"] = r.asymptotic_sd;
  j["mean"] = r.mean;
  j["bias"] = r.bias;
  j["sd"] = r.sd;
  j["rmse"] = r.rmse;
  j["rmse_over_asymptotic"] = r.rmse_over_asymptotic;
  j["quantiles"] = Json{{"q05", r.q05}, {"q25", r.q25}, {"q50", r.q50}, {"q75", r.q75}, {"q95", r.q95}};
  j["config"] = to_json(c);
  return j;
}

McConfig mc_config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("mc config: expected a JSON object");
  static const std::vector<std::string> known = {
      "curve", "n", "delta", "blocks", "J", "reps", "base_seed", "weight_mode",
      "bias_correction", "spot_kernel", "spot_bandwidth", "pilot_leave_one_out", "pilot", "threads"};
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("mc config: unknown key '" + key + "'");
  if (!j.contains("curve")) throw ConfigError("mc config: missing required key 'curve'");
  McConfig c;
  try {
    c.curve_spec = j.at("curve").get<std::string>();
    c.curve = parse_curve_spec(c.curve_spec);
    if (j.contains("n")) c.n = j.at("n").get<std::size_t>();
    if (j.contains("delta")) c.delta = j.at("delta").get<double>();
    if (j.contains("blocks")) c.blocks = j.at("blocks").get<std::size_t>();
    if (j.contains("J")) c.J = j.at("J").get<std::size_t>();
    if (j.contains("reps")) c.reps = j.at("reps").get<std::size_t>();
    if (j.contains("base_seed")) c.base_seed = j.at("base_seed").get<std::uint64_t>();
    if (j.contains("weight_mode")) c.weight_mode = parse_weight_mode(j.at("weight_mode").get<std::string>());
    if (j.contains("bias_correction"))
      c.bias_correction = parse_bias_correction(j.at("bias_correction").get<std::string>());
    if (j.contains("spot_kernel")) c.spot_kernel = parse_spot_kernel(j.at("spot_kernel").get<std::string>());
    if (j.contains("spot_bandwidth")) c.spot_bandwidth = j.at("spot_bandwidth").get<double>();
    if (j.contains("pilot_leave_one_out")) c.pilot_leave_one_out = j.at("pilot_leave_one_out").get<bool>();
    if (j.contains("pilot")) c.pilot = parse_pilot_mode(j.at("pilot").get<std::string>());
    if (j.contains("threads")) c.threads = j.at("threads").get<unsigned>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("mc config: ") + e.what());
  }
  c.validate();
  return c;
}

McConfig read_mc_config(const std::filesystem::path& path) {
  auto in = open_in(path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("mc config '" + path.string() + "': " + e.what());
  }
  return mc_config_from_json(j);
}

void write_samples_csv(const McReport& report, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "rep,iv_hat\n";
  for (std::size_t r = 0; r < report.samples.size(); ++r)
    out << r << ',' << format_double(report.samples[r]) << '\n';
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace volspec
