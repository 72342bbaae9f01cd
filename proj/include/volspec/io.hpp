#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "volspec/curve.hpp"
#include "volspec/estimators.hpp"
#include "volspec/fisher.hpp"
#include "volspec/mc.hpp"
#include "volspec/simulate.hpp"

namespace volspec {

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Json = nlohmann::ordered_json;

/// Grammar:
///   const:<sigma> | quartic:<a>,<b>,<c> | cos:<n>,<alpha> | table:<path>
/// `table:` reads a CSV with header `t,sigma`. Syntax errors raise ConfigError
/// naming the character position; positivity violations raise DomainError.
VolatilityCurve parse_curve_spec(std::string_view text);

/// Inverse of parse_curve_spec for the closed-form kinds (shortest round-trip
/// number formatting). Tabulated curves need the path they were loaded from.
std::string format_curve_spec(const VolatilityCurve& curve, std::string_view table_path = {});

VolatilityCurve read_curve_table(const std::filesystem::path& path);
void write_curve_table(const VolatilityCurve& curve, const std::filesystem::path& path);

/// Observation CSV: header `i,y`, rows 1..n.
void write_observations_csv(const ObservationSeries& obs, std::ostream& out);
void write_observations_csv(const ObservationSeries& obs, const std::filesystem::path& path);
ObservationSeries read_observations_csv(std::istream& in, double delta);
ObservationSeries read_observations_csv(const std::filesystem::path& path, double delta);

std::string to_string(WeightMode mode);
std::string to_string(BiasCorrection mode);
std::string to_string(SpotKernel kernel);
std::string to_string(PilotMode mode);
WeightMode parse_weight_mode(std::string_view text);
BiasCorrection parse_bias_correction(std::string_view text);
SpotKernel parse_spot_kernel(std::string_view text);
PilotMode parse_pilot_mode(std::string_view text);

Json to_json(const EstimatorConfig& config);
Json to_json(const IvEstimate& estimate);
Json to_json(const SpotEstimate& estimate);
Json to_json(const FisherReport& report);
Json to_json(const SeriesIdentity& identity);
Json to_json(const McConfig& config);
/// McReport with the configuration echoed under "config"; wall time omitted.
Json to_json(const McReport& report, const McConfig& config);

/// Keys: curve, n, delta, blocks, J, reps, base_seed, weight_mode,
/// bias_correction, spot_kernel, spot_bandwidth, pilot_leave_one_out, pilot, threads. Only `curve` is
/// required; unknown keys are rejected.
McConfig mc_config_from_json(const Json& j);
McConfig read_mc_config(const std::filesystem::path& path);

/// Per-replicate estimates as CSV `rep,iv_hat`.
void write_samples_csv(const McReport& report, const std::filesystem::path& path);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

}  // namespace volspec
