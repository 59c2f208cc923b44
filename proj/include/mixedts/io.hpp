#pragma once

// File formats: parameter sets as JSON, samples as CSV with a header row.
//
// Univariate parameters:
//   {"mu", "beta", "alpha", "lambda_plus", "lambda_minus", "a", "b"}
// Multivariate parameters:
//   {"marginals": [{"mu", "beta", "alpha", "lambda_plus", "lambda_minus",
//                   "l", "m"}, ...], "n", "k"}   (k defaults to 1)

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "mixedts/multivariate.hpp"
#include "mixedts/univariate.hpp"

namespace mixedts::io {

using Json = nlohmann::ordered_json;
using ParamSet = std::variant<UnivariateParams, MultivariateParams>;

/// Throws InvalidParameter naming the offending key on schema errors.
ParamSet params_from_json(const Json& j);
Json to_json(const UnivariateParams& p);
Json to_json(const MultivariateParams& p);
Json to_json(const ParamSet& p);

Json read_json(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);

/// Writes to a temporary file beside `path`, then renames it into place.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

/// Shortest decimal that round-trips the double.
std::string format_double(double v);

/// Comma-separated table with header row y1..yN.
std::string sample_to_csv(const SampleMatrix& sample);
std::string columns_to_csv(const std::vector<std::string>& header,
                           const std::vector<std::vector<double>>& columns);

/// Parses a header row plus numeric rows.  Rejects ragged rows and
/// non-numeric cells.
SampleMatrix sample_from_csv(const std::string& text);
SampleMatrix read_sample(const std::filesystem::path& path);

}  // namespace mixedts::io
