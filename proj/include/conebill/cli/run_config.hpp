#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace conebill::cli {

inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

/// Bad flags or configuration; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { Csv, Json };

struct RunConfig {
  std::string command;            // "elliptic simulate", "spiral verify", ...
  double a = 0.0;                 // spiral parameter
  double semi_a = 2.0;            // elliptic cone semi-axes
  double semi_b = 1.0;
  double c1 = 1.0;                // integral values for `elliptic bound`
  double c2 = 1.0;
  long kmax = 100000;
  long count = 1000;              // trajectories
  long steps = 1000;              // replay / embedded reflections
  int n = 4;                      // ambient dimension for `ndim check`
  long points = 10000;            // Hessian grid size
  std::optional<double> tol;      // overrides the command's primary tolerance
  std::uint64_t seed = 1;
  std::string out;
  std::string svg;
  std::string from;
  OutputFormat format = OutputFormat::Json;
  int threads = 1;

  /// Throws UsageError on an invalid combination.
  void validate() const;

  Json to_json() const;
  static RunConfig from_json(const Json& j);
};

/// Worker count: BILLIARDS_THREADS if set (≥ 1), else hardware concurrency.
int threads_from_env();

/// 17 significant digits; non-finite values as "inf", "-inf", "nan".
std::string format_number(double x);

/// JSON text with every floating-point number written by format_number
/// (non-finite values become null).
std::string dump_json(const Json& j, int indent = 2);

std::string format_name(OutputFormat f);
OutputFormat parse_format(const std::string& s);

}  // namespace conebill::cli
