#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "plk/io.hpp"

namespace plk::cli {

using io::Json;

enum Exit : int { ok = 0, failed = 1, usage = 2, parse_failure = 3, unknown_builtin = 4, schema_violation = 5, error = 6 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Options every verb accepts.
struct Common {
  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance;
  std::string report_path;

  std::uint64_t need_seed(const std::string& why) const {
    if (!seed) throw UsageError("--seed is required: " + why);
    return *seed;
  }
  double tol(double fallback) const { return tolerance.value_or(fallback); }
};

/// Verb name → handler producing a report.
using Handlers = std::map<CLI::App*, std::function<Json()>>;

void add_common(CLI::App* sub, Common& c);
void register_lift_verbs(CLI::App& app, Handlers& h, Common& c);
void register_morin_verbs(CLI::App& app, Handlers& h, Common& c);

// shared helpers
Json load(const std::string& path);
void write_json(const std::string& path, const Json& j);
/// One series per file; header row names the columns.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
std::vector<Rational> rationals(const std::string& csv);
Rational rational(const std::string& s);
void fail(Json& report, const std::string& message);

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

}  // namespace plk::cli
