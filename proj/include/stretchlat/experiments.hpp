#pragma once
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stretchlat/body.hpp"
#include "stretchlat/count.hpp"
#include "stretchlat/csv.hpp"
#include "stretchlat/optimize.hpp"
#include "stretchlat/stretch.hpp"

namespace stretchlat {

enum class ExperimentKind {
  RateMax,              // deviation of maximizing stretches from balanced
  RateMin,              // same for minimizing stretches
  RemainderFull,        // |count - two-term main| on Z^d
  RemainderPositive,
  RemainderNonnegative,
  RemainderSectionsUnion,
};

struct ExperimentConfig {
  std::string name;
  ExperimentKind kind = ExperimentKind::RemainderFull;
  BodySpec body;
  std::vector<double> t_grid;
  OptimizeConfig opt;                    // rate experiments
  std::optional<StretchFactor> stretch;  // remainder experiments; default balanced
  int samples = 2000;                    // exponent sampling for theoretical slopes
  std::string output;                    // CSV path, empty = don't write
  std::optional<double> max_slope;       // pass/fail threshold on the fitted slope
};

struct ExperimentRow {
  double t = 0.0;
  double statistic = 0.0;  // sup-deviation (rate) or |count - main| (remainder)
  int64_t count = 0;       // optimal value (rate) or lattice count (remainder)
  Vec a;                   // representative stretch
  double main_term = 0.0;  // remainder experiments
  bool complete = true;
};

struct RateFit {
  std::vector<ExperimentRow> rows;
  double fitted_slope = 0.0;        // OLS on (log t, log statistic), zero rows skipped
  bool slope_defined = false;       // needs >= 4 nonzero statistics
  double theoretical_exponent = 0.0;
  double bound_constant = 0.0;      // max statistic / t^theoretical_exponent
  CsvTable csv;
};

RateFit rate_experiment(const ExperimentConfig& cfg);
RateFit remainder_experiment(const ExperimentConfig& cfg);

// Parses a config file ("key = value" lines, one [experiment] section per
// experiment), runs every experiment, writes CSVs and a summary. Parse errors
// throw ConfigError with a line number; execution failures are isolated per
// experiment. Returns a process exit status (0 = all ran, thresholds met).
int run_config(const std::string& path, std::ostream& log);

// Exposed for tests: parse without running.
struct ParsedConfig {
  std::vector<ExperimentConfig> experiments;
  std::string summary_path;
};
ParsedConfig parse_config_file(const std::string& path);
ParsedConfig parse_config_text(const std::string& text);

}  // namespace stretchlat
