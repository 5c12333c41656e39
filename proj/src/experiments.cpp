#include "stretchlat/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "stretchlat/exponents.hpp"
#include "stretchlat/measure.hpp"

namespace stretchlat {

namespace {

constexpr const char* kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::RateMax: return "rate-max";
    case ExperimentKind::RateMin: return "rate-min";
    case ExperimentKind::RemainderFull: return "remainder-full";
    case ExperimentKind::RemainderPositive: return "remainder-positive";
    case ExperimentKind::RemainderNonnegative: return "remainder-nonnegative";
    case ExperimentKind::RemainderSectionsUnion: return "remainder-sections-union";
  }
  return "?";
}

bool is_rate(ExperimentKind k) {
  return k == ExperimentKind::RateMax || k == ExperimentKind::RateMin;
}

// OLS slope of log(statistic) against log(t); rows with a zero statistic or an
// exhausted budget carry no information and are skipped.
void fit_slope(RateFit& fit) {
  std::vector<std::pair<double, double>> pts;
  for (const ExperimentRow& r : fit.rows)
    if (r.complete && r.statistic > 0.0 && r.t > 0.0)
      pts.emplace_back(std::log(r.t), std::log(r.statistic));
  fit.slope_defined = pts.size() >= 4;
  if (!fit.slope_defined) return;
  double mx = 0.0, my = 0.0;
  for (auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxx = 0.0, sxy = 0.0;
  for (auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx <= 0.0) {
    fit.slope_defined = false;
    return;
  }
  fit.fitted_slope = sxy / sxx;
}

void fit_constant(RateFit& fit) {
  fit.bound_constant = 0.0;
  for (const ExperimentRow& r : fit.rows)
    if (r.complete && r.t > 0.0)
      fit.bound_constant =
          std::max(fit.bound_constant, r.statistic / std::pow(r.t, fit.theoretical_exponent));
}

void validate_grid(const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw InputError("experiment: empty t grid");
  for (double t : t_grid)
    if (!(std::isfinite(t) && t > 0.0)) throw InputError("experiment: t values must be positive");
  for (size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1]))
      throw InputError("experiment: t grid must be strictly increasing");
}

}  // namespace

RateFit rate_experiment(const ExperimentConfig& cfg) {
  cfg.body.validate();
  validate_grid(cfg.t_grid);
  if (!is_rate(cfg.kind)) throw InputError("rate_experiment: not a rate experiment kind");

  OptimizeConfig opt = cfg.opt;
  opt.mode = cfg.kind == ExperimentKind::RateMax ? OptimizeMode::MaxPositive
                                                 : OptimizeMode::MinNonnegative;
  const StretchFactor B = balanced_factor(cfg.body);

  RateFit fit;
  for (double t : cfg.t_grid) {
    OptimumReport rep;
    try {
      rep = optimize(cfg.body, t, opt);
    } catch (const BudgetExhausted& e) {
      rep = e.partial;  // keep the incomplete row; the fit skips it
    }
    ExperimentRow row;
    row.t = t;
    row.count = rep.value;
    row.statistic = rep.sup_deviation;
    row.complete = rep.complete;
    row.a = rep.optima.empty() ? B.diag : rep.optima.front().diag;
    fit.rows.push_back(std::move(row));
  }

  const ExponentReport er =
      exponent_report(cfg.body, SamplingConfig{cfg.samples, MultitypeStrategy::Auto, 2026});
  fit.theoretical_exponent = -er.gamma;
  fit_slope(fit);
  fit_constant(fit);

  fit.csv.header = {"t", "sup_deviation", "value"};
  for (int i = 1; i <= cfg.body.dim; ++i) fit.csv.header.push_back("a" + std::to_string(i));
  fit.csv.header.push_back("complete");
  for (const ExperimentRow& r : fit.rows) {
    std::vector<std::string> row = {fmt17(r.t), fmt17(r.statistic),
                                    std::to_string(r.count)};
    for (double ai : r.a) row.push_back(fmt17(ai));
    row.push_back(r.complete ? "1" : "0");
    fit.csv.rows.push_back(std::move(row));
  }
  return fit;
}

RateFit remainder_experiment(const ExperimentConfig& cfg) {
  cfg.body.validate();
  validate_grid(cfg.t_grid);
  if (is_rate(cfg.kind)) throw InputError("remainder_experiment: not a remainder kind");

  const StretchFactor A = cfg.stretch ? *cfg.stretch : balanced_factor(cfg.body);
  if (A.dim() != cfg.body.dim) throw InputError("remainder_experiment: stretch dimension mismatch");
  const SectionMeasures sm = section_measures(cfg.body);
  const double V = sm.volume;
  double sections_term = 0.0;  // sum_j |Omega_j| / a_j
  for (int j = 0; j < cfg.body.dim; ++j)
    sections_term += sm.sections[static_cast<size_t>(j)] / A.diag[static_cast<size_t>(j)];
  const double pow2d = std::ldexp(1.0, -cfg.body.dim);  // 2^{-d}

  LatticeSet set = LatticeSet::Full;
  switch (cfg.kind) {
    case ExperimentKind::RemainderFull: set = LatticeSet::Full; break;
    case ExperimentKind::RemainderPositive: set = LatticeSet::Positive; break;
    case ExperimentKind::RemainderNonnegative: set = LatticeSet::Nonnegative; break;
    case ExperimentKind::RemainderSectionsUnion: set = LatticeSet::SectionsUnion; break;
    default: break;
  }

  RateFit fit;
  for (double t : cfg.t_grid) {
    const double td = std::pow(t, cfg.body.dim);
    const double td1 = std::pow(t, cfg.body.dim - 1);
    double main = 0.0;
    switch (cfg.kind) {
      case ExperimentKind::RemainderFull: main = V * td; break;
      case ExperimentKind::RemainderPositive: main = pow2d * (V * td - td1 * sections_term); break;
      case ExperimentKind::RemainderNonnegative:
        main = pow2d * (V * td + td1 * sections_term);
        break;
      case ExperimentKind::RemainderSectionsUnion: main = td1 * sections_term; break;
      default: break;
    }
    const CountResult res = count(CountRequest{cfg.body, A, t, set});
    ExperimentRow row;
    row.t = t;
    row.count = res.count;
    row.main_term = main;
    row.statistic = std::fabs(static_cast<double>(res.count) - main);
    row.a = A.diag;
    fit.rows.push_back(std::move(row));
  }

  if (cfg.kind == ExperimentKind::RemainderSectionsUnion) {
    // Overlaps of distinct sections contribute at order t^{d-2} and are not
    // part of the main term.
    fit.theoretical_exponent = cfg.body.dim - 2;
  } else {
    const ExponentReport er =
        exponent_report(cfg.body, SamplingConfig{cfg.samples, MultitypeStrategy::Auto, 2026});
    const double delta = std::min(er.nu, er.mu / (cfg.body.dim - er.mu));
    fit.theoretical_exponent = cfg.body.dim - 1 - delta;
  }
  fit_slope(fit);
  fit_constant(fit);

  fit.csv.header = {"t", "count", "main_term", "statistic"};
  for (const ExperimentRow& r : fit.rows)
    fit.csv.rows.push_back(
        {fmt17(r.t), std::to_string(r.count), fmt17(r.main_term), fmt17(r.statistic)});
  return fit;
}

// ----------------------------------------------------------------- config

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_t_grid(const std::string& text, int line) {
  auto bad = [&](const std::string& why) { return ConfigError("t_grid: " + why, line); };
  std::vector<double> grid;
  if (text.rfind("linspace:", 0) == 0 || text.rfind("logspace:", 0) == 0) {
    const bool logspace = text[1] == 'o';
    std::istringstream in(text.substr(9));
    std::string sa, sb, sn;
    if (!std::getline(in, sa, ':') || !std::getline(in, sb, ':') || !std::getline(in, sn))
      throw bad("expected <kind>:<first>:<last>:<n>");
    double a, b;
    long n;
    try {
      a = std::stod(sa);
      b = std::stod(sb);
      n = std::stol(sn);
    } catch (const std::exception&) {
      throw bad("malformed number");
    }
    if (!(a > 0.0) || !(b > 0.0) || n < 1) throw bad("need positive endpoints and n >= 1");
    if (n == 1) return {a};
    for (long i = 0; i < n; ++i) {
      const double f = static_cast<double>(i) / static_cast<double>(n - 1);
      grid.push_back(logspace ? a * std::pow(b / a, f) : a + (b - a) * f);
    }
    return grid;
  }
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) throw bad("empty entry");
    try {
      grid.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw bad("malformed number '" + item + "'");
    }
  }
  if (grid.empty()) throw bad("no values");
  return grid;
}

struct RawExperiment {
  int header_line = 0;
  std::vector<std::pair<std::string, std::pair<std::string, int>>> kv;  // key -> (value, line)
};

ExperimentKind parse_kind(const std::string& v, int line) {
  if (v == "rate-max") return ExperimentKind::RateMax;
  if (v == "rate-min") return ExperimentKind::RateMin;
  if (v == "remainder-full") return ExperimentKind::RemainderFull;
  if (v == "remainder-positive") return ExperimentKind::RemainderPositive;
  if (v == "remainder-nonnegative") return ExperimentKind::RemainderNonnegative;
  if (v == "remainder-sections-union") return ExperimentKind::RemainderSectionsUnion;
  throw ConfigError("unknown experiment kind '" + v + "'", line);
}

ExperimentConfig build_experiment(const RawExperiment& raw) {
  ExperimentConfig cfg;
  auto find = [&](const std::string& key) -> const std::pair<std::string, int>* {
    for (const auto& [k, vl] : raw.kv)
      if (k == key) return &vl;
    return nullptr;
  };
  auto require = [&](const std::string& key) -> const std::pair<std::string, int>& {
    const auto* p = find(key);
    if (!p) throw ConfigError("experiment is missing required key '" + key + "'",
                              raw.header_line);
    return *p;
  };

  cfg.name = require("name").first;
  const auto& [kind_text, kind_line] = require("experiment");
  cfg.kind = parse_kind(kind_text, kind_line);
  const auto& [body_text, body_line] = require("body");
  try {
    cfg.body = parse_body_spec(body_text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("body: ") + e.what(), body_line);
  }
  const auto& [grid_text, grid_line] = require("t_grid");
  cfg.t_grid = parse_t_grid(grid_text, grid_line);

  const bool rate = is_rate(cfg.kind);
  cfg.opt.strategy = (cfg.body.dim == 2 && cfg.body.family == BodyFamily::Superellipsoid)
                         ? OptimizeStrategy::Exact2D
                         : OptimizeStrategy::Grid;

  auto as_double = [](const std::pair<std::string, int>& vl, const std::string& key) {
    try {
      return std::stod(vl.first);
    } catch (const std::exception&) {
      throw ConfigError(key + ": malformed number '" + vl.first + "'", vl.second);
    }
  };
  auto as_int = [](const std::pair<std::string, int>& vl, const std::string& key) {
    try {
      return std::stoll(vl.first);
    } catch (const std::exception&) {
      throw ConfigError(key + ": malformed integer '" + vl.first + "'", vl.second);
    }
  };

  for (const auto& [key, vl] : raw.kv) {
    const auto& [value, line] = vl;
    if (key == "name" || key == "experiment" || key == "body" || key == "t_grid") continue;
    if (key == "output") {
      cfg.output = value;
    } else if (key == "samples") {
      cfg.samples = static_cast<int>(as_int(vl, key));
      if (cfg.samples < 0) throw ConfigError("samples: must be >= 0", line);
    } else if (key == "max_slope") {
      cfg.max_slope = as_double(vl, key);
    } else if (key == "strategy") {
      if (!rate) throw ConfigError("strategy: only valid for rate experiments", line);
      if (value == "exact2d")
        cfg.opt.strategy = OptimizeStrategy::Exact2D;
      else if (value == "grid")
        cfg.opt.strategy = OptimizeStrategy::Grid;
      else
        throw ConfigError("strategy: expected 'exact2d' or 'grid'", line);
    } else if (key == "box") {
      if (!rate) throw ConfigError("box: only valid for rate experiments", line);
      cfg.opt.box_bound = as_double(vl, key);
      if (!(cfg.opt.box_bound > 1.0)) throw ConfigError("box: must exceed 1", line);
    } else if (key == "levels") {
      if (!rate) throw ConfigError("levels: only valid for rate experiments", line);
      cfg.opt.grid_levels = static_cast<int>(as_int(vl, key));
    } else if (key == "step") {
      if (!rate) throw ConfigError("step: only valid for rate experiments", line);
      cfg.opt.initial_step = as_double(vl, key);
      if (!(cfg.opt.initial_step > 0.0)) throw ConfigError("step: must be positive", line);
    } else if (key == "budget") {
      if (!rate) throw ConfigError("budget: only valid for rate experiments", line);
      cfg.opt.budget = as_int(vl, key);
    } else if (key == "halo") {
      if (!rate) throw ConfigError("halo: only valid for rate experiments", line);
      cfg.opt.halo = as_int(vl, key);
      if (cfg.opt.halo < 0) throw ConfigError("halo: must be >= 0", line);
    } else if (key == "stretch") {
      if (rate) throw ConfigError("stretch: only valid for remainder experiments", line);
      if (value == "balanced") {
        cfg.stretch.reset();
      } else if (value == "identity") {
        cfg.stretch = StretchFactor::identity(cfg.body.dim);
      } else {
        std::vector<double> diag;
        std::istringstream in(value);
        std::string item;
        while (std::getline(in, item, ',')) {
          try {
            diag.push_back(std::stod(trim(item)));
          } catch (const std::exception&) {
            throw ConfigError("stretch: malformed number '" + item + "'", line);
          }
        }
        try {
          cfg.stretch = StretchFactor::from_diag(diag);
        } catch (const std::exception& e) {
          throw ConfigError(std::string("stretch: ") + e.what(), line);
        }
      }
    } else {
      throw ConfigError("unknown key '" + key + "'", line);
    }
  }
  return cfg;
}

}  // namespace

ParsedConfig parse_config_text(const std::string& text) {
  ParsedConfig out;
  std::vector<RawExperiment> raws;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool in_section = false;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line != "[experiment]")
        throw ConfigError("unknown section '" + line + "'", lineno);
      raws.push_back(RawExperiment{lineno, {}});
      in_section = true;
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", lineno);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", lineno);
    if (!in_section) {
      if (key == "summary")
        out.summary_path = value;
      else
        throw ConfigError("unknown global key '" + key + "' (before any [experiment])", lineno);
      continue;
    }
    for (const auto& [k, vl] : raws.back().kv)
      if (k == key) throw ConfigError("duplicate key '" + key + "'", lineno);
    raws.back().kv.emplace_back(key, std::make_pair(value, lineno));
  }
  if (raws.empty()) throw ConfigError("config defines no [experiment] section", lineno);
  for (const RawExperiment& raw : raws) out.experiments.push_back(build_experiment(raw));
  for (size_t i = 0; i < out.experiments.size(); ++i)
    for (size_t j = i + 1; j < out.experiments.size(); ++j)
      if (out.experiments[i].name == out.experiments[j].name)
        throw ConfigError("duplicate experiment name '" + out.experiments[i].name + "'",
                          raws[j].header_line);
  return out;
}

ParsedConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

int run_config(const std::string& path, std::ostream& log) {
  const ParsedConfig parsed = parse_config_file(path);
  std::vector<std::string> summary;
  bool all_ok = true;

  for (const ExperimentConfig& cfg : parsed.experiments) {
    std::ostringstream line;
    line << cfg.name << ": kind=" << kind_name(cfg.kind);
    try {
      const RateFit fit = is_rate(cfg.kind) ? rate_experiment(cfg) : remainder_experiment(cfg);
      if (!cfg.output.empty()) {
        const std::filesystem::path out(cfg.output);
        if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
        fit.csv.write(cfg.output);
      }
      line << " rows=" << fit.rows.size();
      if (fit.slope_defined)
        line << " slope=" << fmt17(fit.fitted_slope);
      else
        line << " slope=undefined";
      line << " theoretical=" << fmt17(fit.theoretical_exponent)
           << " constant=" << fmt17(fit.bound_constant);
      for (const ExperimentRow& r : fit.rows)
        if (!r.complete) line << " incomplete";
      if (cfg.max_slope) {
        const bool pass = fit.slope_defined && fit.fitted_slope <= *cfg.max_slope;
        line << (pass ? " [PASS]" : " [FAIL]");
        if (!pass) all_ok = false;
      } else {
        line << " [DONE]";
      }
    } catch (const std::exception& e) {
      line << " [ERROR] " << e.what();
      all_ok = false;
    }
    summary.push_back(line.str());
    log << summary.back() << '\n';
  }

  if (!parsed.summary_path.empty()) {
    const std::filesystem::path out(parsed.summary_path);
    if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
    std::ofstream sf(parsed.summary_path, std::ios::binary);
    if (!sf) throw InputError("cannot write summary file: " + parsed.summary_path);
    for (const std::string& s : summary) sf << s << '\n';
  }
  return all_ok ? 0 : 1;
}

}  // namespace stretchlat
