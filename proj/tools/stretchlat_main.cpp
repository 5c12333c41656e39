#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#ifdef _OPENMP
#include <omp.h>
#endif

#include "stretchlat/count.hpp"
#include "stretchlat/csv.hpp"
#include "stretchlat/errors.hpp"
#include "stretchlat/experiments.hpp"
#include "stretchlat/exponents.hpp"
#include "stretchlat/measure.hpp"
#include "stretchlat/optimize.hpp"

namespace {

using namespace stretchlat;

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw InputError("malformed number '" + item + "' in list");
    }
  }
  if (out.empty()) throw InputError("empty list");
  return out;
}

LatticeSet parse_set(const std::string& s) {
  if (s == "full") return LatticeSet::Full;
  if (s == "positive") return LatticeSet::Positive;
  if (s == "nonnegative") return LatticeSet::Nonnegative;
  if (s == "sections-union") return LatticeSet::SectionsUnion;
  throw InputError("unknown lattice set '" + s + "'");
}

const char* set_name(LatticeSet s) {
  switch (s) {
    case LatticeSet::Full: return "full";
    case LatticeSet::Positive: return "positive";
    case LatticeSet::Nonnegative: return "nonnegative";
    case LatticeSet::SectionsUnion: return "sections-union";
  }
  return "?";
}

MultitypeStrategy parse_strategy(const std::string& s) {
  if (s == "auto") return MultitypeStrategy::Auto;
  if (s == "analytic") return MultitypeStrategy::Analytic;
  if (s == "numeric") return MultitypeStrategy::Numeric;
  if (s == "both") return MultitypeStrategy::Both;
  throw InputError("unknown strategy '" + s + "'");
}

StretchFactor parse_stretch(const std::string& text, const BodySpec& body) {
  if (text.empty() || text == "identity") return StretchFactor::identity(body.dim);
  if (text == "balanced") return balanced_factor(body);
  return StretchFactor::from_diag(parse_list(text));
}

// Human-readable lists use ',' on stdout; inside a CSV field lists use ';'.
std::string join_commas(const std::vector<double>& values) {
  std::string out;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += fmt17(values[i]);
  }
  return out;
}

std::string join_ints(const std::vector<int>& values, char sep) {
  std::string out;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(values[i]);
  }
  return out;
}

// Representative boundary directions for the exponent table: every nonzero
// 0/1 support pattern in low dimension, axes plus the diagonal otherwise.
std::vector<std::vector<double>> canonical_directions(int d) {
  std::vector<std::vector<double>> out;
  if (d <= 4) {
    for (int mask = 1; mask < (1 << d); ++mask) {
      std::vector<double> v(static_cast<size_t>(d), 0.0);
      for (int i = 0; i < d; ++i)
        if (mask & (1 << i)) v[static_cast<size_t>(i)] = 1.0;
      out.push_back(std::move(v));
    }
  } else {
    for (int i = 0; i < d; ++i) {
      std::vector<double> v(static_cast<size_t>(d), 0.0);
      v[static_cast<size_t>(i)] = 1.0;
      out.push_back(std::move(v));
    }
    out.push_back(std::vector<double>(static_cast<size_t>(d), 1.0));
  }
  return out;
}

void print_fit(const std::string& label, const RateFit& fit, const std::string& output,
               std::ostream& os) {
  if (!output.empty()) fit.csv.write(output);
  os << label << ": rows=" << fit.rows.size();
  if (fit.slope_defined)
    os << " slope=" << fmt17(fit.fitted_slope);
  else
    os << " slope=undefined";
  os << " theoretical=" << fmt17(fit.theoretical_exponent)
     << " constant=" << fmt17(fit.bound_constant) << '\n';
}

double sup_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double dev = 0.0;
  for (size_t i = 0; i < a.size(); ++i) dev = std::max(dev, std::fabs(a[i] - b[i]));
  return dev;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stretchlat: exact lattice point counts in stretched convex bodies"};
  app.require_subcommand(1);
  app.fallthrough();

  int threads = 0;
  bool quiet = false;
  std::string csv_path;
  app.add_option("--threads", threads, "OpenMP thread count (default: all cores)");
  app.add_option("--csv", csv_path, "write the result as a CSV table to this path");
  app.add_flag("--quiet", quiet, "suppress stdout report (CSV files are still written)");

  std::string body_text, stretch_text, set_text = "full";
  std::string strategy_text = "auto", direction_text, t_grid_text, rem_stretch_text, output_path;
  std::string mode_text = "max-positive", opt_strategy = "auto", config_path;
  double t = 0.0, box = 0.0, step = 0.05, max_slope = 0.0;
  int samples = 10000, levels = 12, section_axis = -1;
  int64_t budget = 100000000, halo = 2;
  bool has_max_slope = false, oracle = false;

  auto* c_count = app.add_subcommand("count", "count lattice points of t*A*Omega");
  c_count->add_option("--body", body_text, "body spec, e.g. 'family=superellipsoid; d=2; p=2,2; b=1,1'")
      ->required();
  c_count->add_option("--t", t, "dilation parameter")->required();
  c_count->add_option("--stretch", stretch_text, "stretch diagonal a1,..,ad | identity | balanced");
  c_count->add_option("--set", set_text, "full | positive | nonnegative | sections-union");
  c_count->add_flag("--oracle", oracle, "use the brute-force oracle instead of slicing");

  auto* c_sections = app.add_subcommand("sections", "volume, section measures, balanced stretch");
  c_sections->add_option("--body", body_text)->required();

  auto* c_exp = app.add_subcommand("exponents", "curvature degeneracy exponents");
  c_exp->add_option("--body", body_text)->required();
  c_exp->add_option("--samples", samples, "angular sample size");
  c_exp->add_option("--strategy", strategy_text, "auto | analytic | numeric | both");
  c_exp->add_option("--at", direction_text, "report the multitype at this direction instead");
  c_exp->add_option("--section-axis", section_axis,
                    "with --at: also check the section multitype on {x_j = 0} (1-based j)");

  auto* c_opt = app.add_subcommand("optimize", "optimal volume-preserving stretch");
  c_opt->add_option("--body", body_text)->required();
  c_opt->add_option("--t", t)->required();
  c_opt->add_option("--mode", mode_text, "max-positive | min-nonnegative");
  c_opt->add_option("--strategy", opt_strategy, "auto | exact2d | grid");
  c_opt->add_option("--box", box, "search box bound K (0 = automatic)");
  c_opt->add_option("--levels", levels);
  c_opt->add_option("--step", step);
  c_opt->add_option("--budget", budget);
  c_opt->add_option("--halo", halo);

  auto* c_rate = app.add_subcommand("rate", "deviation of optimal stretches from balanced");
  c_rate->add_option("--body", body_text)->required();
  c_rate->add_option("--t-grid", t_grid_text, "comma list | linspace:a:b:n | logspace:a:b:n")
      ->required();
  c_rate->add_option("--mode", mode_text, "max-positive | min-nonnegative");
  c_rate->add_option("--strategy", opt_strategy, "auto | exact2d | grid");
  c_rate->add_option("--box", box, "search box bound K (0 = automatic)");
  c_rate->add_option("--levels", levels);
  c_rate->add_option("--step", step);
  c_rate->add_option("--budget", budget);
  c_rate->add_option("--halo", halo);
  c_rate->add_option("--samples", samples);
  c_rate->add_option("--output", output_path, "CSV output path");
  c_rate->add_option("--max-slope", max_slope)->each([&](const std::string&) { has_max_slope = true; });

  auto* c_rem = app.add_subcommand("remainder", "two-term asymptotics remainder");
  c_rem->add_option("--body", body_text)->required();
  c_rem->add_option("--t-grid", t_grid_text)->required();
  c_rem->add_option("--set", set_text, "full | positive | nonnegative | sections-union");
  c_rem->add_option("--stretch", rem_stretch_text, "identity | balanced | comma list");
  c_rem->add_option("--samples", samples);
  c_rem->add_option("--output", output_path);
  c_rem->add_option("--max-slope", max_slope)->each([&](const std::string&) { has_max_slope = true; });

  auto* c_run = app.add_subcommand("run", "run every experiment in a config file");
  c_run->add_option("config", config_path, "config file path")->required();

  CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif

  std::ostream null_os(nullptr);
  std::ostream& os = quiet ? null_os : std::cout;

  try {
    if (c_count->parsed()) {
      const BodySpec body = parse_body_spec(body_text);
      const StretchFactor A = parse_stretch(stretch_text, body);
      const LatticeSet set = parse_set(set_text);
      const CountRequest req{body, A, t, set};
      const CountResult res = oracle ? count_bruteforce(req) : count(req);
      os << "count=" << res.count << " slices=" << res.slices_visited
         << " corrections=" << res.boundary_corrections << '\n';
      if (!csv_path.empty()) {
        CsvTable csv;
        csv.header = {"family", "d", "p", "b", "a", "t", "set", "count"};
        csv.rows.push_back({body.family == BodyFamily::Superellipsoid ? "superellipsoid"
                                                                      : "generic",
                            std::to_string(body.dim), join17(body.p), join17(body.b),
                            join17(A.diag), fmt17(t), set_name(set),
                            std::to_string(res.count)});
        csv.write(csv_path);
      }
    } else if (c_sections->parsed()) {
      const BodySpec body = parse_body_spec(body_text);
      const SectionMeasures sm = section_measures(body);
      const StretchFactor B = balanced_factor(body);
      os << "volume=" << fmt17(sm.volume) << '\n'
         << "sections=" << join_commas(sm.sections) << '\n'
         << "balanced=" << join_commas(B.diag) << '\n';
      if (!csv_path.empty()) {
        CsvTable csv;
        csv.header = {"volume", "sections", "balanced"};
        csv.rows.push_back({fmt17(sm.volume), join17(sm.sections), join17(B.diag)});
        csv.write(csv_path);
      }
    } else if (c_exp->parsed()) {
      const BodySpec body = parse_body_spec(body_text);
      const MultitypeStrategy strat = parse_strategy(strategy_text);
      if (!direction_text.empty()) {
        const Vec v = parse_list(direction_text);
        const BoundaryPoint P =
            boundary_point_from_direction(body, v, section_axis >= 1 ? section_axis - 1 : -1);
        const MultitypeReport rep = multitype_at(body, P, strat);
        os << "point=" << join_commas(rep.point.point) << '\n'
           << "multitype=" << join_ints(rep.multitype, ',') << '\n'
           << "nu=" << fmt17(rep.nu) << " nu_tail=" << fmt17(rep.nu_tail) << '\n';
        if (section_axis >= 1) {
          const SectionMultitypeCheck chk =
              section_multitype_check(body, section_axis - 1, P, strat);
          os << "section_multitype=" << join_ints(chk.section_multitype, ',') << '\n'
             << "interlacing=" << (chk.holds ? "holds" : "violated") << '\n';
        }
        if (!csv_path.empty()) {
          CsvTable csv;
          csv.header = {"direction", "point", "multitype", "nu"};
          csv.rows.push_back({join17(v), join17(rep.point.point),
                              join_ints(rep.multitype, ';'), fmt17(rep.nu)});
          csv.write(csv_path);
        }
      } else {
        CsvTable csv;
        csv.header = {"direction", "point", "multitype", "nu"};
        for (const std::vector<double>& v : canonical_directions(body.dim)) {
          const BoundaryPoint P = boundary_point_from_direction(body, v, -1);
          const MultitypeReport rep = multitype_at(body, P, strat);
          os << "at=" << join_commas(v) << " multitype=" << join_ints(rep.multitype, ',')
             << " nu=" << fmt17(rep.nu) << '\n';
          csv.rows.push_back({join17(v), join17(rep.point.point),
                              join_ints(rep.multitype, ';'), fmt17(rep.nu)});
        }
        const ExponentReport rep =
            exponent_report(body, SamplingConfig{samples, strat, 2026});
        os << "nu=" << fmt17(rep.nu) << '\n'
           << "mu=" << fmt17(rep.mu) << '\n'
           << "gamma=" << fmt17(rep.gamma) << '\n'
           << "samples=" << rep.sample_count << '\n'
           << "nu_minimizer=" << join_commas(rep.nu_minimizer.point) << '\n'
           << "mu_minimizer=" << join_commas(rep.mu_minimizer.point) << '\n';
        if (!csv_path.empty()) csv.write(csv_path);
      }
    } else if (c_opt->parsed()) {
      const BodySpec body = parse_body_spec(body_text);
      OptimizeConfig cfg;
      cfg.mode = mode_text == "min-nonnegative" ? OptimizeMode::MinNonnegative
                                                : OptimizeMode::MaxPositive;
      if (mode_text != "max-positive" && mode_text != "min-nonnegative")
        throw InputError("unknown mode '" + mode_text + "'");
      if (opt_strategy == "auto")
        cfg.strategy = (body.dim == 2 && body.family == BodyFamily::Superellipsoid)
                           ? OptimizeStrategy::Exact2D
                           : OptimizeStrategy::Grid;
      else if (opt_strategy == "exact2d")
        cfg.strategy = OptimizeStrategy::Exact2D;
      else if (opt_strategy == "grid")
        cfg.strategy = OptimizeStrategy::Grid;
      else
        throw InputError("unknown strategy '" + opt_strategy + "'");
      cfg.box_bound = box;
      cfg.grid_levels = levels;
      cfg.initial_step = step;
      cfg.budget = budget;
      cfg.halo = halo;
      const StretchFactor B = balanced_factor(body);
      const auto report = [&](const OptimumReport& rep) {
        os << "value=" << rep.value << '\n';
        for (const StretchFactor& A : rep.optima) os << "optimum=" << join_commas(A.diag) << '\n';
        os << "sup_deviation=" << fmt17(rep.sup_deviation) << '\n'
           << "a_star_max=" << fmt17(rep.a_star_max) << '\n'
           << "evaluations=" << rep.evaluations << '\n'
           << "complete=" << (rep.complete ? 1 : 0)
           << " box_touched=" << (rep.box_touched ? 1 : 0) << '\n';
        if (!csv_path.empty()) {
          CsvTable csv;
          csv.header = {"t", "mode"};
          for (int i = 1; i <= body.dim; ++i) csv.header.push_back("a" + std::to_string(i));
          csv.header.push_back("value");
          csv.header.push_back("deviation");
          const char* mode_name =
              cfg.mode == OptimizeMode::MaxPositive ? "max-positive" : "min-nonnegative";
          for (const StretchFactor& A : rep.optima) {
            std::vector<std::string> row = {fmt17(t), mode_name};
            for (double ai : A.diag) row.push_back(fmt17(ai));
            row.push_back(std::to_string(rep.value));
            row.push_back(fmt17(sup_distance(A.diag, B.diag)));
            csv.rows.push_back(std::move(row));
          }
          csv.write(csv_path);
        }
      };
      try {
        report(optimize(body, t, cfg));
      } catch (const BudgetExhausted& e) {
        report(e.partial);  // best-so-far, marked complete=0
        std::cerr << "error: " << e.what() << '\n';
        return 2;
      }
    } else if (c_rate->parsed() || c_rem->parsed()) {
      ExperimentConfig cfg;
      cfg.name = c_rate->parsed() ? "rate" : "remainder";
      cfg.body = parse_body_spec(body_text);
      cfg.t_grid = [&] {  // reuse the config-file grammar
        ParsedConfig pc = parse_config_text(
            "[experiment]\nname=x\nbody=" + body_text +
            "\nexperiment=remainder-full\nt_grid=" + t_grid_text + "\n");
        return pc.experiments.front().t_grid;
      }();
      cfg.samples = samples;
      if (output_path.empty()) output_path = csv_path;
      cfg.output = output_path;
      if (has_max_slope) cfg.max_slope = max_slope;
      RateFit fit;
      if (c_rate->parsed()) {
        cfg.kind = mode_text == "min-nonnegative" ? ExperimentKind::RateMin
                                                  : ExperimentKind::RateMax;
        if (opt_strategy == "auto")
          cfg.opt.strategy =
              (cfg.body.dim == 2 && cfg.body.family == BodyFamily::Superellipsoid)
                  ? OptimizeStrategy::Exact2D
                  : OptimizeStrategy::Grid;
        else if (opt_strategy == "exact2d")
          cfg.opt.strategy = OptimizeStrategy::Exact2D;
        else if (opt_strategy == "grid")
          cfg.opt.strategy = OptimizeStrategy::Grid;
        else
          throw InputError("unknown strategy '" + opt_strategy + "'");
        cfg.opt.box_bound = box;
        cfg.opt.grid_levels = levels;
        cfg.opt.initial_step = step;
        cfg.opt.budget = budget;
        cfg.opt.halo = halo;
        fit = rate_experiment(cfg);
      } else {
        const LatticeSet set = parse_set(set_text);
        switch (set) {
          case LatticeSet::Full: cfg.kind = ExperimentKind::RemainderFull; break;
          case LatticeSet::Positive: cfg.kind = ExperimentKind::RemainderPositive; break;
          case LatticeSet::Nonnegative: cfg.kind = ExperimentKind::RemainderNonnegative; break;
          case LatticeSet::SectionsUnion:
            cfg.kind = ExperimentKind::RemainderSectionsUnion;
            break;
        }
        if (!rem_stretch_text.empty() && rem_stretch_text != "balanced")
          cfg.stretch = parse_stretch(rem_stretch_text, cfg.body);
        fit = remainder_experiment(cfg);
      }
      print_fit(cfg.name, fit, output_path, os);
      if (cfg.max_slope && (!fit.slope_defined || fit.fitted_slope > *cfg.max_slope)) return 1;
    } else if (c_run->parsed()) {
      return run_config(config_path, os);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
