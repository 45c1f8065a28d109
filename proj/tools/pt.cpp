#include <cstdio>
#include <iostream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ptc/configurations.hpp"
#include "ptc/constants.hpp"
#include "ptc/io.hpp"
#include "ptc/partition.hpp"

using namespace ptc;

namespace {

enum Exit { ok = 0, usage = 1, numerical = 2, infeasible = 3 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// "1", "-0.5i", "2-0.5i", "1+1i", "i"
cplx parse_complex(const std::string& raw) {
  std::string t;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  static const std::regex num(R"([+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)");
  static const std::regex full(R"(([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)([+-](?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)[ij])");
  static const std::regex imag(R"(([+-]?(?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)[ij])");
  std::smatch m;
  auto coef = [](const std::string& s) -> real {
    if (s.empty() || s == "+") return 1;
    if (s == "-") return -1;
    return std::stold(s);
  };
  if (std::regex_match(t, m, num)) return {std::stold(t), 0};
  if (std::regex_match(t, m, full)) return {std::stold(m[1].str()), coef(m[2].str())};
  if (std::regex_match(t, m, imag)) return {0, coef(m[1].str())};
  throw UsageError("cannot parse point '" + raw + "'");
}

std::vector<cplx> parse_points(const std::string& list) {
  std::vector<cplx> pts;
  std::stringstream ss(list);
  std::string tok;
  while (std::getline(ss, tok, ',')) pts.push_back(parse_complex(tok));
  if (pts.empty()) throw UsageError("empty point list");
  return pts;
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-")
    std::cout << text;
  else
    write_file_atomic(out, text);
}

void check_writable(const std::string& out) {
  if (out.empty() || out == "-") return;
  const std::string probe = out + ".tmp";
  std::FILE* f = std::fopen(probe.c_str(), "w");
  if (!f) throw UsageError("output path not writable: " + out);
  std::fclose(f);
  std::remove(probe.c_str());
}

struct SolveArgs {
  std::string config;
  std::string points;
  int topology = 0;
  double tol = 1e-12;
  std::string out;
};

PTSolution run_solve(const SolveArgs& a) {
  if (a.tol <= 0) throw UsageError("--tol must be positive");
  const ConfigId config = [&] {
    try {
      return config_from_string(a.config);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }();
  PTProblem problem;
  try {
    problem = PTProblem::make(config, parse_points(a.points), a.topology);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  PTOptions opts;
  opts.solver.tol = a.tol;
  return solve_pt(problem, std::nullopt, opts);
}

std::string arcs_csv(const std::vector<Trajectory>& arcs) {
  std::ostringstream os;
  os << "arc_id,s,re,im\n";
  char buf[160];
  for (std::size_t i = 0; i < arcs.size(); ++i)
    for (std::size_t k = 0; k < arcs[i].points.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", i, static_cast<double>(arcs[i].s[k]),
                    static_cast<double>(arcs[i].points[k].real()), static_cast<double>(arcs[i].points[k].imag()));
      os << buf;
    }
  return os.str();
}

std::string arcs_svg(const std::vector<Trajectory>& arcs) {
  real lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
  for (const auto& a : arcs)
    for (cplx z : a.points) {
      lo_x = std::min(lo_x, z.real());
      hi_x = std::max(hi_x, z.real());
      lo_y = std::min(lo_y, -z.imag());
      hi_y = std::max(hi_y, -z.imag());
    }
  const real pad = 0.05L * std::max<real>({hi_x - lo_x, hi_y - lo_y, 1e-3L});
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"%.9g %.9g %.9g %.9g\" width=\"600\" height=\"600\">\n",
                static_cast<double>(lo_x - pad), static_cast<double>(lo_y - pad),
                static_cast<double>(hi_x - lo_x + 2 * pad), static_cast<double>(hi_y - lo_y + 2 * pad));
  os << buf;
  const double stroke = static_cast<double>(pad) / 10;
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    os << "<path id=\"arc" << i << "\" fill=\"none\" stroke=\"black\" stroke-width=\"" << stroke << "\" d=\"";
    for (std::size_t k = 0; k < arcs[i].points.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%s%.9g %.9g ", k == 0 ? "M" : "L", static_cast<double>(arcs[i].points[k].real()),
                    static_cast<double>(-arcs[i].points[k].imag()));
      os << buf;
    }
    os << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void print_report(const BoundReport& r) {
  std::fprintf(stderr, "%s x=%.16Lg R=%.13Lg value=%.13Lg full=%.13Lg valid=%d area_dev=%.2Le fourier=%.2Le\n",
               to_string(r.kind), r.x, r.R, r.value, r.full_value, r.valid ? 1 : 0, r.area_deviation,
               r.fourier_difference);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimal-capacity continua and the constants built on them"};
  app.require_subcommand(1);

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Solve a capacity problem and write the solution JSON");
  solve->add_option("--config", sa.config, "three-point, six-sym-1, six-sym-2, outer-two, outer-three, outer-six")
      ->required();
  solve->add_option("--points", sa.points, "Comma-separated anchors, e.g. \"1+1i,2-0.5i\"")->required();
  solve->add_option("--topology", sa.topology, "outer-six topology: 0 (try both), 1 or 2");
  solve->add_option("--tol", sa.tol, "Residual tolerance");
  solve->add_option("--out", sa.out, "Output file (default stdout)");

  std::string which = "bloch", cout_path;
  double x = 0;
  std::vector<double> scan;
  std::size_t degree = published_degree, terms = 8000;
  auto* constants = app.add_subcommand("constants", "Evaluate a constant at x or scan x");
  constants->add_option("--which", which, "bloch, lifetime or frequency");
  auto* xopt = constants->add_option("--x", x, "Tip parameter");
  auto* sopt = constants->add_option("--scan", scan, "lo hi n")->expected(3);
  xopt->excludes(sopt);
  constants->add_option("--degree", degree, "Partial-sum degree (0 = all coefficients)");
  constants->add_option("--terms", terms, "Number of Laurent coefficients");
  constants->add_option("--out", cout_path, "Output file (default stdout)");

  std::string sol_path, format = "csv", tout;
  SolveArgs ta;
  double step = 1e-3;
  auto* trace = app.add_subcommand("trace", "Trace the critical graph of a solution");
  trace->add_option("--solution", sol_path, "Solution JSON");
  trace->add_option("--config", ta.config, "Solve first: configuration");
  trace->add_option("--points", ta.points, "Solve first: anchors");
  trace->add_option("--topology", ta.topology, "Solve first: topology");
  trace->add_option("--format", format, "csv or svg")->check(CLI::IsMember({"csv", "svg"}));
  trace->add_option("--step", step, "Q-metric step");
  trace->add_option("--out", tout, "Output file (default stdout)");

  std::string part_path;
  auto* vpart = app.add_subcommand("validate-partition", "Validate a partition JSON");
  vpart->add_option("--in", part_path, "Partition JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return e.get_exit_code() == 0 ? app.exit(e) : (app.exit(e), Exit::usage);
  }

  try {
    if (*solve) {
      check_writable(sa.out);
      const PTSolution s = run_solve(sa);
      emit(sa.out, solution_to_json(s, sa.tol));
      std::fprintf(stderr, "residual %.3Le, capacity/|lead| %.15Lg\n", s.residual_norm, s.capacity());
      return s.converged ? Exit::ok : Exit::numerical;
    }
    if (*constants) {
      BoundKind kind;
      try {
        kind = bound_kind_from_string(which);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      if (!*xopt && !*sopt) throw UsageError("constants needs --x or --scan");
      check_writable(cout_path);
      BoundOptions bo;
      bo.max_degree = degree;
      bo.coefficients.laurent_terms = terms;
      if (*xopt) {
        const BoundReport r = compute_bound(kind, x, bo);
        print_report(r);
        emit(cout_path, bound_report_to_json(r));
        return r.valid ? Exit::ok : Exit::numerical;
      }
      if (scan[2] < 2 || scan[1] <= scan[0]) throw UsageError("--scan needs lo < hi and n >= 2");
      ScanOptions so;
      so.bound = bo;
      const ScanResult r = scan_optimize(kind, scan[0], scan[1], static_cast<std::size_t>(scan[2]), so);
      for (const auto& g : r.grid) print_report(g);
      std::fprintf(stderr, "best:\n");
      print_report(r.best);
      emit(cout_path, scan_result_to_json(r));
      return r.best.valid ? Exit::ok : Exit::numerical;
    }
    if (*trace) {
      check_writable(tout);
      PTSolution s;
      if (!sol_path.empty())
        s = solution_from_json(read_file(sol_path));
      else if (!ta.config.empty() && !ta.points.empty())
        s = run_solve(ta);
      else
        throw UsageError("trace needs --solution or --config and --points");
      TraceOptions to;
      to.step = step;
      const auto arcs = critical_graph(s, to);
      std::size_t total = 0;
      for (std::size_t i = 0; i < arcs.size(); ++i) {
        std::fprintf(stderr, "arc %zu: %zu steps\n", i, arcs[i].points.size());
        total += arcs[i].points.size();
      }
      std::fprintf(stderr, "total: %zu\n", total);
      emit(tout, format == "svg" ? arcs_svg(arcs) : arcs_csv(arcs));
      return Exit::ok;
    }
    if (*vpart) {
      const auto p = partition_from_json(read_file(part_path));
      const auto c = validate_partition(p);
      std::cout << (c.ok() ? "valid" : std::string("invalid: ") + to_string(c.violation) + " " + c.detail) << "\n";
      return c.ok() ? Exit::ok : Exit::infeasible;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n" << app.help();
    return Exit::usage;
  } catch (const InfeasibleGeometryError& e) {
    std::cerr << "infeasible geometry: " << e.what() << "\n";
    return Exit::infeasible;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return Exit::numerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return Exit::usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Exit::numerical;
  }
  return Exit::usage;
}
