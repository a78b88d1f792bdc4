// psurf: batch checks, curvature tables and point digests for surface specs.
//
// Exit codes: 0 success, 1 failed check or degenerate point, 2 input error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "psurf/harness.hpp"
#include "psurf/specfile.hpp"
#include "psurf/table.hpp"

namespace {

constexpr int kExitFail = 1;
constexpr int kExitInput = 2;

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw psurf::InputError("cannot write '" + path + "'");
  out << text;
  if (!out.flush()) throw psurf::InputError("write to '" + path + "' failed");
}

psurf::UPoint parse_point(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos || text.find(',', comma + 1) != std::string::npos)
    throw psurf::InputError("--u expects two comma-separated values, got '" + text + "'");
  auto value = [&](const std::string& s) {
    const psurf::Expr e = psurf::parse(s);
    if (!psurf::variables(e).empty()) throw psurf::InputError("--u values must be constants");
    return psurf::eval(e, psurf::Env<double>{});
  };
  return {value(text.substr(0, comma)), value(text.substr(comma + 1))};
}

psurf::LoadedSpec load(const std::string& path, const std::string& rho) {
  psurf::LoadedSpec spec = psurf::load_spec(path);
  if (!rho.empty()) spec.surface.density = psurf::parse_density(rho);
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poisson-bracket geometry of embedded surfaces"};
  app.require_subcommand(1);

  std::string spec_path, out_path, rho, u_text;
  std::vector<std::string> tols;
  int jobs = 1;

  auto* check = app.add_subcommand("check", "run every invariant on the spec's grid");
  check->add_option("spec", spec_path, "surface spec file")->required();
  check->add_option("--tol", tols, "tolerance override name=value (name may be 'all')");
  check->add_option("--rho", rho, "density: sqrt_g, one or an expression in u1, u2");
  check->add_option("--out", out_path, "write the JSON report here");
  check->add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1, 256));

  auto* table = app.add_subcommand("table", "per-point curvature table as CSV");
  table->add_option("spec", spec_path, "surface spec file")->required();
  table->add_option("--rho", rho, "density override");
  table->add_option("--out", out_path, "write the CSV here instead of standard output");
  table->add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1, 256));

  auto* point = app.add_subcommand("point", "digest of every quantity at one point");
  point->add_option("spec", spec_path, "surface spec file")->required();
  point->add_option("--u", u_text, "parameter point a,b")->required();
  point->add_option("--rho", rho, "density override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    const psurf::LoadedSpec spec = load(spec_path, rho);

    if (check->parsed()) {
      psurf::RunOptions opt;
      for (const auto& t : tols) opt.tolerances.apply(t);
      opt.jobs = jobs;
      const psurf::Report rep = psurf::run_checks(spec, opt);
      std::cout << psurf::report_text(rep);
      if (!out_path.empty()) write_file(out_path, psurf::report_json(rep).dump(2) + "\n");
      return rep.passed() ? 0 : kExitFail;
    }

    if (table->parsed()) {
      const auto rows = psurf::table_rows(spec.surface, spec.grid, jobs);
      const std::string csv = psurf::table_csv(rows);
      if (out_path.empty()) std::cout << csv;
      else write_file(out_path, csv);
      std::size_t degenerate = 0;
      for (const auto& r : rows) degenerate += r.degenerate;
      if (degenerate) {
        std::cerr << "psurf: " << degenerate << " degenerate grid point(s) left empty\n";
        return kExitFail;
      }
      return 0;
    }

    const psurf::UPoint u = parse_point(u_text);
    std::cout << psurf::point_digest(spec.surface, u);
    return 0;
  } catch (const psurf::DegenerateError& e) {
    std::cerr << "psurf: " << e.what() << "\n";
    return kExitFail;
  } catch (const psurf::Error& e) {
    std::cerr << "psurf: " << e.what() << "\n";
    return kExitInput;
  }
}
