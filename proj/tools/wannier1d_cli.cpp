// Command-line driver: `run`, `study` and `bands`.
//
// Settings come from an optional JSON config (--config) with command-line
// flags layered on top. Results go to --out (CSV tables and JSON records); a
// summary JSON is printed to stdout. Failures print an error JSON to stderr
// and exit nonzero (2 for usage/config problems, 1 for numerical failures).

#include <algorithm>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "wannier1d/errors.hpp"
#include "wannier1d/harness.hpp"

namespace {

using namespace wannier1d;
using nlohmann::json;

struct Overrides {
  std::string config_path;
  std::optional<std::string> potential;
  std::optional<double> a;
  std::optional<int> M;
  std::vector<int> K;
  std::vector<int> bands;
  std::optional<double> xmin, xmax;
  std::optional<int> nx;
  std::optional<std::string> out;
  std::optional<std::string> k_convention;
  std::optional<double> tol_gap, tol_cond, tol_drift, tol_residual;
  bool rayleigh_energy = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON config file");
  cmd->add_option("--potential", o.potential,
                  "gaussian5 | asym-exp | constant:<value> | samples:<file>");
  cmd->add_option("--a", o.a, "lattice constant");
  cmd->add_option("--M", o.M, "Fourier truncation half-width");
  cmd->add_option("--band", o.bands, "band index (1-based); repeatable for study");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--tol-gap", o.tol_gap, "relative eigenvalue gap for an isolated band");
  cmd->add_option("--tol-cond", o.tol_cond, "second-smallest singular value floor");
  cmd->add_option("--tol-drift", o.tol_drift, "norm drift that triggers renormalization");
  cmd->add_option("--tol-residual", o.tol_residual,
                  "largest shifted-periodicity residual accepted for assembly");
}

void add_transport(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--K", o.K, "grid size; several values for study")->delimiter(',');
  cmd->add_option("--k-convention", o.k_convention,
                  "paper: K points, K-1 steps (default); steps: K steps")
      ->check(CLI::IsMember({"paper", "steps"}));
  cmd->add_flag("--rayleigh-energy", o.rayleigh_energy,
                "shift the operator by the Rayleigh quotient instead of the integrated energy");
}

RunConfig resolve(const Overrides& o) {
  RunConfig c = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
  if (o.potential) {
    const std::string& p = *o.potential;
    c.potential = PotentialSpec{};
    if (p.rfind("constant:", 0) == 0) {
      c.potential.kind = "constant";
      c.potential.value = std::stod(p.substr(9));
    } else if (p.rfind("samples:", 0) == 0) {
      c.potential.kind = "samples";
      c.potential.samples_file = p.substr(8);
    } else {
      c.potential.kind = "named";
      c.potential.name = p;
    }
  }
  if (o.a) c.a = *o.a;
  if (o.M) c.M = *o.M;
  if (!o.K.empty()) c.K = o.K;
  if (!o.bands.empty()) c.bands = o.bands;
  if (o.xmin || o.xmax || o.nx) {
    const XGrid base = c.effective_x_grid();
    c.x_grid = XGrid{o.xmin.value_or(base.min), o.xmax.value_or(base.max), o.nx.value_or(base.count)};
  }
  if (o.out) c.output_dir = *o.out;
  if (o.k_convention) c.k_convention = parse_k_convention(*o.k_convention);
  if (o.tol_gap) c.tol.gap = *o.tol_gap;
  if (o.tol_cond) c.tol.cond = *o.tol_cond;
  if (o.tol_drift) c.tol.drift = *o.tol_drift;
  if (o.tol_residual) c.tol.assembly_residual = *o.tol_residual;
  if (o.rayleigh_energy) c.rayleigh_energy = true;
  c.validate();
  return c;
}

int do_run(const Overrides& o) {
  const RunConfig c = resolve(o);
  json records = json::array();
  for (int band : c.bands) {
    for (int K : c.K) records.push_back(record_to_json(run_pipeline(c, band, K).record));
  }
  std::cout << (records.size() == 1 ? records.front() : records).dump(2) << '\n';
  return 0;
}

int do_study(const Overrides& o) {
  const RunConfig c = resolve(o);
  const StudyResult s = convergence_study(c);
  json rows = json::array();
  for (const auto& r : s.rows) {
    json row{{"K", r.K}, {"band", r.band}, {"seconds", r.seconds}};
    row["e_rk4"] = r.e_rk4 ? json(*r.e_rk4) : json(nullptr);
    row["e_imag"] = r.e_imag ? json(*r.e_imag) : json(nullptr);
    if (!r.error.empty()) row["error"] = r.error;
    rows.push_back(row);
  }
  json orders = json::array();
  for (const auto& [band, order] : s.orders) {
    orders.push_back({{"band", band}, {"order", order ? json(*order) : json(nullptr)}});
  }
  std::cout << json{{"rows", rows}, {"orders", orders}}.dump(2) << '\n';
  return 0;
}

int do_bands(const Overrides& o, int nk) {
  const RunConfig c = resolve(o);
  const PeriodicPotential pot = build_potential(c);
  const OperatorWorkspace ws(pot);
  json out = json::array();
  for (int band : c.bands) {
    std::vector<double> k;
    const auto e = band_structure(ws, band, nk, &k, EigensolverOptions{c.tol.gap});
    if (!c.output_dir.empty()) {
      write_bands_csv(std::filesystem::path(c.output_dir) / ("bands_b" + std::to_string(band) + ".csv"),
                      k, e);
    }
    const auto [lo, hi] = std::minmax_element(e.begin(), e.end());
    out.push_back({{"band", band}, {"min", *lo}, {"max", *hi}, {"points", nk}});
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal real Wannier functions for one isolated band of a 1D periodic potential"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(wannier1d::kVersion));

  Overrides run_o, study_o, bands_o;
  int nk = 201;

  auto* run = app.add_subcommand("run", "run the full pipeline for each (band, K)");
  add_common(run, run_o);
  add_transport(run, run_o);
  run->add_option("--xmin", run_o.xmin, "left end of the W_0 evaluation grid");
  run->add_option("--xmax", run_o.xmax, "right end of the W_0 evaluation grid");
  run->add_option("--nx", run_o.nx, "number of W_0 evaluation points");

  auto* study = app.add_subcommand("study", "convergence table over a list of K");
  add_common(study, study_o);
  add_transport(study, study_o);

  auto* bands = app.add_subcommand("bands", "E(k) by direct eigensolves");
  add_common(bands, bands_o);
  bands->add_option("--nk", nk, "number of k points over the closed zone")
      ->check(CLI::Range(2, 1000000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << json{{"error", "UsageError"}, {"message", e.what()}}.dump() << '\n';
    return 2;
  }

  try {
    if (*run) return do_run(run_o);
    if (*study) return do_study(study_o);
    return do_bands(bands_o, nk);
  } catch (const std::exception& e) {
    std::cerr << wannier1d::error_to_json(e).dump() << '\n';
    const auto* err = dynamic_cast<const wannier1d::Error*>(&e);
    const bool usage = err && (err->kind() == wannier1d::ErrorKind::config ||
                               err->kind() == wannier1d::ErrorKind::invalid_argument);
    return usage ? 2 : 1;
  }
}
