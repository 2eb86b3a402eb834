#pragma once

#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wannier1d/wannier.hpp"

namespace wannier1d {

inline constexpr const char* kVersion = "0.1.0";

/// How a K from the command line or a config maps to RK4 steps. `paper`
/// treats K as the number of grid points (K-1 steps), `steps` as the number
/// of steps.
enum class KConvention { paper, steps };

int step_count(int K, KConvention convention);
const char* to_string(KConvention convention);
KConvention parse_k_convention(const std::string& text);

struct PotentialSpec {
  /// "named", "coefficients", "samples" or "constant".
  std::string kind = "named";
  std::string name = "gaussian5";
  double c0 = 0.0;
  std::vector<double> cos_terms;
  std::vector<double> sin_terms;
  std::string samples_file;
  double value = 0.0;
};

struct XGrid {
  double min = 0.0;
  double max = 0.0;
  int count = 0;
};

struct Tolerances {
  double gap = 1e-8;
  double cond = 1e-10;
  double drift = 1e-10;
  double assembly_residual = kMaxAssemblyResidual;
};

struct RunConfig {
  PotentialSpec potential;
  double a = 2.0 * std::numbers::pi;
  int M = 10;
  std::vector<int> K{51};
  std::vector<int> bands{1};
  /// Empty count means the default window of +-15 cells with 3001 points.
  XGrid x_grid;
  std::string output_dir;
  KConvention k_convention = KConvention::paper;
  Tolerances tol;
  bool rayleigh_energy = false;

  /// Throws Error(config) on invalid combinations.
  void validate() const;
  XGrid effective_x_grid() const;
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& config);
RunConfig load_config(const std::filesystem::path& path);

/// Builds the potential described by the config (reads the samples file if
/// needed).
PeriodicPotential build_potential(const RunConfig& config);

struct StageTimes {
  double potential = 0.0;
  double initial = 0.0;
  double transport = 0.0;
  double gauge = 0.0;
  double assembly = 0.0;
  double evaluation = 0.0;
  /// Potential through assembly; evaluation excluded.
  double through_assembly() const { return potential + initial + transport + gauge + assembly; }
};

struct RunRecord {
  nlohmann::json config;
  int band = 0;
  int K = 0;
  int steps = 0;
  GaugePhases phases;
  double energy_start = 0.0;
  double energy_end = 0.0;
  double e_rk4 = 0.0;
  double e_imag = 0.0;
  double center = 0.0;
  double variance = 0.0;
  double periodicity_residual = 0.0;
  double max_orthogonality = 0.0;
  double max_norm_drift = 0.0;
  int renormalizations = 0;
  StageTimes times;
  std::string version = kVersion;
};

nlohmann::json record_to_json(const RunRecord& record);

/// Everything produced by one (band, K) run.
struct RunResult {
  RunRecord record;
  Trajectory trajectory;
  WannierRepresentation representation;
  std::vector<double> x;
  std::vector<cplx> w;
};

/// Runs potential -> initial state -> transport -> gauge -> assembly ->
/// evaluation for one band and one K. Writes the tables and the record to
/// config.output_dir when it is set.
RunResult run_pipeline(const RunConfig& config, int band, int K);
/// Uses the first band and first K of the config.
RunResult run_pipeline(const RunConfig& config);

struct StudyRow {
  int K = 0;
  int band = 0;
  double seconds = 0.0;
  std::optional<double> e_rk4;
  std::optional<double> e_imag;
  std::string error;
};

struct StudyResult {
  std::vector<StudyRow> rows;
  /// (band, fitted order of E_RK4 in K) over the pre-roundoff rows.
  std::vector<std::pair<int, std::optional<double>>> orders;
};

/// Rows with E_RK4 at or above this are considered free of roundoff.
inline constexpr double kRoundoffFloor = 1e-10;
/// Rows above this are still pre-asymptotic (the step is too coarse for the
/// band) and are left out of the order fit as well.
inline constexpr double kAsymptoticCeiling = 1e-3;

/// -slope of the least-squares line through (log K, log E) for the given
/// points. Needs at least two points.
double fitted_order(const std::vector<int>& K, const std::vector<double>& error);

/// One run per (K, band); per-run failures are recorded in the row and the
/// study continues. Orders are fitted over rows with E_RK4 in
/// [kRoundoffFloor, kAsymptoticCeiling].
StudyResult convergence_study(const RunConfig& config);

void write_alpha_csv(const std::filesystem::path& path, const WannierRepresentation& rep);
void write_wannier_csv(const std::filesystem::path& path, const std::vector<double>& x,
                       const std::vector<cplx>& w);
void write_bands_csv(const std::filesystem::path& path, const std::vector<double>& k,
                     const std::vector<double>& energy);
void write_study_csv(const std::filesystem::path& path, const StudyResult& study);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// E(k) on n_k uniform points of the closed zone, by direct eigensolves.
std::vector<double> band_structure(const OperatorWorkspace& ws, int band, int n_k,
                                   std::vector<double>* k_out = nullptr,
                                   const EigensolverOptions& options = {});

/// {"error": kind, "message": ..., "k": ..., "band": ...}.
nlohmann::json error_to_json(const std::exception& e);

}  // namespace wannier1d
