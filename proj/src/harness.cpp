#include "wannier1d/harness.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "wannier1d/errors.hpp"

namespace wannier1d {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Accepts either a scalar or an array of integers.
std::vector<int> int_list(const json& j, const char* key) {
  std::vector<int> out;
  if (j.is_number_integer()) {
    out.push_back(j.get<int>());
  } else if (j.is_array()) {
    for (const auto& v : j) {
      if (!v.is_number_integer()) throw ConfigError(std::string(key) + ": expected integers");
      out.push_back(v.get<int>());
    }
  } else {
    throw ConfigError(std::string(key) + ": expected an integer or a list of integers");
  }
  return out;
}

void reject_unknown(const json& j, const std::set<std::string>& known, const char* where) {
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
  }
}

std::string run_tag(int band, int K) {
  return "b" + std::to_string(band) + "_K" + std::to_string(K);
}

// Writes through a sibling temporary file so readers never see a partial file.
template <class Fill>
void write_atomically(const fs::path& path, Fill&& fill) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << std::setprecision(17);
    fill(out);
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace

int step_count(int K, KConvention convention) {
  return convention == KConvention::paper ? K - 1 : K;
}

const char* to_string(KConvention convention) {
  return convention == KConvention::paper ? "paper" : "steps";
}

KConvention parse_k_convention(const std::string& text) {
  if (text == "paper") return KConvention::paper;
  if (text == "steps") return KConvention::steps;
  throw ConfigError("k_convention must be 'paper' or 'steps', got '" + text + "'");
}

void RunConfig::validate() const {
  if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("a must be positive and finite");
  if (M < 1) throw ConfigError("M must be at least 1");
  if (K.empty()) throw ConfigError("at least one K is required");
  if (bands.empty()) throw ConfigError("at least one band is required");
  for (int k : K) {
    if (step_count(k, k_convention) < 2) {
      throw ConfigError("K=" + std::to_string(k) + " gives fewer than 2 steps under the '" +
                        to_string(k_convention) + "' convention");
    }
  }
  for (int b : bands) {
    if (b < 1 || b > 2 * M + 1) throw ConfigError("band index out of range 1..2M+1");
  }
  if (x_grid.count < 0) throw ConfigError("x grid count must be non-negative");
  if (x_grid.count > 0 && !(x_grid.max >= x_grid.min)) {
    throw ConfigError("x grid needs max >= min");
  }
  const auto& kind = potential.kind;
  if (kind != "named" && kind != "coefficients" && kind != "samples" && kind != "constant") {
    throw ConfigError("potential kind must be named, coefficients, samples or constant");
  }
  if (kind == "samples" && potential.samples_file.empty()) {
    throw ConfigError("samples potential needs a file");
  }
  for (const auto* t : {&tol.gap, &tol.cond, &tol.drift, &tol.assembly_residual}) {
    if (!(*t > 0.0)) throw ConfigError("tolerances must be positive");
  }
}

XGrid RunConfig::effective_x_grid() const {
  if (x_grid.count > 0) return x_grid;
  return XGrid{-15.0 * a, 15.0 * a, 3001};
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j,
                 {"a", "M", "K", "band", "potential", "x_grid", "output_dir", "k_convention",
                  "tolerances", "rayleigh_energy"},
                 "config");
  RunConfig c;
  try {
    if (j.contains("a")) c.a = j.at("a").get<double>();
    if (j.contains("M")) c.M = j.at("M").get<int>();
    if (j.contains("K")) c.K = int_list(j.at("K"), "K");
    if (j.contains("band")) c.bands = int_list(j.at("band"), "band");
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("k_convention")) {
      c.k_convention = parse_k_convention(j.at("k_convention").get<std::string>());
    }
    if (j.contains("rayleigh_energy")) c.rayleigh_energy = j.at("rayleigh_energy").get<bool>();
    if (j.contains("potential")) {
      const json& p = j.at("potential");
      reject_unknown(p, {"kind", "name", "c0", "cos", "sin", "file", "value"}, "potential");
      auto& s = c.potential;
      s.kind = p.value("kind", std::string("named"));
      if (p.contains("name")) s.name = p.at("name").get<std::string>();
      if (p.contains("c0")) s.c0 = p.at("c0").get<double>();
      if (p.contains("cos")) s.cos_terms = p.at("cos").get<std::vector<double>>();
      if (p.contains("sin")) s.sin_terms = p.at("sin").get<std::vector<double>>();
      if (p.contains("file")) s.samples_file = p.at("file").get<std::string>();
      if (p.contains("value")) s.value = p.at("value").get<double>();
    }
    if (j.contains("x_grid")) {
      const json& g = j.at("x_grid");
      reject_unknown(g, {"min", "max", "count"}, "x_grid");
      c.x_grid.min = g.at("min").get<double>();
      c.x_grid.max = g.at("max").get<double>();
      c.x_grid.count = g.at("count").get<int>();
    }
    if (j.contains("tolerances")) {
      const json& t = j.at("tolerances");
      reject_unknown(t, {"gap", "cond", "drift", "assembly_residual"}, "tolerances");
      c.tol.gap = t.value("gap", c.tol.gap);
      c.tol.cond = t.value("cond", c.tol.cond);
      c.tol.drift = t.value("drift", c.tol.drift);
      c.tol.assembly_residual = t.value("assembly_residual", c.tol.assembly_residual);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  c.validate();
  return c;
}

json config_to_json(const RunConfig& c) {
  json p{{"kind", c.potential.kind}};
  if (c.potential.kind == "named") p["name"] = c.potential.name;
  if (c.potential.kind == "coefficients") {
    p["c0"] = c.potential.c0;
    p["cos"] = c.potential.cos_terms;
    p["sin"] = c.potential.sin_terms;
  }
  if (c.potential.kind == "samples") p["file"] = c.potential.samples_file;
  if (c.potential.kind == "constant") p["value"] = c.potential.value;
  const XGrid g = c.effective_x_grid();
  return json{{"a", c.a},
              {"M", c.M},
              {"K", c.K},
              {"band", c.bands},
              {"potential", p},
              {"x_grid", {{"min", g.min}, {"max", g.max}, {"count", g.count}}},
              {"output_dir", c.output_dir},
              {"k_convention", to_string(c.k_convention)},
              {"tolerances",
               {{"gap", c.tol.gap},
                {"cond", c.tol.cond},
                {"drift", c.tol.drift},
                {"assembly_residual", c.tol.assembly_residual}}},
              {"rayleigh_energy", c.rayleigh_energy}};
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  RunConfig c = config_from_json(j);
  // A relative samples file is taken relative to the config file.
  if (c.potential.kind == "samples" && fs::path(c.potential.samples_file).is_relative()) {
    c.potential.samples_file = (path.parent_path() / c.potential.samples_file).string();
  }
  return c;
}

PeriodicPotential build_potential(const RunConfig& c) {
  const auto& s = c.potential;
  if (s.kind == "named") return named_potential(s.name, c.a, c.M);
  if (s.kind == "constant") return constant_potential(c.a, c.M, s.value);
  if (s.kind == "coefficients") {
    return potential_from_trig_series(c.a, c.M, s.c0, s.cos_terms, s.sin_terms,
                                      "coefficient list");
  }
  if (s.kind == "samples") {
    std::ifstream in(s.samples_file);
    if (!in) throw IoError("cannot read samples file " + s.samples_file);
    std::vector<double> v;
    std::string line;
    while (std::getline(in, line)) {
      std::istringstream ls(line);
      double x;
      if (ls >> x) v.push_back(x);
    }
    if (static_cast<int>(v.size()) != 2 * c.M + 1) {
      std::ostringstream msg;
      msg << "samples file has " << v.size() << " values; M=" << c.M << " needs "
          << 2 * c.M + 1;
      throw ConfigError(msg.str());
    }
    return potential_from_samples(c.a, v, "samples file " + s.samples_file);
  }
  throw ConfigError("unknown potential kind '" + s.kind + "'");
}

json record_to_json(const RunRecord& r) {
  return json{{"config", r.config},
              {"band", r.band},
              {"K", r.K},
              {"steps", r.steps},
              {"phi_zak", r.phases.phi_zak},
              {"phi_0", r.phases.phi_0},
              {"zak_spread", r.phases.zak_spread},
              {"realty_spread", r.phases.realty_spread},
              {"energy_start", r.energy_start},
              {"energy_end", r.energy_end},
              {"e_rk4", r.e_rk4},
              {"e_imag", r.e_imag},
              {"center", r.center},
              {"variance", r.variance},
              {"periodicity_residual", r.periodicity_residual},
              {"max_orthogonality", r.max_orthogonality},
              {"max_norm_drift", r.max_norm_drift},
              {"renormalizations", r.renormalizations},
              {"seconds",
               {{"potential", r.times.potential},
                {"initial", r.times.initial},
                {"transport", r.times.transport},
                {"gauge", r.times.gauge},
                {"assembly", r.times.assembly},
                {"through_assembly", r.times.through_assembly()},
                {"evaluation", r.times.evaluation}}},
              {"version", r.version}};
}

RunResult run_pipeline(const RunConfig& config, int band, int K) {
  config.validate();
  RunResult out;
  RunRecord& rec = out.record;
  rec.config = config_to_json(config);
  rec.band = band;
  rec.K = K;
  rec.steps = step_count(K, config.k_convention);

  auto t = std::chrono::steady_clock::now();
  const PeriodicPotential potential = build_potential(config);
  OperatorWorkspace ws(potential);
  rec.times.potential = seconds_since(t);

  const EigensolverOptions eig{config.tol.gap};
  t = std::chrono::steady_clock::now();
  const BandState initial = band_eigenpair(ws, -0.5 * ws.reciprocal_period(), band, eig);
  rec.times.initial = seconds_since(t);

  TransportOptions topts;
  topts.cond_tol = config.tol.cond;
  topts.drift_tol = config.tol.drift;
  topts.rayleigh_energy = config.rayleigh_energy;
  t = std::chrono::steady_clock::now();
  out.trajectory = integrate_band(ws, band, rec.steps, initial, topts);
  rec.times.transport = seconds_since(t);

  t = std::chrono::steady_clock::now();
  const GaugePhases phases = extract_phases(out.trajectory);
  const CorrectedSequence seq = apply_gauge(out.trajectory, phases);
  rec.times.gauge = seconds_since(t);

  t = std::chrono::steady_clock::now();
  out.representation = assemble_alpha(seq, config.tol.assembly_residual);
  orient_real_sign(out.representation);
  rec.times.assembly = seconds_since(t);

  t = std::chrono::steady_clock::now();
  const XGrid g = config.effective_x_grid();
  out.x.resize(g.count);
  for (int i = 0; i < g.count; ++i) {
    out.x[i] = g.count == 1 ? g.min : g.min + (g.max - g.min) * i / (g.count - 1);
  }
  out.w = evaluate_wannier(out.representation, out.x);
  rec.e_imag = imaginary_ratio(out.representation, reference_cell_grid(config.a));
  rec.times.evaluation = seconds_since(t);

  const auto& traj = out.trajectory;
  rec.phases = out.representation.phases;
  rec.energy_start = traj.front().energy;
  rec.energy_end = traj.back().energy;
  rec.e_rk4 = endpoint_error(traj, ws, eig);
  rec.center = compute_center(rec.phases, config.a);
  rec.variance = compute_variance(traj);
  rec.periodicity_residual = shifted_periodicity_residual(seq);
  rec.max_orthogonality = traj.stats.max_orthogonality;
  rec.max_norm_drift = traj.stats.max_norm_drift;
  rec.renormalizations = traj.stats.renormalizations;

  if (!config.output_dir.empty()) {
    const fs::path dir(config.output_dir);
    const std::string tag = run_tag(band, K);
    write_alpha_csv(dir / ("alpha_" + tag + ".csv"), out.representation);
    write_wannier_csv(dir / ("wannier_" + tag + ".csv"), out.x, out.w);
    std::vector<double> k, e;
    for (const auto& s : traj.states) {
      k.push_back(s.k);
      e.push_back(s.energy);
    }
    write_bands_csv(dir / ("bands_" + tag + ".csv"), k, e);
    write_json(dir / ("record_" + tag + ".json"), record_to_json(rec));
  }
  return out;
}

RunResult run_pipeline(const RunConfig& config) {
  config.validate();
  return run_pipeline(config, config.bands.front(), config.K.front());
}

double fitted_order(const std::vector<int>& K, const std::vector<double>& error) {
  if (K.size() != error.size() || K.size() < 2) {
    throw InvalidArgument("order fit needs at least two (K, error) pairs");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < K.size(); ++i) {
    const double x = std::log(static_cast<double>(K[i]));
    const double y = std::log(error[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(K.size());
  return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

StudyResult convergence_study(const RunConfig& config) {
  config.validate();
  for (std::size_t i = 1; i < config.K.size(); ++i) {
    if (config.K[i] <= config.K[i - 1]) throw ConfigError("study K list must increase");
  }
  RunConfig single = config;
  single.output_dir.clear();
  single.x_grid = XGrid{0.0, 0.0, 1};

  StudyResult study;
  for (int K : config.K) {
    for (int band : config.bands) {
      StudyRow row;
      row.K = K;
      row.band = band;
      try {
        const RunResult r = run_pipeline(single, band, K);
        row.seconds = r.record.times.through_assembly();
        row.e_rk4 = r.record.e_rk4;
        row.e_imag = r.record.e_imag;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      study.rows.push_back(std::move(row));
    }
  }
  for (int band : config.bands) {
    std::vector<int> ks;
    std::vector<double> errs;
    for (const auto& row : study.rows) {
      if (row.band != band || !row.e_rk4) continue;
      if (*row.e_rk4 < kRoundoffFloor || *row.e_rk4 > kAsymptoticCeiling) continue;
      ks.push_back(row.K);
      errs.push_back(*row.e_rk4);
    }
    std::optional<double> order;
    if (ks.size() >= 2) order = fitted_order(ks, errs);
    study.orders.emplace_back(band, order);
  }
  if (!config.output_dir.empty()) {
    const fs::path dir(config.output_dir);
    write_study_csv(dir / "study.csv", study);
    json orders = json::array();
    for (const auto& [band, order] : study.orders) {
      orders.push_back({{"band", band}, {"order", order ? json(*order) : json(nullptr)}});
    }
    write_json(dir / "study.json",
               {{"config", config_to_json(config)}, {"orders", orders}, {"version", kVersion}});
  }
  return study;
}

void write_alpha_csv(const fs::path& path, const WannierRepresentation& rep) {
  write_atomically(path, [&](std::ostream& out) {
    out << "# samples of the Fourier transform of W_0; xi = frequency, re/im = value\n";
    out << "xi,re,im\n";
    for (std::size_t l = 0; l < rep.xi.size(); ++l) {
      out << rep.xi[l] << ',' << rep.alpha[l].real() << ',' << rep.alpha[l].imag() << '\n';
    }
  });
}

void write_wannier_csv(const fs::path& path, const std::vector<double>& x,
                       const std::vector<cplx>& w) {
  write_atomically(path, [&](std::ostream& out) {
    out << "# W_0(x); log10abs = log10|W_0(x)|\n";
    out << "x,re,im,log10abs\n";
    for (std::size_t i = 0; i < x.size(); ++i) {
      out << x[i] << ',' << w[i].real() << ',' << w[i].imag() << ','
          << std::log10(std::abs(w[i])) << '\n';
    }
  });
}

void write_bands_csv(const fs::path& path, const std::vector<double>& k,
                     const std::vector<double>& energy) {
  write_atomically(path, [&](std::ostream& out) {
    out << "# band energy E(k) over the closed zone\n";
    out << "k,E\n";
    for (std::size_t i = 0; i < k.size(); ++i) out << k[i] << ',' << energy[i] << '\n';
  });
}

void write_study_csv(const fs::path& path, const StudyResult& study) {
  write_atomically(path, [&](std::ostream& out) {
    out << "# convergence study; seconds covers potential setup through assembly\n";
    out << "K,band,seconds,e_rk4,e_imag,error\n";
    for (const auto& r : study.rows) {
      out << r.K << ',' << r.band << ',' << r.seconds << ',';
      if (r.e_rk4) out << *r.e_rk4;
      out << ',';
      if (r.e_imag) out << *r.e_imag;
      out << ',';
      std::string msg = r.error;
      for (char& ch : msg) {
        if (ch == ',' || ch == '\n') ch = ';';
      }
      out << msg << '\n';
    }
  });
}

void write_json(const fs::path& path, const json& j) {
  write_atomically(path, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
}

std::vector<double> band_structure(const OperatorWorkspace& ws, int band, int n_k,
                                   std::vector<double>* k_out,
                                   const EigensolverOptions& options) {
  if (n_k < 2) throw InvalidArgument("band structure needs at least two k points");
  const auto grid = transport_grid(ws.reciprocal_period(), n_k - 1);
  std::vector<double> e;
  e.reserve(grid.size());
  for (double k : grid) e.push_back(band_eigenpair(ws, k, band, options).energy);
  if (k_out) *k_out = grid;
  return e;
}

json error_to_json(const std::exception& e) {
  json j{{"error", "Error"}, {"message", e.what()}};
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    j["error"] = to_string(err->kind());
    if (err->k()) j["k"] = *err->k();
    if (err->band()) j["band"] = *err->band();
  } else if (dynamic_cast<const std::bad_alloc*>(&e)) {
    j["error"] = "OutOfMemory";
  } else if (dynamic_cast<const fs::filesystem_error*>(&e)) {
    j["error"] = to_string(ErrorKind::io);
  }
  return j;
}

}  // namespace wannier1d
