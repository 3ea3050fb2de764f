#include "sqh/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "sqh/csvio.hpp"
#include "sqh/emission.hpp"
#include "sqh/errors.hpp"
#include "sqh/fockspace.hpp"
#include "sqh/grids.hpp"
#include "sqh/macroscopic.hpp"
#include "sqh/medium.hpp"
#include "sqh/observables.hpp"
#include "sqh/pulse.hpp"
#include "sqh/sfa.hpp"
#include "sqh/simd.hpp"
#include "sqh/units.hpp"
#include "sqh/wigner.hpp"

#ifndef SQH_CONFIG_DIR
#define SQH_CONFIG_DIR "configs"
#endif

namespace sqh {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

// ---------------------------------------------------------------------------
// small utilities

struct Stopwatch {
  std::chrono::steady_clock::time_point t = std::chrono::steady_clock::now();
  double lap_ms() {
    auto now = std::chrono::steady_clock::now();
    double ms = std::chrono::duration<double, std::milli>(now - t).count();
    t = now;
    return ms;
  }
};

struct OutFile {
  std::string name;
  size_t bytes = 0;
  uint64_t fnv = 0;
};

struct TaskIO {
  std::string dir;
  std::vector<OutFile> files;
  json extra = json::object();    // task-specific manifest fields
  json timings = json::object();  // wall time per stage (excluded from identity)
};

OutFile write_text_file(const std::string& dir, const std::string& name,
                        const std::string& content) {
  const fs::path p = fs::path(dir) / name;
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open '" + p.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw ConfigError("write failed for '" + p.string() + "'");
  return {name, content.size(), fnv1a64(content)};
}

OutFile write_csv_file(const std::string& dir, const std::string& name, CsvWriter& w) {
  w.write_file((fs::path(dir) / name).string());
  return {name, w.buffer().size(), w.hash()};
}

std::string hex64(uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string stat_cell(const StatValue& v) {
  switch (v.kind) {
    case StatValue::Kind::Infinite:
      return "inf";
    case StatValue::Kind::Undefined:
      return "nan";
    default:
      return format_double(v.value);
  }
}

// ---------------------------------------------------------------------------
// pipeline configuration

struct PipelinePlan {
  MediumModel medium;
  LaserPulse pulse;
  TimeGrid tg;
  MomentumGrid mg;
  FrequencyGrid fg;
  double omega_q_au = 0.0;
  SigmaMethod sigma_q = SigmaMethod::HighFrequency;
  SigmaMethod sigma_kappa = SigmaMethod::HighFrequency;
  BsvParameters bsv;
  MacroscopicGeometry geom;
  int n_theta = 16;
  int band_max = 0;
  double volume_m3 = 1.0;
};

SigmaMethod parse_sigma(const Config& cfg, const std::string& key) {
  const std::string v = cfg.get_string(key, "hf");
  if (v == "hf") return SigmaMethod::HighFrequency;
  if (v == "exact") return SigmaMethod::ExactRecursion;
  throw ConfigError("config: " + key + " must be 'hf' or 'exact', got '" + v + "'");
}

// refine_time multiplies the time sampling rate, refine_momentum the momentum
// sampling rate (keeping extents); both are used by the convergence check.
PipelinePlan read_pipeline(const Config& cfg, int refine_time = 1,
                           int refine_momentum = 1) {
  PipelinePlan plan;
  const std::string med = cfg.get_string("medium");
  double def_wl = 0, def_field = 0, def_intensity = 0, def_waist = 0, def_len = 0;
  long long def_nmax = 0;
  if (med == "zno") {
    plan.medium = make_solid(units::energy_au_from_eV(3.4), 0.25,
                             cfg.get_double("dipole_au", 4.0),
                             cfg.get_double("density_per_m3", 4e28), "zno");
    def_wl = 3.2;
    def_field = 1.3e9;
    def_nmax = 40;
    def_waist = 40;
    def_len = 0.005;
  } else if (med == "hydrogen") {
    plan.medium = make_atom(
        0.5, 1.0,
        cfg.get_double("dipole_au", 3.37e-4 / units::dipole_atom_au_SI),
        cfg.get_double("density_per_m3", 1e24), "hydrogen");
    def_wl = 0.8;
    def_intensity = 1e14;
    def_nmax = 60;
    def_waist = 100;
    def_len = 250;
  } else if (med == "custom") {
    const std::string kind = cfg.get_string("medium_kind");
    const double gap = units::energy_au_from_eV(cfg.get_double("gap_eV"));
    const double mass = cfg.get_double("mass_me");
    const double d0 = cfg.get_double("dipole_au");
    const double dens = cfg.get_double("density_per_m3");
    if (kind == "atom") {
      plan.medium = make_atom(gap, mass, d0, dens, "custom-atom");
    } else if (kind == "solid") {
      plan.medium = make_solid(gap, mass, d0, dens, "custom-solid");
    } else {
      throw ConfigError("config: medium_kind must be 'atom' or 'solid'");
    }
  } else {
    throw ConfigError("config: medium must be 'zno', 'hydrogen', or 'custom'");
  }

  const double wl_um =
      def_wl > 0 ? cfg.get_double("wavelength_um", def_wl) : cfg.get_double("wavelength_um");
  const bool has_f = cfg.has("field_V_per_m");
  const bool has_i = cfg.has("intensity_W_per_cm2");
  if (has_f && has_i) {
    throw ConfigError("config: give exactly one of field_V_per_m / intensity_W_per_cm2");
  }
  double field_V_per_m;
  if (has_f) {
    field_V_per_m = cfg.get_double("field_V_per_m");
  } else if (has_i) {
    field_V_per_m =
        units::field_V_per_m_from_intensity_W_per_cm2(cfg.get_double("intensity_W_per_cm2"));
  } else if (def_field > 0) {
    field_V_per_m = def_field;
  } else if (def_intensity > 0) {
    field_V_per_m = units::field_V_per_m_from_intensity_W_per_cm2(def_intensity);
  } else {
    throw ConfigError("config: custom medium needs field_V_per_m or intensity_W_per_cm2");
  }

  plan.pulse = make_pulse(wl_um * 1e-6, field_V_per_m,
                          cfg.get_double("tau_cycles", 6.0),
                          cfg.get_double("cep_rad", 0.0));

  const long long n_max =
      def_nmax > 0 ? cfg.get_int("n_max_order", def_nmax) : cfg.get_int("n_max_order");
  if (n_max < 1) throw ConfigError("config: n_max_order must be >= 1");
  const long long ppo = cfg.get_int("points_per_order", 32);
  plan.fg = make_frequency_grid(plan.pulse.omega0_au, static_cast<int>(n_max),
                                static_cast<int>(ppo));
  plan.band_max = static_cast<int>(cfg.get_int("band_max", n_max));
  if (plan.band_max < 1 || plan.band_max > n_max) {
    throw ConfigError("config: band_max must be in [1, n_max_order]");
  }

  const long long oversample = cfg.get_int("time_oversample", 1);
  if (oversample < 1 || oversample > 64) {
    throw ConfigError("config: time_oversample must be in [1, 64]");
  }
  plan.tg = make_time_grid(plan.pulse,
                           static_cast<int>(n_max * oversample * refine_time),
                           cfg.get_double("envelope_floor", 1e-8));

  const double e_cut = cutoff_energy(plan.medium, plan.pulse.F0_au, plan.pulse.omega0_au);
  const double p_free = std::sqrt(2.0 * plan.medium.mass_au * e_cut);
  const double p_par_max = cfg.get_double("p_par_max_factor", 1.5) *
                           (plan.pulse.F0_au / plan.pulse.omega0_au + p_free);
  const double p_perp_max = cfg.get_double("p_perp_max_factor", 1.5) * p_free;
  long long n_par = cfg.get_int("n_p_par", 201);
  long long n_perp = cfg.get_int("n_p_perp", 41);
  if (refine_momentum > 1) {
    n_par = (n_par - 1) * refine_momentum + 1;
    n_perp = (n_perp - 1) * refine_momentum + 1;
  }
  plan.mg = make_momentum_grid(p_par_max, p_perp_max, static_cast<int>(n_par),
                               static_cast<int>(n_perp));

  const double sideband_order = cfg.get_double("sideband_order", 2.0);
  if (!(sideband_order > 0)) throw ConfigError("config: sideband_order must be > 0");
  plan.omega_q_au = sideband_order * plan.pulse.omega0_au;

  plan.sigma_q = parse_sigma(cfg, "sigma_q_method");
  plan.sigma_kappa = parse_sigma(cfg, "sigma_kappa_method");
  if (plan.sigma_kappa == SigmaMethod::ExactRecursion) {
    const double est_bytes = 6.0 * 8.0 * plan.fg.size() * static_cast<double>(plan.tg.n);
    if (est_bytes > 2e9) {
      throw RefusalError(
          "exact sigma_kappa needs per-frequency time series (~" +
          std::to_string(est_bytes / 1e9) +
          " GB for this grid); reduce n_max_order/points_per_order or use 'hf'");
    }
  }

  plan.bsv.omega_q_SI = units::omega_SI_from_au(plan.omega_q_au);
  const bool has_r = cfg.has("bsv_r");
  const bool has_e = cfg.has("bsv_pulse_energy_nJ");
  if (has_r == has_e) {
    throw ConfigError("config: give exactly one of bsv_r / bsv_pulse_energy_nJ");
  }
  plan.bsv.r = has_r ? cfg.get_double("bsv_r")
                     : squeezing_from_pulse_energy(
                           cfg.get_double("bsv_pulse_energy_nJ") * 1e-9,
                           plan.bsv.omega_q_SI);
  if (plan.bsv.r < 0) throw ConfigError("config: bsv_r must be >= 0");
  plan.bsv.theta = cfg.get_double("bsv_theta_rad", 0.0);
  plan.bsv.waist_m = cfg.get_double("bsv_waist_um", 100.0) * 1e-6;
  plan.bsv.bandwidth_m = cfg.get_double("bsv_bandwidth_nm", 50.0) * 1e-9;

  plan.geom.density_per_m3 = plan.medium.density_per_m3;
  plan.geom.waist_m =
      (def_waist > 0 ? cfg.get_double("waist_um", def_waist) : cfg.get_double("waist_um")) *
      1e-6;
  plan.geom.length_m =
      (def_len > 0 ? cfg.get_double("length_um", def_len) : cfg.get_double("length_um")) *
      1e-6;

  plan.n_theta = static_cast<int>(cfg.get_int("n_theta", 16));
  if (plan.n_theta < 2) throw ConfigError("config: n_theta must be >= 2");
  plan.volume_m3 = cfg.get_double("volume_m3", 1.0);
  if (!(plan.volume_m3 > 0)) throw ConfigError("config: volume_m3 must be > 0");
  return plan;
}

// ---------------------------------------------------------------------------
// pipeline execution

struct PipelineData {
  EmissionSpectra em;
  SpectralResult at_theta;
  ThetaScan scan;
  std::vector<double> dn_avg;  // theta-averaged sideband spectral density
};

void check_finite_spectra(const EmissionSpectra& em) {
  for (size_t k = 0; k < em.H.size(); ++k) {
    const bool ok = std::isfinite(em.H[k].real()) && std::isfinite(em.H[k].imag()) &&
                    std::isfinite(em.F[k].real()) && std::isfinite(em.F[k].imag()) &&
                    std::isfinite(em.G[k].real()) && std::isfinite(em.G[k].imag());
    if (!ok) {
      throw ValidationError("emission spectra contain non-finite values at grid index " +
                            std::to_string(k));
    }
  }
}

PipelineData run_pipeline(const PipelinePlan& plan, int threads, json& timings) {
  Stopwatch sw;
  const PulseFields pf = sample_pulse(plan.pulse, plan.tg);
  const FilterKernel filter = make_filter_kernel(plan.pulse.period_au(), plan.tg.dt);

  SfaProblem prob;
  prob.medium = &plan.medium;
  prob.tg = plan.tg;
  prob.mg = plan.mg;
  prob.F = pf.F;
  prob.A = pf.A;
  prob.filter = filter;
  prob.omega_q_au = plan.omega_q_au;
  prob.sigma_q = plan.sigma_q;
  prob.sigma_kappa = plan.sigma_kappa;
  if (plan.sigma_kappa == SigmaMethod::ExactRecursion) {
    for (int k = 0; k < plan.fg.size(); ++k) {
      prob.exact_kappa_omegas.push_back(plan.fg.omega(k));
    }
  }
  prob.threads = threads;
  const SfaReductions red = reduce_over_momentum(prob);
  timings["sfa_ms"] = sw.lap_ms();

  EmissionOptions eo;
  eo.volume_m3 = plan.volume_m3;
  eo.sigma_kappa = plan.sigma_kappa;
  PipelineData out;
  out.em = assemble_emission(red, plan.tg, plan.fg, plan.omega_q_au, eo, simd::active());
  check_finite_spectra(out.em);
  timings["emission_ms"] = sw.lap_ms();

  out.at_theta = macroscopic_spectrum(out.em, plan.fg, plan.geom, plan.bsv);
  out.scan = theta_scan(out.em, plan.fg, plan.geom, plan.bsv, plan.n_theta);
  const int nw = plan.fg.size();
  out.dn_avg.assign(nw, 0.0);
  for (int i = 0; i < plan.n_theta; ++i) {
    BsvParameters b = plan.bsv;
    b.theta = 2.0 * units::pi * i / plan.n_theta;
    const SpectralResult r = macroscopic_spectrum(out.em, plan.fg, plan.geom, b);
    for (int k = 0; k < nw; ++k) out.dn_avg[k] += r.dn_sideband[k] / plan.n_theta;
  }
  timings["macroscopic_ms"] = sw.lap_ms();
  return out;
}

json grid_summary(const PipelinePlan& plan) {
  return json{{"n_time", plan.tg.n},
              {"dt_au", plan.tg.dt},
              {"n_p_par", plan.mg.n_par},
              {"n_p_perp", plan.mg.n_perp},
              {"p_par_max_au", plan.mg.p_par_max},
              {"p_perp_max_au", plan.mg.p_perp_max},
              {"n_omega", plan.fg.size()},
              {"points_per_order", plan.fg.points_per_order}};
}

// ---------------------------------------------------------------------------
// coupling resolution for the quantum-state tasks

struct CouplingSpec {
  bool pipeline = false;
  PipelinePlan plan;   // valid when pipeline
  long long band = 0;  // valid when pipeline
  SidebandCoupling sc;  // zeta filled directly when !pipeline
};

CouplingSpec read_coupling(const Config& cfg) {
  CouplingSpec cs;
  const std::string src = cfg.get_string("zeta_source", "value");
  if (src == "pipeline") {
    cs.pipeline = true;
    cs.plan = read_pipeline(cfg);
    cs.band = cfg.get_int("band");
    if (cs.band < 1 || cs.band > cs.plan.fg.n_max_order) {
      throw ConfigError("config: band must be in [1, n_max_order]");
    }
    cs.sc.r = cs.plan.bsv.r;
    cs.sc.theta = cs.plan.bsv.theta;
  } else if (src == "value") {
    cs.sc.r = cfg.get_double("bsv_r");
    if (cs.sc.r < 0) throw ConfigError("config: bsv_r must be >= 0");
    cs.sc.theta = cfg.get_double("bsv_theta_rad", 0.0);
    const double z2 = cfg.get_double("zeta2");
    if (z2 < 0) throw ConfigError("config: zeta2 must be >= 0");
    cs.sc.zeta = std::polar(std::sqrt(z2), cfg.get_double("zeta_arg_rad", 0.0));
  } else {
    throw ConfigError("config: zeta_source must be 'value' or 'pipeline'");
  }
  return cs;
}

SidebandCoupling resolve_coupling(const CouplingSpec& cs, int threads, TaskIO& io) {
  if (!cs.pipeline) return cs.sc;
  const PipelineData data = run_pipeline(cs.plan, threads, io.timings);
  SidebandCoupling sc = cs.sc;
  sc.zeta = data.at_theta.bands[static_cast<size_t>(cs.band - 1)].zeta;
  io.extra["band"] = cs.band;
  io.extra["zeta2_from_band"] = std::norm(sc.zeta);
  io.extra["grids"] = grid_summary(cs.plan);
  return sc;
}

ProjectionOptions read_popt(const Config& cfg, const RunOptions& opt) {
  ProjectionOptions p;
  p.allow_expensive = opt.allow_expensive || cfg.get_bool("allow_expensive", false);
  p.tail_epsilon = cfg.get_double("tail_epsilon", 1e-14);
  if (!(p.tail_epsilon > 0) || p.tail_epsilon >= 1) {
    throw ConfigError("config: tail_epsilon must be in (0, 1)");
  }
  p.max_dimension = cfg.get_int("max_dimension", 2'000'000);
  if (p.max_dimension < 2) throw ConfigError("config: max_dimension must be >= 2");
  return p;
}

// ---------------------------------------------------------------------------
// plot scripts (emitted next to the data so runs are self-contained)

const char* kPlotHelpers =
    "import csv\n"
    "import matplotlib\n"
    "matplotlib.use(\"Agg\")\n"
    "import matplotlib.pyplot as plt\n"
    "\n"
    "def load(path):\n"
    "    with open(path) as f:\n"
    "        return list(csv.DictReader(f))\n"
    "\n"
    "def col(rows, name):\n"
    "    return [float(r[name]) for r in rows]\n"
    "\n";

std::string plot_spectrum() {
  return std::string(kPlotHelpers) + R"PY(sp = load("spectrum.csv")
fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4))
ax1.semilogy(col(sp, "omega_over_omega0"), col(sp, "dn_hhg"), label="one-photon")
ax1.semilogy(col(sp, "omega_over_omega0"), col(sp, "dn_qshhg_theta_avg"),
             label="sideband (theta avg)")
ax1.set_xlabel("harmonic order")
ax1.set_ylabel("dn/domega (s)")
ax1.legend()
hb = load("hhg_bands.csv")
qa = load("qshhg_bands_avg.csv")
ax2.semilogy(col(hb, "N"), [max(v, 1e-300) for v in col(hb, "n_photons")], "o",
             label="one-photon")
ax2.semilogy(col(qa, "N"), [max(v, 1e-300) for v in col(qa, "n_photons")], "s",
             label="sideband (theta avg)")
ax2.set_xlabel("harmonic order N")
ax2.set_ylabel("band photons")
ax2.legend()
fig.tight_layout()
fig.savefig("figure.png", dpi=160)
print("wrote figure.png")
)PY";
}

std::string plot_bands_theta() {
  return std::string(kPlotHelpers) + R"PY(rows = load("bands_theta.csv")
thetas = sorted({r["theta_rad"] for r in rows}, key=float)
fig, ax = plt.subplots(figsize=(7, 4.5))
for th in thetas:
    sel = [r for r in rows if r["theta_rad"] == th]
    ax.semilogy(col(sel, "N"), [max(v, 1e-300) for v in col(sel, "n_photons")],
                "o-", label="theta = %.3f" % float(th))
ax.set_xlabel("harmonic order N")
ax.set_ylabel("band photons")
ax.legend(fontsize=7, ncol=2)
fig.tight_layout()
fig.savefig("figure.png", dpi=160)
print("wrote figure.png")
)PY";
}

std::string plot_joint() {
  return std::string(kPlotHelpers) + R"PY(import math
rows = load("joint.csv")
m_max = max(int(float(r["m"])) for r in rows)
n_max = max(int(float(r["n"])) for r in rows)
grid = [[0.0] * (n_max + 1) for _ in range(m_max + 1)]
for r in rows:
    grid[int(float(r["m"]))][int(float(r["n"]))] = float(r["p"])
logp = [[math.log10(v) if v > 1e-300 else -300 for v in row] for row in grid]
fig, ax = plt.subplots(figsize=(6, 5))
im = ax.imshow(logp, origin="lower", aspect="auto", vmin=-30, vmax=0)
ax.set_xlabel("sideband photons n")
ax.set_ylabel("band photons m")
fig.colorbar(im, label="log10 P(m, n)")
fig.tight_layout()
fig.savefig("figure.png", dpi=160)
print("wrote figure.png")
)PY";
}

std::string plot_marginals() {
  return std::string(kPlotHelpers) + R"PY(import math
rows = load("marginal.csv")
series = sorted({r["series"] for r in rows}, key=float)
fig, ax = plt.subplots(figsize=(7, 4.5))
for s in series:
    sel = [r for r in rows if r["series"] == s]
    ax.plot(col(sel, "m"), [lp / math.log(10) for lp in col(sel, "ln_p_exact")],
            label="zeta2 = %s" % sel[0]["zeta2"])
ax.set_xlabel("band photons m")
ax.set_ylabel("log10 P(m)")
ax.set_ylim(bottom=-30)
ax.legend(fontsize=8)
fig.tight_layout()
fig.savefig("figure.png", dpi=160)
print("wrote figure.png")
)PY";
}

std::string plot_marginal_compare() {
  return std::string(kPlotHelpers) + R"PY(rows = load("marginal_compare.csv")
fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4))
ax1.semilogy(col(rows, "m"), [max(v, 1e-300) for v in col(rows, "p_exact")],
             label="exact")
ax1.semilogy(col(rows, "m"), [max(v, 1e-300) for v in col(rows, "p_analytic")],
             ".", label="analytic")
ax1.set_xlabel("band photons m")
ax1.set_ylabel("P(m)")
ax1.legend()
ax2.plot(col(rows, "m"), col(rows, "rel_dev"))
ax2.set_xlabel("band photons m")
ax2.set_ylabel("relative deviation")
fig.tight_layout()
fig.savefig("figure.png", dpi=160)
print("wrote figure.png")
)PY";
}

std::string plot_projq_scan() {
  return std::string(kPlotHelpers) + R"PY(rows = load("projq_analytic.csv")
even = [r for r in rows if r["parity"] == "0"]
odd = [r for r in rows if r["parity"] == "1"]
fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4))
for sel, mark, lab in ((even, "s", "even"), (odd, "o", "odd")):
    if not sel:
        continue
    ax1.loglog(col(sel, "l"), col(sel, "var_x1"), mark, label="X1 " + lab)
    ax1.loglog(col(sel, "l"), col(sel, "var_x2"), mark, mfc="none", label="X2 " + lab)
    g2 = [(float(r["l"]), float(r["g2"])) for r in sel if r["g2"] not in ("inf", "nan")]
    if g2:
        ax2.loglog([v[0] for v in g2], [v[1] for v in g2], mark, label=lab)
ax1.axhline(0.25, color="k", ls="--", lw=0.7)
ax1.set_xlabel("measured sideband photons l")
ax1.set_ylabel("quadrature variance")
ax1.legend(fontsize=8)
ax2.axhline(1.0, color="k", ls="--", lw=0.7)
ax2.set_xlabel("measured sideband photons l")
ax2.set_ylabel("g2(0)")
ax2.legend()
fig.tight_layout()
fig.savefig("figure.png", dpi=160)
print("wrote figure.png")
)PY";
}

std::string plot_compare_generic(const char* csv_name, const char* xlabel) {
  std::string s(kPlotHelpers);
  s += "rows = load(\"";
  s += csv_name;
  s += "\")\n";
  s += R"PY(fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4))
xkey = list(rows[0].keys())[0]
x = col(rows, xkey)
g2n = [(xv, float(r["g2_num"])) for xv, r in zip(x, rows) if r["g2_num"] not in ("inf", "nan")]
g2a = [(xv, float(r["g2_ana"])) for xv, r in zip(x, rows) if r["g2_ana"] not in ("inf", "nan")]
if g2n:
    ax1.semilogx([v[0] for v in g2n], [v[1] for v in g2n], "-", label="numeric")
if g2a:
    ax1.semilogx([v[0] for v in g2a], [v[1] for v in g2a], ".", label="analytic")
ax1.set_xlabel(xkey)
ax1.set_ylabel("g2(0)")
ax1.legend()
ax2.loglog(x, col(rows, "var_x1_num"), "-", label="X1 numeric")
ax2.loglog(x, col(rows, "var_x1_ana"), ".", label="X1 analytic")
ax2.loglog(x, col(rows, "var_x2_num"), "-", label="X2 numeric")
ax2.loglog(x, col(rows, "var_x2_ana"), ".", label="X2 analytic")
ax2.set_xlabel(xkey)
ax2.set_ylabel("quadrature variance")
ax2.legend(fontsize=8)
fig.tight_layout()
fig.savefig("figure.png", dpi=160)
print("wrote figure.png")
)PY";
  (void)xlabel;
  return s;
}

std::string plot_projn_scan(bool averaged) {
  std::string s(kPlotHelpers);
  s += averaged ? "rows = load(\"projn_analytic_avg.csv\")\nthetas = [\"avg\"]\n"
                : "rows = load(\"projn_analytic.csv\")\n"
                  "thetas = sorted({r[\"theta\"] for r in rows}, key=float)\n";
  s += R"PY(fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4))
first = rows if thetas == ["avg"] else [r for r in rows if r["theta"] == thetas[0]]
ax1.plot(col(first, "m"), col(first, "g2"), "o-")
ax1.set_xlabel("band photons m")
ax1.set_ylabel("g2(0)")
for th in thetas:
    sel = rows if th == "avg" else [r for r in rows if r["theta"] == th]
    lab = "" if th == "avg" else " theta=%.3f" % float(th)
    ax2.semilogy(col(sel, "m"), col(sel, "var_x1"), "-", label="X1" + lab)
    ax2.semilogy(col(sel, "m"), col(sel, "var_x2"), "--", label="X2" + lab)
ax2.set_xlabel("band photons m")
ax2.set_ylabel("quadrature variance")
ax2.legend(fontsize=8)
fig.tight_layout()
fig.savefig("figure.png", dpi=160)
print("wrote figure.png")
)PY";
  return s;
}

std::string plot_wigner(const std::vector<std::string>& names) {
  std::string s(kPlotHelpers);
  s += "names = [";
  for (size_t i = 0; i < names.size(); ++i) {
    if (i) s += ", ";
    s += "\"" + names[i] + "\"";
  }
  s += "]\n";
  s += R"PY(fig, axes = plt.subplots(1, len(names), figsize=(5.2 * len(names), 4.4),
                         squeeze=False)
for ax, name in zip(axes[0], names):
    rows = load(name)
    xs = sorted({float(r["x"]) for r in rows})
    ps = sorted({float(r["p"]) for r in rows})
    grid = [[0.0] * len(xs) for _ in ps]
    xi = {v: i for i, v in enumerate(xs)}
    pi = {v: i for i, v in enumerate(ps)}
    wmax = 0.0
    for r in rows:
        w = float(r["w"])
        grid[pi[float(r["p"])]][xi[float(r["x"])]] = w
        wmax = max(wmax, abs(w))
    im = ax.pcolormesh(xs, ps, grid, cmap="RdBu_r", vmin=-wmax, vmax=wmax,
                       shading="nearest")
    ax.set_xlabel("x quadrature")
    ax.set_ylabel("p quadrature")
    ax.set_title(name)
    fig.colorbar(im, ax=ax)
fig.tight_layout()
fig.savefig("figure.png", dpi=160)
print("wrote figure.png")
)PY";
  return s;
}

std::string plot_washout() {
  return std::string(kPlotHelpers) + R"PY(rows = load("washout.csv")
fig, ax = plt.subplots(figsize=(6.5, 4.5))
ax.plot(col(rows, "delta_l"), col(rows, "ratio_all"), "b-", label="all outcomes")
ax.plot(col(rows, "delta_l"), col(rows, "ratio_even"), "r--", label="matching parity only")
ax.set_xlabel("photon-number resolution delta_l")
ax.set_ylabel("fringe modulation (normalized)")
ax.set_ylim(0, 1.05)
ax.legend()
fig.tight_layout()
fig.savefig("figure.png", dpi=160)
print("wrote figure.png")
)PY";
}

std::string plot_squeezing_scan() {
  return std::string(kPlotHelpers) + R"PY(rows = load("squeezing_scan.csv")
rs = sorted({r["r"] for r in rows}, key=float)
fig, ax = plt.subplots(figsize=(6.5, 4.5))
for rv in rs:
    sel = [r for r in rows if r["r"] == rv]
    ax.loglog(col(sel, "zeta2"), col(sel, "var_x1"), label="r = %s" % rv)
ax.set_xlabel("band coupling |zeta|^2")
ax.set_ylabel("X1 variance")
ax.legend()
fig.tight_layout()
fig.savefig("figure.png", dpi=160)
print("wrote figure.png")
)PY";
}

std::string plot_scaling() {
  return std::string(kPlotHelpers) + R"PY(rows = load("scaling.csv")
for r in rows:
    print("set %s: scale %s, ratio to base %s" %
          (r["index"], r["scale"], r["ratio_to_base"]))
fig, ax = plt.subplots(figsize=(6, 4))
ax.semilogy(col(rows, "index"), col(rows, "ratio_to_base"), "o-")
ax.set_xlabel("parameter set")
ax.set_ylabel("sideband susceptibility ratio")
fig.tight_layout()
fig.savefig("figure.png", dpi=160)
print("wrote figure.png")
)PY";
}

// ---------------------------------------------------------------------------
// task parameter structs (read phase is shared between validate and run)

struct SpectrumParams {
  PipelinePlan plan;
};

struct JointParams {
  CouplingSpec cs;
  long long m_max = 0, n_max = 0;
};

struct MarginalsParams {
  CouplingSpec cs;            // used when a single series
  bool multi = false;
  double r = 0, theta = 0;    // used when multi
  std::vector<double> zeta2_list;
  long long m_max = 0;
};

struct MarginalCompareParams {
  CouplingSpec cs;
  long long m_max = 0;
  double floor = 1e-12;
};

struct ProjqScanParams {
  CouplingSpec cs;
  std::vector<long long> l_list;
};

struct ProjqCompareParams {
  CouplingSpec cs;
  std::vector<long long> l_list;
  ProjectionOptions popt;
};

struct ProjnScanParams {
  CouplingSpec cs;
  long long m_min = 0, m_max = 0;
  std::vector<double> theta_list;
  bool theta_average = false;
  int n_theta = 16;
};

struct ProjnCompareParams {
  CouplingSpec cs;
  std::vector<long long> m_list;
  ProjectionOptions popt;
};

struct WignerParams {
  CouplingSpec cs;
  bool from_band_outcome = false;  // true: condition on band photons (m)
  long long l = 0;
  std::vector<long long> m_list;   // band-outcome maps, one per m
  std::vector<long long> delta_l_list;
  std::vector<std::string> parity_list;
  int nx = 129;
  double pad = 1.6;
  ProjectionOptions popt;
};

struct WashoutParams {
  CouplingSpec cs;
  long long l = 0;
  int delta_l_max = 0;
  WashoutOptions wopt;
  ProjectionOptions popt;
};

struct SqueezeScanParams {
  double theta = 0;
  long long m = 0;
  std::vector<double> r_list, zeta2_list;
};

struct ScalingParams {
  std::vector<double> intensity, wavelength_um, mass;  // [0] is the base set
};

std::vector<long long> read_int_list_nonneg(const Config& cfg, const std::string& key) {
  std::vector<long long> v = cfg.get_int_list(key);
  for (long long x : v) {
    if (x < 0) throw ConfigError("config: " + key + " entries must be >= 0");
  }
  return v;
}

SpectrumParams read_spectrum(const Config& cfg) {
  SpectrumParams p{read_pipeline(cfg)};
  // Accepted here so one spectrum config can also drive convergence-check.
  const double tol = cfg.get_double("convergence_tolerance", 0.10);
  if (!(tol > 0)) throw ConfigError("config: convergence_tolerance must be > 0");
  return p;
}

JointParams read_joint(const Config& cfg) {
  JointParams p;
  p.cs = read_coupling(cfg);
  p.m_max = cfg.get_int("m_max");
  p.n_max = cfg.get_int("n_max");
  if (p.m_max < 0 || p.n_max < 0) throw ConfigError("config: m_max/n_max must be >= 0");
  if ((p.m_max + 1) * (p.n_max + 1) > 40'000'000) {
    throw RefusalError("joint distribution of " +
                       std::to_string((p.m_max + 1) * (p.n_max + 1)) +
                       " entries exceeds the memory cap");
  }
  return p;
}

MarginalsParams read_marginals(const Config& cfg) {
  MarginalsParams p;
  if (cfg.has("zeta2_list")) {
    p.multi = true;
    p.zeta2_list = cfg.get_double_list("zeta2_list");
    for (double z : p.zeta2_list) {
      if (z < 0) throw ConfigError("config: zeta2_list entries must be >= 0");
    }
    p.r = cfg.get_double("bsv_r");
    if (p.r < 0) throw ConfigError("config: bsv_r must be >= 0");
    p.theta = cfg.get_double("bsv_theta_rad", 0.0);
  } else {
    p.cs = read_coupling(cfg);
  }
  p.m_max = cfg.get_int("m_max");
  if (p.m_max < 0 || p.m_max > 100'000'000) {
    throw ConfigError("config: m_max must be in [0, 1e8]");
  }
  return p;
}

MarginalCompareParams read_marginal_compare(const Config& cfg) {
  MarginalCompareParams p;
  p.cs = read_coupling(cfg);
  p.m_max = cfg.get_int("m_max");
  if (p.m_max < 0 || p.m_max > 100'000'000) {
    throw ConfigError("config: m_max must be in [0, 1e8]");
  }
  p.floor = cfg.get_double("probability_floor", 1e-12);
  if (!(p.floor > 0)) throw ConfigError("config: probability_floor must be > 0");
  return p;
}

ProjqScanParams read_projq_scan(const Config& cfg) {
  ProjqScanParams p;
  p.cs = read_coupling(cfg);
  p.l_list = read_int_list_nonneg(cfg, "l_list");
  return p;
}

ProjqCompareParams read_projq_compare(const Config& cfg, const RunOptions& opt) {
  ProjqCompareParams p;
  p.cs = read_coupling(cfg);
  p.l_list = read_int_list_nonneg(cfg, "l_list");
  p.popt = read_popt(cfg, opt);
  return p;
}

ProjnScanParams read_projn_scan(const Config& cfg) {
  ProjnScanParams p;
  p.cs = read_coupling(cfg);
  p.m_min = cfg.get_int("m_min", 0);
  p.m_max = cfg.get_int("m_max", 100);
  if (p.m_min < 0 || p.m_max < p.m_min || p.m_max > 10'000'000) {
    throw ConfigError("config: need 0 <= m_min <= m_max <= 1e7");
  }
  p.theta_average = cfg.get_bool("theta_average", false);
  if (cfg.has("theta_list")) {
    p.theta_list = cfg.get_double_list("theta_list");
  } else {
    p.theta_list = {p.cs.sc.theta};
  }
  p.n_theta = static_cast<int>(cfg.get_int("n_theta", 16));
  if (p.n_theta < 2) throw ConfigError("config: n_theta must be >= 2");
  return p;
}

ProjnCompareParams read_projn_compare(const Config& cfg, const RunOptions& opt) {
  ProjnCompareParams p;
  p.cs = read_coupling(cfg);
  p.m_list = read_int_list_nonneg(cfg, "m_list");
  p.popt = read_popt(cfg, opt);
  return p;
}

WignerParams read_wigner(const Config& cfg, const RunOptions& opt) {
  WignerParams p;
  p.cs = read_coupling(cfg);
  const std::string src = cfg.get_string("source");
  if (src == "projq") {
    p.from_band_outcome = false;
    p.l = cfg.get_int("l");
    if (p.l < 0) throw ConfigError("config: l must be >= 0");
    if (cfg.has("delta_l_list")) {
      p.delta_l_list = read_int_list_nonneg(cfg, "delta_l_list");
    } else {
      p.delta_l_list = {0};
    }
    if (cfg.has("parity_list")) {
      std::string rawlist = cfg.get_string("parity_list");
      size_t pos = 0;
      while (pos != std::string::npos) {
        size_t comma = rawlist.find(',', pos);
        std::string item = rawlist.substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos);
        size_t a = item.find_first_not_of(" \t");
        size_t b = item.find_last_not_of(" \t");
        item = (a == std::string::npos) ? "" : item.substr(a, b - a + 1);
        if (item != "all" && item != "even") {
          throw ConfigError("config: parity_list entries must be 'all' or 'even'");
        }
        p.parity_list.push_back(item);
        pos = (comma == std::string::npos) ? std::string::npos : comma + 1;
      }
    } else {
      p.parity_list.assign(p.delta_l_list.size(), "all");
    }
    if (p.parity_list.size() != p.delta_l_list.size()) {
      throw ConfigError("config: parity_list must match delta_l_list in length");
    }
  } else if (src == "projn") {
    p.from_band_outcome = true;
    if (cfg.has("m_list")) {
      p.m_list = read_int_list_nonneg(cfg, "m_list");
      if (p.m_list.empty()) throw ConfigError("config: m_list must not be empty");
    } else {
      const long long m = cfg.get_int("m");
      if (m < 0) throw ConfigError("config: m must be >= 0");
      p.m_list = {m};
    }
  } else {
    throw ConfigError("config: source must be 'projq' or 'projn'");
  }
  p.nx = static_cast<int>(cfg.get_int("grid_nx", 129));
  if (p.nx < 2 || p.nx > 2049) throw ConfigError("config: grid_nx must be in [2, 2049]");
  p.pad = cfg.get_double("grid_pad", 1.6);
  if (!(p.pad > 0)) throw ConfigError("config: grid_pad must be > 0");
  p.popt = read_popt(cfg, opt);
  return p;
}

WashoutParams read_washout(const Config& cfg, const RunOptions& opt) {
  WashoutParams p;
  p.cs = read_coupling(cfg);
  p.l = cfg.get_int("l");
  if (p.l < 0) throw ConfigError("config: l must be >= 0");
  p.delta_l_max = static_cast<int>(cfg.get_int("delta_l_max"));
  if (p.delta_l_max < 0 || p.delta_l_max > 100'000) {
    throw ConfigError("config: delta_l_max must be in [0, 1e5]");
  }
  p.wopt.window = cfg.get_double("window", 1.5);
  p.wopt.samples = static_cast<int>(cfg.get_int("samples", 301));
  if (!(p.wopt.window > 0) || p.wopt.samples < 2) {
    throw ConfigError("config: need window > 0 and samples >= 2");
  }
  p.popt = read_popt(cfg, opt);
  return p;
}

SqueezeScanParams read_squeezing_scan(const Config& cfg) {
  SqueezeScanParams p;
  p.theta = cfg.get_double("bsv_theta_rad", 0.0);
  p.m = cfg.get_int("m", 50);
  if (p.m < 0) throw ConfigError("config: m must be >= 0");
  p.r_list = cfg.get_double_list("r_list");
  p.zeta2_list = cfg.get_double_list("zeta2_list");
  for (double r : p.r_list) {
    if (!(r > 0)) throw ConfigError("config: r_list entries must be > 0");
  }
  for (double z : p.zeta2_list) {
    if (z < 0) throw ConfigError("config: zeta2_list entries must be >= 0");
  }
  return p;
}

ScalingParams read_scaling(const Config& cfg) {
  ScalingParams p;
  p.intensity.push_back(cfg.get_double("base_intensity_W_per_cm2"));
  p.wavelength_um.push_back(cfg.get_double("base_wavelength_um"));
  p.mass.push_back(cfg.get_double("base_mass_me"));
  const std::vector<double> ci = cfg.get_double_list("cmp_intensity_W_per_cm2");
  const std::vector<double> cw = cfg.get_double_list("cmp_wavelength_um");
  const std::vector<double> cm = cfg.get_double_list("cmp_mass_me");
  if (ci.size() != cw.size() || ci.size() != cm.size()) {
    throw ConfigError("config: cmp_* lists must have equal length");
  }
  p.intensity.insert(p.intensity.end(), ci.begin(), ci.end());
  p.wavelength_um.insert(p.wavelength_um.end(), cw.begin(), cw.end());
  p.mass.insert(p.mass.end(), cm.begin(), cm.end());
  for (size_t i = 0; i < p.intensity.size(); ++i) {
    if (!(p.intensity[i] > 0) || !(p.wavelength_um[i] > 0) || !(p.mass[i] > 0)) {
      throw ConfigError("config: scaling inputs must be positive");
    }
  }
  return p;
}

// ---------------------------------------------------------------------------
// task execution

void run_spectrum_task(const SpectrumParams& P, int threads, TaskIO& io) {
  const PipelinePlan& plan = P.plan;
  const PipelineData data = run_pipeline(plan, threads, io.timings);

  CsvWriter sp({"omega_over_omega0", "dn_hhg", "dn_qshhg_theta", "dn_qshhg_theta_avg"});
  for (int k = 0; k < plan.fg.size(); ++k) {
    sp.row({plan.fg.omega(k) / plan.pulse.omega0_au, data.at_theta.dn_classical[k],
            data.at_theta.dn_sideband[k], data.dn_avg[k]});
  }
  io.files.push_back(write_csv_file(io.dir, "spectrum.csv", sp));

  CsvWriter hb({"N", "n_photons", "re_zeta", "im_zeta", "theta"});
  CsvWriter qb({"N", "n_photons", "re_zeta", "im_zeta", "theta"});
  CsvWriter qa({"N", "n_photons", "n_theta"});
  json jbands = json::array();
  for (int N = 1; N <= plan.band_max; ++N) {
    const BandReport& br = data.at_theta.bands[static_cast<size_t>(N - 1)];
    const double avg = data.scan.average[static_cast<size_t>(N - 1)];
    hb.row({static_cast<double>(N), br.n_classical, 0.0, 0.0, plan.bsv.theta});
    qb.row({static_cast<double>(N), br.n_sideband, br.zeta.real(), br.zeta.imag(),
            plan.bsv.theta});
    qa.row({static_cast<double>(N), avg, static_cast<double>(plan.n_theta)});
    jbands.push_back(json{{"N", N},
                          {"n_hhg", br.n_classical},
                          {"n_qshhg_theta", br.n_sideband},
                          {"n_qshhg_theta_avg", avg},
                          {"zeta2", br.zeta2},
                          {"re_zeta", br.zeta.real()},
                          {"im_zeta", br.zeta.imag()}});
  }
  io.files.push_back(write_csv_file(io.dir, "hhg_bands.csv", hb));
  io.files.push_back(write_csv_file(io.dir, "qshhg_bands.csv", qb));
  io.files.push_back(write_csv_file(io.dir, "qshhg_bands_avg.csv", qa));

  json rep;
  rep["medium"] = plan.medium.name;
  rep["omega0_au"] = plan.pulse.omega0_au;
  rep["peak_field_au"] = plan.pulse.F0_au;
  rep["ponderomotive_energy_au"] =
      ponderomotive_energy(plan.pulse.F0_au, plan.pulse.omega0_au, plan.medium.mass_au);
  rep["cutoff_order"] =
      cutoff_energy(plan.medium, plan.pulse.F0_au, plan.pulse.omega0_au) /
      plan.pulse.omega0_au;
  rep["squeezing_r"] = plan.bsv.r;
  rep["sideband_mean_photons"] = std::sinh(plan.bsv.r) * std::sinh(plan.bsv.r);
  rep["theta"] = plan.bsv.theta;
  rep["response_constant_s_per_m3"] = plan.geom.response_constant();
  rep["mode_volume_density_per_m3"] = plan.bsv.mode_volume_density();
  rep["bands"] = jbands;
  io.files.push_back(write_text_file(io.dir, "report.json", rep.dump(2) + "\n"));
  io.files.push_back(write_text_file(io.dir, "plot.py", plot_spectrum()));
  io.extra["grids"] = grid_summary(plan);
}

void run_bands_theta_task(const SpectrumParams& P, int threads, TaskIO& io) {
  const PipelinePlan& plan = P.plan;
  const PipelineData data = run_pipeline(plan, threads, io.timings);

  CsvWriter bt({"theta_rad", "N", "n_photons"});
  for (size_t i = 0; i < data.scan.thetas.size(); ++i) {
    for (int N = 1; N <= plan.band_max; ++N) {
      bt.row({data.scan.thetas[i], static_cast<double>(N),
              data.scan.n_sideband[i][static_cast<size_t>(N - 1)]});
    }
  }
  io.files.push_back(write_csv_file(io.dir, "bands_theta.csv", bt));

  CsvWriter ba({"N", "n_photons"});
  for (int N = 1; N <= plan.band_max; ++N) {
    ba.row({static_cast<double>(N), data.scan.average[static_cast<size_t>(N - 1)]});
  }
  io.files.push_back(write_csv_file(io.dir, "bands_theta_avg.csv", ba));
  io.files.push_back(write_text_file(io.dir, "plot.py", plot_bands_theta()));
  io.extra["grids"] = grid_summary(plan);
}

void run_joint_task(const JointParams& P, int threads, TaskIO& io) {
  const SidebandCoupling sc = resolve_coupling(P.cs, threads, io);
  Stopwatch sw;
  const std::vector<double> dist = joint_distribution(sc, P.m_max, P.n_max);
  CsvWriter jw({"m", "n", "p"});
  for (long long m = 0; m <= P.m_max; ++m) {
    for (long long n = 0; n <= P.n_max; ++n) {
      jw.row({static_cast<double>(m), static_cast<double>(n),
              dist[static_cast<size_t>(m * (P.n_max + 1) + n)]});
    }
  }
  io.timings["fockspace_ms"] = sw.lap_ms();
  io.files.push_back(write_csv_file(io.dir, "joint.csv", jw));
  io.files.push_back(write_text_file(io.dir, "plot.py", plot_joint()));
  io.extra["zeta2"] = sc.zeta2();
  io.extra["mean_band_photons"] = sc.mean_photons();
}

void run_marginals_task(const MarginalsParams& P, int threads, TaskIO& io) {
  std::vector<SidebandCoupling> series;
  if (P.multi) {
    for (double z2 : P.zeta2_list) {
      SidebandCoupling sc;
      sc.r = P.r;
      sc.theta = P.theta;
      sc.zeta = std::sqrt(z2);
      series.push_back(sc);
    }
  } else {
    series.push_back(resolve_coupling(P.cs, threads, io));
  }
  Stopwatch sw;
  CsvWriter mw({"series", "zeta2", "m", "ln_p_exact", "ln_p_analytic"});
  for (size_t s = 0; s < series.size(); ++s) {
    const std::vector<double> lnp = marginal_exact_log(series[s], P.m_max);
    for (long long m = 0; m <= P.m_max; ++m) {
      mw.row({static_cast<double>(s), series[s].zeta2(), static_cast<double>(m),
              lnp[static_cast<size_t>(m)], marginal_analytic_log(series[s], m)});
    }
  }
  io.timings["fockspace_ms"] = sw.lap_ms();
  io.files.push_back(write_csv_file(io.dir, "marginal.csv", mw));
  io.files.push_back(write_text_file(io.dir, "plot.py", plot_marginals()));
}

void run_marginal_compare_task(const MarginalCompareParams& P, int threads, TaskIO& io) {
  const SidebandCoupling sc = resolve_coupling(P.cs, threads, io);
  Stopwatch sw;
  const std::vector<double> lnp = marginal_exact_log(sc, P.m_max);
  CsvWriter mw({"m", "p_exact", "p_analytic", "rel_dev"});
  double sum_exact = 0.0, sum_analytic = 0.0, max_dev = 0.0;
  long long max_dev_m = -1;
  for (long long m = 0; m <= P.m_max; ++m) {
    const double pe = std::exp(lnp[static_cast<size_t>(m)]);
    const double pa = marginal_analytic(sc, m);
    sum_exact += pe;
    sum_analytic += pa;
    const double dev = (pa > 0) ? std::abs(pe - pa) / pa : 0.0;
    if (pe > P.floor && dev > max_dev) {
      max_dev = dev;
      max_dev_m = m;
    }
    mw.row({static_cast<double>(m), pe, pa, dev});
  }
  io.timings["fockspace_ms"] = sw.lap_ms();
  io.files.push_back(write_csv_file(io.dir, "marginal_compare.csv", mw));

  json rep;
  rep["zeta2"] = sc.zeta2();
  rep["r"] = sc.r;
  rep["m_max"] = P.m_max;
  rep["sum_exact_partial"] = sum_exact;
  rep["sum_analytic_partial"] = sum_analytic;
  rep["sum_analytic_closed_form"] = marginal_analytic_sum(sc);
  rep["probability_floor"] = P.floor;
  rep["max_rel_dev_above_floor"] = max_dev;
  rep["max_rel_dev_at_m"] = max_dev_m;
  io.files.push_back(write_text_file(io.dir, "report.json", rep.dump(2) + "\n"));
  io.files.push_back(write_text_file(io.dir, "plot.py", plot_marginal_compare()));
}

void run_projq_scan_task(const ProjqScanParams& P, int threads, TaskIO& io) {
  const SidebandCoupling sc = resolve_coupling(P.cs, threads, io);
  Stopwatch sw;
  CsvWriter w({"l", "parity", "abs_alpha", "g2", "var_x1", "var_x2"});
  for (long long l : P.l_list) {
    const ProjqStatistics st = projq_statistics_analytic(sc, l);
    double aa = 0.0;
    if (sc.r > 0 && l - (l & 1) > 0) aa = std::abs(projq_alpha(sc, l));
    w.raw_row({std::to_string(l), std::to_string(static_cast<int>(l & 1)),
               format_double(aa), stat_cell(st.g2), format_double(st.var_x1),
               format_double(st.var_x2)});
  }
  io.timings["observables_ms"] = sw.lap_ms();
  io.files.push_back(write_csv_file(io.dir, "projq_analytic.csv", w));
  io.files.push_back(write_text_file(io.dir, "plot.py", plot_projq_scan()));
}

void run_projq_compare_task(const ProjqCompareParams& P, int threads, TaskIO& io) {
  const SidebandCoupling sc = resolve_coupling(P.cs, threads, io);
  Stopwatch sw;
  CsvWriter w({"l", "abs_alpha", "g2_num", "g2_ana", "var_x1_num", "var_x1_ana",
               "var_x2_num", "var_x2_ana"});
  for (long long l : P.l_list) {
    const FockState st = project_on_q(sc, l, P.popt);
    const PhotonStatistics num = photon_statistics(st);
    const ProjqStatistics ana = projq_statistics_analytic(sc, l);
    double aa = 0.0;
    if (sc.r > 0 && l - (l & 1) > 0) aa = std::abs(projq_alpha(sc, l));
    w.raw_row({std::to_string(l), format_double(aa), stat_cell(num.g2),
               stat_cell(ana.g2), format_double(num.var_x1), format_double(ana.var_x1),
               format_double(num.var_x2), format_double(ana.var_x2)});
  }
  io.timings["fockspace_ms"] = sw.lap_ms();
  io.files.push_back(write_csv_file(io.dir, "projq_compare.csv", w));
  io.files.push_back(
      write_text_file(io.dir, "plot.py", plot_compare_generic("projq_compare.csv", "l")));
}

void run_projn_scan_task(const ProjnScanParams& P, int threads, TaskIO& io) {
  SidebandCoupling sc = resolve_coupling(P.cs, threads, io);
  Stopwatch sw;
  if (P.theta_average) {
    CsvWriter w({"m", "g2", "var_x1", "var_x2"});
    for (long long m = P.m_min; m <= P.m_max; ++m) {
      double v1 = 0.0, v2 = 0.0, g2 = 0.0;
      for (int i = 0; i < P.n_theta; ++i) {
        SidebandCoupling s = sc;
        s.theta = 2.0 * units::pi * i / P.n_theta;
        const ProjNStatistics st = projn_statistics_analytic(s, m);
        v1 += st.var_x1 / P.n_theta;
        v2 += st.var_x2 / P.n_theta;
        g2 = st.g2;  // theta-independent
      }
      w.row({static_cast<double>(m), g2, v1, v2});
    }
    io.files.push_back(write_csv_file(io.dir, "projn_analytic_avg.csv", w));
    io.files.push_back(write_text_file(io.dir, "plot.py", plot_projn_scan(true)));
  } else {
    CsvWriter w({"theta", "m", "g2", "var_x1", "var_x2"});
    for (double th : P.theta_list) {
      SidebandCoupling s = sc;
      s.theta = th;
      for (long long m = P.m_min; m <= P.m_max; ++m) {
        const ProjNStatistics st = projn_statistics_analytic(s, m);
        w.row({th, static_cast<double>(m), st.g2, st.var_x1, st.var_x2});
      }
    }
    io.files.push_back(write_csv_file(io.dir, "projn_analytic.csv", w));
    io.files.push_back(write_text_file(io.dir, "plot.py", plot_projn_scan(false)));
  }
  io.timings["observables_ms"] = sw.lap_ms();
}

void run_projn_compare_task(const ProjnCompareParams& P, int threads, TaskIO& io) {
  const SidebandCoupling sc = resolve_coupling(P.cs, threads, io);
  Stopwatch sw;
  CsvWriter w({"m", "g2_num", "g2_ana", "var_x1_num", "var_x1_ana", "var_x2_num",
               "var_x2_ana", "var_x1_theta0_form", "var_x2_theta0_form"});
  for (long long m : P.m_list) {
    const PhotonStatistics num = project_on_N_stats(sc, m, P.popt);
    const ProjNStatistics ana = projn_statistics_analytic(sc, m);
    w.raw_row({std::to_string(m), stat_cell(num.g2), format_double(ana.g2),
               format_double(num.var_x1), format_double(ana.var_x1),
               format_double(num.var_x2), format_double(ana.var_x2),
               format_double(projn_var_theta0(sc, m, 1)),
               format_double(projn_var_theta0(sc, m, 2))});
  }
  io.timings["fockspace_ms"] = sw.lap_ms();
  io.files.push_back(write_csv_file(io.dir, "projn_compare.csv", w));
  io.files.push_back(
      write_text_file(io.dir, "plot.py", plot_compare_generic("projn_compare.csv", "m")));
}

void write_wigner_field(const std::string& dir, const std::string& name,
                        const std::vector<double>& field, const PhaseSpaceGrid& g,
                        TaskIO& io, json& rep_entries) {
  CsvWriter w({"x", "p", "w"});
  for (int j = 0; j < g.np; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      w.row({g.x(i), g.p(j), field[static_cast<size_t>(j) * g.nx + i]});
    }
  }
  io.files.push_back(write_csv_file(dir, name, w));
  double wmin = field[0];
  for (double v : field) wmin = std::min(wmin, v);
  const double norm = wigner_norm(field, g);
  json entry{{"file", name}, {"w_min", wmin}, {"norm", norm}};
  if (std::abs(norm - 1.0) > 0.01) entry["norm_warning"] = true;
  rep_entries.push_back(entry);
}

void run_wigner_task(const WignerParams& P, int threads, TaskIO& io) {
  const SidebandCoupling sc = resolve_coupling(P.cs, threads, io);
  Stopwatch sw;
  json rep;
  json entries = json::array();
  std::vector<std::string> names;

  if (P.from_band_outcome) {
    for (long long m : P.m_list) {
      const FockState st = project_on_N(sc, m, P.popt);
      const double est = static_cast<double>(P.nx) * P.nx * st.size() *
                         static_cast<double>(st.size()) * 12.0;
      if (est > 4e11 && !P.popt.allow_expensive) {
        throw RefusalError("wigner map cost estimate too large (state dimension " +
                           std::to_string(st.size()) +
                           "); enable allow_expensive to force");
      }
      const PhaseSpaceGrid g = adaptive_grid(st, P.nx, P.pad);
      const std::vector<double> field = wigner_field(st, g);
      std::string name = "wigner";
      if (P.m_list.size() > 1) name += "_m" + std::to_string(m);
      name += ".csv";
      names.push_back(name);
      write_wigner_field(io.dir, name, field, g, io, entries);
      entries.back()["w_origin"] = wigner_point(st, 0.0, 0.0);
      entries.back()["m"] = m;
      entries.back()["state_dimension"] = st.size();
    }
  } else {
    const FockState base = project_on_q(sc, P.l, P.popt);
    const PhaseSpaceGrid g = adaptive_grid(base, P.nx, P.pad);
    for (size_t e = 0; e < P.delta_l_list.size(); ++e) {
      const long long dl = P.delta_l_list[e];
      const bool even_only = (P.parity_list[e] == "even");
      std::vector<FockState> members;
      for (long long d = 0; d <= dl; ++d) {
        if (even_only && (d & 1)) continue;
        members.push_back(project_on_q(sc, P.l + d, P.popt));
      }
      const DensityMatrix dm = DensityMatrix::mixture(members);
      const double est = static_cast<double>(P.nx) * P.nx * dm.dim *
                         static_cast<double>(dm.dim) * 12.0;
      if (est > 4e11 && !P.popt.allow_expensive) {
        throw RefusalError("wigner map cost estimate too large (dimension " +
                           std::to_string(dm.dim) +
                           "); enable allow_expensive to force");
      }
      const std::vector<double> field = wigner_field(dm, g);
      std::string name = "wigner";
      if (!(P.delta_l_list.size() == 1 && dl == 0)) {
        name += "_dl" + std::to_string(dl) + (even_only ? "_even" : "_all");
      }
      name += ".csv";
      names.push_back(name);
      write_wigner_field(io.dir, name, field, g, io, entries);
      entries.back()["w_origin"] = wigner_point(dm, 0.0, 0.0);
      entries.back()["outcomes_averaged"] = members.size();
    }
  }
  io.timings["wigner_ms"] = sw.lap_ms();
  rep["fields"] = entries;
  rep["zeta2"] = sc.zeta2();
  io.files.push_back(write_text_file(io.dir, "report.json", rep.dump(2) + "\n"));
  io.files.push_back(write_text_file(io.dir, "plot.py", plot_wigner(names)));
}

void run_washout_task(const WashoutParams& P, int threads, TaskIO& io) {
  const SidebandCoupling sc = resolve_coupling(P.cs, threads, io);
  Stopwatch sw;
  WashoutOptions all = P.wopt;
  all.even_only = false;
  WashoutOptions even = P.wopt;
  even.even_only = true;
  const WashoutCurve ca = washout_curve(sc, P.l, P.delta_l_max, all, P.popt);
  const WashoutCurve ce = washout_curve(sc, P.l, P.delta_l_max, even, P.popt);
  io.timings["wigner_ms"] = sw.lap_ms();

  CsvWriter w({"delta_l", "modulation_all", "ratio_all", "modulation_even", "ratio_even"});
  for (size_t i = 0; i < ca.delta_l.size(); ++i) {
    w.row({static_cast<double>(ca.delta_l[i]), ca.modulation[i], ca.ratio[i],
           ce.modulation[i], ce.ratio[i]});
  }
  io.files.push_back(write_csv_file(io.dir, "washout.csv", w));

  json rep;
  rep["l"] = P.l;
  rep["zeta2"] = sc.zeta2();
  std::complex<double> alpha{0.0, 0.0};
  if (P.l >= 2 && sc.r > 0) alpha = projq_alpha(sc, P.l);
  rep["abs_alpha"] = std::abs(alpha);
  rep["fringe_axis"] = (alpha.real() >= 0.0) ? "x" : "p";
  io.files.push_back(write_text_file(io.dir, "report.json", rep.dump(2) + "\n"));
  io.files.push_back(write_text_file(io.dir, "plot.py", plot_washout()));
}

void run_squeezing_scan_task(const SqueezeScanParams& P, TaskIO& io) {
  Stopwatch sw;
  CsvWriter w({"r", "zeta2", "g2", "var_x1", "var_x2"});
  for (double r : P.r_list) {
    for (double z2 : P.zeta2_list) {
      SidebandCoupling sc;
      sc.r = r;
      sc.theta = P.theta;
      sc.zeta = std::sqrt(z2);
      const ProjNStatistics st = projn_statistics_analytic(sc, P.m);
      w.row({r, z2, st.g2, st.var_x1, st.var_x2});
    }
  }
  io.timings["observables_ms"] = sw.lap_ms();
  io.files.push_back(write_csv_file(io.dir, "squeezing_scan.csv", w));
  io.files.push_back(write_text_file(io.dir, "plot.py", plot_squeezing_scan()));
}

void run_scaling_task(const ScalingParams& P, TaskIO& io) {
  CsvWriter w({"index", "intensity_W_per_cm2", "wavelength_um", "mass_me", "scale",
               "ratio_to_base"});
  std::vector<double> scale(P.intensity.size());
  for (size_t i = 0; i < P.intensity.size(); ++i) {
    const double w0 = units::omega_au_from_wavelength_m(P.wavelength_um[i] * 1e-6);
    scale[i] = susceptibility_scaling(P.intensity[i], w0, P.mass[i]);
  }
  for (size_t i = 0; i < scale.size(); ++i) {
    w.row({static_cast<double>(i), P.intensity[i], P.wavelength_um[i], P.mass[i],
           scale[i], scale[i] / scale[0]});
  }
  io.files.push_back(write_csv_file(io.dir, "scaling.csv", w));
  io.files.push_back(write_text_file(io.dir, "plot.py", plot_scaling()));
}

// ---------------------------------------------------------------------------
// manifest

void write_manifest(const Config& cfg, const std::string& task, int threads,
                    TaskIO& io, RunResult& result) {
  json m;
  m["schema_version"] = kManifestSchemaVersion;
  m["library"] = json{{"name", kLibraryName}, {"version", kLibraryVersion}};
  m["task"] = task;
  json entries = json::object();
  for (const auto& [k, v] : cfg.entries()) entries[k] = v;
  m["config"] =
      json{{"origin", cfg.origin()}, {"fnv1a64", hex64(cfg.hash())}, {"entries", entries}};
  m["kernels"] = simd::active_name();
  m["threads"] = threads;
  json outs = json::array();
  for (const OutFile& f : io.files) {
    outs.push_back(json{{"file", f.name},
                        {"bytes", f.bytes},
                        {"fnv1a64", hex64(f.fnv)}});
  }
  m["outputs"] = outs;
  for (auto it = io.extra.begin(); it != io.extra.end(); ++it) m[it.key()] = it.value();
  m["timings_ms"] = io.timings;

  const OutFile mf = write_text_file(io.dir, "manifest.json", m.dump(2) + "\n");
  result.manifest_path = (fs::path(io.dir) / mf.name).string();
  for (const OutFile& f : io.files) {
    result.output_files.push_back((fs::path(io.dir) / f.name).string());
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// public entry points

int resolve_threads(int requested) {
  if (requested > 0) return std::min(requested, 256);
  if (const char* env = std::getenv("SQHARM_THREADS")) {
    if (*env) {
      char* end = nullptr;
      const long v = std::strtol(env, &end, 10);
      if (end && *end == '\0' && v > 0) {
        return static_cast<int>(std::min<long>(v, 256));
      }
      throw ConfigError("SQHARM_THREADS must be a positive integer");
    }
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(std::min(hc, 256u)) : 1;
}

RunResult run_scenario(const Config& cfg, const RunOptions& opt) {
  fs::create_directories(opt.out_dir);
  const std::string task = cfg.get_string("task");
  cfg.get_string("label", "");  // optional free-form tag; recorded via entries
  const int threads = resolve_threads(opt.threads);

  TaskIO io;
  io.dir = opt.out_dir;
  RunResult result;

  if (task == "spectrum") {
    const SpectrumParams P = read_spectrum(cfg);
    cfg.check_all_consumed();
    run_spectrum_task(P, threads, io);
  } else if (task == "bands_theta") {
    const SpectrumParams P = read_spectrum(cfg);
    cfg.check_all_consumed();
    run_bands_theta_task(P, threads, io);
  } else if (task == "joint") {
    const JointParams P = read_joint(cfg);
    cfg.check_all_consumed();
    run_joint_task(P, threads, io);
  } else if (task == "marginals") {
    const MarginalsParams P = read_marginals(cfg);
    cfg.check_all_consumed();
    run_marginals_task(P, threads, io);
  } else if (task == "marginal_compare") {
    const MarginalCompareParams P = read_marginal_compare(cfg);
    cfg.check_all_consumed();
    run_marginal_compare_task(P, threads, io);
  } else if (task == "projq_scan_analytic") {
    const ProjqScanParams P = read_projq_scan(cfg);
    cfg.check_all_consumed();
    run_projq_scan_task(P, threads, io);
  } else if (task == "projq_compare") {
    const ProjqCompareParams P = read_projq_compare(cfg, opt);
    cfg.check_all_consumed();
    run_projq_compare_task(P, threads, io);
  } else if (task == "projn_scan_analytic") {
    const ProjnScanParams P = read_projn_scan(cfg);
    cfg.check_all_consumed();
    run_projn_scan_task(P, threads, io);
  } else if (task == "projn_compare") {
    const ProjnCompareParams P = read_projn_compare(cfg, opt);
    cfg.check_all_consumed();
    run_projn_compare_task(P, threads, io);
  } else if (task == "wigner") {
    const WignerParams P = read_wigner(cfg, opt);
    cfg.check_all_consumed();
    run_wigner_task(P, threads, io);
  } else if (task == "washout") {
    const WashoutParams P = read_washout(cfg, opt);
    cfg.check_all_consumed();
    run_washout_task(P, threads, io);
  } else if (task == "squeezing_scan") {
    const SqueezeScanParams P = read_squeezing_scan(cfg);
    cfg.check_all_consumed();
    run_squeezing_scan_task(P, io);
  } else if (task == "scaling") {
    const ScalingParams P = read_scaling(cfg);
    cfg.check_all_consumed();
    run_scaling_task(P, io);
  } else {
    throw ConfigError(
        "config: unknown task '" + task +
        "' (valid: spectrum, bands_theta, joint, marginals, marginal_compare, "
        "projq_scan_analytic, projq_compare, projn_scan_analytic, projn_compare, "
        "wigner, washout, squeezing_scan, scaling)");
  }

  write_manifest(cfg, task, threads, io, result);
  return result;
}

void validate_config(const Config& cfg) {
  const std::string task = cfg.get_string("task");
  cfg.get_string("label", "");
  RunOptions opt;  // flag-independent validation
  opt.allow_expensive = true;
  if (task == "spectrum" || task == "bands_theta") {
    read_spectrum(cfg);
  } else if (task == "joint") {
    read_joint(cfg);
  } else if (task == "marginals") {
    read_marginals(cfg);
  } else if (task == "marginal_compare") {
    read_marginal_compare(cfg);
  } else if (task == "projq_scan_analytic") {
    read_projq_scan(cfg);
  } else if (task == "projq_compare") {
    read_projq_compare(cfg, opt);
  } else if (task == "projn_scan_analytic") {
    read_projn_scan(cfg);
  } else if (task == "projn_compare") {
    read_projn_compare(cfg, opt);
  } else if (task == "wigner") {
    read_wigner(cfg, opt);
  } else if (task == "washout") {
    read_washout(cfg, opt);
  } else if (task == "squeezing_scan") {
    read_squeezing_scan(cfg);
  } else if (task == "scaling") {
    read_scaling(cfg);
  } else {
    throw ConfigError("config: unknown task '" + task + "'");
  }
  cfg.check_all_consumed();
}

std::vector<std::string> figure_ids() {
  return {"fig1a", "fig1b", "fig1c", "fig1d", "fig2",  "fig3",  "fig4a",
          "fig4b", "fig4c", "fig4d", "fig5a", "fig5b", "fig5c", "fig5d",
          "s1",    "s2",    "s3",    "s4",    "s5"};
}

std::string figure_config_path(const std::string& id) {
  const std::vector<std::string> ids = figure_ids();
  if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
    std::string all;
    for (const std::string& s : ids) {
      if (!all.empty()) all += ", ";
      all += s;
    }
    throw ConfigError("unknown figure id '" + id + "' (valid: " + all + ")");
  }
  const char* env = std::getenv("SQHARM_CONFIG_DIR");
  const std::string dir = (env && *env) ? env : SQH_CONFIG_DIR;
  return dir + "/" + id + ".cfg";
}

RunResult reproduce_figure(const std::string& id, const RunOptions& opt) {
  return run_scenario(Config::parse_file(figure_config_path(id)), opt);
}

double convergence_check(const Config& cfg, const RunOptions& opt) {
  const std::string task = cfg.get_string("task");
  if (task != "spectrum" && task != "bands_theta") {
    throw ConfigError("convergence check needs a spectrum/bands_theta config");
  }
  cfg.get_string("label", "");
  const double tol = cfg.get_double("convergence_tolerance", 0.10);
  if (!(tol > 0)) throw ConfigError("config: convergence_tolerance must be > 0");
  const int threads = resolve_threads(opt.threads);

  const PipelinePlan base = read_pipeline(cfg);
  const PipelinePlan fine = read_pipeline(cfg, 2, 2);
  cfg.check_all_consumed();

  json t0, t1;
  const PipelineData d0 = run_pipeline(base, threads, t0);
  const PipelineData d1 = run_pipeline(fine, threads, t1);

  auto band_dev = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double peak = 0.0;
    for (int N = 1; N <= base.band_max; ++N) {
      peak = std::max(peak, std::abs(b[static_cast<size_t>(N - 1)]));
    }
    double dev = 0.0;
    for (int N = 1; N <= base.band_max; ++N) {
      const double va = a[static_cast<size_t>(N - 1)];
      const double vb = b[static_cast<size_t>(N - 1)];
      if (std::max(std::abs(va), std::abs(vb)) < 1e-12 * peak) continue;
      dev = std::max(dev, std::abs(va - vb) / std::max(std::abs(vb), 1e-300));
    }
    return dev;
  };

  std::vector<double> c0(base.band_max), c1(base.band_max);
  for (int N = 1; N <= base.band_max; ++N) {
    c0[static_cast<size_t>(N - 1)] = d0.at_theta.bands[static_cast<size_t>(N - 1)].n_classical;
    c1[static_cast<size_t>(N - 1)] = d1.at_theta.bands[static_cast<size_t>(N - 1)].n_classical;
  }
  const double dev =
      std::max(band_dev(c0, c1), band_dev(d0.scan.average, d1.scan.average));
  if (dev > tol) {
    throw ValidationError("convergence check failed: max relative band change " +
                          std::to_string(dev) + " exceeds tolerance " +
                          std::to_string(tol));
  }
  return dev;
}

}  // namespace sqh
