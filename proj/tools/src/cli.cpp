#include "cli.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "bosonsim/errors.hpp"
#include "bosonsim/frame_io.hpp"
#include "bosonsim/observables.hpp"
#include "bosonsim/oracles.hpp"
#include "bosonsim/sampler.hpp"
#include "bosonsim/text_format.hpp"
#include "json.hpp"

namespace bosonsim::cli {
namespace {

using json = nlohmann::ordered_json;
using std::numbers::pi;

struct RunConfig {
  std::string command;
  std::string state;
  std::string basis = "vortex:1";
  std::string n = "2";
  std::uint64_t frames = 1000;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  std::string observable = "distance";
  std::string estimator = "qmeasure";
  unsigned q = 0;
  int q_order = -1;
  std::size_t bins = 200;
  double proj_radius = 1.0;
  std::string out;
  std::string frames_in;
  std::string family;
  double c = 0.0;
  std::string tag;
  bool geometry_average = false;
  std::optional<double> oracle_c;
  std::string oracle_tag;
  double threshold = 0.005;
  McmcConfig mcmc;
};

// Everything needed to run, after validation.
struct Resolved {
  std::optional<StateSpec> state;
  ModeBasis basis = VortexPair{1};
  Multiplicity multiplicity = 2u;
  EstimatorKind kind = EstimatorKind::QMeasure;
  unsigned q = 2;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json config_json(const RunConfig& c, unsigned workers) {
  json j;
  j["command"] = c.command;
  j["state"] = c.state;
  j["basis"] = c.basis;
  j["n"] = c.n;
  j["frames"] = c.frames;
  j["seed"] = c.seed;
  j["workers"] = workers;
  j["observable"] = c.observable;
  j["estimator"] = c.estimator;
  j["q"] = c.q;
  j["q_order"] = c.q_order;
  j["bins"] = c.bins;
  j["proj_radius"] = c.proj_radius;
  j["out"] = c.out;
  j["frames_in"] = c.frames_in;
  j["family"] = c.family;
  j["c"] = c.c;
  j["tag"] = c.tag;
  j["geometry_average"] = c.geometry_average;
  j["oracle_c"] = c.oracle_c ? json(*c.oracle_c) : json(nullptr);
  j["oracle_tag"] = c.oracle_tag;
  j["threshold"] = c.threshold;
  j["mcmc_burn_in"] = c.mcmc.burn_in;
  j["mcmc_thinning"] = c.mcmc.thinning;
  j["mcmc_step"] = c.mcmc.step;
  j["mcmc_block"] = c.mcmc.block;
  return j;
}

void write_manifest(const RunConfig& c, unsigned workers, const std::vector<std::string>& artifacts,
                    const json& results) {
  json m;
  m["config"] = config_json(c, workers);
  json a = json::array();
  for (const auto& path : artifacts) a.push_back({{"path", path}, {"sha256", sha256_file(path)}});
  m["artifacts"] = a;
  m["results"] = results;
  std::ofstream f(c.out + ".manifest.json", std::ios::binary);
  f << m.dump(2) << "\n";
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  return f;
}

Resolved resolve(const RunConfig& c) {
  Resolved r;
  const bool needs_state = c.command != "oracle" || c.family == "quadrature";
  if (needs_state) {
    if (c.state.empty()) throw bosonsim::ParseError("--state is required for " + c.command);
    r.state = parse_state(c.state);
  }
  r.basis = parse_basis(c.basis);
  if (c.n == "poisson") {
    r.multiplicity = PoissonFromGeometry{};
  } else {
    unsigned n = 0;
    try {
      std::size_t used = 0;
      n = static_cast<unsigned>(std::stoul(c.n, &used));
      if (used != c.n.size()) throw std::invalid_argument("n");
    } catch (const std::exception&) {
      throw bosonsim::ParseError("--n expects a count or 'poisson'");
    }
    if (n == 0) throw ValidationError("--n must be positive");
    r.multiplicity = n;
  }
  if (c.estimator == "reweight")
    r.kind = EstimatorKind::Reweight;
  else if (c.estimator == "tuples")
    r.kind = EstimatorKind::TupleAverage;
  else if (c.estimator == "qmeasure")
    r.kind = EstimatorKind::QMeasure;
  else
    throw bosonsim::ParseError("unknown estimator '" + c.estimator + "'");

  if (c.observable == "distance") {
    r.q = 2;
  } else if (c.observable == "perimeter") {
    if (c.q != 0)
      r.q = c.q;
    else if (const auto* n = std::get_if<unsigned>(&r.multiplicity))
      r.q = *n;
    else
      throw ValidationError("perimeter with Poisson multiplicity needs --q");
    if (r.q < 3) throw ValidationError("perimeter needs q >= 3");
  } else {
    throw bosonsim::ParseError("unknown observable '" + c.observable + "'");
  }
  if (c.frames == 0) throw ValidationError("--frames must be positive");
  if (c.bins == 0) throw ValidationError("--bins must be positive");
  if (!(c.proj_radius > 0.0)) throw ValidationError("--proj-radius must be positive");
  if (c.command != "oracle" && c.command != "compare" && c.out.empty())
    throw bosonsim::ParseError("--out is required for " + c.command);
  if (c.command == "oracle" && c.out.empty()) throw bosonsim::ParseError("--out is required for oracle");
  return r;
}

SamplerConfig sampler_config(const RunConfig& c, const Resolved& r) {
  SamplerConfig cfg{*r.state, r.basis, r.multiplicity, c.frames, c.seed, std::nullopt, c.mcmc};
  if (c.q_order >= 0) cfg.q_weight_order = static_cast<unsigned>(c.q_order);
  return cfg;
}

Estimate run_estimate(const RunConfig& c, const Resolved& r, unsigned workers, bool keep) {
  EstimateOptions opt;
  opt.q = r.q;
  opt.keep_samples = keep;
  opt.histogram = c.observable == "distance"
                      ? Histogram::uniform(0.0, 6.0, c.bins)
                      : Histogram::uniform(0.0, 2.0 * pi * c.proj_radius, c.bins);
  const TupleKernel kernel =
      c.observable == "distance" ? distance_kernel() : perimeter_kernel(c.proj_radius);
  Estimator est(r.kind, kernel, opt);
  if (!c.frames_in.empty()) {
    std::ifstream in(c.frames_in);
    if (!in) throw std::runtime_error("cannot read '" + c.frames_in + "'");
    for (const Frame& f : read_frames_jsonl(in, r.basis)) est.add(f);
  } else {
    for_each_frame(sampler_config(c, r), workers, [&](const Frame& f) { est.add(f); });
  }
  return est.finish();
}

int cmd_sample(const RunConfig& c, const Resolved& r, unsigned workers, std::ostream& out) {
  {
    auto f = open_output(c.out);
    for_each_frame(sampler_config(c, r), workers, [&](const Frame& fr) { write_frame_jsonl(f, fr); });
  }
  write_manifest(c, workers, {c.out}, json::object());
  out << "wrote " << c.frames << " frames to " << c.out << "\n";
  return kOk;
}

int cmd_hist(const RunConfig& c, const Resolved& r, unsigned workers, std::ostream& out) {
  const Estimate e = run_estimate(c, r, workers, false);
  {
    auto f = open_output(c.out);
    e.histogram.write_csv(f);
  }
  json res;
  res["mean"] = e.mean;
  res["standard_error"] = e.standard_error;
  res["frames_used"] = e.frames_used;
  res["tuples"] = e.tuples;
  res["total_weight"] = e.total_weight;
  write_manifest(c, workers, {c.out}, res);
  out << "mean " << format_double(e.mean) << " +- " << format_double(e.standard_error) << "\n";
  return kOk;
}

int cmd_oracle(const RunConfig& c, const Resolved& r, std::ostream& out) {
  std::function<double(double)> density;
  std::optional<ClosedFormDistribution> closed;
  std::optional<TabulatedDistribution> table;
  if (c.family == "vortex1" || c.family == "dipole" || c.family == "vortex2") {
    if (c.c < 0.0 || c.c > 0.5) throw ValidationError("--c must lie in [0, 1/2]");
    closed = c.family == "vortex1"  ? distance_oracle_vortex1(c.c)
             : c.family == "dipole" ? distance_oracle_dipole(c.c)
                                    : distance_oracle_vortex2(c.c);
    density = [&](double d) { return closed->density(d); };
  } else if (c.family == "named") {
    closed = named_distribution(c.tag);
    density = [&](double d) { return closed->density(d); };
  } else if (c.family == "quadrature") {
    const TwoBodyDensity rho2 = c.geometry_average
                                    ? two_body_from_geometry_average(*r.state, r.basis)
                                    : two_body_from_correlators(*r.state, r.basis);
    table = tabulate_distance(rho2);
    density = [&](double d) { return table->density(d); };
  } else {
    throw bosonsim::ParseError("unknown oracle family '" + c.family + "'");
  }
  {
    auto f = open_output(c.out);
    f << "d,density\n";
    const DistanceGrid grid;
    for (std::size_t i = 0; i < grid.points; ++i) {
      const double d = grid.d_max * static_cast<double>(i) / static_cast<double>(grid.points - 1);
      f << format_double(d) << "," << format_double(density(d)) << "\n";
    }
  }
  write_manifest(c, 1, {c.out}, json::object());
  out << "wrote oracle to " << c.out << "\n";
  return kOk;
}

int cmd_compare(const RunConfig& c, const Resolved& r, unsigned workers, std::ostream& out) {
  if (c.observable != "distance") throw ValidationError("compare supports the distance observable");
  std::function<double(double)> cdf;
  std::optional<ClosedFormDistribution> closed;
  std::optional<TabulatedDistribution> table;
  std::string reference;
  if (c.oracle_c) {
    closed = distance_oracle_for(r.basis, *c.oracle_c);
    reference = closed->tag() + "(" + format_double(*c.oracle_c) + ")";
  } else if (!c.oracle_tag.empty()) {
    closed = named_distribution(c.oracle_tag);
    reference = c.oracle_tag;
  } else {
    table = quadrature_distance(*r.state, r.basis);
    reference = "quadrature";
  }
  if (closed)
    cdf = [&](double d) { return closed->cdf(d); };
  else
    cdf = [&](double d) { return table->cdf(d); };

  const Estimate e = run_estimate(c, r, workers, true);
  const double ks = ks_statistic(e.samples, cdf);
  const bool pass = ks < c.threshold;
  json report;
  report["ks"] = ks;
  report["n_samples"] = e.samples.values.size();
  report["threshold"] = c.threshold;
  report["pass"] = pass;
  report["reference"] = reference;
  report["mean"] = e.mean;
  report["standard_error"] = e.standard_error;
  if (!c.out.empty()) {
    {
      auto f = open_output(c.out);
      f << report.dump(2) << "\n";
    }
    write_manifest(c, workers, {c.out}, report);
  }
  out << report.dump() << "\n";
  return pass ? kOk : kCompareFailed;
}

int cmd_frames_grid(const RunConfig& c, const Resolved& r, unsigned workers, std::ostream& out) {
  constexpr std::size_t kGrid = 128;
  constexpr double kHalf = 3.0;
  if (c.frames > 256) throw ValidationError("frames-grid is limited to 256 frames");
  const std::vector<Frame> frames = generate_frames(sampler_config(c, r), workers);
  const std::string points_path = c.out + ".points.jsonl";
  const double h = 2.0 * kHalf / static_cast<double>(kGrid - 1);
  {
    auto f = open_output(c.out);
    auto p = open_output(points_path);
    f << "frame_id,x,y,density\n";
    for (const Frame& fr : frames) {
      write_frame_jsonl(p, fr);
      std::vector<double> values(kGrid * kGrid, 0.0);
      std::optional<AngularDensity> joint;
      std::vector<Point> tuple;
      if (!fr.geometry) {
        // correlated frame: density of the last particle given all the others
        joint.emplace(*r.state, r.basis, static_cast<unsigned>(fr.points.size()));
        tuple.assign(fr.points.begin(), fr.points.end());
      }
      double mass = 0.0;
      for (std::size_t iy = 0; iy < kGrid; ++iy)
        for (std::size_t ix = 0; ix < kGrid; ++ix) {
          const Point x{-kHalf + h * static_cast<double>(ix), -kHalf + h * static_cast<double>(iy)};
          double v = 0.0;
          if (fr.geometry) {
            v = one_body_density(*fr.geometry, x);
          } else {
            tuple.back() = x;
            v = joint->rho(tuple);
          }
          values[iy * kGrid + ix] = v;
          mass += v * h * h;
        }
      if (!fr.geometry && mass > 0.0)
        for (double& v : values) v /= mass;
      for (std::size_t iy = 0; iy < kGrid; ++iy)
        for (std::size_t ix = 0; ix < kGrid; ++ix)
          f << fr.frame_id << "," << format_double(-kHalf + h * static_cast<double>(ix)) << ","
            << format_double(-kHalf + h * static_cast<double>(iy)) << ","
            << format_double(values[iy * kGrid + ix]) << "\n";
    }
  }
  write_manifest(c, workers, {c.out, points_path}, json::object());
  out << "wrote " << frames.size() << " grids to " << c.out << "\n";
  return kOk;
}

}  // namespace

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Monte-Carlo frames and reference laws for two-mode bosonic spatial correlations",
               "bosonsim"};
  app.set_config("--config", "", "Flat 'key = value' file supplying defaults");
  // state tokens contain commas and semicolons; keep every config value as one string
  app.get_config_formatter_base()->arrayDelimiter('\x1f');
  app.require_subcommand(1);
  app.fallthrough();

  auto* sample = app.add_subcommand("sample", "Write frames as JSON lines");
  auto* hist = app.add_subcommand("hist", "Histogram a q-body observable");
  auto* oracle = app.add_subcommand("oracle", "Write a reference distance density");
  auto* compare = app.add_subcommand("compare", "KS test of sampled distances against a reference");
  auto* grid = app.add_subcommand("frames-grid", "Per-frame density grids with their points");
  for (auto* sub : {sample, hist, oracle, compare, grid}) sub->fallthrough();

  app.add_option("--state", c.state, "State token, e.g. thermal:1,1 or fock:1,1");
  app.add_option("--basis", c.basis, "vortex:L, dipole or mixedlg")->capture_default_str();
  app.add_option("--n", c.n, "Particles per frame, or 'poisson'")->capture_default_str();
  app.add_option("--frames", c.frames, "Number of frames")->capture_default_str();
  app.add_option("--seed", c.seed, "Base seed (BOSONSIM_SEED overrides config files)")
      ->capture_default_str();
  app.add_option("--workers", c.workers, "Worker threads, 0 = logical cores")->capture_default_str();
  app.add_option("--observable", c.observable, "distance or perimeter")->capture_default_str();
  app.add_option("--estimator", c.estimator, "reweight, tuples or qmeasure")->capture_default_str();
  app.add_option("--q", c.q, "Perimeter order (default: n)");
  app.add_option("--q-order", c.q_order, "Draw geometries from the q-body measure of this order");
  app.add_option("--bins", c.bins, "Histogram bins")->capture_default_str();
  app.add_option("--proj-radius", c.proj_radius, "Projection circle radius")->capture_default_str();
  app.add_option("--out", c.out, "Output path");
  app.add_option("--frames-in", c.frames_in, "Read frames from a JSON-lines file instead of sampling");
  app.add_option("--family", c.family, "vortex1, dipole, vortex2, named or quadrature");
  app.add_option("--c", c.c, "Two-body correlation parameter");
  app.add_option("--tag", c.tag, "Named reference curve");
  app.add_flag("--geometry-average", c.geometry_average,
               "Quadrature oracle from the two-body geometry average");
  app.add_option("--oracle-c", c.oracle_c, "Compare against the closed form of this parameter");
  app.add_option("--oracle-tag", c.oracle_tag, "Compare against a named curve");
  app.add_option("--threshold", c.threshold, "KS pass threshold")->capture_default_str();
  app.add_option("--mcmc-burn-in", c.mcmc.burn_in)->capture_default_str();
  app.add_option("--mcmc-thin", c.mcmc.thinning)->capture_default_str();
  app.add_option("--mcmc-step", c.mcmc.step)->capture_default_str();
  app.add_option("--mcmc-block", c.mcmc.block)->capture_default_str();

  std::vector<std::string> args(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
  bool seed_on_command_line = false;
  for (const auto& a : args)
    if (a == "--seed" || a.rfind("--seed=", 0) == 0) seed_on_command_line = true;
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  }
  c.command = app.get_subcommands().front()->get_name();

  if (const char* env = std::getenv("BOSONSIM_SEED"); env && !seed_on_command_line) {
    try {
      std::size_t used = 0;
      c.seed = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument("seed");
    } catch (const std::exception&) {
      err << "error: BOSONSIM_SEED must be an unsigned integer\n";
      return kParseError;
    }
  }

  Resolved r;
  try {
    r = resolve(c);
    if (r.state && c.command != "oracle") {
      // construct the sampler once to surface unsupported combinations before any output
      SamplerConfig probe = sampler_config(c, r);
      probe.frames = 1;
      if (c.frames_in.empty()) generate_frames(probe, 1);
    }
  } catch (const bosonsim::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  }

  const unsigned workers = c.workers ? c.workers : std::max(1u, std::thread::hardware_concurrency());
  try {
    if (c.command == "sample") return cmd_sample(c, r, workers, out);
    if (c.command == "hist") return cmd_hist(c, r, workers, out);
    if (c.command == "oracle") return cmd_oracle(c, r, out);
    if (c.command == "compare") return cmd_compare(c, r, workers, out);
    return cmd_frames_grid(c, r, workers, out);
  } catch (const bosonsim::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  } catch (const bosonsim::InvalidState& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const bosonsim::UnsupportedCombination& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
}

}  // namespace bosonsim::cli
