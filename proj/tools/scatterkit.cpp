// Command-line frontend: machine-readable spectra, scattering matrices,
// Levinson identity reports, and figure datasets (resonance surface,
// flux sweeps).  CSV for grid sweeps, JSON for single reports.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "scatterkit/bound_states.hpp"
#include "scatterkit/levinson.hpp"
#include "scatterkit/model.hpp"
#include "scatterkit/n2_analytic.hpp"
#include "scatterkit/scattering.hpp"

namespace sk = scatterkit;
using json = nlohmann::ordered_json;

namespace {

enum ExitCode {
  kOk = 0,
  kFailure = 1,
  kInvalidInput = 2,
  kIdentityViolation = 3,
  kNonConvergence = 4,
};

// ---- logging ----------------------------------------------------------------

int log_level() {
  static const int level = [] {
    const char* env = std::getenv("SCATTERKIT_LOG");
    if (!env) return 1;
    const std::string v(env);
    if (v == "off") return 0;
    if (v == "debug") return 3;
    if (v == "info") return 2;
    return 1; // warn
  }();
  return level;
}

void log_msg(int level, const std::string& msg) {
  if (log_level() >= level) std::cerr << "scatterkit: " << msg << "\n";
}

// ---- deterministic float formatting -----------------------------------------

std::string fmt_g(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.15g", x);
  return buf;
}

// Snap to 15 significant digits so JSON output is stable too.
double snap(double x) { return std::strtod(fmt_g(x).c_str(), nullptr); }

json json_vec(const std::vector<double>& xs) {
  json out = json::array();
  for (double x : xs) out.push_back(snap(x));
  return out;
}

json json_vec(const Eigen::VectorXd& xs) {
  json out = json::array();
  for (int i = 0; i < xs.size(); ++i) out.push_back(snap(xs(i)));
  return out;
}

// ---- JSON config files (flat documents mirroring the flags) -----------------

std::string config_scalar(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  return value.dump();
}

// Expands `--config <path>` by splicing the document's key/value pairs in as
// ordinary flags right after the subcommand token.  Command-line flags come
// later in the argument list and win through the TakeLast policy.
std::vector<std::string> expand_config_args(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      break;
    }
  }
  if (path.empty()) return args;

  std::ifstream file(path);
  if (!file) throw sk::InvalidParams("cannot open config file: " + path);
  json doc;
  try {
    doc = json::parse(file);
  } catch (const json::exception& e) {
    throw sk::InvalidParams("config file " + path + ": " + e.what());
  }
  if (!doc.is_object()) {
    throw sk::InvalidParams("config document must be a flat JSON object");
  }

  if (args.empty() || args[0].rfind("-", 0) == 0) return args;

  std::vector<std::string> expanded;
  expanded.push_back(args[0]);
  for (const auto& [key, value] : doc.items()) {
    if (key == "config") continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) expanded.push_back("--" + key);
      continue;
    }
    if (value.is_array()) {
      for (const auto& element : value) {
        expanded.push_back("--" + key);
        expanded.push_back(config_scalar(element));
      }
      continue;
    }
    expanded.push_back("--" + key);
    expanded.push_back(config_scalar(value));
  }
  expanded.insert(expanded.end(), args.begin() + 1, args.end());
  log_msg(2, "expanded " + std::to_string(doc.size()) +
                 " config entries from " + path);
  return expanded;
}

// ---- shared option bundles ---------------------------------------------------

struct ModelOptions {
  int n = 2;
  double theta = 0.0;
  std::string v_csv;

  sk::Model make() const {
    std::vector<double> entries;
    std::stringstream ss(v_csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      std::size_t pos = 0;
      entries.push_back(std::stod(tok, &pos));
    }
    Eigen::VectorXd v(static_cast<int>(entries.size()));
    for (std::size_t i = 0; i < entries.size(); ++i) v(int(i)) = entries[i];
    return sk::make_model(n, theta, std::move(v));
  }
};

struct OutputOptions {
  std::string format = "json";
  std::string out = "-";
  int jobs = 0;

  int effective_jobs() const {
    if (jobs > 0) return jobs;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? int(hw) : 1;
  }

  void write(const std::string& payload) const {
    if (out == "-" || out.empty()) {
      std::cout << payload;
      return;
    }
    std::ofstream file(out, std::ios::binary);
    if (!file) throw sk::Error("cannot open output file: " + out);
    file << payload;
  }
};

void add_model_options(CLI::App* cmd, ModelOptions& opts) {
  cmd->add_option("--n", opts.n, "channel count (>= 2)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  cmd->add_option("--theta", opts.theta, "flux in radians, inside (0, pi)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)
      ->required();
  cmd->add_option("--v", opts.v_csv,
                  "site-0 potential as comma-separated reals, length n")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)
      ->required();
}

void add_output_options(CLI::App* cmd, OutputOptions& opts,
                        bool with_format = true) {
  if (with_format) {
    cmd->add_option("--format", opts.format, "output format")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)
        ->check(CLI::IsMember({"csv", "json"}));
  }
  cmd->add_option("--out", opts.out, "output path ('-' for stdout)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  cmd->add_option("--jobs", opts.jobs,
                  "worker threads for sweeps (default: hardware)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
}

void add_config_option(CLI::App* cmd, std::string& sink) {
  cmd->add_option("--config", sink,
                  "flat JSON document mirroring the flags of this command")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
}

// Bounded worker pool; results land by index so output keeps input order.
void parallel_rows(int jobs, int count, const std::function<void(int)>& fn) {
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(sep);
    out += parts[i];
  }
  return out;
}

std::string channels_field(const sk::ChannelSet& channels) {
  std::vector<std::string> ids;
  for (int j : channels.open) ids.push_back(std::to_string(j + 1));
  return join(ids, '|');
}

// ---- levinson report serialisation -------------------------------------------

json report_json(const sk::LevinsonReport& report) {
  json j;
  j["predicted"] = snap(report.winding.predicted);
  j["analytic_count"] = report.analytic_count;
  if (report.oracle_count >= 0) j["oracle_count"] = report.oracle_count;
  j["residual"] = snap(report.residual);
  j["identity_holds"] = report.identity_holds;
  j["var_total"] = snap(report.winding.var_total);
  j["interval_vars"] = json_vec(report.winding.interval_vars);
  j["threshold_signs"] = report.winding.threshold_signs;
  j["plus_count"] = report.winding.plus_count;
  j["eigenvalues"] = json_vec(report.eigenvalues.values);
  j["multiplicities"] = report.eigenvalues.multiplicities;
  j["embedded_candidates"] = json_vec(report.embedded_candidates);
  return j;
}

// ---- subcommands --------------------------------------------------------------

int cmd_spectrum(const ModelOptions& model_opts, const OutputOptions& out) {
  const sk::Model model = model_opts.make();
  json j;
  j["n"] = model.n();
  j["theta"] = snap(model.params.theta);
  j["v"] = json_vec(model.params.v);
  json lambdas = json::array();
  for (int k = 0; k < model.n(); ++k) {
    lambdas.push_back(snap(model.spec.sorted_lambda(k)));
  }
  j["lambdas"] = lambdas;
  j["channel_order"] = [&] {
    json order = json::array();
    for (int k = 0; k < model.n(); ++k) order.push_back(model.spec.order[k] + 1);
    return order;
  }();
  j["thresholds"] = json_vec(model.spec.thresholds);
  j["band"] = json::array({snap(model.spec.band_min), snap(model.spec.band_max)});
  json mult = json::array();
  for (int t = 0; t + 1 < model.spec.thresholds.size(); ++t) {
    const double mid =
        0.5 * (model.spec.thresholds(t) + model.spec.thresholds(t + 1));
    mult.push_back(sk::open_channels(model, mid).multiplicity());
  }
  j["multiplicity_profile"] = mult;
  out.write(j.dump(2) + "\n");
  return kOk;
}

std::vector<double> parse_lambdas(const std::string& list,
                                  const std::string& grid) {
  std::vector<double> lambdas;
  if (!list.empty()) {
    std::stringstream ss(list);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (!tok.empty()) lambdas.push_back(std::stod(tok));
    }
  }
  if (!grid.empty()) {
    double lo = 0.0, hi = 0.0;
    int count = 0;
    if (std::sscanf(grid.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3 ||
        count < 2 || !(hi > lo)) {
      throw sk::InvalidParams("--lambda-grid expects lo:hi:count with count >= 2");
    }
    for (int i = 0; i < count; ++i) {
      lambdas.push_back(lo + (hi - lo) * double(i) / (count - 1));
    }
  }
  if (lambdas.empty()) {
    throw sk::InvalidParams("smatrix needs --lambda or --lambda-grid");
  }
  return lambdas;
}

int cmd_smatrix(const ModelOptions& model_opts, const OutputOptions& out,
                const std::string& lambda_list, const std::string& lambda_grid) {
  const sk::Model model = model_opts.make();
  const std::vector<double> lambdas = parse_lambdas(lambda_list, lambda_grid);

  struct Row {
    double lambda = 0.0;
    std::string error;
    sk::FiberMatrix fiber;
    double det_phase = 0.0;
    double unitarity_defect = 0.0;
  };
  std::vector<Row> rows(lambdas.size());
  parallel_rows(out.effective_jobs(), int(lambdas.size()), [&](int i) {
    Row& row = rows[i];
    row.lambda = lambdas[i];
    try {
      row.fiber = sk::s_fiber(model, row.lambda);
      const int m = row.fiber.channels.multiplicity();
      const sk::Complex det = row.fiber.s.determinant();
      row.det_phase = std::arg(det);
      row.unitarity_defect =
          m == 0 ? 0.0
                 : (row.fiber.s * row.fiber.s.adjoint() -
                    Eigen::MatrixXcd::Identity(m, m))
                       .cwiseAbs()
                       .maxCoeff();
    } catch (const sk::ThresholdEnergy&) {
      row.error = "threshold";
    } catch (const sk::SingularAtEnergy&) {
      row.error = "singular";
    }
  });

  bool any_ok = false;
  std::string payload;
  if (out.format == "csv") {
    std::vector<std::string> lines;
    lines.push_back(
        "lambda,error,multiplicity,open_channels,det_phase,unitarity_defect,"
        "s_entries");
    for (const Row& row : rows) {
      std::vector<std::string> fields;
      fields.push_back(fmt_g(row.lambda));
      fields.push_back(row.error);
      if (row.error.empty()) {
        any_ok = true;
        const int m = row.fiber.channels.multiplicity();
        fields.push_back(std::to_string(m));
        fields.push_back(channels_field(row.fiber.channels));
        fields.push_back(fmt_g(row.det_phase));
        fields.push_back(fmt_g(row.unitarity_defect));
        std::vector<std::string> entries;
        for (int r = 0; r < m; ++r) {
          for (int c = 0; c < m; ++c) {
            entries.push_back(fmt_g(row.fiber.s(r, c).real()));
            entries.push_back(fmt_g(row.fiber.s(r, c).imag()));
          }
        }
        fields.push_back(join(entries, '|'));
      } else {
        fields.insert(fields.end(), {"", "", "", "", ""});
      }
      lines.push_back(join(fields, ','));
    }
    payload = join(lines, '\n') + "\n";
  } else {
    json arr = json::array();
    for (const Row& row : rows) {
      json j;
      j["lambda"] = snap(row.lambda);
      if (!row.error.empty()) {
        j["error"] = row.error;
        arr.push_back(j);
        continue;
      }
      any_ok = true;
      const int m = row.fiber.channels.multiplicity();
      j["multiplicity"] = m;
      json open = json::array();
      for (int ch : row.fiber.channels.open) open.push_back(ch + 1);
      j["open_channels"] = open;
      j["det_phase"] = snap(row.det_phase);
      j["unitarity_defect"] = snap(row.unitarity_defect);
      json s_re = json::array(), s_im = json::array();
      for (int r = 0; r < m; ++r) {
        json re_row = json::array(), im_row = json::array();
        for (int c = 0; c < m; ++c) {
          re_row.push_back(snap(row.fiber.s(r, c).real()));
          im_row.push_back(snap(row.fiber.s(r, c).imag()));
        }
        s_re.push_back(re_row);
        s_im.push_back(im_row);
      }
      j["s_re"] = s_re;
      j["s_im"] = s_im;
      arr.push_back(j);
    }
    payload = arr.dump(2) + "\n";
  }
  out.write(payload);
  return any_ok ? kOk : kInvalidInput;
}

int cmd_levinson(const ModelOptions& model_opts, const OutputOptions& out,
                 int L, double delta) {
  const sk::Model model = model_opts.make();
  sk::LevinsonOptions opts;
  opts.oracle_L = L;
  opts.oracle_delta = delta;
  const sk::LevinsonReport report = sk::levinson_report(model, opts);
  out.write(report_json(report).dump(2) + "\n");
  return report.identity_holds ? kOk : kIdentityViolation;
}

int cmd_oracle(const ModelOptions& model_opts, const OutputOptions& out, int L,
               double delta) {
  const sk::Model model = model_opts.make();
  const sk::OracleResult result = sk::truncation_oracle_detail(model, L, delta);
  json j;
  j["count"] = result.count;
  j["below"] = json_vec(result.at_L.below);
  j["above"] = json_vec(result.at_L.above);
  j["below_2L"] = json_vec(result.at_2L.below);
  j["above_2L"] = json_vec(result.at_2L.above);
  j["max_drift"] = snap(result.max_drift);
  j["L"] = L;
  j["delta"] = snap(delta);
  out.write(j.dump(2) + "\n");
  return kOk;
}

int cmd_resonance_surface(const OutputOptions& out, int grid, bool top) {
  // Log-uniform sample of the quadrant v1 in [-50, -0.05], v2 in (-2, 0);
  // the mirrored quadrant (via --top) probes the top-threshold condition.
  if (grid < 2) throw sk::InvalidParams("--grid must be >= 2");
  const double x_lo = 0.05, x_hi = 50.0;
  const double y_lo = 0.005, y_hi = 1.95;
  std::vector<std::string> lines;
  lines.push_back("v1,v2,theta0");
  int rows = 0;
  for (int i = 0; i < grid; ++i) {
    const double x =
        x_lo * std::pow(x_hi / x_lo, double(i) / (grid - 1));
    for (int k = 0; k < grid; ++k) {
      const double y =
          y_lo * std::pow(y_hi / y_lo, double(k) / (grid - 1));
      const double v1 = top ? x : -x;
      const double v2 = top ? y : -y;
      if (v1 == v2) continue;
      const std::optional<double> theta0 =
          top ? sk::resonance_theta_top(v1, v2)
              : sk::resonance_theta_bottom(v1, v2);
      if (!theta0) continue;
      lines.push_back(join({fmt_g(v1), fmt_g(v2), fmt_g(*theta0)}, ','));
      ++rows;
    }
  }
  out.write(join(lines, '\n') + "\n");
  if (rows == 0) {
    log_msg(1, "resonance surface: no resonant point on the grid");
    return kInvalidInput;
  }
  return kOk;
}

int cmd_sweep_theta(const ModelOptions& model_opts, const OutputOptions& out,
                    int grid) {
  if (grid < 2) throw sk::InvalidParams("--grid must be >= 2");
  const double margin = 0.02;
  const double pi = 3.14159265358979323846;

  struct Row {
    double theta = 0.0;
    std::string error;
    sk::LevinsonReport report;
  };
  std::vector<Row> rows(grid);
  parallel_rows(out.effective_jobs(), grid, [&](int i) {
    Row& row = rows[i];
    row.theta = margin + (pi - 2.0 * margin) * double(i) / (grid - 1);
    try {
      ModelOptions per_theta = model_opts;
      per_theta.theta = row.theta;
      sk::LevinsonOptions opts;
      opts.with_oracle = false;
      row.report = sk::levinson_report(per_theta.make(), opts);
    } catch (const sk::Error& err) {
      row.error = err.what();
    }
  });

  std::vector<std::string> lines;
  lines.push_back("theta,error,count,predicted,var_total,eigenvalues");
  for (const Row& row : rows) {
    std::vector<std::string> fields;
    fields.push_back(fmt_g(row.theta));
    if (!row.error.empty()) {
      fields.push_back("\"" + row.error + "\"");
      fields.insert(fields.end(), {"", "", "", ""});
    } else {
      fields.push_back("");
      fields.push_back(std::to_string(row.report.analytic_count));
      fields.push_back(fmt_g(row.report.winding.predicted));
      fields.push_back(fmt_g(row.report.winding.var_total));
      std::vector<std::string> eigs;
      for (double e : row.report.eigenvalues.values) eigs.push_back(fmt_g(e));
      fields.push_back(join(eigs, '|'));
    }
    lines.push_back(join(fields, ','));
  }
  out.write(join(lines, '\n') + "\n");
  return kOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scattering toolkit for the discrete magnetic half-cylinder "
               "Hamiltonian: spectra, fiber scattering matrices, and the "
               "integer Levinson identity"};
  app.require_subcommand(1);

  ModelOptions model_opts;
  OutputOptions out_opts;
  std::string lambda_list, lambda_grid;
  int oracle_L = 4000;
  double oracle_delta = 1e-3;
  int grid = 40;
  bool top = false;
  std::string config_path;

  CLI::App* spectrum = app.add_subcommand(
      "spectrum", "flux-matrix eigenvalues, thresholds, band, multiplicity");
  add_model_options(spectrum, model_opts);
  add_output_options(spectrum, out_opts, false);
  add_config_option(spectrum, config_path);

  CLI::App* smatrix = app.add_subcommand(
      "smatrix", "scattering matrix rows on given energies");
  add_model_options(smatrix, model_opts);
  add_output_options(smatrix, out_opts);
  smatrix->add_option("--lambda", lambda_list, "comma-separated energies")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  smatrix->add_option("--lambda-grid", lambda_grid, "lo:hi:count energy grid")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  add_config_option(smatrix, config_path);

  CLI::App* levinson = app.add_subcommand(
      "levinson", "full identity check: winding, counts, oracle");
  add_model_options(levinson, model_opts);
  add_output_options(levinson, out_opts, false);
  levinson->add_option("--L", oracle_L, "oracle truncation length")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  levinson->add_option("--delta", oracle_delta, "oracle drift tolerance scale")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  add_config_option(levinson, config_path);

  CLI::App* oracle = app.add_subcommand(
      "oracle", "truncated-lattice bound-state count with stability check");
  add_model_options(oracle, model_opts);
  add_output_options(oracle, out_opts, false);
  oracle->add_option("--L", oracle_L, "truncation length")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  oracle->add_option("--delta", oracle_delta, "drift tolerance scale")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  add_config_option(oracle, config_path);

  CLI::App* surface = app.add_subcommand(
      "resonance-surface", "CSV of (v1, v2, theta0) resonance triples");
  add_output_options(surface, out_opts, false);
  surface->add_option("--grid", grid, "grid points per axis")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  surface->add_flag("--top", top, "top-threshold resonances (mirrored quadrant)");
  add_config_option(surface, config_path);

  CLI::App* sweep = app.add_subcommand(
      "sweep-theta", "per-flux Levinson rows over a theta grid");
  add_model_options(sweep, model_opts);
  add_output_options(sweep, out_opts);
  sweep->add_option("--grid", grid, "number of theta samples")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  add_config_option(sweep, config_path);

  std::vector<std::string> args;
  try {
    args = expand_config_args(argc, argv);
  } catch (const sk::InvalidParams& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalidInput;
  }
  std::reverse(args.begin(), args.end()); // CLI11 consumes from the back
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalidInput;
  }

  try {
    if (spectrum->parsed()) return cmd_spectrum(model_opts, out_opts);
    if (smatrix->parsed()) {
      return cmd_smatrix(model_opts, out_opts, lambda_list, lambda_grid);
    }
    if (levinson->parsed()) {
      return cmd_levinson(model_opts, out_opts, oracle_L, oracle_delta);
    }
    if (oracle->parsed()) {
      return cmd_oracle(model_opts, out_opts, oracle_L, oracle_delta);
    }
    if (surface->parsed()) return cmd_resonance_surface(out_opts, grid, top);
    if (sweep->parsed()) return cmd_sweep_theta(model_opts, out_opts, grid);
  } catch (const sk::InvalidParams& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const sk::IdentityViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIdentityViolation;
  } catch (const sk::NonConvergent& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const sk::PhaseJump& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const sk::Unstable& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const sk::BracketAtBoundary& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
