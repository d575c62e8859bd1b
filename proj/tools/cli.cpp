#include "cli.hpp"

#include "acceptance.hpp"
#include "lattice_input.hpp"

#include "arcoh/error.hpp"
#include "arcoh/parallel.hpp"
#include "arcoh/stability.hpp"
#include "arcoh/theta.hpp"
#include "arcoh/vanishing.hpp"
#include "arcoh/zeta.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

namespace arcoh::cli {

namespace {

using Json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Settings {
  std::string config_path;
  int threads = 0;
  bool json = false;
  std::string out_path;

  std::string field = "Q";
  std::string lattice;
  double tol = 1e-12;
  long long cap = kDefaultEnumerationCap;
  bool dual_route = false;

  double margin = 1.0;
  int max_rank = 6;
  bool over_q = false;
  bool assume_semistable = false;

  double twist_degree = 1.0;
  int steps = 20;

  int n = 2;
  double degree = 0.0;
  int samples = 100;
  std::uint64_t seed = 1;
  double spread = 1.0;
  bool duality = false;
  std::string csv_path;

  int rank = 1;
  std::string s = "2";
  std::string grid;
  std::string method = "quadrature";
  long long mc_samples = 100000;
  double t_max = 0.0;
  double h = 0.25;
  int levels = 6;
  int sigma_steps = 9;
  double t_from = 0.0;
  double t_to = 30.0;
  int t_steps = 31;

  std::vector<int> only;
};

struct Outcome {
  Json result = Json::object();
  int code = kOk;
  std::string text;  // plain-text body overriding the generic rendering
};

constexpr double kEps = std::numeric_limits<double>::epsilon();

Json quantity(Json value, double error, std::string_view kind) {
  Json q;
  q["value"] = std::move(value);
  q["error"] = error;
  q["error_kind"] = kind;
  return q;
}

Json rounding(double v) { return quantity(v, 64 * kEps * std::max(1.0, std::abs(v)), "rounding"); }
Json exact(Json v) { return quantity(std::move(v), 0.0, "exact"); }
Json complex_json(Complex z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

Json matrix_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Json int_matrix_json(const IntMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::hypothesis_violated: return kHypothesisViolated;
    case ErrorCode::tolerance_unreachable:
    case ErrorCode::enumeration_too_large:
    case ErrorCode::sampling_starved:
    case ErrorCode::rank_cap_exceeded: return kBudget;
    default: return kUsage;
  }
}

std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int number = 0;
  const auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++number;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError(path + ":" + std::to_string(number) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::replace(key.begin(), key.end(), '_', '-');
    out.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return out;
}

std::vector<CLI::App*> selected_chain(CLI::App& root) {
  std::vector<CLI::App*> chain{&root};
  while (true) {
    const auto subs = chain.back()->get_subcommands();
    if (subs.empty()) break;
    chain.push_back(subs.front());
  }
  return chain;
}

std::string command_path(const std::vector<CLI::App*>& chain) {
  std::string out;
  for (std::size_t i = 1; i < chain.size(); ++i) out += (i > 1 ? " " : "") + chain[i]->get_name();
  return out;
}

void apply_config(const std::vector<std::pair<std::string, std::string>>& entries, const std::vector<CLI::App*>& chain) {
  for (const auto& [key, value] : entries) {
    if (key == "command") continue;
    CLI::Option* opt = nullptr;
    for (auto it = chain.rbegin(); it != chain.rend() && !opt; ++it) opt = (*it)->get_option_no_throw("--" + key);
    if (!opt || key == "config") throw UsageError("unknown config key '" + key + "' for this command");
    if (opt->count() > 0) continue;  // flags win
    opt->add_result(value);
    opt->run_callback();
  }
}

Json echo_inputs(const std::vector<CLI::App*>& chain) {
  Json inputs = Json::object();
  for (CLI::App* app : chain)
    for (const CLI::Option* opt : app->get_options()) {
      const std::string name = opt->get_single_name();
      if (name == "help" || name == "config" || name == "out" || name == "threads" || name == "json") continue;
      std::string value;
      if (opt->count() > 0) {
        for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
      } else {
        value = opt->get_default_str();
      }
      inputs[name] = value;
    }
  return inputs;
}

void render_plain(std::ostream& os, const Json& node, const std::string& prefix) {
  for (const auto& [key, v] : node.items()) {
    const std::string name = prefix.empty() ? key : prefix + "." + key;
    if (v.is_object() && v.contains("error_kind")) {
      os << name << ": " << v["value"].dump() << " +- " << v["error"].get<double>() << " ("
         << v["error_kind"].get<std::string>() << ")\n";
    } else if (v.is_object()) {
      render_plain(os, v, name);
    } else {
      os << name << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
    }
  }
}

std::string render_plain(const Json& result) {
  std::ostringstream os;
  render_plain(os, result, "");
  return os.str();
}

// ---- commands ----

struct Inputs {
  Settings settings;
  std::optional<FieldSpec> field;  // set when given explicitly
};

FieldSpec field_spec(const Inputs& in) { return in.field.value_or(FieldSpec::rational()); }

MetrizedLattice lattice_of(const Inputs& in) {
  if (in.settings.lattice.empty()) throw UsageError("--lattice is required");
  return load_lattice(in.settings.lattice, in.field);
}

StabilityOptions stability_of(const Settings& s) {
  StabilityOptions o;
  o.margin = s.margin;
  o.max_z_rank = s.max_rank;
  o.cap = s.cap;
  return o;
}

Json lattice_summary(const MetrizedLattice& l) {
  return Json{{"label", l.label()},
              {"field", l.field().spec().to_string()},
              {"of_rank", l.of_rank()},
              {"z_rank", l.z_rank()},
              {"degree", rounding(l.degree())}};
}

Outcome cmd_field(const Inputs& in) {
  const NumberField f = NumberField::make(field_spec(in));
  Outcome o;
  o.result["field"] = f.spec().to_string();
  o.result["degree"] = exact(f.degree());
  o.result["real_places"] = exact(f.real_places());
  o.result["complex_places"] = exact(f.complex_places());
  o.result["abs_disc"] = exact(f.abs_disc());
  o.result["log_disc"] = rounding(f.log_disc());
  o.result["integral_basis_embedding"] = quantity(matrix_json(f.integral_basis_embedding()), 4 * kEps, "rounding");
  Json codiff = Json::array();
  for (const auto& row : f.codifferent_coords()) {
    Json r = Json::array();
    for (const Rational& q : row) r.push_back(std::to_string(q.numerator()) + "/" + std::to_string(q.denominator()));
    codiff.push_back(r);
  }
  o.result["codifferent_basis"] = exact(codiff);
  return o;
}

Outcome cmd_theta(const Inputs& in, bool dual_side) {
  const MetrizedLattice l = lattice_of(in);
  ThetaOptions opts{in.settings.tol};
  opts.cap = in.settings.cap;
  opts.allow_dual_route = in.settings.dual_route;
  const ThetaValue t = dual_side ? h1(l, opts) : h0(l, opts);
  Outcome o;
  o.result["lattice"] = lattice_summary(l);
  o.result["value"] = quantity(t.value, t.tail_bound + t.rounding_bound, "certified");
  o.result[dual_side ? "h1" : "h0"] = quantity(t.h0, t.h0_error, "certified");
  o.result["radius"] = exact(t.radius);
  o.result["enumerated"] = exact(t.enumerated);
  o.result["tail_bound"] = exact(t.tail_bound);
  o.result["rounding_bound"] = exact(t.rounding_bound);
  o.result["via_dual"] = t.via_dual;
  return o;
}

Outcome cmd_rr(const Inputs& in) {
  const MetrizedLattice l = lattice_of(in);
  const Estimate r = rr_residual(l, in.settings.tol);
  Outcome o;
  o.result["lattice"] = lattice_summary(l);
  o.result["half_n_log_disc"] = rounding(0.5 * l.of_rank() * l.field().log_disc());
  o.result["residual"] = quantity(r.value, r.error, "certified");
  return o;
}

Json polygon_json(const HNPolygon& p) {
  Json vertices = Json::array();
  double scale = 1.0;
  for (const auto& [r, d] : p.vertices) {
    vertices.push_back(Json::array({r, d}));
    scale = std::max(scale, std::abs(d));
  }
  Json out;
  out["base_field"] = p.base_field.to_string();
  out["vertices"] = quantity(vertices, 1e3 * kEps * scale, "rounding");
  out["slopes"] = quantity(p.slopes, 1e3 * kEps * scale, "rounding");
  return out;
}

Outcome cmd_hn(const Inputs& in) {
  const MetrizedLattice l = lattice_of(in);
  const StabilityOptions opts = stability_of(in.settings);
  Outcome o;
  o.result["lattice"] = lattice_summary(l);
  o.result["polygon"] = polygon_json(in.settings.over_q ? canonical_polygon_over_Q(l, opts) : hn_filtration(l, opts));
  return o;
}

Outcome cmd_semistable(const Inputs& in) {
  const MetrizedLattice l = lattice_of(in);
  const StabilityOptions opts = stability_of(in.settings);
  const SublatticeHandle top = max_slope_sublattice(l, opts);
  Outcome o;
  o.result["lattice"] = lattice_summary(l);
  o.result["semistable"] = top.slope <= slope(l) + kSlopeTieTolerance;
  o.result["slope"] = rounding(slope(l));
  o.result["max_slope"] = rounding(top.slope);
  o.result["destabilizer_rank"] = exact(top.base_rank());
  o.result["destabilizer"] = exact(int_matrix_json(top.generators));
  return o;
}

Outcome cmd_vanish_probe(const Inputs& in) {
  const MetrizedLattice l = lattice_of(in);
  VanishingOptions opts;
  opts.assume_semistable = in.settings.assume_semistable;
  opts.stability = stability_of(in.settings);
  const DecayProbe p = scaling_decay_probe(l, in.settings.twist_degree, in.settings.steps, in.settings.tol, opts);
  Outcome o;
  o.result["lattice"] = lattice_summary(l);
  o.result["twist_degree"] = exact(p.twist_degree);
  Json steps = Json::array();
  for (const DecayStep& s : p.steps) {
    Json row;
    row["m"] = s.m;
    row["degree"] = rounding(s.degree);
    row["h1"] = quantity(s.h1, s.error, "certified");
    row["bound"] = s.bound ? rounding(*s.bound) : Json("n/a");
    steps.push_back(row);
  }
  o.result["steps"] = steps;
  o.result["monotone_from"] = exact(p.monotone_from);
  o.result["final_h1"] = quantity(p.final_h1, p.steps.back().error, "certified");
  o.result["reached_tolerance"] = p.reached_tolerance;
  if (!p.reached_tolerance) o.code = kBudget;
  std::ostringstream os;
  os << "m  degree  h1  error  bound\n";
  for (const DecayStep& s : p.steps) {
    os << s.m << "  " << s.degree << "  " << s.h1 << "  " << s.error << "  ";
    if (s.bound) {
      os << *s.bound;
    } else {
      os << "n/a";
    }
    os << '\n';
  }
  os << "monotone_from: " << p.monotone_from << "\nreached_tolerance: " << (p.reached_tolerance ? "true" : "false")
     << '\n';
  o.text = os.str();
  return o;
}

Outcome cmd_vanish_bounds(const Inputs& in) {
  const MetrizedLattice l = lattice_of(in);
  VanishingOptions opts;
  opts.assume_semistable = in.settings.assume_semistable;
  opts.stability = stability_of(in.settings);
  const auto b0 = effective_h0_bound(l, opts);
  const auto b1 = effective_h1_bound(l, opts);
  const ThetaValue t0 = h0(l, in.settings.tol), t1 = h1(l, in.settings.tol);
  Outcome o;
  o.result["lattice"] = lattice_summary(l);
  o.result["h0"] = quantity(t0.h0, t0.h0_error, "certified");
  o.result["h0_threshold"] = rounding(h0_bound_threshold(l));
  o.result["h0_bound"] = b0 ? rounding(*b0) : Json("n/a");
  o.result["h1"] = quantity(t1.h0, t1.h0_error, "certified");
  o.result["h1_threshold"] = rounding(h1_bound_threshold(l));
  o.result["h1_bound"] = b1 ? rounding(*b1) : Json("n/a");
  return o;
}

Outcome cmd_moduli(const Inputs& in) {
  const Settings& s = in.settings;
  const NumberField f = NumberField::make(field_spec(in));
  ExtremalOptions opts;
  opts.spread = s.spread;
  opts.tol = s.tol;
  opts.stability = stability_of(s);
  const ExtremalEstimate e = extremal_values_estimate(f, s.n, s.degree, s.samples, s.seed, opts);
  Outcome o;
  o.result["field"] = f.spec().to_string();
  o.result["n"] = exact(s.n);
  o.result["degree"] = exact(s.degree);
  o.result["sample_count"] = exact(e.sample_count);
  o.result["attempts"] = exact(static_cast<long long>(e.attempts.size()));
  // observed extrema of certified values, not certified extrema of the moduli space
  o.result["m_hat"] = quantity(e.min_h0, s.tol, "estimated");
  o.result["M_hat"] = quantity(e.max_h0, s.tol, "estimated");
  o.result["delta_hat"] = quantity(e.spread_h0, 2 * s.tol, "estimated");
  if (s.duality) {
    const DualityResidual r = extremal_duality_residual(e, s.tol);
    o.result["duality_max_residual"] = quantity(r.max_residual, 2 * s.tol, "certified");
    o.result["duality_min_residual"] = quantity(r.min_residual, 2 * s.tol, "certified");
    o.result["duality_worst_samplewise"] = quantity(r.worst_samplewise, 2 * s.tol, "certified");
  }
  if (!s.csv_path.empty()) {
    std::ofstream csv(s.csv_path);
    if (!csv) throw UsageError("cannot write '" + s.csv_path + "'");
    csv.precision(17);
    csv << "sample_id,degree,h0,semistable\n";
    for (const ModuliSample& m : e.attempts) {
      csv << m.index << ',' << m.degree << ',';
      if (m.h0) csv << *m.h0;
      csv << ',' << (m.semistable ? "true" : "false") << '\n';
    }
    o.result["csv"] = s.csv_path;
  }
  return o;
}

Rank2Options rank2_options(const Settings& s) {
  Rank2Options o;
  if (!s.grid.empty()) {
    int x = 0, y = 0, t = 0;
    char a = 0, b = 0;
    std::istringstream is(s.grid);
    if (!(is >> x >> a >> y >> b >> t) || a != 'x' || b != 'x' || !is.eof())
      throw UsageError("--grid expects <x>x<y>x<t>, e.g. 32x32x96");
    o.x_nodes = x;
    o.y_nodes = y;
    o.t_nodes = t;
  }
  o.tol = s.tol;
  o.t_max = s.t_max;
  o.samples = s.mc_samples;
  o.seed = s.seed;
  if (s.method == "monte-carlo") o.method = ZetaMethod::monte_carlo;
  return o;
}

std::string_view error_kind(ZetaMethod m) {
  return m == ZetaMethod::monte_carlo ? "estimated-3-sigma" : "estimated";
}

Json zeta_json(const ZetaEval& e) {
  Json j;
  j["s"] = complex_json(e.s);
  j["value"] = quantity(complex_json(e.value), e.abs_error, error_kind(e.method));
  j["integral_s"] = quantity(complex_json(e.integral_s), e.abs_error, error_kind(e.method));
  j["integral_1ms"] = quantity(complex_json(e.integral_1ms), e.abs_error, error_kind(e.method));
  j["polar"] = quantity(complex_json(e.polar), e.abs_error, error_kind(e.method));
  j["volume"] = rounding(e.volume);
  j["t_max"] = exact(e.t_max);
  j["method"] = to_string(e.method);
  j["sample_count"] = exact(e.sample_count);
  return j;
}

std::function<ZetaEval(Complex)> zeta_function(const Settings& s) {
  if (s.rank == 1) {
    Rank1Options o{s.tol, s.t_max};
    if (s.method == "direct") return [o](Complex z) { return rank1_zeta_direct(z, o); };
    return [o](Complex z) { return rank1_zeta(z, o); };
  }
  if (s.rank == 2) {
    const Rank2Options o = rank2_options(s);
    if (s.method == "direct") return [o](Complex z) { return rank2_zeta_direct(z, o); };
    return [o](Complex z) { return rank2_zeta(z, o); };
  }
  throw UsageError("--rank must be 1 or 2");
}

void check_method(const Settings& s) {
  if (s.method != "quadrature" && s.method != "monte-carlo" && s.method != "direct")
    throw UsageError("--method must be quadrature, monte-carlo or direct");
  if (s.method == "monte-carlo" && s.rank != 2) throw UsageError("monte-carlo is available for rank 2 only");
}

Outcome cmd_zeta(const Inputs& in) {
  check_method(in.settings);
  const ZetaEval e = zeta_function(in.settings)(parse_complex(in.settings.s));
  Outcome o;
  o.result["rank"] = in.settings.rank;
  const Json fields = zeta_json(e);
  for (const auto& [k, v] : fields.items()) o.result[k] = v;
  if (in.settings.rank == 1) {
    const Complex ref = xi_reference(e.s);
    o.result["xi_reference"] = quantity(complex_json(ref), 1e-12 * std::abs(ref), "estimated");
  }
  return o;
}

Outcome cmd_zeta_residues(const Inputs& in) {
  const Settings& s = in.settings;
  check_method(s);
  std::function<ZetaEval(Complex)> f;
  std::optional<Rank2Integrator> integrator;
  if (s.rank == 2 && s.method == "quadrature") {
    const Rank2Options o = rank2_options(s);
    integrator.emplace(o, o.t_max > 0 ? o.t_max : rank2_t_max(1.0, o.tol));
    f = [&](Complex z) { return integrator->evaluate(z); };
  } else {
    f = zeta_function(s);
  }
  const double volume = s.rank == 1 ? 1.0 : moduli_volume_rank2().value;
  Outcome o;
  o.result["rank"] = s.rank;
  o.result["expected_magnitude"] = rounding(volume);
  for (int pole : {1, 0}) {
    const ResidueEstimate r = pole_check(f, pole, s.h, s.levels);
    const std::string key = "residue_at_" + std::to_string(pole);
    o.result[key] = quantity(r.residue, r.error, "estimated");
    o.result[key + "_converged"] = r.converged;
    if (!r.converged) o.code = kBudget;
  }
  return o;
}

Outcome cmd_zeta_strip(const Inputs& in) {
  const Settings& s = in.settings;
  check_method(s);
  if (s.sigma_steps < 2 || s.t_steps < 2) throw UsageError("--sigma-steps and --t-steps must be >= 2");
  std::function<ZetaEval(Complex)> f;
  std::optional<Rank2Integrator> integrator;
  if (s.rank == 2 && s.method == "quadrature") {
    // one fibre table serves the whole strip; size T for the worst sigma
    const Rank2Options o = rank2_options(s);
    integrator.emplace(o, o.t_max > 0 ? o.t_max : rank2_t_max(Complex(0.0), o.tol));
    f = [&](Complex z) { return integrator->evaluate(z); };
  } else {
    f = zeta_function(s);
  }
  struct Row {
    double sigma, t;
    ZetaEval e;
  };
  std::vector<Row> rows;
  for (int i = 0; i < s.sigma_steps; ++i)
    for (int j = 0; j < s.t_steps; ++j) {
      const double sigma = (i + 1.0) / (s.sigma_steps + 1.0);
      const double t = s.t_from + (s.t_to - s.t_from) * j / (s.t_steps - 1.0);
      rows.push_back({sigma, t, f(Complex(sigma, t))});
    }
  std::ostringstream csv;
  csv.precision(17);
  csv << "sigma,t,re,im,abs,abs_error\n";
  for (const Row& r : rows)
    csv << r.sigma << ',' << r.t << ',' << r.e.value.real() << ',' << r.e.value.imag() << ',' << std::abs(r.e.value)
        << ',' << r.e.abs_error << '\n';
  Outcome o;
  o.result["rank"] = s.rank;
  o.result["points"] = exact(static_cast<long long>(rows.size()));
  double worst = 0.0;
  for (const Row& r : rows) worst = std::max(worst, r.e.abs_error);
  o.result["max_abs_error"] = exact(worst);
  if (!s.csv_path.empty()) {
    std::ofstream file(s.csv_path);
    if (!file) throw UsageError("cannot write '" + s.csv_path + "'");
    file << csv.str();
    o.result["csv"] = s.csv_path;
  } else {
    o.text = csv.str();
  }
  return o;
}

Outcome cmd_selftest(const Inputs& in, std::ostream& live) {
  const bool json = in.settings.json;
  const auto results = acceptance::run(in.settings.only, [&](const acceptance::CriterionResult& r) {
    if (!json) live << acceptance::format(r) << std::endl;
  });
  Outcome o;
  Json rows = Json::array();
  int passed = 0;
  for (const auto& r : results) {
    passed += r.passed;
    rows.push_back(Json{{"id", r.id}, {"title", r.title}, {"passed", r.passed}, {"detail", r.detail}});
  }
  o.result["criteria"] = rows;
  o.result["passed"] = exact(passed);
  o.result["total"] = exact(static_cast<long long>(results.size()));
  o.text = std::to_string(passed) + "/" + std::to_string(results.size()) + " criteria passed\n";
  if (passed != static_cast<int>(results.size())) o.code = kBudget;
  return o;
}

// ---- parser ----

void add_lattice_options(CLI::App* cmd, Settings& s) {
  cmd->add_option("--lattice", s.lattice, "standard:n | diag:a,b,.. | random:n,deg,spread,seed | JSON file");
}

void add_field_option(CLI::App* cmd, Settings& s) {
  cmd->add_option("--field", s.field, "Q, Q(i) or Q(sqrt D)")->capture_default_str();
}

void add_stability_options(CLI::App* cmd, Settings& s) {
  cmd->add_option("--margin", s.margin, "destabilizer search radius multiplier (>= 1)")->capture_default_str();
  cmd->add_option("--max-rank", s.max_rank, "largest Z-rank handled by the destabilizer search")->capture_default_str();
  cmd->add_option("--cap", s.cap, "enumeration cap")->capture_default_str();
}

void add_tol_option(CLI::App* cmd, Settings& s, const char* help = "absolute tolerance") {
  cmd->add_option("--tol", s.tol, help)->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Settings s;
  CLI::App app{"Numerical cohomology, stability and zeta functions of metrized lattices", "arcoh"};
  app.require_subcommand(1);
  app.add_option("--config", s.config_path, "key = value file; command-line flags take precedence");
  app.add_option("--threads", s.threads, "worker threads (default: ARCOH_THREADS or all cores)");
  app.add_flag("--json", s.json, "emit a JSON report");
  app.add_option("--out", s.out_path, "write the report to a file");

  const auto sub = [&](CLI::App* parent, const char* name, const char* help) {
    CLI::App* c = parent->add_subcommand(name, help);
    c->fallthrough();
    return c;
  };

  CLI::App* field_cmd = sub(&app, "field", "field invariants");
  add_field_option(field_cmd, s);

  CLI::App* h0_cmd = sub(&app, "h0", "certified h0");
  CLI::App* h1_cmd = sub(&app, "h1", "certified h1 through duality");
  for (CLI::App* c : {h0_cmd, h1_cmd}) {
    add_field_option(c, s);
    add_lattice_options(c, s);
    add_tol_option(c, s);
    c->add_option("--cap", s.cap, "enumeration cap")->capture_default_str();
    c->add_flag("--dual-route", s.dual_route, "allow Poisson evaluation on the dual");
  }

  CLI::App* rr_cmd = sub(&app, "rr", "Riemann-Roch residual");
  add_field_option(rr_cmd, s);
  add_lattice_options(rr_cmd, s);
  add_tol_option(rr_cmd, s);

  CLI::App* hn_cmd = sub(&app, "hn", "Harder-Narasimhan polygon");
  add_field_option(hn_cmd, s);
  add_lattice_options(hn_cmd, s);
  add_stability_options(hn_cmd, s);
  hn_cmd->add_flag("--over-q", s.over_q, "canonical polygon of the restriction to Q");

  CLI::App* ss_cmd = sub(&app, "semistable", "semistability verdict (reported in the output, exit 0)");
  add_field_option(ss_cmd, s);
  add_lattice_options(ss_cmd, s);
  add_stability_options(ss_cmd, s);

  CLI::App* vanish_cmd = sub(&app, "vanish", "effective vanishing");
  vanish_cmd->require_subcommand(1);
  CLI::App* probe_cmd = sub(vanish_cmd, "probe", "h1 under repeated positive twists");
  CLI::App* bounds_cmd = sub(vanish_cmd, "bounds", "effective h0 / h1 bounds");
  for (CLI::App* c : {probe_cmd, bounds_cmd}) {
    add_field_option(c, s);
    add_lattice_options(c, s);
    add_stability_options(c, s);
    add_tol_option(c, s);
    c->add_flag("--assume-semistable", s.assume_semistable, "skip the semistability check");
  }
  probe_cmd->add_option("--twist-deg", s.twist_degree, "degree of the twist per step (> 0)")->capture_default_str();
  probe_cmd->add_option("--steps", s.steps, "number of twist steps")->capture_default_str();

  CLI::App* moduli_cmd = sub(&app, "moduli", "sampled moduli statistics");
  moduli_cmd->require_subcommand(1);
  CLI::App* extremal_cmd = sub(moduli_cmd, "extremal", "observed extrema of h0 on semistable lattices");
  add_field_option(extremal_cmd, s);
  add_stability_options(extremal_cmd, s);
  add_tol_option(extremal_cmd, s);
  extremal_cmd->add_option("--n", s.n, "O_F-rank")->capture_default_str();
  extremal_cmd->add_option("--d", s.degree, "degree")->capture_default_str();
  extremal_cmd->add_option("--samples", s.samples, "accepted samples")->capture_default_str();
  extremal_cmd->add_option("--seed", s.seed, "seed")->capture_default_str();
  extremal_cmd->add_option("--spread", s.spread, "sampling spread")->capture_default_str();
  extremal_cmd->add_option("--csv", s.csv_path, "per-draw CSV dump");
  extremal_cmd->add_flag("--duality", s.duality, "also report duality residuals");

  CLI::App* zeta_cmd = sub(&app, "zeta", "non-abelian zeta over Q");
  zeta_cmd->require_subcommand(0, 1);
  zeta_cmd->add_option("--rank", s.rank, "1 or 2")->capture_default_str();
  zeta_cmd->add_option("--s", s.s, "argument, e.g. 2 or 0.5+14.13i")->capture_default_str();
  zeta_cmd->add_option("--grid", s.grid, "rank-2 quadrature orders <x>x<y>x<t>");
  add_tol_option(zeta_cmd, s, "target error");
  zeta_cmd->add_option("--method", s.method, "quadrature | monte-carlo | direct")->capture_default_str();
  zeta_cmd->add_option("--samples", s.mc_samples, "Monte Carlo samples")->capture_default_str();
  zeta_cmd->add_option("--seed", s.seed, "Monte Carlo seed")->capture_default_str();
  zeta_cmd->add_option("--t-max", s.t_max, "covolume truncation (0: automatic)")->capture_default_str();
  CLI::App* residues_cmd = sub(zeta_cmd, "residues", "residues at s = 1 and s = 0");
  residues_cmd->add_option("--offset", s.h, "initial offset from the pole")->capture_default_str();
  residues_cmd->add_option("--levels", s.levels, "extrapolation levels")->capture_default_str();
  CLI::App* strip_cmd = sub(zeta_cmd, "strip", "CSV of the zeta over the critical strip");
  strip_cmd->add_option("--sigma-steps", s.sigma_steps, "interior real parts")->capture_default_str();
  strip_cmd->add_option("--t-from", s.t_from, "first imaginary part")->capture_default_str();
  strip_cmd->add_option("--t-to", s.t_to, "last imaginary part")->capture_default_str();
  strip_cmd->add_option("--t-steps", s.t_steps, "imaginary parts")->capture_default_str();
  strip_cmd->add_option("--csv", s.csv_path, "output file (default: the report stream)");

  CLI::App* selftest_cmd = sub(&app, "selftest", "run the acceptance suite");
  selftest_cmd->add_option("--only", s.only, "criterion ids")->delimiter(',');

  std::string command;
  Json inputs;
  const auto start = std::chrono::steady_clock::now();
  const auto finish = [&](Outcome o) {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ofstream file;
    if (!s.out_path.empty()) {
      file.open(s.out_path);
      if (!file) {
        err << "error: cannot write '" << s.out_path << "'\n";
        return static_cast<int>(kUsage);
      }
    }
    std::ostream& dest = s.out_path.empty() ? out : file;
    if (s.json) {
      Json report;
      report["command"] = command;
      report["inputs"] = inputs;
      report["result"] = o.result;
      report["exit_code"] = o.code;
      report["wall_time_s"] = wall;
      dest << report.dump(2) << '\n';
    } else {
      dest << (o.text.empty() ? render_plain(o.result) : o.text);
    }
    return o.code;
  };
  const auto fail = [&](int code, std::string_view kind, const std::string& message) {
    err << "error: " << kind << ": " << message << '\n';
    if (!s.json) return code;
    Outcome o;
    o.code = code;
    o.result["error"] = Json{{"code", kind}, {"message", message}};
    return finish(std::move(o));
  };

  try {
    // config file: may name the command, unknown keys are rejected
    std::vector<std::string> args(argv, argv + argc);
    std::vector<std::pair<std::string, std::string>> config;
    for (std::size_t i = 1; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) config = read_config(args[i + 1]);
      if (args[i].rfind("--config=", 0) == 0) config = read_config(args[i].substr(9));
    }
    for (const auto& [key, value] : config)
      if (key == "command") {
        bool has_command = false;
        for (std::size_t i = 1; i < args.size(); ++i) has_command = has_command || app.get_subcommand_no_throw(args[i]);
        std::istringstream words(value);
        std::vector<std::string> tokens{std::istream_iterator<std::string>(words), {}};
        if (!has_command) args.insert(args.begin() + 1, tokens.begin(), tokens.end());
      }
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    try {
      app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
      return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
      err << "error: usage: " << e.what() << '\n';
      return kUsage;
    }
    const std::vector<CLI::App*> chain = selected_chain(app);
    command = command_path(chain);
    for (const auto& [key, value] : config)
      if (key == "command") {
        std::istringstream words(value);
        std::string joined, w;
        while (words >> w) joined += (joined.empty() ? "" : " ") + w;
        if (joined != command) throw UsageError("config names command '" + joined + "' but '" + command + "' was given");
      }
    apply_config(config, chain);
    inputs = echo_inputs(chain);
    if (s.threads < 0) throw UsageError("--threads must be >= 0");
    if (s.threads > 0) set_thread_count(s.threads);

    Inputs in{s, std::nullopt};
    for (CLI::App* c : chain)
      if (const CLI::Option* f = c->get_option_no_throw("--field"); f && f->count() > 0)
        in.field = FieldSpec::parse(s.field);

    const CLI::App* leaf = chain.back();
    Outcome o;
    if (leaf == field_cmd) o = cmd_field(in);
    else if (leaf == h0_cmd) o = cmd_theta(in, false);
    else if (leaf == h1_cmd) o = cmd_theta(in, true);
    else if (leaf == rr_cmd) o = cmd_rr(in);
    else if (leaf == hn_cmd) o = cmd_hn(in);
    else if (leaf == ss_cmd) o = cmd_semistable(in);
    else if (leaf == probe_cmd) o = cmd_vanish_probe(in);
    else if (leaf == bounds_cmd) o = cmd_vanish_bounds(in);
    else if (leaf == extremal_cmd) o = cmd_moduli(in);
    else if (leaf == zeta_cmd) o = cmd_zeta(in);
    else if (leaf == residues_cmd) o = cmd_zeta_residues(in);
    else if (leaf == strip_cmd) o = cmd_zeta_strip(in);
    else if (leaf == selftest_cmd) o = cmd_selftest(in, out);
    else throw UsageError("no command given");
    return finish(std::move(o));
  } catch (const UsageError& e) {
    return fail(kUsage, "usage", e.what());
  } catch (const Error& e) {
    return fail(exit_code_for(e.code()), to_string(e.code()), e.what());
  } catch (const std::exception& e) {
    return fail(kUsage, "internal", e.what());
  }
}

}  // namespace arcoh::cli
