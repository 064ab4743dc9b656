#include "qsdlab/experiments.hpp"

#include "qsdlab/bch.hpp"
#include "qsdlab/boolean_oracle.hpp"
#include "qsdlab/continuum.hpp"
#include "qsdlab/oracle_register.hpp"
#include "qsdlab/quansdam.hpp"
#include "qsdlab/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include "format.hpp"

namespace qsd {

using Json = nlohmann::ordered_json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double parse_number(const std::string& tok) {
  if (tok == "pi") return kPi;
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (tok.empty() || end != tok.c_str() + tok.size() || !std::isfinite(v)) {
    throw std::invalid_argument("bad number '" + tok + "'");
  }
  return v;
}

}  // namespace

double parse_real_expression(const std::string& text) {
  std::string s;
  for (char ch : text) {
    if (ch != ' ' && ch != '\t') s += ch;
  }
  if (s.empty()) throw std::invalid_argument("empty expression");
  double sign = 1.0;
  std::size_t pos = 0;
  if (s[0] == '-' || s[0] == '+') {
    sign = s[0] == '-' ? -1.0 : 1.0;
    pos = 1;
  }
  double value = 1.0;
  char op = '*';
  while (true) {
    std::size_t next = s.find_first_of("*/", pos);
    const std::string tok = s.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    double v;
    try {
      v = parse_number(tok);
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("bad token '" + tok + "' in expression '" + text + "'");
    }
    value = op == '*' ? value * v : value / v;
    if (next == std::string::npos) break;
    op = s[next];
    pos = next + 1;
  }
  if (!std::isfinite(value)) throw std::invalid_argument("expression '" + text + "' is not finite");
  return sign * value;
}

OutputFormat parse_output_format(const std::string& text) {
  if (text == "csv") return OutputFormat::csv;
  if (text == "json") return OutputFormat::json;
  throw ConfigError("unknown output format '" + text + "' (expected csv or json)");
}

// ------------------------------------------------------------------ config

ExperimentConfig ExperimentConfig::parse(const std::string& text, const std::string& source) {
  ExperimentConfig cfg;
  cfg.source_ = source;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    Json j;
    try {
      j = Json::parse(text);
    } catch (const Json::parse_error& e) {
      throw ConfigError(source + ": invalid JSON: " + e.what());
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
      const auto& v = it.value();
      std::string value;
      if (v.is_string()) {
        value = v.get<std::string>();
      } else if (v.is_number_integer() || v.is_number_unsigned()) {
        value = v.dump();
      } else if (v.is_number_float()) {
        value = fmt_double(v.get<double>());
      } else if (v.is_boolean()) {
        value = v.get<bool>() ? "true" : "false";
      } else if (v.is_array()) {
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (i) value += ',';
          value += v[i].is_string() ? v[i].get<std::string>()
                   : v[i].is_number_float() ? fmt_double(v[i].get<double>())
                                            : v[i].dump();
        }
      } else {
        throw ConfigError(source + ": key '" + it.key() + "' has an unsupported value type");
      }
      cfg.entries_[it.key()] = {value, 0};
    }
    return cfg;
  }

  std::stringstream ss(text);
  std::string raw;
  int line = 0;
  while (std::getline(ss, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string content = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + " line " + std::to_string(line) + ": expected key=value, got '" +
                        content + "'");
    }
    const std::string key = trim(content.substr(0, eq));
    if (key.empty()) {
      throw ConfigError(source + " line " + std::to_string(line) + ": empty key");
    }
    if (cfg.entries_.count(key)) {
      throw ConfigError(source + " line " + std::to_string(line) + ": duplicate key '" + key + "'");
    }
    cfg.entries_[key] = {trim(content.substr(eq + 1)), line};
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  entries_[key] = {value, 0};
}

namespace {

// Typed, whitelisted access to one experiment's parameters.
class Params {
 public:
  Params(const ExperimentConfig& cfg, const std::string& experiment,
         std::set<std::string> allowed)
      : cfg_(cfg) {
    allowed.insert("seed");
    allowed.insert("experiment");
    for (const auto& [key, entry] : cfg.entries()) {
      if (!allowed.count(key)) fail(key, "unknown key for " + experiment);
    }
    if (cfg.has("experiment") && cfg.entries().at("experiment").value != experiment) {
      fail("experiment", "config is for '" + cfg.entries().at("experiment").value +
                             "', not '" + experiment + "'");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    std::string where = cfg_.source();
    const auto it = cfg_.entries().find(key);
    if (it != cfg_.entries().end() && it->second.line > 0) {
      where += " line " + std::to_string(it->second.line);
    }
    throw ConfigError(where + ", key '" + key + "': " + msg);
  }

  bool has(const std::string& key) const { return cfg_.has(key); }

  std::string str(const std::string& key, const std::string& def) const {
    return has(key) ? cfg_.entries().at(key).value : def;
  }

  double real(const std::string& key, const std::string& def) const {
    const std::string v = str(key, def);
    try {
      return parse_real_expression(v);
    } catch (const std::invalid_argument& e) {
      fail(key, e.what());
    }
  }

  long long integer(const std::string& key, long long def) const {
    if (!has(key)) return def;
    const std::string v = str(key, "");
    char* end = nullptr;
    const long long r = std::strtoll(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size()) fail(key, "expected an integer, got '" + v + "'");
    return r;
  }

  std::vector<double> reals(const std::string& key, const std::string& def) const {
    std::vector<double> out;
    for (const auto& tok : split(str(key, def), ',')) {
      try {
        out.push_back(parse_real_expression(tok));
      } catch (const std::invalid_argument& e) {
        fail(key, e.what());
      }
    }
    if (out.empty()) fail(key, "empty list");
    return out;
  }

  std::vector<long long> integers(const std::string& key, const std::string& def) const {
    std::vector<long long> out;
    for (const auto& tok : split(str(key, def), ',')) {
      char* end = nullptr;
      const long long r = std::strtoll(tok.c_str(), &end, 10);
      if (tok.empty() || end != tok.c_str() + tok.size()) {
        fail(key, "bad integer token '" + tok + "'");
      }
      out.push_back(r);
    }
    if (out.empty()) fail(key, "empty list");
    return out;
  }

  std::string choice(const std::string& key, const std::string& def,
                     const std::vector<std::string>& options) const {
    const std::string v = str(key, def);
    if (std::find(options.begin(), options.end(), v) == options.end()) {
      std::string all;
      for (const auto& o : options) all += (all.empty() ? "" : "|") + o;
      fail(key, "invalid value '" + v + "' (expected " + all + ")");
    }
    return v;
  }

  Units units() const {
    Units u;
    u.hbar = real("hbar", "1");
    u.mass = real("mass", "1");
    if (!(u.hbar > 0.0)) fail("hbar", "must be > 0");
    if (!(u.mass > 0.0)) fail("mass", "must be > 0");
    return u;
  }

  /// theta directly, or c / 2^n.
  double theta(const std::string& def) const {
    if (has("theta") && has("n")) fail("theta", "give either theta or n (with c), not both");
    if (has("n")) {
      const long long n = integer("n", 0);
      if (n < 1 || n > 60) fail("n", "must be in [1, 60]");
      return register_scaled_angle(static_cast<int>(n), real("c", "1"));
    }
    return real("theta", def);
  }

 private:
  const ExperimentConfig& cfg_;
};

// Output table; cells are JSON numbers, integers or strings.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;

  void add(std::vector<Json> row) { rows.push_back(std::move(row)); }
};

std::string cell_text(const Json& c) {
  if (c.is_string()) return c.get<std::string>();
  if (c.is_number_integer() || c.is_number_unsigned()) return c.dump();
  if (c.is_boolean()) return c.get<bool>() ? "true" : "false";
  if (c.is_null()) return "nan";
  return fmt_double(c.get<double>());
}

struct Result {
  Table table;
  Json summary = Json::object();
  bool ok = true;
  std::string message;
};

Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

ExperimentOutput render(const std::string& experiment, const ExperimentConfig& cfg,
                        std::uint64_t seed, Result r, OutputFormat format) {
  ExperimentOutput out;
  out.tolerance_ok = r.ok;
  out.message = r.message;
  if (format == OutputFormat::csv) {
    std::string text;
    for (std::size_t i = 0; i < r.table.columns.size(); ++i) {
      if (i) text += ',';
      text += r.table.columns[i];
    }
    text += '\n';
    for (const auto& row : r.table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) text += ',';
        text += cell_text(row[i]);
      }
      text += '\n';
    }
    out.text = std::move(text);
    return out;
  }
  Json j;
  j["experiment"] = experiment;
  Json params = Json::object();
  for (const auto& [k, e] : cfg.entries()) params[k] = e.value;
  j["parameters"] = params;
  j["seed"] = seed;
  j["tolerance_ok"] = r.ok;
  if (!r.message.empty()) j["message"] = r.message;
  j["summary"] = r.summary;
  j["columns"] = r.table.columns;
  Json rows = Json::array();
  for (const auto& row : r.table.rows) rows.push_back(row);
  j["rows"] = rows;
  out.text = j.dump(2) + "\n";
  return out;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  if (lx.size() < 2 || lx.size() != x.size()) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(lx.size());
  my /= static_cast<double>(lx.size());
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

void note_failure(Result& r, const std::string& msg) {
  if (r.ok) r.message = msg;
  r.ok = false;
}

// ------------------------------------------------------------- experiments

Result reference_sweep(const Params& p) {
  const double theta = p.theta("pi/64");
  const long long K = p.integer("K", 32);
  if (K < 1) p.fail("K", "K must be ≥ 1");
  if (K > 100000) p.fail("K", "K must be <= 100000");
  Axis axis;
  try {
    axis = parse_axis(p.str("axis", "x"));
  } catch (const std::invalid_argument& e) {
    p.fail("axis", e.what());
  }
  const double tol = p.real("tolerance", "1e-12");

  const StateVector zero = StateVector::basis_state(BasisTag::qudits(1, 2), 0);
  const BranchPairTrace t = reference_process(theta, static_cast<int>(K), zero, axis);
  const QsdRateReport rates = qsd_rates(t);

  Result r;
  r.table.columns = {"k", "re_rho12", "im_rho12", "abs_rho12", "cos_k_theta",
                     "delta_rho12", "delta_rho12_closed_form", "deviation"};
  double worst = 0.0;
  for (long long k = 0; k <= K; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    const Complex rho = t.overlaps[kk];
    const double d = k == 0 ? 0.0 : rates.delta_rho[kk - 1];
    const double closed = k == 0 ? 0.0 : reference_delta_rho(static_cast<int>(k) - 1, theta);
    const double dev = std::abs(d - closed);
    worst = std::max(worst, dev);
    r.table.add({k, rho.real(), rho.imag(), std::abs(rho), std::cos(k * theta), d, closed, dev});
  }
  const double final_abs = rates.abs_rho.back();
  r.summary["theta"] = theta;
  r.summary["K"] = K;
  r.summary["final_abs_rho12"] = final_abs;
  r.summary["average_rate_whole_process"] = (final_abs - rates.abs_rho.front()) / static_cast<double>(K);
  r.summary["minus_inverse_K"] = -1.0 / static_cast<double>(K);
  r.summary["discrimination_probability"] = discrimination_probability(t.overlaps.back());
  r.summary["classification"] = to_string(rates.fit.classification);
  r.summary["fitted_slope"] = num(rates.fit.slope);
  r.summary["max_deviation"] = worst;
  if (worst > tol) {
    note_failure(r, "rate deviation " + fmt_double(worst) + " exceeds tolerance " + fmt_double(tol));
  }
  return r;
}

Result qsd_sweep(const Params& p, std::uint64_t seed) {
  const double theta = p.theta("pi/256");
  const long long K = p.integer("K", 64);
  if (K < 1) p.fail("K", "K must be ≥ 1");
  if (K > 100000) p.fail("K", "K must be <= 100000");
  const long long sites = p.integer("sites", 1);
  if (sites < 1 || sites > 8) p.fail("sites", "must be in [1, 8]");
  const std::string qm = p.choice("qm", "identity", {"identity", "random"});
  const std::string initial = p.choice("initial", "basis", {"basis", "random", "per_branch"});
  BasicIcUnitary spec;
  try {
    spec.axis = parse_axis(p.str("axis", "x"));
    spec.embedding = parse_embedding(p.str("embedding", "spin"));
  } catch (const std::invalid_argument& e) {
    p.fail("axis", e.what());
  }
  spec.angle = theta;
  spec.target = static_cast<int>(p.integer("target", 0));
  if (spec.target < 0 || spec.target >= sites) p.fail("target", "outside the register");
  const double threshold = p.real("threshold", "1.85");
  const double tol = p.real("tolerance", "1e-12");

  const RegisterContext reg{static_cast<int>(sites), 2};
  const BasisTag basis = BasisTag::qudits(reg.sites, 2);
  const IcStep step(ic_generator(spec, reg), theta);
  std::vector<UnitaryMatrix> qms;
  for (long long k = 0; k <= K; ++k) {
    if (qm == "identity") {
      qms.push_back(UnitaryMatrix::identity(reg.dim()));
    } else {
      CounterRng rng(seed, static_cast<std::uint64_t>(k));
      qms.push_back(random_unitary(reg.dim(), rng));
    }
  }
  const QuansdamSchedule sched(std::move(qms),
                               std::vector<IcStep>(static_cast<std::size_t>(K), step));
  BranchPairTrace t;
  CounterRng state_rng(seed, 1u << 20);
  if (initial == "basis") {
    t = run_branches(sched, {1, -1}, StateVector::basis_state(basis, 0));
  } else if (initial == "random") {
    t = run_branches(sched, {1, -1}, random_state(basis, state_rng));
  } else {
    std::vector<StateVector> inits{random_state(basis, state_rng), random_state(basis, state_rng)};
    t = run_branches(sched, {1, -1}, inits);
  }
  const QsdRateReport rates = qsd_rates(t);

  Result r;
  r.table.columns = {"k", "re_rho12", "im_rho12", "abs_rho12", "abs_rho12_after_ic",
                     "delta_rho12", "delta_rho12_sq", "avg_rate", "per_step_rate"};
  double neutrality = 0.0;
  for (long long k = 0; k <= K; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    const Complex rho = t.overlaps[kk];
    const double after_ic = k == 0 ? std::abs(rho) : std::abs(t.post_ic_overlaps[kk - 1]);
    if (k > 0) neutrality = std::max(neutrality, std::abs(t.post_ic_overlaps[kk - 1] - rho));
    r.table.add({k, rho.real(), rho.imag(), std::abs(rho), after_ic,
                 k == 0 ? 0.0 : rates.delta_rho[kk - 1], k == 0 ? 0.0 : rates.delta_rho_sq[kk - 1],
                 rates.avg_rate[kk], k >= 2 ? rates.per_step_rate[kk - 1] : 0.0});
  }
  r.summary["classification"] = to_string(rates.fit.classification);
  r.summary["fitted_slope"] = num(rates.fit.slope);
  r.summary["fit_points"] = rates.fit.points;
  r.summary["appropriate"] = is_appropriate(rates, threshold);
  r.summary["ic_step_count"] = t.ic_step_count;
  r.summary["qm_step_count"] = t.qm_step_count;
  r.summary["physical_branch"] = t.physical_branch;
  r.summary["qm_step_neutrality"] = neutrality;
  if (neutrality > tol) {
    note_failure(r, "QM step changed the branch overlap by " + fmt_double(neutrality));
  }
  return r;
}

Result oracle_equiv(const Params& p) {
  std::vector<SearchOracleSpec> specs;
  if (p.has("spec")) {
    if (p.has("n") || p.has("x0")) p.fail("spec", "give either spec or n/x0, not both");
    try {
      specs.push_back(SearchOracleSpec::parse(p.str("spec", "")));
    } catch (const std::invalid_argument& e) {
      p.fail("spec", e.what());
    }
  } else {
    const long long n = p.integer("n", 3);
    if (n < 1) p.fail("n", "must be >= 1");
    if (n > 5) p.fail("n", "n too large for exhaustive mode (max 5)");
    if (p.has("x0")) {
      const long long x0 = p.integer("x0", 0);
      if (x0 < 0 || x0 >= (1LL << n)) p.fail("x0", "outside [0, 2^n)");
      specs.emplace_back(static_cast<int>(n), static_cast<std::uint64_t>(x0));
    } else {
      for (std::uint64_t x0 = 0; x0 < (1ULL << n); ++x0) specs.emplace_back(static_cast<int>(n), x0);
    }
  }
  if (specs.front().n > 5) p.fail("spec", "n too large for exhaustive mode (max 5)");
  const std::vector<double> thetas = p.reals("theta", "pi/3");
  const double tol = p.real("tolerance", "1e-12");

  Result r;
  r.table.columns = {"n", "x0", "theta", "bfseq_vs_usual", "usual_vs_selective_phase",
                     "selective_bfseq_vs_usual", "bfseq_vs_selective_phase", "ancilla_leakage",
                     "bfseq_product_deviation", "vf_product_deviation",
                     "non_solution_identity_deviation", "max_deviation"};
  double worst = 0.0;
  for (double theta : thetas) {
    for (const auto& spec : specs) {
      const EquivalenceReport e = oracle_equivalence(spec, theta);
      const DecompositionReport d = parallel_decomposition_check(spec, theta);
      const double m = std::max({e.max_deviation(), d.bfseq_product_deviation,
                                 d.vf_product_deviation, d.non_solution_identity_deviation});
      worst = std::max(worst, m);
      r.table.add({spec.n, spec.x0, theta, e.bfseq_vs_usual, e.usual_vs_selective_phase,
                   e.selective_bfseq_vs_usual, e.bfseq_vs_selective_phase, e.ancilla_leakage,
                   d.bfseq_product_deviation, d.vf_product_deviation,
                   d.non_solution_identity_deviation, m});
    }
  }
  r.summary["cases"] = r.table.rows.size();
  r.summary["max_deviation"] = worst;
  if (worst > tol) {
    note_failure(r, "oracle deviation " + fmt_double(worst) + " exceeds tolerance " + fmt_double(tol));
  }
  return r;
}

Result phase_quansdam(const Params& p) {
  const std::vector<double> lengths = p.reals("L", "10");
  const long long points = p.integer("points", 256);
  const long long k = p.integer("k", 0);
  const double m_z = p.real("m_z", "0.5");
  if (m_z == 0.0) p.fail("m_z", "internal eigenvalue m_z must be nonzero");
  const std::vector<double> quanta = p.reals("quanta", "0,0.25,0.5,1,1.5,2");
  const Units units = p.units();
  const double tol = p.real("tolerance", "1e-10");

  Result r;
  r.table.columns = {"L", "quanta", "p0_prime", "re_overlap", "im_overlap", "abs_overlap",
                     "sinc_limit", "amplitude_modulus_deviation"};
  double worst_lattice = 0.0, worst_modulus = 0.0;
  for (double L : lengths) {
    if (!(L > 0.0)) p.fail("L", "box length must be > 0");
    GridWavefunction psi = [&] {
      try {
        return momentum_eigenfunction(L, static_cast<int>(k), points);
      } catch (const std::invalid_argument& e) {
        p.fail("k", e.what());
      }
    }();
    for (double q : quanta) {
      // m_z p0' = q * 2 pi hbar / L.
      const double p0 = q * 2.0 * kPi * units.hbar / (L * m_z);
      const GridWavefunction plus = phase_quansdam_step(psi, p0, 1, m_z, units);
      const GridWavefunction minus = phase_quansdam_step(psi, p0, -1, m_z, units);
      const Complex ov = overlap(plus, minus);
      double mod_dev = 0.0;
      for (Index j = 0; j < points; ++j) {
        mod_dev = std::max({mod_dev, std::abs(std::abs(plus.com()(j)) - std::abs(psi.com()(j))),
                            std::abs(std::abs(minus.com()(j)) - std::abs(psi.com()(j)))});
      }
      const double phi = 2.0 * m_z * p0 * L / (2.0 * units.hbar);
      const double sinc = phi == 0.0 ? 1.0 : std::abs(std::sin(phi) / phi);
      worst_modulus = std::max(worst_modulus, mod_dev);
      if (q != 0.0 && std::floor(q) == q) worst_lattice = std::max(worst_lattice, std::abs(ov));
      r.table.add({L, q, p0, ov.real(), ov.imag(), std::abs(ov), sinc, mod_dev});
    }
  }
  r.summary["max_on_lattice_abs_overlap"] = worst_lattice;
  r.summary["max_amplitude_modulus_deviation"] = worst_modulus;
  if (worst_lattice > tol) note_failure(r, "on-lattice overlap " + fmt_double(worst_lattice) + " not zero");
  if (worst_modulus > 1e-12) note_failure(r, "amplitude moduli changed by " + fmt_double(worst_modulus));
  return r;
}

Result truncation(const Params& p) {
  const long long levels = p.integer("levels", kDefaultOscillatorLevels);
  const double L = p.real("L", "40");
  const long long points = p.integer("points", 1024);
  const double omega = p.real("omega", "1");
  const Units units = p.units();
  const std::string state = p.choice("state", "displaced", {"ground", "displaced", "eigen"});
  const double displacement = p.real("displacement", "1");
  const long long eigen_index = p.integer("eigen_index", 0);
  const long long window_start = p.integer("window_start", 0);
  const long long max_m = p.integer("max_m", 32);
  const double eps = p.real("eps", "1e-3");
  const long long poly_bound = p.integer("poly_bound", 32);
  const double tol = p.real("tolerance", "1e-10");
  if (levels < 1 || levels > 512) p.fail("levels", "must be in [1, 512]");
  if (max_m < 1 || max_m > levels) p.fail("max_m", "must be in [1, levels]");
  if (window_start < 0) p.fail("window_start", "must be >= 0");
  if (eigen_index < 0 || eigen_index >= levels) p.fail("eigen_index", "outside the basis");
  if (!(omega > 0.0)) p.fail("omega", "must be > 0");

  const Grid grid(L, points);
  std::shared_ptr<const EigenBasis> basis;
  try {
    basis = std::make_shared<const EigenBasis>(EigenBasis::harmonic(grid, levels, omega, units));
  } catch (const std::domain_error& e) {
    p.fail("points", e.what());
  }
  GridWavefunction psi = [&] {
    if (state == "eigen") return GridWavefunction(grid, basis->functions().col(eigen_index));
    const double length = std::sqrt(units.hbar / (units.mass * omega));
    GaussianPacketParams g;
    g.var = 0.5 * length * length;
    g.x = state == "ground" ? 0.0 : displacement * length;
    return gaussian_wavefunction(grid, g, units);
  }();
  const EigenbasisExpansion e = analyze(basis, psi);

  Result r;
  r.table.columns = {"M", "eps_single_side", "residual_norm", "eps_window"};
  double worst = 0.0, prev = std::numeric_limits<double>::infinity();
  bool monotone = true;
  for (long long m = 1; m <= max_m; ++m) {
    const double eps0 = truncation_error(e, 0, m);
    const Vector partial = basis->functions().leftCols(m) * e.coefficients.head(m);
    const double residual = std::sqrt(grid.dx()) * (partial - psi.com()).norm();
    const double window = truncation_error(e, window_start, m);
    worst = std::max(worst, std::abs(eps0 - residual));
    if (eps0 > prev) monotone = false;
    prev = eps0;
    r.table.add({m, eps0, residual, window});
  }
  const ConvergenceWitness w = fast_convergence_check(e, eps, poly_bound);
  r.summary["state"] = state;
  r.summary["basis_orthonormality_defect"] = basis->orthonormality_defect();
  r.summary["fast_convergent"] = w.found;
  if (w.found) {
    r.summary["witness_L"] = w.L;
    r.summary["witness_M"] = w.M;
    r.summary["witness_eps"] = w.epsilon;
  }
  r.summary["max_eps_vs_residual"] = worst;
  r.summary["monotone_in_M"] = monotone;
  if (worst > tol) note_failure(r, "truncation error differs from residual by " + fmt_double(worst));
  if (!monotone) note_failure(r, "truncation error not monotone in M");
  return r;
}

CommutatorScenario read_scenario(const Params& p, const std::string& kind) {
  CommutatorScenario sc;
  sc.kind = parse_scenario_case(kind);
  sc.K = p.real("K", "1");
  sc.omega = p.real("omega", "1");
  sc.theta = p.real("theta", "0.5");
  sc.tau = p.real("tau", "0.1");
  sc.units = p.units();
  sc.levels = p.integer("levels", 32);
  sc.box_length = p.real("L", "40");
  sc.grid_points = p.integer("points", 128);
  if (sc.levels > 256) p.fail("levels", "must be <= 256");
  if (sc.grid_points > 512) p.fail("points", "must be <= 512");
  try {
    sc.validate();
  } catch (const std::invalid_argument& e) {
    p.fail("generators", e.what());
  }
  return sc;
}

Result bch_scaling(const Params& p, std::uint64_t seed) {
  const std::string gen =
      p.choice("generators", "random", {"random", "commuting", "harmonic_trap", "free_atom"});
  const bool scenario = gen == "harmonic_trap" || gen == "free_atom";
  const std::vector<double> taus = p.reals("tau", scenario ? "0.1" : "0.2,0.1,0.05");
  const std::vector<long long> ns = p.integers("n", scenario ? "1,2,4,8,16" : "1");
  const long long pairs = scenario ? 1 : p.integer("pairs", 5);
  const long long dim = p.integer("dim", 4);
  const bool check = p.choice("check", "true", {"true", "false"}) == "true";
  if (dim < 2 || dim > 64) p.fail("dim", "must be in [2, 64]");
  if (pairs < 1 || pairs > 100) p.fail("pairs", "must be in [1, 100]");
  for (long long n : ns) {
    if (n < 1 || n > 64) p.fail("n", "repetition counts must be in [1, 64]");
  }
  for (double t : taus) {
    if (!(t > 0.0)) p.fail("tau", "must be > 0");
  }
  CommutatorScenario sc;
  if (scenario) sc = read_scenario(p, gen);

  Result r;
  r.table.columns = {"pair", "tau", "n", "defect", "fitted_slope_tau", "fitted_slope_n"};
  // defect[pair][tau][n]
  std::vector<std::vector<std::vector<double>>> defects(
      static_cast<std::size_t>(pairs),
      std::vector<std::vector<double>>(taus.size(), std::vector<double>(ns.size())));
  for (long long pr = 0; pr < pairs; ++pr) {
    std::optional<HermitianGenerator> a_fixed, b_fixed;
    if (gen == "random") {
      CounterRng ra(seed, static_cast<std::uint64_t>(2 * pr));
      CounterRng rb(seed, static_cast<std::uint64_t>(2 * pr + 1));
      a_fixed = random_hermitian(dim, ra);
      b_fixed = random_hermitian(dim, rb);
    } else if (gen == "commuting") {
      CounterRng rng(seed, static_cast<std::uint64_t>(pr));
      Matrix da = Matrix::Zero(dim, dim), db = Matrix::Zero(dim, dim);
      for (Index i = 0; i < dim; ++i) {
        da(i, i) = rng.normal();
        db(i, i) = rng.normal();
      }
      a_fixed = HermitianGenerator(da);
      b_fixed = HermitianGenerator(db);
    } else {
      b_fixed = scenario_b(sc);
    }
    for (std::size_t ti = 0; ti < taus.size(); ++ti) {
      HermitianGenerator a = a_fixed ? *a_fixed : [&] {
        CommutatorScenario s2 = sc;
        s2.tau = taus[ti];
        return scenario_a(s2, 1);
      }();
      for (std::size_t ni = 0; ni < ns.size(); ++ni) {
        defects[static_cast<std::size_t>(pr)][ti][ni] =
            trotter_repeat(a, *b_fixed, taus[ti], static_cast<int>(ns[ni])).defect;
      }
    }
  }
  double max_defect = 0.0;
  std::vector<double> tau_slopes, n_slopes;
  for (long long pr = 0; pr < pairs; ++pr) {
    const auto& d = defects[static_cast<std::size_t>(pr)];
    std::vector<double> slope_tau(ns.size()), slope_n(taus.size());
    for (std::size_t ni = 0; ni < ns.size(); ++ni) {
      std::vector<double> ys;
      for (std::size_t ti = 0; ti < taus.size(); ++ti) ys.push_back(d[ti][ni]);
      slope_tau[ni] = fit_slope(taus, ys);
      if (taus.size() >= 2) tau_slopes.push_back(slope_tau[ni]);
    }
    std::vector<double> nd(ns.begin(), ns.end());
    for (std::size_t ti = 0; ti < taus.size(); ++ti) {
      slope_n[ti] = fit_slope(nd, d[ti]);
      if (ns.size() >= 2) n_slopes.push_back(slope_n[ti]);
    }
    for (std::size_t ti = 0; ti < taus.size(); ++ti) {
      for (std::size_t ni = 0; ni < ns.size(); ++ni) {
        max_defect = std::max(max_defect, d[ti][ni]);
        r.table.add({pr, taus[ti], ns[ni], d[ti][ni], num(slope_tau[ni]), num(slope_n[ti])});
      }
    }
  }
  r.summary["generators"] = gen;
  r.summary["max_defect"] = max_defect;
  if (check) {
    if (gen == "commuting" && max_defect > 1e-12) {
      note_failure(r, "commuting generators gave defect " + fmt_double(max_defect));
    }
    if (gen == "random") {
      for (double s : tau_slopes) {
        if (!(std::abs(s - 3.0) <= 0.3)) note_failure(r, "tau slope " + fmt_double(s) + " outside 3 +- 0.3");
      }
    }
    if (scenario) {
      for (double s : n_slopes) {
        if (!(std::abs(s + 1.0) <= 0.2)) note_failure(r, "n slope " + fmt_double(s) + " outside -1 +- 0.2");
      }
    }
  }
  return r;
}

Result gaussian_overlap_check(const Params& p, std::uint64_t seed) {
  const long long cases = p.integer("cases", 10);
  const double L = p.real("L", "80");
  const long long points = p.integer("points", 4096);
  const Units units = p.units();
  const double tol = p.real("tolerance", "1e-6");
  if (cases < 1 || cases > 1000) p.fail("cases", "must be in [1, 1000]");
  if (points < 64 || points > (1 << 20)) p.fail("points", "must be in [64, 2^20]");

  const Grid grid(L, points);
  Result r;
  r.table.columns = {"case", "x1", "p1", "var1", "T1", "x2", "p2", "var2", "T2",
                     "closed_form", "quadrature", "deviation"};
  double worst = 0.0;
  for (long long c = 0; c < cases; ++c) {
    CounterRng rng(seed, static_cast<std::uint64_t>(c));
    auto draw = [&] {
      GaussianPacketParams g;
      g.x = -2.0 + 4.0 * rng.uniform();
      g.p = -1.0 + 2.0 * rng.uniform();
      g.var = 0.5 + 1.5 * rng.uniform();
      g.T = -2.0 + 4.0 * rng.uniform();
      return g;
    };
    const GaussianPacketParams g1 = draw();
    const GaussianPacketParams g2 = draw();
    const double closed = gaussian_overlap(g1, g2, units);
    const double quad = std::abs(overlap(gaussian_wavefunction(grid, g1, units),
                                         gaussian_wavefunction(grid, g2, units)));
    const double dev = std::abs(closed - quad);
    worst = std::max(worst, dev);
    r.table.add({c, g1.x, g1.p, g1.var, g1.T, g2.x, g2.p, g2.var, g2.T, closed, quad, dev});
  }
  r.summary["max_deviation"] = worst;
  if (worst > tol) note_failure(r, "closed form differs from quadrature by " + fmt_double(worst));
  return r;
}

Result useq_defect_experiment(const Params& p) {
  const std::string mode = p.choice("mode", "diagonal", {"diagonal", "trotter"});
  const double tol = p.real("tolerance", "1e-12");
  Result r;
  r.table.columns = {"mode", "n", "logical_value", "defect", "defect_up_to_phase"};
  if (mode == "diagonal") {
    const std::vector<double> h = p.reals("h", "0.7,-0.2,0.4,-0.9");
    if (h.size() != 4) p.fail("h", "diagonal synthesis needs exactly 4 entries");
    const double t_m = p.real("t_m", "0.3");
    const RealVector hv = Eigen::Map<const RealVector>(h.data(), 4);
    const HermitianGenerator hg(hv.cast<Complex>().asDiagonal().toDenseMatrix());
    const bool traceless = std::abs(hv.sum()) <= 1e-15;
    double worst = 0.0;
    for (int a : {1, -1}) {
      const UnitaryMatrix useq = useq_assemble(diagonal_useq_steps(hv, t_m, a));
      const UseqDefect d = useq_defect(useq, ic_propagator(hg, t_m, a), a);
      worst = std::max(worst, traceless ? d.defect : d.defect_up_to_phase);
      r.table.add({mode, 0, a, d.defect, d.defect_up_to_phase});
    }
    r.summary["traceless"] = traceless;
    r.summary["max_defect"] = worst;
    if (worst > tol) note_failure(r, "diagonal USEQ defect " + fmt_double(worst));
    return r;
  }
  const CommutatorScenario sc = read_scenario(p, p.choice("generators", "harmonic_trap",
                                                          {"harmonic_trap", "free_atom"}));
  const std::vector<long long> ns = p.integers("n", "1,2,4,8,16");
  const Index d = sc.com_dim();
  const Spectrum b(scenario_b(sc));
  const Matrix h = kron(scenario_position(sc), spin_operator(Axis::z));
  const HermitianGenerator hg(h);
  const double t_m = sc.theta * sc.tau * sc.K;
  bool monotone = true;
  for (int a : {1, -1}) {
    double prev = std::numeric_limits<double>::infinity();
    for (long long n : ns) {
      if (n < 1 || n > 64) p.fail("n", "repetition counts must be in [1, 64]");
      BasicIcUnitary spec;
      spec.axis = Axis::y;
      spec.angle = sc.theta / static_cast<double>(n);
      spec.logical_value = a;
      const UnitaryMatrix ea = tensor(UnitaryMatrix::identity(d), basic_ic_unitary(spec, {1, 2}));
      const UnitaryMatrix eb = b.exp(sc.tau / static_cast<double>(n));
      // QM factors exp(-+iB tau/n) alternate with the basic IC factors.
      std::vector<UnitaryMatrix> steps;
      for (long long rep = 0; rep < n * n; ++rep) {
        steps.push_back(eb.adjoint());
        steps.push_back(ea.adjoint());
        steps.push_back(eb);
        steps.push_back(ea);
      }
      const UseqDefect dd = useq_defect(useq_assemble(steps),
                                        ic_propagator(hg, t_m, a, sc.units), a);
      if (dd.defect > prev) monotone = false;
      prev = dd.defect;
      r.table.add({mode, n, a, dd.defect, dd.defect_up_to_phase});
    }
  }
  r.summary["monotone_in_n"] = monotone;
  if (!monotone) note_failure(r, "USEQ defect not monotone in n");
  return r;
}

}  // namespace

std::vector<std::string> experiment_names() {
  return {"reference-sweep", "qsd-sweep",     "oracle-equiv",           "phase-quansdam",
          "truncation",      "bch-scaling",   "gaussian-overlap-check", "useq-defect"};
}

OutputFormat default_format(const std::string& experiment) {
  return experiment == "oracle-equiv" ? OutputFormat::json : OutputFormat::csv;
}

ExperimentOutput run_experiment(const std::string& experiment, const ExperimentConfig& config,
                                OutputFormat format, std::optional<std::uint64_t> seed_override) {
  static const std::map<std::string, std::set<std::string>> allowed = {
      {"reference-sweep", {"theta", "n", "c", "K", "axis", "tolerance"}},
      {"qsd-sweep",
       {"theta", "n", "c", "K", "sites", "qm", "initial", "axis", "embedding", "target",
        "threshold", "tolerance"}},
      {"oracle-equiv", {"n", "x0", "spec", "theta", "tolerance"}},
      {"phase-quansdam", {"L", "points", "k", "m_z", "quanta", "hbar", "mass", "tolerance"}},
      {"truncation",
       {"levels", "L", "points", "omega", "hbar", "mass", "state", "displacement", "eigen_index",
        "window_start", "max_m", "eps", "poly_bound", "tolerance"}},
      {"bch-scaling",
       {"generators", "tau", "n", "pairs", "dim", "check", "K", "omega", "theta", "levels", "L",
        "points", "hbar", "mass"}},
      {"gaussian-overlap-check", {"cases", "L", "points", "hbar", "mass", "tolerance"}},
      {"useq-defect",
       {"mode", "h", "t_m", "n", "generators", "K", "omega", "theta", "tau", "levels", "L",
        "points", "hbar", "mass", "tolerance"}},
  };
  const auto it = allowed.find(experiment);
  if (it == allowed.end()) throw ConfigError("unknown experiment '" + experiment + "'");
  Params p(config, experiment, it->second);

  std::uint64_t seed = 0;
  if (seed_override) {
    seed = *seed_override;
  } else if (config.has("seed")) {
    const long long s = p.integer("seed", 0);
    if (s < 0) p.fail("seed", "must be >= 0");
    seed = static_cast<std::uint64_t>(s);
  }

  Result r;
  if (experiment == "reference-sweep") r = reference_sweep(p);
  else if (experiment == "qsd-sweep") r = qsd_sweep(p, seed);
  else if (experiment == "oracle-equiv") r = oracle_equiv(p);
  else if (experiment == "phase-quansdam") r = phase_quansdam(p);
  else if (experiment == "truncation") r = truncation(p);
  else if (experiment == "bch-scaling") r = bch_scaling(p, seed);
  else if (experiment == "gaussian-overlap-check") r = gaussian_overlap_check(p, seed);
  else r = useq_defect_experiment(p);
  return render(experiment, config, seed, std::move(r), format);
}

}  // namespace qsd
