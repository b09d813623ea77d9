#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "blochlab/bloch/functions.hpp"
#include "blochlab/certify/certify.hpp"
#include "blochlab/core/errors.hpp"
#include "blochlab/core/interval_traits.hpp"
#include "blochlab/core/parallel.hpp"
#include "blochlab/martingale/martingale.hpp"
#include "blochlab/spectra/spectra.hpp"
#include "blochlab/transforms/transforms.hpp"

#ifndef BLOCHLAB_VERSION
#define BLOCHLAB_VERSION "0.0.0"
#endif

namespace blochlab::cli {
namespace {

using nlohmann::json;
using core::BlochFunction;
using core::Complex;

constexpr int kSchemaVersion = 1;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string function;
  std::string method;
  std::string r;
  std::string h;
  double R = 0.0;
  bool R_set = false;
  int n = 2;
  int depth = 3;
  std::string tau = "1";
  double tol = 0.0;
  bool tol_set = false;
  int budget = 0;
  bool budget_set = false;
  std::uint64_t seed = 0;
  long precision = 0;
  int threads = 1;
  int grid = 0;
  bool normalized = false;
  std::string out;
};

std::string g17(double x) { return core::format_endpoint(x); }

double parse_real(const std::string& text, const char* flag) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    // Accept exact rationals such as 2/5 as well.
    try {
      return core::Rational::parse(text).to_double();
    } catch (const std::exception&) {
      throw UsageError(std::string("--") + flag + ": not a number: '" + text + "'");
    }
  }
}

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(item, flag));
  if (out.empty()) throw UsageError(std::string("--") + flag + " needs at least one value");
  return out;
}

long resolve_precision(const Config& c) {
  if (c.precision != 0) return c.precision;
  if (const char* env = std::getenv("BLOCHLAB_PRECISION")) {
    char* end = nullptr;
    const long p = std::strtol(env, &end, 10);
    if (*env == '\0' || *end != '\0') throw UsageError(std::string("BLOCHLAB_PRECISION is not an integer: ") + env);
    return p;
  }
  return core::kNativePrecision;
}

json config_json(const Config& c, const std::string& command) {
  // Thread count is left out: results do not depend on it.
  json j{{"command", command}};
  if (!c.function.empty()) j["function"] = c.function;
  if (!c.method.empty()) j["method"] = c.method;
  if (!c.r.empty()) j["r"] = c.r;
  if (!c.h.empty()) j["h"] = c.h;
  if (c.R_set) j["R"] = c.R;
  if (command == "martingale" || command == "transform") {
    j["n"] = c.n;
    j["depth"] = c.depth;
  }
  if (command == "spectrum") j["tau"] = c.tau;
  if (c.tol_set) j["tol"] = c.tol;
  if (c.budget_set) j["budget"] = c.budget;
  if (command == "alpha") j["seed"] = c.seed;
  if (c.grid != 0) j["grid"] = c.grid;
  if (c.normalized) j["normalized"] = true;
  return j;
}

json envelope(const Config& c, const std::string& command, json result) {
  return {{"version", kSchemaVersion},
          {"code_version", BLOCHLAB_VERSION},
          {"config", config_json(c, command)},
          {"result", std::move(result)}};
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write to " + path + " failed");
}

// --out base.json or base.csv: JSON always, CSV alongside for sequences.
void emit(const Config& c, const json& doc, const std::optional<std::string>& csv, std::ostream& out) {
  const std::string text = doc.dump(2) + "\n";
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::string base = c.out;
  for (const char* ext : {".json", ".csv"}) {
    const std::string e(ext);
    if (base.size() > e.size() && base.compare(base.size() - e.size(), e.size(), e) == 0) {
      base.resize(base.size() - e.size());
      break;
    }
  }
  write_file(base + ".json", text);
  if (csv) write_file(base + ".csv", *csv);
}

double tol_or(const Config& c, double fallback) {
  if (!c.tol_set) return fallback;
  if (!(c.tol > 0.0)) throw UsageError("--tol must be positive");
  return c.tol;
}

int run_certify(const Config& c, std::ostream& out, std::ostream& err) {
  certify::CertifyOptions opt;
  opt.precision = resolve_precision(c);
  opt.threads = c.threads;
  if (c.grid != 0) opt.grid = c.grid;
  const core::Rational r = core::Rational::parse(c.r.empty() ? "2/5" : c.r);
  const auto cert = certify::certify_sigma(r, opt);
  const std::string text = cert.to_json().dump(2) + "\n";
  if (c.out.empty()) {
    out << text;
  } else {
    write_file(c.out, text);
  }
  err << "certify r=" << r.to_string() << ": " << certify::to_string(cert.status);
  if (!cert.failing_component.empty()) err << " (" << cert.failing_component << ")";
  err << ", final [" << cert.final_bound.lo << ", " << cert.final_bound.hi << "]\n";
  return cert.status == certify::Status::verified ? kExitOk : kExitVerificationFailed;
}

BlochFunction require_function(const Config& c) {
  if (c.function.empty()) throw UsageError("--function is required");
  return bloch::parse_function_spec(c.function);
}

int run_variance(const Config& c, std::ostream& out) {
  const BlochFunction b = require_function(c);
  spectra::QuadratureOptions q;
  q.rel_tol = tol_or(c, q.rel_tol);
  spectra::VarianceEstimate v;
  const std::string method = c.method.empty() ? "circle" : c.method;
  if (method == "circle") {
    if (c.r.empty()) throw UsageError("variance --method circle needs --r");
    v = spectra::variance_circle(b, parse_list(c.r, "r"), q);
  } else if (method == "strip") {
    if (c.h.empty()) throw UsageError("variance --method strip needs --h");
    v = spectra::variance_strip(b, parse_list(c.h, "h"), q);
  } else {
    throw UsageError("--method must be circle or strip");
  }
  emit(c, envelope(c, "variance", spectra::to_json(v)), spectra::to_csv(v), out);
  return kExitOk;
}

Complex parse_tau(const std::string& text) {
  const auto parts = parse_list(text, "tau");
  if (parts.size() > 2) throw UsageError("--tau takes x or x,y");
  return {parts[0], parts.size() == 2 ? parts[1] : 0.0};
}

int run_spectrum(const Config& c, std::ostream& out) {
  const BlochFunction b = require_function(c);
  if (c.r.empty()) throw UsageError("spectrum needs --r");
  spectra::QuadratureOptions q;
  q.rel_tol = tol_or(c, 1e-8);
  const auto m = spectra::integral_means_run(b, parse_tau(c.tau), parse_list(c.r, "r"), c.normalized, q);
  emit(c, envelope(c, "spectrum", spectra::to_json(m)), spectra::to_csv(m), out);
  return kExitOk;
}

int run_martingale(const Config& c, std::ostream& out) {
  const BlochFunction b = bloch::parse_function_spec(c.function.empty() ? "logz" : c.function);
  martingale::MartingaleOptions opt;
  opt.threads = c.threads;
  opt.check_tol = tol_or(c, opt.check_tol);
  const double h0 = c.h.empty() ? 1e-7 * std::pow(static_cast<double>(c.n), -c.depth) : parse_real(c.h, "h");
  const auto tree = martingale::build_martingale(b, c.n, c.depth, h0, opt);

  json extremes = json::array();
  std::ostringstream csv;
  csv << "level,j,re,im,tol,local_variance\n";
  for (int level = 0; level <= c.depth; ++level) {
    const auto count = static_cast<std::int64_t>(std::llround(std::pow(c.n, level)));
    for (std::int64_t j = 0; j < count; ++j) {
      const auto& node = tree.node({level, j});
      csv << level << "," << j << "," << g17(node.value.real()) << "," << g17(node.value.imag()) << ","
          << g17(node.tol) << ",";
      if (level < c.depth) csv << g17(martingale::local_variance(tree, {level, j}));
      csv << "\n";
    }
    if (level < c.depth) {
      const auto e = martingale::variance_extremes(tree, level);
      extremes.push_back({{"level", level}, {"m", e.m}, {"M", e.M}});
    }
  }
  json result{{"tree", tree.to_json()}, {"extremes", extremes}, {"flagged", tree.flagged_count()}};
  emit(c, envelope(c, "martingale", result), csv.str(), out);
  return tree.flagged_count() == 0 ? kExitOk : kExitVerificationFailed;
}

int run_transform(const Config& c, std::ostream& out) {
  const double tol = tol_or(c, 1e-4);
  const int points = c.grid != 0 ? c.grid : 16;
  if (points < 1 || points > 100000) throw UsageError("--grid must lie in [1, 100000]");
  std::ostringstream csv;
  json result;
  bool ok = true;
  if (c.method == "bergman") {
    const BlochFunction b = require_function(c);
    if (b.domain() != core::Domain::disk) throw UsageError("bergman needs a disk function");
    const double radius = c.r.empty() ? 0.5 : parse_real(c.r, "r");
    const auto mu = transforms::mu_from_bloch(b);
    const Complex b0 = b(0.0);
    double worst = 0.0;
    csv << "index,re_z,im_z,re_value,im_value,error\n";
    for (int k = 0; k < points; ++k) {
      const Complex z = std::polar(radius, 2.0 * std::numbers::pi * k / points);
      const Complex p = transforms::bergman_project(mu, z, tol);
      const double e = std::abs(p - (b(z) - b0));
      worst = std::max(worst, e);
      csv << k << "," << g17(z.real()) << "," << g17(z.imag()) << "," << g17(p.real()) << "," << g17(p.imag()) << ","
          << g17(e) << "\n";
    }
    result = {{"kind", "bergman"}, {"max_error", worst}};
  } else if (c.method == "beurling") {
    const BlochFunction b = require_function(c);
    if (b.domain() != core::Domain::half_plane) throw UsageError("beurling needs a half-plane function");
    const double y = c.h.empty() ? 1.0 : parse_real(c.h, "h");
    const auto mu = transforms::mu_from_bloch(b);
    if (!std::isfinite(mu.bound())) throw UsageError("beurling needs a function with a declared norm");
    const double limit = 8.0 / std::numbers::pi * mu.bound() + 10.0 * tol;
    double worst = 0.0;
    csv << "index,re_z,im_z,quotient\n";
    for (int k = 0; k < points; ++k) {
      const Complex z(static_cast<double>(k) / points, y);
      const double q = transforms::beurling_quotient(mu, z, tol);
      worst = std::max(worst, q);
      csv << k << "," << g17(z.real()) << "," << g17(z.imag()) << "," << g17(q) << "\n";
    }
    ok = worst <= limit;
    result = {{"kind", "beurling"}, {"max_quotient", worst}, {"limit", limit}, {"within_limit", ok}};
  } else if (c.method == "box") {
    const BlochFunction b = require_function(c);
    const double count = std::pow(static_cast<double>(c.n), c.depth);
    if (c.n < 2 || c.depth < 0 || count > 4096) throw UsageError("box averages need n >= 2 and n^depth <= 4096");
    csv << "j,average\n";
    json values = json::array();
    for (std::int64_t j = 0; j < static_cast<std::int64_t>(count); ++j) {
      const double a = transforms::box_average(b, {c.n, j, c.depth}, tol);
      values.push_back(a);
      csv << j << "," << g17(a) << "\n";
    }
    result = {{"kind", "box_average"}, {"values", values}};
  } else if (c.method == "collar") {
    if (!c.R_set) throw UsageError("collar needs --R (the collar width S)");
    const double ratio = transforms::collar_ratio({c.n, 0, 0}, c.R);
    const transforms::NAdicBox box{c.n, 0, 0};
    result = {{"kind", "collar"}, {"ratio", ratio}, {"weighted_area", box.weighted_area()}};
    const std::string row = std::to_string(c.n) + "," + g17(c.R) + "," + g17(ratio) + "\n";
    emit(c, envelope(c, "transform", result), "n,S,ratio\n" + row, out);
    return kExitOk;
  } else {
    throw UsageError("--method must be bergman, beurling, box or collar");
  }
  emit(c, envelope(c, "transform", result), csv.str(), out);
  return ok ? kExitOk : kExitVerificationFailed;
}

int run_alpha(const Config& c, std::ostream& out) {
  if (!c.R_set) throw UsageError("alpha needs --R");
  if (c.budget_set) {
    if (c.budget < 1) throw UsageError("--budget must be >= 1");
    const auto s = spectra::alpha_sup_search(c.R, c.budget, c.seed);
    json cands = json::array();
    std::ostringstream csv;
    csv << "index,description,norm,average\n";
    for (std::size_t i = 0; i < s.candidates.size(); ++i) {
      const auto& a = s.candidates[i];
      cands.push_back({{"description", a.description}, {"norm", a.norm}, {"average", a.average}});
      csv << i << ",\"" << a.description << "\"," << g17(a.norm) << "," << g17(a.average) << "\n";
    }
    json result{{"kind", "alpha_sup"}, {"value", s.value}, {"best", s.best}, {"candidates", cands}};
    emit(c, envelope(c, "alpha", result), csv.str(), out);
    return kExitOk;
  }
  const BlochFunction b = bloch::parse_function_spec(c.function.empty() ? "poly:0,1" : c.function);
  const auto center = core::HyperbolicPoint::make(
      b.domain() == core::Domain::disk ? Complex(0.0) : Complex(0.0, 1.0), b.domain());
  const auto avg = spectra::alpha_average_run(b, center, c.R);
  json result{{"kind", "alpha_average"}, {"value", avg.value}, {"error", avg.error}, {"converged", avg.converged}};
  emit(c, envelope(c, "alpha", result), std::nullopt, out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bloch space numerics and certified bounds", "blochlab"};
  app.set_help_flag("--help", "show help");
  app.set_version_flag("--version", BLOCHLAB_VERSION);
  app.require_subcommand(1);
  Config c;

  auto common = [&c](CLI::App* sub) {
    sub->add_option("--function", c.function, "function spec, e.g. special:0.3, lacunary:2, logz, exp(special:0.3)");
    sub->add_option("--r", c.r, "radius or comma-separated radii (p/q accepted)");
    sub->add_option("--h", c.h, "height or comma-separated heights");
    sub->add_option("--R", c.R, "hyperbolic radius")->each([&c](const std::string&) { c.R_set = true; });
    sub->add_option("--n", c.n, "grid base");
    sub->add_option("--depth", c.depth, "tree depth or box level");
    sub->add_option("--tau", c.tau, "spectrum parameter x or x,y");
    sub->add_option("--tol", c.tol, "tolerance")->each([&c](const std::string&) { c.tol_set = true; });
    sub->add_option("--budget", c.budget, "candidate count")->each([&c](const std::string&) { c.budget_set = true; });
    sub->add_option("--seed", c.seed, "random seed");
    sub->add_option("--precision", c.precision, "interval precision in bits (default 53 or BLOCHLAB_PRECISION)");
    sub->add_option("--threads", c.threads, "worker threads")->check(CLI::Range(1, 256));
    sub->add_option("--out", c.out, "output path; JSON, plus CSV for sequences");
    sub->add_option("--method", c.method, "circle|strip, or bergman|beurling|box|collar");
    sub->add_option("--grid", c.grid, "scan grid (certify) or sample count (transform)");
  };
  for (const char* name : {"certify", "variance", "spectrum", "martingale", "transform", "alpha"}) {
    static const std::map<std::string, std::string> help{
        {"certify", "certify the bound on the asymptotic variance"},
        {"variance", "asymptotic variance estimates"},
        {"spectrum", "integral means spectrum estimates"},
        {"martingale", "n-adic martingale of interval averages"},
        {"transform", "Bergman and Beurling transforms, box averages, collars"},
        {"alpha", "ball averages of the squared Bloch quotient"}};
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    common(sub);
    if (std::string(name) == "spectrum") sub->add_flag("--normalized", c.normalized, "use dt/2pi instead of arclength");
  }

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o;
    std::ostringstream e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kExitOk : kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (c.threads < 1) throw UsageError("--threads must be >= 1");
    core::set_default_threads(c.threads);
    if (command == "certify") return run_certify(c, out, err);
    if (command == "variance") return run_variance(c, out);
    if (command == "spectrum") return run_spectrum(c, out);
    if (command == "martingale") return run_martingale(c, out);
    if (command == "transform") return run_transform(c, out);
    return run_alpha(c, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
  } catch (const ParseError& e) {
    err << "usage error: " << e.what() << "\n";
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitUsage;
}

}  // namespace blochlab::cli
