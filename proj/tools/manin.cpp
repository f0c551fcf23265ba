// Command line front end. Configuration comes from --config (JSON) with
// flag overrides; MANIN_CACHE_DIR overrides the cache directory of the file
// and --cache-dir overrides both.
//
// Exit codes: 0 ok, 2 invalid configuration, 3 budget exceeded,
// 4 invariant violation or any other internal failure.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "manin/error.hpp"
#include "manin/harness.hpp"
#include "manin/heightzeta.hpp"
#include "manin/nslattice.hpp"
#include "manin/projline.hpp"
#include "manin/secenum.hpp"
#include "manin/sieve.hpp"

using namespace manin;
using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitBudget = 3;
constexpr int kExitInvariant = 4;

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::NonPrime:
    case ErrorCode::ReducibleModulus:
    case ErrorCode::UnsupportedSize:
    case ErrorCode::FieldTooSmall:
    case ErrorCode::CoincidentFirstCoords:
    case ErrorCode::CoincidentSecondCoords:
    case ErrorCode::OnBidegreeCurve:
    case ErrorCode::NotNef:
    case ErrorCode::DegenerateInput:
      return kExitConfig;
    case ErrorCode::BudgetExceeded:
      return kExitBudget;
    default:
      return kExitInvariant;
  }
}

std::vector<std::string> split(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);) out.push_back(item);
  return out;
}

std::vector<long long> split_ints(const std::string& s, std::size_t expected, const char* what) {
  std::vector<long long> out;
  for (const auto& item : split(s)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoll(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidConfig, std::string(what) + ": '" + item + "' is not an integer");
    }
  }
  if (expected && out.size() != expected)
    throw Error(ErrorCode::InvalidConfig, std::string(what) + " needs " + std::to_string(expected) + " entries");
  return out;
}

KVector parse_k(const std::string& s) {
  const auto v = split_ints(s, 4, "--k");
  KVector k{};
  for (int i = 0; i < 4; ++i) {
    if (v[i] < 0) throw Error(ErrorCode::InvalidConfig, "--k entries must be >= 0");
    k[i] = int(v[i]);
  }
  return k;
}

// Flag overrides, applied on top of the config file's JSON.
struct Overrides {
  std::string config_path;
  std::optional<int> p, n, d_max, sieve_D, euler_N, m_max, threads, bound_threshold;
  std::optional<std::string> modulus, points, epsilon, cache_dir, alpha, formats, output_dir;
  std::optional<std::uint64_t> budget;
  bool allow_degenerate = false;

  RunConfig resolve() const {
    json j = json::object();
    if (!config_path.empty()) j = RunConfig::from_file(config_path).to_json();
    if (const char* env = std::getenv(kCacheDirEnv); env && *env) j["cache_dir"] = env;
    if (p) j["field"]["p"] = *p;
    if (n) j["field"]["n"] = *n;
    if (modulus) j["field"]["modulus"] = split_ints(*modulus, 0, "--modulus");
    if (points) j["points"] = split(*points);
    if (allow_degenerate) j["allow_degenerate"] = true;
    if (epsilon) j["epsilon"] = *epsilon;
    if (d_max) j["d_max"] = *d_max;
    if (sieve_D) j["sieve_D"] = *sieve_D;
    if (euler_N) j["euler_N"] = *euler_N;
    if (m_max) j["limit_m_max"] = *m_max;
    if (budget) j["budget"] = *budget;
    if (cache_dir) j["cache_dir"] = *cache_dir;
    if (alpha) j["alpha_normalization"] = *alpha;
    if (formats) j["formats"] = split(*formats);
    if (output_dir) j["output_dir"] = *output_dir;
    if (threads) j["threads"] = *threads;
    if (bound_threshold) j["bound_threshold"] = *bound_threshold;
    return RunConfig::from_json(j);
  }
};

int cmd_field_check(const RunConfig& cfg, int zeta_N) {
  const Field F = Field::make(cfg.p, cfg.n, cfg.modulus);
  const ProjectiveLine P(F);
  const auto rep = P.zeta_p1_identity_check(zeta_N);
  std::cout << F.describe() << "\n";
  std::cout << "zeta identity through t^" << rep.checked_through << ": " << (rep.ok ? "ok" : "MISMATCH")
            << " (explicit enumeration through degree " << rep.enumerated_through << ")\n";
  for (int d = 1; d <= std::min(zeta_N, 6); ++d)
    std::cout << "closed points of degree " << d << ": " << P.count_closed_points(d).get_str() << "\n";
  return rep.ok ? kExitOk : kExitInvariant;
}

int cmd_cone(const RunConfig& cfg) {
  const auto sig = gram_signature();
  std::cout << "(-1)-classes: " << minus_one_classes().size() << "\n";
  std::cout << "conic classes: " << conic_classes().size() << "\n";
  std::cout << "Gram signature: (" << sig.positive << "," << sig.negative << ")\n";
  std::cout << "(-K)^2 = " << intersect(anticanonical(), anticanonical()) << "\n";
  std::cout << "nef cone volume (h <= 1): " << rational_string(nef_cone_volume(1)) << "\n";
  std::cout << "shrunken cone volume (eps = " << rational_string(cfg.epsilon)
            << "): " << rational_string(shrunken_cone_volume(cfg.epsilon, 1)) << "\n";
  const ShrunkenCone cone(cfg.epsilon);
  std::cout << "d,nef_points,shrunken_points\n";
  for (int d = 0; d <= cfg.d_max; ++d)
    std::cout << d << "," << count_nef_points(d).get_str() << "," << enumerate_nef_points(d, cone).size() << "\n";
  return kExitOk;
}

int cmd_markings(const std::string& cls) {
  const auto& ms = enumerate_markings();
  std::cout << "markings: " << ms.size() << "\n";
  if (cls.empty()) {
    for (std::size_t i = 0; i < ms.size(); ++i) {
      std::cout << i << ": f=" << ms[i].f.to_string() << " f'=" << ms[i].f_prime.to_string();
      for (int j = 0; j < 4; ++j) std::cout << " e" << j + 1 << "=" << ms[i].e[j].to_string();
      std::cout << "\n";
    }
    return kExitOk;
  }
  const auto v = split_ints(cls, 6, "--class");
  CurveClass alpha;
  for (int i = 0; i < 6; ++i) alpha.c[i] = v[i];
  if (!is_nef(alpha)) throw Error(ErrorCode::NotNef, alpha.to_string());
  const auto ch = choose_marking(alpha);
  std::cout << "class " << alpha.to_string() << " h=" << alpha.h() << "\n";
  std::cout << "marking " << ch.index << " min slack " << ch.min_slack << " coordinates a=" << ch.coords.a
            << " a'=" << ch.coords.a_prime << " k=(" << ch.coords.k[0] << "," << ch.coords.k[1] << ","
            << ch.coords.k[2] << "," << ch.coords.k[3] << ")\n";
  return kExitOk;
}

int cmd_count(const RunConfig& cfg, int a, int a_prime, const std::string& k_text, const std::string& strategy) {
  const SectionCounter counter(cfg.surface(), cfg.budget);
  const KVector k = parse_k(k_text);
  CountStrategy s = CountStrategy::Bucket;
  if (strategy == "raw") {
    s = CountStrategy::Raw;
  } else if (strategy != "bucket") {
    throw Error(ErrorCode::InvalidConfig, "--strategy must be bucket or raw");
  }
  const auto sections = counter.count_sections(a, a_prime, k, s);
  std::cout << counter.config().describe() << "\n";
  std::cout << "a=" << a << " a'=" << a_prime << " k=" << k_text << "\n";
  std::cout << "sections " << sections << "\n";
  std::cout << "morphisms " << counter.count_morphisms(a, a_prime, k) << "\n";
  return kExitOk;
}

int cmd_sieve(const RunConfig& cfg, int a, int a_prime, const std::string& k_text, const std::string& lattice) {
  const SectionCounter counter(cfg.surface(), cfg.budget);
  const KVector k = parse_k(k_text);
  LatticeKind kind = LatticeKind::Extended;
  if (lattice == "listed") {
    kind = LatticeKind::Listed;
  } else if (lattice != "extended") {
    throw Error(ErrorCode::InvalidConfig, "--lattice must be extended or listed");
  }
  const QLattice& L = QLattice::of(kind);
  std::cout << "D,terms,sieve_sum,prediction,actual,I\n";
  std::string actual = "over_budget";
  try {
    actual = std::to_string(counter.count_sections(a, a_prime, k));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::BudgetExceeded) throw;
  }
  for (int D = 0; D <= cfg.sieve_D; ++D) {
    const SievePrediction pr = sieve_prediction(L, counter, a, a_prime, k, D);
    const SieveSum s = sieve_sum(L, counter, k, D);
    std::cout << D << "," << s.terms << "," << rational_string(s.value) << "," << rational_string(pr.value) << ","
              << actual << "," << pr.I << "\n";
  }
  return kExitOk;
}

int cmd_zeta(const RunConfig& cfg, const std::string& orders_text) {
  const auto v = split_ints(orders_text, 4, "--orders");
  Exponent orders{};
  for (int i = 0; i < 4; ++i) orders[i] = int(v[i]);
  const long long q = Field::make(cfg.p, cfg.n, cfg.modulus).q();
  const auto series = euler_product(q, cfg.euler_N, orders);
  const auto chk = log_derivative_check(q, cfg.euler_N, orders);
  std::cout << series_to_json(series) << "\n";
  std::cerr << "log-derivative check: " << (chk.agrees ? "ok" : "MISMATCH") << "\n";
  return chk.agrees ? kExitOk : kExitInvariant;
}

int cmd_tamagawa(const RunConfig& cfg, bool exact) {
  const long long q = Field::make(cfg.p, cfg.n, cfg.modulus).q();
  const auto rep = tamagawa(q, cfg.euler_N);
  std::cout << "N,tau,relative_increment" << (exact ? ",exact" : "") << "\n";
  for (int n = 1; n <= rep.N; ++n) {
    const BigFraction& v = rep.partial[n - 1];
    std::string inc;
    if (n > 1) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.6e", ((v - rep.partial[n - 2]) / v).abs().to_double());
      inc = buf;
    }
    char val[64];
    std::snprintf(val, sizeof val, "%.15g", v.to_double());
    std::cout << n << "," << val << "," << inc;
    if (exact) std::cout << "," << v.to_string();
    std::cout << "\n";
  }
  return kExitOk;
}

int cmd_limit(const RunConfig& cfg) {
  const long long q = Field::make(cfg.p, cfg.n, cfg.modulus).q();
  const auto rep = limit_formula_check(q, cfg.euler_N, cfg.limit_m_max);
  std::cout << "m,t,gap\n";
  for (int m = 1; m <= rep.m_max; ++m) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6e", rep.gaps[m - 1]);
    std::cout << m << ",1-2^-" << m << "," << buf << "\n";
  }
  std::cerr << "gaps decreasing over m = 2.." << rep.m_max << ": " << (rep.gaps_decreasing ? "yes" : "no") << "\n";
  return kExitOk;
}

int cmd_manin(const RunConfig& cfg) {
  CountStats st;
  CountReport rep = counting_function(cfg, &st);
  asymptotic_report(cfg, rep);
  const auto files = emit(cfg, rep);
  std::fprintf(stderr, "classes %zu, cache hits %zu, computed %zu, counting stage %.3f s\n", st.classes,
               st.cache_hits, st.computed, st.counting_seconds);
  for (const auto& f : files) std::cerr << "wrote " << f.string() << "\n";
  std::cerr << rep.q_epsilon_vs_C << "\n";
  return rep.partial ? kExitBudget : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rational curves on a split quartic del Pezzo surface over F_q(t): counts, sieve and Euler products"};
  app.require_subcommand(1);
  app.fallthrough();

  Overrides o;
  app.add_option("-c,--config", o.config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--p", o.p, "field characteristic");
  app.add_option("--n", o.n, "extension degree");
  app.add_option("--modulus", o.modulus, "monic modulus, coefficients low to high, comma separated");
  app.add_option("--points", o.points, "x1,y1,...,x4,y4 (field element index or inf)");
  app.add_flag("--allow-degenerate", o.allow_degenerate, "accept points on a (1,1)-curve");
  app.add_option("--epsilon", o.epsilon, "shrunken cone parameter, a rational");
  app.add_option("--d-max", o.d_max, "largest anticanonical degree");
  app.add_option("--sieve-D", o.sieve_D, "codimension excess kept in sieve sums");
  app.add_option("--euler-N", o.euler_N, "closed point degree cutoff of Euler products");
  app.add_option("--m-max", o.m_max, "largest m in the limit check, t = 1 - 2^-m");
  app.add_option("--budget", o.budget, "operation budget per histogram");
  app.add_option("--cache-dir", o.cache_dir, "cache directory (overrides MANIN_CACHE_DIR)");
  app.add_option("--alpha", o.alpha, "volume | volume_times_rho | volume_times_rho_factorial");
  app.add_option("--formats", o.formats, "csv,json");
  app.add_option("--output-dir", o.output_dir, "report directory");
  app.add_option("--threads", o.threads, "worker threads, 0 for all cores");
  app.add_option("--bound-threshold", o.bound_threshold, "rows below this degree are not flagged");

  int zeta_N = 12;
  auto* field_check = app.add_subcommand("field-check", "field tables and the zeta function of P^1");
  field_check->add_option("--zeta-N", zeta_N, "check through t^N");

  auto* cone = app.add_subcommand("cone", "lattice, cone volumes and nef point counts");

  std::string cls;
  auto* markings = app.add_subcommand("markings", "list markings or choose one for a class");
  markings->add_option("--class", cls, "c0,...,c5 in the basis F, F', E1..E4");

  int a = 1, a_prime = 1;
  std::string k_text = "0,0,0,0", strategy = "bucket", lattice = "extended", orders = "1,1,1,1";
  auto* count = app.add_subcommand("count", "count section pairs and morphisms of one class");
  count->add_option("--a", a)->required();
  count->add_option("--a-prime", a_prime)->required();
  count->add_option("--k", k_text, "k1,k2,k3,k4");
  count->add_option("--strategy", strategy, "bucket | raw");

  auto* sieve = app.add_subcommand("sieve", "truncated sieve sums against the actual count");
  sieve->add_option("--a", a)->required();
  sieve->add_option("--a-prime", a_prime)->required();
  sieve->add_option("--k", k_text, "k1,k2,k3,k4");
  sieve->add_option("--lattice", lattice, "extended | listed");

  auto* zeta = app.add_subcommand("zeta", "truncated Euler product of the height zeta function (JSON)");
  zeta->add_option("--orders", orders, "truncation order in t1..t4");

  bool exact = false;
  auto* tama = app.add_subcommand("tamagawa", "partial products of the Tamagawa number");
  tama->add_flag("--exact", exact, "also print exact values");

  auto* limit = app.add_subcommand("limit-check", "regularized limit of prod (1 - t_i) Z(t)");
  auto* manin = app.add_subcommand("manin", "count N(d), N_eps(d) and compare with the leading term");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    const RunConfig cfg = o.resolve();
    Field::make(cfg.p, cfg.n, cfg.modulus);  // reject a bad field before any work
    if (field_check->parsed()) return cmd_field_check(cfg, zeta_N);
    if (cone->parsed()) return cmd_cone(cfg);
    if (markings->parsed()) return cmd_markings(cls);
    if (count->parsed()) return cmd_count(cfg, a, a_prime, k_text, strategy);
    if (sieve->parsed()) return cmd_sieve(cfg, a, a_prime, k_text, lattice);
    if (zeta->parsed()) return cmd_zeta(cfg, orders);
    if (tama->parsed()) return cmd_tamagawa(cfg, exact);
    if (limit->parsed()) return cmd_limit(cfg);
    if (manin->parsed()) return cmd_manin(cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvariant;
  }
  return kExitInvariant;
}
