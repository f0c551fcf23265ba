#include "manin/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <unistd.h>
#include <zlib.h>

#include "manin/error.hpp"
#include "manin/heightzeta.hpp"
#include "manin/nslattice.hpp"

namespace manin {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

[[noreturn]] void bad_config(const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); }

mpz_class ipow(long long base, unsigned long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base), e);
  return r;
}

std::string coord_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  bad_config("point coordinate must be a string or an integer");
}

P1Point parse_coord(const Field& F, const std::string& s) {
  if (s == "inf" || s == "infinity") return P1Point::infinity();
  std::size_t used = 0;
  long long v = -1;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    bad_config("point coordinate '" + s + "'");
  }
  if (used != s.size() || v < 0 || v >= F.q()) bad_config("point coordinate '" + s + "' is not in 0.." + std::to_string(F.q() - 1));
  return P1Point::affine(F.element(int(v)));
}

template <class T>
T get_as(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    bad_config(std::string("key '") + key + "': " + e.what());
  }
}

}  // namespace

std::string rational_string(const mpq_class& value) {
  mpq_class x = value;
  x.canonicalize();
  if (x.get_den() == 1) return x.get_num().get_str();
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

mpq_class parse_rational(const std::string& s) {
  mpq_class r;
  if (s.empty() || r.set_str(s, 10) != 0 || r.get_den() == 0) bad_config("not a rational: '" + s + "'");
  r.canonicalize();
  return r;
}

std::string to_string(AlphaNormalization n) {
  switch (n) {
    case AlphaNormalization::Volume:
      return "volume";
    case AlphaNormalization::VolumeTimesRho:
      return "volume_times_rho";
    case AlphaNormalization::VolumeTimesRhoFactorial:
      return "volume_times_rho_factorial";
  }
  return "?";
}

AlphaNormalization parse_alpha_normalization(const std::string& s) {
  for (auto n : {AlphaNormalization::Volume, AlphaNormalization::VolumeTimesRho,
                 AlphaNormalization::VolumeTimesRhoFactorial})
    if (to_string(n) == s) return n;
  bad_config("alpha_normalization '" + s + "'");
}

ojson RunConfig::to_json() const {
  ojson j;
  j["field"]["p"] = p;
  j["field"]["n"] = n;
  j["field"]["modulus"] = modulus ? ojson(*modulus) : ojson(nullptr);
  if (points) {
    ojson pts = ojson::array();
    for (const auto& [x, y] : *points) {
      pts.push_back(x);
      pts.push_back(y);
    }
    j["points"] = pts;
  } else {
    j["points"] = nullptr;
  }
  j["allow_degenerate"] = allow_degenerate;
  j["epsilon"] = rational_string(epsilon);
  j["d_max"] = d_max;
  j["sieve_D"] = sieve_D;
  j["euler_N"] = euler_N;
  j["limit_m_max"] = limit_m_max;
  j["budget"] = budget;
  j["cache_dir"] = cache_dir;
  j["alpha_normalization"] = to_string(alpha);
  j["formats"] = formats;
  j["output_dir"] = output_dir;
  j["bound_threshold"] = bound_threshold;
  j["threads"] = threads;
  return j;
}

RunConfig RunConfig::from_json(const json& j) {
  if (!j.is_object()) bad_config("config must be an object");
  static const std::set<std::string> known = {
      "field", "points", "allow_degenerate", "epsilon", "d_max", "sieve_D", "euler_N", "limit_m_max", "budget",
      "cache_dir", "alpha_normalization", "formats", "output_dir", "bound_threshold", "threads"};
  for (const auto& [key, v] : j.items())
    if (!known.count(key)) bad_config("unknown key '" + key + "'");

  RunConfig c;
  if (j.contains("field")) {
    const json& f = j["field"];
    if (!f.is_object()) bad_config("field must be an object with p, n, modulus");
    for (const auto& [key, v] : f.items())
      if (key != "p" && key != "n" && key != "modulus") bad_config("unknown key 'field." + key + "'");
    if (f.contains("p")) c.p = get_as<int>(f, "p");
    if (f.contains("n")) c.n = get_as<int>(f, "n");
    if (f.contains("modulus") && !f["modulus"].is_null()) c.modulus = get_as<std::vector<int>>(f, "modulus");
  }
  if (j.contains("points") && !j["points"].is_null()) {
    const json& pts = j["points"];
    if (!pts.is_array() || pts.size() != 8) bad_config("points must list 8 coordinates x1 y1 ... x4 y4");
    PointSpec spec;
    for (int i = 0; i < 4; ++i) spec[i] = {coord_string(pts[2 * i]), coord_string(pts[2 * i + 1])};
    c.points = spec;
  }
  if (j.contains("allow_degenerate")) c.allow_degenerate = get_as<bool>(j, "allow_degenerate");
  if (j.contains("epsilon")) {
    const json& e = j["epsilon"];
    c.epsilon = e.is_string() ? parse_rational(e.get<std::string>()) : parse_rational(coord_string(e));
  }
  if (j.contains("d_max")) c.d_max = get_as<int>(j, "d_max");
  if (j.contains("sieve_D")) c.sieve_D = get_as<int>(j, "sieve_D");
  if (j.contains("euler_N")) c.euler_N = get_as<int>(j, "euler_N");
  if (j.contains("limit_m_max")) c.limit_m_max = get_as<int>(j, "limit_m_max");
  if (j.contains("budget")) c.budget = get_as<std::uint64_t>(j, "budget");
  if (j.contains("cache_dir")) c.cache_dir = get_as<std::string>(j, "cache_dir");
  if (j.contains("alpha_normalization"))
    c.alpha = parse_alpha_normalization(get_as<std::string>(j, "alpha_normalization"));
  if (j.contains("formats")) c.formats = get_as<std::vector<std::string>>(j, "formats");
  if (j.contains("output_dir")) c.output_dir = get_as<std::string>(j, "output_dir");
  if (j.contains("bound_threshold")) c.bound_threshold = get_as<int>(j, "bound_threshold");
  if (j.contains("threads")) c.threads = get_as<int>(j, "threads");
  c.validate();
  return c;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad_config("cannot read config " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    bad_config(path.string() + ": " + e.what());
  }
  return from_json(j);
}

void RunConfig::validate() const {
  if (epsilon <= 0) bad_config("epsilon must be positive");
  if (d_max < 0) bad_config("d_max must be >= 0");
  if (budget == 0) bad_config("budget must be positive");
  if (sieve_D < 0) bad_config("sieve_D must be >= 0");
  if (euler_N < 1) bad_config("euler_N must be >= 1");
  if (limit_m_max < 1) bad_config("limit_m_max must be >= 1");
  if (threads < 0) bad_config("threads must be >= 0");
  if (formats.empty()) bad_config("formats is empty");
  for (const auto& f : formats)
    if (f != "csv" && f != "json") bad_config("format '" + f + "'");
}

SurfaceConfig RunConfig::surface() const {
  const Field F = Field::make(p, n, modulus);
  if (!points) return default_config(F);
  std::array<std::pair<P1Point, P1Point>, 4> pts;
  for (int i = 0; i < 4; ++i) pts[i] = {parse_coord(F, (*points)[i].first), parse_coord(F, (*points)[i].second)};
  return validate_points(F, pts, !allow_degenerate);
}

ojson CacheKey::to_json() const {
  ojson j;
  j["version"] = version;
  j["p"] = p;
  j["n"] = n;
  j["modulus"] = modulus;
  j["points"] = points;
  j["a"] = a;
  j["a_prime"] = a_prime;
  j["k"] = k;
  return j;
}

CacheKey make_cache_key(const SurfaceConfig& cfg, const MarkingCoords& c) {
  CacheKey key;
  key.p = cfg.field.p();
  key.n = cfg.field.n();
  key.modulus = cfg.field.modulus();
  key.points = cfg.describe();
  key.a = c.a;
  key.a_prime = c.a_prime;
  key.k = c.k;
  return key;
}

std::uint32_t crc32_of(const std::string& s) {
  return std::uint32_t(::crc32(0L, reinterpret_cast<const Bytef*>(s.data()), uInt(s.size())));
}

namespace {

const char* const kCacheFormat = "manin-count-cache";

std::string header_line() {
  ojson h;
  h["format"] = kCacheFormat;
  h["version"] = kCacheVersion;
  return h.dump();
}

std::string hex8(std::uint32_t v) {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", v);
  return buf;
}

}  // namespace

CountCache::CountCache(std::filesystem::path dir) : dir_(std::move(dir)), file_(dir_ / "counts.jsonl") {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create cache directory " + dir_.string() + ": " + ec.message());
  std::ifstream in(file_);
  if (!in) return;
  std::string line;
  if (!std::getline(in, line)) return;
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception&) {
    throw Error(ErrorCode::CorruptCache, file_.string() + ": bad header");
  }
  if (!header.is_object() || header.value("format", "") != kCacheFormat)
    throw Error(ErrorCode::CorruptCache, file_.string() + ": bad header");
  if (header.value("version", -1) != kCacheVersion)
    throw Error(ErrorCode::VersionMismatch, file_.string() + ": cache version " + header["version"].dump() +
                                                ", expected " + std::to_string(kCacheVersion));
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = file_.string() + ":" + std::to_string(lineno);
    if (line.size() < 10 || line[8] != ' ') throw Error(ErrorCode::CorruptCache, where + ": malformed line");
    const std::string body = line.substr(9);
    if (hex8(crc32_of(body)) != line.substr(0, 8)) throw Error(ErrorCode::CorruptCache, where + ": checksum mismatch");
    try {
      const json j = json::parse(body);
      const json& k = j.at("key");
      CacheKey key;
      key.version = k.at("version").get<int>();
      if (key.version != kCacheVersion) throw Error(ErrorCode::VersionMismatch, where + ": entry from another version");
      key.p = k.at("p").get<int>();
      key.n = k.at("n").get<int>();
      key.modulus = k.at("modulus").get<std::vector<int>>();
      key.points = k.at("points").get<std::string>();
      key.a = k.at("a").get<long long>();
      key.a_prime = k.at("a_prime").get<long long>();
      key.k = k.at("k").get<std::array<long long, 4>>();
      mpz_class v;
      if (v.set_str(j.at("value").get<std::string>(), 10) != 0) throw Error(ErrorCode::CorruptCache, where);
      entries_[key] = v;
    } catch (const json::exception& e) {
      throw Error(ErrorCode::CorruptCache, where + ": " + e.what());
    }
  }
}

std::optional<mpz_class> CountCache::lookup(const CacheKey& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void CountCache::store(const CacheKey& key, const mpz_class& value) {
  auto [it, inserted] = entries_.emplace(key, value);
  if (!inserted && it->second != value)
    throw Error(ErrorCode::InvariantViolation, "cache already holds a different count for " + key.to_json().dump());
  dirty_ = dirty_ || inserted;
}

void CountCache::flush() {
  if (!dirty_) return;
  const std::filesystem::path tmp = file_.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out << header_line() << '\n';
    for (const auto& [key, value] : entries_) {
      ojson j;
      j["key"] = key.to_json();
      j["value"] = value.get_str();
      const std::string body = j.dump();
      out << hex8(crc32_of(body)) << ' ' << body << '\n';
    }
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, file_, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot rename " + tmp.string() + ": " + ec.message());
  dirty_ = false;
}

CountReport counting_function(const RunConfig& cfg, CountStats* stats) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const SurfaceConfig surface = cfg.surface();
  const SectionCounter counter(surface, cfg.budget);
  std::optional<CountCache> cache;
  if (!cfg.cache_dir.empty()) cache.emplace(cfg.cache_dir);

  struct ClassJob {
    long long h;
    bool shrunken;
    MarkingCoords coords;
    std::optional<mpz_class> value;
    bool failed = false;
  };
  const ShrunkenCone cone(cfg.epsilon);
  std::vector<ClassJob> jobs;
  for (const CurveClass& alpha : enumerate_nef_points(cfg.d_max))
    jobs.push_back({alpha.h(), cone.contains(alpha), choose_marking(alpha).coords, std::nullopt});

  CountStats st;
  st.classes = jobs.size();
  // Remaining work grouped by bidegree: one histogram serves every k.
  std::map<std::pair<long long, long long>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (cache) jobs[i].value = cache->lookup(make_cache_key(surface, jobs[i].coords));
    if (jobs[i].value) {
      ++st.cache_hits;
    } else {
      groups[{jobs[i].coords.a, jobs[i].coords.a_prime}].push_back(i);
    }
  }
  std::vector<std::pair<std::pair<long long, long long>, std::vector<std::size_t>>> work(groups.begin(), groups.end());
  std::sort(work.begin(), work.end(), [&](const auto& x, const auto& y) {
    const long double cx = counter.estimated_cost(int(x.first.first), int(x.first.second), CountStrategy::Bucket);
    const long double cy = counter.estimated_cost(int(y.first.first), int(y.first.second), CountStrategy::Bucket);
    return cx != cy ? cx < cy : x.first < y.first;
  });

  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr hard_error;
  auto worker = [&] {
    for (std::size_t w; (w = next++) < work.size();) {
      const auto& [ab, members] = work[w];
      try {
        for (std::size_t i : members) {
          const auto& c = jobs[i].coords;
          const KVector k{int(c.k[0]), int(c.k[1]), int(c.k[2]), int(c.k[3])};
          jobs[i].value = mpz_class(static_cast<unsigned long>(counter.count_morphisms(int(c.a), int(c.a_prime), k)));
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::BudgetExceeded) {
          std::lock_guard lock(err_mutex);
          if (!hard_error) hard_error = std::current_exception();
        }
        for (std::size_t i : members) jobs[i].failed = !jobs[i].value;
      } catch (...) {
        std::lock_guard lock(err_mutex);
        if (!hard_error) hard_error = std::current_exception();
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned nthreads = std::min<std::size_t>(cfg.threads > 0 ? unsigned(cfg.threads) : hw, std::max<std::size_t>(1, work.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (hard_error) std::rethrow_exception(hard_error);

  if (cache) {
    for (const auto& j : jobs)
      if (j.value) cache->store(make_cache_key(surface, j.coords), *j.value);
    cache->flush();
  }
  for (const auto& j : jobs)
    if (j.value) ++st.computed;
  st.computed -= st.cache_hits;

  CountReport rep;
  rep.config = cfg.to_json();
  for (int d = 0; d <= cfg.d_max; ++d) {
    CountRow row;
    row.d = d;
    bool partial = false;
    for (const auto& j : jobs) {
      if (j.h > d) continue;
      if (!j.value) {
        partial = true;
        continue;
      }
      row.N += *j.value;
      if (j.shrunken) row.N_eps += *j.value;
    }
    if (partial) row.flags.push_back("partial");
    rep.rows.push_back(std::move(row));
    if (partial) {
      rep.partial = true;
      break;
    }
  }
  st.counting_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (stats) *stats = st;
  return rep;
}

void asymptotic_report(const RunConfig& cfg, CountReport& report) {
  const long q = ipow(cfg.p, cfg.n).get_si();
  const mpq_class one_minus = 1 - mpq_class(1, long(q));
  mpq_class scale = 1;
  if (cfg.alpha == AlphaNormalization::VolumeTimesRho) scale = 6;
  if (cfg.alpha == AlphaNormalization::VolumeTimesRhoFactorial) scale = 720;
  report.alpha_nef = nef_cone_volume(1) * scale;
  report.alpha_eps = shrunken_cone_volume(cfg.epsilon, 1) * scale;
  report.tau = tamagawa(q, cfg.euler_N).value.reduced();

  mpq_class bound = report.alpha_nef * q * q;
  for (int i = 0; i < 7; ++i) bound /= one_minus;
  const double log2_qeps = cfg.epsilon.get_d() * std::log2(double(q));
  std::ostringstream diag;
  diag.setf(std::ios::fixed);
  diag.precision(4);
  diag << "log2(q^eps) = " << log2_qeps << " vs log2(C) = 32";
  if (log2_qeps <= 32) diag << ", deficit " << 32 - log2_qeps << " bits";
  report.q_epsilon_vs_C = diag.str();

  std::optional<mpq_class> prev_ratio;
  for (auto& row : report.rows) {
    std::erase_if(row.flags, [](const std::string& f) { return f != "partial"; });
    const mpz_class qd = ipow(q, unsigned(row.d));
    const mpz_class d5 = ipow(row.d, 5);
    row.prediction = one_minus * report.alpha_eps * report.tau * mpq_class(qd * d5);
    row.upper_bound = bound;
    row.ratio.reset();
    if (row.d == 0) continue;
    row.ratio = mpq_class(row.N, qd * d5);
    row.ratio->canonicalize();
    if (*row.ratio > bound) row.flags.push_back(row.d < cfg.bound_threshold ? "above_bound_pre_asymptotic" : "above_bound");
    if (prev_ratio) row.flags.push_back(*row.ratio > *prev_ratio ? "ratio_up" : *row.ratio < *prev_ratio ? "ratio_down" : "ratio_flat");
    prev_ratio = row.ratio;
  }
}

std::string report_to_csv(const CountReport& r) {
  std::ostringstream os;
  os << "d,N,N_eps,prediction,ratio,upper_bound,flags\n";
  for (const auto& row : r.rows) {
    std::string flags;
    for (const auto& f : row.flags) flags += (flags.empty() ? "" : ";") + f;
    os << row.d << ',' << row.N.get_str() << ',' << row.N_eps.get_str() << ',' << rational_string(row.prediction) << ','
       << (row.ratio ? rational_string(*row.ratio) : "") << ',' << rational_string(row.upper_bound) << ',' << flags
       << '\n';
  }
  return os.str();
}

std::string report_to_json(const CountReport& r) {
  ojson j;
  j["config"] = r.config;
  j["partial"] = r.partial;
  j["alpha_nef"] = rational_string(r.alpha_nef);
  j["alpha_eps"] = rational_string(r.alpha_eps);
  j["tau"] = rational_string(r.tau);
  j["q_epsilon_vs_C"] = r.q_epsilon_vs_C;
  j["rows"] = ojson::array();
  for (const auto& row : r.rows) {
    ojson o;
    o["d"] = row.d;
    o["N"] = row.N.get_str();
    o["N_eps"] = row.N_eps.get_str();
    o["prediction"] = rational_string(row.prediction);
    o["ratio"] = row.ratio ? ojson(rational_string(*row.ratio)) : ojson(nullptr);
    o["upper_bound"] = rational_string(row.upper_bound);
    o["flags"] = row.flags;
    j["rows"].push_back(o);
  }
  return j.dump(2) + "\n";
}

CountReport report_from_json(const std::string& s) {
  CountReport r;
  try {
    const ojson j = ojson::parse(s);
    r.config = j.at("config");
    r.partial = j.at("partial").get<bool>();
    r.alpha_nef = parse_rational(j.at("alpha_nef").get<std::string>());
    r.alpha_eps = parse_rational(j.at("alpha_eps").get<std::string>());
    r.tau = parse_rational(j.at("tau").get<std::string>());
    r.q_epsilon_vs_C = j.at("q_epsilon_vs_C").get<std::string>();
    for (const auto& o : j.at("rows")) {
      CountRow row;
      row.d = o.at("d").get<int>();
      row.N = mpz_class(o.at("N").get<std::string>());
      row.N_eps = mpz_class(o.at("N_eps").get<std::string>());
      row.prediction = parse_rational(o.at("prediction").get<std::string>());
      if (!o.at("ratio").is_null()) row.ratio = parse_rational(o.at("ratio").get<std::string>());
      row.upper_bound = parse_rational(o.at("upper_bound").get<std::string>());
      row.flags = o.at("flags").get<std::vector<std::string>>();
      r.rows.push_back(std::move(row));
    }
  } catch (const ojson::exception& e) {
    bad_config(std::string("report: ") + e.what());
  }
  return r;
}

std::vector<std::filesystem::path> emit(const RunConfig& cfg, const CountReport& r) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + cfg.output_dir + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  for (const auto& f : cfg.formats) {
    const std::filesystem::path path = std::filesystem::path(cfg.output_dir) / ("report." + f);
    const std::string body = f == "csv" ? report_to_csv(r) : report_to_json(r);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << body;
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    written.push_back(path);
  }
  return written;
}

}  // namespace manin
