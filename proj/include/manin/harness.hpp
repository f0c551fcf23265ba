#pragma once

// Counting functions over the nef cone, their comparison with the predicted
// leading term, a checksummed on-disk cache of per-class counts, and report
// serialization.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "json.hpp"
#include "manin/nslattice.hpp"
#include "manin/secenum.hpp"

namespace manin {

enum class AlphaNormalization {
  Volume,           // volume of {h <= 1}
  VolumeTimesRho,   // times rho(S) = 6
  VolumeTimesRhoFactorial,  // times 6! = 720
};
std::string to_string(AlphaNormalization n);
AlphaNormalization parse_alpha_normalization(const std::string& s);

// Point coordinates as written in a config: "inf" or the index of a field
// element (0..q-1).
using PointSpec = std::array<std::pair<std::string, std::string>, 4>;

struct RunConfig {
  int p = 3;
  int n = 1;
  std::optional<std::vector<int>> modulus;
  std::optional<PointSpec> points;  // default_config when absent
  bool allow_degenerate = false;    // accept points on a (1,1)-curve
  mpq_class epsilon{1, 10};
  int d_max = 6;
  int sieve_D = 2;
  int euler_N = 4;
  int limit_m_max = 6;
  std::uint64_t budget = kDefaultBudget;
  std::string cache_dir;  // empty: no cache
  AlphaNormalization alpha = AlphaNormalization::Volume;
  std::vector<std::string> formats{"csv", "json"};
  std::string output_dir = "out";
  int bound_threshold = 0;  // rows with d below this are reported, never flagged
  int threads = 0;          // 0: hardware concurrency

  // Every field, in a fixed key order.
  nlohmann::ordered_json to_json() const;
  // Throws InvalidConfig on unknown keys, bad types or violated invariants.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig from_file(const std::filesystem::path& path);
  void validate() const;

  SurfaceConfig surface() const;
};

// Environment variable that overrides cache_dir.
inline constexpr const char* kCacheDirEnv = "MANIN_CACHE_DIR";
// Bumped whenever counting semantics change; part of every cache key.
inline constexpr int kCacheVersion = 1;

struct CacheKey {
  int p = 0, n = 0;
  std::vector<int> modulus;
  std::string points;  // SurfaceConfig::describe()
  long long a = 0, a_prime = 0;
  std::array<long long, 4> k{};
  int version = kCacheVersion;

  nlohmann::ordered_json to_json() const;
  friend auto operator<=>(const CacheKey&, const CacheKey&) = default;
};
CacheKey make_cache_key(const SurfaceConfig& cfg, const MarkingCoords& c);

// One file of checksummed JSON lines:
//   <crc32 hex> {"key": {...}, "value": "<integer>"}
// after a header line carrying the format version. Corrupt lines raise
// CorruptCache, a header from another version VersionMismatch. Writes go
// to a temporary file that is renamed over the old one.
class CountCache {
 public:
  explicit CountCache(std::filesystem::path dir);

  const std::filesystem::path& file() const { return file_; }
  std::optional<mpz_class> lookup(const CacheKey& key) const;
  void store(const CacheKey& key, const mpz_class& value);
  void flush();
  std::size_t size() const { return entries_.size(); }

 private:
  std::filesystem::path dir_, file_;
  std::map<CacheKey, mpz_class> entries_;
  bool dirty_ = false;
};

std::uint32_t crc32_of(const std::string& s);

struct CountRow {
  int d = 0;
  mpz_class N, N_eps;
  mpq_class prediction;   // (1 - 1/q) alpha_eps tau q^d d^5
  std::optional<mpq_class> ratio;  // N / (q^d d^5), none at d = 0
  mpq_class upper_bound;  // alpha(Nef) q^2 / (1 - 1/q)^7
  std::vector<std::string> flags;
  friend bool operator==(const CountRow&, const CountRow&) = default;
};

struct CountReport {
  nlohmann::ordered_json config;  // RunConfig::to_json
  std::vector<CountRow> rows;
  bool partial = false;
  // Truncations and constants behind the prediction columns.
  mpq_class alpha_nef, alpha_eps, tau;
  std::string q_epsilon_vs_C;  // diagnostic only
  friend bool operator==(const CountReport&, const CountReport&) = default;
};

struct CountStats {
  std::size_t classes = 0, cache_hits = 0, computed = 0;
  double counting_seconds = 0;
};

// Exact N(d) (and N_eps(d)) for d <= cfg.d_max, one count_morphisms per nef
// class in the coordinates of its chosen marking. On BudgetExceeded the row
// is marked partial and later rows are dropped.
CountReport counting_function(const RunConfig& cfg, CountStats* stats = nullptr);
// Fills the prediction, ratio and bound columns and their flags.
void asymptotic_report(const RunConfig& cfg, CountReport& report);

std::string report_to_csv(const CountReport& r);
std::string report_to_json(const CountReport& r);
CountReport report_from_json(const std::string& s);
// Writes report.csv / report.json into cfg.output_dir as configured.
std::vector<std::filesystem::path> emit(const RunConfig& cfg, const CountReport& r);

// Exact rational as "n/d" or "n".
std::string rational_string(const mpq_class& x);
mpq_class parse_rational(const std::string& s);

}  // namespace manin
