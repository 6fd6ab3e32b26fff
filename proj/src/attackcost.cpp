#include "pbc/attackcost.hpp"

#include <cstdio>
#include <sstream>

#include "pbc/errors.hpp"

namespace pbc {

namespace {

std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

long double cost(u128 n_hashes, double per_hash_seconds) {
  return static_cast<long double>(n_hashes) * static_cast<long double>(per_hash_seconds);
}

}  // namespace

std::string AttackEstimate::runtime_human() const {
  const long double s = runtime_seconds;
  if (s < 60) return format("%.3g s", static_cast<double>(s));
  if (s < kSecondsPerYear) return format("%.2f h", runtime_hours());
  const double years = runtime_years();
  if (years < 1e6) return format("%.0f years", years);
  if (years < 1e9) return format("%.0f million years", years / 1e6);
  return format("%.3g billion years", years / 1e9);
}

AttackEstimate estimate(std::uint64_t n_refs, unsigned k, double per_hash_seconds) {
  if (k == 0) throw InvalidParameterError("k must be >= 1");
  if (n_refs < k) throw InvalidParameterError("reference universe smaller than k");
  if (!(per_hash_seconds > 0)) throw InvalidParameterError("per-hash time must be positive");
  AttackEstimate e;
  e.n_refs = n_refs;
  e.k = k;
  e.per_hash_seconds = per_hash_seconds;
  e.n_hashes = binomial(n_refs, k);
  e.runtime_seconds = cost(e.n_hashes, per_hash_seconds);
  return e;
}

std::uint64_t min_universe_for_budget(unsigned k, double per_hash_seconds, double budget_seconds) {
  if (k == 0) throw InvalidParameterError("k must be >= 1");
  if (!(per_hash_seconds > 0) || !(budget_seconds > 0)) {
    throw InvalidParameterError("per-hash time and budget must be positive");
  }
  const auto exceeds = [&](std::uint64_t n) {
    return cost(binomial_capped(n, k, ~u128{0}), per_hash_seconds) > static_cast<long double>(budget_seconds);
  };
  // C(n, k) is non-decreasing in n, so search for the first n that exceeds.
  std::uint64_t lo = k;  // candidate; exceeds(lo) may already hold
  if (exceeds(lo)) return lo;
  std::uint64_t hi = 2 * lo;
  while (!exceeds(hi)) {
    lo = hi;
    if (hi > (std::uint64_t{1} << 62)) throw OverflowError("budget too large to invert");
    hi *= 2;
  }
  // !exceeds(lo) && exceeds(hi)
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    (exceeds(mid) ? hi : lo) = mid;
  }
  return hi;
}

std::vector<AttackEstimate> sweep(std::span<const unsigned> k_values, std::span<const std::uint64_t> n_values,
                                  double per_hash_seconds) {
  std::vector<AttackEstimate> rows;
  for (unsigned k : k_values) {
    for (std::uint64_t n : n_values) rows.push_back(estimate(n, k, per_hash_seconds));
  }
  return rows;
}

std::vector<AttackEstimate> dblp_preset() {
  constexpr std::uint64_t kDblpRecords = 5'050'000;
  const unsigned ks[] = {1, 2, 3};
  const std::uint64_t ns[] = {kDblpRecords};
  return sweep(ks, ns, 0.001);
}

std::string sweep_csv(std::span<const AttackEstimate> rows) {
  std::ostringstream out;
  out << "n_refs,k,per_hash_seconds,n_hashes,runtime_seconds,runtime_hours,runtime_years,runtime_human\n";
  for (const auto& r : rows) {
    out << r.n_refs << ',' << r.k << ',' << format("%.6g", r.per_hash_seconds) << ',' << to_string(r.n_hashes)
        << ',' << format("%.6e", static_cast<double>(r.runtime_seconds)) << ','
        << format("%.6g", r.runtime_hours()) << ',' << format("%.6g", r.runtime_years()) << ','
        << r.runtime_human() << '\n';
  }
  return out.str();
}

std::string sweep_table(std::span<const AttackEstimate> rows) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%12s %3s %10s %26s %14s  %s\n", "n_refs", "k", "s/hash", "hashes", "seconds",
                "runtime");
  out << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%12llu %3u %10.3g %26s %14.4e  %s\n",
                  static_cast<unsigned long long>(r.n_refs), r.k, r.per_hash_seconds, to_string(r.n_hashes).c_str(),
                  static_cast<double>(r.runtime_seconds), r.runtime_human().c_str());
    out << line;
  }
  return out.str();
}

}  // namespace pbc
