#include "pbc/report.hpp"

#include <cstdio>
#include <sstream>

namespace pbc {

nlohmann::json pair_result_json(const PairResult& r) {
  nlohmann::json j;
  j["doc_a"] = r.doc_id_a;
  j["doc_b"] = r.doc_id_b;
  j["intersection"] = r.intersection_hashes;
  j["s_pbc"] = r.s_pbc.decimal();
  j["s_pbc_fraction"] = r.s_pbc.str();
  if (r.s_bc_recovered) {
    j["s_bc_recovered"] = r.s_bc_recovered->decimal();
    j["s_bc_recovered_fraction"] = r.s_bc_recovered->str();
  } else {
    j["s_bc_recovered"] = nullptr;
    j["s_bc_recovered_fraction"] = nullptr;
  }
  return j;
}

std::string match_report_ndjson(std::span<const PairResult> results) {
  std::string out;
  for (const auto& r : results) {
    out += pair_result_json(r).dump();
    out += '\n';
  }
  return out;
}

std::string match_report_text(std::span<const PairResult> results) {
  std::ostringstream out;
  char line[512];
  std::snprintf(line, sizeof line, "%-4s %-20s %12s %16s %16s\n", "rank", "candidate", "shared", "s_pbc",
                "s_bc_recovered");
  out << line;
  std::size_t rank = 1;
  for (const auto& r : results) {
    const std::string recovered = r.s_bc_recovered ? r.s_bc_recovered->decimal() : "n/a";
    std::snprintf(line, sizeof line, "%-4zu %-20s %12llu %16s %16s\n", rank++, r.doc_id_b.c_str(),
                  static_cast<unsigned long long>(r.intersection_hashes), r.s_pbc.decimal().c_str(),
                  recovered.c_str());
    out << line;
  }
  return out.str();
}

}  // namespace pbc
