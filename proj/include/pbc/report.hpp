#pragma once

#include <span>
#include <string>

#include "json.hpp"
#include "pbc/similarity.hpp"

namespace pbc {

/// One MatchReport record: the document pair, the shared-hash count, both
/// scores as 12-significant-digit decimals and their exact fractions.
/// s_bc_recovered fields are null when recovery failed.
nlohmann::json pair_result_json(const PairResult& r);

/// Newline-delimited JSON, one record per candidate.
std::string match_report_ndjson(std::span<const PairResult> results);

/// Aligned text table with the same fields.
std::string match_report_text(std::span<const PairResult> results);

}  // namespace pbc
