#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pbc/refmodel.hpp"

namespace pbc {

/// A reference as it appears in an input file, before normalization.
struct RawReference {
  std::string title;
  std::vector<std::string> authors;
  std::optional<int> year;

  friend bool operator==(const RawReference&, const RawReference&) = default;
};

struct RawRecord {
  std::string id;
  std::vector<RawReference> refs;

  friend bool operator==(const RawRecord&, const RawRecord&) = default;
};

struct CorpusStats {
  std::size_t n_docs_loaded = 0;
  std::size_t n_docs_excluded = 0;
  std::size_t n_unique_refs = 0;   ///< distinct norm_keys over loaded documents
  std::size_t n_refs_rejected = 0; ///< titles that normalized to nothing

  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

/// Parses one corpus line: {"id": str, "refs": [{"title": str, "authors"?: [str], "year"?: int}, ...]}.
/// Throws MalformedRecordError on schema violations.
RawRecord parse_record(std::string_view line, std::size_t line_no = 0);

/// Builds a Document, normalizing and deduplicating. Throws EmptyKeyError for
/// the first title that normalizes to nothing.
Document to_document(const RawRecord& record);

/// parse_record followed by to_document.
Document parse_document(std::string_view line, std::size_t line_no = 0);

/// Reads a corpus file and keeps only documents with k <= |refs| <= max_refs.
/// Titles that normalize to nothing are dropped and counted rather than
/// failing the load. Throws IoError / MalformedRecordError (with line number).
std::pair<Corpus, CorpusStats> load_corpus(const std::filesystem::path& path, std::size_t k,
                                           std::size_t max_refs = kDefaultMaxRefs, unsigned threads = 1);
std::pair<Corpus, CorpusStats> load_corpus(std::istream& in, std::size_t k, std::size_t max_refs = kDefaultMaxRefs,
                                           unsigned threads = 1);

struct FilteredRecords {
  std::vector<RawRecord> kept;  ///< records whose deduplicated reference count is eligible
  CorpusStats stats;
};

/// Applies the same normalization, rejection and eligibility rules as
/// load_corpus to already-parsed records.
FilteredRecords filter_records(const std::vector<RawRecord>& records, std::size_t k,
                               std::size_t max_refs = kDefaultMaxRefs);

std::vector<RawRecord> read_records(std::istream& in);
void write_records(std::ostream& out, const std::vector<RawRecord>& records);
std::string record_to_json_line(const RawRecord& record);

struct TeiResult {
  RawRecord record;
  std::size_t skipped_untitled = 0;
};

/// Extracts the bibliography of a TEI document: every <biblStruct> inside a
/// <listBibl>. The analytic title (level="a") wins over a monograph title
/// (level="m") or an untyped one; entries with no usable title are skipped and
/// counted. doc_id is used as the record id.
TeiResult parse_tei(std::string_view xml, std::string doc_id);
TeiResult read_tei_file(const std::filesystem::path& path);

/// Converts every *.xml file under `dir` (sorted by file name); record ids are
/// the file stems.
std::vector<TeiResult> read_tei_directory(const std::filesystem::path& dir);

}  // namespace pbc
