#include "pbc/ingest.hpp"

#include <expat.h>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "pbc/errors.hpp"
#include "pbc/parallel.hpp"

namespace pbc {

using nlohmann::json;

RawRecord parse_record(std::string_view line, std::size_t line_no) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw MalformedRecordError(std::string("invalid JSON: ") + e.what(), line_no);
  }
  if (!j.is_object()) throw MalformedRecordError("record is not a JSON object", line_no);

  RawRecord rec;
  const auto id = j.find("id");
  if (id == j.end() || !id->is_string() || id->get_ref<const std::string&>().empty()) {
    throw MalformedRecordError("record has no string \"id\"", line_no);
  }
  rec.id = id->get<std::string>();

  const auto refs = j.find("refs");
  if (refs == j.end() || !refs->is_array() || refs->empty()) {
    throw MalformedRecordError("record " + rec.id + " has no non-empty \"refs\" array", line_no);
  }
  rec.refs.reserve(refs->size());
  for (const auto& r : *refs) {
    RawReference ref;
    if (r.is_string()) {
      ref.title = r.get<std::string>();
    } else if (r.is_object() && r.contains("title") && r["title"].is_string()) {
      ref.title = r["title"].get<std::string>();
      if (const auto a = r.find("authors"); a != r.end() && !a->is_null()) {
        if (!a->is_array()) throw MalformedRecordError("\"authors\" must be an array", line_no);
        for (const auto& name : *a) {
          if (!name.is_string()) throw MalformedRecordError("author names must be strings", line_no);
          ref.authors.push_back(name.get<std::string>());
        }
      }
      if (const auto y = r.find("year"); y != r.end() && !y->is_null()) {
        if (!y->is_number_integer()) throw MalformedRecordError("\"year\" must be an integer", line_no);
        ref.year = y->get<int>();
      }
    } else {
      throw MalformedRecordError("reference in " + rec.id + " has no string \"title\"", line_no);
    }
    rec.refs.push_back(std::move(ref));
  }
  return rec;
}

namespace {

Document to_document_impl(const RawRecord& record, std::size_t* rejected) {
  std::vector<Reference> refs;
  refs.reserve(record.refs.size());
  for (const auto& r : record.refs) {
    try {
      refs.push_back(Reference::from_title(r.title, r.authors, r.year));
    } catch (const EmptyKeyError&) {
      if (rejected == nullptr) throw;
      ++*rejected;
    }
  }
  return Document(record.id, refs);
}

}  // namespace

Document to_document(const RawRecord& record) { return to_document_impl(record, nullptr); }

Document parse_document(std::string_view line, std::size_t line_no) {
  return to_document(parse_record(line, line_no));
}

std::pair<Corpus, CorpusStats> load_corpus(std::istream& in, std::size_t k, std::size_t max_refs, unsigned threads) {
  if (k == 0) throw InvalidParameterError("subset size k must be >= 1");
  std::vector<std::pair<std::size_t, std::string>> lines;
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    lines.emplace_back(no, std::move(line));
  }

  std::vector<Document> docs(lines.size());
  std::vector<std::size_t> rejected(lines.size(), 0);
  parallel_for(lines.size(), threads, [&](std::size_t i) {
    docs[i] = to_document_impl(parse_record(lines[i].second, lines[i].first), &rejected[i]);
  });

  Corpus corpus;
  corpus.k = k;
  corpus.max_refs = max_refs;
  CorpusStats stats;
  std::unordered_set<std::string> keys;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    stats.n_refs_rejected += rejected[i];
    if (!eligible(docs[i], k, max_refs)) {
      ++stats.n_docs_excluded;
      continue;
    }
    for (const auto& r : docs[i].refs) keys.insert(r.norm_key);
    corpus.documents.push_back(std::move(docs[i]));
  }
  stats.n_docs_loaded = corpus.documents.size();
  stats.n_unique_refs = keys.size();
  return {std::move(corpus), stats};
}

std::pair<Corpus, CorpusStats> load_corpus(const std::filesystem::path& path, std::size_t k, std::size_t max_refs,
                                           unsigned threads) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read corpus file " + path.string());
  return load_corpus(in, k, max_refs, threads);
}

FilteredRecords filter_records(const std::vector<RawRecord>& records, std::size_t k, std::size_t max_refs) {
  if (k == 0) throw InvalidParameterError("subset size k must be >= 1");
  FilteredRecords out;
  std::unordered_set<std::string> keys;
  for (const auto& rec : records) {
    const Document doc = to_document_impl(rec, &out.stats.n_refs_rejected);
    if (!eligible(doc, k, max_refs)) {
      ++out.stats.n_docs_excluded;
      continue;
    }
    for (const auto& r : doc.refs) keys.insert(r.norm_key);
    out.kept.push_back(rec);
  }
  out.stats.n_docs_loaded = out.kept.size();
  out.stats.n_unique_refs = keys.size();
  return out;
}

std::vector<RawRecord> read_records(std::istream& in) {
  std::vector<RawRecord> out;
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back(parse_record(line, no));
  }
  return out;
}

std::string record_to_json_line(const RawRecord& record) {
  json refs = json::array();
  for (const auto& r : record.refs) {
    json ref = {{"title", r.title}};
    if (!r.authors.empty()) ref["authors"] = r.authors;
    if (r.year) ref["year"] = *r.year;
    refs.push_back(std::move(ref));
  }
  // Fixed key order keeps output byte-stable.
  return json{{"id", record.id}, {"refs", std::move(refs)}}.dump();
}

void write_records(std::ostream& out, const std::vector<RawRecord>& records) {
  for (const auto& r : records) out << record_to_json_line(r) << '\n';
}

// ---------------------------------------------------------------------------
// TEI subset

namespace {

struct TeiState {
  std::vector<std::string> stack;
  int list_bibl_depth = 0;
  bool in_bibl = false;

  // Current biblStruct.
  std::string analytic_title, monogr_title, plain_title;
  std::vector<std::string> authors;
  std::optional<int> year;

  // Current <title> or <surname>/<forename>.
  std::string* capture = nullptr;
  std::string title_level;
  std::string title_text;
  std::string name_text;
  std::string forename, surname;
  int pers_depth = 0;

  TeiResult result;
};

std::string local_name(const XML_Char* name) {
  std::string s(name);
  const auto colon = s.rfind(':');
  // Expat is not namespace-aware here, so strip any prefix.
  return colon == std::string::npos ? s : s.substr(colon + 1);
}

std::string attribute(const XML_Char** attrs, std::string_view want) {
  for (int i = 0; attrs[i]; i += 2) {
    if (local_name(attrs[i]) == want) return attrs[i + 1];
  }
  return {};
}

std::string squash(const std::string& s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (c == ' ' || c == '\n' || c == '\t' || c == '\r') {
      space = true;
    } else {
      if (space && !out.empty()) out.push_back(' ');
      space = false;
      out.push_back(c);
    }
  }
  return out;
}

void XMLCALL on_start(void* data, const XML_Char* name, const XML_Char** attrs) {
  auto& st = *static_cast<TeiState*>(data);
  const std::string tag = local_name(name);
  st.stack.push_back(tag);
  if (tag == "listBibl") {
    ++st.list_bibl_depth;
  } else if (tag == "biblStruct" && st.list_bibl_depth > 0 && !st.in_bibl) {
    st.in_bibl = true;
    st.analytic_title.clear();
    st.monogr_title.clear();
    st.plain_title.clear();
    st.authors.clear();
    st.year.reset();
  } else if (st.in_bibl && tag == "title") {
    st.title_level = attribute(attrs, "level");
    st.title_text.clear();
    st.capture = &st.title_text;
  } else if (st.in_bibl && tag == "persName") {
    ++st.pers_depth;
    st.forename.clear();
    st.surname.clear();
  } else if (st.in_bibl && st.pers_depth > 0 && (tag == "forename" || tag == "surname")) {
    st.name_text.clear();
    st.capture = &st.name_text;
  } else if (st.in_bibl && tag == "date" && !st.year) {
    const std::string when = attribute(attrs, "when");
    if (when.size() >= 4 && std::all_of(when.begin(), when.begin() + 4, ::isdigit)) {
      st.year = std::stoi(when.substr(0, 4));
    }
  }
}

void XMLCALL on_end(void* data, const XML_Char* name) {
  auto& st = *static_cast<TeiState*>(data);
  const std::string tag = local_name(name);
  if (!st.stack.empty()) st.stack.pop_back();

  if (tag == "listBibl") {
    --st.list_bibl_depth;
  } else if (st.in_bibl && tag == "title") {
    st.capture = nullptr;
    const std::string text = squash(st.title_text);
    if (!text.empty()) {
      if (st.title_level == "a" && st.analytic_title.empty()) {
        st.analytic_title = text;
      } else if (st.title_level == "m" && st.monogr_title.empty()) {
        st.monogr_title = text;
      } else if (st.title_level.empty() && st.plain_title.empty()) {
        st.plain_title = text;
      }
    }
  } else if (st.in_bibl && (tag == "forename" || tag == "surname")) {
    st.capture = nullptr;
    std::string& slot = tag == "surname" ? st.surname : st.forename;
    if (!slot.empty()) slot.push_back(' ');
    slot += squash(st.name_text);
  } else if (st.in_bibl && tag == "persName") {
    --st.pers_depth;
    std::string full = st.forename.empty() ? st.surname : st.forename + " " + st.surname;
    if (!full.empty()) st.authors.push_back(std::move(full));
  } else if (st.in_bibl && tag == "biblStruct") {
    st.in_bibl = false;
    const std::string& title = !st.analytic_title.empty()  ? st.analytic_title
                               : !st.monogr_title.empty()  ? st.monogr_title
                                                           : st.plain_title;
    if (title.empty()) {
      ++st.result.skipped_untitled;
    } else {
      st.result.record.refs.push_back(RawReference{title, st.authors, st.year});
    }
  }
}

void XMLCALL on_text(void* data, const XML_Char* s, int len) {
  auto& st = *static_cast<TeiState*>(data);
  if (st.capture) st.capture->append(s, static_cast<std::size_t>(len));
}

}  // namespace

TeiResult parse_tei(std::string_view xml, std::string doc_id) {
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(XML_ParserCreate("UTF-8"),
                                                                                      &XML_ParserFree);
  if (!parser) throw Error("cannot create XML parser");
  TeiState st;
  st.result.record.id = std::move(doc_id);
  XML_SetUserData(parser.get(), &st);
  XML_SetElementHandler(parser.get(), on_start, on_end);
  XML_SetCharacterDataHandler(parser.get(), on_text);
  if (XML_Parse(parser.get(), xml.data(), static_cast<int>(xml.size()), XML_TRUE) == XML_STATUS_ERROR) {
    throw MalformedRecordError("TEI " + st.result.record.id + ": " + XML_ErrorString(XML_GetErrorCode(parser.get())),
                               XML_GetCurrentLineNumber(parser.get()));
  }
  return std::move(st.result);
}

TeiResult read_tei_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read TEI file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_tei(buf.str(), path.stem().string());
}

std::vector<TeiResult> read_tei_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw IoError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".xml") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<TeiResult> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(read_tei_file(f));
  return out;
}

}  // namespace pbc
