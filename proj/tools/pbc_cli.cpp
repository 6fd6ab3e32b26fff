// pbc: command-line front end for private bibliographic coupling.

#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "pbc/attackcost.hpp"
#include "pbc/bench.hpp"
#include "pbc/errors.hpp"
#include "pbc/indexstore.hpp"
#include "pbc/ingest.hpp"
#include "pbc/psihash.hpp"
#include "pbc/report.hpp"
#include "pbc/service.hpp"
#include "pbc/synth.hpp"

namespace {

using nlohmann::json;

struct Common {
  unsigned threads = 0;
  bool json = false;
};

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!out) throw pbc::IoError("cannot write " + path);
  return out;
}

pbc::CombineMode parse_combine(const std::string& s) {
  if (s == "sum") return pbc::CombineMode::ModularSum;
  if (s == "concat") return pbc::CombineMode::SortedConcatSha1;
  throw pbc::InvalidParameterError("unknown combine mode " + s);
}

json stats_json(const pbc::CorpusStats& s) {
  return {{"n_docs_loaded", s.n_docs_loaded},
          {"n_docs_excluded", s.n_docs_excluded},
          {"n_unique_refs", s.n_unique_refs},
          {"n_refs_rejected", s.n_refs_rejected}};
}

void print_stats(const pbc::CorpusStats& s, bool as_json, std::ostream& out) {
  if (as_json) {
    out << stats_json(s).dump() << '\n';
    return;
  }
  out << "documents loaded    " << s.n_docs_loaded << '\n'
      << "documents excluded  " << s.n_docs_excluded << '\n'
      << "unique references   " << s.n_unique_refs << '\n'
      << "rejected titles     " << s.n_refs_rejected << '\n';
}

const pbc::Document& find_doc(const pbc::Corpus& corpus, const std::string& id) {
  for (const auto& d : corpus.documents) {
    if (d.doc_id == id) return d;
  }
  throw pbc::InvalidParameterError("document " + id + " not found in corpus (or not eligible)");
}

std::vector<std::size_t> parse_k_list(const std::string& s) {
  std::vector<std::size_t> ks;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) ks.push_back(std::stoul(item));
  }
  if (ks.empty()) throw pbc::InvalidParameterError("empty k list");
  return ks;
}

pbc::HttpFrontend* g_frontend = nullptr;

void on_signal(int) {
  if (g_frontend) g_frontend->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Private bibliographic coupling: compare documents by hashed reference subsets"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--threads", common.threads, "worker threads (0 = all cores)");
  app.add_flag("--json", common.json, "machine-readable output");

  // gen ---------------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "write a synthetic corpus");
  pbc::GenSpec spec;
  std::string gen_out;
  gen->add_option("--docs", spec.n_docs, "total documents")->capture_default_str();
  gen->add_option("--min-refs", spec.min_refs)->capture_default_str();
  gen->add_option("--max-refs", spec.max_refs)->capture_default_str();
  gen->add_option("--pool", spec.pool_size, "distinct references to draw from")->capture_default_str();
  gen->add_option("--planted", spec.planted_pairs, "planted source/suspect pairs")->capture_default_str();
  gen->add_option("--overlap", spec.planted_overlap, "references shared by each planted pair")->capture_default_str();
  gen->add_option("--seed", spec.seed)->capture_default_str();
  gen->add_option("-o,--out", gen_out, "output corpus file")->required();

  // ingest ------------------------------------------------------------------
  auto* ingest = app.add_subcommand("ingest", "normalize and filter a corpus (JSONL or a TEI directory)");
  std::string ingest_in, ingest_format = "jsonl", ingest_out;
  std::size_t ingest_k = 2, ingest_max = pbc::kDefaultMaxRefs;
  ingest->add_option("input", ingest_in, "corpus file or TEI directory")->required();
  ingest->add_option("--format", ingest_format, "jsonl | tei")->check(CLI::IsMember({"jsonl", "tei"}))->capture_default_str();
  ingest->add_option("--k", ingest_k)->capture_default_str();
  ingest->add_option("--max-refs", ingest_max)->capture_default_str();
  ingest->add_option("-o,--out", ingest_out, "write the eligible records here");

  // hash --------------------------------------------------------------------
  auto* hash = app.add_subcommand("hash", "export one document's hash set (client side)");
  std::string hash_corpus, hash_doc, hash_out, hash_combine = "sum";
  std::size_t hash_k = 2;
  bool hash_hex = false;
  hash->add_option("--corpus", hash_corpus)->required();
  hash->add_option("--doc-id", hash_doc)->required();
  hash->add_option("--k", hash_k)->capture_default_str();
  hash->add_option("--combine", hash_combine, "sum | concat")->capture_default_str();
  hash->add_option("-o,--out", hash_out)->required();
  hash->add_flag("--hex", hash_hex, "write one hex value per line instead of the binary format");

  // build -------------------------------------------------------------------
  auto* build = app.add_subcommand("build", "hash a corpus and write an inverted index");
  std::string build_corpus, build_out, build_combine = "sum";
  std::size_t build_k = 2, build_max = pbc::kDefaultMaxRefs;
  build->add_option("--corpus", build_corpus)->required();
  build->add_option("--k", build_k)->capture_default_str();
  build->add_option("--max-refs", build_max)->capture_default_str();
  build->add_option("--combine", build_combine, "sum | concat")->capture_default_str();
  build->add_option("-o,--out", build_out)->required();

  // stats -------------------------------------------------------------------
  auto* stats = app.add_subcommand("stats", "print index statistics");
  std::string stats_index;
  stats->add_option("--index", stats_index)->required();

  // query -------------------------------------------------------------------
  auto* query = app.add_subcommand("query", "rank indexed documents against a query");
  std::string q_index, q_hashes, q_corpus, q_doc, q_mode = "raw";
  bool q_exclude_self = false;
  std::size_t q_top = 0;
  query->add_option("--index", q_index)->required();
  query->add_option("--query-hashes", q_hashes, "hash-set file (binary or hex)");
  query->add_option("--corpus", q_corpus, "hash the query locally from this corpus");
  query->add_option("--doc-id", q_doc, "query document id");
  query->add_option("--mode", q_mode, "raw | pair-exclusive")->check(CLI::IsMember({"raw", "pair-exclusive"}))->capture_default_str();
  query->add_flag("--exclude-self", q_exclude_self, "drop the candidate with the query's own doc_id");
  query->add_option("--top", q_top, "keep the first N candidates (0 = all)");

  // bench -------------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "hash/index/query resource benchmark per k");
  std::string b_corpus, b_ks = "1,2,3";
  std::size_t b_queries = 100, b_max = pbc::kDefaultMaxRefs;
  bench->add_option("--corpus", b_corpus)->required();
  bench->add_option("--k", b_ks, "comma-separated subset sizes")->capture_default_str();
  bench->add_option("--queries", b_queries)->capture_default_str();
  bench->add_option("--max-refs", b_max)->capture_default_str();

  // serve -------------------------------------------------------------------
  auto* serve = app.add_subcommand("serve", "run the hash-only detection service");
  std::string s_listen = "127.0.0.1:8080", s_index, s_fn = pbc::kDefaultHashFnId;
  std::size_t s_k = 2;
  serve->add_option("--listen", s_listen, "host:port")->envname("PBC_LISTEN")->capture_default_str();
  serve->add_option("--index", s_index, "index file, loaded at start and rewritten on submit")->envname("PBC_INDEX");
  serve->add_option("--k", s_k)->envname("PBC_K")->capture_default_str();
  serve->add_option("--hash-fn", s_fn)->envname("PBC_HASH_FN")->capture_default_str();

  // attack ------------------------------------------------------------------
  auto* attack = app.add_subcommand("attack", "preimage-attack cost model");
  std::vector<std::uint64_t> a_n;
  std::vector<unsigned> a_k;
  double a_per_hash = 0.001;
  double a_budget_hours = 0;
  bool a_dblp = false, a_csv = false;
  attack->add_option("--n", a_n, "candidate reference universe sizes");
  attack->add_option("--k", a_k, "subset sizes");
  attack->add_option("--per-hash", a_per_hash, "seconds per hash")->capture_default_str();
  attack->add_option("--budget-hours", a_budget_hours, "print the smallest universe exceeding this budget");
  attack->add_flag("--dblp-preset", a_dblp, "5.05 million references, k = 1, 2, 3");
  attack->add_flag("--csv", a_csv);

  // collisions --------------------------------------------------------------
  auto* coll = app.add_subcommand("collisions", "count combined-hash collisions at a digest width");
  std::string c_corpus;
  std::size_t c_k = 3, c_max = pbc::kDefaultMaxRefs;
  unsigned c_width = 160;
  coll->add_option("--corpus", c_corpus)->required();
  coll->add_option("--k", c_k)->capture_default_str();
  coll->add_option("--width", c_width, "digest bits (32 or 160)")->capture_default_str();
  coll->add_option("--max-refs", c_max)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      auto out = open_out(gen_out);
      pbc::write_records(out, pbc::generate_corpus(spec));
    } else if (*ingest) {
      std::vector<pbc::RawRecord> records;
      std::size_t untitled = 0;
      if (ingest_format == "tei") {
        for (auto& r : pbc::read_tei_directory(ingest_in)) {
          untitled += r.skipped_untitled;
          records.push_back(std::move(r.record));
        }
      } else {
        std::ifstream in(ingest_in, std::ios::binary);
        if (!in) throw pbc::IoError("cannot read corpus file " + ingest_in);
        records = pbc::read_records(in);
      }
      const auto filtered = pbc::filter_records(records, ingest_k, ingest_max);
      if (!ingest_out.empty()) {
        auto out = open_out(ingest_out);
        pbc::write_records(out, filtered.kept);
      }
      print_stats(filtered.stats, common.json, std::cout);
      if (untitled) std::cerr << "warning: skipped " << untitled << " bibliography entries without a title\n";
    } else if (*hash) {
      const auto [corpus, _] = pbc::load_corpus(hash_corpus, hash_k, pbc::kDefaultMaxRefs, common.threads);
      const auto set = pbc::hash_document(find_doc(corpus, hash_doc), hash_k, parse_combine(hash_combine));
      auto out = open_out(hash_out, !hash_hex);
      hash_hex ? pbc::write_hashset_hex(set, out) : pbc::write_hashset_binary(set, out);
    } else if (*build) {
      const auto [corpus, cstats] = pbc::load_corpus(build_corpus, build_k, build_max, common.threads);
      const auto index = pbc::InvertedIndex::build(corpus, build_k, parse_combine(build_combine), common.threads);
      if (index.empty()) std::cerr << "warning: index is empty (no document has at least k references)\n";
      const auto bytes = index.persist(build_out);
      if (common.json) {
        std::cout << json{{"documents", index.doc_count()},
                          {"entries", index.entry_count()},
                          {"postings", index.posting_count()},
                          {"bytes", bytes}}
                         .dump()
                  << '\n';
      } else {
        std::cout << pbc::stats_text(index);
      }
    } else if (*stats) {
      const auto index = pbc::InvertedIndex::load(stats_index);
      if (common.json) {
        json out{{"k", index.k()},
                 {"hash_fn_id", index.hash_fn_id()},
                 {"docs", index.doc_count()},
                 {"entries", index.entry_count()},
                 {"postings", index.posting_count()},
                 {"bytes", index.serialized_size()}};
        if (!index.empty()) {
          const auto h = index.occurrence_histogram();
          out["histogram"] = {{"in_1", h.in_1},
                              {"in_2", h.in_2},
                              {"in_3", h.in_3},
                              {"ratio_in_1", h.ratio_in_1.decimal()},
                              {"ratio_in_2", h.ratio_in_2.decimal()},
                              {"ratio_in_3", h.ratio_in_3.decimal()}};
        }
        std::cout << out.dump() << '\n';
      } else {
        std::cout << pbc::stats_text(index);
      }
    } else if (*query) {
      const auto index = pbc::InvertedIndex::load(q_index);
      pbc::HashSet q;
      if (!q_hashes.empty()) {
        std::ifstream in(q_hashes, std::ios::binary);
        if (!in) throw pbc::IoError("cannot read " + q_hashes);
        q = pbc::read_hashset(in, q_doc.empty() ? "query" : q_doc);
        if (q.k == 0) q.k = index.k();  // hex files carry no k
        q.hash_fn_id = index.hash_fn_id();
      } else if (!q_corpus.empty() && !q_doc.empty()) {
        const auto [corpus, _] = pbc::load_corpus(q_corpus, index.k(), pbc::kDefaultMaxRefs, common.threads);
        q = pbc::hash_document(find_doc(corpus, q_doc), index.k(), pbc::combine_mode_from_id(index.hash_fn_id()));
      } else {
        throw pbc::InvalidParameterError("give --query-hashes, or --corpus with --doc-id");
      }
      auto overlaps = q_mode == "raw" ? index.intersect(q) : index.intersect_exclusive(q);
      if (q_exclude_self) {
        std::erase_if(overlaps, [&](const pbc::Overlap& o) { return o.doc_id == q.doc_id; });
      }
      auto ranked = pbc::rank_candidates(q, overlaps);
      if (q_top && ranked.size() > q_top) ranked.resize(q_top);
      std::cout << (common.json ? pbc::match_report_ndjson(ranked) : pbc::match_report_text(ranked));
    } else if (*bench) {
      const auto ks = parse_k_list(b_ks);
      const std::size_t k_min = *std::min_element(ks.begin(), ks.end());
      const auto [corpus, _] = pbc::load_corpus(b_corpus, k_min, b_max, common.threads);
      const auto rows = pbc::run_bench(corpus, ks, b_queries, common.threads);
      std::cout << (common.json ? pbc::bench_json(rows) : pbc::bench_table(rows));
    } else if (*serve) {
      pbc::DetectionService::Config cfg;
      cfg.k = s_k;
      cfg.hash_fn_id = s_fn;
      if (!s_index.empty()) cfg.index_path = s_index;
      pbc::DetectionService service(cfg);
      pbc::HttpFrontend frontend(service);
      const auto colon = s_listen.rfind(':');
      if (colon == std::string::npos) throw pbc::InvalidParameterError("--listen expects host:port");
      const int port = frontend.bind(s_listen.substr(0, colon), std::stoi(s_listen.substr(colon + 1)));
      g_frontend = &frontend;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on " << s_listen.substr(0, colon) << ':' << port << " (k = " << s_k << ", " << s_fn
                << ")\n";
      frontend.listen();
      g_frontend = nullptr;
    } else if (*attack) {
      std::vector<pbc::AttackEstimate> rows;
      if (a_dblp) rows = pbc::dblp_preset();
      if (!a_n.empty()) {
        const std::vector<unsigned> ks = a_k.empty() ? std::vector<unsigned>{1, 2, 3} : a_k;
        const auto more = pbc::sweep(ks, a_n, a_per_hash);
        rows.insert(rows.end(), more.begin(), more.end());
      }
      if (!rows.empty()) std::cout << (a_csv ? pbc::sweep_csv(rows) : pbc::sweep_table(rows));
      if (a_budget_hours > 0) {
        const std::vector<unsigned> ks = a_k.empty() ? std::vector<unsigned>{1, 2, 3} : a_k;
        for (unsigned k : ks) {
          const auto n = pbc::min_universe_for_budget(k, a_per_hash, a_budget_hours * pbc::kSecondsPerHour);
          std::cout << "k = " << k << ": more than " << a_budget_hours << " h per document once the universe has >= "
                    << n << " references\n";
        }
      }
      if (rows.empty() && a_budget_hours <= 0) {
        throw pbc::InvalidParameterError("nothing to do: give --dblp-preset, --n or --budget-hours");
      }
    } else if (*coll) {
      const auto [corpus, _] = pbc::load_corpus(c_corpus, c_k, c_max, common.threads);
      const auto n = pbc::count_collisions(corpus.documents, c_k, c_width, common.threads);
      if (common.json) {
        std::cout << json{{"k", c_k}, {"width", c_width}, {"collisions", n}}.dump() << '\n';
      } else {
        std::cout << "collisions (k = " << c_k << ", " << c_width << "-bit): " << n << '\n';
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
