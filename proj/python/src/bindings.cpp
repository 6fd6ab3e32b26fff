#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <fstream>
#include <sstream>

#include "pbc/attackcost.hpp"
#include "pbc/combinatorics.hpp"
#include "pbc/errors.hpp"
#include "pbc/indexstore.hpp"
#include "pbc/ingest.hpp"
#include "pbc/psihash.hpp"
#include "pbc/refmodel.hpp"
#include "pbc/similarity.hpp"
#include "pbc/synth.hpp"

namespace py = pybind11;
using namespace pbc;

namespace {

py::object to_fraction(const Fraction& f) {
  static py::object cls = py::module_::import("fractions").attr("Fraction");
  return cls(f.num(), f.den());
}

py::int_ to_pyint(u128 v) {
  return py::reinterpret_steal<py::int_>(PyLong_FromString(to_string(v).c_str(), nullptr, 10));
}

CombineMode mode_of(const std::string& name) {
  if (name == "sum") return CombineMode::ModularSum;
  if (name == "concat") return CombineMode::SortedConcatSha1;
  return combine_mode_from_id(name);
}

std::vector<std::string> hex_list(const HashSet& s) {
  std::vector<std::string> out;
  out.reserve(s.hashes.size());
  for (const auto& h : s.hashes) out.push_back(h.hex());
  return out;
}

HashSet make_hashset(std::string doc_id, std::size_t k, const std::vector<std::string>& hashes,
                     std::string hash_fn_id) {
  HashSet s;
  s.doc_id = std::move(doc_id);
  s.k = k;
  s.hash_fn_id = std::move(hash_fn_id);
  for (const auto& h : hashes) s.hashes.push_back(Digest::from_hex(h));
  s.canonicalize();
  return s;
}

Document make_document(std::string doc_id, const std::vector<std::string>& titles) {
  std::vector<Reference> refs;
  refs.reserve(titles.size());
  for (const auto& t : titles) refs.push_back(Reference::from_title(t));
  return Document(std::move(doc_id), refs);
}

py::dict overlap_dict(const PairResult& r) {
  py::dict d;
  d["doc_a"] = r.doc_id_a;
  d["doc_b"] = r.doc_id_b;
  d["intersection"] = r.intersection_hashes;
  d["s_pbc"] = to_fraction(r.s_pbc);
  d["s_bc_recovered"] = r.s_bc_recovered ? to_fraction(*r.s_bc_recovered) : py::none();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Privacy-preserving bibliographic coupling";

  static py::exception<Error> base(m, "PbcError");
  static py::exception<EmptyKeyError> empty_key(m, "EmptyKeyError", base.ptr());
  static py::exception<MalformedRecordError> malformed(m, "MalformedRecordError", base.ptr());
  static py::exception<IoError> io(m, "IoError", base.ptr());
  static py::exception<CorruptFileError> corrupt(m, "CorruptFileError", base.ptr());
  static py::exception<TooFewRefsError> too_few(m, "TooFewRefsError", base.ptr());
  static py::exception<EmptySetError> empty_set(m, "EmptySetError", base.ptr());
  static py::exception<ConfigMismatchError> mismatch(m, "ConfigMismatchError", base.ptr());
  static py::exception<NotBinomialError> not_binomial(m, "NotBinomialError", base.ptr());
  static py::exception<InvalidParameterError> invalid(m, "InvalidParameterError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const EmptyKeyError& e) {
      PyErr_SetString(empty_key.ptr(), e.what());
    } catch (const MalformedRecordError& e) {
      PyErr_SetString(malformed.ptr(), e.what());
    } catch (const IoError& e) {
      PyErr_SetString(io.ptr(), e.what());
    } catch (const CorruptFileError& e) {
      PyErr_SetString(corrupt.ptr(), e.what());
    } catch (const TooFewRefsError& e) {
      PyErr_SetString(too_few.ptr(), e.what());
    } catch (const EmptySetError& e) {
      PyErr_SetString(empty_set.ptr(), e.what());
    } catch (const ConfigMismatchError& e) {
      PyErr_SetString(mismatch.ptr(), e.what());
    } catch (const NotBinomialError& e) {
      PyErr_SetString(not_binomial.ptr(), e.what());
    } catch (const InvalidParameterError& e) {
      PyErr_SetString(invalid.ptr(), e.what());
    } catch (const Error& e) {
      PyErr_SetString(base.ptr(), e.what());
    }
  });

  m.attr("DEFAULT_HASH_FN_ID") = kDefaultHashFnId;

  m.def("normalize_title", &normalize_title, py::arg("title"));
  m.def("digest_reference", [](const std::string& key) { return digest_reference(key).hex(); }, py::arg("norm_key"));

  py::class_<HashSet>(m, "HashSet")
      .def(py::init(&make_hashset), py::arg("doc_id"), py::arg("k"), py::arg("hashes"),
           py::arg("hash_fn_id") = kDefaultHashFnId)
      .def_readonly("doc_id", &HashSet::doc_id)
      .def_readonly("k", &HashSet::k)
      .def_readonly("hash_fn_id", &HashSet::hash_fn_id)
      .def_property_readonly("hashes", &hex_list)
      .def("__len__", &HashSet::size)
      .def("__contains__", [](const HashSet& s, const std::string& hex) { return s.contains(Digest::from_hex(hex)); })
      .def("__eq__", [](const HashSet& a, const HashSet& b) { return a == b; })
      .def("__repr__", [](const HashSet& s) {
        return "<HashSet " + s.doc_id + " k=" + std::to_string(s.k) + " size=" + std::to_string(s.size()) + ">";
      });

  m.def(
      "hash_titles",
      [](const std::string& doc_id, const std::vector<std::string>& titles, std::size_t k, const std::string& combine) {
        return hash_document(make_document(doc_id, titles), k, mode_of(combine));
      },
      py::arg("doc_id"), py::arg("titles"), py::arg("k"), py::arg("combine") = "sum",
      "Normalizes, deduplicates and hashes every k-subset of a reference list.");
  m.def(
      "hash_keys",
      [](const std::string& doc_id, const std::vector<std::string>& keys, std::size_t k, const std::string& combine) {
        return hash_keys(doc_id, keys, k, mode_of(combine));
      },
      py::arg("doc_id"), py::arg("norm_keys"), py::arg("k"), py::arg("combine") = "sum");

  m.def(
      "bc_strength",
      [](const std::vector<std::string>& a, const std::vector<std::string>& b) { return to_fraction(bc_strength(a, b)); },
      py::arg("refs_a"), py::arg("refs_b"));
  m.def(
      "pbc_strength", [](const HashSet& a, const HashSet& b) { return to_fraction(pbc_strength(a, b)); }, py::arg("a"),
      py::arg("b"));
  m.def(
      "recovered_bc", [](const HashSet& a, const HashSet& b) { return to_fraction(recovered_bc(a, b)); }, py::arg("a"),
      py::arg("b"));
  m.def(
      "inverse_binomial",
      [](std::uint64_t j, unsigned k, bool strict) {
        return inverse_binomial(j, k, strict ? InverseMode::Strict : InverseMode::Tolerant);
      },
      py::arg("j"), py::arg("k"), py::arg("strict") = true);
  m.def(
      "binomial", [](std::uint64_t n, std::uint64_t k) { return to_pyint(binomial(n, k)); }, py::arg("n"), py::arg("k"));

  py::class_<AttackEstimate>(m, "AttackEstimate")
      .def_readonly("n_refs", &AttackEstimate::n_refs)
      .def_readonly("k", &AttackEstimate::k)
      .def_readonly("per_hash_seconds", &AttackEstimate::per_hash_seconds)
      .def_property_readonly("n_hashes", [](const AttackEstimate& e) { return to_pyint(e.n_hashes); })
      .def_property_readonly("runtime_seconds",
                             [](const AttackEstimate& e) { return static_cast<double>(e.runtime_seconds); })
      .def_property_readonly("runtime_hours", &AttackEstimate::runtime_hours)
      .def_property_readonly("runtime_years", &AttackEstimate::runtime_years)
      .def_property_readonly("runtime_human", &AttackEstimate::runtime_human);
  m.def("estimate", &estimate, py::arg("n_refs"), py::arg("k"), py::arg("per_hash_seconds") = 0.001);
  m.def("min_universe_for_budget", &min_universe_for_budget, py::arg("k"), py::arg("per_hash_seconds"),
        py::arg("budget_seconds"));
  m.def("dblp_preset", &dblp_preset);

  py::class_<InvertedIndex>(m, "InvertedIndex")
      .def(py::init<std::size_t, std::string>(), py::arg("k"), py::arg("hash_fn_id") = kDefaultHashFnId)
      .def_static(
          "build",
          [](const std::vector<HashSet>& sets, std::size_t k, const std::string& hash_fn_id) {
            return InvertedIndex::build(sets, k, hash_fn_id);
          },
          py::arg("sets"), py::arg("k"), py::arg("hash_fn_id") = kDefaultHashFnId)
      .def_static(
          "build_from_corpus",
          [](const std::filesystem::path& path, std::size_t k, std::size_t max_refs, const std::string& combine,
             unsigned threads) {
            py::gil_scoped_release release;
            const auto corpus = load_corpus(path, k, max_refs, threads).first;
            return InvertedIndex::build(corpus, k, mode_of(combine), threads);
          },
          py::arg("path"), py::arg("k"), py::arg("max_refs") = kDefaultMaxRefs, py::arg("combine") = "sum",
          py::arg("threads") = 0)
      .def_static("load", &InvertedIndex::load, py::arg("path"))
      .def("persist", &InvertedIndex::persist, py::arg("path"))
      .def("with_document", &InvertedIndex::with_document, py::arg("set"))
      .def_property_readonly("k", &InvertedIndex::k)
      .def_property_readonly("hash_fn_id", &InvertedIndex::hash_fn_id)
      .def_property_readonly("doc_ids", &InvertedIndex::doc_ids)
      .def_property_readonly("entry_count", &InvertedIndex::entry_count)
      .def_property_readonly("posting_count", &InvertedIndex::posting_count)
      .def("__len__", &InvertedIndex::doc_count)
      .def("postings", [](const InvertedIndex& idx, const std::string& hex) { return idx.postings(Digest::from_hex(hex)); })
      .def(
          "query",
          [](const InvertedIndex& idx, const HashSet& q, bool exclusive, bool exclude_self) {
            auto overlaps = exclusive ? idx.intersect_exclusive(q) : idx.intersect(q);
            if (exclude_self) std::erase_if(overlaps, [&](const Overlap& o) { return o.doc_id == q.doc_id; });
            py::list out;
            for (const auto& r : rank_candidates(q, overlaps)) out.append(overlap_dict(r));
            return out;
          },
          py::arg("query"), py::arg("exclusive") = false, py::arg("exclude_self") = false,
          "Ranked candidates: dicts with doc_a, doc_b, intersection, s_pbc, s_bc_recovered.")
      .def("histogram", [](const InvertedIndex& idx) {
        const auto h = idx.occurrence_histogram();
        py::dict d;
        d["total"] = h.total_hashes;
        d["in_1"] = h.in_1;
        d["in_2"] = h.in_2;
        d["in_3"] = h.in_3;
        d["ratio_in_1"] = to_fraction(h.ratio_in_1);
        return d;
      })
      .def("__eq__", [](const InvertedIndex& a, const InvertedIndex& b) { return a == b; });

  m.def(
      "load_corpus",
      [](const std::filesystem::path& path, std::size_t k, std::size_t max_refs) {
        const auto [corpus, stats] = load_corpus(path, k, max_refs);
        py::dict docs;
        for (const auto& d : corpus.documents) docs[py::str(d.doc_id)] = d.sorted_keys();
        py::dict st;
        st["n_docs_loaded"] = stats.n_docs_loaded;
        st["n_docs_excluded"] = stats.n_docs_excluded;
        st["n_unique_refs"] = stats.n_unique_refs;
        st["n_refs_rejected"] = stats.n_refs_rejected;
        return py::make_tuple(docs, st);
      },
      py::arg("path"), py::arg("k"), py::arg("max_refs") = kDefaultMaxRefs,
      "Returns ({doc_id: sorted norm_keys}, stats) for the eligible documents.");

  m.def(
      "generate_corpus",
      [](const std::filesystem::path& out, std::size_t n_docs, std::size_t min_refs, std::size_t max_refs,
         std::size_t pool_size, std::size_t planted_pairs, std::size_t planted_overlap, std::uint64_t seed) {
        GenSpec spec{n_docs, min_refs, max_refs, pool_size, planted_pairs, planted_overlap, seed};
        const auto records = generate_corpus(spec);
        std::ostringstream text;
        write_records(text, records);
        std::ofstream file(out, std::ios::binary);
        if (!(file << text.str())) throw IoError("cannot write " + out.string());
        return records.size();
      },
      py::arg("out"), py::arg("n_docs") = 1000, py::arg("min_refs") = 10, py::arg("max_refs") = 50,
      py::arg("pool_size") = 20000, py::arg("planted_pairs") = 0, py::arg("planted_overlap") = 5, py::arg("seed") = 1,
      "Writes a synthetic JSONL corpus and returns the number of documents.");
}
