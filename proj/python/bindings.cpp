#include "acoso/checkpoint.hpp"
#include "acoso/cli.hpp"
#include "acoso/corpus.hpp"
#include "acoso/embeddings.hpp"
#include "acoso/error.hpp"
#include "acoso/eval.hpp"
#include "acoso/io.hpp"
#include "acoso/model.hpp"
#include "acoso/vocab.hpp"
#include "acoso/zipf.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace acoso;

namespace {

PreprocessConfig make_config(std::optional<std::set<std::string>> stopwords, bool fold_accents,
                             bool keep_letters_only) {
    PreprocessConfig cfg;
    cfg.stopwords = stopwords.value_or(std::set<std::string>{});
    cfg.fold_accents = fold_accents;
    cfg.keep_letters_only = keep_letters_only;
    return cfg;
}

Label to_label(int v) {
    if (v != 0 && v != 1) {
        throw Error("label must be 0 or 1");
    }
    return static_cast<Label>(v);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Cyberbullying text classification pipeline";

    auto base = py::register_exception<Error>(m, "AcosoError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<TrainingError>(m, "TrainingError", base.ptr());
    py::register_exception<CheckpointError>(m, "CheckpointError", base.ptr());

    py::class_<LabeledText>(m, "LabeledText")
        .def(py::init([](std::string id, std::string text, int label) {
                 return LabeledText{std::move(id), std::move(text), to_label(label)};
             }),
             py::arg("id"), py::arg("text"), py::arg("label"))
        .def_readwrite("id", &LabeledText::id)
        .def_readwrite("text", &LabeledText::text)
        .def_property(
            "label", [](const LabeledText& t) { return to_int(t.label); },
            [](LabeledText& t, int v) { t.label = to_label(v); })
        .def("__eq__", [](const LabeledText& a, const LabeledText& b) { return a == b; })
        .def("__repr__", [](const LabeledText& t) {
            return "LabeledText(id=" + py::repr(py::str(t.id)).cast<std::string>() +
                   ", label=" + std::to_string(to_int(t.label)) + ")";
        });

    m.def("load_corpus", &load_corpus, py::arg("path"));
    m.def("save_corpus", &save_corpus, py::arg("path"), py::arg("corpus"));
    m.def("load_stopwords", &PreprocessConfig::load_stopwords, py::arg("path"));

    m.def(
        "preprocess",
        [](std::string_view text, std::optional<std::set<std::string>> stopwords, bool fold_accents,
           bool keep_letters_only) {
            return preprocess(text, make_config(std::move(stopwords), fold_accents, keep_letters_only));
        },
        py::arg("text"), py::arg("stopwords") = py::none(), py::arg("fold_accents") = false,
        py::arg("keep_letters_only") = true);

    m.def(
        "keyword_filter",
        [](const Corpus& corpus, std::vector<std::string> phrases) {
            return keyword_filter(corpus, KeywordSet(std::move(phrases), Label::bullying));
        },
        py::arg("corpus"), py::arg("phrases"));

    m.def(
        "load_keywords",
        [](const std::filesystem::path& path) { return KeywordSet::load(path, Label::bullying).phrases(); },
        py::arg("path"));

    m.def(
        "generate_synthetic_corpus",
        [](std::size_t n_bullying, std::size_t n_clean, std::vector<std::string> bullying_phrases,
           std::vector<std::string> clean_phrases, std::size_t filler_vocab_size, double zipf_alpha,
           std::uint64_t seed) {
            return generate_synthetic_corpus(
                {n_bullying, n_clean, filler_vocab_size, zipf_alpha, seed},
                KeywordSet(std::move(bullying_phrases), Label::bullying),
                KeywordSet(std::move(clean_phrases), Label::clean));
        },
        py::arg("n_bullying"), py::arg("n_clean"), py::arg("bullying_phrases"), py::arg("clean_phrases"),
        py::arg("filler_vocab_size") = 500, py::arg("zipf_alpha") = 1.0, py::arg("seed") = 0);

    m.def(
        "build_frequency",
        [](const std::vector<Tokens>& docs) { return build_frequency(docs).counts; }, py::arg("docs"));

    py::class_<Vocabulary>(m, "Vocabulary")
        .def_static(
            "build",
            [](const std::map<std::string, std::uint64_t>& counts, std::optional<std::size_t> max_size) {
                return Vocabulary::build(FrequencyTable{counts}, max_size);
            },
            py::arg("counts"), py::arg("max_size") = py::none())
        .def_static("load", &Vocabulary::load, py::arg("path"))
        .def("save", &Vocabulary::save, py::arg("path"))
        .def("__len__", &Vocabulary::size)
        .def("__contains__", &Vocabulary::contains)
        .def("index_of", &Vocabulary::index_of, py::arg("token"))
        .def("token_at", &Vocabulary::token_at, py::arg("index"))
        .def("count_at", &Vocabulary::count_at, py::arg("index"))
        .def_property_readonly("oov_index", &Vocabulary::oov_index)
        .def_property_readonly("tokens", &Vocabulary::tokens)
        .def("serialize", &Vocabulary::serialize)
        .def("__eq__", [](const Vocabulary& a, const Vocabulary& b) { return a == b; });

    m.def("encode_sequence", &encode_sequence, py::arg("tokens"), py::arg("vocab"),
          py::arg("max_len") = kDefaultMaxLen);
    m.def("decode_sequence", &decode_sequence, py::arg("sequence"), py::arg("vocab"));

    py::class_<ZipfFit>(m, "ZipfFit")
        .def_readonly("alpha", &ZipfFit::alpha)
        .def_readonly("intercept", &ZipfFit::intercept)
        .def_readonly("log_log_r2", &ZipfFit::log_log_r2)
        .def_readonly("n_points", &ZipfFit::n_points);

    m.def(
        "rank_frequency",
        [](const std::map<std::string, std::uint64_t>& counts) {
            std::vector<std::tuple<std::size_t, std::string, std::uint64_t>> out;
            for (const auto& e : rank_frequency(FrequencyTable{counts}).entries) {
                out.emplace_back(e.rank, e.token, e.count);
            }
            return out;
        },
        py::arg("counts"));
    m.def(
        "fit_zipf",
        [](const std::map<std::string, std::uint64_t>& counts, std::optional<std::size_t> max_rank) {
            return fit_zipf(rank_frequency(FrequencyTable{counts}), max_rank);
        },
        py::arg("counts"), py::arg("max_rank") = py::none());
    m.def(
        "fit_zipf_counts",
        [](const std::vector<std::uint64_t>& counts) {
            RankFrequency rf;
            for (std::size_t i = 0; i < counts.size(); ++i) {
                rf.entries.push_back({i + 1, "", counts[i]});
            }
            return fit_zipf(rf);
        },
        py::arg("counts"), "Fit a rank-ordered list of counts (rank 1 first).");
    m.def("zipf_expected", &zipf_expected, py::arg("rank"), py::arg("alpha"), py::arg("scale"));

    m.def(
        "load_word_vectors",
        [](const std::filesystem::path& path, std::size_t dim) {
            const auto store = load_word_vectors(path, dim);
            std::map<std::string, std::vector<double>> out;
            for (const auto& t : store.tokens()) {
                const auto v = store.find(t);
                out.emplace(t, std::vector<double>(v.begin(), v.end()));
            }
            return out;
        },
        py::arg("path"), py::arg("dim"));

    m.def("split_sizes", [](std::size_t n, double fraction, std::uint64_t seed) {
        EncodedDataset ds;
        ds.max_len = 1;
        ds.tweets.assign(n, Sequence{0});
        ds.labels.assign(n, Label::clean);
        for (std::size_t i = 0; i < n; ++i) ds.ids.push_back(std::to_string(i));
        const auto split = split_train_test(ds, fraction, seed);
        return std::make_pair(split.train_rows, split.test_rows);
    }, py::arg("n"), py::arg("fraction") = 0.9, py::arg("seed") = 0,
       "Row indices of the seeded train/test partition of n rows.");

    py::class_<Checkpoint>(m, "Checkpoint")
        .def_static("load", &load_checkpoint, py::arg("path"))
        .def("save", [](const Checkpoint& cp, const std::filesystem::path& p) { save_checkpoint(cp, p); })
        .def_readonly("iteration", &Checkpoint::iteration)
        .def_readonly("epoch", &Checkpoint::epoch)
        .def_readonly("train_accuracy", &Checkpoint::train_accuracy)
        .def_readonly("train_loss", &Checkpoint::train_loss)
        .def_property_readonly("max_len", [](const Checkpoint& cp) { return cp.params.config.max_len; })
        .def_property_readonly("dim", [](const Checkpoint& cp) { return cp.params.config.dim; })
        .def_property_readonly("filter_widths",
                               [](const Checkpoint& cp) { return cp.params.config.filter_widths; })
        .def(
            "forward",
            [](const Checkpoint& cp, const Sequence& x) { return forward(cp.params, x); },
            py::arg("sequence"))
        .def(
            "predict",
            [](const Checkpoint& cp, std::string_view text, const Vocabulary& vocab,
               std::optional<std::set<std::string>> stopwords, bool fold_accents) {
                const auto p = predict(cp.params, text, make_config(std::move(stopwords), fold_accents, true),
                                       vocab);
                return std::make_pair(to_int(p.label), p.probability);
            },
            py::arg("text"), py::arg("vocab"), py::arg("stopwords") = py::none(),
            py::arg("fold_accents") = false);

    m.def("bce_loss", [](double p, int y) { return bce_loss(p, to_label(y)); }, py::arg("p"), py::arg("y"));
    m.def("format_percent", &io::format_percent, py::arg("value"));

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args, const std::filesystem::path& data_dir) {
            std::ostringstream out;
            std::ostringstream err;
            int code;
            {
                py::gil_scoped_release release;
                code = cli::run(args, out, err, data_dir);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), py::arg("data_dir") = std::filesystem::path{},
        "Run one CLI subcommand in-process; returns (exit_code, stdout, stderr).");
}
