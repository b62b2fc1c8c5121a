#include "acoso/cli.hpp"

#include "acoso/checkpoint.hpp"
#include "acoso/corpus.hpp"
#include "acoso/embeddings.hpp"
#include "acoso/error.hpp"
#include "acoso/eval.hpp"
#include "acoso/io.hpp"
#include "acoso/model.hpp"
#include "acoso/vocab.hpp"
#include "acoso/zipf.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#ifndef ACOSO_DATA_DIR
#define ACOSO_DATA_DIR "data"
#endif

namespace acoso::cli {

std::filesystem::path default_data_dir() { return ACOSO_DATA_DIR; }

namespace {

struct PreprocessFlags {
    std::string stopwords;
    bool no_stopwords = false;
    bool fold_accents = false;
    bool keep_non_letters = false;

    void attach(CLI::App& app) {
        app.add_option("--stopwords", stopwords, "Stop-word file, one token per line (default: shipped Spanish list)");
        app.add_flag("--no-stopwords", no_stopwords, "Disable stop-word removal");
        app.add_flag("--fold-accents", fold_accents, "Strip accents (ñ is kept)");
        app.add_flag("--keep-non-letters", keep_non_letters, "Skip the letters-only pass");
    }

    PreprocessConfig build(const std::filesystem::path& data_dir) const {
        PreprocessConfig cfg;
        cfg.fold_accents = fold_accents;
        cfg.keep_letters_only = !keep_non_letters;
        if (!no_stopwords) {
            const auto path = stopwords.empty() ? data_dir / "stopwords_es.txt"
                                                : std::filesystem::path(stopwords);
            cfg.stopwords = PreprocessConfig::load_stopwords(path);
        }
        return cfg;
    }
};

struct ModelFlags {
    std::string embeddings;
    std::size_t dim = 300;
    std::size_t max_len = kDefaultMaxLen;
    std::vector<std::size_t> widths{2, 3, 4};
    std::size_t filters = 32;
    double learning_rate = 0.5;
    bool fine_tune = false;
    std::size_t max_vocab = 0;

    void attach(CLI::App& app) {
        app.add_option("--embeddings", embeddings, "Word vectors in word2vec text format")->required();
        app.add_option("--dim", dim, "Embedding dimensionality")->capture_default_str();
        app.add_option("--max-len", max_len, "Sequence length")->capture_default_str();
        app.add_option("--widths", widths, "Comma-separated filter widths")
            ->delimiter(',')
            ->capture_default_str();
        app.add_option("--filters", filters, "Filters per width")->capture_default_str();
        app.add_option("--lr", learning_rate, "Gradient-descent learning rate")->capture_default_str();
        app.add_flag("--fine-tune", fine_tune, "Update embedding rows during training");
        app.add_option("--max-vocab", max_vocab, "Vocabulary cap (0 = unlimited)")->capture_default_str();
    }

    ModelConfig build(std::uint64_t seed) const {
        ModelConfig cfg;
        cfg.dim = dim;
        cfg.max_len = max_len;
        cfg.filter_widths = widths;
        cfg.filters_per_width = filters;
        cfg.learning_rate = learning_rate;
        cfg.fine_tune_embeddings = fine_tune;
        cfg.seed = seed;
        cfg.validate();
        return cfg;
    }

    std::optional<std::size_t> vocab_cap() const {
        return max_vocab == 0 ? std::nullopt : std::optional<std::size_t>(max_vocab);
    }
};

/// Corpus, vocabulary and embedding matrix prepared for training.
struct TrainingInputs {
    Vocabulary vocab;
    EncodedDataset dataset;
    std::shared_ptr<const EmbeddingMatrix> embedding;
};

TrainingInputs prepare_training(const std::string& corpus_path, const PreprocessConfig& pre,
                                const ModelFlags& model, std::ostream& err) {
    const auto corpus = load_corpus(corpus_path);
    if (corpus.empty()) {
        throw Error("corpus " + corpus_path + " has no records");
    }
    TrainingInputs in;
    in.vocab = build_vocabulary(build_frequency(preprocess_corpus(corpus, pre)), model.vocab_cap());
    in.dataset = encode_dataset(corpus, pre, in.vocab, model.max_len);
    const auto& vocab = in.vocab;
    const auto store = load_word_vectors(model.embeddings, model.dim,
                                         [&](const std::string& t) { return vocab.contains(t); });
    auto matrix = std::make_shared<EmbeddingMatrix>(build_embedding_matrix(in.vocab, store));
    err << "vocabulary: " << in.vocab.size() << " tokens, embedding coverage "
        << io::format_percent(100.0 * matrix->coverage) << "%\n";
    in.embedding = std::move(matrix);
    return in;
}

void write_output(const std::string& path, const std::string& contents, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << contents;
    } else {
        io::write_file_atomic(path, contents);
    }
}

std::vector<std::string> keyword_tokens(const KeywordSet& a, const KeywordSet& b) {
    std::set<std::string> tokens;
    for (const auto* set : {&a, &b}) {
        for (const auto& phrase : set->phrases()) {
            for (auto& t : preprocess(phrase, PreprocessConfig{})) {
                tokens.insert(std::move(t));
            }
        }
    }
    return {tokens.begin(), tokens.end()};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const std::filesystem::path& data_dir_arg) {
    const auto data_dir = data_dir_arg.empty() ? default_data_dir() : data_dir_arg;

    CLI::App app{"Spanish cyberbullying detection toolkit", "acoso"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a keyword-seeded synthetic corpus");
    SyntheticSpec spec;
    std::string synth_out;
    std::string kw_bullying;
    std::string kw_clean;
    std::string vectors_out;
    std::size_t vectors_dim = 50;
    synth->add_option("--bullying", spec.n_bullying, "Number of bullying texts")->required();
    synth->add_option("--clean", spec.n_clean, "Number of non-bullying texts")->required();
    synth->add_option("--seed", spec.seed, "Random seed")->capture_default_str();
    synth->add_option("--out", synth_out, "Output corpus CSV")->required();
    synth->add_option("--keywords-bullying", kw_bullying, "Bullying keyword file (default: shipped)");
    synth->add_option("--keywords-clean", kw_clean, "Non-bullying keyword file (default: shipped)");
    synth->add_option("--filler-vocab", spec.filler_vocab_size, "Filler vocabulary size")->capture_default_str();
    synth->add_option("--zipf-alpha", spec.zipf_alpha, "Zipf exponent of filler words")->capture_default_str();
    synth->add_option("--vectors-out", vectors_out, "Also write random word vectors covering the corpus vocabulary");
    synth->add_option("--dim", vectors_dim, "Dimensionality for --vectors-out")->capture_default_str();

    // preprocess
    auto* pre_cmd = app.add_subcommand("preprocess", "Normalize a corpus; text becomes space-joined tokens");
    std::string pre_corpus;
    std::string pre_out;
    std::string pre_filter;
    PreprocessFlags pre_flags;
    pre_cmd->add_option("--corpus", pre_corpus, "Input corpus CSV")->required();
    pre_cmd->add_option("--out", pre_out, "Output corpus CSV (default: stdout)");
    pre_cmd->add_option("--filter-keywords", pre_filter, "Keep only records matching a phrase from this keyword file");
    pre_flags.attach(*pre_cmd);

    // vocab
    auto* vocab_cmd = app.add_subcommand("vocab", "Build the frequency-ranked vocabulary");
    std::string vocab_corpus;
    std::string vocab_out;
    std::size_t vocab_max = 0;
    PreprocessFlags vocab_flags;
    vocab_cmd->add_option("--corpus", vocab_corpus, "Input corpus CSV")->required();
    vocab_cmd->add_option("--out", vocab_out, "Output vocabulary TSV (default: stdout)");
    vocab_cmd->add_option("--max-size", vocab_max, "Keep only the most frequent N tokens (0 = all)")->capture_default_str();
    vocab_flags.attach(*vocab_cmd);

    // zipf
    auto* zipf_cmd = app.add_subcommand("zipf", "Rank-frequency table and Zipf fit");
    std::string zipf_corpus;
    std::string zipf_out;
    std::size_t zipf_top = 100;
    std::size_t zipf_max_rank = 0;
    PreprocessFlags zipf_flags;
    zipf_cmd->add_option("--corpus", zipf_corpus, "Input corpus CSV")->required();
    zipf_cmd->add_option("--out", zipf_out, "Plot-data CSV")->required();
    zipf_cmd->add_option("--top", zipf_top, "Ranks to export")->capture_default_str();
    zipf_cmd->add_option("--max-rank", zipf_max_rank, "Fit only ranks 1..N (0 = all)")->capture_default_str();
    zipf_flags.attach(*zipf_cmd);

    // train
    auto* train_cmd = app.add_subcommand("train", "Train on the full corpus and keep the best epoch");
    std::string train_corpus;
    std::string train_out;
    std::string train_vocab_out;
    std::size_t train_epochs = 8;
    std::size_t train_batch = 32;
    std::uint64_t train_seed = 0;
    PreprocessFlags train_pre;
    ModelFlags train_model;
    train_cmd->add_option("--corpus", train_corpus, "Training corpus CSV")->required();
    train_cmd->add_option("--out", train_out, "Checkpoint file")->required();
    train_cmd->add_option("--vocab-out", train_vocab_out, "Vocabulary TSV")->required();
    train_cmd->add_option("--epochs", train_epochs, "Epochs")->capture_default_str();
    train_cmd->add_option("--batch-size", train_batch, "Mini-batch size")->capture_default_str();
    train_cmd->add_option("--seed", train_seed, "Random seed")->capture_default_str();
    train_pre.attach(*train_cmd);
    train_model.attach(*train_cmd);

    // crossval
    auto* cv_cmd = app.add_subcommand("crossval", "Repeated random-split validation with per-epoch checkpoints");
    std::string cv_corpus;
    std::string cv_out_dir = "crossval_out";
    TrainConfig cv_train;
    PreprocessFlags cv_pre;
    ModelFlags cv_model;
    cv_cmd->add_option("--corpus", cv_corpus, "Corpus CSV")->required();
    cv_cmd->add_option("--out-dir", cv_out_dir, "Output directory")->capture_default_str();
    cv_cmd->add_option("--iterations", cv_train.iterations, "Independent split/train iterations")->capture_default_str();
    cv_cmd->add_option("--epochs", cv_train.epochs, "Epochs per iteration")->capture_default_str();
    cv_cmd->add_option("--train-fraction", cv_train.train_fraction, "Training share of each split")->capture_default_str();
    cv_cmd->add_option("--batch-size", cv_train.batch_size, "Mini-batch size")->capture_default_str();
    cv_cmd->add_option("--seed", cv_train.seed, "Master seed")->capture_default_str();
    cv_cmd->add_option("--jobs", cv_train.jobs, "Iterations trained in parallel")->capture_default_str();
    cv_pre.attach(*cv_cmd);
    cv_model.attach(*cv_cmd);

    // predict
    auto* pred_cmd = app.add_subcommand("predict", "Score one text per input line as label,probability");
    std::string pred_ckpt;
    std::string pred_vocab;
    std::string pred_in;
    std::string pred_out;
    PreprocessFlags pred_pre;
    pred_cmd->add_option("--checkpoint", pred_ckpt, "Checkpoint file")->required();
    pred_cmd->add_option("--vocab", pred_vocab, "Vocabulary TSV used at training time")->required();
    pred_cmd->add_option("--input", pred_in, "Input text file (default: stdin)");
    pred_cmd->add_option("--out", pred_out, "Output file (default: stdout)");
    pred_pre.attach(*pred_cmd);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        const auto* target = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        out << target->help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        err << "run with --help for usage\n";
        return kUsageError;
    }

    try {
        if (synth->parsed()) {
            const auto bullying = KeywordSet::load(
                kw_bullying.empty() ? data_dir / "keywords_bullying.txt" : std::filesystem::path(kw_bullying),
                Label::bullying);
            const auto clean = KeywordSet::load(
                kw_clean.empty() ? data_dir / "keywords_no_bullying.txt" : std::filesystem::path(kw_clean),
                Label::clean);
            const auto corpus = generate_synthetic_corpus(spec, bullying, clean);
            save_corpus(synth_out, corpus);
            if (!vectors_out.empty()) {
                if (vectors_dim == 0) {
                    throw Error("--dim must be at least 1");
                }
                auto tokens = keyword_tokens(bullying, clean);
                for (std::size_t r = 1; r <= spec.filler_vocab_size; ++r) {
                    tokens.push_back(filler_word(r));
                }
                io::write_file_atomic(vectors_out,
                                      format_random_vectors(tokens, vectors_dim,
                                                            rng::derive_seed(spec.seed, 0x7ec)));
            }
            err << "wrote " << corpus.size() << " records to " << synth_out << "\n";
        } else if (pre_cmd->parsed()) {
            auto corpus = load_corpus(pre_corpus);
            if (!pre_filter.empty()) {
                corpus = keyword_filter(corpus, KeywordSet::load(pre_filter, Label::bullying));
            }
            const auto cfg = pre_flags.build(data_dir);
            for (auto& rec : corpus) {
                const auto tokens = preprocess(rec.text, cfg);
                std::string joined;
                for (const auto& t : tokens) {
                    if (!joined.empty()) {
                        joined += ' ';
                    }
                    joined += t;
                }
                rec.text = std::move(joined);
            }
            write_output(pre_out, format_corpus(corpus), out);
        } else if (vocab_cmd->parsed()) {
            const auto corpus = load_corpus(vocab_corpus);
            const auto freq = build_frequency(preprocess_corpus(corpus, vocab_flags.build(data_dir)));
            const auto vocab = build_vocabulary(
                freq, vocab_max == 0 ? std::nullopt : std::optional<std::size_t>(vocab_max));
            write_output(vocab_out, vocab.serialize(), out);
        } else if (zipf_cmd->parsed()) {
            const auto corpus = load_corpus(zipf_corpus);
            const auto freq = build_frequency(preprocess_corpus(corpus, zipf_flags.build(data_dir)));
            const auto rf = rank_frequency(freq);
            const auto fit = fit_zipf(rf, zipf_max_rank == 0 ? std::nullopt
                                                            : std::optional<std::size_t>(zipf_max_rank));
            export_plot_data(rf, fit, zipf_out, zipf_top);
            out << "alpha," << io::format_double(fit.alpha) << "\n"
                << "log_log_r2," << io::format_double(fit.log_log_r2) << "\n"
                << "n_points," << fit.n_points << "\n"
                << "types," << rf.entries.size() << "\n"
                << "tokens," << freq.total() << "\n";
        } else if (train_cmd->parsed()) {
            const auto pre = train_pre.build(data_dir);
            auto inputs = prepare_training(train_corpus, pre, train_model, err);
            const auto cfg = train_model.build(train_seed);
            const auto result = run_iteration(inputs.dataset, EncodedDataset{}, cfg, inputs.embedding,
                                              train_epochs, train_batch, train_seed, 1);
            out << "epoch,accuracy,loss\n";
            for (const auto& cp : result.checkpoints) {
                out << cp.epoch << ',' << io::format_percent(100.0 * cp.train_accuracy) << ','
                    << io::format_double(cp.train_loss) << '\n';
            }
            const auto& best = result.report.selected;
            inputs.vocab.save(train_vocab_out);
            save_checkpoint(best, train_out);
            err << "selected epoch " << best.epoch << " -> " << train_out << "\n";
        } else if (cv_cmd->parsed()) {
            const auto pre = cv_pre.build(data_dir);
            auto inputs = prepare_training(cv_corpus, pre, cv_model, err);
            const auto cfg = cv_model.build(cv_train.seed);
            const std::filesystem::path dir(cv_out_dir);
            std::filesystem::create_directories(dir / "checkpoints");
            inputs.vocab.save(dir / "vocab.tsv");
            const auto result = cross_validate(
                inputs.dataset, cv_train, cfg, inputs.embedding, [&](const Checkpoint& cp) {
                    save_checkpoint(cp, dir / "checkpoints" /
                                            ("iter" + std::to_string(cp.iteration) + "_epoch" +
                                             std::to_string(cp.epoch) + ".ckpt"));
                });
            io::write_file_atomic(dir / "selection.csv", format_selection_table(result.report));
            const auto success = format_success_table(result.report);
            io::write_file_atomic(dir / "success.csv", success);
            out << success;
        } else if (pred_cmd->parsed()) {
            const auto cp = load_checkpoint(pred_ckpt);
            const auto vocab = Vocabulary::load(pred_vocab);
            const auto cfg = pred_pre.build(data_dir);
            std::ifstream file;
            if (!pred_in.empty() && pred_in != "-") {
                file.open(pred_in);
                if (!file) {
                    throw Error("cannot open " + pred_in);
                }
            }
            std::istream& in = file.is_open() ? file : std::cin;
            std::string result;
            std::string line;
            while (std::getline(in, line)) {
                if (!line.empty() && line.back() == '\r') {
                    line.pop_back();
                }
                const auto p = predict(cp.params, line, cfg, vocab);
                result += std::to_string(to_int(p.label)) + ',' + io::format_double(p.probability) + '\n';
            }
            write_output(pred_out, result, out);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kDomainError;
    }
    return kOk;
}

}  // namespace acoso::cli
