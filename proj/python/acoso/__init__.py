"""Cyberbullying text classification: corpus tooling, Zipf analysis and a CNN classifier."""

from pathlib import Path

from ._core import (  # noqa: F401
    AcosoError,
    CheckpointError,
    Checkpoint,
    LabeledText,
    ParseError,
    TrainingError,
    Vocabulary,
    ZipfFit,
    bce_loss,
    build_frequency,
    decode_sequence,
    encode_sequence,
    fit_zipf,
    fit_zipf_counts,
    format_percent,
    generate_synthetic_corpus,
    keyword_filter,
    load_corpus,
    load_keywords,
    load_stopwords,
    load_word_vectors,
    preprocess,
    rank_frequency,
    save_corpus,
    split_sizes,
    zipf_expected,
)
from ._core import run_cli as _run_cli

DATA_DIR = Path(__file__).resolve().parent / "data"


def shipped_stopwords():
    """The bundled Spanish stop-word list."""
    return load_stopwords(DATA_DIR / "stopwords_es.txt")


def shipped_keywords():
    """(bullying phrases, non-bullying phrases) from the bundled keyword files."""
    return (
        load_keywords(DATA_DIR / "keywords_bullying.txt"),
        load_keywords(DATA_DIR / "keywords_no_bullying.txt"),
    )


def run_cli(args):
    """Run a CLI subcommand in-process against the bundled data files.

    Returns (exit_code, stdout, stderr).
    """
    return _run_cli([str(a) for a in args], DATA_DIR)
