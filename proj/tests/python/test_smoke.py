import math

import pytest

import acoso


def test_preprocess_example():
    assert acoso.preprocess("Hola @juan mira https://t.co/x QUE PATÉTICO!!!", {"que"}) == [
        "hola",
        "mira",
        "patético",
    ]
    assert acoso.preprocess("") == []


def test_vocabulary_and_encoding():
    counts = acoso.build_frequency([["hola", "hola", "amigo"], ["hola"]])
    assert counts == {"hola": 3, "amigo": 1}
    vocab = acoso.Vocabulary.build(counts)
    assert vocab.index_of("hola") == 1
    assert vocab.oov_index == 3
    assert acoso.encode_sequence(["hola", "zzz"], vocab, 4) == [1, 3, 0, 0]


def test_zipf_fit():
    fit = acoso.fit_zipf_counts([round(1000 / r) for r in range(1, 101)])
    assert abs(fit.alpha - 1.0) <= 0.02
    assert acoso.zipf_expected(4, 2.0, 1.0) == 0.0625
    with pytest.raises(acoso.AcosoError):
        acoso.fit_zipf_counts([4, 4, 4])


def test_split_and_metrics():
    train, test = acoso.split_sizes(10, 0.9, 3)
    assert len(train) == 9 and len(test) == 1
    assert sorted(train + test) == list(range(10))
    assert acoso.format_percent((98.96 + 98.84 + 98.92 + 98.67) / 4) == "98.85"
    assert math.isclose(acoso.bce_loss(0.5, 1), math.log(2))


def test_shipped_data_and_synthetic_corpus():
    bullying, clean = acoso.shipped_keywords()
    assert len(bullying) == 30 and len(clean) == 21
    corpus = acoso.generate_synthetic_corpus(10, 30, bullying, clean, seed=4)
    assert len(corpus) == 40
    assert sum(r.label for r in corpus) == 10
    assert len(acoso.keyword_filter(corpus, bullying)) == 10
    assert "que" in acoso.shipped_stopwords()


def test_cli_train_and_predict(tmp_path):
    corpus = tmp_path / "c.csv"
    vecs = tmp_path / "v.txt"
    code, _, err = acoso.run_cli(
        ["synth", "--bullying", "150", "--clean", "350", "--seed", "3", "--out", corpus,
         "--vectors-out", vecs, "--dim", "16"])
    assert code == 0, err
    code, out, err = acoso.run_cli(
        ["train", "--corpus", corpus, "--embeddings", vecs, "--dim", "16", "--max-len", "16",
         "--epochs", "8", "--batch-size", "8", "--seed", "1", "--out", tmp_path / "m.ckpt",
         "--vocab-out", tmp_path / "vocab.tsv"])
    assert code == 0, err
    assert out.startswith("epoch,accuracy,loss")

    cp = acoso.Checkpoint.load(tmp_path / "m.ckpt")
    vocab = acoso.Vocabulary.load(tmp_path / "vocab.tsv")
    label, p = cp.predict("eres patetico kaba", vocab, acoso.shipped_stopwords())
    assert label == 1 and 0.5 <= p < 1.0
    assert len(cp.filter_widths) == 3

    assert acoso.run_cli(["nosuch"])[0] == 2
    with pytest.raises(acoso.CheckpointError):
        acoso.Checkpoint.load(corpus)
