"""End-to-end smoke coverage for the python bindings."""

import pytest

import dnazen as dz


def periodic(pattern, length):
    return (pattern * (length // len(pattern) + 1))[:length]


@pytest.fixture(scope="module")
def corpus():
    patterns = ["AC", "GT", "AG", "CT"]
    return [periodic(p, 24) for p in patterns for _ in range(4)]


@pytest.fixture(scope="module")
def vocab(corpus):
    return dz.train_tokenizer(corpus, 12)


@pytest.fixture(scope="module")
def ggrams(corpus, vocab):
    return dz.build_ggram_vocab(corpus, vocab, theta=0.5, min_freq=2)


def tiny_model_config(vocab, ggrams):
    cfg = dz.ModelConfig()
    cfg.hidden = 16
    cfg.token_layers = 1
    cfg.ggram_layers = 1
    cfg.heads = 2
    cfg.token_vocab = len(vocab)
    cfg.ggram_vocab = len(ggrams)
    cfg.max_positions = 32
    cfg.max_ggrams = 8
    cfg.num_classes = 2
    return cfg


def test_sequence_cleaning():
    assert dz.clean_sequence("acgt") == "ACGT"
    assert dz.clean_sequence("AXGT") == "ANGT"
    with pytest.raises(dz.ValidationError):
        dz.clean_sequence("")


def test_tokenizer_round_trip(tmp_path, corpus, vocab):
    assert len(vocab) == 12
    ids = dz.encode(vocab, "ACGTACGT")
    assert ids[0] == dz.CLS_ID and ids[-1] == dz.SEP_ID
    assert all(i >= dz.NUM_SPECIALS for i in ids[1:-1])
    assert dz.decode(vocab, ids) == "ACGTACGT"

    path = tmp_path / "tokens.json"
    dz.save_token_vocab(vocab, path)
    reloaded = dz.load_token_vocab(path)
    assert len(reloaded) == 12
    assert dz.encode(reloaded, "ACGTACGT") == ids


def test_ggram_build_and_match(tmp_path, corpus, vocab, ggrams):
    assert len(ggrams) >= 1
    ids = dz.encode(vocab, corpus[0], add_specials=False)
    matches = dz.match_ggrams(ggrams, ids)
    assert matches, "the vocabulary was built from this corpus"
    for match in matches:
        assert 0 <= match["start"] < match["end"] <= len(ids)
        assert 0 <= match["ggram_id"] < len(ggrams)

    path = tmp_path / "ggrams.jsonl"
    dz.save_ggram_vocab(ggrams, vocab, path)
    assert len(dz.load_ggram_vocab(path)) == len(ggrams)


def test_pretrain_and_predict(tmp_path, corpus, vocab, ggrams):
    tcfg = dz.TrainConfig()
    tcfg.max_steps = 3
    tcfg.batch_size = 4
    tcfg.lr = 1e-3
    result = dz.pretrain(corpus, vocab, ggrams, tiny_model_config(vocab, ggrams), tcfg,
                         out_dir=tmp_path / "run")
    assert result["steps"] == 3
    assert not result["aborted"]
    assert len(result["losses"]) == 3
    assert (tmp_path / "run" / "metrics.jsonl").exists()

    state = dz.load_model(result["checkpoint"])
    assert state.config.hidden == 16
    assert dz.predict(state, vocab, ggrams, "ACACACAC") in (0, 1)


def test_finetune_runs(tmp_path, vocab, ggrams):
    task = tmp_path / "task"
    task.mkdir()
    rows = ["sequence,label"]
    for i in range(8):
        rows.append(f"{periodic('AC', 12)},0")
        rows.append(f"{periodic('GT', 12)},1")
    (task / "train.csv").write_text("\n".join(rows) + "\n")
    (task / "dev.csv").write_text("\n".join(rows[:9]) + "\n")

    state = dz.make_model(tiny_model_config(vocab, ggrams), seed=1)
    tcfg = dz.TrainConfig()
    tcfg.epochs = 2
    tcfg.batch_size = 4
    tcfg.lr = 2e-3
    summary = dz.finetune(task, state, vocab, ggrams, tcfg, [1])
    assert len(summary["runs"]) == 1
    assert summary["runs"][0]["seed"] == 1
    assert len(summary["runs"][0]["dev_history"]) == 2
    assert -1.0 <= summary["mean_dev_mcc"] <= 1.0
    assert "mean_test_mcc" not in summary  # no test.csv


def test_mcc_anchors():
    assert dz.mcc([[5, 0], [0, 5]]) == pytest.approx(1.0)
    assert dz.mcc([[0, 5], [5, 0]]) == pytest.approx(-1.0)
    assert dz.mcc([[2, 2], [2, 2]]) == pytest.approx(0.0)
    with pytest.raises(dz.ValidationError):
        dz.mcc([[1, 2, 3], [4, 5, 6]])


def test_errors_map_to_python_exceptions():
    with pytest.raises(dz.ValidationError):
        dz.train_tokenizer(["ACGT"], 3)  # below specials + alphabet
    cfg = dz.ModelConfig()
    cfg.heads = 3  # does not divide the hidden width
    with pytest.raises(dz.ValidationError):
        cfg.validate()


def test_cli_round_trip(capfd):
    assert dz.cli_run(["--help"]) == 0
    help_text = capfd.readouterr().out
    assert "pretrain" in help_text and "ggram-build" in help_text
    assert dz.cli_run(["frobnicate"]) == 1
