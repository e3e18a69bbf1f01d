import numpy as np
import pytest

from isoalign.cli import main
from isoalign.results import make_record, write_records
from isoalign.spaces import EmbeddingSpace, load_embeddings, save_embeddings

WORDS = tuple(f"w{i}" for i in range(8))

TRAIN_FLAGS = [
    "--dim", "8", "--window", "2", "--negatives", "2", "--epochs", "1",
    "--min-count", "1", "--subsample", "1.0", "--no-subwords",
]


@pytest.fixture
def workspace(tmp_path):
    lines = []
    for i in range(40):
        lines.append(" ".join(WORDS[(i + j) % 8] for j in range(8)))
    corpus = tmp_path / "corpus.txt"
    corpus.write_text("\n".join(lines) + "\n")

    rng = np.random.default_rng(31)
    src = EmbeddingSpace(WORDS, rng.normal(size=(8, 6)), counts=range(80, 72, -1))
    q, _ = np.linalg.qr(rng.normal(size=(6, 6)))
    tgt = EmbeddingSpace(WORDS, src.matrix @ q, counts=range(80, 72, -1))
    save_embeddings(src, tmp_path / "source.vec")
    save_embeddings(tgt, tmp_path / "target.vec")

    dictionary = tmp_path / "dict.tsv"
    dictionary.write_text("".join(f"{w}\t{w}\n" for w in WORDS))
    return tmp_path


def test_requires_subcommand():
    with pytest.raises(SystemExit):
        main([])


def test_train_writes_snapshots_and_final(workspace, capsys):
    out = workspace / "vecs" / "run"
    out.parent.mkdir()
    rc = main(
        ["train", "--corpus", str(workspace / "corpus.txt"), "--out", str(out),
         "--budgets", "100", "200"] + TRAIN_FLAGS
    )
    assert rc == 0
    for name in ("run.100.vec", "run.200.vec", "run.final.vec"):
        assert (workspace / "vecs" / name).exists()
    lines = capsys.readouterr().out.splitlines()
    assert "budget=100" in lines[0]
    assert "budget=200" in lines[1]
    assert "consumed=320" in lines[2]
    space = load_embeddings(workspace / "vecs" / "run.final.vec")
    assert set(space.words) == set(WORDS)


def test_sample_writes_nested_files(workspace, capsys):
    out = workspace / "sampled"
    rc = main(
        ["sample", "--corpus", str(workspace / "corpus.txt"),
         "--sizes", "5", "10", "--out", str(out), "--seed", "3"]
    )
    assert rc == 0
    five = (workspace / "sampled.5.txt").read_text().splitlines()
    ten = (workspace / "sampled.10.txt").read_text().splitlines()
    assert len(five) == 5 and len(ten) == 10
    assert ten[:5] == five
    assert "sentences=5" in capsys.readouterr().out


def test_topic_sample(workspace, capsys):
    (workspace / "a.txt").write_text(
        "#doc d1\n" + "".join(f"alpha{i} beta{i} gamma{i}\n" for i in range(10))
    )
    (workspace / "b.txt").write_text("#doc d1\nuno dos tres cuatro\n")
    (workspace / "pairs.tsv").write_text("d1\td1\n")
    out = workspace / "adjusted.txt"
    rc = main(
        ["topic-sample", "--corpus", str(workspace / "a.txt"),
         "--aligned", str(workspace / "b.txt"),
         "--alignment", str(workspace / "pairs.tsv"), "--out", str(out)]
    )
    assert rc == 0
    assert out.exists()
    # 3-token sentences against a budget of 4: exactly two are taken
    assert "tokens=6/4" in capsys.readouterr().out


def test_align_then_bli_roundtrip(workspace, capsys):
    mapped = workspace / "mapped.vec"
    rc = main(
        ["align", "--source", str(workspace / "source.vec"),
         "--target", str(workspace / "target.vec"),
         "--dict", str(workspace / "dict.tsv"), "--out", str(mapped),
         "--save-map", str(workspace / "w.txt"), "--preproc", "unnorm"]
    )
    assert rc == 0
    out = capsys.readouterr().out
    assert "rotation solved on 8 dictionary pairs" in out
    w = np.loadtxt(workspace / "w.txt")
    np.testing.assert_allclose(w @ w.T, np.eye(6), atol=1e-8)

    per_query = workspace / "per_query.csv"
    rc = main(
        ["bli", "--source", str(mapped), "--target", str(workspace / "target.vec"),
         "--dict", str(workspace / "dict.tsv"), "--out", str(per_query)]
    )
    assert rc == 0
    out = capsys.readouterr().out
    assert "mrr=1 coverage=1 n=8" in out
    rows = per_query.read_text().splitlines()
    assert rows[0] == "query,gold,rank,rr"
    assert len(rows) == 9
    assert all(row.endswith(",1,1") for row in rows[1:])


def test_align_selflearn_reports_rounds(workspace, capsys):
    rc = main(
        ["align", "--source", str(workspace / "source.vec"),
         "--target", str(workspace / "target.vec"),
         "--dict", str(workspace / "dict.tsv"), "--dict-size", "4",
         "--out", str(workspace / "mapped_sl.vec"), "--preproc", "unnorm",
         "--selflearn", "--topf", "8", "--rounds", "5"]
    )
    assert rc == 0
    assert "self-learning:" in capsys.readouterr().out


def test_iso_reports_metrics(workspace, capsys):
    rc = main(
        ["iso", "--source", str(workspace / "source.vec"),
         "--target", str(workspace / "target.vec"),
         "--metrics", "evs,gh,rsim", "--dict", str(workspace / "dict.tsv"),
         "--topn", "8", "--knn", "3", "--pairs", "3"]
    )
    assert rc == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "metric,n_top,k,preproc,value"
    values = {}
    for line in lines[1:]:
        fields = line.split(",")
        assert fields[3] == "unnorm"
        values[fields[0]] = float(fields[4])
    # the target is a rotated copy, so every score should say "isometric"
    assert values["evs"] == pytest.approx(0.0, abs=1e-8)
    assert values["gh"] == pytest.approx(0.0, abs=1e-6)
    assert values["rsim"] > 0.999


def test_iso_rejects_unknown_metric(workspace):
    with pytest.raises(SystemExit, match="unknown metric"):
        main(
            ["iso", "--source", str(workspace / "source.vec"),
             "--target", str(workspace / "target.vec"), "--metrics", "banana"]
        )


def test_experiment_subcommand(workspace, capsys):
    conf = workspace / "exp.conf"
    conf.write_text(
        "output.dir = out\n"
        "pair = p1:source.vec:corpus.txt\n"
        "grid.kind = size\n"
        "grid.sizes = 10 20\n"
        "seeds = 1\n"
        "metrics = rsim\n"
        "dict.test = dict.tsv\n"
        "iso.pairs = 3\n"
        "train.dim = 6\ntrain.window = 2\ntrain.negatives = 2\n"
        "train.lr = 0.05\ntrain.epochs = 1\ntrain.min_count = 1\n"
        "train.subsample = 1.0\ntrain.subwords = off\n"
    )
    rc = main(["experiment", "--config", str(conf)])
    assert rc == 0
    assert "done=2 skipped=0 failed=0" in capsys.readouterr().out
    assert (workspace / "out" / "records.csv").exists()


def gap_records():
    rows = []
    for pair, scores in (("en-es", (0.757, 0.9)), ("en-XX", (0.466, 0.7))):
        for value, score in zip((10, 50), scores):
            rows.append(
                make_record(pair, "size", value, "l2+mc+l2", "seed", "off", 1,
                            "mrr", score)
            )
    return rows


def test_gap_subcommand(workspace, capsys):
    records = workspace / "records.csv"
    write_records(gap_records(), records)
    rc = main(
        ["gap", "--records", str(records), "--pair-a", "en-es",
         "--pair-b", "en-XX"]
    )
    assert rc == 0
    out = capsys.readouterr().out
    assert "kind,value,en-es,en-XX,gap" in out
    assert "size,10,0.757,0.466,0.291" in out
    assert "size,50,0.900,0.700,0.200" in out


def test_plot_subcommand(workspace, capsys):
    records = workspace / "records.csv"
    write_records(gap_records(), records)
    out = workspace / "plot.svg"
    rc = main(
        ["plot", "--records", str(records), "--out", str(out), "--fit"]
    )
    assert rc == 0
    text = capsys.readouterr().out
    assert str(out) in text
    assert "slope=" in text
    assert out.read_text().startswith("<svg ")
