import json
import math

import pytest

cf = pytest.importorskip("chronofact", reason="chronofact extension not installed")


def test_extract_and_sort():
    events = cf.extract_events(
        "Davie Dodds was a member of Dundee United F.C. before joining Arbroath F.C."
    )
    assert [e["predicate_tokens"] for e in events] == [["was", "a", "member"], ["joining"]]
    dated = cf.extract_events("Anna Novak lived in Vienna in 1990 and then worked for Summit Bank in 1980")
    assert cf.chronological_sort(json.dumps(dated)) == [1, 0]


def test_temporal_expression():
    span = cf.parse_temporal_expression("from 1975 until 1986")
    assert span["start"] == "1975-01-01"
    assert span["end"] == "1986-12-31"
    assert cf.parse_temporal_expression("no dates here") is None


def test_aggregation_and_rule():
    z = cf.godel_aggregate([[0.7, 0.2, 0.1], [0.6, 0.3, 0.1]], [0.9, 0.1])
    assert z == pytest.approx([0.6, 0.3, 0.1], abs=1e-15)
    assert cf.hard_rule(["SUP", "SUP"], "SUP") == "SUP"
    assert cf.hard_rule(["SUP", "NEI"], "SUP") == "NEI"
    assert cf.hard_rule(["SUP", "NEI"], "REF") == "REF"


def test_metrics():
    gold = ["SUP"] * 50 + ["REF"] * 50
    pred = ["SUP"] * 100
    assert cf.macro_f1(gold, pred, 2) == pytest.approx(1 / 3, abs=1e-12)
    assert cf.micro_f1(gold, pred, 2) == pytest.approx(0.5, abs=1e-12)


def test_errors_map_to_value_error():
    with pytest.raises(ValueError):
        cf.extract_events("")
    with pytest.raises(ValueError):
        cf.Model.fresh("mu = 3")


def test_generate_train_verify(tmp_path):
    data = cf.generate(120, [("train", 24), ("val", 12)], seed=3)
    assert len(data["train"]) == 24
    labels = [r["claim"]["gold"]["claim_label"] for r in data["train"]]
    assert labels.count("SUP") == labels.count("REF")
    for split, rows in data.items():
        (tmp_path / f"{split}.jsonl").write_text("".join(json.dumps(r) + "\n" for r in rows))
    cfg = "dim = 16\nfc_hidden = 16\nlstm_hidden = 4\nlstm_layers = 1\nepochs = 1\n"
    ckpt = tmp_path / "model.bin"
    best, diverged = cf.train(cfg, tmp_path / "train.jsonl", tmp_path / "val.jsonl", ckpt)
    assert not diverged
    assert 0.0 <= best <= 1.0
    model = cf.Model.load(ckpt)
    out = model.verify(
        "Georgi Andonov played for Botev Plovdiv and then joined Levski Sofia",
        [
            "Georgi Andonov is a member of the Levski Sofia from 2010 until 2015",
            "Georgi Andonov is a member of the Botev Plovdiv from 2002 until 2006",
        ],
    )
    assert out["claim_label"] in ("SUP", "REF")
    assert math.isclose(sum(out["claim_dist"]), 1.0, abs_tol=1e-9)
    rendered = out["rendered"]
    assert rendered.index("2002") < rendered.index("2010")
    empty = model.verify("Israel attacks Hamas", [])
    assert empty["empty_evidence"] is True
