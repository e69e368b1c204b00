import json

import numpy as np
import pytest

from kgtrace.cli import main
from kgtrace.datasets import (
    DatasetError, load_citation_dataset, load_bundled_kg_dataset,
    resolve_dataset,
)

CONTENT = (
    "p1\t1\t0\t0\tml\n"
    "p2\t0\t1\t0\tml\n"
    "p3\t0\t0\t1\tdb\n"
)
CITES = "p1\tp2\np2\tp3\np9\tp1\n"


def write_citation(tmp_path, content=CONTENT, cites=CITES, stem="toy"):
    (tmp_path / f"{stem}.content").write_text(content)
    (tmp_path / f"{stem}.cites").write_text(cites)
    return tmp_path / stem


class TestCitationLoader:
    def test_basic_shapes(self, tmp_path):
        stem = write_citation(tmp_path)
        b = load_citation_dataset(f"{stem}.content", f"{stem}.cites")
        assert b.graph.n == 3
        assert b.graph.edges == ((0, 1), (1, 2))
        np.testing.assert_array_equal(b.graph.features, np.eye(3))
        assert b.class_names == ("db", "ml")
        np.testing.assert_array_equal(b.labels, [1, 1, 0])

    def test_dangling_citation_dropped_and_counted(self, tmp_path):
        stem = write_citation(tmp_path)
        b = load_citation_dataset(f"{stem}.content", f"{stem}.cites")
        assert b.dropped_edges == 1

    def test_duplicate_id_rejected(self, tmp_path):
        stem = write_citation(tmp_path, content=CONTENT + "p1\t1\t1\t1\tml\n")
        with pytest.raises(DatasetError, match="duplicate id"):
            load_citation_dataset(f"{stem}.content", f"{stem}.cites")

    def test_bad_feature_value(self, tmp_path):
        stem = write_citation(tmp_path, content="p1\tx\tml\n")
        with pytest.raises(DatasetError, match=":1:"):
            load_citation_dataset(f"{stem}.content", f"{stem}.cites")

    def test_ragged_features_rejected(self, tmp_path):
        stem = write_citation(tmp_path, content="p1\t1\t0\tml\np2\t1\tml\n")
        with pytest.raises(DatasetError, match="features"):
            load_citation_dataset(f"{stem}.content", f"{stem}.cites")

    def test_missing_file(self, tmp_path):
        with pytest.raises(DatasetError, match="no such file"):
            load_citation_dataset(tmp_path / "a.content", tmp_path / "a.cites")

    def test_resolve_kg(self):
        b = resolve_dataset("kg")
        assert b.name == "kg"
        assert b.graph.n == 247
        assert len(b.class_names) == 4

    def test_resolve_stem(self, tmp_path):
        stem = write_citation(tmp_path)
        b = resolve_dataset(str(stem))
        assert b.name == "toy"

    def test_resolve_missing(self, tmp_path):
        with pytest.raises(DatasetError, match="expected files"):
            resolve_dataset(str(tmp_path / "nope"))

    def test_bundled_kg_dataset_identity_features(self):
        b = load_bundled_kg_dataset()
        np.testing.assert_array_equal(b.graph.features, np.eye(247))


@pytest.fixture(scope="module")
def trained(tmp_path_factory):
    """One small trained model on the bundled KG, reused across CLI tests."""
    out = tmp_path_factory.mktemp("model")
    rc = main(["--out", str(out), "--seed", "0",
               "train", "--dataset", "kg", "--epochs", "30"])
    assert rc == 0
    return out


class TestCliTrain:
    def test_outputs_exist(self, trained):
        assert (trained / "model.kgt").exists()
        history = (trained / "history.jsonl").read_text().strip().split("\n")
        assert len(history) == 30
        rec = json.loads(history[0])
        assert "recon_loss" in rec

    def test_rerun_byte_identical(self, tmp_path, capsys):
        args = ["train", "--dataset", "kg", "--epochs", "5"]
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["--out", str(a), "--seed", "3"] + args) == 0
        assert main(["--out", str(b), "--seed", "3"] + args) == 0
        assert (a / "model.kgt").read_bytes() == (b / "model.kgt").read_bytes()
        assert (a / "history.jsonl").read_bytes() == \
            (b / "history.jsonl").read_bytes()

    def test_unknown_dataset_exit_2(self, tmp_path, capsys):
        rc = main(["--out", str(tmp_path), "train", "--dataset",
                   str(tmp_path / "ghost")])
        assert rc == 2
        assert "expected files" in capsys.readouterr().err


class TestCliClassify:
    def test_classify_runs(self, trained, tmp_path, capsys):
        rc = main(["--out", str(tmp_path), "classify",
                   "--model", str(trained / "model.kgt"), "--dataset", "kg"])
        assert rc == 0
        rec = json.loads((tmp_path / "classify.jsonl").read_text())
        assert rec["k"] == 4
        assert 0.0 <= rec["acc"] <= 1.0

    def test_k_flag_respected(self, trained, tmp_path, capsys):
        rc = main(["--out", str(tmp_path), "classify",
                   "--model", str(trained / "model.kgt"),
                   "--dataset", "kg", "--k", "7"])
        assert rc == 0
        rec = json.loads((tmp_path / "classify.jsonl").read_text())
        assert rec["k"] == 7


class TestCliLinkpred:
    def test_single_ratio_record(self, tmp_path, capsys):
        rc = main(["--out", str(tmp_path), "linkpred", "--dataset", "kg",
                   "--ratios", "10", "--epochs", "20"])
        assert rc == 0
        rec = json.loads((tmp_path / "linkpred.jsonl").read_text())
        assert rec["test_ratio"] == 0.1
        assert 0.0 <= rec["ap"] <= 1.0
        assert 0.0 <= rec["auc"] <= 1.0

    def test_bad_ratio_exit_2(self, tmp_path, capsys):
        rc = main(["--out", str(tmp_path), "linkpred",
                   "--ratios", "ten", "--dataset", "kg"])
        assert rc == 2


class TestCliTrace:
    def test_trace_writes_tree(self, trained, tmp_path, capsys):
        rc = main(["--out", str(tmp_path), "trace",
                   "--model", str(trained / "model.kgt"),
                   "--node", "regis success rate",
                   "--levels", "2", "--degree", "3"])
        assert rc == 0
        doc = json.loads((tmp_path / "tree.json").read_text())
        assert doc["l"] == 2 and doc["m"] == 3
        assert len(doc["edges"]) == 3 + 9
        out = capsys.readouterr().out
        assert "regis success rate" in out

    def test_unknown_node_suggests_names(self, trained, tmp_path, capsys):
        rc = main(["--out", str(tmp_path), "trace",
                   "--model", str(trained / "model.kgt"),
                   "--node", "regis sucess rate"])
        assert rc == 2
        assert "regis success rate" in capsys.readouterr().err


class TestCliExportValidate:
    def test_export(self, trained, tmp_path, capsys):
        rc = main(["--out", str(tmp_path), "export",
                   "--model", str(trained / "model.kgt"), "--dataset", "kg"])
        assert rc == 0
        lines = (tmp_path / "embeddings.tsv").read_text().strip().split("\n")
        assert len(lines) == 247

    def test_validate_bundled_clean(self, capsys):
        rc = main(["validate-kg"])
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["clean"] is True
        assert doc["category_counts"] == {
            "data_field_type": 132, "procedure_type": 40,
            "statistical_indicator": 73, "algorithm_indicator": 2,
        }

    def test_validate_dirty_schema_exit_2(self, tmp_path, capsys):
        doc = {
            "entities": [
                {"name": "a", "category": "statistical_indicator"},
                {"name": "lonely", "category": "data_field_type"},
            ],
            "relations": [],
        }
        path = tmp_path / "schema.json"
        path.write_text(json.dumps(doc))
        rc = main(["validate-kg", "--schema", str(path)])
        assert rc == 2
        out = json.loads(capsys.readouterr().out)
        assert out["clean"] is False
        assert set(out["isolated_nodes"]) == {"a", "lonely"}


class TestCliConfigAndUsage:
    def test_config_file_applies_and_flags_win(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"epochs": 2, "gan_weight": 0.0}))
        out = tmp_path / "out"
        rc = main(["--out", str(out), "--config", str(cfg),
                   "train", "--dataset", "kg", "--epochs", "4"])
        assert rc == 0
        history = (out / "history.jsonl").read_text().strip().split("\n")
        assert len(history) == 4  # flag beat the config file
        assert json.loads(history[0])["disc_loss"] is None  # config applied

    def test_bad_config_exit_2(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text("{not json")
        rc = main(["--config", str(cfg), "validate-kg"])
        assert rc == 2

    def test_no_command_exit_1(self, capsys):
        assert main([]) == 1

    def test_unknown_command_exit_1(self, capsys):
        assert main(["frobnicate"]) == 1

    def test_missing_required_flag_exit_1(self, capsys):
        assert main(["classify"]) == 1
