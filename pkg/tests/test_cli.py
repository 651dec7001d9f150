"""Command-line interface: emit modes, exit codes, debug dump, parity
with the HTTP service's rule serialization."""

import json

import pytest
from fastapi.testclient import TestClient

from cfsynth import create_app
from cfsynth.cli import main

from helpers import IDS

IDS_CSV = "id\n" + "\n".join(IDS) + "\n"

GW_RULE = {
    "format": "yellow",
    "disjuncts": [
        [
            {
                "negated": False,
                "predicate": {"kind": "startsWith", "type": "text", "args": ["GW"]},
            }
        ]
    ],
}


@pytest.fixture()
def workdir(tmp_path):
    table = tmp_path / "table.csv"
    table.write_text(IDS_CSV)
    examples = tmp_path / "examples.json"
    examples.write_text(
        json.dumps({"column": "id", "examples": [{"row": 3, "format": "yellow"}]})
    )
    rule = tmp_path / "rule.json"
    rule.write_text(json.dumps(GW_RULE))
    return tmp_path


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSuggestCommand:
    def test_emit_json(self, workdir, capsys):
        code, out, err = run(
            capsys,
            "suggest",
            "--input", str(workdir / "table.csv"),
            "--examples", str(workdir / "examples.json"),
        )
        assert code == 0
        rules = json.loads(out)
        assert len(rules) == 3
        assert all(set(r) == {"format", "disjuncts"} for r in rules)
        assert all(r["format"] == "yellow" for r in rules)

    def test_emit_formula(self, workdir, capsys):
        code, out, _ = run(
            capsys,
            "suggest",
            "--input", str(workdir / "table.csv"),
            "--examples", str(workdir / "examples.json"),
            "--emit", "formula",
        )
        assert code == 0
        lines = out.splitlines()
        assert lines == [
            'AND(ISNUMBER(SEARCH("GW1",A2)),NOT(A2="GW105-T"))',
            'AND(LEFT(A2,3)="GW1",NOT(A2="GW105-T"))',
            'AND(NOT(A2="AN47603-F"),NOT(ISNUMBER(SEARCH("T",A2))))',
        ]

    def test_emit_mask(self, workdir, capsys):
        code, out, _ = run(
            capsys,
            "suggest",
            "--input", str(workdir / "table.csv"),
            "--examples", str(workdir / "examples.json"),
            "--emit", "mask",
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "row,yellow"
        assert len(lines) == 1 + len(IDS)
        matched = [line.split(",")[0] for line in lines[1:] if line.endswith("true")]
        assert matched == ["3", "5", "7"]

    def test_top_limits_output(self, workdir, capsys):
        code, out, _ = run(
            capsys,
            "suggest",
            "--input", str(workdir / "table.csv"),
            "--examples", str(workdir / "examples.json"),
            "--top", "1",
        )
        assert code == 0
        assert len(json.loads(out)) == 1

    def test_column_flag_overrides_file(self, workdir, capsys):
        (workdir / "nocol.json").write_text(
            json.dumps({"examples": [{"row": 3, "format": "yellow"}]})
        )
        code, out, _ = run(
            capsys,
            "suggest",
            "--input", str(workdir / "table.csv"),
            "--examples", str(workdir / "nocol.json"),
            "--column", "0",
        )
        assert code == 0
        assert len(json.loads(out)) == 3

    def test_not_folding_flag(self, workdir, capsys):
        code, out, _ = run(
            capsys,
            "suggest",
            "--input", str(workdir / "table.csv"),
            "--examples", str(workdir / "examples.json"),
            "--emit", "formula",
            "--not-folding",
        )
        assert code == 0
        assert out.splitlines()[2] == 'NOT(OR(A2="AN47603-F",ISNUMBER(SEARCH("T",A2))))'

    def test_config_file(self, workdir, capsys):
        (workdir / "config.json").write_text(json.dumps({"max_candidates": 1}))
        code, out, _ = run(
            capsys,
            "suggest",
            "--input", str(workdir / "table.csv"),
            "--examples", str(workdir / "examples.json"),
            "--config", str(workdir / "config.json"),
        )
        assert code == 0
        assert len(json.loads(out)) == 1

    def test_weights_file(self, workdir, capsys):
        from cfsynth.ranking import FEATURES

        (workdir / "weights.json").write_text(
            json.dumps({name: 0.0 for name in FEATURES})
        )
        code, out, _ = run(
            capsys,
            "suggest",
            "--input", str(workdir / "table.csv"),
            "--examples", str(workdir / "examples.json"),
            "--weights", str(workdir / "weights.json"),
        )
        assert code == 0
        assert len(json.loads(out)) == 3

    def test_debug_emits_json_lines(self, workdir, capsys):
        code, out, err = run(
            capsys,
            "suggest",
            "--input", str(workdir / "table.csv"),
            "--examples", str(workdir / "examples.json"),
            "--debug",
        )
        assert code == 0
        lines = [json.loads(line) for line in err.splitlines()]
        kinds = [line["debug"] for line in lines]
        assert kinds[0] == "pool"
        assert lines[0]["size"] == 51
        rounds = [l for l in lines if l["debug"] == "cluster_round"]
        assert len(rounds) == 2
        assert rounds[-1]["assignment"] == [0, 0, 0, 1, 0, 1, 0, 1]
        trees = [l for l in lines if l["debug"] == "tree"]
        assert len(trees) == 16
        assert all(t["format"] == "yellow" for t in trees)
        # internal nodes carry the tested predicate inline
        assert all('"kind"' in json.dumps(t["tree"]) for t in trees)
        assert all(0 < t["train_accuracy"] <= 1 for t in trees)

    def test_case_insensitive_flag(self, tmp_path, capsys):
        (tmp_path / "t.csv").write_text("id\nApple\napple\nBanana\ncherry\n")
        (tmp_path / "e.json").write_text(
            json.dumps({"column": 0, "examples": [{"row": 0, "format": "g"}]})
        )
        code, out, _ = run(
            capsys,
            "suggest",
            "--input", str(tmp_path / "t.csv"),
            "--examples", str(tmp_path / "e.json"),
            "--emit", "mask",
            "--case-insensitive",
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[1] == "0,true"
        assert lines[2] == "1,true"

    def test_delimiter_and_no_header(self, tmp_path, capsys):
        (tmp_path / "t.csv").write_text("x;7\ny;3\nz;5\nw;2\n")
        (tmp_path / "e.json").write_text(
            json.dumps(
                {
                    "column": 1,
                    "examples": [
                        {"row": 1, "format": "g"},
                        {"row": 3, "format": "g"},
                    ],
                }
            )
        )
        code, out, _ = run(
            capsys,
            "suggest",
            "--input", str(tmp_path / "t.csv"),
            "--examples", str(tmp_path / "e.json"),
            "--delimiter", ";",
            "--no-header",
            "--emit", "formula",
        )
        assert code == 0
        # headerless table: the emitted reference starts at spreadsheet row 1
        assert out.splitlines()[0] == "AND(B1>=2,B1<=3)"


class TestSuggestFailures:
    def test_no_candidates_exits_2(self, tmp_path, capsys):
        (tmp_path / "t.csv").write_text("v\na\nb\na\nc\n")
        (tmp_path / "e.json").write_text(
            json.dumps({"column": 0, "examples": [{"row": 2, "format": "r"}]})
        )
        code, out, err = run(
            capsys,
            "suggest",
            "--input", str(tmp_path / "t.csv"),
            "--examples", str(tmp_path / "e.json"),
        )
        assert code == 2
        assert out == ""
        diagnostic = json.loads(err)
        assert diagnostic["error"] == "no_candidates"
        assert diagnostic["message"]

    def test_no_predicates_exits_2(self, tmp_path, capsys):
        (tmp_path / "t.csv").write_text("v\nsame\nsame\nsame\n")
        (tmp_path / "e.json").write_text(
            json.dumps({"column": 0, "examples": [{"row": 1, "format": "r"}]})
        )
        code, _, err = run(
            capsys,
            "suggest",
            "--input", str(tmp_path / "t.csv"),
            "--examples", str(tmp_path / "e.json"),
        )
        assert code == 2
        assert json.loads(err)["error"] == "no_predicates"

    def test_missing_input_file_exits_1(self, workdir, capsys):
        code, _, err = run(
            capsys,
            "suggest",
            "--input", str(workdir / "absent.csv"),
            "--examples", str(workdir / "examples.json"),
        )
        assert code == 1
        assert "error" in err

    def test_bad_examples_json_exits_1(self, workdir, capsys):
        (workdir / "bad.json").write_text("{broken")
        code, _, err = run(
            capsys,
            "suggest",
            "--input", str(workdir / "table.csv"),
            "--examples", str(workdir / "bad.json"),
        )
        assert code == 1
        assert "not valid JSON" in err

    def test_schema_error_exits_1_with_path(self, workdir, capsys):
        (workdir / "bad.json").write_text(json.dumps({"column": 0, "examples": []}))
        code, _, err = run(
            capsys,
            "suggest",
            "--input", str(workdir / "table.csv"),
            "--examples", str(workdir / "bad.json"),
        )
        assert code == 1
        assert "/examples" in err

    def test_unknown_config_key_exits_1(self, workdir, capsys):
        (workdir / "config.json").write_text(json.dumps({"depth": 3}))
        code, _, err = run(
            capsys,
            "suggest",
            "--input", str(workdir / "table.csv"),
            "--examples", str(workdir / "examples.json"),
            "--config", str(workdir / "config.json"),
        )
        assert code == 1
        assert "depth" in err

    def test_zero_top_exits_1(self, workdir, capsys):
        code, _, err = run(
            capsys,
            "suggest",
            "--input", str(workdir / "table.csv"),
            "--examples", str(workdir / "examples.json"),
            "--top", "0",
        )
        assert code == 1
        assert "--top" in err

    def test_unknown_flag_exits_1(self, workdir, capsys):
        code, _, err = run(capsys, "suggest", "--nope")
        assert code == 1
        assert "error" in err


class TestApplyCommand:
    def test_emit_json(self, workdir, capsys):
        code, out, _ = run(
            capsys,
            "apply",
            "--input", str(workdir / "table.csv"),
            "--rule", str(workdir / "rule.json"),
        )
        assert code == 0
        obj = json.loads(out)
        assert obj["formula"] == 'LEFT(A2,2)="GW"'
        assert obj["mask"] == [True, False, True, True, False, True, True, True]
        assert obj["warnings"] == []

    def test_emit_formula(self, workdir, capsys):
        code, out, _ = run(
            capsys,
            "apply",
            "--input", str(workdir / "table.csv"),
            "--rule", str(workdir / "rule.json"),
            "--emit", "formula",
        )
        assert code == 0
        assert out.strip() == 'LEFT(A2,2)="GW"'

    def test_emit_mask(self, workdir, capsys):
        code, out, _ = run(
            capsys,
            "apply",
            "--input", str(workdir / "table.csv"),
            "--rule", str(workdir / "rule.json"),
            "--emit", "mask",
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "row,match"
        assert lines[1] == "0,true"
        assert lines[2] == "1,false"

    def test_folded_emission(self, workdir, capsys):
        rule = {
            "format": "y",
            "disjuncts": [
                [
                    {
                        "negated": True,
                        "predicate": {
                            "kind": "endsWith",
                            "type": "text",
                            "args": ["-F"],
                        },
                    },
                    {
                        "negated": True,
                        "predicate": {
                            "kind": "endsWith",
                            "type": "text",
                            "args": ["-T"],
                        },
                    },
                ]
            ],
        }
        (workdir / "neg.json").write_text(json.dumps(rule))
        code, out, _ = run(
            capsys,
            "apply",
            "--input", str(workdir / "table.csv"),
            "--rule", str(workdir / "neg.json"),
            "--emit", "formula",
            "--not-folding",
        )
        assert code == 0
        assert out.strip() == 'NOT(OR(RIGHT(A2,2)="-F",RIGHT(A2,2)="-T"))'

    def test_invalid_rule_exits_1(self, workdir, capsys):
        (workdir / "bad.json").write_text(json.dumps({"format": "y"}))
        code, _, err = run(
            capsys,
            "apply",
            "--input", str(workdir / "table.csv"),
            "--rule", str(workdir / "bad.json"),
        )
        assert code == 1
        assert "/disjuncts" in err

    def test_type_mismatch_exits_1(self, workdir, capsys):
        rule = {
            "format": "r",
            "disjuncts": [
                [
                    {
                        "negated": False,
                        "predicate": {
                            "kind": "greater",
                            "type": "numeric",
                            "args": ["5"],
                        },
                    }
                ]
            ],
        }
        (workdir / "num.json").write_text(json.dumps(rule))
        code, _, err = run(
            capsys,
            "apply",
            "--input", str(workdir / "table.csv"),
            "--rule", str(workdir / "num.json"),
        )
        assert code == 1
        assert "error" in err


class TestServeCommand:
    def test_invalid_port_exits_1(self, capsys):
        code, _, err = run(capsys, "serve", "--port", "0")
        assert code == 1
        assert "port" in err


class TestServiceParity:
    def test_rule_json_is_byte_identical(self, workdir, capsys):
        code, out, _ = run(
            capsys,
            "suggest",
            "--input", str(workdir / "table.csv"),
            "--examples", str(workdir / "examples.json"),
        )
        assert code == 0
        cli_rules = json.loads(out)

        client = TestClient(create_app())
        resp = client.post(
            "/v1/suggest",
            json={
                "table": IDS_CSV,
                "examples": [{"row": 3, "format": "yellow"}],
            },
        )
        service_rules = [s["rule"] for s in resp.json()["suggestions"]["yellow"]]

        def compact(obj):
            return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)

        for cli_rule, service_rule in zip(cli_rules, service_rules, strict=True):
            fragment = compact(service_rule)
            # the service response truly contains these bytes ...
            assert fragment.encode() in resp.content
            # ... and the CLI printed exactly the same bytes
            assert compact(cli_rule).encode() in out.encode()
            assert compact(cli_rule) == fragment
