from __future__ import annotations

import csv
import io
import json
import subprocess
import sys

import pytest
import yaml

from cohesion_power.cli import EXIT_COMPUTE, EXIT_MISMATCH, EXIT_OK, EXIT_USAGE, fmt, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def parse_csv(text):
    meta = {}
    body = []
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            meta[key] = value
        else:
            body.append(line)
    rows = list(csv.DictReader(io.StringIO("\n".join(body))))
    return meta, rows


class TestCompute:
    def test_wende_pre(self, capsys):
        code, out, _ = run(capsys, "compute", "--data", "builtin:wende-1980", "--scenario", "pre-1982", "--b", "1")
        assert code == EXIT_OK
        meta, rows = parse_csv(out)
        assert meta["dataset"] == "wende-1980" and meta["schema_version"] == "1"
        assert list(rows[0]) == ["scenario", "branch", "b", "party", "value"]
        got = {r["party"]: float(r["value"]) for r in rows}
        assert got == pytest.approx({"CDU/CSU": 0.339, "SPD": 0.285, "FDP": 0.376}, abs=0.002)

    def test_double_cordon_note(self, capsys):
        code, out, _ = run(capsys, "compute", "--data", "builtin:france-2024-bloc", "--scenario", "C", "--b", "1")
        assert code == EXIT_OK
        meta, rows = parse_csv(out)
        assert "no feasible winning coalition" in meta["note"]
        assert all(float(r["value"]) == 0.0 for r in rows)

    def test_b0_classical(self, capsys):
        _, out, _ = run(capsys, "compute", "--data", "builtin:bundestag-2025", "--scenario", "A", "--b", "0")
        _, rows = parse_csv(out)
        assert [r["value"] for r in rows] == ["0.4", "0.233333", "0.233333", "0.0666667", "0.0666667"]

    def test_json(self, capsys):
        code, out, _ = run(
            capsys, "compute", "--data", "builtin:wende-1980", "--scenario", "post-1982", "--b", "1",
            "--format", "json", "--branch", "banzhaf",
        )
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["metadata"]["dataset"] == "wende-1980"
        assert doc["columns"] == ["scenario", "branch", "b", "party", "value"]
        assert {r["branch"] for r in doc["rows"]} == {"banzhaf"}
        assert sum(r["value"] for r in doc["rows"]) == pytest.approx(1.0, abs=1e-5)

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "out.csv"
        code, out, _ = run(capsys, "compute", "--data", "builtin:apex-3", "--scenario", "default", "--b", "3", "--out", str(target))
        assert code == EXIT_OK and out == ""
        _, rows = parse_csv(target.read_text())
        assert float(rows[0]["value"]) < 0.05

    def test_user_file(self, capsys, tmp_path):
        doc = {
            "schema_version": 1,
            "parliament": {"name": "toy", "quota": 3, "parties": [
                {"label": "X", "seats": 2, "position": 1}, {"label": "Y", "seats": 2, "position": 2},
                {"label": "Z", "seats": 1, "position": 9}]},
            "scenarios": [{"name": "s", "cohesion": {"type": "range"}}],
        }
        path = tmp_path / "toy.yaml"
        path.write_text(yaml.safe_dump(doc))
        code, out, _ = run(capsys, "compute", "--data", str(path), "--scenario", "s", "--b", "1")
        assert code == EXIT_OK
        assert parse_csv(out)[0]["source"] == str(path)


class TestErrors:
    def test_schema_error_exit_2(self, capsys, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("schema_version: 1\nparliament: {name: x, quota: 700, parties: [{label: a, seats: 1}, {label: b, seats: 1}]}\nscenarios: [{name: s}]\n")
        code, _, err = run(capsys, "compute", "--data", str(path), "--scenario", "s", "--b", "1")
        assert code == EXIT_USAGE and "quota" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "compute", "--data", str(tmp_path / "nope.yaml"), "--scenario", "s", "--b", "1")
        assert code == EXIT_USAGE and "no such file" in err

    def test_unknown_scenario(self, capsys):
        code, _, err = run(capsys, "compute", "--data", "builtin:apex-3", "--scenario", "Z", "--b", "1")
        assert code == EXIT_USAGE and "default" in err

    def test_bad_exponent(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["compute", "--data", "builtin:apex-3", "--scenario", "default", "--b", "-1"])
        assert exc.value.code == EXIT_USAGE

    def test_inadmissible_exit_3(self, capsys, tmp_path):
        doc = {
            "schema_version": 1,
            "parliament": {"name": "toy", "quota": 2, "parties": [{"label": "X", "seats": 2}, {"label": "Y", "seats": 1}]},
            "scenarios": [{"name": "s", "cohesion": {"type": "explicit", "default": "zero",
                                                     "entries": [{"members": ["X"], "value": 1.0}]}}],
        }
        path = tmp_path / "z.yaml"
        path.write_text(yaml.safe_dump(doc))
        code, _, err = run(capsys, "compute", "--data", str(path), "--scenario", "s", "--b", "1")
        assert code == EXIT_COMPUTE and "player(s) Y" in err

    def test_no_subcommand(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == EXIT_USAGE


class TestSweep:
    def test_apex_default_grid(self, capsys):
        code, out, _ = run(capsys, "sweep", "--data", "builtin:apex-3", "--scenario", "default")
        assert code == EXIT_OK
        _, rows = parse_csv(out)
        assert len(rows) == 61 * 3
        assert [r["value"] for r in rows[:3]] == ["0.333333"] * 3

    def test_afd_flat(self, capsys):
        _, out, _ = run(capsys, "sweep", "--data", "builtin:bundestag-2025", "--scenario", "B", "--steps", "13")
        _, rows = parse_csv(out)
        afd = [r for r in rows if r["party"] == "AfD"]
        assert len(afd) == 13 and all(r["value"] == "0" for r in afd)

    def test_single_step_matches_compute(self, capsys):
        _, swept, _ = run(capsys, "sweep", "--data", "builtin:wende-1980", "--scenario", "pre-1982", "--bmin", "1", "--steps", "1")
        _, computed, _ = run(capsys, "compute", "--data", "builtin:wende-1980", "--scenario", "pre-1982", "--b", "1")
        assert swept == computed

    def test_inverted_grid(self, capsys):
        code, _, _ = run(capsys, "sweep", "--data", "builtin:apex-3", "--scenario", "default", "--bmin", "2", "--bmax", "1")
        assert code == EXIT_USAGE

    def test_deterministic(self, capsys):
        argv = ("sweep", "--data", "builtin:france-2024-party", "--scenario", "B", "--format", "json")
        assert run(capsys, *argv)[1] == run(capsys, *argv)[1]

    def test_zero_note_lists_b(self, capsys):
        _, out, _ = run(capsys, "sweep", "--data", "builtin:france-2024-bloc", "--scenario", "C", "--steps", "3")
        assert "(b = 0, 1.5, 3)" in parse_csv(out)[0]["note"]


class TestReproduce:
    def test_all_claims(self, capsys):
        code, out, _ = run(capsys, "reproduce")
        assert code == EXIT_OK
        assert "[PASS] wende" in out
        block = out.split("[PASS] wende")[1].split("\n[")[0]
        assert block.count("wende-1980/") == 6
        assert "[DEVIATION] spd-above-afd-all-b" in out
        assert "FAILED" not in out

    def test_filter(self, capsys):
        code, out, _ = run(capsys, "reproduce", "--filter", "france-bloc-C")
        assert code == EXIT_OK
        assert out.count("[PASS]") == 1

    def test_unknown_filter(self, capsys):
        code, _, err = run(capsys, "reproduce", "--filter", "bogus")
        assert code == EXIT_USAGE and "wende" in err

    def test_mismatch_exit(self, capsys, monkeypatch):
        from cohesion_power import cli, goldens

        real = goldens.run_claims

        def corrupted(selected=None):
            import dataclasses

            ds = goldens.builtin_map()["wende-1980"]
            parties = ds.parliament.parties[:2] + (dataclasses.replace(ds.parliament.parties[2], position=4.0),)
            broken = dataclasses.replace(ds, parliament=dataclasses.replace(ds.parliament, parties=parties))
            return real(selected, {"wende-1980": broken})

        monkeypatch.setattr(cli, "run_claims", corrupted)
        code, out, _ = run(capsys, "reproduce", "--filter", "wende")
        assert code == EXIT_MISMATCH
        assert "FAIL wende-1980/pre-1982" in out


class TestCheckAxioms:
    def test_small_run(self, capsys):
        code, out, _ = run(capsys, "check-axioms", "--trials", "20", "--branch", "banzhaf", "--countermodels")
        assert code == EXIT_OK
        assert "# seed: 0" in out
        assert "UNEXPECTED" not in out
        assert "countermodel-player-exponents" in out

    def test_json_byte_identical(self, capsys):
        argv = ("check-axioms", "--trials", "15", "--seed", "42", "--format", "json", "--countermodels")
        first = run(capsys, *argv)[1]
        assert first == run(capsys, *argv)[1]
        assert all(r["seed"] == 42 for r in json.loads(first))

    def test_zero_trials(self):
        with pytest.raises(SystemExit) as exc:
            main(["check-axioms", "--trials", "0"])
        assert exc.value.code == EXIT_USAGE

    def test_unexpected_verdict_exit_1(self, capsys, monkeypatch):
        from cohesion_power import axioms, cli

        def broken(branches, include_countermodels=False):
            F = axioms.countermodel_player_exponents([1.0] * 8)  # common exponent: symmetry holds
            return [F]

        monkeypatch.setattr(cli, "default_functionals", broken)
        code, out, _ = run(capsys, "check-axioms", "--trials", "10")
        assert code == EXIT_MISMATCH and "UNEXPECTED" in out


def test_fmt():
    assert fmt(0.3386741) == "0.338674"
    assert fmt(-0.0) == "0"
    assert fmt(1e-7) == "1e-07"


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "cohesion_power", "compute", "--data", "builtin:apex-3", "--scenario", "default", "--b", "0"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.count("0.333333") == 3
