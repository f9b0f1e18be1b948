import json

import pytest

from clusterbraid.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None, out


def test_explore_reports_class_counts(capsys, tmp_path):
    atlas = tmp_path / "atlas.json"
    code, report, _ = run(capsys, "--threads", "1", "explore", "--grassmannian", "4", "8", "--out", str(atlas))
    assert code == 0
    assert report["status"] == "pass"
    assert (report["findings"]["classes"], report["findings"]["cycles"]) == (506, 1506)
    assert json.loads(atlas.read_text())["classes"] == 506


def test_explore_writes_figures(capsys, tmp_path):
    pytest.importorskip("matplotlib")
    code, report, _ = run(capsys, "explore", "--grassmannian", "3", "6", "--figures", str(tmp_path))
    assert code == 0
    assert (tmp_path / "class_depths.png").exists()


def test_braid_verify_lists_frozen_factors(capsys):
    code, report, _ = run(capsys, "braid", "verify", "--k", "3", "--n", "9", "--relation", "adjacent")
    assert code == 0
    (check,) = report["findings"]["checks"]
    assert any(d["monomial"] != "1" for d in check["details"])


def test_web_reduce_gives_two_terms(capsys, tmp_path):
    _, example, _ = run(capsys, "web", "example", "--name", "product")
    path = tmp_path / "product.json"
    path.write_text(json.dumps(example["findings"]["web"]))
    code, report, _ = run(capsys, "web", "reduce", "--in", str(path))
    assert code == 0
    assert report["findings"]["term_count"] == 2


def test_seed_mutate_names_plucker_entries(capsys):
    code, report, _ = run(capsys, "seed", "mutate", "--grassmannian", "3", "6", "--at", "1")
    assert code == 0
    assert report["findings"]["cluster"][0] == "D1,3,5"


def test_orbit_reports_partial_when_no_period_is_found(capsys):
    code, report, _ = run(capsys, "orbit", "--word", "s1 s2 s2 s1", "--k", "4", "--n", "8",
                          "--var", "2347", "--budget", "3")
    assert code == 1
    assert report["status"] == "partial"
    assert report["findings"]["sequence"][:2] == ["2347", "2378"]


def test_fg_flipcheck(capsys):
    code, report, _ = run(capsys, "fg", "flipcheck", "--k", "3", "--r", "5", "--flip", "1,3")
    assert code == 0
    assert report["findings"]["sequence"] == [1, 2, 5, 6]


def test_map_pullback_of_a_plucker(capsys):
    code, report, _ = run(capsys, "map", "pullback", "--word", "r", "--k", "3", "--n", "6", "--var", "1,2,4")
    assert code == 0
    assert report["findings"]["core"] == "235"


def test_reports_are_byte_stable(capsys):
    argv = ["--seed", "5", "suite", "acceptance", "--criterion", "3", "5"]
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first[0] == 0
    assert first[2] == second[2]


def test_timing_is_opt_in(capsys):
    _, plain, _ = run(capsys, "qi", "verify")
    _, timed, _ = run(capsys, "qi", "verify", "--timing")
    assert "wall_time_seconds" not in plain
    assert "wall_time_seconds" in timed


def test_flags_after_the_command_are_honored(capsys):
    _, report, _ = run(capsys, "suite", "acceptance", "--criterion", "3", "--timing")
    assert "criterion_seconds" in report["findings"]


def test_malformed_input_exits_with_usage_error(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(SystemExit) as exc:
        main(["web", "reduce", "--in", str(bad)])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["braid", "verify", "--k", "3", "--n", "6", "--relation", "nope"])
    assert exc.value.code == 2
    broken = tmp_path / "broken.json"
    broken.write_text(json.dumps({"n": 3, "vertices": [{"id": 2}], "edges": [], "rotations": {}}))
    assert main(["web", "eval", "--in", str(broken)]) == 2
