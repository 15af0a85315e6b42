import io
import subprocess
import sys

import pytest

from comon.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), stream=out)
    return code, out.getvalue().splitlines()


def test_verify_partition():
    code, lines = run("verify", "partition")
    assert code == 0
    assert lines == ["CHECK partition PASS subsets=1048575 qualifying=21"]


def test_verify_basis():
    code, lines = run("verify", "basis")
    assert code == 0
    assert lines[0] == "CHECK dim-L PASS value=300"


def test_verify_small_targets():
    for target, first in [
        ("clone-locus", "CHECK clone-locus-12 PASS dim=1 pattern=+1/-1/-1"),
        ("witness", "CHECK witness-membership PASS unknowns=75 nonzero-slices=14"),
        ("f-structure", "CHECK f-structure PASS 3.1=PASS 3.2=PASS 3.3=PASS 3.4=PASS"),
        ("span-identity", "CHECK span-identity PASS trials=100 seed=1"),
    ]:
        code, lines = run("verify", target)
        assert code == 0, lines
        assert lines[0] == first


def test_timing_flag_appends_elapsed():
    code, lines = run("--timing", "verify", "partition")
    assert code == 0 and " elapsed_ms=" in lines[0]


def test_unknown_target_is_usage_error():
    with pytest.raises(SystemExit) as e:
        run("verify", "everything")
    assert e.value.code == 2


def test_sign_domain():
    with pytest.raises(SystemExit) as e:
        run("certify", "rank4", "--a", "2")
    assert e.value.code == 2


def test_samples_must_be_positive():
    code, _ = run("certify", "rank4", "--samples", "0")
    assert code == 2


def test_certify_is_deterministic():
    code, first = run("certify", "rank4", "--samples", "5", "--seed", "7")
    assert code == 0
    assert len(first) == 20 and all(" PASS " in l for l in first)
    _, second = run("certify", "rank4", "--samples", "5", "--seed", "7")
    assert first == second
    _, other = run("certify", "rank4", "--samples", "5", "--seed", "8")
    assert other != first


def test_certify_one_sign_case():
    code, lines = run("certify", "rank4", "--a", "1", "--b", "-1", "--samples", "2")
    assert code == 0 and len(lines) == 2
    assert all("a=1 b=-1" in l and "span=2" in l for l in lines)


def test_build_corrections(tmp_path):
    path = tmp_path / "c.txt"
    code, lines = run("build", "corrections", "-o", str(path))
    assert code == 0 and lines[0].startswith("CHECK build-corrections PASS rows=15")
    rows = path.read_text().splitlines()[1:]
    assert sum(len(r.split()) - 2 for r in rows) == 75


def test_build_to_unwritable_path(tmp_path):
    code, _ = run("build", "corrections", "-o", str(tmp_path / "missing" / "c.txt"))
    assert code == 3


def test_verify_missing_input(tmp_path):
    code, _ = run("verify", "decomposition", "--in", str(tmp_path / "nope.txt"))
    assert code == 3


def test_build_then_verify_decomposition(tmp_path):
    path = tmp_path / "d.txt"
    code, lines = run("build", "decomposition", "-o", str(path))
    assert code == 0 and "terms=903" in lines[0]
    code, lines = run("verify", "decomposition", "--in", str(path), "--mode", "freivalds", "--trials", "2")
    assert code == 0
    assert lines == ["CHECK sum-equals-S PASS terms=903 mode=freivalds seed=1 trials=2"]


def test_failing_decomposition_exits_one(tmp_path):
    path = tmp_path / "d.txt"
    assert run("build", "decomposition", "-o", str(path))[0] == 0
    text = path.read_text().splitlines()
    # drop the last term: its three "vec" blocks start at the third-from-last "vec a"
    starts = [n for n, l in enumerate(text) if l == "vec a"]
    cut = text[: starts[-1]]
    cut[0] = "decomposition 902"
    path.write_text("\n".join(cut) + "\n")
    code, lines = run("verify", "decomposition", "--in", str(path), "--mode", "freivalds", "--trials", "2")
    assert code == 1 and " FAIL " in lines[0]


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "comon", "verify", "partition"], capture_output=True, text=True)
    assert r.returncode == 0
    assert r.stdout.strip() == "CHECK partition PASS subsets=1048575 qualifying=21"
