"""End-to-end command-line checks: exit codes, composition, determinism."""

import json

import numpy as np
import pytest

from pinq.cli import main
from pinq.io import format_hamiltonian, load_hamiltonian, parse_hamiltonian


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out.strip()
    return code, json.loads(out) if out else None


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_check_stoquastic_file(tmp_path, capsys):
    f = _write(tmp_path, "h.txt", "qubits 2\n-1 XX\n-0.5 XI\n")
    code, report = _run(capsys, "check", f)
    assert code == 0
    assert report["payload"]["stoquastic"] is True


def test_check_expect_failure_exit_code(tmp_path, capsys):
    f = _write(tmp_path, "h.txt", "qubits 1\n1 X\n")
    code, report = _run(capsys, "check", f, "--expect", "stoquastic")
    assert code == 1
    assert report["payload"]["stoquastic"] is False


def test_malformed_file_exit_2(tmp_path, capsys):
    f = _write(tmp_path, "h.txt", "qubits 1\n1 X\noops\n")
    code = main(["spectrum", f])
    captured = capsys.readouterr()
    assert code == 2
    assert "line 3" in captured.err


def test_pin_stoquastic_then_pinned_spectrum(tmp_path, capsys):
    f = _write(tmp_path, "h.txt", "qubits 1\n1 Z\n1 X\n")
    out = str(tmp_path / "hs.txt")
    code, _ = _run(capsys, "pin-stoquastic", f, "--out", out)
    assert code == 0
    code, report = _run(capsys, "spectrum", out, "--pin", "1=-", "--dense")
    assert code == 0
    assert report["payload"]["value"] == pytest.approx(-np.sqrt(2.0), abs=1e-9)


def test_reduction_output_reparses_identically(tmp_path, capsys):
    f = _write(tmp_path, "h.txt", "qubits 2\n0.25 ZZ\n-0.125 XI\n0.375 XX\n")
    out = str(tmp_path / "perm.txt")
    code, _ = _run(capsys, "pin-permutation", f, "--out", out, "--bits", "8")
    assert code == 0
    text = open(out).read()
    reparsed = parse_hamiltonian(text)
    assert format_hamiltonian(reparsed) == text


def test_check_on_reduction_output_sees_term_structure(tmp_path, capsys):
    f = _write(tmp_path, "h.txt", "qubits 2\n0.8 ZI\n0.5 XI\n0.4 XZ\n")
    out = str(tmp_path / "hs.txt")
    code, _ = _run(capsys, "pin-stoquastic", f, "--out", out)
    assert code == 0
    code, report = _run(capsys, "check", out, "--expect", "stoquastic")
    assert code == 0
    assert report["payload"]["stoquastic"] is True


def test_effective_subcommand(tmp_path, capsys):
    f = _write(tmp_path, "h.txt", "qubits 2\n1 ZX\n")
    out = str(tmp_path / "eff.txt")
    code, _ = _run(capsys, "effective", f, "--pin", "1=+", "--out", out)
    assert code == 0
    eff = load_hamiltonian(out)
    assert [(t.coeff, t.string.label()) for t in eff.terms] == [(1.0, "Z")]


def test_spectrum_promise_decision_exit_codes(tmp_path, capsys):
    f = _write(tmp_path, "h.txt", "qubits 1\n1 Z\n")
    code, report = _run(capsys, "spectrum", f, "--bounds=-0.9,0")
    assert code == 0 and report["payload"]["decision"] == "YES"
    code, report = _run(capsys, "spectrum", f, "--bounds=-2,-1.5")
    assert code == 1 and report["payload"]["decision"] == "NO"
    code, report = _run(capsys, "spectrum", f, "--bounds=-1.5,-0.5")
    assert code == 3 and report["payload"]["decision"] == "GAP_VIOLATION"


def test_unpin_penalty(tmp_path, capsys):
    f = _write(tmp_path, "h.txt", "qubits 2\n0.5 ZI\n")
    out = str(tmp_path / "lift.txt")
    code, report = _run(capsys, "unpin-penalty", f, "--pin-qubit", "1",
                        "--bounds", "0,1", "--out", out)
    assert code == 0
    assert report["payload"]["delta"] == pytest.approx(0.5 + 0.5 * (2 * 0.5 / 1 + 1))
    lifted = load_hamiltonian(out)
    assert lifted.n == 2


def test_zeno_csv(tmp_path, capsys):
    a = _write(tmp_path, "a.txt", "qubits 1\n1 Z\n")
    b = _write(tmp_path, "b.txt", "qubits 1\n1 X\n")
    csv = str(tmp_path / "sweep.csv")
    code, report = _run(capsys, "zeno", "--kind", "comm", "--a", a, "--b", b,
                        "--t", "1", "--sweep", "50,100,200", "--csv", csv)
    assert code == 0
    lines = open(csv).read().strip().splitlines()
    assert lines[0] == "N,error,survival"
    assert len(lines) == 4
    assert report["payload"]["error_slope"] == pytest.approx(-1.0, abs=0.2)


def test_zeno_single_run_with_state_file(tmp_path, capsys):
    a = _write(tmp_path, "a.txt", "qubits 1\n1 Z\n")
    b = _write(tmp_path, "b.txt", "qubits 1\n-1 X\n")
    state = _write(tmp_path, "psi.txt", "0.6\n0.8\n")
    code, report = _run(capsys, "zeno", "--kind", "stoq", "--a", a, "--b", b,
                        "--t", "1", "--n", "10", "--state", state)
    assert code == 0
    assert report["payload"]["error"] <= 1e-9
    assert report["payload"]["survival"] == pytest.approx(1.0, abs=1e-9)
    assert report["payload"]["reference"] == "A-B"


def test_gscon_build_and_verify(tmp_path, capsys):
    f = _write(tmp_path, "h.txt", "qubits 2\n-1 ZZ\n")
    inst = str(tmp_path / "inst.json")
    path = str(tmp_path / "path.json")
    code, _ = _run(capsys, "gscon-build", f, "--alpha", "1e-9", "--beta", "0.5",
                   "--out", inst, "--path-out", path)
    assert code == 0
    code, report = _run(capsys, "gscon-verify", "--instance", inst, "--path", path)
    assert code == 0
    assert report["payload"]["outcome"] == "YES-witnessed"


def test_ff_path_subcommand(tmp_path, capsys):
    g0 = np.array([[0.0, 1.0], [-1.0, 0.0]])
    gamma = np.kron(np.eye(2), g0)
    start = str(tmp_path / "start.csv")
    end = str(tmp_path / "end.csv")
    hcsv = str(tmp_path / "h.csv")
    np.savetxt(start, gamma, delimiter=",")
    np.savetxt(end, -gamma, delimiter=",")
    np.savetxt(hcsv, gamma, delimiter=",")
    out = str(tmp_path / "path.json")
    code, report = _run(capsys, "ff-path", "--start", start, "--end", end,
                        "--h", hcsv, "--n", "8", "--out", out)
    assert code == 0
    data = json.load(open(out))
    assert len(data["grid_energies"]) == 9
    np.testing.assert_allclose(data["grid_energies"], np.linspace(-4, 4, 9), atol=1e-9)


def test_seeded_payloads_are_byte_identical(tmp_path, capsys):
    f = _write(tmp_path, "h.txt", "qubits 3\n0.5 ZXI\n-0.25 XXZ\n0.125 IZZ\n")
    code1, r1 = _run(capsys, "--seed", "5", "spectrum", f, "--iterative")
    code2, r2 = _run(capsys, "--seed", "5", "spectrum", f, "--iterative")
    assert code1 == code2 == 0
    assert json.dumps(r1["payload"], sort_keys=True) == json.dumps(r2["payload"], sort_keys=True)


def test_version_lists_format_versions(capsys):
    code, report = _run(capsys, "--version")
    assert code == 0
    assert "hamiltonian_text" in report["formats"]


def test_unknown_subcommand_exit_2(capsys):
    code = main(["frobnicate"])
    assert code == 2
