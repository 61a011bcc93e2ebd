import math

import numpy as np
import pytest

from debyefem import harness, manufactured, oracles
from debyefem.cli import main
from debyefem.manufactured import ExactCase
from debyefem.mesh import DomainKind, build_mesh
from debyefem.spaces import interp_edge, project_W


def test_parse_config():
    cfg = harness.parse_config("""
# comment line
case = example2
N_list = 4, 8 16
dt = 2e-5   # trailing comment
postprocess = yes
law = saturating
""")
    assert cfg.case == "example2"
    assert cfg.N_list == [4, 8, 16]
    assert cfg.dt == 2e-5
    assert cfg.postprocess is True
    assert cfg.make_law().kind.value == "saturating"
    assert cfg.n_steps == 100


@pytest.mark.parametrize("text, line", [("dt = 1e-5\nbogus = 3", 2), ("n_steps = ten", 1),
                                        ("\n\npostprocess = maybe", 3), ("no equals sign", 1)])
def test_parse_errors_report_line(text, line):
    with pytest.raises(harness.ConfigError, match=f"line {line}"):
        harness.parse_config(text)


def test_strict_mode_law():
    cfg = harness.parse_config("strict_paper_mode = true")
    assert cfg.make_law().kind.value == "linear" and cfg.make_law().delta1 == 0.0


def test_orders_on_geometric_sequences():
    for rate in (1.0, 2.0, 0.5):
        vals = [3.0 * 2.0 ** (-rate * k) for k in range(5)]
        orders = harness.orders_of(vals)
        assert orders[0] is None
        assert all(o == pytest.approx(rate, abs=1e-12) for o in orders[1:])
    assert harness.convergence_order(0.0, 0.0) is None


def test_csv_round_trip():
    reps = [harness.ErrorReport(N=4, errE=0.1 / 3, errP=math.pi, errCurlE=1e-300, SerrE=2 / 7, SerrP=1.0),
            harness.ErrorReport(N=8, errE=0.1 / 7, errP=math.e, errCurlE=1e-301, SerrE=1 / 9, SerrP=0.3)]
    harness.fill_orders(reps)
    rows = harness.parse_table_csv(harness.table_csv(reps, postprocess=True))
    for rep, row in zip(reps, rows):
        assert row["N"] == rep.N
        for err, order in harness.ERROR_COLUMNS + harness.SUPER_COLUMNS:
            assert row[err] == getattr(rep, err)
            assert row[order] == rep.orders.get(order)


def test_zero_case_table():
    cfg = harness.parse_config("case = zero\nN_list = 4, 8\nn_steps = 5")
    text = harness.table_csv(harness.converge(cfg))
    lines = text.strip().splitlines()
    assert lines[0] == "N,errE,orderE,errP,orderP,errCurlE,orderCurl"
    for line in lines[1:]:
        cells = line.split(",")
        assert [float(c) for c in cells[1::2]] == [0.0, 0.0, 0.0]
        assert cells[2::2] == [harness.MISSING] * 3


def polynomial_case():
    def E(x, y, t):
        return y + 0 * x, x + 0 * y

    def P(x, y, t):
        return 1 + x + 0 * y, 2 - y + 0 * x

    return ExactCase(name="poly", domain_kind=DomainKind.UNIT_SQUARE, alpha=0.0, E=E, E_t=E, E_tt=E,
                     curl_E=lambda x, y, t: np.zeros_like(x), curlcurl_E=E, P=P, P_t=P)


def test_errors_vanish_for_local_polynomials():
    mesh = build_mesh("unit_square", 4)
    case = polynomial_case()
    rep = harness.compute_errors(mesh, interp_edge(mesh, case.at(case.E, 0)),
                                 project_W(mesh, case.at(case.P, 0)), case, 0.0, with_postprocess=True)
    for v in (rep.errE, rep.errP, rep.errCurlE, rep.SerrE, rep.SerrP):
        assert v <= 1e-13


def test_error_matches_dense_quadrature():
    mesh = build_mesh("unit_square", 4)
    field = interp_edge(mesh, lambda x, y: (np.ones_like(x), np.zeros_like(x))).coeffs
    field[mesh.edge_boundary] = 0.0
    rep = harness.compute_errors(mesh, field, np.zeros(mesh.n_cells * 4), manufactured.zero_case(), 0.0)
    total = 0.0
    for c in range(mesh.n_cells):
        x, y, w = oracles._cell_rule(mesh, c)
        val = sum(field[e] * oracles.global_basis(mesh, e, x, y)[0] for e in range(mesh.n_edges))
        total += np.sum(w * np.sum(val**2, axis=-1))
    assert rep.errE**2 == pytest.approx(total, rel=1e-13)


def test_snapshots_zero_case(tmp_path):
    cfg = harness.parse_config("case = zero\nN = 8\nn_steps = 3\npostprocess = true")
    paths = harness.run_snapshots(cfg, tmp_path)
    names = {p.name for p in paths}
    assert {"E_h1.txt", "P_h2.txt", "err_SP1.txt", "SE_h.glyph"} <= names
    mat = harness.read_matrix(tmp_path / "E_h1.txt")
    assert mat.shape == (8, 8) and not mat.any()
    header = (tmp_path / "P_h2.txt").read_text().splitlines()[0]
    tag = dict(tok.split("=") for tok in header[2:].split())
    assert tag["case"] == "zero" and tag["N"] == "8" and tag["component"] == "P_h2"
    assert float(tag["t"]) == pytest.approx(3e-5, rel=1e-15)
    glyph = np.loadtxt(tmp_path / "E_h.glyph")
    assert glyph.shape == (64, 4)


def test_snapshot_grid_size(tmp_path):
    mesh = build_mesh("unit_square", 32)
    case = manufactured.example1()
    fields = harness.snapshot_fields(mesh, np.zeros(mesh.n_edges), np.zeros(4 * mesh.n_cells), case, 0.0)
    harness.write_snapshots(tmp_path, mesh, fields, case.name, 0.0)
    assert harness.read_matrix(tmp_path / "err_E2.txt").shape == (32, 32)


def test_lshape_snapshot_marks_hole(tmp_path):
    mesh = build_mesh("lshape", 4)
    case = manufactured.example2()
    fields = harness.snapshot_fields(mesh, np.zeros(mesh.n_edges), np.zeros(4 * mesh.n_cells), case, 0.0)
    harness.write_snapshots(tmp_path, mesh, fields, case.name, 0.0)
    mat = harness.read_matrix(tmp_path / "E_h1.txt")
    assert np.isnan(mat[:2, 2:]).all() and not np.isnan(mat[2:]).any()


def test_snapshot_of_interpolant_close_to_exact():
    case = manufactured.example1()
    diffs = []
    for N in (16, 32):
        mesh = build_mesh("unit_square", N)
        E = interp_edge(mesh, case.at(case.E, 0.0))
        P = project_W(mesh, case.at(case.P, 0.0))
        f = harness.snapshot_fields(mesh, E, P, case, 0.0)
        diffs.append(max(np.abs(f["err_E"]).max(), np.abs(f["err_P"]).max()))
    assert diffs[0] <= 1.0 / 16
    assert diffs[1] < diffs[0]


def test_cli_check(capsys):
    assert main(["check"]) == 0
    assert "checks passed" in capsys.readouterr().out
    assert main(["check", "--corrupt-stiffness"]) == 1
    out = capsys.readouterr().out
    assert "FAIL  M, K, M_w symmetric" in out


def test_cli_converge_and_run(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("case = example1\nN_list = 4, 8\nn_steps = 3\n")
    assert main(["converge", "--config", str(cfg), "--postprocess", "--out", str(tmp_path / "o")]) == 0
    out = capsys.readouterr().out
    assert out.startswith("N,errE,orderE,errP,orderP,errCurlE,orderCurl,SerrE,orderSE,SerrP,orderSP")
    assert (tmp_path / "o" / "convergence.csv").read_text() == out
    cfg.write_text("case = example1\nN = 4\nn_steps = 2\n")
    assert main(["run", "--config", str(cfg), "--strict-paper-mode", "--out", str(tmp_path / "r")]) == 0
    assert (tmp_path / "r" / "P_h1.txt").exists()


def test_cli_errors(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("dt = fast\n")
    assert main(["run", "--config", str(bad)]) == 2
    assert "line 1" in capsys.readouterr().err
    blocker = tmp_path / "file"
    blocker.write_text("")
    good = tmp_path / "good.cfg"
    good.write_text("case = zero\nN = 2\nn_steps = 1\n")
    assert main(["run", "--config", str(good), "--out", str(blocker / "sub")]) == 2
