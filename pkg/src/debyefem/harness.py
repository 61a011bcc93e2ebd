"""Error norms, convergence tables, snapshots and the flat config format."""

from __future__ import annotations

import csv
import dataclasses
import io
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import manufactured
from .mesh import DomainKind, build_mesh, macro_pairing
from .nonlinearity import NonlinearLaw, PhysParams, make_law
from .postprocess import postprocess_E, postprocess_P
from .quadrature import DEFAULT_ORDER
from .spaces import (
    cell_curl,
    cell_field_at_quad,
    cell_quadrature,
    edge_field_at_quad,
    eval_cell_field,
    eval_edge_field,
)
from .timestepper import StepperConfig, run

MISSING = "—"  # placeholder for undefined orders


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    case: str = "example1"
    law: str = "cubic"
    delta1: float = 1.0
    delta2: float = 1.0
    law_range: float = 16.0
    eps0: float = 1.0
    mu0: float = 1.0
    tau: float = 1.0
    eps_s: float = 2.0
    eps_inf: float = 1.0
    dt: float = 1e-5
    n_steps: int = 100
    newton_tol: float = 1e-12
    newton_max_iter: int = 25
    linear_tol: float = 1e-10
    linear_max_iter: int = 2000
    precond: str = "jacobi"
    quad_order: int = DEFAULT_ORDER
    N_list: list[int] = field(default_factory=lambda: [4, 8, 16, 32])
    N: int = 32
    out_dir: str = "out"
    postprocess: bool = False
    strict_paper_mode: bool = False

    def make_law(self) -> NonlinearLaw:
        if self.strict_paper_mode:
            return NonlinearLaw.linear(0.0)
        return make_law(self.law, self.delta1, self.delta2, self.law_range)

    def make_params(self) -> PhysParams:
        return PhysParams(self.eps0, self.mu0, self.tau, self.eps_s, self.eps_inf)

    def stepper_config(self) -> StepperConfig:
        return StepperConfig(dt=self.dt, newton_tol=self.newton_tol,
                             newton_max_iter=self.newton_max_iter, linear_tol=self.linear_tol,
                             linear_max_iter=self.linear_max_iter, precond=self.precond,
                             quad_order=self.quad_order)


def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _convert(name: str, raw: str):
    ftype = {f.name: f.type for f in dataclasses.fields(RunConfig)}[name]
    if ftype == "bool":
        return _parse_bool(raw)
    if ftype == "int":
        return int(raw)
    if ftype == "float":
        return float(raw)
    if ftype == "list[int]":
        return [int(tok) for tok in raw.replace(",", " ").split()]
    return raw.strip().strip('"').strip("'")


def parse_config(text: str, base: RunConfig | None = None) -> RunConfig:
    """Parse flat ``key = value`` lines; ``#`` starts a comment."""
    cfg = dataclasses.replace(base) if base is not None else RunConfig()
    known = {f.name for f in dataclasses.fields(RunConfig)}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            setattr(cfg, key, _convert(key, raw))
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from None
    return cfg


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text())


# -- error norms --------------------------------------------------------------


@dataclass
class ErrorReport:
    N: int
    errE: float
    errP: float
    errCurlE: float
    SerrE: float | None = None
    SerrP: float | None = None
    orders: dict = field(default_factory=dict)
    runtime: float = 0.0
    linear_iterations: int = 0
    newton_iterations: int = 0


def _l2(diff: np.ndarray, weights: np.ndarray) -> float:
    axes = "cqk" if diff.ndim == 3 else "cq"
    return float(np.sqrt(np.einsum(f"{axes},{axes},q->", diff, diff, weights)))


def compute_errors(mesh, E, P, case, t: float, with_postprocess: bool = False,
                   order: int = DEFAULT_ORDER) -> ErrorReport:
    """L2 errors of the discrete fields against the exact case at time ``t``."""
    quad = cell_quadrature(mesh, order)
    E_ex = quad.eval_vector(case.at(case.E, t))
    P_ex = quad.eval_vector(case.at(case.P, t))
    curl_ex = case.curl_E(quad.x, quad.y, t)
    rep = ErrorReport(
        N=mesh.n_per_side,
        errE=_l2(edge_field_at_quad(mesh, E, quad) - E_ex, quad.weights),
        errP=_l2(cell_field_at_quad(mesh, P, quad) - P_ex, quad.weights),
        errCurlE=_l2(cell_curl(mesh, E)[:, None] - curl_ex, quad.weights),
    )
    if with_postprocess:
        pairing = macro_pairing(mesh)
        rep.SerrE = _l2(postprocess_E(mesh, pairing, E).at_fine_quad(mesh, order) - E_ex, quad.weights)
        rep.SerrP = _l2(postprocess_P(mesh, pairing, P).at_fine_quad(mesh, order) - P_ex, quad.weights)
    return rep


def convergence_order(coarse: float, fine: float, ratio: float = 2.0) -> float | None:
    """``log(coarse/fine)/log(ratio)``; None when undefined."""
    if coarse is None or fine is None or coarse <= 0 or fine <= 0:
        return None
    return math.log(coarse / fine) / math.log(ratio)


def orders_of(values, ratios=None) -> list[float | None]:
    out = [None]
    for k in range(1, len(values)):
        ratio = 2.0 if ratios is None else ratios[k]
        out.append(convergence_order(values[k - 1], values[k], ratio))
    return out


ERROR_COLUMNS = [("errE", "orderE"), ("errP", "orderP"), ("errCurlE", "orderCurl")]
SUPER_COLUMNS = [("SerrE", "orderSE"), ("SerrP", "orderSP")]


def fill_orders(reports: list[ErrorReport]) -> list[ErrorReport]:
    ratios = [None] + [reports[k].N / reports[k - 1].N for k in range(1, len(reports))]
    for err, name in ERROR_COLUMNS + SUPER_COLUMNS:
        vals = [getattr(r, err) for r in reports]
        if any(v is None for v in vals):
            continue
        for rep, order in zip(reports, orders_of(vals, ratios)):
            rep.orders[name] = order
    return reports


# -- commands -------------------------------------------------------------------


def simulate(cfg: RunConfig, N: int):
    case = manufactured.get_case(cfg.case)
    mesh = build_mesh(case.domain_kind, N)
    result = run(mesh, case, cfg.n_steps, params=cfg.make_params(), law=cfg.make_law(),
                 config=cfg.stepper_config(), source_P=not cfg.strict_paper_mode)
    return case, mesh, result


def converge(cfg: RunConfig) -> list[ErrorReport]:
    reports = []
    for N in cfg.N_list:
        t0 = time.perf_counter()
        case, mesh, result = simulate(cfg, N)
        rep = compute_errors(mesh, result.E, result.P, case, result.t,
                             with_postprocess=cfg.postprocess, order=cfg.quad_order)
        rep.runtime = time.perf_counter() - t0
        rep.linear_iterations = max(result.diagnostics.linear_iterations, default=0)
        rep.newton_iterations = max(result.diagnostics.newton_iterations, default=0)
        reports.append(rep)
    return fill_orders(reports)


def _fmt(value) -> str:
    return MISSING if value is None else f"{value:.17g}"


def table_csv(reports: list[ErrorReport], postprocess: bool = False) -> str:
    cols = ERROR_COLUMNS + (SUPER_COLUMNS if postprocess else [])
    header = ["N"] + [name for pair in cols for name in pair]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for rep in reports:
        row = [str(rep.N)]
        for err, order in cols:
            row += [_fmt(getattr(rep, err)), _fmt(rep.orders.get(order))]
        writer.writerow(row)
    return buf.getvalue()


def parse_table_csv(text: str) -> list[dict]:
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        rows.append({k: (None if v == MISSING else (int(v) if k == "N" else float(v)))
                     for k, v in rec.items()})
    return rows


def _write_matrix(path: Path, values: np.ndarray, header: str, N: int):
    with open(path, "w") as fh:
        fh.write(header + "\n")
        fh.write(f"# rows={N} cols={N} sampling=cell_centers row=y_index col=x_index\n")
        for row in values:
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def _write_glyphs(path: Path, pts: np.ndarray, vec: np.ndarray, header: str):
    with open(path, "w") as fh:
        fh.write(header + "\n")
        fh.write("# x y u v\n")
        for (x, y), (u, v) in zip(pts, vec):
            fh.write(f"{x:.17g} {y:.17g} {u:.17g} {v:.17g}\n")


def snapshot_fields(mesh, E, P, case, t: float, postprocess: bool = False) -> dict:
    """Cell-center samples of the discrete, exact-error and post-processed fields.

    Returns a mapping ``name -> (npts, 2)`` plus the sample points under ``"points"``.
    """
    pts = mesh.cell_centers
    out = {"points": pts}
    out["E_h"] = eval_edge_field(mesh, E, pts)
    out["P_h"] = eval_cell_field(mesh, P, pts)
    E_ex = np.column_stack(case.E(pts[:, 0], pts[:, 1], t))
    P_ex = np.column_stack(case.P(pts[:, 0], pts[:, 1], t))
    out["err_E"] = E_ex - out["E_h"]
    out["err_P"] = P_ex - out["P_h"]
    if postprocess:
        pairing = macro_pairing(mesh)
        out["SE_h"] = postprocess_E(mesh, pairing, E).eval(mesh, pts)
        out["SP_h"] = postprocess_P(mesh, pairing, P).eval(mesh, pts)
        out["err_SE"] = E_ex - out["SE_h"]
        out["err_SP"] = P_ex - out["SP_h"]
    return out


def write_snapshots(out_dir, mesh, fields: dict, case_name: str, t: float) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    N = mesh.n_per_side
    written = []
    for name, vec in fields.items():
        if name == "points":
            continue
        for k, comp in enumerate(("1", "2")):
            grid = np.full((N, N), np.nan)
            grid[mesh.cells[:, 1], mesh.cells[:, 0]] = vec[:, k]
            label = f"{name}{comp}"
            path = out / f"{label}.txt"
            _write_matrix(path, grid, f"# case={case_name} N={N} t={t:.17g} component={label}", N)
            written.append(path)
        path = out / f"{name}.glyph"
        _write_glyphs(path, fields["points"], vec, f"# case={case_name} N={N} t={t:.17g} field={name}")
        written.append(path)
    return written


def run_snapshots(cfg: RunConfig, out_dir=None) -> list[Path]:
    case, mesh, result = simulate(cfg, cfg.N)
    fields = snapshot_fields(mesh, result.E, result.P, case, result.t, cfg.postprocess)
    return write_snapshots(out_dir or cfg.out_dir, mesh, fields, case.name, result.t)


def read_matrix(path) -> np.ndarray:
    return np.loadtxt(path, comments="#", ndmin=2)
