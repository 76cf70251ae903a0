"""File formats: JSON with 17-significant-digit floats and fixed key order, CSV grids."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from .basis import ModeBasis
from .config import Boundary, Dirichlet, DiskConfig, Robin
from .field import FieldGrid, FieldState
from .spectrum import RobinSpectrum
from .symmetry import KernelCoefficients


class InputFormatError(ValueError):
    """A state, coefficient or config file could not be understood."""


def format_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite float {x}")
    return format(x, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """Deterministic JSON text; dict order is kept as given."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj) + "\n", encoding="utf-8")


def read_json(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputFormatError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


# -- config ----------------------------------------------------------------


def boundary_to_dict(boundary: Boundary) -> dict:
    if isinstance(boundary, Dirichlet):
        return {"kind": "dirichlet"}
    return {"kind": "robin", "lambda": boundary.lam}


def boundary_from_dict(data) -> Boundary:
    kind = _field(data, "kind", str, "boundary")
    if kind == "dirichlet":
        return Dirichlet()
    if kind == "robin":
        return Robin(_number(data, "lambda", "boundary"))
    raise InputFormatError(f"boundary kind must be 'robin' or 'dirichlet', got {kind!r}")


def config_to_dict(cfg: DiskConfig) -> dict:
    return {
        "radius": cfg.radius,
        "mass": cfg.mass,
        "boundary": boundary_to_dict(cfg.boundary),
        "l_max": cfg.l_max,
        "n_max": cfg.n_max,
    }


def config_from_dict(data) -> DiskConfig:
    if not isinstance(data, dict):
        raise InputFormatError("config must be a JSON object")
    try:
        return DiskConfig(
            radius=_number(data, "radius", "config"),
            mass=_number(data, "mass", "config"),
            boundary=boundary_from_dict(data.get("boundary")),
            l_max=_field(data, "l_max", int, "config"),
            n_max=_field(data, "n_max", int, "config"),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InputFormatError):
            raise
        raise InputFormatError(f"config: {exc}") from exc


@dataclass
class RunConfig:
    """Everything a command needs; round-trips through JSON unchanged."""

    radius: float = 1.0
    mass: float = 0.0
    boundary: str = "robin"
    lam: float = -1.0
    l_max: int = 6
    n_max: int = 6
    grid_r: int | None = None
    grid_theta: int | None = None
    seed: int = 20190531
    out: str | None = None
    suite: str = "all"
    times: list[float] | None = None
    state: str | None = None
    coefficients: str | None = None
    csv: str | None = None

    def disk(self) -> DiskConfig:
        if self.boundary == "dirichlet":
            bnd: Boundary = Dirichlet()
        elif self.boundary == "robin":
            bnd = Robin(float(self.lam))
        else:
            raise ValueError(f"boundary must be 'robin' or 'dirichlet', got {self.boundary!r}")
        return DiskConfig(radius=float(self.radius), mass=float(self.mass), boundary=bnd,
                          l_max=int(self.l_max), n_max=int(self.n_max))

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data) -> "RunConfig":
        if not isinstance(data, dict):
            raise InputFormatError("run config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise InputFormatError(f"unknown run config keys: {', '.join(unknown)}")
        return cls(**data)


# -- spectrum --------------------------------------------------------------


def spectrum_to_dict(spectrum: RobinSpectrum) -> dict:
    entries = [
        {"l": e.ell, "n": e.n, "x": e.x, "k": e.k, "omega": e.omega, "norm": e.norm, "residual": e.residual}
        for e in (spectrum[key] for key in spectrum.indices())
    ]
    return {"config": config_to_dict(spectrum.config), "entries": entries}


def write_spectrum_csv(path, spectrum: RobinSpectrum) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["l", "n", "x", "k", "omega", "norm", "residual"])
        for key in spectrum.indices():
            e = spectrum[key]
            out.writerow([e.ell, e.n] + [format_float(v) for v in (e.x, e.k, e.omega, e.norm, e.residual)])


# -- states and coefficients -----------------------------------------------


def state_to_dict(state: FieldState) -> dict:
    amps = [
        {"l": ell, "n": n, "re": float(a.real), "im": float(a.imag)}
        for (ell, n), a in zip(state.basis.index, state.amplitudes)
    ]
    return {"t0": state.t0, "amplitudes": amps}


def state_from_dict(data, basis: ModeBasis) -> FieldState:
    """Parse a state; its (l, n) set must equal the basis truncation exactly."""
    if not isinstance(data, dict):
        raise InputFormatError("state must be a JSON object")
    t0 = _number(data, "t0", "state")
    rows = data.get("amplitudes")
    if not isinstance(rows, list):
        raise InputFormatError("state: 'amplitudes' must be a list")
    values: dict[tuple[int, int], complex] = {}
    for i, row in enumerate(rows):
        where = f"state amplitude #{i}"
        key = (_field(row, "l", int, where), _field(row, "n", int, where))
        if key in values:
            raise InputFormatError(f"{where}: duplicate mode {key}")
        values[key] = complex(_number(row, "re", where), _number(row, "im", where))
    expected = set(basis.index)
    if set(values) != expected:
        missing = sorted(expected - set(values))
        extra = sorted(set(values) - expected)
        raise InputFormatError(
            f"state modes do not match the truncation: missing {missing[:5]}{'...' if len(missing) > 5 else ''}, "
            f"unexpected {extra[:5]}{'...' if len(extra) > 5 else ''}"
        )
    amps = np.array([values[key] for key in basis.index])
    return FieldState(basis, amps, t0)


def coefficients_to_dict(coeffs: KernelCoefficients, sparse: bool = True) -> dict:
    idx = coeffs.basis.index
    keep = (lambda v: v != 0) if sparse else (lambda v: True)
    return {
        "alpha_plus": [{"l": l, "n": n, "re": float(v.real), "im": float(v.imag)}
                       for (l, n), v in zip(idx, coeffs.alpha_plus) if keep(v)],
        "alpha_minus": [{"l": l, "n": n, "v": float(v.real)}
                        for (l, n), v in zip(idx, coeffs.alpha_minus) if keep(v)],
        "beta": [{"l": l, "n": n, "v": float(v.real)}
                 for (l, n), v in zip(idx, coeffs.beta) if keep(v)],
    }


def coefficients_from_dict(data, basis: ModeBasis) -> KernelCoefficients:
    """Sparse coefficient lists; absent entries are zero. Constraints are not checked here."""
    if not isinstance(data, dict):
        raise InputFormatError("coefficients must be a JSON object")
    tables = []
    for family, cplx in (("alpha_plus", True), ("alpha_minus", False), ("beta", False)):
        rows = data.get(family, [])
        if not isinstance(rows, list):
            raise InputFormatError(f"coefficients: '{family}' must be a list")
        table = {}
        for i, row in enumerate(rows):
            where = f"{family} #{i}"
            key = (_field(row, "l", int, where), _field(row, "n", int, where))
            if key not in basis:
                raise InputFormatError(f"{where}: mode {key} outside the truncation")
            if key in table:
                raise InputFormatError(f"{where}: duplicate mode {key}")
            if cplx:
                table[key] = complex(_number(row, "re", where), _number(row, "im", where))
            else:
                table[key] = _number(row, "v", where)
        tables.append(table)
    unknown = sorted(set(data) - {"alpha_plus", "alpha_minus", "beta"})
    if unknown:
        raise InputFormatError(f"coefficients: unknown keys {unknown}")
    return KernelCoefficients.from_sparse(basis, *tables)


# -- trajectory CSV --------------------------------------------------------


def write_trajectory_csv(path, frames: list[FieldGrid]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["t", "r", "theta", "phi", "pi"])
        for fg in frames:
            t = format_float(fg.t)
            for i, r in enumerate(fg.grid.r):
                rs = format_float(r)
                for j, th in enumerate(fg.grid.theta):
                    out.writerow([t, rs, format_float(th), format_float(fg.phi[i, j]), format_float(fg.pi[i, j])])


def read_trajectory_csv(path) -> np.ndarray:
    """(rows, 5) float array of a trajectory file."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["t", "r", "theta", "phi", "pi"]:
            raise InputFormatError(f"unexpected trajectory header {header}")
        return np.array([[float(v) for v in row] for row in reader]).reshape(-1, 5)


# -- helpers ---------------------------------------------------------------


def _field(data, key, kind, where):
    if not isinstance(data, dict) or key not in data:
        raise InputFormatError(f"{where}: missing '{key}'")
    val = data[key]
    if kind is int and (isinstance(val, bool) or not isinstance(val, int)):
        raise InputFormatError(f"{where}: '{key}' must be an integer, got {val!r}")
    if kind is str and not isinstance(val, str):
        raise InputFormatError(f"{where}: '{key}' must be a string, got {val!r}")
    return val


def _number(data, key, where) -> float:
    if not isinstance(data, dict) or key not in data:
        raise InputFormatError(f"{where}: missing '{key}'")
    val = data[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise InputFormatError(f"{where}: '{key}' must be a number, got {val!r}")
    if not math.isfinite(val):
        raise InputFormatError(f"{where}: '{key}' must be finite")
    return float(val)
