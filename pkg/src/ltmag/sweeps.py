"""Parameter sweeps over one or two axes.

An axis is a dotted config path (``drive.delta``, ``drive.pump12``,
``cavity.kappa``, ...) or one of two pseudo-paths: ``b_field`` sets the
detuning from a bias field in tesla, ``pump`` moves both branch pump
rates together.  With two axes the second one
varies fastest, and row order is fully deterministic regardless of the
execution backend.  Points where a solver raises a physics-domain or
convergence error keep their axis cells and leave the value cells
absent.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __about__
from .configio import _SCHEMA, _apply_one, config_digest
from .errors import (ConvergenceError, InvalidConfigError,
                     PhysicsDomainError)
from .model import (ModelConfig, derive_constants, output_power,
                    with_bias_field, with_pump)
from .sensitivity import dc_sensitivity
from .steady import solve_steady_state
from .tables import Column, OutputTable

_POP_FIELDS = ("rho11", "rho22", "rho33", "rho44", "rho55", "rho66",
               "rho77", "rho14_re", "rho14_im")

# output name -> columns it contributes
OUTPUTS: dict[str, tuple[Column, ...]] = {
    "n": (Column("n", "1"),),
    "P_out": (Column("P_out", "W"),),
    "branch": (Column("branch", ""),),
    "net_gain": (Column("net_gain", "rad/s"),),
    "populations": tuple(Column(name, "1") for name in _POP_FIELDS),
    "eta_dc": (Column("eta_dc", "T/sqrt(Hz)"),),
}


@dataclass(frozen=True)
class SweepAxis:
    path: str
    start: float
    stop: float
    points: int
    scale: str = "linear"

    def __post_init__(self):
        if self.points < 1:
            raise InvalidConfigError("axis needs at least one point")
        if self.scale not in ("linear", "log"):
            raise InvalidConfigError(
                f"axis scale must be linear or log, got {self.scale!r}")
        if self.scale == "log" and (self.start <= 0.0 or self.stop <= 0.0):
            raise InvalidConfigError("log axis endpoints must be > 0")
        _axis_unit(self.path)  # validates the path

    def values(self) -> np.ndarray:
        if self.points == 1:
            return np.array([self.start], dtype=float)
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.points)
        return np.linspace(self.start, self.stop, self.points)

    def column(self) -> Column:
        return Column(self.path, _axis_unit(self.path))


def _axis_unit(path: str) -> str:
    if path in ("b_field",):
        return "T"
    if path == "pump":
        return "rad/s"
    if "." in path:
        section, _, name = path.partition(".")
        unit = _SCHEMA.get(section, {}).get(name, "missing")
        if unit == "missing" or unit == "str":
            raise InvalidConfigError(f"cannot sweep path {path!r}")
        return unit if unit is not None else "1"
    raise InvalidConfigError(f"cannot sweep path {path!r}")


@dataclass(frozen=True)
class SweepSpec:
    axis1: SweepAxis
    axis2: SweepAxis | None = None
    outputs: tuple[str, ...] = ("n", "P_out")

    def __post_init__(self):
        for name in self.outputs:
            if name not in OUTPUTS:
                raise InvalidConfigError(
                    f"unknown sweep output {name!r}; "
                    f"available: {sorted(OUTPUTS)}")
        if not self.outputs:
            raise InvalidConfigError("sweep needs at least one output")


def _apply_axis(config: ModelConfig, path: str, value: float) -> ModelConfig:
    if path == "b_field":
        return with_bias_field(config, value)
    if path == "pump":
        return with_pump(config, value)
    return _apply_one(config, path, value)


def _eval_point(payload) -> tuple:
    """Evaluate all requested outputs at one grid point.

    Module-level so process pools can pickle it.  Physics-domain and
    convergence errors at a point yield absent value cells.
    """
    config, assignments, outputs = payload
    cells: list = [value for _, value in assignments]
    for path, value in assignments:
        config = _apply_axis(config, path, float(value))
    try:
        ss = solve_steady_state(config)
    except (PhysicsDomainError, ConvergenceError):
        for name in outputs:
            cells.extend([None] * len(OUTPUTS[name]))
        return tuple(cells)
    d = derive_constants(config)
    for name in outputs:
        if name == "n":
            cells.append(ss.n)
        elif name == "P_out":
            cells.append(output_power(ss.n, config, d))
        elif name == "branch":
            cells.append(ss.branch)
        elif name == "net_gain":
            cells.append(ss.net_gain)
        elif name == "populations":
            cells.extend(ss.aligned.as_array().tolist())
        elif name == "eta_dc":
            cells.append(_eta_cell(config, d))
    return tuple(cells)


def _eta_cell(config: ModelConfig, derived) -> float | None:
    from .errors import BelowThresholdError
    from .model import detuning_to_b_field

    b = detuning_to_b_field(config.drive.delta, config.constants)
    try:
        res = dc_sensitivity(config, b)
    except (BelowThresholdError, ConvergenceError):
        return None
    return res.eta if not res.diverged else math.inf


def run_sweep(config: ModelConfig, spec: SweepSpec, *, parallel: bool = True,
              max_workers: int | None = None,
              provenance: dict | None = None) -> OutputTable:
    """Evaluate the sweep grid and return one row per point.

    Parallel execution (on by default for grids of 32+ points) changes
    neither values nor row order.
    """
    axes = [spec.axis1] + ([spec.axis2] if spec.axis2 else [])
    grids = [axis.values() for axis in axes]
    payloads = []
    if len(axes) == 1:
        for v1 in grids[0]:
            payloads.append((config, ((axes[0].path, float(v1)),),
                             spec.outputs))
    else:
        for v1 in grids[0]:
            for v2 in grids[1]:   # second axis fastest
                payloads.append((config, ((axes[0].path, float(v1)),
                                          (axes[1].path, float(v2))),
                                 spec.outputs))
    columns = [axis.column() for axis in axes]
    for name in spec.outputs:
        columns.extend(OUTPUTS[name])

    if parallel and len(payloads) >= 32:
        chunk = max(1, len(payloads) // 64)
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            rows = list(pool.map(_eval_point, payloads, chunksize=chunk))
    else:
        rows = [_eval_point(p) for p in payloads]

    prov = {
        "config_digest": config_digest(config)[:12],
        "generator": f"ltmag {__about__.__version__}",
        "kind": "sweep",
        "axes": " x ".join(a.path for a in axes),
        "outputs": ",".join(spec.outputs),
    }
    if provenance:
        prov.update(provenance)
    return OutputTable(columns=tuple(columns), rows=rows, provenance=prov)
