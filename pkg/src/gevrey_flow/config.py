"""Strict flat key-value run configuration.

The format is one ``key = value`` pair per line, ``#`` comments, no sections.
Unknown keys, duplicate keys and malformed values are hard errors that name
the offending key: a silent typo in a model parameter would invalidate every
verdict downstream.
"""

from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from .dynamics import IntegratorConfig, NormSchedule
from .errors import ConfigError
from .model import InteractionMatrix, ModelConfig, PowerLawKernel
from .spectral import INF, Lattice, as_summability


def _parse_bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ValueError(f"expected a boolean, got {raw!r}")


def _parse_r(raw: str):
    return as_summability(raw)


def _parse_matrix(raw: str):
    text = raw.strip().lower()
    if text == "rotation":
        return InteractionMatrix.rotation()
    if text == "identity":
        return "identity"
    if text == "-identity":
        return "-identity"
    if ";" in raw:
        rows = [
            [float(cell) for cell in row.split(",")] for row in raw.split(";")
        ]
        return InteractionMatrix(rows)
    return InteractionMatrix.scalar(float(raw))


def _parse_norms(raw: str):
    schedules = []
    for part in raw.split(";"):
        part = part.strip()
        if not part:
            continue
        bits = part.split(":")
        if len(bits) != 4 or bits[0] not in ("phi", "fixed"):
            raise ValueError(
                f"norm schedule must be 'phi:<offset>:<kappa>:<r>' or "
                f"'fixed:<a>:<kappa>:<r>', got {part!r}"
            )
        schedules.append(
            NormSchedule(
                mode=bits[0],
                offset=float(bits[1]),
                kappa=float(bits[2]),
                r=_parse_r(bits[3]),
            )
        )
    return tuple(schedules)


# key -> (parser, default); _REQUIRED means the key must be present
_REQUIRED = object()

_SCHEMA = {
    # model
    "d": (int, _REQUIRED),
    "K": (int, _REQUIRED),
    "s": (float, _REQUIRED),
    "gamma": (float, _REQUIRED),
    "nu": (float, _REQUIRED),
    "alpha": (float, _REQUIRED),
    "beta": (float, _REQUIRED),
    "epsilon": (float, 0.0),
    "mass": (float, 1.0),
    "matrix": (_parse_matrix, _REQUIRED),
    "kernel": (str, "power"),
    # integrator
    "dt": (float, 1e-3),
    "scheme": (str, "exp_heun"),
    "dealias": (_parse_bool, False),
    "overflow_cap": (float, 200.0),
    "blowup_factor": (float, 1e8),
    "snapshot_stride": (int, 10),
    "bilinear_method": (str, "auto"),
    # tracked norms
    "norms": (_parse_norms, ()),
    # stochastic
    "seed": (int, 0),
    "n_paths": (int, 10000),
    "mc_dt": (float, 1e-3),
    "horizon": (float, 1.0),
    # run horizon and admissibility inputs
    "T": (float, 1.0),
    "sigma": (float, 0.9),
    "r": (_parse_r, 1.0),
    "smallness_constant": (float, 1.0),
    # initial data
    "init_norm": (float, 0.01),
    "init_decay": (float, 0.5),
    "init_seed": (int, 1),
    # decay verification
    "n_omega_paths": (int, 20),
    "max_path_attempts": (int, 10000),
    "decay_pointwise_slack": (float, 1.05),
    "decay_fit_slack": (float, 0.05),
    # oracle comparison
    "picard_n_iter": (int, 8),
    "picard_refine": (int, 4),
    "picard_tol": (float, 1e-6),
    "property_fields": (int, 1000),
    # outputs
    "csv": (str, "snapshots.csv"),
    "json": (str, "report.json"),
    "field_dump": (str, ""),
    "field_dump_stride": (int, 0),
}


@dataclass(frozen=True)
class RunConfig:
    """Typed view of a parsed configuration file."""

    values: dict

    def __getattr__(self, name):
        try:
            return self.values[name]
        except KeyError:
            raise AttributeError(name) from None

    def lattice(self) -> Lattice:
        return Lattice(d=self.values["d"], K=self.values["K"])

    def model_config(self) -> ModelConfig:
        v = self.values
        if v["kernel"] != "power":
            raise ConfigError(
                f"config key 'kernel': only 'power' is supported in files, "
                f"got {v['kernel']!r}"
            )
        matrix = v["matrix"]
        if matrix == "identity":
            matrix = InteractionMatrix.identity(v["d"])
        elif matrix == "-identity":
            matrix = InteractionMatrix.identity(v["d"], sign=-1.0)
        if matrix.d != v["d"]:
            raise ConfigError(
                f"config key 'matrix': dimension {matrix.d} does not match d={v['d']}"
            )
        return ModelConfig(
            d=v["d"],
            s=v["s"],
            nu=v["nu"],
            alpha=v["alpha"],
            beta=v["beta"],
            epsilon=v["epsilon"],
            matrix=matrix,
            kernel=PowerLawKernel(v["gamma"]),
            mass=v["mass"],
        )

    def integrator_config(self) -> IntegratorConfig:
        v = self.values
        return IntegratorConfig(
            dt=v["dt"],
            scheme=v["scheme"],
            dealias=v["dealias"],
            overflow_cap=v["overflow_cap"],
            blowup_factor=v["blowup_factor"],
            snapshot_stride=v["snapshot_stride"],
            bilinear_method=v["bilinear_method"],
        )

    def schedules(self):
        v = self.values
        if v["norms"]:
            return v["norms"]
        return (
            NormSchedule(mode="phi", offset=v["epsilon"], kappa=v["sigma"], r=v["r"]),
        )

    def with_seed(self, seed: int) -> "RunConfig":
        vals = dict(self.values)
        vals["seed"] = int(seed)
        return RunConfig(vals)


def parse_config(text: str) -> RunConfig:
    values = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw_line!r}")
        key, raw_value = (part.strip() for part in line.split("=", 1))
        if key not in _SCHEMA:
            raise ConfigError(f"unknown config key {key!r} (line {lineno})")
        if key in values:
            raise ConfigError(f"duplicate config key {key!r} (line {lineno})")
        parser, _ = _SCHEMA[key]
        try:
            values[key] = parser(raw_value)
        except ConfigError:
            raise
        except Exception as exc:
            raise ConfigError(f"config key {key!r}: {exc}") from exc
    for key, (_, default) in _SCHEMA.items():
        if key in values:
            continue
        if default is _REQUIRED:
            raise ConfigError(f"missing required config key {key!r}")
        values[key] = default
    return RunConfig(values)


def load_config(path) -> RunConfig:
    with open(path) as fh:
        return parse_config(fh.read())
