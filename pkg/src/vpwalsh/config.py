"""Run configuration: number mode, budgets, and the sampling seed.

The config file is plain JSON with exactly the fields of RunConfig; CLI
flags override file values.  Every output artifact embeds the snapshot, so
a rerun with the same config and seed reproduces the artifact (byte for
byte in exact mode).
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, replace

from .errors import PreconditionError

DEFAULT_SEED = 142857


@dataclass(frozen=True)
class RunConfig:
    number_mode: str = "exact"  # "exact" | "float"
    max_resolution: int = 12  # budget for matrix-shaped work (4^M cost)
    max_transform_resolution: int = 22  # budget for single transforms (M 2^M cost)
    max_dense_log_degree: int = 24  # dense block-polynomial cap
    bit_budget: int = 1 << 20  # strict-plan width cap
    scan_limit: int = 1 << 16  # linear width-scan horizon
    scan_n_budget: int = 1 << 21  # ratio-threshold scan horizon
    brute_window: int = 1 << 12  # certificate brute-force window cap
    enumerable_width: int = 16  # widest spectrum enumerated literally
    exhaustive_resolution: int = 12  # sample all cells up to this resolution
    sample_count: int = 1000  # random sample size past that
    seed: int = DEFAULT_SEED
    out_dir: str = "out"

    def __post_init__(self):
        if self.number_mode not in ("exact", "float"):
            raise PreconditionError(f"number_mode must be exact|float, got {self.number_mode!r}")
        for name in (
            "max_resolution",
            "max_transform_resolution",
            "max_dense_log_degree",
            "bit_budget",
            "scan_limit",
            "scan_n_budget",
            "brute_window",
            "enumerable_width",
            "exhaustive_resolution",
            "sample_count",
        ):
            if getattr(self, name) <= 0:
                raise PreconditionError(f"budget {name} must be positive")

    def snapshot(self) -> dict:
        return asdict(self)

    @staticmethod
    def from_file(path: str) -> "RunConfig":
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        unknown = set(data) - set(RunConfig.__dataclass_fields__)
        if unknown:
            raise PreconditionError(f"unknown config fields: {sorted(unknown)}")
        return RunConfig(**data)

    def override(self, **kwargs) -> "RunConfig":
        kwargs = {k: v for k, v in kwargs.items() if v is not None}
        return replace(self, **kwargs)
