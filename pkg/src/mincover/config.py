"""Run-time settings shared by the command line and batch runners."""
from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Mapping

from .transversal import DEFAULT_NODE_BUDGET

ENV_PREFIX = "MINCOVER_"
OUTPUT_FORMATS = ("text", "json")


@dataclass(frozen=True)
class RunConfig:
    threads: int = 1
    node_budget: int = DEFAULT_NODE_BUDGET
    seed: int = 0
    output_format: str = "text"
    ledger_path: Path = Path("mincover-ledger.jsonl")

    def __post_init__(self):
        if self.threads < 1:
            raise ValueError("threads must be at least 1")
        if self.node_budget < 1:
            raise ValueError("node budget must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")
        if self.output_format not in OUTPUT_FORMATS:
            raise ValueError(f"output format must be one of {OUTPUT_FORMATS}")
        object.__setattr__(self, "ledger_path", Path(self.ledger_path))

    @classmethod
    def from_env(cls, environ: Mapping[str, str] | None = None, **overrides) -> RunConfig:
        """Defaults, then ``MINCOVER_<FIELD>`` variables, then explicit non-None overrides."""
        environ = os.environ if environ is None else environ
        values = {}
        for f in fields(cls):
            raw = environ.get(ENV_PREFIX + f.name.upper())
            if raw is not None:
                values[f.name] = int(raw) if f.type == "int" else raw
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def with_(self, **changes) -> RunConfig:
        return replace(self, **changes)
