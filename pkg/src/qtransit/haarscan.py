"""Scan Haar-random three-qudit pure states for nonlocal pair marginals.

Each sample is classified by how many of its three bipartite reduced states
violate a Bell inequality under see-saw optimization: none, one, two or all.
Records stream to an append-only JSON-lines file so long runs survive
interruption and can resume; aggregation is a fold over that file. Every
random choice derives from the config's base seed and the sample index, so
reruns are bitwise identical regardless of scheduling or batch size.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bellopt import default_restarts, make_functional, seesaw_optimize
from .errors import DomainError
from .qcore import Ket, haar_random_ket, partial_trace
from .rng import derive_seed

__all__ = [
    "ScanConfig",
    "ScanRecord",
    "ScanSummary",
    "classify_sample",
    "run_scan",
    "aggregate",
    "read_records",
    "QUTRIT_ALL_EXAMPLE",
]

PAIRS = (("AB", (0, 1)), ("BC", (1, 2)), ("AC", (0, 2)))
CLASS_NAMES = ("none", "one", "two", "all")

# (base_seed, sample index) of a three-qutrit sample whose three marginals
# all violate CHSH; found during development, kept as a regression anchor.
QUTRIT_ALL_EXAMPLE = (7, 8)

# Native setting counts of the supported inequalities.
_INEQUALITY_SETTINGS = {"chsh": 2, "i3322": 3}

_RECORDS_NAME = "records.jsonl"
_SUMMARY_NAME = "summary.csv"
_CONFIG_NAME = "config.json"


@dataclass(frozen=True)
class ScanConfig:
    """Scan parameters; defaults mirror the published experiment.

    settings is the number of measurement settings per party (binary
    outcomes throughout). restarts is the number of see-saw initial guesses
    per (pair, inequality); None picks the published count for (d,
    settings). The inequality set defaults to CHSH alone at two settings
    and CHSH + I3322 at three; a CHSH violation found with two settings is
    also a violation at three, so the three-setting run evaluates CHSH in
    its native scenario with the identical seed derivation and inherits any
    two-setting success by construction.
    """

    d: int
    settings: int
    samples: int
    base_seed: int
    restarts: int | None = None
    inequalities: tuple[str, ...] | None = None
    tolerance: float = 1e-6

    def __post_init__(self):
        if self.d not in (2, 3, 4, 5):
            raise DomainError(f"local dimension must be 2..5, got {self.d}")
        if self.settings not in (2, 3):
            raise DomainError(f"settings per party must be 2 or 3, got {self.settings}")
        if self.samples < 1:
            raise DomainError("need at least one sample")
        if self.restarts is not None and self.restarts < 1:
            raise DomainError("restarts must be positive")
        if self.tolerance <= 0:
            raise DomainError("violation tolerance must be positive")
        for name in self.inequality_set:
            native = _INEQUALITY_SETTINGS.get(name)
            if native is None:
                raise DomainError(f"unknown inequality {name!r}")
            if native > self.settings:
                raise DomainError(
                    f"{name} needs {native} settings, config allows {self.settings}"
                )

    @property
    def inequality_set(self) -> tuple[str, ...]:
        if self.inequalities is not None:
            return tuple(self.inequalities)
        return ("chsh",) if self.settings == 2 else ("chsh", "i3322")

    @property
    def guess_count(self) -> int:
        if self.restarts is not None:
            return self.restarts
        return default_restarts(self.d, self.settings)

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "settings": self.settings,
            "samples": self.samples,
            "base_seed": self.base_seed,
            "restarts": self.restarts,
            "inequalities": list(self.inequality_set),
            "tolerance": self.tolerance,
        }

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class ScanRecord:
    """Per-sample outcome: see-saw values, violation flags, class label."""

    index: int
    seed: int | None
    values: dict
    margins: dict
    flags: dict
    classification: str

    def __post_init__(self):
        n = sum(bool(v) for v in self.flags.values())
        if CLASS_NAMES[n] != self.classification:
            raise DomainError(
                f"classification {self.classification!r} disagrees with flags"
            )

    def to_json(self) -> str:
        return json.dumps(
            {
                "index": self.index,
                "seed": self.seed,
                "values": self.values,
                "margins": self.margins,
                "flags": self.flags,
                "classification": self.classification,
            },
            sort_keys=True,
        )

    @staticmethod
    def from_json(line: str) -> "ScanRecord":
        raw = json.loads(line)
        return ScanRecord(
            index=raw["index"],
            seed=raw["seed"],
            values=raw["values"],
            margins=raw["margins"],
            flags=raw["flags"],
            classification=raw["classification"],
        )


@dataclass(frozen=True)
class ScanSummary:
    config: ScanConfig
    counts: dict
    fractions: dict = field(init=False)

    def __post_init__(self):
        total = sum(self.counts.values())
        if total != self.config.samples:
            raise DomainError(
                f"aggregated {total} records, config expects {self.config.samples}"
            )
        object.__setattr__(
            self,
            "fractions",
            {k: self.counts[k] / total for k in CLASS_NAMES},
        )

    def csv_row(self) -> dict:
        return {
            "d": self.config.d,
            "M": self.config.settings,
            "samples": self.config.samples,
            "guesses": self.config.guess_count,
            **{f"{k}_pct": round(100.0 * self.fractions[k], 4) for k in CLASS_NAMES},
        }


def sample_ket(cfg: ScanConfig, index: int) -> Ket:
    """The index-th Haar sample of the scan, reproducible in isolation."""
    return haar_random_ket(
        (cfg.d,) * 3, derive_seed(cfg.base_seed, "sample", index)
    )


def classify_sample(ket: Ket, cfg: ScanConfig, index: int = 0, seed=None) -> ScanRecord:
    """Optimize every configured inequality on each pair marginal and flag
    the pairs that violate.

    The see-saw seed depends on (base_seed, index, pair, inequality) but
    not on the setting count, so enlarging the inequality set never loses
    a violation already found with fewer settings.
    """
    if ket.layout.dims != (cfg.d,) * 3:
        raise DomainError(
            f"sample lives on {ket.layout.dims}, config scans {(cfg.d,) * 3}"
        )
    rho = ket.density()
    values: dict = {}
    margins: dict = {}
    flags: dict = {}
    for pair, keep in PAIRS:
        reduced = partial_trace(rho, keep)
        per_ineq = {}
        best_margin = -np.inf
        for name in cfg.inequality_set:
            f = make_functional(name)
            res = seesaw_optimize(
                reduced,
                f,
                restarts=cfg.guess_count,
                seed=derive_seed(cfg.base_seed, "seesaw", index, pair, name),
            )
            per_ineq[name] = float(res.value)
            best_margin = max(best_margin, res.value - f.local_bound)
        values[pair] = per_ineq
        margins[pair] = float(best_margin)
        flags[pair] = bool(best_margin > cfg.tolerance)
    n = sum(flags.values())
    return ScanRecord(
        index=index,
        seed=seed,
        values=values,
        margins=margins,
        flags=flags,
        classification=CLASS_NAMES[n],
    )


def aggregate(records) -> dict:
    """Classification counts over an iterable of records."""
    counts = {name: 0 for name in CLASS_NAMES}
    for rec in records:
        counts[rec.classification] += 1
    return counts


def read_records(out_dir) -> list[ScanRecord]:
    path = Path(out_dir) / _RECORDS_NAME
    if not path.exists():
        return []
    with path.open() as fh:
        return [ScanRecord.from_json(line) for line in fh if line.strip()]


def _load_or_store_config(out_dir: Path, cfg: ScanConfig):
    path = out_dir / _CONFIG_NAME
    if path.exists():
        stored = json.loads(path.read_text())
        if stored.get("digest") != cfg.digest():
            raise DomainError(
                f"output directory {out_dir} holds a scan with different "
                "parameters; refusing to mix records"
            )
    else:
        path.write_text(
            json.dumps({"digest": cfg.digest(), **cfg.to_dict()}, indent=2) + "\n"
        )


def run_scan(cfg: ScanConfig, out_dir, progress=None) -> ScanSummary:
    """Run (or resume) a scan, streaming records to out_dir.

    Completed samples found in the records file are kept as-is; the run
    continues from the first missing index, appending one JSON line per
    sample as it completes. A summary CSV row in the published table's
    column order is rewritten at the end. OS-level failures propagate as
    OSError, distinct from domain errors.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _load_or_store_config(out, cfg)
    existing = read_records(out)
    done = {rec.index for rec in existing}
    unexpected = done - set(range(cfg.samples))
    if unexpected:
        raise DomainError(
            f"records file holds sample indices {sorted(unexpected)[:4]}... "
            "outside the configured range"
        )
    records = list(existing)
    path = out / _RECORDS_NAME
    with path.open("a") as fh:
        for index in range(cfg.samples):
            if index in done:
                continue
            seed = derive_seed(cfg.base_seed, "sample", index)
            rec = classify_sample(sample_ket(cfg, index), cfg, index=index, seed=seed)
            fh.write(rec.to_json() + "\n")
            fh.flush()
            records.append(rec)
            if progress is not None:
                progress(rec)
    summary = ScanSummary(config=cfg, counts=aggregate(records))
    row = summary.csv_row()
    with (out / _SUMMARY_NAME).open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(row))
        writer.writeheader()
        writer.writerow(row)
    return summary
