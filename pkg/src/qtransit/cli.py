"""Command-line front end.

Every subcommand is a thin adapter over one library call: parse arguments,
load inputs, print results (floats at 10 significant digits), map errors to
exit codes. No numerics live here.

Exit codes: 0 success, 1 domain or solver error (including infeasibility
where a result was demanded), 2 usage error, 3 capacity error.

Runs that write files also write a manifest recording the command, the full
configuration, seeds and output paths, so any published number can be
re-derived from the manifest alone. Commands that only print accept
--manifest PATH to opt in. The QTRANSIT_OUT_DIR environment variable supplies
a default --out directory where one is accepted.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import bounds as bounds_mod
from . import haarscan, kvgame, marginal, npa, states
from .bellopt import (
    correlation_from_dict,
    horodecki_chsh,
    make_functional,
    seesaw_optimize,
)
from .errors import CapacityError, DomainError, IncompatibleMarginalsError, SolverFailure
from .qcore import DensityOp, Ket, load_state, save_state

try:
    from importlib.metadata import version as _pkg_version

    VERSION = _pkg_version("artifact")
except Exception:  # pragma: no cover - metadata missing in odd installs
    VERSION = "unknown"

# Single-parameter two-qubit families the sweep command can scan.
_SWEEP_FAMILIES = {
    "cg04_ab": "mu",
    "cg04_ac": "mu",
    "sg05_ab": "alpha",
    "sg05_ac": "alpha",
}

_TABLE_COLUMNS = ("d", "M", "samples", "guesses", "none_pct", "one_pct", "two_pct", "all_pct")


def _fmt(x) -> str:
    return format(float(x), ".10g")


def _now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    """Reproducibility record written alongside file outputs."""

    command: str
    argv: list
    config: dict
    version: str = VERSION
    seed: int | None = None
    started: str = ""
    finished: str = field(default_factory=_now)
    outputs: list = field(default_factory=list)

    def write(self, path: Path):
        path.write_text(json.dumps(asdict(self), indent=2, default=str) + "\n")


def _emit_manifest(args, command: str, config: dict, outputs: list, seed=None):
    """One manifest per run: next to the outputs, or at --manifest."""
    explicit = getattr(args, "manifest", None)
    if explicit:
        target = Path(explicit)
    elif outputs:
        first = Path(outputs[0])
        base = first if first.is_dir() else first.parent
        name = "manifest.json" if first.is_dir() else f"{first.stem}.manifest.json"
        target = base / name
    else:
        return
    manifest = RunManifest(
        command=command,
        argv=list(sys.argv[1:]) if args.argv_snapshot is None else args.argv_snapshot,
        config=config,
        seed=seed,
        started=args.started,
        outputs=[str(p) for p in outputs],
    )
    manifest.write(target)


def _default_out(value):
    if value is not None:
        return value
    env = os.environ.get("QTRANSIT_OUT_DIR")
    if env:
        return env
    raise DomainError("no --out given and QTRANSIT_OUT_DIR is not set")


def _load_density(path) -> DensityOp:
    op = load_state(path)
    if isinstance(op, Ket):
        return op.density()
    return op


def _parse_params(pairs):
    out = {}
    for pair in pairs or ():
        if "=" not in pair:
            raise DomainError(f"--param expects key=value, got {pair!r}")
        key, raw = pair.split("=", 1)
        try:
            out[key] = json.loads(raw)
        except json.JSONDecodeError:
            out[key] = raw
    return out


# --- state ------------------------------------------------------------------


def cmd_state_make(args) -> int:
    op = states.make_state(args.name, **_parse_params(args.param))
    save_state(op, args.out)
    kind = "ket" if isinstance(op, Ket) else "density"
    dims = op.layout.dims
    print(f"{args.name} -> {args.out} ({kind}, dims {list(dims)})")
    _emit_manifest(
        args,
        "state make",
        {"name": args.name, "params": _parse_params(args.param)},
        [args.out],
    )
    return 0


def cmd_state_show(args) -> int:
    op = load_state(args.file)
    if isinstance(op, Ket):
        print(f"kind: ket  dims: {list(op.layout.dims)}")
        probs = np.abs(op.amps) ** 2
        print("weights:", " ".join(_fmt(p) for p in probs if p > 1e-12))
    else:
        print(f"kind: density  dims: {list(op.layout.dims)}")
        print("purity:", _fmt(op.purity()))
        print("eigenvalues:", " ".join(_fmt(v) for v in op.eigvals()))
    return 0


# --- bell -------------------------------------------------------------------


def cmd_bell_horodecki(args) -> int:
    value = horodecki_chsh(_load_density(args.state))
    print(_fmt(value))
    return 0


def cmd_bell_seesaw(args) -> int:
    rho = _load_density(args.state)
    params = {}
    if args.functional == "kv":
        params = {"ell": args.ell, "eta": args.eta}
    f = make_functional(args.functional, **params)
    res = seesaw_optimize(rho, f, restarts=args.restarts, seed=args.seed)
    print("value:", _fmt(res.value))
    print("local_bound:", _fmt(f.local_bound))
    print("margin:", _fmt(res.value - f.local_bound))
    print("converged:", res.converged)
    _emit_manifest(
        args,
        "bell seesaw",
        {"state": args.state, "functional": args.functional, "restarts": args.restarts},
        [],
        seed=args.seed,
    )
    return 0


def cmd_bell_sweep(args) -> int:
    param = _SWEEP_FAMILIES.get(args.family)
    if param is None:
        raise DomainError(
            f"family must be one of {sorted(_SWEEP_FAMILIES)}, got {args.family!r}"
        )
    out = Path(_default_out(args.out))
    out.mkdir(parents=True, exist_ok=True)
    grid = np.linspace(args.lo, args.hi, args.points)
    records = out / "records.jsonl"
    with records.open("w") as fh:
        for x in grid:
            value = horodecki_chsh(states.make_state(args.family, **{param: float(x)}))
            fh.write(json.dumps({"parameter": float(x), "value": float(value)}) + "\n")
    print(f"{args.points} points -> {records}")
    _emit_manifest(
        args,
        "bell sweep",
        {"family": args.family, "lo": args.lo, "hi": args.hi, "points": args.points},
        [out],
    )
    return 0


# --- npa --------------------------------------------------------------------


def _load_correlation(path):
    with open(path, encoding="utf8") as fh:
        return correlation_from_dict(json.load(fh))


def cmd_npa_membership(args) -> int:
    inside = npa.q1_membership(_load_correlation(args.correlation), tol=args.tol)
    print("inside" if inside else "outside")
    return 0


def cmd_npa_visibility(args) -> int:
    value = npa.q1_visibility(_load_correlation(args.correlation))
    print(_fmt(value))
    return 0


# --- marginal ---------------------------------------------------------------


def _load_spec(args) -> marginal.MarginalSpec:
    return marginal.MarginalSpec(
        _load_density(args.rho_ab), _load_density(args.rho_bc)
    )


def cmd_marginal_overlap(args) -> int:
    spec = _load_spec(args)
    target = load_state(args.target)
    value, rho = marginal.compatible_extremal_overlap(
        spec, target, args.sense, support_presolve=not args.no_presolve
    )
    print(f"{args.sense} overlap:", _fmt(value))
    outputs = []
    if args.out:
        save_state(rho, args.out)
        outputs.append(args.out)
        print("optimizer ->", args.out)
    _emit_manifest(
        args,
        "marginal overlap",
        {"rho_ab": args.rho_ab, "rho_bc": args.rho_bc, "target": args.target,
         "sense": args.sense},
        outputs,
    )
    return 0


def cmd_marginal_find(args) -> int:
    rho = marginal.find_compatible_state(
        _load_spec(args), support_presolve=not args.no_presolve
    )
    print("feasible")
    outputs = []
    if args.out:
        save_state(rho, args.out)
        outputs.append(args.out)
        print("state ->", args.out)
    _emit_manifest(
        args,
        "marginal find",
        {"rho_ab": args.rho_ab, "rho_bc": args.rho_bc},
        outputs,
    )
    return 0


def cmd_marginal_ppt_ac(args) -> int:
    ok, witness = marginal.exists_compatible_ppt_ac(
        _load_spec(args), support_presolve=not args.no_presolve
    )
    print("feasible" if ok else "infeasible")
    outputs = []
    if ok and args.witness_out:
        save_state(witness, args.witness_out)
        outputs.append(args.witness_out)
        print("witness ->", args.witness_out)
    _emit_manifest(
        args,
        "marginal ppt-ac",
        {"rho_ab": args.rho_ab, "rho_bc": args.rho_bc},
        outputs,
    )
    return 0


def cmd_marginal_extension(args) -> int:
    rho = _load_density(args.state)
    ok = marginal.symmetric_extension_feasible(rho, args.side, args.copies)
    print("feasible" if ok else "infeasible")
    return 0


def cmd_marginal_threshold(args) -> int:
    param = _SWEEP_FAMILIES.get(args.family)
    if param is None:
        raise DomainError(
            f"family must be one of {sorted(_SWEEP_FAMILIES)}, got {args.family!r}"
        )
    fn = lambda x: states.make_state(args.family, **{param: float(x)})
    value = marginal.extension_threshold(
        fn, args.side, args.copies, resolution=args.resolution
    )
    print(_fmt(value))
    return 0


# --- transitivity -----------------------------------------------------------

_VERDICT_CONFIG_KEYS = (
    "seed",
    "restarts",
    "functionals",
    "uniqueness_tol",
    "attempt_refutation",
    "support_presolve",
)


def _build_verdict_config(args) -> marginal.VerdictConfig:
    """Precedence: flags > config file > dataclass defaults."""
    merged: dict = {}
    if args.config:
        with open(args.config, encoding="utf8") as fh:
            raw = json.load(fh)
        unknown = set(raw) - set(_VERDICT_CONFIG_KEYS) - {"candidate"}
        if unknown:
            raise DomainError(f"config file has unknown keys {sorted(unknown)}")
        merged.update(raw)
    if args.seed is not None:
        merged["seed"] = args.seed
    if args.restarts is not None:
        merged["restarts"] = args.restarts
    if args.functionals is not None:
        merged["functionals"] = args.functionals.split(",")
    if args.uniqueness_tol is not None:
        merged["uniqueness_tol"] = args.uniqueness_tol
    if args.no_refutation:
        merged["attempt_refutation"] = False
    if args.no_presolve:
        merged["support_presolve"] = False
    if args.candidate is not None:
        merged["candidate"] = args.candidate
    candidate = merged.pop("candidate", None)
    if candidate is not None:
        ket = load_state(candidate)
        if not isinstance(ket, Ket):
            raise DomainError("the uniqueness candidate must be a pure state file")
        merged["candidate"] = ket
    if "functionals" in merged:
        merged["functionals"] = tuple(merged["functionals"])
    return marginal.VerdictConfig(**merged)


def cmd_transitivity_verdict(args) -> int:
    spec = _load_spec(args)
    config = _build_verdict_config(args)
    verdict = marginal.transitivity_verdict(spec, config)
    record = verdict.to_dict(include_witness=args.include_witness)
    blob = json.dumps(record, indent=2, default=str)
    outputs = []
    if args.out:
        Path(args.out).write_text(blob + "\n")
        outputs.append(args.out)
        print(verdict.ac_status, "->", args.out)
    else:
        print(blob)
    _emit_manifest(
        args,
        "transitivity verdict",
        {"rho_ab": args.rho_ab, "rho_bc": args.rho_bc, "config": args.config},
        outputs,
        seed=config.seed,
    )
    return 0


def cmd_transitivity_copies(args) -> int:
    verdict = marginal.w_copies_verdict(args.k, variant=args.variant)
    print(json.dumps(verdict.to_dict(), indent=2, default=str))
    return 0


# --- bounds -----------------------------------------------------------------


def cmd_bounds_min_k(args) -> int:
    k = bounds_mod.min_k_for_violation(args.F, args.d, args.variant)
    if k is None:
        raise DomainError(
            f"no copy count certifies a violation at F={_fmt(args.F)}, d={args.d}"
        )
    print(k)
    return 0


def cmd_bounds_fef(args) -> int:
    rho = _load_density(args.state)
    value = bounds_mod.fef(rho, seed=args.seed, restarts=args.restarts)
    print(_fmt(value))
    return 0


def cmd_bounds_lv(args) -> int:
    params = bounds_mod.LvParams(args.F, args.d, args.k, args.variant)
    print(_fmt(bounds_mod.lv_lower_bound(params)))
    return 0


def cmd_bounds_steering(args) -> int:
    print(_fmt(bounds_mod.steering_threshold(args.d)))
    return 0


# --- kv ---------------------------------------------------------------------


def cmd_kv_value(args) -> int:
    inst = kvgame.build_kv_instance(args.ell, args.eta)
    quantum = kvgame.kv_quantum_win_prob(inst)
    print("quantum:", _fmt(quantum))
    print("formula:", _fmt(kvgame.kv_win_prob_formula(inst.n, args.eta)))
    print("classical_cap:", _fmt(kvgame.kv_classical_cap(inst.n, args.eta)))
    return 0


# --- scan -------------------------------------------------------------------


def cmd_scan_run(args) -> int:
    merged: dict = {}
    if args.config:
        with open(args.config, encoding="utf8") as fh:
            raw = json.load(fh)
        raw.pop("digest", None)
        merged.update(raw)
    for key, value in (
        ("d", args.d),
        ("settings", args.M),
        ("samples", args.samples),
        ("base_seed", args.seed),
        ("restarts", args.restarts),
        ("tolerance", args.tolerance),
    ):
        if value is not None:
            merged[key] = value
    if args.inequalities is not None:
        merged["inequalities"] = args.inequalities.split(",")
    if merged.get("inequalities") is not None:
        merged["inequalities"] = tuple(merged["inequalities"])
    missing = [k for k in ("d", "settings", "samples", "base_seed") if k not in merged]
    if missing:
        raise DomainError(f"scan config is missing {missing}")
    cfg = haarscan.ScanConfig(**merged)
    out = Path(_default_out(args.out))
    summary = haarscan.run_scan(cfg, out)
    row = summary.csv_row()
    print(" ".join(f"{k}={row[k]}" for k in _TABLE_COLUMNS))
    _emit_manifest(args, "scan run", cfg.to_dict(), [out], seed=cfg.base_seed)
    return 0


# --- report -----------------------------------------------------------------


def _render_table(records_path: Path):
    """Rows + column names from a records file, layout inferred from keys."""
    lines = []
    if records_path.exists():
        with records_path.open() as fh:
            lines = [ln for ln in fh if ln.strip()]
    if not lines:
        config_path = records_path.parent / "config.json"
        columns = _TABLE_COLUMNS if config_path.exists() else ("parameter", "value")
        return list(columns), []
    first = json.loads(lines[0])
    if "classification" in first:
        records = [haarscan.ScanRecord.from_json(ln) for ln in lines]
        config_path = records_path.parent / "config.json"
        if not config_path.exists():
            raise DomainError(
                f"scan records need config.json alongside {records_path}"
            )
        stored = json.loads(config_path.read_text())
        stored.pop("digest", None)
        if stored.get("inequalities") is not None:
            stored["inequalities"] = tuple(stored["inequalities"])
        cfg = haarscan.ScanConfig(**stored)
        counts = haarscan.aggregate(records)
        total = sum(counts.values())
        row = {
            "d": cfg.d,
            "M": cfg.settings,
            "samples": total,
            "guesses": cfg.guess_count,
            **{
                f"{k}_pct": round(100.0 * counts[k] / total, 4)
                for k in haarscan.CLASS_NAMES
            },
        }
        return list(_TABLE_COLUMNS), [row]
    if "parameter" in first and "value" in first:
        rows = [json.loads(ln) for ln in lines]
        return ["parameter", "value"], [
            {"parameter": r["parameter"], "value": r["value"]} for r in rows
        ]
    raise DomainError(f"unrecognized record layout, keys {sorted(first)}")


def cmd_report_table(args) -> int:
    try:
        columns, rows = _render_table(Path(args.records))
    except (json.JSONDecodeError, KeyError) as exc:
        raise DomainError(f"malformed records file: {exc}") from exc
    if args.format == "json":
        text = json.dumps(rows, indent=2) + "\n"
    else:
        out_lines = [",".join(columns)]
        for row in rows:
            out_lines.append(
                ",".join(
                    _fmt(row[c]) if isinstance(row[c], float) else str(row[c])
                    for c in columns
                )
            )
        text = "\n".join(out_lines) + "\n"
    outputs = []
    if args.out:
        Path(args.out).write_text(text)
        outputs.append(args.out)
        print("table ->", args.out)
    else:
        sys.stdout.write(text)
    _emit_manifest(
        args, "report table", {"records": args.records, "format": args.format}, outputs
    )
    return 0


# --- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qtransit",
        description="Nonlocality transitivity toolkit",
    )
    parser.add_argument("--version", action="version", version=f"qtransit {VERSION}")
    groups = parser.add_subparsers(dest="group", required=True, metavar="command")

    def sub(group, name, func, **kwargs):
        p = group.add_parser(name, **kwargs)
        p.set_defaults(func=func)
        p.add_argument("--manifest", help="write a run manifest to this path")
        return p

    state = groups.add_parser("state", help="build and inspect states").add_subparsers(
        dest="sub", required=True
    )
    p = sub(state, "make", cmd_state_make, help="build a named family member")
    p.add_argument("--name", required=True)
    p.add_argument("--param", action="append", help="key=value, repeatable")
    p.add_argument("--out", required=True)
    p = sub(state, "show", cmd_state_show, help="summarize a state file")
    p.add_argument("--file", required=True)

    bell = groups.add_parser("bell", help="Bell functional optimization").add_subparsers(
        dest="sub", required=True
    )
    p = sub(bell, "horodecki", cmd_bell_horodecki, help="two-qubit CHSH criterion")
    p.add_argument("--state", required=True)
    p = sub(bell, "seesaw", cmd_bell_seesaw, help="see-saw a functional on a state")
    p.add_argument("--state", required=True)
    p.add_argument("--functional", default="chsh")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--restarts", type=int)
    p.add_argument("--ell", type=int, help="kv functional only")
    p.add_argument("--eta", type=float, help="kv functional only")
    p = sub(bell, "sweep", cmd_bell_sweep, help="criterion values along a family")
    p.add_argument("--family", required=True)
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--points", type=int, default=21)
    p.add_argument("--out")

    npa_g = groups.add_parser("npa", help="level-1 outer relaxation").add_subparsers(
        dest="sub", required=True
    )
    p = sub(npa_g, "membership", cmd_npa_membership, help="is the correlation inside")
    p.add_argument("--correlation", required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p = sub(npa_g, "visibility", cmd_npa_visibility, help="critical visibility")
    p.add_argument("--correlation", required=True)

    marg = groups.add_parser("marginal", help="marginal problems").add_subparsers(
        dest="sub", required=True
    )

    def marginal_pair(p):
        p.add_argument("--rho-ab", required=True, dest="rho_ab")
        p.add_argument("--rho-bc", required=True, dest="rho_bc")
        p.add_argument("--no-presolve", action="store_true")

    p = sub(marg, "overlap", cmd_marginal_overlap, help="extremal target overlap")
    marginal_pair(p)
    p.add_argument("--target", required=True)
    p.add_argument("--sense", choices=("min", "max"), default="max")
    p.add_argument("--out")
    p = sub(marg, "find", cmd_marginal_find, help="any compatible state")
    marginal_pair(p)
    p.add_argument("--out")
    p = sub(marg, "ppt-ac", cmd_marginal_ppt_ac, help="PPT-AC compatible search")
    marginal_pair(p)
    p.add_argument("--witness-out", dest="witness_out")
    p = sub(marg, "extension", cmd_marginal_extension, help="symmetric extension flag")
    p.add_argument("--state", required=True)
    p.add_argument("--side", choices=("A", "B"), default="A")
    p.add_argument("--copies", type=int, default=2)
    p = sub(marg, "threshold", cmd_marginal_threshold, help="extendibility onset")
    p.add_argument("--family", required=True)
    p.add_argument("--side", choices=("A", "B"), default="A")
    p.add_argument("--copies", type=int, default=2)
    p.add_argument("--resolution", type=float, default=1e-4)

    trans = groups.add_parser(
        "transitivity", help="transitivity verdicts"
    ).add_subparsers(dest="sub", required=True)
    p = sub(trans, "verdict", cmd_transitivity_verdict, help="full pipeline on a pair")
    marginal_pair(p)
    p.add_argument("--config", help="JSON file with pipeline settings")
    p.add_argument("--seed", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--functionals", help="comma-separated functional names")
    p.add_argument("--uniqueness-tol", type=float, dest="uniqueness_tol")
    p.add_argument("--no-refutation", action="store_true")
    p.add_argument("--candidate", help="pure state file for the uniqueness check")
    p.add_argument("--include-witness", action="store_true")
    p.add_argument("--out")
    p = sub(trans, "copies", cmd_transitivity_copies, help="analytic k-copy verdict")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--variant", choices=("tight", "loose"), default="tight")

    bnd = groups.add_parser("bounds", help="closed-form certificates").add_subparsers(
        dest="sub", required=True
    )
    p = sub(bnd, "min-k", cmd_bounds_min_k, help="copies needed for a violation")
    p.add_argument("--F", type=float, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--variant", choices=("tight", "loose"), default="tight")
    p = sub(bnd, "fef", cmd_bounds_fef, help="fully entangled fraction")
    p.add_argument("--state", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--restarts", type=int, default=50)
    p = sub(bnd, "lv", cmd_bounds_lv, help="k-copy nonlocality bound")
    p.add_argument("--F", type=float, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--variant", choices=("tight", "loose"), default="tight")
    p = sub(bnd, "steering-threshold", cmd_bounds_steering, help="FEF steering bar")
    p.add_argument("--d", type=int, required=True)

    kv = groups.add_parser("kv", help="coset game values").add_subparsers(
        dest="sub", required=True
    )
    p = sub(kv, "value", cmd_kv_value, help="canonical strategy value and caps")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--eta", type=float, required=True)

    scan = groups.add_parser("scan", help="Haar-random sampling").add_subparsers(
        dest="sub", required=True
    )
    p = sub(scan, "run", cmd_scan_run, help="run or resume a scan")
    p.add_argument("--config", help="JSON file with scan settings")
    p.add_argument("--d", type=int)
    p.add_argument("--M", type=int, dest="M", help="settings per party")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--inequalities", help="comma-separated inequality names")
    p.add_argument("--tolerance", type=float)
    p.add_argument("--out")

    report = groups.add_parser("report", help="render records").add_subparsers(
        dest="sub", required=True
    )
    p = sub(report, "table", cmd_report_table, help="records to CSV or JSON")
    p.add_argument("--records", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.argv_snapshot = list(argv) if argv is not None else None
    args.started = _now()
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 3
    except IncompatibleMarginalsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        cert = exc.certificate
        if cert is not None:
            print(
                "certificate: margin "
                f"{_fmt(cert.margin)}, psd violation {_fmt(cert.psd_violation)}, "
                f"verified {cert.verified}",
                file=sys.stderr,
            )
        return 1
    except (DomainError, SolverFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
