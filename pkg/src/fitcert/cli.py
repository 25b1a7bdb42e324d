"""``fitcert`` command line.

Exit status: 0 certified / agreement, 1 negative verdict, 2 bad input.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .certifier import (
    DEFAULT_CAP,
    CertificateKind,
    certify_all_of_a_kind,
    certify_uniqueness,
    is_independent,
)
from .errors import FitcertError
from .geometry import (
    SubspaceBasis,
    arrangement_to_dict,
    fits,
    read_matrix,
    write_matrix_csv,
)
from .mask import load_pattern, normalize_sizes, pattern_to_dict, render_pattern, validate_assumptions
from .oracle import agreement_trial, compare_engines, report_lines, summarize
from .synth import GenSpec, MaskProperty, generate

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT = 0, 1, 2

PROPERTIES = {
    "t1": MaskProperty.SATISFIES_T1,
    "t2": MaskProperty.SATISFIES_T2_ONLY,
    "fails": MaskProperty.FAILS_BOTH,
    "explicit": MaskProperty.EXPLICIT,
}
ASSIGNMENTS = {"same": "ALL_SAME", "mixed": "MIXED"}


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _load_mask(path: str, rank: int | None):
    if rank is not None and rank < 1:
        raise InputError("--rank must be at least 1")
    return load_pattern(_read(path), rank)


def _prepare(pattern, split: bool, drop: bool):
    report = validate_assumptions(pattern)
    if "A5" in report.kinds():
        rows = next(v.rows for v in report.violations if v.kind == "A5")
        print(f"warning: rows {list(rows)} are never observed", file=sys.stderr)
    return normalize_sizes(pattern, split=split, drop=drop)


# --- certify ------------------------------------------------------------------


def cmd_certify(args) -> int:
    pattern = _load_mask(args.mask, args.rank)
    norm = _prepare(pattern, args.split_oversized, args.drop_undersized)
    p = norm.pattern
    if args.mode == "independence":
        verdict = is_independent(p, engine=args.engine, cap=args.cap)
        if args.json:
            print(json.dumps({"independent": verdict.independent, "violating_subset": verdict.violating_subset and list(verdict.violating_subset)}))
        elif verdict.independent:
            print(f"independent: all {len(p)} columns")
        else:
            print(f"dependent: columns {list(verdict.violating_subset)} violate m >= n + r")
        return EXIT_OK if verdict.independent else EXIT_NEGATIVE

    if args.mode == "t1":
        cert = certify_all_of_a_kind(p, engine=args.engine, cap=args.cap)
        success = cert.kind is CertificateKind.ALL_OF_A_KIND
    else:
        cert = certify_uniqueness(p, engine=args.engine, cap=args.cap)
        success = cert.kind is CertificateKind.UNIQUE
    if args.json:
        print(cert.to_json(sort_keys=True))
    else:
        print(f"{cert.kind.value}: witness columns {list(cert.witness)} (d={cert.d}, r={cert.r})")
        if cert.kind is CertificateKind.INDETERMINATE:
            for v in cert.violations:
                print(f"  violation: columns {list(v.subset)} touch m={v.m} < n+r={v.n + cert.r}")
        if norm.origin != tuple(range(1, len(pattern) + 1)):
            print(f"  column origins after normalization: {list(norm.origin)}")
        if norm.dropped:
            print(f"  dropped undersized columns: {list(norm.dropped)}")
    return EXIT_OK if success else EXIT_NEGATIVE


# --- validate -----------------------------------------------------------------


def cmd_validate(args) -> int:
    pattern = _load_mask(args.mask, args.rank)
    X = read_matrix(_read(args.data))
    S = read_matrix(_read(args.subspace))
    d, N, r = pattern.ambient_dim, len(pattern), pattern.rank
    if X.shape != (d, N):
        raise InputError(f"data is {X.shape[0]}x{X.shape[1]} but the mask is {d}x{N}")
    if S.shape != (d, r):
        raise InputError(f"subspace is {S.shape[0]}x{S.shape[1]}, expected {d}x{r}")
    if np.isnan(S).any():
        raise InputError("subspace basis has missing entries")
    basis = SubspaceBasis(S)
    unfit = []
    for i, obs in enumerate(pattern.sets, 1):
        x = X[:, i - 1]
        if np.isnan(x[[j - 1 for j in obs]]).any():
            raise InputError(f"column {i} is missing entries the mask marks as observed")
        if not fits(basis, np.nan_to_num(x), obs, tol=args.tol):
            unfit.append(i)
    cert = certify_all_of_a_kind(pattern)
    certified = cert.kind is CertificateKind.ALL_OF_A_KIND
    if unfit:
        verdict = "NO_FIT"
    elif certified:
        verdict = "LIES_IN_S"
    else:
        verdict = "UNVERIFIED"
    report = {
        "verdict": verdict,
        "fit": not unfit,
        "unfit_columns": unfit,
        "certificate": cert.to_dict(),
    }
    if args.json:
        print(json.dumps(report, sort_keys=True))
    else:
        print(verdict)
        print(f"  fit: {'every column fits' if not unfit else f'columns {unfit} do not fit'}")
        print(f"  mask certificate: {cert.kind.value}, witness {list(cert.witness)}")
    return EXIT_OK if verdict == "LIES_IN_S" else EXIT_NEGATIVE


# --- generate -----------------------------------------------------------------


def _spec_from(args, **override) -> GenSpec:
    fields = dict(
        d=args.d,
        r=args.r,
        K=args.k,
        N=args.n,
        seed=args.seed,
        mask_property=PROPERTIES[args.property],
        assignment_mode=ASSIGNMENTS[args.assignment],
    )
    fields.update(override)
    try:
        return GenSpec(**fields)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def cmd_generate(args) -> int:
    given = None
    if args.mask:
        given = _load_mask(args.mask, args.r)
        if args.property != "explicit":
            raise InputError("--mask requires --property explicit")
        if args.n is None:
            args.n = len(given)
    elif args.property == "explicit":
        raise InputError("--property explicit needs --mask")
    if args.n is None:
        raise InputError("--n is required")
    spec = _spec_from(args)
    inst = generate(spec, given)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "mask.txt": render_pattern(inst.pattern),
        "mask.json": json.dumps(pattern_to_dict(inst.pattern), sort_keys=True) + "\n",
        "arrangement.json": json.dumps(arrangement_to_dict(inst.arrangement), sort_keys=True) + "\n",
        "data.csv": write_matrix_csv(inst.data),
        "masked_data.csv": write_matrix_csv(inst.masked_data),
        "manifest.json": json.dumps({"tool": "fitcert", "version": __version__, "spec": spec.to_dict()}, sort_keys=True)
        + "\n",
    }
    for name, text in files.items():
        (out / name).write_text(text)
    print(f"wrote {len(files)} files to {out}")
    return EXIT_OK


# --- oracle -------------------------------------------------------------------


def cmd_oracle(args) -> int:
    rows: list[dict] = []
    ok = True
    pattern = None
    if args.mask:
        pattern = _load_mask(args.mask, args.r)
        pattern = _prepare(pattern, False, False).pattern
        mismatches = compare_engines(pattern)
        ok = not mismatches
        rows.extend({"engine_mismatch": m} for m in mismatches)
        print(f"engines: {'agree' if ok else f'{len(mismatches)} disagreements'}", file=sys.stderr)
    if args.trials > 0:
        if args.seed is None:
            raise InputError("--seed is required for randomized trials")
        if pattern is not None:
            spec = _spec_from(
                args, d=pattern.ambient_dim, r=pattern.rank, N=len(pattern), mask_property=MaskProperty.EXPLICIT
            )
        else:
            if args.d is None or args.r is None:
                raise InputError("--d and --r are required without --mask")
            if args.n is None:
                args.n = args.d
            spec = _spec_from(args)
        report = agreement_trial(spec, args.trials, workers=args.workers, pattern=pattern)
        summary = summarize(report)
        ok = ok and summary["agreed"] == summary["checked"]
        rows.extend(report)
        print(
            f"trials: {summary['agreed']}/{summary['checked']} agree ({summary['trials']} run)"
            + (f"; disagreeing seeds {summary['disagreeing_seeds']}" if summary["disagreeing_seeds"] else ""),
            file=sys.stderr,
        )
    sys.stdout.write(report_lines(rows))
    return EXIT_OK if ok else EXIT_NEGATIVE


# --- entry point --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fitcert", description="Certify unique subspace fits from observation patterns.")
    ap.add_argument("--version", action="version", version=f"fitcert {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("certify", help="certify a mask")
    c.add_argument("mask")
    c.add_argument("--rank", type=int, default=None, help="subspace dimension r (optional for JSON masks)")
    c.add_argument("--mode", choices=("t1", "t2", "independence"), default="t1")
    c.add_argument("--engine", choices=("auto", "brute", "matching", "both"), default="auto")
    c.add_argument("--json", action="store_true")
    c.add_argument("--split-oversized", action="store_true")
    c.add_argument("--drop-undersized", action="store_true")
    c.add_argument("--cap", type=int, default=DEFAULT_CAP)
    c.set_defaults(func=cmd_certify)

    v = sub.add_parser("validate", help="check a candidate subspace against partial data")
    v.add_argument("data")
    v.add_argument("subspace")
    v.add_argument("mask")
    v.add_argument("--rank", type=int, default=None)
    v.add_argument("--tol", type=float, default=1e-8)
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_validate)

    g = sub.add_parser("generate", help="write a seeded synthetic instance")
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--r", type=int, required=True)
    g.add_argument("--k", type=int, default=1)
    g.add_argument("--n", type=int, default=None)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--property", choices=sorted(PROPERTIES), default="t1")
    g.add_argument("--assignment", choices=sorted(ASSIGNMENTS), default="same")
    g.add_argument("--mask", default=None, help="fixed mask for --property explicit")
    g.add_argument("--out", default=".")
    g.set_defaults(func=cmd_generate)

    o = sub.add_parser("oracle", help="cross-check engines and the numeric bridge")
    o.add_argument("mask", nargs="?", default=None)
    o.add_argument("--trials", type=int, default=0)
    o.add_argument("--d", type=int, default=None)
    o.add_argument("--r", "--rank", dest="r", type=int, default=None)
    o.add_argument("--k", type=int, default=1)
    o.add_argument("--n", type=int, default=None)
    o.add_argument("--seed", type=int, default=None)
    o.add_argument("--property", choices=sorted(PROPERTIES), default="explicit")
    o.add_argument("--assignment", choices=sorted(ASSIGNMENTS), default="same")
    o.add_argument("--workers", type=int, default=1)
    o.set_defaults(func=cmd_oracle)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, FitcertError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
