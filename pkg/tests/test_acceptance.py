"""Acceptance criteria, one test per criterion.

Run ``pytest tests/test_acceptance.py -v``; a PASS/FAIL line per criterion
is printed in the terminal summary.
"""
import json
import os
import subprocess
import sys
import time
from itertools import combinations

import numpy as np
import pytest

from conftest import random_pattern
from fitcert.certifier import (
    CertificateKind,
    certify_all_of_a_kind,
    certify_uniqueness,
    enumerate_bases,
    find_basis_of,
    find_violation,
    is_independent,
    matroid_rank,
)
from fitcert.gallery import ALL, crowded, deceptive_fit, five_row_circuit, staircase, three_bases, triangle, two_column_line
from fitcert.geometry import (
    Arrangement,
    SubspaceBasis,
    assemble_A,
    direction_row,
    fits_pattern,
    kernel_basis,
    kernel_dimension,
)
from fitcert.mask import ObservationSet, render_pattern, subset_stats
from fitcert.oracle import agreement_trial, summarize
from fitcert.synth import GenSpec


def engine_masks(count=1000, seed=20240601):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        r = int(rng.integers(1, 4))
        d = int(rng.integers(r + 1, 11))
        N = int(rng.integers(1, 11))
        out.append(random_pattern(rng, d, r, N))
    return out


def axiom_masks(count=200, seed=20240602):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        r = int(rng.integers(1, 3))
        d = int(rng.integers(r + 1, 9))
        N = int(rng.integers(1, 7))
        out.append(random_pattern(rng, d, r, N))
    return out


@pytest.mark.acceptance(1, "worked examples reproduce exactly")
def test_golden_suite():
    start = time.perf_counter()
    c = certify_all_of_a_kind(five_row_circuit.pattern)
    assert c.kind is CertificateKind.ALL_OF_A_KIND and c.witness == (1, 2, 3, 4)

    c = certify_all_of_a_kind(two_column_line.pattern)
    assert c.kind is CertificateKind.UNIQUE
    assert len(two_column_line.pattern) < two_column_line.pattern.ambient_dim - two_column_line.pattern.rank + 1

    assert certify_all_of_a_kind(triangle.pattern).kind is CertificateKind.ALL_OF_A_KIND

    c = certify_uniqueness(crowded.pattern)
    assert c.kind is CertificateKind.INDETERMINATE
    assert (1, 2, 3) in [v.subset for v in c.violations]
    assert certify_all_of_a_kind(crowded.pattern).kind is CertificateKind.INDETERMINATE

    found = sorted(b.basis_columns for b in enumerate_bases(three_bases.pattern, 3))
    assert found == sorted([(3,), (1, 2), (4, 5, 6)])

    assert is_independent(staircase.pattern).independent
    assert time.perf_counter() - start < 1.0


@pytest.mark.acceptance(2, "brute-force and matching engines agree")
def test_engine_equivalence():
    start = time.perf_counter()
    disagreements = []
    for p in [f.pattern for f in ALL] + engine_masks():
        for k in range(1, len(p) + 1):
            sel = range(1, k + 1)
            a = find_violation(p, sel, engine="brute")
            b = find_violation(p, sel, engine="matching")
            if (a is None) != (b is None):
                disagreements.append((p.columns(), k))
    assert disagreements == []
    assert time.perf_counter() - start < 60.0


@pytest.mark.acceptance(3, "hereditary and exchange axioms hold")
def test_matroid_axioms():
    violations = 0
    for p in axiom_masks():
        N = len(p)
        indep = {s for n in range(N + 1) for s in combinations(range(1, N + 1), n) if is_independent(p, s)}
        for I in indep:
            violations += sum(1 for k in range(len(I)) for J in combinations(I, k) if J not in indep)
        for I in indep:
            for J in indep:
                if len(I) < len(J) and not any(tuple(sorted(I + (x,))) in indep for x in set(J) - set(I)):
                    violations += 1
    assert violations == 0


BRIDGE_SPECS = [
    GenSpec(d=6, r=1, N=6, seed=1000, mask_property="EXPLICIT"),
    GenSpec(d=8, r=2, N=8, seed=2000, mask_property="EXPLICIT"),
    GenSpec(d=10, r=3, N=9, seed=3000, mask_property="EXPLICIT"),
    GenSpec(d=12, r=2, N=12, seed=4000, mask_property="EXPLICIT"),
]


@pytest.mark.acceptance(4, "combinatorial rank equals numeric rank of the constraint matrix")
def test_numeric_bridge():
    start = time.perf_counter()
    report = [row for spec in BRIDGE_SPECS for row in agreement_trial(spec, 25)]
    s = summarize(report)
    assert s["checked"] == 100 and s["agreed"] >= 99
    for row in report:
        if not row["agree"]:
            spec = next(x for x in BRIDGE_SPECS if x.d == row["d"] and x.r == row["r"])
            again = agreement_trial(GenSpec(**{**spec.to_dict(), "seed": row["seed"]}), 1)[0]
            assert again == {**row, "trial": 0}
            print("disagreement:", json.dumps(row))
    assert time.perf_counter() - start < 30.0


@pytest.mark.acceptance(5, "mixed data on all-of-a-kind masks admits no fitting subspace")
def test_all_of_a_kind_converse():
    report = []
    for d in range(5, 11):
        spec = GenSpec(d=d, r=2, K=2, N=d, seed=500 * d, mask_property="SATISFIES_T1", assignment_mode="MIXED")
        report.extend(agreement_trial(spec, 17 if d < 10 else 15))
    assert len(report) == 100
    assert all(row["claim"] == "no_fit" for row in report)
    assert sum(row["kernel_dim"] < row["r"] for row in report) >= 99

    df = deceptive_fit()
    arr = Arrangement(tuple(SubspaceBasis(U) for U in df["true_bases"]), (1, 2))
    A = assemble_A(arr, df["pattern"])
    assert kernel_dimension(A) == df["pattern"].rank
    S = kernel_basis(A)
    assert fits_pattern(S, arr, df["pattern"]) and fits_pattern(df["fitting"], arr, df["pattern"])
    assert certify_all_of_a_kind(df["pattern"]).kind is not CertificateKind.ALL_OF_A_KIND


def _unit(v):
    v = v / np.linalg.norm(v)
    return v * np.sign(v[np.flatnonzero(np.abs(v) > 1e-12)[0]])


@pytest.mark.acceptance(6, "direction rows: support, orthogonality, invariance")
def test_direction_rows():
    rng = np.random.default_rng(77)
    for _ in range(500):
        r = int(rng.integers(1, 5))
        d = int(rng.integers(r + 1, 11))
        U = rng.standard_normal((d, r))
        obs = ObservationSet(tuple(int(j) + 1 for j in rng.choice(d, r + 1, replace=False)), d)
        pivot = int(rng.choice(obs.indices))
        a = direction_row(SubspaceBasis(U), obs, pivot=pivot).row
        assert set(np.flatnonzero(a) + 1) == set(obs)
        assert np.linalg.norm(a @ U) / (np.linalg.norm(a) * np.linalg.norm(U)) <= 1e-10
        other = direction_row(SubspaceBasis(U @ rng.standard_normal((r, r))), obs).row
        dev = np.linalg.norm(_unit(a) - _unit(other))
        assert dev <= 1e-8


def _witnesses():
    out = []
    for f in ALL:
        for t in range(1, len(f.pattern) + 1):
            out.extend((f.pattern, b) for b in enumerate_bases(f.pattern, t))
    for p in engine_masks()[:300] + axiom_masks():
        if matroid_rank(p) == len(p):
            continue
        for t in range(1, len(p) + 1):
            b = find_basis_of(p, t)
            if b is not None:
                out.append((p, b))
    return out


@pytest.mark.acceptance(7, "every basis witness has m = n + r")
def test_basis_cardinality():
    pairs = _witnesses()
    assert len(pairs) > 500
    bad = [(p.columns(), b) for p, b in pairs if (s := subset_stats(p, b.basis_columns)).m != s.n + p.rank]
    assert bad == []


def _run_cli(args, env_extra, cwd):
    env = {**os.environ, **env_extra}
    res = subprocess.run([sys.executable, "-m", "fitcert.cli", *args], capture_output=True, env=env, cwd=cwd, check=False)
    return res.returncode, res.stdout


THREAD_SETTINGS = [
    {},
    {"OMP_NUM_THREADS": "1", "OPENBLAS_NUM_THREADS": "1", "MKL_NUM_THREADS": "1"},
    {"OMP_NUM_THREADS": "4", "OPENBLAS_NUM_THREADS": "4", "MKL_NUM_THREADS": "4"},
]


@pytest.mark.acceptance(8, "generation and certificates are byte-identical across runs and thread settings")
def test_determinism(tmp_path):
    masks = {}
    for f in ALL:
        path = tmp_path / f"{f.name}.mask"
        path.write_text(render_pattern(f.pattern))
        masks[f.name] = (str(path), f.pattern.rank)
    outputs = []
    for k, env in enumerate(THREAD_SETTINGS * 2):
        out_dir = tmp_path / f"run{k}"
        code, _ = _run_cli(
            ["generate", "--d", "7", "--r", "2", "--k", "2", "--n", "7", "--seed", "99", "--assignment", "mixed",
             "--out", str(out_dir)],
            env,
            tmp_path,
        )
        assert code == 0
        blob = {p.name: p.read_bytes() for p in sorted(out_dir.iterdir())}
        certs = [_run_cli(["certify", path, "--rank", str(r), "--json"], env, tmp_path) for path, r in masks.values()]
        certs.append(_run_cli(["certify", str(out_dir / "mask.txt"), "--rank", "2", "--json"], env, tmp_path))
        outputs.append((blob, certs))
    assert all(o == outputs[0] for o in outputs[1:])
