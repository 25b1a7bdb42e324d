import numpy as np
import pytest

from fitcert.certifier import CertificateKind, certify_all_of_a_kind
from fitcert.errors import GenerationError
from fitcert.geometry import fits, is_degenerate
from fitcert.mask import ObservationPattern
from fitcert.synth import (
    AssignmentMode,
    GenSpec,
    MaskProperty,
    assignment_for,
    generate,
    random_arrangement,
    random_mask,
    sample_columns,
)


class TestGenSpec:
    @pytest.mark.parametrize("kw", [dict(d=3, r=3), dict(d=3, r=1, N=0), dict(d=3, r=1, K=0), dict(d=3, r=1, seed=-1)])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            GenSpec(**kw)

    def test_string_enums(self):
        s = GenSpec(4, 1, mask_property="FAILS_BOTH", assignment_mode="MIXED")
        assert s.mask_property is MaskProperty.FAILS_BOTH and s.assignment_mode is AssignmentMode.MIXED


class TestArrangement:
    def test_two_bases(self):
        arr = random_arrangement(GenSpec(d=5, r=2, K=2, seed=7))
        assert len(arr.bases) == 2
        assert all(b.matrix.shape == (5, 2) and not is_degenerate(b) for b in arr.bases)

    def test_singleton(self):
        assert len(random_arrangement(GenSpec(d=5, r=2, K=1, seed=7)).bases) == 1

    def test_deterministic(self):
        a = random_arrangement(GenSpec(d=6, r=3, K=3, seed=11))
        b = random_arrangement(GenSpec(d=6, r=3, K=3, seed=11))
        assert all(np.array_equal(x.matrix, y.matrix) for x, y in zip(a.bases, b.bases))

    def test_seed_changes_output(self):
        a = random_arrangement(GenSpec(d=4, r=1, seed=1))
        b = random_arrangement(GenSpec(d=4, r=1, seed=2))
        assert not np.array_equal(a.bases[0].matrix, b.bases[0].matrix)

    def test_bases_do_not_depend_on_N(self):
        a = random_arrangement(GenSpec(d=4, r=1, N=2, seed=5))
        b = random_arrangement(GenSpec(d=4, r=1, N=9, seed=5))
        assert np.array_equal(a.bases[0].matrix, b.bases[0].matrix)


class TestColumns:
    def test_all_same_in_span(self):
        arr = random_arrangement(GenSpec(d=6, r=2, K=3, seed=0))
        X, assignment = sample_columns(arr, 8, "ALL_SAME", 0)
        assert assignment == (1,) * 8
        U = arr.bases[0].matrix
        resid = X - U @ np.linalg.lstsq(U, X, rcond=None)[0]
        assert np.max(np.abs(resid)) < 1e-10

    def test_mixed_round_robin(self):
        assert assignment_for("MIXED", 3, 2) == (1, 2, 1)
        arr = random_arrangement(GenSpec(d=5, r=2, K=2, seed=3))
        X, assignment = sample_columns(arr, 3, AssignmentMode.MIXED, 3)
        assert assignment == (1, 2, 1)
        for i, k in enumerate(assignment):
            assert fits(arr.bases[k - 1], X[:, i], range(1, 6), tol=1e-10)


class TestMask:
    def test_all_of_a_kind(self):
        p = random_mask(GenSpec(d=5, r=2, N=5, seed=7, mask_property="SATISFIES_T1"))
        assert certify_all_of_a_kind(p).kind is CertificateKind.ALL_OF_A_KIND

    def test_unique_only(self):
        p = random_mask(GenSpec(d=3, r=1, N=2, seed=0, mask_property="SATISFIES_T2_ONLY"))
        assert certify_all_of_a_kind(p).kind is CertificateKind.UNIQUE

    def test_fails_both_single_column(self):
        p = random_mask(GenSpec(d=5, r=2, N=1, seed=0, mask_property="FAILS_BOTH"))
        assert len(p) == 1 and certify_all_of_a_kind(p).kind is CertificateKind.INDETERMINATE

    def test_sizes(self):
        p = random_mask(GenSpec(d=8, r=3, N=6, seed=1, mask_property="SATISFIES_T1"))
        assert all(len(s) == 4 for s in p.sets)

    @pytest.mark.parametrize("prop,N", [("SATISFIES_T1", 3), ("SATISFIES_T2_ONLY", 2)])
    def test_too_few_columns(self, prop, N):
        with pytest.raises(GenerationError):
            random_mask(GenSpec(d=5, r=2, N=N, mask_property=prop))

    def test_explicit_is_not_sampled(self):
        with pytest.raises(ValueError):
            random_mask(GenSpec(d=5, r=2, mask_property="EXPLICIT"))

    def test_budget(self, monkeypatch):
        import fitcert.synth as synth

        monkeypatch.setattr(synth, "MASK_ATTEMPTS", 3)
        # three rank-one columns in R^3 are indeterminate only if all share one pair; seed 0 never draws that
        with pytest.raises(GenerationError, match="larger N"):
            random_mask(GenSpec(d=3, r=1, N=3, seed=0, mask_property="FAILS_BOTH"))

    def test_deterministic(self):
        s = GenSpec(d=7, r=2, N=7, seed=123)
        assert random_mask(s) == random_mask(s)


class TestGenerate:
    def test_masked_data(self):
        inst = generate(GenSpec(d=5, r=2, K=2, N=5, seed=7, assignment_mode="MIXED"))
        for i, obs in enumerate(inst.pattern.sets):
            col = inst.masked_data[:, i]
            observed = [j - 1 for j in obs]
            assert np.array_equal(col[observed], inst.data[observed, i])
            assert np.isnan(np.delete(col, observed)).all()

    def test_explicit(self):
        p = ObservationPattern.from_columns([(1, 2), (2, 3)], 3, 1)
        inst = generate(GenSpec(d=3, r=1, N=2, mask_property="EXPLICIT"), p)
        assert inst.pattern == p
        with pytest.raises(ValueError):
            generate(GenSpec(d=3, r=1, N=2, mask_property="EXPLICIT"))
