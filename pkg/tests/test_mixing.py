"""
Mixing matrix tests

Validation, canonical topologies, the mixing parameter, schedules, matrix
files and the fixed-order averaging kernel.
"""

import json
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))
from src.errors import (
    ColSumViolation,
    ConfigError,
    DimensionMismatch,
    NegativeEntry,
    NotSquare,
    OddNForAlternatingRing,
    RowSumViolation,
    ScheduleExhausted,
)
from src.mixing import (
    MixingSchedule,
    degrees,
    frob_dist_to_uniform,
    make_topology,
    mix,
    mixing_parameter,
    spectral_gap,
    uniform_average,
    validate,
)
from src.mixing.io import (
    array_to_csv,
    matrix_to_json,
    read_matrix_json,
    read_schedule_dir,
    read_topology,
    write_matrix_csv,
    write_matrix_json,
)


def random_doubly_stochastic(n: int, rng: np.random.Generator, terms: int = 4) -> np.ndarray:
    """Convex combination of random permutation matrices (Birkhoff)."""
    weights = rng.dirichlet(np.ones(terms))
    W = np.zeros((n, n))
    for w in weights:
        W[np.arange(n), rng.permutation(n)] += w
    return W


def numpy_p(W: np.ndarray) -> float:
    """Reference mixing parameter from a dense eigendecomposition."""
    n = W.shape[0]
    eigenvalues = np.linalg.eigvalsh(W.T @ W)
    # the top eigenvalue 1 belongs to the all-ones vector
    return 1.0 - float(np.sort(eigenvalues)[-2]) if n > 1 else 1.0


# ============================================================================
# Validation
# ============================================================================


class TestValidate:
    """Doubly stochastic checks and the error each violation raises."""

    def test_accepts_doubly_stochastic(self):
        """A Birkhoff mixture validates and keeps its entries."""
        W = random_doubly_stochastic(6, np.random.default_rng(0))
        M = validate(W)
        assert M.n == 6
        assert np.array_equal(M.entries, W)

    def test_entries_are_read_only(self):
        """Validated matrices cannot be mutated in place."""
        M = validate(np.eye(3))
        with pytest.raises(ValueError):
            M.entries[0, 0] = 0.5

    @pytest.mark.parametrize(
        "entries",
        [np.zeros((0, 0)), np.ones((2, 3)) / 3, np.ones(4) / 4],
    )
    def test_not_square(self, entries):
        """Empty, rectangular and 1-D inputs raise NotSquare."""
        with pytest.raises(NotSquare):
            validate(entries)

    def test_negative_entry_reports_index(self):
        """A negative entry raises NegativeEntry with its position."""
        W = np.array([[1.2, -0.2], [-0.2, 1.2]])
        with pytest.raises(NegativeEntry) as info:
            validate(W)
        assert info.value.index in {(0, 0), (0, 1)}

    def test_row_sum_violation(self):
        """Rows that miss 1 raise RowSumViolation with the worst row."""
        W = np.array([[0.5, 0.5, 0.0], [0.5, 0.5, 0.0], [0.0, 0.0, 0.9]])
        with pytest.raises(RowSumViolation) as info:
            validate(W)
        assert info.value.index == 2

    def test_col_sum_violation(self):
        """Rows sum to 1 but a column does not."""
        W = np.array([[1.0, 0.0], [1.0, 0.0]])
        with pytest.raises(ColSumViolation) as info:
            validate(W)
        assert info.value.index in {0, 1}

    def test_closed_under_product_and_mixture(self):
        """Products and convex combinations of valid matrices stay valid."""
        rng = np.random.default_rng(17)
        for _ in range(20):
            n = int(rng.integers(2, 12))
            A = validate(random_doubly_stochastic(n, rng))
            B = validate(random_doubly_stochastic(n, rng, terms=1 + int(rng.integers(1, 6))))
            validate(A.entries @ B.entries, tol=1e-8)
            theta = float(rng.uniform())
            validate(theta * A.entries + (1.0 - theta) * B.entries, tol=1e-8)

    def test_tolerance(self):
        """A residual below tol passes, above tol fails."""
        W = np.eye(3)
        W[0, 0] += 1e-12
        validate(W, tol=1e-9)
        with pytest.raises(RowSumViolation):
            validate(W, tol=1e-14)


# ============================================================================
# Canonical topologies
# ============================================================================


class TestTopologies:
    """Generators and their structural properties."""

    @pytest.mark.parametrize("kind", ["complete", "identity", "alternating_ring", "clustered_ring", "ring"])
    @pytest.mark.parametrize("n", [2, 4, 8])
    def test_generators_are_doubly_stochastic(self, kind: str, n: int):
        """Every generator returns a validated matrix of the right size."""
        W = make_topology(kind, n)
        assert W.n == n
        assert np.allclose(W.entries.sum(axis=0), 1.0)
        assert np.allclose(W.entries.sum(axis=1), 1.0)

    def test_complete_entries_are_exact(self):
        """Complete-graph weights are exactly 1/n."""
        W = make_topology("complete", 8)
        assert np.all(W.entries == 1.0 / 8)

    def test_alternating_ring_weights(self):
        """Self weight 1/2, both ring neighbours 1/4."""
        W = make_topology("alternating_ring", 8)
        for i in range(8):
            assert W.entries[i, i] == 0.5
            assert W.entries[i, (i + 1) % 8] == 0.25
            assert W.entries[i, (i - 1) % 8] == 0.25

    @pytest.mark.parametrize("kind", ["alternating_ring", "clustered_ring"])
    def test_odd_n_rejected(self, kind: str):
        """Two-cluster rings need an even node count."""
        with pytest.raises(OddNForAlternatingRing):
            make_topology(kind, 7)

    def test_clustered_is_relabelled_alternating(self):
        """The clustered ring is the alternating ring with odd nodes grouped first."""
        n = 8
        order = list(range(1, n, 2)) + list(range(0, n, 2))
        clustered = make_topology("clustered_ring", n)
        alternating = make_topology("alternating_ring", n)
        assert np.array_equal(clustered.permuted(order).entries, alternating.entries)

    def test_clustered_ring_neighbourhoods_are_one_cluster(self):
        """Interior clustered-ring nodes only talk to nodes of the same parity."""
        W = make_topology("clustered_ring", 8)
        # node 3 sits between 1 and 5 in the ring 1,3,5,7,0,2,4,6
        neighbours = set(np.flatnonzero(W.entries[3]).tolist())
        assert neighbours == {1, 3, 5}

    def test_unknown_kind(self):
        """Unknown generator names raise ValueError listing alternatives."""
        with pytest.raises(ValueError, match="Unknown topology"):
            make_topology("torus", 4)

    def test_custom_weights(self):
        """custom_weights validates the supplied matrix."""
        W = random_doubly_stochastic(5, np.random.default_rng(3))
        assert np.array_equal(make_topology("custom_weights", 5, weights=W).entries, W)
        with pytest.raises(ValueError):
            make_topology("custom_weights", 4, weights=W)

    def test_degrees(self):
        """Alternating ring: three incoming weights counting the self-loop."""
        report = degrees(make_topology("alternating_ring", 8))
        assert report.d_in_max == 3
        assert report.d_out_max == 3
        assert report.max_in_neighbors == 2
        assert report.edge_count == 16

    def test_identity_degrees(self):
        """Identity has no edges besides self-loops."""
        report = degrees(make_topology("identity", 5))
        assert report.d_in_max == 1
        assert report.edge_count == 0


# ============================================================================
# Mixing parameter
# ============================================================================


class TestMixingParameter:
    """Power-iteration p against closed forms and dense eigendecompositions."""

    @pytest.mark.parametrize("n", [1, 2, 5, 16])
    def test_complete_is_one(self, n: int):
        """p(complete) = 1."""
        assert abs(mixing_parameter(make_topology("complete", n)) - 1.0) <= 1e-9

    @pytest.mark.parametrize("n", [2, 5, 16])
    def test_identity_is_zero(self, n: int):
        """p(identity) = 0."""
        assert abs(mixing_parameter(make_topology("identity", n))) <= 1e-9

    def test_matches_dense_eigendecomposition(self):
        """Random Birkhoff mixtures agree with numpy's eigvalsh."""
        rng = np.random.default_rng(11)
        for _ in range(20):
            W = random_doubly_stochastic(10, rng)
            assert abs(mixing_parameter(W) - numpy_p(W)) <= 1e-6

    def test_frobenius_sandwich(self):
        """(1 - p) <= ||W - J||_F^2 <= (n - 1)(1 - p) on random doubly stochastic W."""
        rng = np.random.default_rng(5)
        n = 12
        for trial in range(100):
            W = random_doubly_stochastic(n, rng, terms=1 + trial % 6)
            p = mixing_parameter(W)
            dist = frob_dist_to_uniform(W)
            assert 1.0 - p <= dist + 1e-6, f"lower bound fails at trial {trial}: {1 - p} > {dist}"
            assert dist <= (n - 1) * (1.0 - p) + 1e-6, f"upper bound fails at trial {trial}"

    def test_alternating_ring_decay(self):
        """Doubling n on the alternating ring shrinks p by a factor in [3, 5]."""
        p8 = mixing_parameter(make_topology("alternating_ring", 8))
        p16 = mixing_parameter(make_topology("alternating_ring", 16))
        p32 = mixing_parameter(make_topology("alternating_ring", 32))
        assert 3.0 <= p8 / p16 <= 5.0, f"p8/p16 = {p8 / p16}"
        assert 3.0 <= p16 / p32 <= 5.0, f"p16/p32 = {p16 / p32}"

    def test_clustered_and_alternating_share_p(self):
        """Relabelling nodes does not change the spectrum."""
        a = mixing_parameter(make_topology("alternating_ring", 8))
        b = mixing_parameter(make_topology("clustered_ring", 8))
        assert abs(a - b) <= 1e-9

    def test_invariant_under_relabelling(self):
        """Permuting rows and columns together leaves p unchanged."""
        rng = np.random.default_rng(23)
        for trial in range(20):
            W = validate(random_doubly_stochastic(10, rng))
            order = rng.permutation(10).tolist()
            assert abs(mixing_parameter(W.permuted(order)) - mixing_parameter(W)) <= 1e-8, f"trial {trial}"

    def test_averaging_contracts_by_p(self):
        """||M W - M J||^2 <= (1 - p) ||M - M J||^2 for random M, in both orientations."""
        rng = np.random.default_rng(29)
        for trial in range(30):
            n, d = int(rng.integers(2, 10)), int(rng.integers(1, 5))
            W = random_doubly_stochastic(n, rng, terms=1 + trial % 5)
            p = mixing_parameter(W)
            M = rng.standard_normal((d, n))
            M_bar = M.mean(axis=1, keepdims=True)
            before = float(np.sum((M - M_bar) ** 2))
            after = float(np.sum((M @ W - M_bar) ** 2))
            assert after <= (1.0 - p + 1e-6) * before, f"trial {trial}"

            X = M.T
            mixed = mix(W, X)
            assert float(np.sum((mixed - X.mean(axis=0)) ** 2)) <= (1.0 - p + 1e-6) * before, f"trial {trial}"

    def test_spectral_gap_relation(self):
        """For symmetric W, p = 1 - (1 - gap)^2."""
        W = make_topology("ring", 10)
        gap = spectral_gap(W)
        assert abs(mixing_parameter(W) - (1.0 - (1.0 - gap) ** 2)) <= 1e-9

    def test_spectral_gap_rejects_asymmetric(self):
        """Asymmetric matrices have no spectral gap here."""
        W = np.zeros((3, 3))
        W[[0, 1, 2], [1, 2, 0]] = 1.0
        with pytest.raises(ValueError):
            spectral_gap(W)


# ============================================================================
# Schedules
# ============================================================================


class TestSchedule:
    """Fixed, cyclic and finite schedules."""

    def test_fixed(self):
        """A fixed schedule returns the same matrix at every step."""
        W = make_topology("ring", 4)
        schedule = MixingSchedule.fixed(W)
        assert schedule.at(0) is W
        assert schedule.at(10_000) is W
        assert schedule.n == 4

    def test_cyclic(self):
        """Cyclic schedules wrap around."""
        A, B = make_topology("ring", 4), make_topology("complete", 4)
        schedule = MixingSchedule.cyclic([A, B])
        assert [schedule.at(t) is A for t in range(4)] == [True, False, True, False]

    def test_sequence_exhausts(self):
        """Finite sequences raise once they run out."""
        A, B = make_topology("ring", 4), make_topology("complete", 4)
        schedule = MixingSchedule.sequence([A, B])
        assert schedule.at(1) is B
        with pytest.raises(ScheduleExhausted):
            schedule.at(2)

    def test_size_mismatch(self):
        """Matrices of different sizes cannot share a schedule."""
        with pytest.raises(DimensionMismatch):
            MixingSchedule.cyclic([make_topology("ring", 4), make_topology("ring", 5)])


# ============================================================================
# Files
# ============================================================================


class TestMatrixFiles:
    """CSV and JSON matrix files."""

    def test_csv_is_exact(self, tmp_path: Path):
        """17 significant digits reproduce every float64 entry."""
        W = random_doubly_stochastic(6, np.random.default_rng(2))
        path = write_matrix_csv(W, tmp_path / "w.csv")
        assert np.array_equal(read_topology(path).entries, W)

    def test_json_is_exact(self, tmp_path: Path):
        """The {"n", "rows"} document reproduces every entry."""
        W = make_topology("alternating_ring", 6)
        path = write_matrix_json(W, tmp_path / "w.json")
        assert np.array_equal(read_topology(path).entries, W.entries)

    def test_json_n_mismatch(self, tmp_path: Path):
        """n must agree with the number of rows."""
        path = tmp_path / "bad.json"
        path.write_text('{"n": 3, "rows": [[1.0, 0.0], [0.0, 1.0]]}', encoding="utf-8")
        with pytest.raises(ConfigError):
            read_matrix_json(path)

    def test_csv_non_numeric(self, tmp_path: Path):
        """Non-numeric cells raise ConfigError with the line number."""
        path = tmp_path / "bad.csv"
        path.write_text("1,0\nx,1\n", encoding="utf-8")
        with pytest.raises(ConfigError, match=":2"):
            read_topology(path)

    def test_csv_quoted_and_spaced_cells(self, tmp_path: Path):
        """Quoted cells and blanks after commas parse like plain ones."""
        path = tmp_path / "spaced.csv"
        path.write_text('0.5, 0.5\n"0.5",  "0.5"\n\n', encoding="utf-8")
        assert np.array_equal(read_topology(path).entries, np.full((2, 2), 0.5))

    def test_csv_ragged_row_names_its_line(self, tmp_path: Path):
        """Blank lines still count toward the reported line number."""
        path = tmp_path / "ragged.csv"
        path.write_text("1,0\n\n0,1,0\n", encoding="utf-8")
        with pytest.raises(ConfigError, match=":3"):
            read_topology(path)

    def test_csv_text_layout(self):
        """One headerless line per row, 17 significant digits."""
        assert array_to_csv(np.array([[0.1, 1.0], [2.0, 1.0 / 3.0]])) == (
            "0.10000000000000001,1\n2,0.33333333333333331\n"
        )

    def test_json_document(self):
        """The JSON form is a plain object any parser reads."""
        W = make_topology("ring", 3)
        data = json.loads(matrix_to_json(W))
        assert data["n"] == 3
        assert np.array_equal(np.array(data["rows"]), W.entries)

    def test_csv_invalid_matrix(self, tmp_path: Path):
        """Files holding non doubly stochastic data fail validation."""
        path = tmp_path / "bad.csv"
        path.write_text("0.5,0.5\n0.5,0.4\n", encoding="utf-8")
        with pytest.raises(RowSumViolation):
            read_topology(path)

    def test_schedule_dir_sorted_by_name(self, tmp_path: Path):
        """Matrices load in file-name order."""
        write_matrix_csv(make_topology("complete", 4).entries, tmp_path / "b.csv")
        write_matrix_csv(make_topology("identity", 4).entries, tmp_path / "a.csv")
        schedule = read_schedule_dir(tmp_path)
        assert schedule.policy == "cyclic"
        assert np.array_equal(schedule.at(0).entries, np.eye(4))

    def test_empty_schedule_dir(self, tmp_path: Path):
        """A directory without matrices is a config error."""
        with pytest.raises(ConfigError):
            read_schedule_dir(tmp_path)


# ============================================================================
# Averaging kernel
# ============================================================================


class TestMix:
    """mix and uniform_average share one accumulation order."""

    def test_complete_mix_equals_uniform_average_bitwise(self):
        """Every row of a complete-graph mix is bitwise the uniform average."""
        rng = np.random.default_rng(9)
        X = rng.standard_normal((7, 5))
        mixed = mix(make_topology("complete", 7), X)
        average = uniform_average(X)
        for row in mixed:
            assert np.array_equal(row, average)

    def test_identity_mix(self):
        """Identity leaves iterates unchanged."""
        X = np.random.default_rng(1).standard_normal((4, 3))
        assert np.array_equal(mix(make_topology("identity", 4), X), X)

    def test_preserves_average(self):
        """Doubly stochastic mixing keeps the node average."""
        rng = np.random.default_rng(4)
        W = random_doubly_stochastic(9, rng)
        X = rng.standard_normal((9, 3))
        assert np.allclose(mix(W, X).mean(axis=0), X.mean(axis=0), atol=1e-12)

    def test_leading_axis_checked(self):
        """X must have one row per node."""
        with pytest.raises(ValueError):
            mix(make_topology("ring", 4), np.zeros((3, 2)))
