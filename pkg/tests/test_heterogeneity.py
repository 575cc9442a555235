"""
Heterogeneity tests

Monte Carlo estimates against the closed forms of the two-cluster mean
estimation problem, the dominance of the closed-form bounds, and the
label-skew bound.
"""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))
from src.errors import DimensionMismatch
from src.heterogeneity import (
    bias_variance_bound,
    consensus_bound,
    default_probes,
    estimate_class_B,
    estimate_H,
    estimate_H_detailed,
    estimate_sigma_sq,
    estimate_zeta_bar_sq,
    label_skew_bound,
    measure_heterogeneity,
    neighborhood_bias,
    prop1_bound,
    variance_term,
)
from src.mixing import frob_dist_to_uniform, make_topology, mixing_parameter, validate
from src.problems import dirichlet_proportions, make_label_skew, make_mean_estimation
from src.topo_opt import TopoObjective, bias_term, frank_wolfe, g_value

STDERR_SLACK = 5.0


@pytest.fixture(scope="module")
def example_problem():
    """n = 8, m = 1, sigma_tilde^2 = 1."""
    return make_mean_estimation(8, 1.0, 1.0)


@pytest.fixture(scope="module")
def probes(example_problem):
    return [np.array([1.0]), np.array([0.0])]


# ============================================================================
# Two-cluster closed forms
# ============================================================================


class TestTwoClusterClosedForms:
    """Exact heterogeneity of the alternating and clustered rings."""

    def test_local_heterogeneity(self, example_problem, probes):
        """zeta_bar^2 = 4 m^2 at every theta."""
        assert abs(estimate_zeta_bar_sq(example_problem, probes) - 4.0) <= 1e-12

    def test_alternating_ring_has_no_bias(self, example_problem, probes):
        """Every alternating-ring neighbourhood averages both clusters."""
        W = make_topology("alternating_ring", 8)
        assert neighborhood_bias(W, example_problem, probes) <= 1e-24

    def test_clustered_ring_bias(self, example_problem, probes):
        """Interior nodes see 4 m^2, boundary nodes m^2: bias 2.5 m^2."""
        W = make_topology("clustered_ring", 8)
        assert abs(neighborhood_bias(W, example_problem, probes) - 2.5) <= 1e-12

    def test_alternating_ring_H(self, example_problem, probes):
        """H = sigma^2/n ||W - J||^2 = sigma_tilde^2 on the alternating ring."""
        W = make_topology("alternating_ring", 8)
        estimate = estimate_H_detailed(W, example_problem, probes, samples=100_000, seed=0)
        assert abs(estimate.value - 1.0) <= STDERR_SLACK * estimate.stderr, (
            f"H_hat={estimate.value} +- {estimate.stderr}"
        )
        assert estimate.value <= 4.0

    def test_clustered_ring_H(self, example_problem, probes):
        """H = 2.5 m^2 + sigma_tilde^2 on the clustered ring."""
        W = make_topology("clustered_ring", 8)
        estimate = estimate_H_detailed(W, example_problem, probes, samples=100_000, seed=0)
        assert abs(estimate.value - 3.5) <= STDERR_SLACK * estimate.stderr

    def test_complete_graph_is_zero(self, example_problem, probes):
        """Complete averaging removes every deviation exactly."""
        W = make_topology("complete", 8)
        assert estimate_H(W, example_problem, probes, samples=1000) == 0.0

    def test_identity_H_is_local_heterogeneity_plus_noise(self, example_problem, probes):
        """Without communication H = (1 - 1/n)(sigma^2) + zeta^2 in this problem."""
        W = make_topology("identity", 8)
        estimate = estimate_H_detailed(W, example_problem, probes, samples=50_000)
        expected = 4.0 + 4.0 * (1.0 - 1.0 / 8)
        assert abs(estimate.value - expected) <= STDERR_SLACK * estimate.stderr

    def test_noise_per_node(self, example_problem, probes):
        """sigma_i^2 = 4 sigma_tilde^2 for every node."""
        noise = estimate_sigma_sq(example_problem, probes, samples=50_000)
        for value, stderr in zip(noise.per_node, noise.per_node_stderr):
            # max over two probes drawn from separate streams
            assert abs(value - 4.0) <= STDERR_SLACK * stderr
        assert noise.sigma_max_sq == max(noise.per_node)


class TestClusterSeparation:
    """Alternating-ring H does not grow with the distance between clusters."""

    SEPARATIONS = [1.0, 10.0, 100.0]

    @pytest.mark.parametrize("m", SEPARATIONS)
    def test_closed_forms_scale_with_m(self, m: float):
        """zeta_bar^2 = 4 m^2 while the alternating-ring bias stays zero."""
        spec = make_mean_estimation(8, m, 1.0)
        probes = [np.array([1.0]), np.array([0.0])]
        assert abs(estimate_zeta_bar_sq(spec, probes) - 4.0 * m * m) <= 1e-9 * 4.0 * m * m
        W = make_topology("alternating_ring", 8)
        assert neighborhood_bias(W, spec, probes) <= 1e-12

    def test_H_is_independent_of_m(self):
        """Same seed, same noise: H stays below the noise level for every m."""
        samples = 20_000
        W = make_topology("alternating_ring", 8)
        values = []
        for m in self.SEPARATIONS:
            spec = make_mean_estimation(8, m, 1.0)
            probes = [np.array([1.0]), np.array([0.0])]
            values.append(estimate_H(W, spec, probes, samples=samples, seed=0))
        for value in values:
            assert value <= 4.0 * (1.0 + 5.0 / np.sqrt(samples))
        assert max(values) - min(values) <= 0.1 * min(values)

    @pytest.mark.parametrize("m", SEPARATIONS)
    def test_H_at_full_sample_size(self, m: float):
        """10^5 draws per node: H below the noise level at every separation."""
        samples, sigma_tilde_sq = 100_000, 1.0
        spec = make_mean_estimation(8, m, sigma_tilde_sq)
        probes = [np.array([1.0]), np.array([0.0])]
        W = make_topology("alternating_ring", 8)
        value = estimate_H(W, spec, probes, samples=samples, seed=0)
        assert value <= 4.0 * sigma_tilde_sq * (1.0 + 5.0 / np.sqrt(samples)), f"m={m}: H_hat={value}"

    def test_prop1_grows_with_m(self):
        """The p-based bound scales with m^2 although H does not."""
        p = mixing_parameter(make_topology("alternating_ring", 8))
        bounds = [prop1_bound(p, 4.0 * m * m, 4.0) for m in self.SEPARATIONS]
        assert bounds[0] < bounds[1] < bounds[2]
        assert bounds[2] > 100.0 * 4.0


# ============================================================================
# Bound dominance
# ============================================================================


class TestBounds:
    """Closed-form bounds dominate the Monte Carlo estimate."""

    @pytest.mark.parametrize("kind", ["alternating_ring", "clustered_ring", "identity", "ring"])
    def test_bias_variance_dominates(self, example_problem, probes, kind: str):
        """bias + variance >= H_hat - 5 stderr."""
        W = make_topology(kind, 8)
        estimate = estimate_H_detailed(W, example_problem, probes, samples=40_000)
        bias, variance = bias_variance_bound(W, example_problem, probes, sigma_max_sq=4.0)
        assert bias + variance >= estimate.value - STDERR_SLACK * estimate.stderr

    @pytest.mark.parametrize("kind", ["alternating_ring", "clustered_ring", "identity", "ring"])
    def test_prop1_dominates(self, example_problem, probes, kind: str):
        """(1 - p)(zeta^2 + sigma_bar^2) >= H_hat - 5 stderr."""
        W = make_topology(kind, 8)
        estimate = estimate_H_detailed(W, example_problem, probes, samples=40_000)
        bound = prop1_bound(mixing_parameter(W), 4.0, 4.0)
        assert bound >= estimate.value - STDERR_SLACK * estimate.stderr

    def test_random_pairs(self):
        """Both bounds dominate H_hat on random permutation mixtures and problems."""
        rng = np.random.default_rng(2024)
        for trial in range(20):
            n = int(rng.choice([4, 6, 8, 10]))
            dim = int(rng.integers(1, 3))
            sigma_tilde_sq = float(rng.uniform(0.5, 2.0))
            spec = make_mean_estimation(n, float(rng.uniform(0.5, 3.0)), sigma_tilde_sq, dim=dim, seed=trial)
            entries = np.zeros((n, n))
            for w in rng.dirichlet(np.ones(3)):
                entries[np.arange(n), rng.permutation(n)] += w
            W = validate(entries)
            probes = [np.zeros(dim), np.full(dim, float(rng.uniform(-2.0, 2.0)))]
            sigma_sq = 4.0 * sigma_tilde_sq * dim

            estimate = estimate_H_detailed(W, spec, probes, samples=5000, seed=trial)
            slack = STDERR_SLACK * estimate.stderr
            bias, variance = bias_variance_bound(W, spec, probes, sigma_max_sq=sigma_sq)
            assert bias + variance >= estimate.value - slack, f"trial {trial}"
            zeta = estimate_zeta_bar_sq(spec, probes)
            assert prop1_bound(mixing_parameter(W), zeta, sigma_sq) >= estimate.value - slack, f"trial {trial}"

    def test_variance_term(self):
        """sigma_max^2 / n ||W - J||^2."""
        W = make_topology("alternating_ring", 8)
        assert abs(variance_term(W, 4.0) - 4.0 / 8 * frob_dist_to_uniform(W)) <= 1e-15
        with pytest.raises(ValueError):
            variance_term(W, -1.0)

    def test_bias_variance_dimension_mismatch(self, example_problem, probes):
        """Topology and problem must agree on n."""
        with pytest.raises(DimensionMismatch):
            bias_variance_bound(make_topology("ring", 6), example_problem, probes, 1.0)

    @pytest.mark.parametrize("p", [-0.1, 1.1])
    def test_prop1_rejects_p(self, p: float):
        """p lies in [0, 1]."""
        with pytest.raises(ValueError):
            prop1_bound(p, 1.0, 1.0)

    def test_consensus_bound(self):
        """24 eta^2 n tau^2 / p^2."""
        assert abs(consensus_bound(0.1, 8, 2.0, 0.5) - 24 * 0.01 * 8 * 2.0 / 0.25) <= 1e-12
        with pytest.raises(ValueError):
            consensus_bound(0.1, 8, 2.0, 0.0)


# ============================================================================
# Label skew
# ============================================================================


class TestLabelSkewBound:
    """The label-skew bound reuses the topology learning bias term."""

    @pytest.fixture(scope="class")
    def skewed(self):
        Pi = dirichlet_proportions(10, 3, 0.3, seed=6)
        spec = make_label_skew(10, 3, 2, Pi, class_sep=2.0, seed=2, reference_size=5000)
        return Pi, spec

    def test_bias_bound_is_scaled_objective(self, skewed):
        """bias_bound = K B (g(W) - lam/n ||W - J||^2)."""
        Pi, _ = skewed
        obj = TopoObjective(Pi, lam=0.2)
        W, _ = frank_wolfe(obj, iters=4)
        bound = label_skew_bound(W, Pi, B=0.7, sigma_max_sq=1.0)
        expected = 3 * 0.7 * (g_value(W, obj) - 0.2 * frob_dist_to_uniform(W) / 10)
        assert abs(bound.bias_bound - expected) <= 1e-12
        assert bound.bias_bound == 3 * 0.7 * bias_term(W, Pi)
        assert bound.total == bound.bias_bound + bound.variance_bound

    def test_bound_dominates_estimate(self, skewed):
        """Measured H stays below the label-skew bound built from measured B and sigma."""
        Pi, spec = skewed
        W = make_topology("ring", 10)
        probes = default_probes(spec, count=2)
        report = measure_heterogeneity(W, spec, probes=probes, samples=4000, seed=1, estimate_B=True)
        assert report.B_hat is not None and report.B_hat > 0
        bound = label_skew_bound(W, Pi, report.B_hat, report.sigma_max_sq_hat)
        assert report.H_hat <= 1.05 * bound.total + STDERR_SLACK * report.H_stderr

    def test_class_B_requires_classes(self, example_problem, probes):
        """Mean estimation has no class structure."""
        with pytest.raises(ValueError):
            estimate_class_B(example_problem, probes)

    @pytest.mark.parametrize("B", [0.0, -1.0])
    def test_rejects_non_positive_B(self, skewed, B: float):
        """B must be positive."""
        Pi, _ = skewed
        with pytest.raises(ValueError):
            label_skew_bound(make_topology("ring", 10), Pi, B=B, sigma_max_sq=1.0)

    def test_dimension_mismatch(self, skewed):
        """W and Pi must agree on n."""
        Pi, _ = skewed
        with pytest.raises(DimensionMismatch):
            label_skew_bound(make_topology("ring", 8), Pi, B=1.0, sigma_max_sq=1.0)


# ============================================================================
# Estimator mechanics
# ============================================================================


class TestEstimatorMechanics:
    """Seeding, permutation handling and the full report."""

    def test_seeded(self, example_problem, probes):
        """Same seed, same estimate."""
        W = make_topology("ring", 8)
        a = estimate_H(W, example_problem, probes, samples=2000, seed=4)
        b = estimate_H(W, example_problem, probes, samples=2000, seed=4)
        c = estimate_H(W, example_problem, probes, samples=2000, seed=5)
        assert a == b
        assert a != c

    def test_permutation_equivariance(self, example_problem, probes):
        """Relabelling nodes together with their streams leaves H unchanged."""
        W = make_topology("clustered_ring", 8)
        order = [3, 0, 6, 1, 7, 2, 5, 4]
        base = estimate_H_detailed(W, example_problem, probes, samples=5000, seed=2)
        permuted = estimate_H_detailed(
            W.permuted(order),
            example_problem.permuted(order),
            probes,
            samples=5000,
            seed=2,
            stream_ids=order,
        )
        assert abs(base.value - permuted.value) <= 1e-12 * max(1.0, base.value)

    def test_default_probes(self, example_problem):
        """theta0, theta*, then points strictly between them."""
        points = default_probes(example_problem, count=3)
        assert len(points) == 5
        assert points[0][0] == 1.0
        assert points[1][0] == 0.0
        assert all(0.0 < p[0] < 1.0 for p in points[2:])

    def test_default_probes_from_trajectory(self, example_problem):
        """A recorded trajectory supplies the extra points."""
        trajectory = [np.array([v]) for v in np.linspace(1.0, 0.1, 20)]
        points = default_probes(example_problem, trajectory=trajectory, count=4)
        assert len(points) == 6
        assert points[2][0] == 1.0
        assert points[-1][0] == 0.1

    def test_rejects_bad_inputs(self, example_problem, probes):
        """Empty probes, zero samples and size mismatches fail."""
        W = make_topology("ring", 8)
        with pytest.raises(ValueError):
            estimate_H(W, example_problem, [], samples=10)
        with pytest.raises(ValueError):
            estimate_H(W, example_problem, probes, samples=0)
        with pytest.raises(ValueError):
            estimate_H(make_topology("ring", 6), example_problem, probes, samples=10)

    def test_measure_report(self, example_problem, probes):
        """The report ties estimates and bounds together."""
        W = make_topology("alternating_ring", 8)
        report = measure_heterogeneity(W, example_problem, probes=probes, samples=20_000, seed=0)
        assert report.oracles_exact
        assert report.samples_per_node == 20_000
        assert report.probe_points == [[1.0], [0.0]]
        assert abs(report.p - mixing_parameter(W)) <= 1e-12
        assert report.sigma_max_sq_used == report.sigma_max_sq_hat
        assert abs(report.variance_term - variance_term(W, report.sigma_max_sq_used)) <= 1e-15
        assert report.tau_bar_sq_prop1 == prop1_bound(report.p, report.zeta_bar_sq_hat, report.sigma_bar_sq_hat)
        assert report.B_hat is None

    def test_measure_sigma_override(self, example_problem, probes):
        """A supplied sigma_max^2 replaces the estimate in the variance term only."""
        W = make_topology("alternating_ring", 8)
        report = measure_heterogeneity(W, example_problem, probes=probes, samples=2000, sigma_max_sq=4.0)
        assert report.sigma_max_sq_used == 4.0
        assert report.variance_term == variance_term(W, 4.0)
