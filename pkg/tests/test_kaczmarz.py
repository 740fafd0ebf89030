import numpy as np
import pytest

from altproj import kaczmarz
from altproj.kaczmarz import Hyperplane, LinearSystem


def random_sparse_system(rng, rows, cols, density=0.2):
    """Consistent system: draw x*, sparse A, set c = A x*."""
    a = np.zeros((rows, cols))
    for i in range(rows):
        k = max(2, int(round(density * cols)))
        idx = rng.choice(cols, size=k, replace=False)
        a[i, idx] = rng.standard_normal(k)
        if not np.linalg.norm(a[i]):
            a[i, rng.integers(cols)] = 1.0
    x_true = rng.standard_normal(cols)
    return LinearSystem.from_arrays(a, a @ x_true), x_true


class TestHyperplaneProject:
    def test_axis_plane(self):
        h = Hyperplane(np.array([1.0, 0.0]), 2.0)
        assert np.allclose(kaczmarz.hyperplane_project(h, np.array([0.0, 0.0])), [2.0, 0.0])

    def test_point_already_on_plane_is_fixed(self):
        h = Hyperplane(np.array([1.0, 2.0]), 5.0)
        z = np.array([1.0, 2.0])
        assert np.allclose(kaczmarz.hyperplane_project(h, z), z)

    def test_diagonal_plane_matches_minimizer(self):
        h = Hyperplane(np.array([1.0, 1.0]), 0.0)
        z = np.array([1.0, 0.0])
        projected = kaczmarz.hyperplane_project(h, z)
        # oracle: minimize ||z - (t, -t)|| over t
        ts = np.linspace(-2, 2, 400_001)
        candidates = np.stack([ts, -ts], axis=1)
        best = candidates[np.argmin(np.linalg.norm(candidates - z, axis=1))]
        assert np.allclose(projected, [0.5, -0.5], atol=1e-12)
        assert np.allclose(projected, best, atol=1e-5)

    def test_result_satisfies_the_equation(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            n = int(rng.integers(1, 9))
            h = Hyperplane(rng.standard_normal(n) + 0.1, float(rng.standard_normal()))
            out = kaczmarz.hyperplane_project(h, rng.standard_normal(n))
            assert abs(out @ h.normal - h.offset) <= 1e-10 * (1.0 + abs(h.offset))

    def test_idempotent(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            n = int(rng.integers(1, 9))
            h = Hyperplane(rng.standard_normal(n) + 0.1, float(rng.standard_normal()))
            once = kaczmarz.hyperplane_project(h, rng.standard_normal(n))
            twice = kaczmarz.hyperplane_project(h, once)
            assert np.linalg.norm(twice - once) <= 1e-12 * (1.0 + np.linalg.norm(once))

    def test_zero_normal_rejected(self):
        with pytest.raises(ValueError, match="nonzero"):
            Hyperplane(np.zeros(2), 1.0)


class TestSolve:
    def test_orthogonal_normals_finish_in_one_sweep(self):
        system = LinearSystem.from_arrays(np.eye(2), np.array([2.0, 3.0]))
        result = kaczmarz.solve(system, np.zeros(2), max_sweeps=5, tol=1e-12)
        assert result.converged and result.sweeps == 1
        assert np.allclose(result.x, [2.0, 3.0])

    def test_starting_at_a_solution_is_immediate(self):
        system = LinearSystem.from_arrays(np.array([[1.0, 1.0]]), np.array([3.0]))
        result = kaczmarz.solve(system, np.array([1.0, 2.0]), max_sweeps=5, tol=1e-12)
        assert result.converged and result.sweeps == 0
        assert len(result.residual_history) == 1
        assert result.residual_history[0] <= 1e-12

    def test_minimal_norm_solution_matches_pseudoinverse(self):
        rng = np.random.default_rng(20)
        system, _ = random_sparse_system(rng, 20, 30)
        result = kaczmarz.solve(system, np.zeros(30), max_sweeps=50_000, tol=1e-13)
        oracle = np.linalg.pinv(system.matrix()) @ system.rhs()
        assert result.converged
        assert np.linalg.norm(result.x - oracle) < 1e-6

    def test_residual_history_non_increasing(self):
        rng = np.random.default_rng(21)
        system, _ = random_sparse_system(rng, 15, 25)
        result = kaczmarz.solve(system, np.zeros(25), max_sweeps=20_000, tol=1e-12)
        for a, b in zip(result.residual_history, result.residual_history[1:]):
            assert b <= a + 1e-12

    def test_sweeps_are_fejer_monotone(self):
        # distance to any fixed solution never increases across sweeps
        rng = np.random.default_rng(22)
        system, x_true = random_sparse_system(rng, 10, 16)
        x = rng.standard_normal(16)
        previous = np.linalg.norm(x - x_true)
        for _ in range(200):
            for h in system.rows:
                x = kaczmarz.hyperplane_project(h, x)
            current = np.linalg.norm(x - x_true)
            assert current <= previous + 1e-12
            previous = current

    def test_minimal_norm_solution_orthogonal_to_nullspace(self):
        rng = np.random.default_rng(23)
        system, _ = random_sparse_system(rng, 12, 20)
        result = kaczmarz.solve(system, np.zeros(20), max_sweeps=50_000, tol=1e-13)
        a = system.matrix()
        _, _, vh = np.linalg.svd(a)
        nullspace = vh[np.linalg.matrix_rank(a):]
        assert np.max(np.abs(nullspace @ result.x)) < 1e-8

    def test_inconsistent_system_is_flagged_not_raised(self):
        a = np.array([[1.0, 0.0], [1.0, 0.0]])
        c = np.array([0.0, 1.0])  # x1 = 0 and x1 = 1 simultaneously
        result = kaczmarz.solve(LinearSystem.from_arrays(a, c), np.zeros(2),
                                max_sweeps=500, tol=1e-12)
        assert result.suspected_inconsistent
        assert not result.converged


class TestSystemFiles:
    def test_sparse_round_trip(self, tmp_path):
        path = tmp_path / "system.txt"
        path.write_text("3 2\n1.5 2 0 1.0 2 -2.0\n-4 1 1 3.0\n")
        system = kaczmarz.load_system(path)
        assert system.ambient_dim == 3
        assert np.allclose(system.matrix(), [[1.0, 0.0, -2.0], [0.0, 3.0, 0.0]])
        assert np.allclose(system.rhs(), [1.5, -4.0])

    def test_dense_round_trip(self, tmp_path):
        path = tmp_path / "dense.csv"
        path.write_text("1,0,2\n0,1,3\n")
        system = kaczmarz.load_system(path, dense=True)
        assert system.ambient_dim == 2
        assert np.allclose(system.matrix(), np.eye(2))
        assert np.allclose(system.rhs(), [2.0, 3.0])

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("x y\n")
        with pytest.raises(ValueError, match="header"):
            kaczmarz.load_system(path)

    def test_row_count_mismatch_rejected(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("3 2\n1 1 0 1.0\n")
        with pytest.raises(ValueError, match="promises"):
            kaczmarz.load_system(path)

    def test_column_index_out_of_range_rejected(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("2 1\n1.0 1 5 1.0\n")
        with pytest.raises(ValueError, match="outside"):
            kaczmarz.load_system(path)


class TestThirds:
    def test_three_iterations_get_within_eleven_millimetres_per_metre(self):
        positions, bound_ok = kaczmarz.thirds_demo(0.5, 0.3, 0.2, 3)
        assert bound_ok
        left, _ = positions[3]
        assert abs(left - 1.0 / 3.0) < 0.011

    def test_equal_thirds_is_a_fixed_point(self):
        positions, bound_ok = kaczmarz.thirds_demo(1 / 3, 1 / 3, 1 / 3, 6)
        assert bound_ok
        for left, right in positions:
            assert left == pytest.approx(1 / 3, abs=1e-12)
            assert right == pytest.approx(2 / 3, abs=1e-12)

    def test_single_step_matrices(self):
        assert np.allclose(kaczmarz.THIRDS_STEP_A @ np.array([1.0, 0.0, 0.0]), [1.0, 0.0, 0.0])
        assert np.allclose(kaczmarz.THIRDS_STEP_B @ np.array([1.0, 0.0, 0.0]), [0.5, 0.5, 0.0])

    def test_envelopes_hold_on_random_inputs(self):
        rng = np.random.default_rng(29)
        for _ in range(50):
            x, y, z = rng.uniform(0.05, 1.0, size=3)
            positions, bound_ok = kaczmarz.thirds_demo(x, y, z, 15)
            assert bound_ok
            c = x + y + z
            left, right = positions[-1]
            assert abs(left - c / 3.0) <= (2 * c / 3.0) * 4.0**-15 + 1e-10
            assert abs(right - 2 * c / 3.0) <= (c / 3.0) * 4.0**-14 + 1e-10

    def test_positions_converge_to_thirds(self):
        positions, _ = kaczmarz.thirds_demo(0.9, 0.05, 0.05, 20)
        left, right = positions[-1]
        assert abs(left - 1.0 / 3.0) < 1e-10
        assert abs(right - 2.0 / 3.0) < 1e-10

    def test_non_positive_lengths_rejected(self):
        with pytest.raises(ValueError, match="positive"):
            kaczmarz.thirds_demo(1.0, 0.0, 1.0, 3)
