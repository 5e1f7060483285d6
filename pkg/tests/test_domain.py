"""Phase maps, material averaging, boundary specs and collocation sampling."""

import warnings

import numpy as np
import pytest

from mixedpinn.domain import (BoundarySpec, DomainError, Material,
                              MaterialTable, PhaseMap, TABLE1_MATERIALS,
                              distance_to_interface, eval_grid,
                              interface_segments, load_phase_map,
                              material_at_point, materials_at, multi_blob_map,
                              refine_near_interface, sample_collocation,
                              save_phase_map, square_inclusion_map)


@pytest.fixture
def two_cell_map():
    # phase 0 on the left half, phase 1 on the right half
    return PhaseMap(np.array([[0, 1]]))


class TestPhaseMap:
    def test_file_round_trip(self, tmp_path):
        pmap = multi_blob_map()
        path = tmp_path / "map.txt"
        save_phase_map(pmap, path)
        back = load_phase_map(path)
        assert np.array_equal(back.ids, pmap.ids)
        assert back.length_x == pmap.length_x

    def test_row_zero_is_bottom(self, tmp_path):
        path = tmp_path / "map.txt"
        path.write_text("2 2 1 1\n0 0\n1 1\n")
        pmap = load_phase_map(path)
        # bottom row of cells is phase 0, top row phase 1
        assert pmap.ids[0, 0] == 0
        assert pmap.ids[1, 0] == 1

    def test_negative_ids_rejected(self):
        with pytest.raises(DomainError):
            PhaseMap(np.array([[0, -1]]))

    def test_bad_file_shape(self, tmp_path):
        path = tmp_path / "map.txt"
        path.write_text("2 2 1 1\n0 0\n")
        with pytest.raises(DomainError):
            load_phase_map(path)


class TestMaterials:
    def test_validation(self):
        with pytest.raises(DomainError):
            Material(E=-1.0)
        with pytest.raises(DomainError):
            Material(nu=0.5)
        with pytest.raises(DomainError):
            Material(k=0.0)

    def test_table_requires_uniform_properties(self):
        with pytest.raises(DomainError):
            MaterialTable({0: Material(E=1.0, nu=0.3),
                           1: Material(k=1.0)})

    def test_missing_phase(self, two_cell_map):
        table = MaterialTable({0: Material(E=1.0, nu=0.3, k=1.0)})
        with pytest.raises(DomainError):
            table.check_covers(two_cell_map)

    def test_matrix_phase_values(self):
        pmap = square_inclusion_map()
        got = material_at_point(pmap, TABLE1_MATERIALS, 0.05, 0.05)
        assert got == (0.5, 0.3, 1.0)

    def test_inclusion_phase_values(self):
        pmap = square_inclusion_map()
        got = material_at_point(pmap, TABLE1_MATERIALS, 0.5, 0.5)
        assert got == (1.0, 0.3, 0.5)

    def test_edge_between_phases_averages(self, two_cell_map):
        got = material_at_point(two_cell_map, TABLE1_MATERIALS, 0.5, 0.3)
        assert got.E == pytest.approx(0.75)
        assert got.nu == pytest.approx(0.3)
        assert got.k == pytest.approx(0.75)

    def test_corner_of_identical_cells_unchanged(self):
        pmap = PhaseMap(np.zeros((2, 2), dtype=int))
        got = material_at_point(pmap, TABLE1_MATERIALS, 0.5, 0.5)
        assert got == (0.5, 0.3, 1.0)

    def test_corner_of_four_phases(self):
        pmap = PhaseMap(np.array([[0, 1], [1, 1]]))
        got = material_at_point(pmap, TABLE1_MATERIALS, 0.5, 0.5)
        assert got.E == pytest.approx((0.5 + 3 * 1.0) / 4)

    def test_piecewise_constant_inside_cell(self, two_cell_map):
        a = material_at_point(two_cell_map, TABLE1_MATERIALS, 0.1, 0.2)
        b = material_at_point(two_cell_map, TABLE1_MATERIALS, 0.4, 0.9)
        assert a == b

    def test_domain_boundary_point_single_cell(self, two_cell_map):
        got = material_at_point(two_cell_map, TABLE1_MATERIALS, 0.0, 0.5)
        assert got.E == pytest.approx(0.5)

    def test_outside_domain_rejected(self, two_cell_map):
        with pytest.raises(DomainError):
            material_at_point(two_cell_map, TABLE1_MATERIALS, 1.5, 0.5)

    def test_vectorized_matches_scalar(self):
        pmap = square_inclusion_map()
        rng = np.random.default_rng(0)
        pts = rng.uniform(0, 1, size=(50, 2))
        vec = materials_at(pmap, TABLE1_MATERIALS, pts)
        for i, (x, y) in enumerate(pts):
            single = material_at_point(pmap, TABLE1_MATERIALS, x, y)
            assert vec.E[i] == single.E
            assert vec.k[i] == single.k


class TestBoundarySpec:
    def test_tension_layout(self):
        bcs = BoundarySpec.tension(0.05)
        assert bcs.condition("left", "x").kind == "dirichlet"
        assert bcs.condition("right", "x").value == 0.05
        assert bcs.condition("right", "y").kind == "neumann"
        assert bcs.condition("top", "y").value == 0.0

    def test_thermal_layout(self):
        bcs = BoundarySpec.thermal_gradient()
        assert bcs.condition("left", "T").value == 1.0
        assert bcs.condition("right", "T").value == 0.0
        assert bcs.condition("top", "T").kind == "neumann"

    def test_every_edge_required(self):
        with pytest.raises(DomainError):
            BoundarySpec("thermal", {"left": {}})

    def test_component_coverage_enforced(self):
        from mixedpinn.domain import EdgeCondition
        d = EdgeCondition("dirichlet", 0.0)
        with pytest.raises(DomainError):
            BoundarySpec("elastic", {e: {"x": d} for e in
                                     ("left", "right", "top", "bottom")})


class TestCollocation:
    def test_counts(self):
        pmap = square_inclusion_map()
        cset = sample_collocation(pmap, TABLE1_MATERIALS, 5000, 400, seed=1)
        assert cset.n_interior == 5000
        assert cset.n_boundary == 1600

    def test_interior_strictly_inside(self):
        pmap = square_inclusion_map()
        cset = sample_collocation(pmap, TABLE1_MATERIALS, 2000, 50, seed=2)
        assert cset.interior[:, 0].min() > 0.0
        assert cset.interior[:, 0].max() < 1.0
        assert cset.interior[:, 1].min() > 0.0
        assert cset.interior[:, 1].max() < 1.0

    def test_boundary_points_on_their_edges(self):
        pmap = square_inclusion_map()
        cset = sample_collocation(pmap, TABLE1_MATERIALS, 100, 25, seed=3)
        assert np.all(cset.boundary["left"][:, 0] == 0.0)
        assert np.all(cset.boundary["right"][:, 0] == 1.0)
        assert np.all(cset.boundary["top"][:, 1] == 1.0)
        assert np.all(cset.boundary["bottom"][:, 1] == 0.0)

    def test_determinism(self):
        pmap = square_inclusion_map()
        a = sample_collocation(pmap, TABLE1_MATERIALS, 500, 40, seed=7)
        b = sample_collocation(pmap, TABLE1_MATERIALS, 500, 40, seed=7)
        assert np.array_equal(a.interior, b.interior)
        for edge in a.boundary:
            assert np.array_equal(a.boundary[edge], b.boundary[edge])

    def test_grid_strategy_lattice(self):
        pmap = PhaseMap(np.zeros((1, 1), dtype=int))
        cset = sample_collocation(pmap, TABLE1_MATERIALS, 100, 10, seed=0,
                                  strategy="grid")
        assert cset.n_interior == 100
        xs = np.unique(cset.interior[:, 0])
        assert len(xs) == 10
        assert xs[0] == pytest.approx(0.05)

    def test_density_weight_biases_sampling(self):
        pmap = square_inclusion_map()
        flat = sample_collocation(pmap, TABLE1_MATERIALS, 4000, 10, seed=5,
                                  inclusion_density=1.0)
        dense = sample_collocation(pmap, TABLE1_MATERIALS, 4000, 10, seed=5,
                                   inclusion_density=4.0)

        def inside(cset):
            x, y = cset.interior[:, 0], cset.interior[:, 1]
            box = (x > 12 / 32) & (x < 20 / 32) & (y > 12 / 32) & (y < 20 / 32)
            return box.mean()

        assert inside(dense) > 2.0 * inside(flat)

    def test_unknown_phase_density_warns(self):
        pmap = PhaseMap(np.zeros((2, 2), dtype=int))
        with pytest.warns(UserWarning):
            sample_collocation(pmap, TABLE1_MATERIALS, 50, 10, seed=0,
                               phase_density={0: 1.0, 5: 3.0})

    def test_batch_layout(self):
        pmap = square_inclusion_map()
        cset = sample_collocation(pmap, TABLE1_MATERIALS, 120, 15, seed=0)
        pts, slices = cset.batch()
        assert len(pts) == 120 + 4 * 15
        assert slices["interior"] == (0, 120)
        lo, hi = slices["right"]
        assert np.all(pts[lo:hi, 0] == 1.0)
        mats = cset.batch_materials()
        assert len(mats.E) == len(pts)


class TestRefine:
    def test_adds_exactly_n_points_near_interface(self):
        pmap = square_inclusion_map()
        cset = sample_collocation(pmap, TABLE1_MATERIALS, 1000, 30, seed=0)
        refined = refine_near_interface(cset, 800, 0.05, seed=1)
        assert refined.n_interior == 1800
        new_pts = refined.interior[1000:]
        dist = distance_to_interface(pmap, new_pts)
        assert np.all(dist <= 0.05)

    def test_zero_extra_is_identity(self):
        pmap = square_inclusion_map()
        cset = sample_collocation(pmap, TABLE1_MATERIALS, 100, 10, seed=0)
        assert refine_near_interface(cset, 0, 0.05) is cset

    def test_homogeneous_map_warns_and_returns_input(self):
        pmap = PhaseMap(np.zeros((4, 4), dtype=int))
        cset = sample_collocation(pmap, TABLE1_MATERIALS, 100, 10, seed=0)
        with pytest.warns(UserWarning):
            out = refine_near_interface(cset, 100, 0.05, seed=0)
        assert out is cset

    def test_interface_segments_of_square_inclusion(self):
        pmap = square_inclusion_map()
        vert, horiz = interface_segments(pmap)
        # 8 cells per side, two vertical and two horizontal interface lines
        assert len(vert) == 16
        assert len(horiz) == 16
        assert np.all((vert[:, 0] == 12 / 32) | (vert[:, 0] == 20 / 32))


class TestEvalGrid:
    def test_two_by_two_gives_corners(self):
        pmap = PhaseMap(np.zeros((1, 1), dtype=int))
        pts = eval_grid(pmap, 2, 2)
        expect = {(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)}
        assert {tuple(p) for p in pts} == expect

    def test_count_and_spacing(self):
        pmap = PhaseMap(np.zeros((1, 1), dtype=int))
        pts = eval_grid(pmap, 100, 100)
        assert len(pts) == 10000
        xs = np.unique(pts[:, 0])
        assert np.allclose(np.diff(xs), 1.0 / 99)
        assert xs[1] - xs[0] == pytest.approx(1.0 / 99, rel=1e-15)

    def test_needs_two_points_per_axis(self):
        pmap = PhaseMap(np.zeros((1, 1), dtype=int))
        with pytest.raises(DomainError):
            eval_grid(pmap, 1, 5)
