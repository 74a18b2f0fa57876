import random

import pytest

from nocsynth.errors import NoWhitespaceError
from nocsynth.floorplan import Floorplan, SeqPair, pack
from nocsynth.model import Partition, Rect, manhattan
from nocsynth.placement import (
    cross_edges,
    extract_grids,
    insert_switches,
    insertion_cost,
    switch_flow,
)

from conftest import make_ccg, random_ccg


def random_packed_fp(n, rng, g=None):
    g = g or random_ccg(n, 0, rng)
    state = SeqPair.initial(n)
    rng.shuffle(state.plus)
    rng.shuffle(state.minus)
    return g, pack(state, g)


class TestExtractGrids:
    def test_single_core_in_wider_chip(self):
        fp = Floorplan((Rect(0, 0, 2, 2),), Rect(0, 0, 4, 2))
        grids = extract_grids(fp)
        assert len(grids) == 1
        assert grids[0].rect == Rect(2, 0, 2, 2)

    def test_fully_covered_chip_raises(self):
        fp = Floorplan((Rect(0, 0, 2, 2),), Rect(0, 0, 2, 2))
        with pytest.raises(NoWhitespaceError):
            extract_grids(fp)

    def test_area_identity_on_random_floorplans(self, rng):
        for _ in range(300):
            n = rng.randint(2, 9)
            g, fp = random_packed_fp(n, rng)
            fp = Floorplan(fp.placements, Rect(0, 0, fp.chip.w * 1.1, fp.chip.h * 1.07))
            grids = extract_grids(fp)
            free = sum(gr.rect.area for gr in grids)
            expect = fp.area - fp.core_area()
            assert abs(free - expect) <= 1e-9 * expect
            # Grids never overlap each other or any core (beyond ulp slivers).
            rects = [gr.rect for gr in grids]
            for i, a in enumerate(rects):
                assert not any(a.overlaps(b, eps=1e-9) for b in rects[i + 1 :])
                assert not any(a.overlaps(c, eps=1e-9) for c in fp.placements)

    def test_ids_are_dense_and_ordered(self, rng):
        _, fp = random_packed_fp(5, rng)
        fp = Floorplan(fp.placements, Rect(0, 0, fp.chip.w * 1.2, fp.chip.h * 1.2))
        grids = extract_grids(fp)
        assert [gr.id for gr in grids] == list(range(len(grids)))


class TestSwitchFlow:
    def test_single_cluster_has_zero_flow(self, rng):
        g = random_ccg(5, 8, rng)
        assert switch_flow(g, Partition(1, (0,) * 5), 0) == 0.0

    def test_cut_edges_summed_once_per_direction(self):
        g = make_ccg([(1, 1)] * 4, [(0, 1, 5.0), (1, 0, 3.0), (2, 3, 7.0), (0, 2, 2.0)])
        part = Partition(2, (0, 0, 1, 1))
        # Only the 0->2 edge crosses; both clusters see it.
        assert switch_flow(g, part, 0) == 2.0
        assert switch_flow(g, part, 1) == 2.0

    def test_matches_bruteforce_scan(self, rng):
        for _ in range(30):
            g = random_ccg(8, 14, rng)
            assign = tuple(rng.randrange(3) for _ in range(8))
            part = Partition(3, assign)
            for k in range(3):
                expect = 0.0
                for s, d, w in g.edges:
                    ins = assign[s] == k
                    ind = assign[d] == k
                    if ins != ind:
                        expect += w
                assert switch_flow(g, part, k) == pytest.approx(expect, abs=0)


def _fig3_instance():
    # Two column clusters with a free strip between and beside them.
    dims = [(3, 3)] * 4
    g = make_ccg(dims, [(0, 1, 100.0), (2, 3, 50.0)])
    placements = (
        Rect(0, 0, 3, 3),   # core 0, cluster 0
        Rect(5, 0, 3, 3),   # core 1, cluster 1
        Rect(0, 5, 3, 3),   # core 2, cluster 0
        Rect(5, 5, 3, 3),   # core 3, cluster 1
    )
    fp = Floorplan(placements, Rect(0, 0, 8, 8))
    part = Partition(2, (0, 1, 0, 1))
    return g, fp, part


class TestInsertSwitches:
    def test_single_cluster_single_grid(self):
        g = make_ccg([(2, 2)], [])
        fp = Floorplan((Rect(0, 0, 2, 2),), Rect(0, 0, 4, 2))
        grids = extract_grids(fp)
        sw = insert_switches(fp, grids, g, Partition(1, (0,)))
        assert sw.grid_of == {0: grids[0].id}
        assert grids[0].occupied_by == ("switch", 0)

    def test_clusters_keep_to_their_boxes(self):
        g, fp, part = _fig3_instance()
        grids = extract_grids(fp)
        sw = insert_switches(fp, grids, g, part)
        for k in range(2):
            from nocsynth.model import cluster_bounding_box

            bbox = cluster_bounding_box(fp, part, k)
            cx, cy = sw.center(grids, k)
            assert bbox.contains_point(cx, cy)
        for dec in sw.decisions:
            assert not dec.fallback

    def test_chosen_cost_is_minimal_among_candidates(self, rng):
        for trial in range(30):
            n = rng.randint(5, 9)
            g = random_ccg(n, 2 * n, rng)
            _, fp = random_packed_fp(n, rng, g)
            fp = Floorplan(fp.placements, Rect(0, 0, fp.chip.w * 1.25, fp.chip.h * 1.25))
            grids = extract_grids(fp)
            m = 3
            part = Partition(m, tuple(sorted(rng.randrange(m) for _ in range(n))))
            if any(s == 0 for s in part.sizes()):
                continue
            sw = insert_switches(fp, grids, g, part)
            by_id = {gr.id: gr for gr in grids}
            centers = fp.centers()
            for dec in sw.decisions:
                edges = cross_edges(g, part, dec.cluster)
                # Independent recomputation of every candidate's cost.
                for gid in dec.candidate_ids:
                    other = sum(
                        w * (manhattan(by_id[gid].center, centers[s]) + manhattan(by_id[gid].center, centers[d]))
                        for s, d, w in edges
                    )
                    assert dec.cost <= other + 1e-9

    def test_insertion_order_by_descending_flow(self, rng):
        g = make_ccg(
            [(2, 2)] * 6,
            [(0, 3, 10.0), (1, 4, 500.0), (2, 5, 100.0)],
        )
        _, fp = random_packed_fp(6, rng, g)
        fp = Floorplan(fp.placements, Rect(0, 0, fp.chip.w * 1.3, fp.chip.h * 1.3))
        grids = extract_grids(fp)
        part = Partition(3, (0, 1, 2, 0, 1, 2))
        sw = insert_switches(fp, grids, g, part)
        flows = [sw.flow[d.cluster] for d in sw.decisions]
        assert flows == sorted(flows, reverse=True)

    def test_reported_cost_matches_recomputation(self, rng):
        g, fp, part = _fig3_instance()
        grids = extract_grids(fp)
        sw = insert_switches(fp, grids, g, part)
        by_id = {gr.id: gr for gr in grids}
        centers = fp.centers()
        for dec in sw.decisions:
            edges = cross_edges(g, part, dec.cluster)
            expect = insertion_cost(by_id[dec.grid_id], edges, centers)
            assert dec.cost == expect
