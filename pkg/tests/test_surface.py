import pytest

from skeinlab.errors import FusionError
from skeinlab.surface import (
    Handle,
    HandleEnd,
    SurfacePattern,
    annulus,
    disjoint_union,
    disk_with_two_points,
    fuse,
    genus_two_one_boundary,
    once_punctured_torus,
    pattern_isomorphic,
    two_strand_chaps,
)


def test_disk():
    d = disk_with_two_points()
    assert (d.n_vertices, d.n_handles) == (2, 1)
    assert d.euler_characteristic() == 1


def test_standard_surfaces():
    a = annulus()
    assert (a.n_vertices, a.n_handles, a.euler_characteristic()) == (1, 1, 0)
    t = once_punctured_torus()
    assert (t.n_vertices, t.n_handles, t.euler_characteristic()) == (1, 2, -1)
    # interleaved handle ends: the standard fatgraph of the punctured torus
    order = [(hi, e.sign) for hi, e in t.slots_at(0)]
    assert order == [(0, 1), (1, 1), (0, -1), (1, -1)]
    g2 = genus_two_one_boundary()
    assert (g2.n_vertices, g2.n_handles, g2.euler_characteristic()) == (1, 4, -3)
    chaps = two_strand_chaps()
    assert (chaps.n_vertices, chaps.n_handles, chaps.euler_characteristic()) == (2, 2, 0)


def test_fuse_decrements_chi():
    p = disjoint_union(disk_with_two_points(), disk_with_two_points())
    before = p.euler_characteristic()
    q = fuse(p, 0, 2)
    assert q.euler_characteristic() == before - 1
    assert q.n_handles == p.n_handles


def test_fuse_slot_orders():
    d = disk_with_two_points()
    a12 = fuse(d, 0, 1, order="v1v2")
    a21 = fuse(d, 0, 1, order="v2v1")
    assert [(h, e.sign) for h, e in a12.slots_at(0)] == [(0, 1), (0, -1)]
    assert [(h, e.sign) for h, e in a21.slots_at(0)] == [(0, -1), (0, 1)]


def test_fuse_errors():
    d = disk_with_two_points()
    with pytest.raises(FusionError):
        fuse(d, 0, 0)
    with pytest.raises(FusionError):
        fuse(d, 0, 5)


def test_unrelated_fusions_commute_up_to_iso():
    p = disjoint_union(
        disjoint_union(disk_with_two_points(), disk_with_two_points()), disk_with_two_points()
    )
    x1 = fuse(fuse(p, 0, 2), 3, 4)
    x2 = fuse(fuse(p, 4, 5), 0, 2)
    assert pattern_isomorphic(x1, x2)
    assert not pattern_isomorphic(annulus(), disk_with_two_points())


def test_chi_additive_under_disjoint_union():
    a, t = annulus(), once_punctured_torus()
    u = disjoint_union(a, t)
    assert u.euler_characteristic() == a.euler_characteristic() + t.euler_characteristic()
    assert u.n_vertices == a.n_vertices + t.n_vertices


def test_validation():
    with pytest.raises(FusionError):
        SurfacePattern(1, (Handle((HandleEnd(0, 0, 1), HandleEnd(0, 0, -1))),))
    with pytest.raises(FusionError):
        SurfacePattern(1, (Handle((HandleEnd(0, 0, 1), HandleEnd(0, 2, -1))),))
    with pytest.raises(FusionError):
        SurfacePattern(2, (Handle((HandleEnd(0, 0, 1), HandleEnd(1, 0, 1))),))


def test_json_roundtrip():
    t = once_punctured_torus()
    t2 = SurfacePattern.from_json(t.to_json())
    assert t2.n_vertices == t.n_vertices and t2.handles == t.handles
