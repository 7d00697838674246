"""Verification suites: deterministic, seeded case lists with defect reports.

Each suite returns a list of case dicts {"id", "ok", "defect"}; defects are
JSON-serializable payloads (usually the offending element or morphism).
The CLI wraps these; the acceptance tests run them at the contract sizes.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .ribbon_backend import (
    DualObj,
    Morphism,
    SimpleObj,
    TensorObj,
    UNIT,
    make_backend,
    simple,
    tensor_word,
    word_tensor,
)
from .scalars import ScalarSeries
from .skein_algebra import (
    holonomy_evaluate,
    lift_element,
    loop_element,
    mu,
    random_element,
)
from .poisson import (
    check_fusion,
    fock_rosly_consistency,
    fock_rosly_sigma,
    sigma_algebraic,
    sigma_goldman,
    symmetrization_check,
)
from .surface import (
    annulus,
    disk_with_two_points,
    once_punctured_torus,
    two_strand_chaps,
)
from .tangle import (
    Cell,
    TangleWord,
    apply_move,
    coupon_then_cross,
    random_word,
    reparenthesize_coupon,
    rt_evaluate,
)

V = simple(1)


def _case(case_id, ok, defect=None):
    return {"id": case_id, "ok": bool(ok), "defect": defect if not ok else None}


def _morphism_defect(m):
    return m.to_json() if isinstance(m, Morphism) else m


# ---------------------------------------------------------------------------
# moves
# ---------------------------------------------------------------------------

MOVE_KINDS = ("R2", "R3", "FramedR1", "Snake", "CouponSlide", "Reparenthesize")


def _apply_random_move(word, kind, backend, rng):
    """Return (before, after) words for the move, or None if no site fits."""
    levels = word.interfaces()
    if kind == "R2":
        sites = [(l, p) for l, s in enumerate(levels[:-1]) for p in range(max(0, len(s) - 1))]
        if not sites:
            return None
        lvl, p = rng.choice(sites)
        return word, apply_move(word, "R2", (lvl, p, "insert"))
    if kind == "R3":
        # the braid gadget permutes the interface, so insert at the top
        lvl = len(word.slices)
        top = levels[lvl]
        if len(top) < 3:
            return None
        p = rng.randrange(len(top) - 2)
        gadget = ((Cell("braid+", p),), (Cell("braid+", p + 1),), (Cell("braid+", p),))
        slices = word.slices[:lvl] + gadget + word.slices[lvl:]
        before = TangleWord(word.bottom, slices, dict(word.coupons))
        return before, apply_move(before, "R3", (lvl, "lr"))
    if kind == "FramedR1":
        sites = [
            (l, p)
            for l, s in enumerate(levels)
            for p in range(len(s))
            if s[p].orient > 0
        ]
        if not sites:
            return None
        lvl, p = rng.choice(sites)
        slices = word.slices[:lvl] + ((Cell("twist+", p),),) + word.slices[lvl:]
        before = TangleWord(word.bottom, slices, dict(word.coupons))
        return before, apply_move(before, "FramedR1", (lvl, p))
    if kind == "Snake":
        sites = [
            (l, p)
            for l, s in enumerate(levels)
            for p in range(len(s))
            if s[p].orient > 0
        ]
        if not sites:
            return None
        lvl, p = rng.choice(sites)
        flavor = rng.choice(("SnakeLeft", "SnakeRight"))
        return word, apply_move(word, flavor, (lvl, p, "insert"))
    if kind == "CouponSlide":
        for _ in range(8):
            # the slide gadget permutes the interface, so insert at the top
            lvl = len(word.slices)
            strands = word.interfaces()[lvl]
            if len(strands) < 2:
                return None
            p = rng.randrange(len(strands) - 1)
            source = strands[p].obj
            m = backend.random_invariant(source, source, rng)
            if m.is_zero:
                continue
            coupons = dict(word.coupons)
            cid = f"slide{len(coupons)}"
            coupons[cid] = m
            gadget = tuple(tuple(s) for s in coupon_then_cross(cid, m, p))
            slices = word.slices[:lvl] + gadget + word.slices[lvl:]
            before = TangleWord(word.bottom, slices, coupons)
            return before, apply_move(before, "CouponSlide", (lvl, p))
        return None
    if kind == "Reparenthesize":
        levels = word.interfaces()
        sites = [(l, p) for l, s in enumerate(levels) for p in range(max(0, len(s) - 2))]
        if not sites:
            return None
        lvl, p = rng.choice(sites)
        strands = levels[lvl]
        objs = [strands[p + i].obj for i in range(3)]
        src = TensorObj(TensorObj(objs[0], objs[1]), objs[2])
        m = backend.random_invariant(src, src, rng)
        coupons = dict(word.coupons)
        cid = f"rp{len(coupons)}"
        coupons[cid] = m
        slices = word.slices[:lvl] + ((Cell("coupon", p, coupon_id=cid),),) + word.slices[lvl:]
        before = TangleWord(word.bottom, slices, coupons)
        new_src = TensorObj(objs[0], TensorObj(objs[1], objs[2]))
        after = reparenthesize_coupon(before, cid, new_src, m.target, backend)
        return before, after
    raise ValueError(kind)


def moves_suite(backend_name: str, order: int, seed: int, words_per_kind: int = 5):
    backend = make_backend(backend_name, order)
    rng = random.Random(seed)
    cases = []
    for kind in MOVE_KINDS:
        done = 0
        attempts = 0
        while done < words_per_kind and attempts < words_per_kind * 12:
            attempts += 1
            word = random_word(rng, backend, n_strands=rng.choice((2, 3)), n_slices=rng.choice((2, 3, 4)))
            pair = _apply_random_move(word, kind, backend, rng)
            if pair is None:
                continue
            before, after = pair
            ok = rt_evaluate(before, backend) == rt_evaluate(after, backend)
            cases.append(_case(f"{kind}-{done}", ok, None if ok else (rt_evaluate(before, backend) - rt_evaluate(after, backend)).to_json()))
            done += 1
    return cases


# ---------------------------------------------------------------------------
# ribbon axioms
# ---------------------------------------------------------------------------


def _entries_compose(factors):
    """Multiply morphism matrices top-down, ignoring bracketing in types."""
    from .ribbon_backend import _series_compose

    entries = factors[0].entries
    for m in factors[1:]:
        entries = _series_compose(entries, m.entries)
    return entries


def _hexagon1(bk, a, b, c):
    lhs = bk.braiding(a, word_tensor(b, c))
    idb = Morphism.identity(b, bk.mode)
    idc = Morphism.identity(c, bk.mode)
    rhs = _entries_compose(
        [
            bk.associator_inv(b, c, a),
            idb.tensor(bk.braiding(a, c)),
            bk.associator(b, a, c),
            bk.braiding(a, b).tensor(idc),
            bk.associator_inv(a, b, c),
        ]
    )
    return lhs.entries == rhs


def _hexagon2(bk, a, b, c):
    lhs = bk.braiding(word_tensor(a, b), c)
    ida = Morphism.identity(a, bk.mode)
    idb = Morphism.identity(b, bk.mode)
    rhs = _entries_compose(
        [
            bk.associator(c, a, b),
            bk.braiding(a, c).tensor(idb),
            bk.associator_inv(a, c, b),
            ida.tensor(bk.braiding(b, c)),
            bk.associator(a, b, c),
        ]
    )
    return lhs.entries == rhs


def _snakes(bk, x: SimpleObj):
    dx = DualObj(x)
    s1 = bk.flat_apply([x, dx, x], [(1, 2, bk.ev(x))]) @ bk.flat_apply([x], [(0, 0, bk.coev(x))])
    s2 = bk.flat_apply([dx, x, dx], [(0, 2, bk.ev(x))]) @ bk.flat_apply([dx], [(1, 0, bk.coev(x))])
    return s1 == Morphism.identity(x, bk.mode) and s2 == Morphism.identity(dx, bk.mode)


def ribbon_suite(backend_name: str, order: int, seed: int = 0):
    bk = make_backend(backend_name, order)
    objs = [UNIT, V, DualObj(V)]
    cases = []
    for i, a in enumerate(objs):
        for j, b in enumerate(objs):
            for k, c in enumerate(objs):
                ok = _hexagon1(bk, a, b, c) and _hexagon2(bk, a, b, c)
                cases.append(_case(f"hexagons-{i}{j}{k}", ok))
    for i, a in enumerate(objs):
        for j, b in enumerate(objs):
            axiom = bk.braiding(b, a) @ bk.braiding(a, b) @ bk.twist(a).tensor(bk.twist(b))
            word = tensor_word([a, b])
            ok = bk.twist(word) == axiom.retyped(source=word, target=word)
            cases.append(_case(f"twist-axiom-{i}{j}", ok))
    cases.append(_case("snakes-V", _snakes(bk, V)))
    cases.append(_case("twist-transpose-V", bk.transpose(bk.twist(V)) == bk.twist(DualObj(V))))
    if backend_name == "drinfeld" and order >= 3:
        cases.append(_case("pentagon-VVVV", _pentagon(bk)))
    return cases


def _pentagon(bk):
    a = b = c = d = V
    p1 = bk.associator(a, b, TensorObj(c, d)) @ bk.associator(TensorObj(a, b), c, d)
    p2 = (
        Morphism.identity(a, bk.mode).tensor(bk.associator(b, c, d))
        @ bk.associator(a, TensorObj(b, c), d)
        @ bk.associator(a, b, c).tensor(Morphism.identity(d, bk.mode))
    )
    return p1.entries == p2.entries


# ---------------------------------------------------------------------------
# sigma, fusion, jacobi, torsion
# ---------------------------------------------------------------------------


def sigma_suite(seed: int, pairs: int = 5):
    rng = random.Random(seed)
    ep = make_backend("epsilon")
    cl = make_backend("classical")
    disk = disk_with_two_points()
    cases = []
    from .poisson import argument_insertion, interleaved_argument_factors
    from .ribbon_backend import T_TENSOR

    for i in range(pairs):
        arg = rng.choice((UNIT, V, simple(2)))
        s1 = random_element(ep, disk, rng, label_pool=(0, 1, 2), argument=(arg, arg))
        s2 = random_element(ep, disk, rng, label_pool=(0, 1, 2), argument=(arg, arg))
        sig = sigma_algebraic(s1, s2).element
        prod0 = mu(s1.part0(), s2.part0())
        factors, first, second = interleaved_argument_factors(s1, s2)
        rhs = argument_insertion(prod0, T_TENSOR, factors, [first[1]], [second[1]]).canonical()
        ok = sig.equal(rhs)
        cases.append(_case(f"disk-formula-{i}", ok, None if ok else (sig - rhs).canonical().to_json()))
    for pat_name, pat in (("annulus", annulus()), ("torus", once_punctured_torus())):
        for i in range(pairs):
            s1 = random_element(cl, pat, rng, label_pool=(0, 1, 2))
            s2 = random_element(cl, pat, rng, label_pool=(0, 1, 2))
            g = sigma_goldman(s1, s2)
            a = sigma_algebraic(lift_element(s1, ep), lift_element(s2, ep))
            ok = g.equal(a)
            cases.append(_case(f"goldman-{pat_name}-{i}", ok, None if ok else (g.element - a.element).canonical().to_json()))
            e1 = random_element(ep, pat, rng, label_pool=(0, 1, 2))
            e2 = random_element(ep, pat, rng, label_pool=(0, 1, 2))
            cases.append(_case(f"symmetrization-{pat_name}-{i}", symmetrization_check(e1, e2)))
    return cases


def fusion_suite(seed: int, pairs: int = 5, order: str = "v1v2"):
    rng = random.Random(seed)
    ep = make_backend("epsilon")
    cases = []
    disk = disk_with_two_points()
    for i in range(pairs):
        arg = rng.choice((UNIT, V))
        s1 = random_element(ep, disk, rng, label_pool=(0, 1, 2), argument=(arg, arg))
        s2 = random_element(ep, disk, rng, label_pool=(0, 1, 2), argument=(arg, arg))
        ok, defect = check_fusion(s1, s2, disk, 0, 1, order=order)
        cases.append(_case(f"fuse-disk-annulus-{i}", ok, None if ok else defect.to_json()))
    chaps = two_strand_chaps()
    for i in range(pairs):
        s1 = random_element(ep, chaps, rng, label_pool=(0, 1))
        s2 = random_element(ep, chaps, rng, label_pool=(0, 1))
        ok, defect = check_fusion(s1, s2, chaps, 0, 1, order=order)
        cases.append(_case(f"fuse-chaps-torus-{i}", ok, None if ok else defect.to_json()))
    return cases


def jacobi_suite(seed: int, pairs: int = 5, include_diagonal: bool = True):
    rng = random.Random(seed)
    cl = make_backend("classical")
    cases = []
    for pat_name, pat in (("annulus", annulus()), ("torus", once_punctured_torus())):
        for i in range(pairs):
            s1 = random_element(cl, pat, rng, label_pool=(0, 1, 2))
            s2 = random_element(cl, pat, rng, label_pool=(0, 1, 2))
            ok = fock_rosly_consistency(s1, s2, include_diagonal)
            cases.append(_case(f"fr-consistency-{pat_name}-{i}", ok))
    tor = once_punctured_torus()
    ta = loop_element(cl, tor, [[0]])
    tb = loop_element(cl, tor, [[1]])
    tab = loop_element(cl, tor, [[0, 1]])

    def br(f, g):
        return fock_rosly_sigma(tor, f, g, include_diagonal).element

    total = None
    for x, y, z in ((ta, tb, tab), (tb, tab, ta), (tab, ta, tb)):
        h = holonomy_evaluate(br(br(x, y), z))[0]
        total = h if total is None else total + h
    cases.append(_case("jacobi-trace-triple", total.is_zero, None if total.is_zero else str(total)))
    return cases


def torsion_suite(order: int = 2):
    cases = []
    for name in ("quantum", "drinfeld"):
        bk = make_backend(name, 2)
        th = bk.twist(V)
        defect = th @ th - Morphism.identity(V, bk.mode)
        expected = Morphism.identity(V, bk.mode).scale(
            ScalarSeries.from_coeffs(bk.mode, [0, Fraction(3, 2)])
        )
        ok = defect == expected
        cases.append(_case(f"torsion-{name}", ok, None if ok else defect.to_json()))
    return cases


SUITES = {
    "moves": lambda cfg: moves_suite(cfg["backend"], cfg["order"], cfg["seed"], cfg.get("cases", 5)),
    "ribbon": lambda cfg: ribbon_suite(cfg["backend"], cfg["order"], cfg["seed"]),
    "sigma": lambda cfg: sigma_suite(cfg["seed"], cfg.get("cases", 5)),
    "fusion": lambda cfg: fusion_suite(cfg["seed"], cfg.get("cases", 5), cfg.get("fusion_order", "v1v2")),
    "jacobi": lambda cfg: jacobi_suite(cfg["seed"], cfg.get("cases", 3), cfg.get("fr_diagonal", True)),
    "torsion": lambda cfg: torsion_suite(cfg["order"]),
}
