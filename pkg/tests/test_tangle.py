import random

import pytest

from skeinlab.errors import MoveError, WordError
from skeinlab.ribbon_backend import Morphism, TensorObj, make_backend, simple, tensor_word
from skeinlab.scalars import ScalarSeries
from skeinlab.suites import MOVE_KINDS, _apply_random_move
from skeinlab.tangle import (
    Cell,
    Strand,
    TangleWord,
    apply_move,
    compose,
    coupon_then_cross,
    identity_word,
    random_word,
    reparenthesize_coupon,
    rt_evaluate,
    tensor,
)

V1 = Strand(1, 1)
BACKENDS = [("classical", 1), ("epsilon", 2), ("quantum", 3), ("drinfeld", 3)]


def test_empty_word_is_identity_on_unit():
    cl = make_backend("classical")
    w = identity_word([])
    m = rt_evaluate(w, cl)
    assert m == Morphism.identity(tensor_word([]), cl.mode)


def test_single_braid_classical_is_flip():
    cl = make_backend("classical")
    w = TangleWord((V1, V1), ((Cell("braid+", 0),),), {})
    from skeinlab.ribbon_backend import flip_matrix

    V = simple(1)
    assert rt_evaluate(w, cl) == flip_matrix(V, V, cl.mode)


def test_reidemeister2_quantum():
    q = make_backend("quantum", 3)
    w = TangleWord((V1, V1), ((Cell("braid+", 0),), (Cell("braid-", 0),)), {})
    assert rt_evaluate(w, q) == Morphism.identity(tensor_word([simple(1), simple(1)]), q.mode)


def test_compose_functorial_and_tensor_monoidal():
    rng = random.Random(5)
    for name, order in BACKENDS:
        bk = make_backend(name, order)
        upper = random_word(rng, bk, n_strands=2, n_slices=2)
        lower = identity_word(upper.bottom)
        w = compose(upper, lower)
        assert rt_evaluate(w, bk) == rt_evaluate(upper, bk)
        # genuine stacking: evaluation is functorial
        lower2 = random_word(rng, bk, n_strands=2, n_slices=2)
        top = lower2.top
        if len(top) >= 2:
            cells = [Cell("braid+", 0)]
        elif len(top) == 1:
            cells = [Cell("twist+", 0)]
        else:
            cells = [Cell("cup", 0, label=1, flavor="l")]
        upper2 = TangleWord(top, (tuple(cells),), {})
        stacked = compose(upper2, lower2)
        assert rt_evaluate(stacked, bk) == rt_evaluate(upper2, bk) @ rt_evaluate(lower2, bk)
        left = random_word(rng, bk, n_strands=2, n_slices=2)
        right = random_word(rng, bk, n_strands=1, n_slices=2)
        joint = tensor(left, right)
        el, er = rt_evaluate(left, bk), rt_evaluate(right, bk)
        ej = rt_evaluate(joint, bk)
        raw = el.tensor(er)
        # juxtaposition agrees with the tensor up to the backend rebracketing
        from skeinlab.ribbon_backend import left_nested

        c_in = bk.coherence(left_nested(raw.source), raw.source)
        c_out = bk.coherence(raw.target, left_nested(raw.target))
        assert ej == c_out @ raw @ c_in, name


def test_eval_compose_braid_inverse():
    for name, order in BACKENDS:
        bk = make_backend(name, order)
        w = TangleWord((V1, V1), ((Cell("braid+", 0),), (Cell("braid-", 0),)), {})
        assert rt_evaluate(w, bk) == rt_evaluate(identity_word([V1, V1]), bk), name


def test_all_moves_all_backends():
    for name, order in BACKENDS:
        bk = make_backend(name, order)
        rng = random.Random(17)
        for kind in MOVE_KINDS:
            done = 0
            while done < 3:
                word = random_word(rng, bk, n_strands=2, n_slices=2)
                pair = _apply_random_move(word, kind, bk, rng)
                if pair is None:
                    continue
                before, after = pair
                assert rt_evaluate(before, bk) == rt_evaluate(after, bk), (name, kind)
                done += 1


def test_framed_r1_matches_twist():
    for name, order in BACKENDS:
        bk = make_backend(name, order)
        wt = TangleWord((V1,), ((Cell("twist+", 0),),), {})
        wc = apply_move(wt, "FramedR1", (0, 0))
        assert rt_evaluate(wt, bk) == rt_evaluate(wc, bk), name


def test_sphere_relation_torsion_defect():
    # the sphere relation morphism theta^2 - id is h-torsion, not zero
    for name in ("quantum", "drinfeld"):
        bk = make_backend(name, 2)
        sq = TangleWord((V1,), ((Cell("twist+", 0),), (Cell("twist+", 0),)), {})
        defect = rt_evaluate(sq, bk) - rt_evaluate(identity_word([V1]), bk)
        expected = Morphism.identity(simple(1), bk.mode).scale(
            ScalarSeries.from_coeffs(bk.mode, [0, "3/2"])
        )
        assert defect == expected, name
        assert not defect.is_zero


def test_reparenthesize_coupon_roundtrip():
    rng = random.Random(9)
    dr = make_backend("drinfeld", 3)
    V = simple(1)
    src_flat = tensor_word([V, V, V])
    m = dr.random_invariant(src_flat, src_flat, rng)
    w = TangleWord((V1, V1, V1), ((Cell("coupon", 0, coupon_id="c"),),), {"c": m})
    new_src = TensorObj(V, TensorObj(V, V))
    w2 = reparenthesize_coupon(w, "c", new_src, m.target, dr)
    assert rt_evaluate(w, dr) == rt_evaluate(w2, dr)
    assert w2.coupons["c"] != m  # the matrix genuinely changed
    w3 = reparenthesize_coupon(w2, "c", src_flat, m.target, dr)
    assert w3.coupons["c"] == m


def test_coupon_slide_move_error():
    w = identity_word([V1, V1])
    with pytest.raises(MoveError):
        apply_move(w, "CouponSlide", (0, 0))
    with pytest.raises(MoveError):
        apply_move(w, "R3", (0, "lr"))


def test_malformed_words():
    with pytest.raises(WordError):
        TangleWord((V1,), ((Cell("braid+", 0),),), {}).interfaces()
    with pytest.raises(WordError):
        TangleWord((V1, V1), ((Cell("cap", 0, label=1, flavor="l"),),), {}).interfaces()
    bad = TangleWord((V1,), ((Cell("coupon", 0, coupon_id="missing"),),), {})
    with pytest.raises(WordError):
        bad.interfaces()


def test_word_json_roundtrip():
    rng = random.Random(11)
    bk = make_backend("epsilon")
    w = random_word(rng, bk, n_strands=3, n_slices=4)
    data = w.to_json()
    w2 = TangleWord.from_json(data)
    assert w2.bottom == w.bottom and w2.slices == w.slices
    assert rt_evaluate(w, bk) == rt_evaluate(w2, bk)
    import json

    json.dumps(data)  # serializable


def test_r2_reduce_direction():
    w = identity_word([V1, V1])
    grown = apply_move(w, "R2", (0, 0, "insert"))
    back = apply_move(grown, "R2", (0, 0, "reduce"))
    assert back.slices == w.slices
