import pytest

from homfill.backends import FreeAbelianBackend
from homfill.errors import DomainError, ParseError
from homfill.presentation import (
    AutLift,
    HomPresentation,
    Presentation,
    apply_lift,
    build_extension_presentation,
    parse_presentation_text,
    validate_lift,
)
from homfill.words import format_word, parse_word

NI = {"a": 0, "b": 1}


def test_presentation_rejects_unreduced_relator():
    with pytest.raises(DomainError):
        Presentation(("a", "b"), ((1, -1),))
    with pytest.raises(DomainError):
        Presentation(("a", "b"), ((1, 2, -1),))  # cyclic seam cancellation


def test_presentation_rejects_duplicate_generators():
    with pytest.raises(DomainError):
        Presentation(("a", "a"), ())


def test_short_relators_accepted():
    # monogons and bigons are allowed
    Presentation(("a",), ((1,),))
    Presentation(("a", "b"), ((1, 2),))


def test_marked_relators_range():
    pres = Presentation(("a", "b"), (parse_word("a b a' b'", NI),))
    with pytest.raises(DomainError):
        HomPresentation(pres, (1,))
    with pytest.raises(DomainError):
        HomPresentation(pres, ())
    assert HomPresentation.mark_all(pres).marked_relators == (0,)


def test_empty_marked_ok_for_free():
    HomPresentation(Presentation(("a", "b"), ()), ())


def test_apply_lift_examples():
    lift = AutLift(((1, 2), (2,)), ((1, -2), (2,)))
    assert apply_lift(lift, "forward", (1,)) == (1, 2)
    assert apply_lift(lift, "forward", (2, -1)) == (-1,)
    ident = AutLift.identity(2)
    assert apply_lift(ident, "forward", (1, 2, -2, -1, 1)) == (1,)


def test_lift_validation():
    bk = FreeAbelianBackend(2)
    good = AutLift(((1, 2), (2,)), ((1, -2), (2,)))
    validate_lift(good, bk.normal_form)
    bad = AutLift(((1, 2), (2,)), ((1,), (2,)))
    with pytest.raises(DomainError, match="generator index 1"):
        validate_lift(bad, bk.normal_form)


def test_extension_presentation_identity():
    pres = HomPresentation.mark_all(Presentation(("a", "b"), (parse_word("a b a' b'", NI),)))
    hom, layout = build_extension_presentation(pres, [AutLift.identity(2)])
    assert hom.generators == ("a", "b", "t1")
    rendered = [format_word(r, hom.generators) for r in hom.base.relators]
    assert rendered == ["a b a' b'", "t1' a t1 a'", "t1' b t1 b'"]
    assert layout.k_relator_count == 1
    assert layout.conj_info(1) == (0, 0)
    assert layout.conj_info(2) == (0, 1)


def test_extension_presentation_shear():
    pres = HomPresentation.mark_all(Presentation(("a", "b"), (parse_word("a b a' b'", NI),)))
    lift = AutLift(((1, 2), (2,)), ((1, -2), (2,)))
    hom, _ = build_extension_presentation(pres, [lift])
    rendered = [format_word(r, hom.generators) for r in hom.base.relators]
    assert "t1' a t1 b' a'" in rendered


def test_extension_relator_count():
    pres = HomPresentation.mark_all(Presentation(("a", "b"), (parse_word("a b a' b'", NI),)))
    hom, _ = build_extension_presentation(pres, [AutLift.identity(2), AutLift.identity(2, 1)])
    assert len(hom.base.relators) == 1 + 2 * 2
    assert hom.generators == ("a", "b", "t1", "t2")


def test_extension_two_identity_lifts_on_free_kernel():
    pres = HomPresentation(Presentation(("a",), ()), ())
    hom, _ = build_extension_presentation(pres, [AutLift.identity(1), AutLift.identity(1, 1)])
    rendered = [format_word(r, hom.generators) for r in hom.base.relators]
    assert rendered == ["t1' a t1 a'", "t2' a t2 a'"]


def test_extension_rejects_bad_lift():
    pres = HomPresentation.mark_all(Presentation(("a", "b"), (parse_word("a b a' b'", NI),)))
    bk = FreeAbelianBackend(2)
    bad = AutLift(((1, 2), (2,)), ((1,), (2,)))
    with pytest.raises(DomainError):
        build_extension_presentation(pres, [bad], k_normal_form=bk.normal_form)


def test_every_relator_cyclically_reduced_property(z2_pres):
    from homfill.words import cyclic_reduce

    hom, _ = build_extension_presentation(
        z2_pres, [AutLift(((1, 2), (2,)), ((1, -2), (2,)))]
    )
    for r in hom.base.relators:
        assert cyclic_reduce(r) == r


def test_lift_roundtrip_on_short_words():
    from hypothesis import given, settings
    from hypothesis import strategies as st

    bk = FreeAbelianBackend(2)
    lift = AutLift(((1, 2), (2,)), ((1, -2), (2,)))

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.sampled_from([1, -1, 2, -2]), max_size=6))
    def check(letters):
        w = tuple(letters)
        round_trip = apply_lift(lift, "backward", apply_lift(lift, "forward", w))
        assert bk.normal_form(round_trip) == bk.normal_form(w)
        round_trip2 = apply_lift(lift, "forward", apply_lift(lift, "backward", w))
        assert bk.normal_form(round_trip2) == bk.normal_form(w)

    check()


def test_parse_presentation_text_roundtrip():
    pf = parse_presentation_text(
        """
        backend: extension
        k-backend: free_abelian
        generators: a b
        relator: a b a' b'   # commutator
        lift t1: a -> a b ; b -> b
        lift t1 inverse: a -> a b' ; b -> b
        """
    )
    assert pf.backend_kind == "extension"
    assert pf.k_backend_kind == "free_abelian"
    assert pf.generators == ("a", "b")
    assert pf.lifts[0].forward == ((1, 2), (2,))
    assert pf.stable_names == ("t1",)


def test_parse_rejects_unknown_token():
    with pytest.raises(ParseError) as err:
        parse_presentation_text("backend: free\ngenerators: a\nfrobnicate: yes\n")
    assert err.value.line == 3
    assert err.value.column is not None


def test_parse_rejects_half_lift():
    with pytest.raises(ParseError, match="forward and an inverse"):
        parse_presentation_text(
            "backend: extension\nk-backend: free\ngenerators: a\nlift t1: a -> a\n"
        )
