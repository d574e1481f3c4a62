import pytest

from graphalg.errors import DuplicateName
from graphalg.ranked import RankedMap, check_rank_preserving, make_alphabet


def test_single_binary_symbol():
    a = make_alphabet([("edge", 2)])
    assert a.names() == ("edge",)
    assert a.arity("edge") == 2


def test_empty_alphabet():
    a = make_alphabet([])
    assert len(a) == 0
    assert a.max_arity() == 0


def test_duplicate_name_rejected():
    with pytest.raises(DuplicateName):
        make_alphabet([("a", 1), ("a", 2)])


def test_enumeration_order_is_declaration_order():
    a = make_alphabet([("z", 0), ("a", 1), ("m", 2)])
    assert a.names() == ("z", "a", "m")


def test_identity_map_is_rank_preserving():
    a = make_alphabet([("a", 1), ("b", 2)])
    assert check_rank_preserving(RankedMap.identity(a))


def test_arity_changing_map_rejected():
    a = make_alphabet([("a", 2)])
    b = make_alphabet([("u", 1)])
    m = RankedMap.from_dict(a, b, {"a": "u"})
    assert not check_rank_preserving(m)


def test_partial_map_rejected():
    a = make_alphabet([("a", 1), ("b", 1)])
    b = make_alphabet([("u", 1)])
    m = RankedMap.from_dict(a, b, {"a": "u"})
    assert not check_rank_preserving(m)


def test_compose_maps():
    a = make_alphabet([("a", 1)])
    b = make_alphabet([("u", 1)])
    c = make_alphabet([("x", 1)])
    f = RankedMap.from_dict(a, b, {"a": "u"})
    g = RankedMap.from_dict(b, c, {"u": "x"})
    assert f.compose(g)("a") == "x"
