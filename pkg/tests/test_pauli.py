import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hetbell.pauli import (
    CNOT,
    H_GATE,
    I,
    IDLE,
    MEASZ,
    PREPZ,
    X,
    Y,
    Z,
    CliffordGate,
    PauliString,
    anticommutes_1q,
    conjugate_through,
    conjugate_through_all,
    gate,
    mul,
)


@pytest.mark.parametrize(
    "a,b,expected",
    [(X, X, I), (X, Z, Y), (Y, Z, X), (Z, Z, I), (Y, Y, I), (I, X, X), (X, I, X)],
)
def test_mul(a, b, expected):
    assert mul(a, b) == expected


def test_mul_self_inverse():
    for a in (I, X, Y, Z):
        assert mul(a, a) == I
        assert mul(a, I) == a


def test_anticommutes_single():
    assert anticommutes_1q(X, Z)
    assert anticommutes_1q(X, Y)
    assert not anticommutes_1q(X, X)
    assert not anticommutes_1q(I, Z)


def test_string_anticommutes_examples():
    n = 2
    x0 = PauliString.single(n, 0, X)
    z0 = PauliString.single(n, 0, Z)
    z1 = PauliString.single(n, 1, Z)
    assert x0.anticommutes(z0)
    # two anticommuting positions cancel
    xx = PauliString.from_text("XX")
    zz = PauliString.from_text("ZZ")
    assert not xx.anticommutes(zz)
    # disjoint supports commute
    assert not x0.anticommutes(z1)


def test_compose_examples():
    n = 2
    x0 = PauliString.single(n, 0, X)
    z0 = PauliString.single(n, 0, Z)
    z1 = PauliString.single(n, 1, Z)
    assert x0.compose(x0) == PauliString.identity(n)
    assert x0.compose(z0) == PauliString.single(n, 0, Y)
    assert x0.compose(z1) == PauliString.from_text("XZ")


def test_weight():
    assert PauliString.identity(5).weight() == 0
    assert PauliString.from_text("IXYZI").weight() == 3


def test_size_mismatch_raises():
    with pytest.raises(ValueError):
        PauliString.identity(2).compose(PauliString.identity(3))
    with pytest.raises(ValueError):
        PauliString.identity(2).anticommutes(PauliString.identity(3))


@pytest.mark.parametrize(
    "g,before,after",
    [
        (gate(H_GATE, 0), "X", "Z"),
        (gate(H_GATE, 0), "Z", "X"),
        (gate(H_GATE, 0), "Y", "Y"),
        (gate(CNOT, 0, 1), "XI", "XX"),
        (gate(CNOT, 0, 1), "IZ", "ZZ"),
        (gate(CNOT, 0, 1), "IX", "IX"),
        (gate(CNOT, 0, 1), "ZI", "ZI"),
        (gate(IDLE, 0), "Y", "Y"),
        (gate(PREPZ, 0), "X", "X"),
        (gate(MEASZ, 0), "Z", "Z"),
    ],
)
def test_conjugation_rules(g, before, after):
    assert conjugate_through(g, PauliString.from_text(before)) == PauliString.from_text(after)


def test_cnot_needs_distinct_qubits():
    with pytest.raises(ValueError):
        gate(CNOT, 1, 1)
    with pytest.raises(ValueError):
        CliffordGate("SWAP", (0, 1))


_paulis = st.integers(min_value=0, max_value=3)


def _strings(n):
    return st.lists(_paulis, min_size=n, max_size=n).map(
        lambda ps: PauliString(
            len(ps),
            sum((p & 1) << q for q, p in enumerate(ps)),
            sum((p >> 1) << q for q, p in enumerate(ps)),
        )
    )


def _gates(n):
    one_q = st.sampled_from([H_GATE, IDLE, PREPZ, MEASZ]).flatmap(
        lambda k: st.integers(0, n - 1).map(lambda q: gate(k, q))
    )
    two_q = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(
        lambda ct: ct[0] != ct[1]
    ).map(lambda ct: gate(CNOT, *ct))
    return st.one_of(one_q, two_q)


@settings(max_examples=200, deadline=None)
@given(_gates(4), _strings(4), _strings(4))
def test_conjugation_preserves_commutation(g, a, b):
    ca = conjugate_through(g, a)
    cb = conjugate_through(g, b)
    assert ca.anticommutes(cb) == a.anticommutes(b)


@settings(max_examples=200, deadline=None)
@given(_gates(4), _strings(4))
def test_h_and_cnot_are_involutions(g, s):
    assert conjugate_through(g, conjugate_through(g, s)) == s


@settings(max_examples=200, deadline=None)
@given(_gates(4), _strings(4))
def test_weight_change_bounds(g, s):
    w0 = s.weight()
    w1 = conjugate_through(g, s).weight()
    if g.kind == CNOT:
        assert abs(w1 - w0) <= 1
    else:
        assert w1 == w0


@settings(max_examples=100, deadline=None)
@given(st.lists(_gates(4), max_size=12), _strings(4), _strings(4))
def test_conjugation_is_homomorphism(gates, a, b):
    lhs = conjugate_through_all(gates, a.compose(b))
    rhs = conjugate_through_all(gates, a).compose(conjugate_through_all(gates, b))
    assert lhs == rhs
