"""Phaseless Pauli algebra over bit-packed qubit registers.

A single Pauli is a 2-bit code (x, z): I=0, X=1, Z=2, Y=3, so that
phaseless multiplication is XOR. A PauliString packs one x-bit and one
z-bit per qubit into two Python ints, which keeps composition and
commutation checks O(register words) and makes million-trial Monte
Carlo runs tractable. Global phases are dropped throughout: every
circuit here is Clifford and every error Pauli, so phaseless frames are
exact for all tracked observables.
"""

from __future__ import annotations

from dataclasses import dataclass

I, X, Z, Y = 0, 1, 2, 3

PAULI_NAMES = "IXZY"
_NAME_TO_CODE = {"I": I, "X": X, "Z": Z, "Y": Y}


def mul(a: int, b: int) -> int:
    """Phaseless product of two single-qubit Paulis (self-inverse: mul(a, a) = I)."""
    return a ^ b


def pauli_name(a: int) -> str:
    return PAULI_NAMES[a]


def pauli_from_name(name: str) -> int:
    return _NAME_TO_CODE[name]


def anticommutes_1q(a: int, b: int) -> bool:
    """True iff single-qubit Paulis a and b anticommute."""
    ax, az = a & 1, a >> 1
    bx, bz = b & 1, b >> 1
    return bool((ax & bz) ^ (az & bx))


@dataclass(frozen=True)
class PauliString:
    """A Pauli operator on ``register_size`` qubits, bit-packed as (x, z) ints.

    Bit q of ``x`` is set iff the operator acts as X or Y on qubit q;
    bit q of ``z`` iff it acts as Z or Y.
    """

    register_size: int
    x: int = 0
    z: int = 0

    @classmethod
    def identity(cls, register_size: int) -> "PauliString":
        return cls(register_size)

    @classmethod
    def single(cls, register_size: int, qubit: int, pauli: int) -> "PauliString":
        if not 0 <= qubit < register_size:
            raise ValueError(f"qubit {qubit} outside register of size {register_size}")
        return cls(register_size, (pauli & 1) << qubit, (pauli >> 1) << qubit)

    @classmethod
    def from_text(cls, text: str) -> "PauliString":
        """Parse a left-to-right qubit-ordered string like 'IXZY'."""
        x = z = 0
        for q, ch in enumerate(text):
            code = _NAME_TO_CODE[ch]
            x |= (code & 1) << q
            z |= (code >> 1) << q
        return cls(len(text), x, z)

    def pauli_at(self, qubit: int) -> int:
        return ((self.x >> qubit) & 1) | (((self.z >> qubit) & 1) << 1)

    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    def compose(self, other: "PauliString") -> "PauliString":
        """Pointwise phaseless product; used to accumulate noise into a frame."""
        if self.register_size != other.register_size:
            raise ValueError("register size mismatch in compose")
        return PauliString(self.register_size, self.x ^ other.x, self.z ^ other.z)

    def anticommutes(self, other: "PauliString") -> bool:
        """Parity of per-qubit anticommuting positions."""
        if self.register_size != other.register_size:
            raise ValueError("register size mismatch in anticommutes")
        return bool(((self.x & other.z) ^ (self.z & other.x)).bit_count() & 1)

    def is_pure_x(self) -> bool:
        return self.z == 0 and self.x != 0

    def is_pure_z(self) -> bool:
        return self.x == 0 and self.z != 0

    def support_mask(self) -> int:
        return self.x | self.z

    def __str__(self) -> str:
        return "".join(PAULI_NAMES[self.pauli_at(q)] for q in range(self.register_size))


# Gate kinds. PREPZ and MEASZ act as the identity on Pauli frames; they exist
# so circuits can carry preparation/readout structure and so the noise model
# knows where measurement errors strike.
H_GATE = "H"
CNOT = "CNOT"
IDLE = "IDLE"
PREPZ = "PREPZ"
MEASZ = "MEASZ"

_ONE_QUBIT_KINDS = {H_GATE, IDLE, PREPZ, MEASZ}


@dataclass(frozen=True)
class CliffordGate:
    """One of H(q), CNOT(control, target), IDLE(q), PREPZ(q), MEASZ(q)."""

    kind: str
    qubits: tuple[int, ...]

    def __post_init__(self):
        if self.kind == CNOT:
            if len(self.qubits) != 2 or self.qubits[0] == self.qubits[1]:
                raise ValueError(f"CNOT needs two distinct qubits, got {self.qubits}")
        elif self.kind in _ONE_QUBIT_KINDS:
            if len(self.qubits) != 1:
                raise ValueError(f"{self.kind} takes one qubit, got {self.qubits}")
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")

    @property
    def support(self) -> tuple[int, ...]:
        return self.qubits

    def __str__(self) -> str:
        return " ".join([self.kind, *map(str, self.qubits)])


def gate(kind: str, *qubits: int) -> CliffordGate:
    return CliffordGate(kind, tuple(qubits))


def conjugate_through(g: CliffordGate, s: PauliString) -> PauliString:
    """Heisenberg-propagate s through g (returns g·s·g^-1 up to phase).

    H swaps X and Z on its qubit; CNOT maps X_c -> X_c X_t and
    Z_t -> Z_c Z_t; IDLE/PREPZ/MEASZ leave the string unchanged.
    """
    for q in g.qubits:
        if q >= s.register_size:
            raise ValueError(f"gate {g} outside register of size {s.register_size}")
    x, z = s.x, s.z
    if g.kind == H_GATE:
        q = g.qubits[0]
        m = (((x >> q) & 1) ^ ((z >> q) & 1)) << q
        x ^= m
        z ^= m
    elif g.kind == CNOT:
        c, t = g.qubits
        x ^= ((x >> c) & 1) << t
        z ^= ((z >> t) & 1) << c
    return PauliString(s.register_size, x, z)


def conjugate_through_all(gates, s: PauliString) -> PauliString:
    """Propagate s through a gate sequence, first gate first."""
    for g in gates:
        s = conjugate_through(g, s)
    return s
