"""Circuit representation, timestep scheduling, and resource metrics.

A Circuit is an ordered gate list plus a schedule: a partition of the
gates into timesteps with pairwise-disjoint supports that preserves the
relative order of gates sharing a qubit. The default scheduler is a
deterministic greedy as-soon-as-possible pass; circuits whose source
diagram fixes the simultaneity explicitly can instead be built with
``from_timesteps``.

Resource conventions (published by this artifact, see README): depth is
the timestep count, KQ = qubit_budget x depth, n_2q counts CNOTs, and
n_1q counts single-qubit unitaries (H). IDLE, PREPZ and MEASZ are
counted in neither gate tally; IDLE slots exist solely as memory-noise
sites.
"""

from __future__ import annotations

from dataclasses import dataclass

from .pauli import CNOT, H_GATE, IDLE, MEASZ, PREPZ, CliffordGate, PauliString, conjugate_through


@dataclass(frozen=True)
class ResourceMetrics:
    depth: int
    kq: int
    n_1q: int
    n_2q: int


@dataclass(frozen=True)
class Circuit:
    """An ordered gate list partitioned into support-disjoint timesteps.

    ``timesteps`` holds tuples of indices into ``gates``; concatenating
    them in order recovers a topological order of the gate list.
    """

    register_size: int
    gates: tuple[CliffordGate, ...]
    timesteps: tuple[tuple[int, ...], ...]

    @property
    def depth(self) -> int:
        return len(self.timesteps)

    def kq(self, qubit_budget: int) -> int:
        if qubit_budget < self.register_size:
            raise ValueError(
                f"qubit budget {qubit_budget} below register size {self.register_size}"
            )
        return qubit_budget * self.depth

    def gate_counts(self) -> tuple[int, int]:
        """(n_1q, n_2q): single-qubit unitaries (H) and CNOTs."""
        n1 = sum(1 for g in self.gates if g.kind == H_GATE)
        n2 = sum(1 for g in self.gates if g.kind == CNOT)
        return n1, n2

    def metrics(self, qubit_budget: int) -> ResourceMetrics:
        n1, n2 = self.gate_counts()
        return ResourceMetrics(self.depth, self.kq(qubit_budget), n1, n2)

    def idle_slots(self) -> tuple[tuple[int, int], ...]:
        """(timestep, qubit) pairs where no gate acts; memory-noise sites."""
        slots = []
        for t, step in enumerate(self.timesteps):
            busy = 0
            for gi in step:
                for q in self.gates[gi].qubits:
                    busy |= 1 << q
            for q in range(self.register_size):
                if not (busy >> q) & 1:
                    slots.append((t, q))
        return tuple(slots)

    def scheduled_gates(self):
        """Yield (timestep, gate) in schedule order."""
        for t, step in enumerate(self.timesteps):
            for gi in step:
                yield t, self.gates[gi]

    def conjugate(self, s: PauliString) -> PauliString:
        """Propagate a Pauli string through the whole circuit, first gate first."""
        for g in self.gates:
            s = conjugate_through(g, s)
        return s

    def dump_text(self) -> str:
        """One gate per line (`H 3`, `CNOT 0 1`, `MEASZ 2`), in gate-list order."""
        return "\n".join(str(g) for g in self.gates)


def schedule(gates, register_size: int) -> Circuit:
    """Greedy ASAP schedule: each gate lands in the earliest timestep after
    every earlier gate that shares one of its qubits. Deterministic given
    the input order; support-disjointness within a timestep follows from
    the dependency rule.
    """
    gates = tuple(gates)
    for g in gates:
        for q in g.qubits:
            if q >= register_size:
                raise ValueError(f"gate {g} outside register of size {register_size}")
    ready = [0] * register_size  # first free timestep per qubit
    steps: list[list[int]] = []
    for gi, g in enumerate(gates):
        t = max(ready[q] for q in g.qubits)
        if t == len(steps):
            steps.append([])
        steps[t].append(gi)
        for q in g.qubits:
            ready[q] = t + 1
    return Circuit(register_size, gates, tuple(tuple(s) for s in steps))


def from_timesteps(timestep_gates, register_size: int) -> Circuit:
    """Build a circuit from an explicit timestep partition (e.g. a published
    diagram's columns). Validates disjoint supports within each timestep.
    """
    gates: list[CliffordGate] = []
    steps: list[tuple[int, ...]] = []
    for step in timestep_gates:
        busy: set[int] = set()
        indices = []
        for g in step:
            for q in g.qubits:
                if q >= register_size:
                    raise ValueError(f"gate {g} outside register of size {register_size}")
                if q in busy:
                    raise ValueError(f"support conflict on qubit {q} within a timestep")
                busy.add(q)
            indices.append(len(gates))
            gates.append(g)
        steps.append(tuple(indices))
    circ = Circuit(register_size, tuple(gates), tuple(steps))
    _check_dependency_order(circ)
    return circ


def _check_dependency_order(circ: Circuit) -> None:
    # Gates sharing a qubit must keep their list order across timesteps.
    last_step = {}
    for t, step in enumerate(circ.timesteps):
        for gi in step:
            for q in circ.gates[gi].qubits:
                if q in last_step and last_step[q] >= t:
                    raise ValueError("schedule violates gate dependencies")
        for gi in step:
            for q in circ.gates[gi].qubits:
                last_step[q] = t


def concat(a: Circuit, b: Circuit) -> Circuit:
    """Sequential composition, rescheduled ASAP."""
    if a.register_size != b.register_size:
        raise ValueError("register size mismatch in concat")
    return schedule(a.gates + b.gates, a.register_size)
