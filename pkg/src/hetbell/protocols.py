"""The purification primitive and the Bell-pair preparation schemes.

State per in-flight pair: two bit-packed Pauli frames (one per block), the
current code binding of each block, and how many transversal-Hadamard
layers that binding has absorbed. Frames are the literal physical error on
the ideal pair at every point, so all circuit action is mechanical frame
conjugation.

One purification round is a three-timestep circuit: a transversal CNOT
from the kept pair's blocks onto the sacrificed pair's co-located blocks;
a transversal Z-basis measurement of the sacrificed blocks, during which
the kept blocks idle and accrue memory noise; then a transversal Hadamard
on the kept blocks. The logical readout of a measured block is the flip
parity on the support of whichever logical operator is pure-Z in its
current binding (the binding rotates with each Hadamard layer, which is
what alternates the protected axis between rounds). The first round
therefore compares the Z-like parity and suppresses X-type errors; the
trailing Hadamard relabels the axes so the residual shows up under the
opposite name, reproducing the published stair-step. An optional
``first_round_basis="x"`` rotation layer before the first round is exposed
for sensitivity checks.

Strict post-selection additionally requires every classically computable
stabilizer parity of the measured blocks (the pure-Z generators of the
current binding) to be even.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .circuits import Circuit
from .codes import PHYSICAL, StabilizerCode, physical_code, transversal_h_variant
from .noise import LayerSampler, NoiseModel, RawBellDistribution, RngStream, STANDARD_SOURCE
from .pauli import CNOT as _CNOT, H_GATE as _H, X as _X, Z as _Z, PauliString, conjugate_through_all

# Scheme identifiers (CLI spelling).
BASELINE = "baseline"
BEFORE = "before"
AFTER = "after"
STRICT = "strict"
SCHEMES = (BASELINE, BEFORE, AFTER, STRICT)

SUCCESS = "success"
PARITY_FAIL = "parity_fail"
POSTSELECT_FAIL = "postselect_fail"


@dataclass(slots=True)
class ResourceLedger:
    """Non-decreasing resource counters; survives restarts (failed attempts'
    costs are retained and folded into the eventual output pair)."""

    raw_pairs: int = 0
    kq: int = 0
    n_1q: int = 0
    n_2q: int = 0

    def add(self, other: "ResourceLedger") -> None:
        self.raw_pairs += other.raw_pairs
        self.kq += other.kq
        self.n_1q += other.n_1q
        self.n_2q += other.n_2q

    def add_costs(self, raw_pairs: int = 0, kq: int = 0, n_1q: int = 0, n_2q: int = 0) -> None:
        self.raw_pairs += raw_pairs
        self.kq += kq
        self.n_1q += n_1q
        self.n_2q += n_2q

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.raw_pairs, self.kq, self.n_1q, self.n_2q)


@dataclass(slots=True)
class PairState:
    """One in-flight Bell pair: per-block frames, bindings, H-layer parity.

    ``x_a``/``z_a`` hold the frame on node A's block, bit q = physical
    qubit q of that block; likewise for node B. ``parity_a`` counts
    transversal-H layers absorbed by block A since its binding was
    established (encoding rebinds and resets it).
    """

    code_a: StabilizerCode
    code_b: StabilizerCode
    x_a: int = 0
    z_a: int = 0
    x_b: int = 0
    z_b: int = 0
    parity_a: int = 0
    parity_b: int = 0
    level: int = 0
    ledger: ResourceLedger = field(default_factory=ResourceLedger)

    @property
    def basis_parity(self) -> int:
        return self.parity_a

    def frame(self) -> PauliString:
        """The combined frame over block A then block B (for inspection)."""
        na = self.code_a.n
        return PauliString(
            na + self.code_b.n,
            self.x_a | (self.x_b << na),
            self.z_a | (self.z_b << na),
        )


@dataclass(frozen=True)
class PurifyOutcome:
    status: str  # SUCCESS, PARITY_FAIL or POSTSELECT_FAIL
    pair: PairState | None


class TrialStats:
    """Optional per-trial purification bookkeeping: attempt and success
    counts indexed by the level being built (1..max_level)."""

    __slots__ = ("attempts", "successes")

    def __init__(self, max_level: int):
        self.attempts = [0] * (max_level + 1)
        self.successes = [0] * (max_level + 1)

    def record(self, level: int, success: bool) -> None:
        self.attempts[level] += 1
        if success:
            self.successes[level] += 1


@dataclass(slots=True)
class TrialContext:
    """Everything one trial needs: its private RNG stream, the noise model
    with cached layer samplers, the raw-pair source, and knobs."""

    rng: RngStream
    noise: NoiseModel
    sampler: LayerSampler
    source: RawBellDistribution = STANDARD_SOURCE
    postselect_mode: str = "measured"  # or "oracle_all"
    first_round_basis: str = "z"  # "z" (as drawn) or "x" (rotate before round 1)
    stats: TrialStats | None = None


def make_context(
    rng: RngStream,
    noise: NoiseModel,
    source: RawBellDistribution = STANDARD_SOURCE,
    postselect_mode: str = "measured",
    first_round_basis: str = "z",
    stats: TrialStats | None = None,
) -> TrialContext:
    return TrialContext(rng, noise, LayerSampler(noise.p), source, postselect_mode, first_round_basis, stats)


# --------------------------------------------------------------------------
# Noisy encoder replay.
#
# Replaying an encoder for every pair gate-by-gate is wasteful: the incoming
# frame is a single Pauli on the input wire (the block is physical before
# encoding), and error injection is linear. We precompute, per code, the
# end-of-circuit image of every possible injection: the input-wire Pauli
# conjugated through the whole circuit, and X/Z injected after each noise
# site conjugated through the remainder. A replay is then one table lookup
# plus one binomial count per site class.
# --------------------------------------------------------------------------


class _EncoderReplay:
    __slots__ = (
        "n",
        "input_images",
        "one_q_images",
        "two_q_images",
        "kq",
        "n_1q",
        "n_2q",
    )

    def __init__(self, circuit: Circuit, input_wire: int, kq_budget: int):
        self.n = circuit.register_size
        steps = [list(circuit.gates[i] for i in step) for step in circuit.timesteps]

        def image_after(t: int, qubit: int, pauli: int) -> tuple[int, int]:
            s = PauliString.single(self.n, qubit, pauli)
            for step in steps[t + 1 :]:
                s = conjugate_through_all(step, s)
            return s.x, s.z

        # Single-qubit noise sites: one per H gate, one per idle slot; each
        # stores the circuit-end image of X and of Z injected there.
        one_q: list[tuple[int, int, int, int]] = []
        two_q: list[tuple[int, int, int, int, int, int, int, int]] = []
        for t, step in enumerate(steps):
            for g in step:
                if g.kind == _H:
                    xx, xz = image_after(t, g.qubits[0], _X)
                    zx, zz = image_after(t, g.qubits[0], _Z)
                    one_q.append((xx, xz, zx, zz))
                elif g.kind == _CNOT:
                    c, tq = g.qubits
                    cxx, cxz = image_after(t, c, _X)
                    czx, czz = image_after(t, c, _Z)
                    txx, txz = image_after(t, tq, _X)
                    tzx, tzz = image_after(t, tq, _Z)
                    two_q.append((cxx, cxz, czx, czz, txx, txz, tzx, tzz))
        for t, q in circuit.idle_slots():
            xx, xz = image_after(t, q, _X)
            zx, zz = image_after(t, q, _Z)
            one_q.append((xx, xz, zx, zz))
        self.one_q_images = tuple(one_q)
        self.two_q_images = tuple(two_q)

        self.input_images = []
        for p in range(4):
            s = PauliString.single(self.n, input_wire, p) if p else PauliString.identity(self.n)
            s = circuit.conjugate(s)
            self.input_images.append((s.x, s.z))

        n1, n2 = circuit.gate_counts()
        self.kq = circuit.kq(kq_budget)
        self.n_1q = n1
        self.n_2q = n2


_replay_cache: dict[StabilizerCode, _EncoderReplay] = {}


def _replay_for(code: StabilizerCode) -> _EncoderReplay:
    rep = _replay_cache.get(code)
    if rep is None:
        if code.encoder is None:
            raise ValueError(f"code {code.name} has no encoder circuit")
        rep = _EncoderReplay(code.encoder, code.input_wire, code.kq_budget)
        _replay_cache[code] = rep
    return rep


def make_raw_pair(ctx: TrialContext) -> PairState:
    """Fresh physical Bell pair; the sampled error sits on the B half."""
    p = ctx.source.sample(ctx.rng)
    pair = PairState(physical_code(), physical_code())
    pair.x_b = p & 1
    pair.z_b = p >> 1
    pair.ledger.add_costs(raw_pairs=1)
    return pair


def encode_half(ctx: TrialContext, pair: PairState, side: str, code: StabilizerCode) -> PairState:
    """Encode one (currently physical) half into ``code``.

    Replays the encoder with circuit-level noise while conjugating the
    existing single-qubit frame through it, rebinds the side, and adds the
    encoder's KQ and gate counts to the ledger.
    """
    if side not in ("a", "b"):
        raise ValueError(f"side must be 'a' or 'b', got {side!r}")
    current = pair.code_a if side == "a" else pair.code_b
    if current.name != PHYSICAL:
        raise ValueError(f"side {side} is already encoded ({current.name})")
    rep = _replay_for(code)
    rng = ctx.rng
    old = (pair.x_a | (pair.z_a << 1)) if side == "a" else (pair.x_b | (pair.z_b << 1))
    x, z = rep.input_images[old]
    for s in ctx.sampler.sample_sites(rng, len(rep.two_q_images)):
        cxx, cxz, czx, czz, txx, txz, tzx, tzz = rep.two_q_images[s]
        k = 1 + rng.below(15)
        pc, pt = k >> 2, k & 3
        if pc & 1:
            x ^= cxx
            z ^= cxz
        if pc & 2:
            x ^= czx
            z ^= czz
        if pt & 1:
            x ^= txx
            z ^= txz
        if pt & 2:
            x ^= tzx
            z ^= tzz
    for s in ctx.sampler.sample_sites(rng, len(rep.one_q_images)):
        xx, xz, zx, zz = rep.one_q_images[s]
        p = 1 + rng.below(3)
        if p & 1:
            x ^= xx
            z ^= xz
        if p & 2:
            x ^= zx
            z ^= zz
    if side == "a":
        pair.code_a, pair.x_a, pair.z_a, pair.parity_a = code, x, z, 0
    else:
        pair.code_b, pair.x_b, pair.z_b, pair.parity_b = code, x, z, 0
    pair.ledger.add_costs(kq=rep.kq, n_1q=rep.n_1q, n_2q=rep.n_2q)
    return pair


def _parity(mask: int) -> int:
    return mask.bit_count() & 1


def _apply_h_layer(ctx: TrialContext, pair: PairState) -> None:
    """Transversal H on both blocks: swap frame axes, inject 1q noise after
    the gates, rotate bindings, count the layer's resources."""
    na, nb = pair.code_a.n, pair.code_b.n
    pair.x_a, pair.z_a = pair.z_a, pair.x_a
    pair.x_b, pair.z_b = pair.z_b, pair.x_b
    rng = ctx.rng
    for s in ctx.sampler.sample_sites(rng, na + nb):
        p = 1 + rng.below(3)
        if s < na:
            bit = 1 << s
            pair.x_a ^= bit * (p & 1)
            pair.z_a ^= bit * (p >> 1)
        else:
            bit = 1 << (s - na)
            pair.x_b ^= bit * (p & 1)
            pair.z_b ^= bit * (p >> 1)
    pair.code_a = transversal_h_variant(pair.code_a)
    pair.code_b = transversal_h_variant(pair.code_b)
    pair.parity_a ^= 1
    pair.parity_b ^= 1
    pair.ledger.add_costs(kq=pair.code_a.kq_budget + pair.code_b.kq_budget, n_1q=na + nb)


def purify_once(
    ctx: TrialContext,
    kept: PairState,
    sacrificed: PairState,
    strict: bool,
) -> PurifyOutcome:
    """One purification round (Fig.-style circuit) consuming ``sacrificed``.

    The sacrificed pair's ledger and the round's own costs are merged into
    the kept pair's ledger whatever the outcome, so a failed attempt's
    costs can be carried forward by the caller.
    """
    if kept.code_a is not sacrificed.code_a or kept.code_b is not sacrificed.code_b:
        raise ValueError("purify_once requires identical code bindings")
    if kept.parity_a != sacrificed.parity_a or kept.parity_b != sacrificed.parity_b:
        raise ValueError("purify_once requires identical basis parities")
    if kept.level != sacrificed.level:
        raise ValueError("purify_once requires pairs of the same purification level")
    code_a, code_b = kept.code_a, kept.code_b
    na, nb = code_a.n, code_b.n
    rng = ctx.rng
    noise = ctx.noise

    # Transversal CNOT, kept (control) -> sacrificed (target), both nodes.
    sacrificed.x_a ^= kept.x_a
    kept.z_a ^= sacrificed.z_a
    sacrificed.x_b ^= kept.x_b
    kept.z_b ^= sacrificed.z_b
    for s in ctx.sampler.sample_sites(rng, na + nb):
        k = 1 + rng.below(15)
        pc, pt = k >> 2, k & 3
        if s < na:
            bit = 1 << s
            kept.x_a ^= bit * (pc & 1)
            kept.z_a ^= bit * (pc >> 1)
            sacrificed.x_a ^= bit * (pt & 1)
            sacrificed.z_a ^= bit * (pt >> 1)
        else:
            bit = 1 << (s - na)
            kept.x_b ^= bit * (pc & 1)
            kept.z_b ^= bit * (pc >> 1)
            sacrificed.x_b ^= bit * (pt & 1)
            sacrificed.z_b ^= bit * (pt >> 1)

    # Transversal Z measurement of the sacrificed blocks; noise strikes just
    # before readout. Outcome flips relative to ideal are the X components.
    flip_a = flip_b = 0
    if noise.meas_mode == "pauli":
        for s in ctx.sampler.sample_sites(rng, na + nb):
            p = 1 + rng.below(3)
            if s < na:
                bit = 1 << s
                sacrificed.x_a ^= bit * (p & 1)
                sacrificed.z_a ^= bit * (p >> 1)
            else:
                bit = 1 << (s - na)
                sacrificed.x_b ^= bit * (p & 1)
                sacrificed.z_b ^= bit * (p >> 1)
    else:
        for s in ctx.sampler.sample_sites(rng, na + nb):
            if s < na:
                flip_a ^= 1 << s
            else:
                flip_b ^= 1 << (s - na)
    flip_a ^= sacrificed.x_a
    flip_b ^= sacrificed.x_b

    level = kept.level + 1
    kept.ledger.add(sacrificed.ledger)
    kept.ledger.add_costs(kq=6 * (code_a.kq_budget + code_b.kq_budget), n_1q=na + nb, n_2q=na + nb)

    # Compare the two nodes' logical readouts; the ideal (random but
    # correlated) part cancels in the parity.
    par = _parity(flip_a & code_a.measured_z_logical_mask) ^ _parity(
        flip_b & code_b.measured_z_logical_mask
    )
    if par:
        if ctx.stats is not None:
            ctx.stats.record(level, False)
        return PurifyOutcome(PARITY_FAIL, None)

    if strict:
        fail = any(_parity(flip_a & m) for m in code_a.pure_z_generator_masks) or any(
            _parity(flip_b & m) for m in code_b.pure_z_generator_masks
        )
        if not fail and ctx.postselect_mode == "oracle_all":
            fail = (
                code_a.syndrome_int(sacrificed.x_a, sacrificed.z_a) != 0
                or code_b.syndrome_int(sacrificed.x_b, sacrificed.z_b) != 0
            )
        if fail:
            if ctx.stats is not None:
                ctx.stats.record(level, False)
            return PurifyOutcome(POSTSELECT_FAIL, None)

    # Success: memory noise on the kept blocks for the measurement timestep
    # they idled through, then the transversal H that exchanges the axes for
    # the next round. (On failure everything is discarded, so the idle and
    # H draws on a dead pair are skipped; only the ledger records them.)
    na_nb = na + nb
    for s in ctx.sampler.sample_sites(rng, na_nb):
        p = 1 + rng.below(3)
        if s < na:
            bit = 1 << s
            kept.x_a ^= bit * (p & 1)
            kept.z_a ^= bit * (p >> 1)
        else:
            bit = 1 << (s - na)
            kept.x_b ^= bit * (p & 1)
            kept.z_b ^= bit * (p >> 1)
    kept.x_a, kept.z_a = kept.z_a, kept.x_a
    kept.x_b, kept.z_b = kept.z_b, kept.x_b
    for s in ctx.sampler.sample_sites(rng, na_nb):
        p = 1 + rng.below(3)
        if s < na:
            bit = 1 << s
            kept.x_a ^= bit * (p & 1)
            kept.z_a ^= bit * (p >> 1)
        else:
            bit = 1 << (s - na)
            kept.x_b ^= bit * (p & 1)
            kept.z_b ^= bit * (p >> 1)
    kept.code_a = transversal_h_variant(code_a)
    kept.code_b = transversal_h_variant(code_b)
    kept.parity_a ^= 1
    kept.parity_b ^= 1
    kept.level = level
    if ctx.stats is not None:
        ctx.stats.record(level, True)
    return PurifyOutcome(SUCCESS, kept)


def build_pair(
    ctx: TrialContext,
    scheme: str,
    rounds: int,
    code_a: StabilizerCode,
    code_b: StabilizerCode,
) -> PairState:
    """Nested symmetric purification to the requested depth.

    A level-k pair consumes two level-(k-1) pairs; on any failure both
    inputs are discarded and rebuilt from scratch, with all sunk costs
    retained in the eventual output's ledger.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    if rounds < 0:
        raise ValueError("rounds must be >= 0")
    if scheme == BASELINE and (code_a.name != PHYSICAL or code_b.name != PHYSICAL):
        raise ValueError("baseline scheme requires physical code on both sides")
    encode_first = scheme in (AFTER, STRICT)
    strict = scheme == STRICT
    rotate_first = ctx.first_round_basis == "x" and rounds > 0

    def base() -> PairState:
        pair = make_raw_pair(ctx)
        if encode_first:
            if code_a.name != PHYSICAL:
                encode_half(ctx, pair, "a", code_a)
            if code_b.name != PHYSICAL:
                encode_half(ctx, pair, "b", code_b)
        if rotate_first:
            _apply_h_layer(ctx, pair)
        return pair

    def level(k: int) -> PairState:
        if k == 0:
            return base()
        sunk = ResourceLedger()
        while True:
            kept = level(k - 1)
            sac = level(k - 1)
            out = purify_once(ctx, kept, sac, strict)
            if out.status == SUCCESS:
                out.pair.ledger.add(sunk)
                return out.pair
            sunk.add(kept.ledger)  # includes sac's ledger and the round costs

    pair = level(rounds)
    if scheme == BEFORE:
        if code_a.name != PHYSICAL:
            encode_half(ctx, pair, "a", code_a)
        if code_b.name != PHYSICAL:
            encode_half(ctx, pair, "b", code_b)
    return pair


def final_evaluate(pair: PairState, unrotate: bool = False) -> tuple[int, int]:
    """Perfect syndrome extraction, lookup correction, and residual logical
    classification of both blocks.

    Returns (x_error, z_error): same-side-correlated logicals cancel
    because X(x)X and Z(x)Z stabilize the target Bell state. Labels follow
    the physical axes: a block whose binding has absorbed an odd number of
    Hadamard layers reports its classes with X and Z exchanged (the
    published relabeling convention). ``unrotate=True`` instead reports
    classes in the rotated (current-binding) axes.
    """

    def block_class(code: StabilizerCode, ex: int, ez: int, parity: int) -> tuple[int, int]:
        corr = code.decoder_table[code.syndrome_int(ex, ez)]
        rx = ex ^ corr.x
        rz = ez ^ corr.z
        lz = code.logical_z
        lx = code.logical_x
        xc = ((rx & lz.z) ^ (rz & lz.x)).bit_count() & 1
        zc = ((rx & lx.z) ^ (rz & lx.x)).bit_count() & 1
        if parity and not unrotate:
            xc, zc = zc, xc
        return xc, zc

    xa, za = block_class(pair.code_a, pair.x_a, pair.z_a, pair.parity_a)
    xb, zb = block_class(pair.code_b, pair.x_b, pair.z_b, pair.parity_b)
    return xa ^ xb, za ^ zb
