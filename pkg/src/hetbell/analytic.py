"""Closed-form purification formulas for cross-checking the simulation.

All three functions assume Werner-state inputs; the measured raw-pair
source (0.85, 0.04, 0.055, 0.055) is close to, but not exactly, Werner,
so hard Monte Carlo cross-checks against these formulas use a
Werner-sampled source.
"""

from __future__ import annotations


def _check_fidelity(f: float) -> None:
    if not 0.0 <= f <= 1.0:
        raise ValueError(f"fidelity must lie in [0, 1], got {f}")


def distilled_fidelity_two_rounds(f: float) -> float:
    """Fidelity after two noiseless purification rounds: f^2 / (f^2 + (1-f)^2).

    Approximate in the source analysis (stated with ~); exact fixed points
    at f = 1 and f = 0.5.
    """
    _check_fidelity(f)
    return f * f / (f * f + (1.0 - f) * (1.0 - f))


def werner_components(f: float) -> tuple[float, float, float, float]:
    """Werner weights over (Phi+, Phi-, Psi+, Psi-): (f, (1-f)/3 x 3)."""
    _check_fidelity(f)
    w = (1.0 - f) / 3.0
    return (f, w, w, w)


def purification_success_probability(f: float) -> float:
    """Success probability of one purification round on Werner pairs:

    f^2 + 2f(1-f)/3 + 5((1-f)/3)^2.
    """
    _check_fidelity(f)
    w = (1.0 - f) / 3.0
    return f * f + 2.0 * f * w + 5.0 * w * w
