"""Catalog of discrete decompositions of the two-qubit weight e^{-J*Z_i Z_j}.

For either sign of J the diagonal diag(e^{-J}, e^{J}, e^{J}, e^{-J})
equals gamma * sum_{s=±1} exp(-i*s*alpha*G) for three distinct choices of
the generator G:

    J < 0:  (XX+YY)/2,  (XY-YX)/2,  (Z_j-Z_i)/2     gamma=e^{-J}/2, alpha=arccos(e^{2J})
    J > 0:  (XX-YY)/2,  (XY+YX)/2,  (Z_i+Z_j)/2     gamma=e^{J}/2,  alpha=arccos(e^{-2J})

Every generator G here satisfies G^3 = G, so the exponential has the
exact two-level closed form exp(-i*s*alpha*G) = I + (cos(alpha)-1)*G^2
- i*s*sin(alpha)*G, which is what the verifier uses (the test suite
cross-checks against a dense matrix exponential).

The (Z_i+Z_j)/2 variant applied to one site's up/down pair, with
coupling J = g/4, is precisely the on-site split used throughout
:mod:`gutzmc.gutzwiller`: (Z_up+Z_dn)/2 = -(n_up+n_dn-1).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import PauliSum

_NEGATIVE_CHANNELS = ("XX+YY", "XY-YX", "Z-Z")
_POSITIVE_CHANNELS = ("XX-YY", "XY+YX", "Z+Z")


@dataclass(frozen=True)
class HsVariant:
    """One decomposition channel with its regime and parameters."""

    regime: str  # "J<0" or "J>0"
    channel: str
    generator: PauliSum
    gamma: float
    alpha: float

    @property
    def label(self) -> str:
        return f"{self.regime}:{self.channel}"


def _two_body(sym_i: str, sym_j: str) -> PauliSum:
    return PauliSum.from_ops(2, {0: sym_i, 1: sym_j})


def _generator(channel: str) -> PauliSum:
    if channel == "XX+YY":
        return 0.5 * (_two_body("X", "X") + _two_body("Y", "Y"))
    if channel == "XY-YX":
        return 0.5 * (_two_body("X", "Y") - _two_body("Y", "X"))
    if channel == "Z-Z":
        return 0.5 * (PauliSum.from_ops(2, {1: "Z"}) - PauliSum.from_ops(2, {0: "Z"}))
    if channel == "XX-YY":
        return 0.5 * (_two_body("X", "X") - _two_body("Y", "Y"))
    if channel == "XY+YX":
        return 0.5 * (_two_body("X", "Y") + _two_body("Y", "X"))
    if channel == "Z+Z":
        return 0.5 * (PauliSum.from_ops(2, {0: "Z"}) + PauliSum.from_ops(2, {1: "Z"}))
    raise ValueError(f"unknown channel {channel!r}")


def decompose_zz(coupling: float) -> list[HsVariant]:
    """The three decomposition variants for e^{-J*ZZ} at this coupling.

    J=0 degenerates to the trivial identity split (alpha=0, gamma=1/2);
    the positive-regime channel set is returned in that case, though both
    regimes coincide there.
    """
    J = float(coupling)
    if J < 0:
        regime, channels = "J<0", _NEGATIVE_CHANNELS
        gamma, alpha = np.exp(-J) / 2, np.arccos(np.exp(2 * J))
    else:
        regime, channels = "J>0", _POSITIVE_CHANNELS
        gamma, alpha = np.exp(J) / 2, np.arccos(np.exp(-2 * J))
    return [
        HsVariant(regime, ch, _generator(ch), float(gamma), float(alpha))
        for ch in channels
    ]


def variant_unitary(variant: HsVariant, s: int) -> np.ndarray:
    """exp(-i*s*alpha*G) as a dense 4x4, via the exact two-level form."""
    if s not in (+1, -1):
        raise ValueError(f"s must be ±1, got {s}")
    g_mat = variant.generator.to_matrix()
    g_sq = g_mat @ g_mat
    return (
        np.eye(4, dtype=complex)
        + (np.cos(variant.alpha) - 1.0) * g_sq
        - 1j * s * np.sin(variant.alpha) * g_mat
    )


def verify_variant(variant: HsVariant, coupling: float) -> float:
    """Max elementwise deviation of gamma * sum_s exp(-i*s*alpha*G) from the target.

    The target is diag(e^{-J}, e^{J}, e^{J}, e^{-J}) at the given
    coupling; feeding a variant built for the opposite sign regime makes
    the deviation large, which is itself a tested property.
    """
    J = float(coupling)
    target = np.diag(np.exp(-J * np.array([1.0, -1.0, -1.0, 1.0])))
    combined = variant.gamma * (variant_unitary(variant, +1) + variant_unitary(variant, -1))
    return float(np.max(np.abs(target - combined)))
