"""Device-level quantumness assessment from coarse hardware parameters.

Collapses a device description (qubit count, qubit-qubit coupling
frequency, decoherence time, total evolution time) into a single
dimensionless accessibility index.  An index above one means the
device's coherent stretches are long and strong enough, relative to
the Hilbert-space dimension, for the evolution to reach an arbitrary
target region; the companion margin keeps the heuristic prefactor
explicit instead of absorbing it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "DeviceParams",
    "QuantumnessReport",
    "accessibility_index",
    "quantumness_margin",
    "max_qubits",
    "assess",
]

# Relative mismatch tolerated by the internal index(N_max) == 1 cross-check.
_IDENTITY_RTOL = 1e-9


@dataclass(frozen=True)
class DeviceParams:
    """Hardware parameters entering the quantumness criterion.

    ``j_over_h`` is the typical qubit-qubit coupling expressed as a
    frequency in hertz (energy divided by the Planck constant), which
    is how hardware groups usually quote it.  Times are SI seconds.
    ``n_qubits`` may be fractional so the index can be evaluated along
    the qubit-count axis, e.g. at the break-even size returned by
    :func:`max_qubits`.
    """

    n_qubits: float
    j_over_h: float
    t_decoherence: float
    t_evolution: float
    c_constant: float = 1.0

    def __post_init__(self) -> None:
        if not self.n_qubits >= 1:
            raise ValueError(f"n_qubits must be >= 1, got {self.n_qubits}")
        for name in ("j_over_h", "t_decoherence", "t_evolution", "c_constant"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be positive, got {value}")


@dataclass(frozen=True)
class QuantumnessReport:
    """Assessment summary for one parameter set.

    ``index`` is the dimensionless accessibility index and ``passes``
    is exactly ``index > 1``.  ``margin`` is the ratio of the two sides
    of the underlying criterion inequality with the heuristic constant
    kept explicit (it coincides with ``index`` when that constant is
    one).  ``n_max`` is the largest qubit count at which the same
    device parameters still give index one, reported both as a real
    number and floored to a whole qubit count.
    """

    index: float
    passes: bool
    margin: float
    n_max: float
    n_max_floor: int

    def __post_init__(self) -> None:
        if self.passes != (self.index > 1.0):
            raise ValueError("passes must equal index > 1")


def accessibility_index(params: DeviceParams) -> float:
    """Dimensionless accessibility index of a device.

    Computed as 4 * (J/h) * sqrt(t_evolution * t_decoherence) divided
    by n_qubits^(3/4).  Values above one indicate that coherent
    evolution can span the state space of this many qubits.
    """
    coherent_reach = 4.0 * params.j_over_h * math.sqrt(
        params.t_evolution * params.t_decoherence
    )
    return coherent_reach / params.n_qubits**0.75


def quantumness_margin(params: DeviceParams) -> tuple[float, bool]:
    """Ratio of the two sides of the quantumness inequality.

    The criterion compares the phase accumulated per coherent stretch,
    t_decoherence * 2*pi*(J/h), against the required angular progress
    (pi/2) * C * n_qubits^(3/4) * sqrt(t_decoherence / t_evolution).
    Both sides are kept in this printed form rather than simplified, so
    the heuristic constant C stays visible; with C = 1 the margin
    reduces algebraically to the accessibility index.  Returns the
    ratio and whether it exceeds one.
    """
    lhs = params.t_decoherence * 2.0 * math.pi * params.j_over_h
    rhs = (
        (math.pi / 2.0)
        * params.c_constant
        * params.n_qubits**0.75
        * math.sqrt(params.t_decoherence / params.t_evolution)
    )
    margin = lhs / rhs
    return margin, margin > 1.0


def max_qubits(params: DeviceParams) -> float:
    """Largest qubit count at which the index still reaches one.

    Inverts the accessibility index along the qubit-count axis:
    N_max = (4 * J/h)^(4/3) * (t_evolution * t_decoherence)^(2/3).
    The result is cross-checked by evaluating the index at N_max, which
    must come back as 1 within 1e-9 relative; a mismatch would mean the
    two formulas have drifted apart and raises RuntimeError.
    """
    n_max = (4.0 * params.j_over_h) ** (4.0 / 3.0) * (
        params.t_evolution * params.t_decoherence
    ) ** (2.0 / 3.0)
    at_break_even = accessibility_index(
        DeviceParams(
            n_qubits=n_max,
            j_over_h=params.j_over_h,
            t_decoherence=params.t_decoherence,
            t_evolution=params.t_evolution,
            c_constant=params.c_constant,
        )
    )
    if abs(at_break_even - 1.0) > _IDENTITY_RTOL:
        raise RuntimeError(
            f"index at break-even size is {at_break_even!r}, expected 1 "
            f"within {_IDENTITY_RTOL} relative"
        )
    return n_max


def assess(params: DeviceParams) -> QuantumnessReport:
    """Full quantumness report for one device parameter set."""
    index = accessibility_index(params)
    margin, _ = quantumness_margin(params)
    n_max = max_qubits(params)
    return QuantumnessReport(
        index=index,
        passes=index > 1.0,
        margin=margin,
        n_max=n_max,
        n_max_floor=math.floor(n_max),
    )
