"""Geometry of pure states in a finite-dimensional Hilbert space.

A normalized state of an N-qubit register is a unit vector in C^D with
D = 2**N.  Physically distinct states form the projective space obtained
by quotienting out normalization and global phase, and the natural
distance on that space is the Fubini-Study angle

    s(psi, phi) = arccos |<psi|phi>|,

ranging from 0 (same ray) to pi/2 (orthogonal rays).

This module provides the pieces the walk and percolation drivers are
built from: Haar-distributed random states, the Fubini-Study distance, a
real coordinate chart, the metric tensor in that chart together with its
eigenframe, and random tangent steps of prescribed metric length.

The chart uses D - 1 magnitude angles followed by D - 1 phases, packed
into a single vector ``theta`` of length 2(D - 1).  Amplitudes are

    psi_d = exp(i phi_d) * cos(theta_d) * prod_{l < d} sin(theta_l)

for d = 0 .. D-2, while the last amplitude carries the full sine product
and no phase of its own; the global phase is fixed by making it real and
non-negative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DEGENERACY_TOL",
    "DegenerateFrameError",
    "StateVector",
    "HypersphericalCoords",
    "MetricFrame",
    "TangentStep",
    "random_state",
    "fs_distance",
    "to_coords",
    "from_coords",
    "state_from_angles",
    "metric_tensor",
    "random_tangent_step",
]

HALF_PI = np.pi / 2

#: Eigenvalues below DEGENERACY_TOL times the largest eigenvalue are
#: treated as metrically degenerate directions.
DEGENERACY_TOL = 1e-10

_NORM_TOL = 1e-12


class DegenerateFrameError(RuntimeError):
    """Every direction of a metric frame is degenerate; no step possible."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class StateVector:
    """Unit-norm complex amplitude vector.

    The constructor validates rather than repairs: ``amplitudes`` must
    already be normalized to within 1e-12.  Use :meth:`from_array` to
    wrap a vector of arbitrary scale.
    """

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 1 or amps.size == 0:
            raise ValueError("amplitudes must be a non-empty 1-d array")
        if not np.all(np.isfinite(amps.view(np.float64))):
            raise ValueError("amplitudes must be finite")
        norm_sq = float(np.sum(amps.real**2 + amps.imag**2))
        if abs(norm_sq - 1.0) > _NORM_TOL:
            raise ValueError(
                f"state is not normalized: sum |a|^2 = {norm_sq!r}"
            )
        object.__setattr__(self, "amplitudes", _readonly(amps.copy()))

    @classmethod
    def from_array(cls, values) -> "StateVector":
        """Normalize ``values`` and wrap the result as a state."""
        v = np.asarray(values, dtype=np.complex128)
        n = np.linalg.norm(v)
        if not np.isfinite(n) or n == 0.0:
            raise ValueError("cannot normalize a zero or non-finite vector")
        return cls(v / n)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]


@dataclass(frozen=True, eq=False)
class HypersphericalCoords:
    """Canonical chart point for a state of dimension ``dim``.

    ``theta`` holds the dim - 1 magnitude angles (each in [0, pi/2])
    followed by the dim - 1 phases (each in [0, 2 pi)).  Non-canonical
    angle vectors are still meaningful input to
    :func:`state_from_angles`; this type is reserved for the canonical
    representative produced by :func:`to_coords`.
    """

    theta: np.ndarray
    dim: int

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        theta = np.asarray(self.theta, dtype=np.float64)
        n = self.dim - 1
        if theta.shape != (2 * n,):
            raise ValueError(
                f"expected {2 * n} angles for dim {self.dim}, got {theta.shape}"
            )
        mag = theta[:n]
        ph = theta[n:]
        if np.any(mag < 0.0) or np.any(mag > HALF_PI):
            raise ValueError("magnitude angles must lie in [0, pi/2]")
        if np.any(ph < 0.0) or np.any(ph >= 2 * np.pi):
            raise ValueError("phase angles must lie in [0, 2 pi)")
        object.__setattr__(self, "theta", _readonly(theta.copy()))

    @property
    def magnitude_angles(self) -> np.ndarray:
        return self.theta[: self.dim - 1]

    @property
    def phase_angles(self) -> np.ndarray:
        return self.theta[self.dim - 1 :]


@dataclass(frozen=True, eq=False)
class MetricFrame:
    """Metric tensor at a chart point, eigendecomposed.

    g = V diag(h) V^T with eigenvalues ascending in ``eigenvalues`` and
    eigenvectors in the columns of ``eigenvectors``.  ``degenerate``
    flags eigenvalues below ``DEGENERACY_TOL * max(h)``: directions with
    numerically vanishing metric length, excluded from tangent steps.
    """

    g: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    degenerate: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "g", _readonly(np.asarray(self.g, dtype=np.float64).copy()))
        object.__setattr__(
            self, "eigenvalues", _readonly(np.asarray(self.eigenvalues, dtype=np.float64).copy())
        )
        object.__setattr__(
            self, "eigenvectors", _readonly(np.asarray(self.eigenvectors, dtype=np.float64).copy())
        )
        object.__setattr__(
            self, "degenerate", _readonly(np.asarray(self.degenerate, dtype=bool).copy())
        )

    @property
    def n_params(self) -> int:
        return self.eigenvalues.shape[0]


@dataclass(frozen=True, eq=False)
class TangentStep:
    """A chart displacement with prescribed Fubini-Study length.

    ``u`` is the unit direction in the orthonormal eigenframe (zero in
    degenerate components); ``d_theta`` the resulting chart displacement
    with d_theta^T g d_theta = target_length^2.
    """

    d_theta: np.ndarray
    target_length: float
    u: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "d_theta", _readonly(np.asarray(self.d_theta, float).copy()))
        object.__setattr__(self, "u", _readonly(np.asarray(self.u, float).copy()))


def random_state(dim: int, rng: np.random.Generator) -> StateVector:
    """Draw a Haar-distributed pure state of dimension ``dim``.

    2*dim i.i.d. standard normals are paired into complex amplitudes and
    the vector is normalized.  Unitary invariance of the Gaussian makes
    the result uniform on the unit sphere of C^dim; in particular the
    squared overlap of two independent draws has mean 1/dim.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    x = rng.standard_normal(2 * dim)
    z = x[0::2] + 1j * x[1::2]
    return StateVector(z / np.linalg.norm(x))


def fs_distance(psi: StateVector, phi: StateVector) -> float:
    """Fubini-Study distance arccos |<psi|phi>|, in [0, pi/2].

    Evaluated as arctan2 of (norm of phi's component orthogonal to psi,
    overlap modulus), which is the same angle but stays accurate when
    the states nearly coincide; arccos alone loses half the significant
    digits there.  The overlap modulus is implicitly clamped, so
    rounding noise cannot push the result out of range.
    """
    if psi.dim != phi.dim:
        raise ValueError(f"dimension mismatch: {psi.dim} != {phi.dim}")
    inner = np.vdot(psi.amplitudes, phi.amplitudes)
    ortho = phi.amplitudes - inner * psi.amplitudes
    return float(np.arctan2(np.linalg.norm(ortho), abs(inner)))


def to_coords(psi: StateVector) -> HypersphericalCoords:
    """Recover the canonical chart angles of a state.

    The global phase is fixed first by rotating the last amplitude to be
    real and non-negative.  With t_d the Euclidean norm of the modulus
    tail (m_d, m_{d+1}, ...), the running sine product telescopes to t_d
    for a unit vector, so the magnitude angles are

        theta_d = arctan2(t_{d+1}, m_d),

    equal to arccos(m_d / t_d) but still accurate when t_d is tiny.
    Once the tail norm vanishes the remaining angles come out 0, and
    phases of zero-modulus amplitudes are set to 0.
    """
    d = psi.dim
    a = psi.amplitudes
    last = a[-1]
    if last != 0:
        a = a * np.exp(-1j * np.angle(last))
    if d == 1:
        return HypersphericalCoords(np.zeros(0), 1)
    m = np.abs(a)
    tail = np.sqrt(np.cumsum((m * m)[::-1])[::-1])
    mag = np.arctan2(tail[1:], m[:-1])
    ph = np.where(m[:-1] == 0.0, 0.0, np.mod(np.angle(a[:-1]), 2 * np.pi))
    # mod can round a tiny negative angle up to exactly 2 pi
    ph[ph >= 2 * np.pi] = 0.0
    return HypersphericalCoords(np.concatenate([mag, ph]), d)


def state_from_angles(theta: np.ndarray) -> StateVector:
    """Evaluate the chart at arbitrary real angles.

    Angles outside the canonical ranges are valid input; the amplitudes
    simply land elsewhere on the sphere (the walk relies on this after
    adding a tangent displacement).  The result is renormalized to guard
    against rounding drift, which keeps repeated stepping stable.
    """
    theta = np.asarray(theta, dtype=np.float64)
    if theta.ndim != 1 or theta.size % 2 != 0:
        raise ValueError("theta must be a 1-d array of even length")
    n = theta.size // 2
    mag = theta[:n]
    ph = theta[n:]
    sines = np.cumprod(np.concatenate(([1.0], np.sin(mag))))
    moduli = sines * np.concatenate((np.cos(mag), [1.0]))
    amps = moduli * np.exp(1j * np.concatenate((ph, [0.0])))
    return StateVector.from_array(amps)


def from_coords(coords: HypersphericalCoords) -> StateVector:
    """Evaluate the chart at a canonical coordinate point."""
    return state_from_angles(coords.theta)


def metric_tensor(coords: HypersphericalCoords) -> MetricFrame:
    """Fubini-Study metric in chart coordinates, with its eigenframe.

    The metric is

        g_ij = Re[ <d_i psi|d_j psi> - <d_i psi|psi><psi|d_j psi> ],

    symmetrized.  In this chart the assembly collapses to a closed form.
    Write P_k for the product of sin^2 over magnitude angles preceding
    angle k, and v_d = m_d^2 for the squared moduli of the first D - 1
    amplitudes.  Then

    * magnitude block: diagonal, g_kk = P_k (the sphere metric; the
      phase-projection term vanishes because sum_d m_d dm_d = 0),
    * phase block: diag(v) - v v^T (the projection term survives),
    * magnitude-phase cross block: exactly zero, since those overlaps
      are purely imaginary.

    The matrix is eigendecomposed with eigenvalues ascending, and
    eigenvalues below DEGENERACY_TOL * max(h) are flagged degenerate.
    For dim 1 the frame is empty.
    """
    d = coords.dim
    n = d - 1
    p = 2 * n
    if p == 0:
        empty = np.zeros(0)
        return MetricFrame(np.zeros((0, 0)), empty, np.zeros((0, 0)), np.zeros(0, bool))
    mag = coords.theta[:n]
    sin_sq = np.sin(mag) ** 2
    prefix = np.cumprod(np.concatenate(([1.0], sin_sq[:-1])))
    v = prefix * np.cos(mag) ** 2
    g = np.zeros((p, p))
    g[np.arange(n), np.arange(n)] = prefix
    g[n:, n:] = np.diag(v) - np.outer(v, v)
    h, vecs = np.linalg.eigh(g)
    hmax = float(h[-1])
    if hmax <= 0.0:
        degenerate = np.ones(p, dtype=bool)
    else:
        degenerate = h < DEGENERACY_TOL * hmax
    return MetricFrame(g=g, eigenvalues=h, eigenvectors=vecs, degenerate=degenerate)


def random_tangent_step(
    frame: MetricFrame, delta_s: float, rng: np.random.Generator
) -> TangentStep:
    """Random tangent direction scaled to metric length ``delta_s``.

    The direction u is uniform on the unit sphere of the non-degenerate
    eigenspace: a full-dimension standard normal draw has its degenerate
    components zeroed and is then renormalized.  (The draw consumes the
    same number of variates regardless of the degeneracy pattern, so
    replayed streams stay aligned across probes.)  Scaling component i
    by 1/sqrt(h_i) gives the chart displacement

        d_theta = V (delta_s * u / sqrt(h)),

    whose squared metric length d_theta^T g d_theta equals delta_s^2.

    Raises :class:`DegenerateFrameError` when no direction is available;
    the caller is expected to perturb the point and retry.
    """
    if not 0.0 < delta_s <= HALF_PI:
        raise ValueError(f"delta_s must lie in (0, pi/2], got {delta_s}")
    p = frame.n_params
    active = ~frame.degenerate
    if p == 0 or not np.any(active):
        raise DegenerateFrameError("no non-degenerate direction to step along")
    u = rng.standard_normal(p)
    u[~active] = 0.0
    norm = np.linalg.norm(u)
    while norm == 0.0:  # vanishing draw; essentially impossible
        u = rng.standard_normal(p)
        u[~active] = 0.0
        norm = np.linalg.norm(u)
    u /= norm
    scaled = np.zeros(p)
    scaled[active] = delta_s * u[active] / np.sqrt(frame.eigenvalues[active])
    d_theta = frame.eigenvectors @ scaled
    return TangentStep(d_theta=d_theta, target_length=float(delta_s), u=u)
