"""Two-level momentum-mode Hamiltonians for the TFIM, XY and Haldane models.

Every model reduces, mode by mode, to a 2x2 Bloch Hamiltonian

    H_k = d0 * 1 + dx * sx + dy * sy + dz * sz

and this module is the single place where the d-vectors are written down.
For the chains the basis is the Nambu pair (c_k, c_{-k}^dagger); for the
Haldane model it is the (A, B) sublattice basis.

The TFIM ground-state spinor in the Nambu ordering is (v_k, u_k), i.e. the
state u_k |0> + v_k c_k^dag c_{-k}^dag |0> written in the (pair, no-pair)
order.  Use :func:`tfim_uv` to read (u, v) back out of a Nambu spinor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DegenerateKernel, ValidationError

GAP_TOL = 1e-12
SQRT3 = math.sqrt(3.0)


# --------------------------------------------------------------------------
# Parameter records
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TfimParams:
    """Transverse-field Ising chain, H = -sum(J sx sx + h sz)."""

    h: float
    J: float = 1.0

    kind = "tfim"
    drive_name = "h"

    def __post_init__(self):
        if not self.J > 0:
            raise ValidationError(f"J must be positive, got {self.J}")
        if not self.h >= 0:
            raise ValidationError(f"h must be non-negative, got {self.h}")

    @property
    def drive(self) -> float:
        return self.h

    def with_drive(self, value: float) -> "TfimParams":
        return replace(self, h=float(value))

    def kernel(self, k):
        k = np.asarray(k, dtype=float)
        zero = np.zeros_like(k)
        return np.stack([2.0 * self.J * np.sin(k), zero, 2.0 * (self.h - self.J * np.cos(k)), zero], axis=-1)

    def drive_coefficients(self, k) -> np.ndarray:
        c = np.zeros((4, 4))
        c[0] = [2.0 * self.J * math.sin(k), 0.0, -2.0 * self.J * math.cos(k), 0.0]
        c[1, 2] = 2.0
        return c


@dataclass(frozen=True)
class XyParams:
    """Anisotropic XY chain in a transverse field.

    The d-vector is (2 kappa sin k, 0, 2 (h - cos k)); at ``kappa = 1`` it is
    the TFIM kernel bit for bit.
    """

    kappa: float
    h: float

    kind = "xy"
    drive_name = "h"

    def __post_init__(self):
        if not 0.0 < self.kappa <= 1.0:
            raise ValidationError(f"kappa must lie in (0, 1], got {self.kappa}")
        if not self.h >= 0:
            raise ValidationError(f"h must be non-negative, got {self.h}")

    @property
    def drive(self) -> float:
        return self.h

    def with_drive(self, value: float) -> "XyParams":
        return replace(self, h=float(value))

    def kernel(self, k):
        k = np.asarray(k, dtype=float)
        zero = np.zeros_like(k)
        return np.stack([2.0 * self.kappa * np.sin(k), zero, 2.0 * (self.h - np.cos(k)), zero], axis=-1)

    def drive_coefficients(self, k) -> np.ndarray:
        c = np.zeros((4, 4))
        c[0] = [2.0 * self.kappa * math.sin(k), 0.0, -2.0 * math.cos(k), 0.0]
        c[1, 2] = 2.0
        return c


@dataclass(frozen=True)
class HaldaneConvention:
    """Lattice orientation and NNN chirality used to build Haldane d-vectors.

    ``nn`` holds the three nearest-neighbour vectors (A to B, bond length 1).
    The next-nearest-neighbour vectors are b1 = d2 - d3, b2 = d3 - d1,
    b3 = d1 - d2 and ``chirality`` multiplies the sin-sum in d_z.
    """

    name: str
    nn: tuple
    chirality: int = 1

    @property
    def nn_vectors(self) -> np.ndarray:
        return np.array(self.nn, dtype=float)

    @property
    def nnn_vectors(self) -> np.ndarray:
        d = self.nn_vectors
        return np.array([d[1] - d[2], d[2] - d[0], d[0] - d[1]])

    @property
    def lattice_vectors(self) -> np.ndarray:
        d = self.nn_vectors
        return np.array([d[0] - d[2], d[1] - d[2]])

    @property
    def reciprocal_vectors(self) -> np.ndarray:
        # rows G_i with G_i . a_j = 2 pi delta_ij
        return 2.0 * np.pi * np.linalg.inv(self.lattice_vectors).T


_BONDS_X = ((0.5, SQRT3 / 2), (0.5, -SQRT3 / 2), (-1.0, 0.0))
_BONDS_Y = ((SQRT3 / 2, 0.5), (-SQRT3 / 2, 0.5), (0.0, -1.0))

HALDANE_CONVENTIONS = (
    HaldaneConvention("bonds-x", _BONDS_X, +1),
    HaldaneConvention("bonds-x-flipped", _BONDS_X, -1),
    HaldaneConvention("bonds-y", _BONDS_Y, +1),
    HaldaneConvention("bonds-y-flipped", _BONDS_Y, -1),
)
# Selected by the convention search in critical.select_haldane_convention.
DEFAULT_HALDANE_CONVENTION = HALDANE_CONVENTIONS[3]


def haldane_convention(name: str) -> HaldaneConvention:
    for conv in HALDANE_CONVENTIONS:
        if conv.name == name:
            return conv
    raise ValidationError(f"unknown Haldane convention {name!r}")


@dataclass(frozen=True)
class HaldaneParams:
    """Haldane honeycomb model; the drive parameter is the NNN phase theta."""

    t1: float = 1.0
    t2: float = 1.0
    theta: float = 0.0
    M: float = 0.0
    convention: HaldaneConvention = field(default=DEFAULT_HALDANE_CONVENTION)

    kind = "haldane"
    drive_name = "theta"

    def __post_init__(self):
        if not self.t1 > 0:
            raise ValidationError(f"t1 must be positive, got {self.t1}")
        if not self.t2 >= 0:
            raise ValidationError(f"t2 must be non-negative, got {self.t2}")

    @property
    def drive(self) -> float:
        return self.theta

    def with_drive(self, value: float) -> "HaldaneParams":
        return replace(self, theta=float(value))

    def _sums(self, k):
        k = np.asarray(k, dtype=float)
        conv = self.convention
        f = self.t1 * np.exp(1j * (k @ conv.nn_vectors.T)).sum(axis=-1)
        kb = k @ conv.nnn_vectors.T
        return f, np.sin(kb).sum(axis=-1), np.cos(kb).sum(axis=-1)

    def kernel(self, k):
        f, s, c = self._sums(k)
        dz = self.M + self.convention.chirality * 2.0 * self.t2 * math.sin(self.theta) * s
        d0 = 2.0 * self.t2 * math.cos(self.theta) * c
        return np.stack(np.broadcast_arrays(f.real, f.imag, dz, d0), axis=-1)

    def drive_coefficients(self, k) -> np.ndarray:
        f, s, c = self._sums(k)
        out = np.zeros((4, 4))
        out[0] = [f.real, f.imag, self.M, 0.0]
        out[2, 2] = self.convention.chirality * 2.0 * self.t2 * s
        out[3, 3] = 2.0 * self.t2 * c
        return out


ModelParams = TfimParams | XyParams | HaldaneParams


def kernel(params: ModelParams, k) -> np.ndarray:
    """Return (dx, dy, dz, d0) of ``params`` at momentum ``k``.

    ``k`` may be a scalar or array for chains, or a ``(..., 2)`` array for
    the Haldane model; the d-vector components sit on the last axis.
    """
    return params.kernel(k)


def kernel_matrix(d) -> np.ndarray:
    """Dense 2x2 matrix (or stack of them) for a d-vector (dx, dy, dz, d0)."""
    d = np.asarray(d, dtype=float)
    dx, dy, dz, d0 = d[..., 0], d[..., 1], d[..., 2], d[..., 3]
    m = np.empty(d.shape[:-1] + (2, 2), dtype=complex)
    m[..., 0, 0] = d0 + dz
    m[..., 0, 1] = dx - 1j * dy
    m[..., 1, 0] = dx + 1j * dy
    m[..., 1, 1] = d0 - dz
    return m


# --------------------------------------------------------------------------
# Spectra and eigenvectors
# --------------------------------------------------------------------------


def tfim_spectrum(h: float, k: float, J: float = 1.0):
    """Closed-form TFIM quasiparticle energy and Bogoliubov amplitudes.

    Returns ``(eps, u, v)`` with eps = 2 sqrt((h - J cos k)^2 + J^2 sin^2 k).
    """
    if not 0.0 < k < np.pi:
        raise ValidationError(f"k must lie strictly inside (0, pi), got {k}")
    a = h - J * math.cos(k)
    s = J * math.sin(k)
    eps = 2.0 * math.hypot(a, s)
    denom = math.sqrt(eps * (eps / 2.0 + a))
    return eps, (eps / 2.0 + a) / denom, -s / denom


def tfim_uv(psi) -> tuple[complex, complex]:
    """(u, v) amplitudes of a TFIM/XY Nambu spinor (v, u)."""
    psi = np.asarray(psi)
    return psi[..., 1], psi[..., 0]


def _eigvecs(d):
    """Gauge-fixed lower and upper eigenvectors of d.sigma, vectorised."""
    d = np.atleast_2d(np.asarray(d, dtype=float))
    dx, dy, dz = d[:, 0], d[:, 1], d[:, 2]
    r = np.sqrt(dx * dx + dy * dy + dz * dz)
    if np.any(2.0 * r < GAP_TOL):
        raise DegenerateKernel(f"gap below {GAP_TOL:g}")
    z = dx + 1j * dy
    # Two algebraically equivalent forms; pick the better-conditioned one.
    first = r + dz >= r - dz
    lo = np.where(first[:, None],
                  np.stack([-z.conj(), r + dz + 0j], axis=-1),
                  np.stack([-(r - dz) + 0j, z], axis=-1))
    up = np.where(first[:, None],
                  np.stack([r + dz + 0j, z], axis=-1),
                  np.stack([z.conj(), r - dz + 0j], axis=-1))
    lo /= np.linalg.norm(lo, axis=-1, keepdims=True)
    up /= np.linalg.norm(up, axis=-1, keepdims=True)
    # Gauge: lower has a real non-negative second entry, upper a real
    # non-negative first entry.  For the TFIM this yields (v, u) and (u, -v).
    lo *= np.exp(-1j * np.angle(lo[:, 1]))[:, None]
    up *= np.exp(-1j * np.angle(up[:, 0]))[:, None]
    lo[:, 1] = lo[:, 1].real
    up[:, 0] = up[:, 0].real
    return r, lo, up


def ground_spinor(d) -> np.ndarray:
    """Lower-energy normalized eigenvector of the kernel evaluation ``d``.

    Accepts a single d-vector (returns shape ``(2,)``) or a stack
    ``(M, 4)`` (returns ``(M, 2)``).  Raises :class:`DegenerateKernel` when
    the gap is below 1e-12.
    """
    single = np.ndim(d) == 1
    _, lo, _ = _eigvecs(d)
    return lo[0] if single else lo


@dataclass(frozen=True)
class FinalEigenbasis:
    """Eigenpairs of a set of mode kernels, ``E_minus <= E_plus``."""

    E_minus: np.ndarray
    E_plus: np.ndarray
    minus: np.ndarray
    plus: np.ndarray


def eigenbasis(d) -> FinalEigenbasis:
    d = np.atleast_2d(np.asarray(d, dtype=float))
    r, lo, up = _eigvecs(d)
    return FinalEigenbasis(E_minus=d[:, 3] - r, E_plus=d[:, 3] + r, minus=lo, plus=up)


# --------------------------------------------------------------------------
# Momentum grids
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ModeGrid:
    """Momenta entering the Loschmidt product.

    ``normalizer`` is the N of the rate function (chain length, or
    ``Lx * Ly`` for the Haldane model).
    """

    kind: str
    shape: tuple
    points: np.ndarray
    normalizer: int

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


def chain_grid(N: int) -> ModeGrid:
    """Positive even-parity momenta (2j - 1) pi / N, j = 1..N/2."""
    if N < 2 or N % 2:
        raise ValidationError(f"N must be an even integer >= 2, got {N}")
    j = np.arange(1, N // 2 + 1)
    return ModeGrid("chain", (N,), (2 * j - 1) * np.pi / N, N)


def chain_mode(N: int, index: int) -> float:
    """Momentum (2 index - 1) pi / N; ``index`` counts from 1."""
    if not 1 <= index <= N // 2:
        raise ValidationError(f"mode index must be in 1..{N // 2}, got {index}")
    return (2 * index - 1) * np.pi / N


def haldane_grid(Lx: int, Ly: int, convention: HaldaneConvention = DEFAULT_HALDANE_CONVENTION) -> ModeGrid:
    """k = (m / Lx) G1 + (n / Ly) G2 for m < Lx, n < Ly."""
    if Lx < 1 or Ly < 1:
        raise ValidationError("Lx and Ly must be positive")
    G = convention.reciprocal_vectors
    m, n = np.meshgrid(np.arange(Lx), np.arange(Ly), indexing="ij")
    frac = np.stack([m.ravel() / Lx, n.ravel() / Ly], axis=-1)
    return ModeGrid("haldane", (Lx, Ly), frac @ G, Lx * Ly)


def locate_on_haldane_grid(k, Lx: int, Ly: int, convention: HaldaneConvention = DEFAULT_HALDANE_CONVENTION):
    """Nearest grid point to ``k``.

    Returns ``(on_grid, (m, n), k_grid)``; ``on_grid`` is true when ``k``
    coincides with a grid point modulo reciprocal vectors to 1e-9.
    """
    k = np.asarray(k, dtype=float)
    a = convention.lattice_vectors
    frac = (a @ k) / (2.0 * np.pi) * np.array([Lx, Ly])
    mn = np.rint(frac)
    on_grid = bool(np.all(np.abs(frac - mn) < 1e-9))
    G = convention.reciprocal_vectors
    k_grid = (mn / np.array([Lx, Ly])) @ G
    return on_grid, (int(mn[0]) % Lx, int(mn[1]) % Ly), k_grid


def haldane_phase_boundary(t2: float, M: float) -> list[float]:
    """Angles theta in [-pi, pi] with |M| = 3 sqrt(3) t2 |sin theta|."""
    if not t2 > 0:
        raise ValidationError(f"t2 must be positive, got {t2}")
    s = abs(M) / (3.0 * SQRT3 * t2)
    if s > 1.0:
        return []
    a = math.asin(s)
    return sorted({a, -a, math.pi - a, -(math.pi - a)})


def dirac_points(convention: HaldaneConvention = DEFAULT_HALDANE_CONVENTION) -> np.ndarray:
    """The two inequivalent zone corners K and K' = -K."""
    G = convention.reciprocal_vectors
    K = (2.0 * G[0] + G[1]) / 3.0
    return np.array([K, -K])


def validate_pair(initial: ModelParams, final: ModelParams) -> None:
    """Initial and final models must differ only in the drive parameter."""
    if type(initial) is not type(final):
        raise ValidationError("initial and final models must be of the same kind")
    if initial.with_drive(0.0) != final.with_drive(0.0):
        raise ValidationError("initial and final models may differ only in the drive parameter")

