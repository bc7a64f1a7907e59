"""Array geometry, steering vectors, and multipath channel synthesis.

The receiver is a uniform sparse array carved out of a dense physical
array of M half-wavelength-spaced elements: N of them (one per RF chain)
are activated with a uniform stride eta, and the whole selection slides
along the y-axis as a rigid group. The reference (bottom) element sits at
position y inside the movable region [y_min, y_max].
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0  # m/s


def wavelength_from_frequency(f_hz: float) -> float:
    """Carrier wavelength in meters for a carrier frequency in Hz."""
    if not f_hz > 0:
        raise ValueError(f"carrier frequency must be positive, got {f_hz}")
    return SPEED_OF_LIGHT / f_hz


def max_sparsity(M: int, N: int) -> int:
    """Largest stride eta such that N selected elements fit in M physical ones.

    The selected aperture (N-1)*eta*d may not exceed the physical aperture
    (M-1)*d, so eta_max = floor((M-1)/(N-1)).
    """
    M = _as_int(M, "M")
    N = _as_int(N, "N")
    if N < 2:
        raise ValueError(f"need at least 2 selected elements, got N={N}")
    if M < N:
        raise ValueError(f"physical array too small: M={M} < N={N}")
    return (M - 1) // (N - 1)


@dataclass(frozen=True)
class ArrayConfig:
    """Physical array plus movable-region geometry.

    Attributes:
        M: number of physical array elements.
        N: number of RF chains, i.e. selected (active) elements.
        d: physical inter-element spacing in meters (default wavelength/2).
        wavelength: carrier wavelength in meters.
        y_min, y_max: movable-region bounds for the reference element, meters.
        confine_aperture: if True, also require the top selected element to
            stay below y_max (y + (N-1)*eta*d <= y_max). The default follows
            the problem statement and constrains the reference element only.
    """

    M: int
    N: int
    wavelength: float
    y_min: float
    y_max: float
    d: float = field(default=0.0)
    confine_aperture: bool = False

    def __post_init__(self):
        object.__setattr__(self, "M", _as_int(self.M, "M"))
        object.__setattr__(self, "N", _as_int(self.N, "N"))
        if self.N < 2:
            raise ValueError(f"need at least 2 RF chains, got N={self.N}")
        if self.M < self.N:
            raise ValueError(f"M={self.M} must be >= N={self.N}")
        if not (np.isfinite(self.wavelength) and self.wavelength > 0):
            raise ValueError(f"invalid wavelength {self.wavelength}")
        if self.d == 0.0:
            object.__setattr__(self, "d", self.wavelength / 2.0)
        if not (np.isfinite(self.d) and self.d > 0):
            raise ValueError(f"invalid element spacing {self.d}")
        if not (np.isfinite(self.y_min) and np.isfinite(self.y_max)):
            raise ValueError("movable region bounds must be finite")
        if self.y_min > self.y_max:
            raise ValueError(f"empty movable region [{self.y_min}, {self.y_max}]")

    @classmethod
    def from_frequency(cls, M: int, N: int, f_hz: float, y_min: float,
                       y_max: float, **kwargs) -> "ArrayConfig":
        return cls(M=M, N=N, wavelength=wavelength_from_frequency(f_hz),
                   y_min=y_min, y_max=y_max, **kwargs)

    @property
    def d_bar(self) -> float:
        """Spacing normalized by the wavelength."""
        return self.d / self.wavelength

    @property
    def eta_max(self) -> int:
        return max_sparsity(self.M, self.N)

    @property
    def physical_aperture(self) -> float:
        """Dimension (M-1)*d of the full physical array, meters."""
        return (self.M - 1) * self.d

    def sparse_aperture(self, eta: int) -> float:
        """Dimension (N-1)*eta*d of the selected array, meters."""
        return (self.N - 1) * self.validate_eta(eta) * self.d

    def validate_eta(self, eta) -> int:
        """Check that eta is an integer in {1, ..., eta_max} and return it."""
        if isinstance(eta, float) and not eta.is_integer():
            raise ValueError(f"sparsity level must be an integer, got {eta}")
        eta = _as_int(eta, "eta")
        if not 1 <= eta <= self.eta_max:
            raise ValueError(
                f"sparsity level {eta} outside {{1, ..., {self.eta_max}}}")
        return eta

    def position_bounds(self, eta: int) -> tuple[float, float]:
        """Admissible interval for the reference position at sparsity eta.

        With confine_aperture the selected array must fit entirely below
        y_max, which shrinks the upper bound; the interval can then be empty
        for large eta (lo > hi), which callers treat as infeasible.
        """
        eta = self.validate_eta(eta)
        if self.confine_aperture:
            return self.y_min, self.y_max - self.sparse_aperture(eta)
        return self.y_min, self.y_max

    def validate_position(self, y: float, eta: int) -> float:
        y = float(y)
        lo, hi = self.position_bounds(eta)
        if not (np.isfinite(y) and lo <= y <= hi):
            raise ValueError(f"position {y} outside movable region [{lo}, {hi}]")
        return y


@dataclass(frozen=True)
class Path:
    """One propagation path: complex gain and angle of arrival (radians)."""

    gain: complex
    aoa: float

    def __post_init__(self):
        if not np.isfinite(self.gain):
            raise ValueError(f"non-finite path gain {self.gain}")
        if not (np.isfinite(self.aoa) and -np.pi / 2 <= self.aoa <= np.pi / 2):
            raise ValueError(f"angle of arrival {self.aoa} outside [-pi/2, pi/2]")


@dataclass(frozen=True)
class PathSet:
    """One user's multipath description: L complex gains and L AoAs."""

    gains: np.ndarray
    aoas: np.ndarray

    def __post_init__(self):
        gains = np.atleast_1d(np.asarray(self.gains, dtype=np.complex128)).copy()
        aoas = np.atleast_1d(np.asarray(self.aoas, dtype=np.float64)).copy()
        if gains.ndim != 1 or aoas.shape != gains.shape or gains.size == 0:
            raise ValueError("gains and aoas must be equal-length non-empty 1-D arrays")
        if not np.all(np.isfinite(gains)):
            raise ValueError("path gains must be finite")
        if not np.all(np.isfinite(aoas)):
            raise ValueError("angles of arrival must be finite")
        if np.any(np.abs(aoas) > np.pi / 2):
            raise ValueError("angles of arrival must lie in [-pi/2, pi/2]")
        gains.flags.writeable = False
        aoas.flags.writeable = False
        object.__setattr__(self, "gains", gains)
        object.__setattr__(self, "aoas", aoas)

    @classmethod
    def from_paths(cls, paths) -> "PathSet":
        paths = list(paths)
        return cls(gains=np.array([p.gain for p in paths]),
                   aoas=np.array([p.aoa for p in paths]))

    @property
    def L(self) -> int:
        return self.gains.size


@dataclass(frozen=True)
class ChannelVector:
    """Complex N-vector channel realized at a candidate (y, eta)."""

    entries: np.ndarray
    y: float
    eta: int

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=np.complex128).copy()
        if entries.ndim != 1:
            raise ValueError("channel entries must be a 1-D complex vector")
        if not np.all(np.isfinite(entries)):
            raise ValueError("channel entries must be finite")
        entries.flags.writeable = False
        object.__setattr__(self, "entries", entries)

    def __len__(self) -> int:
        return self.entries.size


def channel_entries(h) -> np.ndarray:
    """Coerce a ChannelVector or array-like to a complex 1-D ndarray."""
    if isinstance(h, ChannelVector):
        return h.entries
    return np.asarray(h, dtype=np.complex128)


def sparse_steering(eta: int, theta: float, cfg: ArrayConfig) -> np.ndarray:
    """Array response of the uniform sparse array with stride eta.

    Entry n (0-based) is exp(1j * 2*pi * n * eta * d_bar * sin(theta)); the
    first entry is exactly 1.
    """
    eta = cfg.validate_eta(eta)
    n = np.arange(cfg.N)
    phase = 2.0 * np.pi * n * eta * cfg.d_bar * np.sin(theta)
    return np.exp(1j * phase)


def steering(y: float, eta: int, theta: float, cfg: ArrayConfig) -> np.ndarray:
    """Response of the sparse array shifted so its reference element sits at y.

    Equals sparse_steering scaled by the global phase exp(1j*2*pi/wavelength
    * y * sin(theta)) picked up by the propagation distance offset y*sin(theta).
    """
    y = cfg.validate_position(y, eta)
    shift = np.exp(1j * 2.0 * np.pi / cfg.wavelength * y * np.sin(theta))
    return shift * sparse_steering(eta, theta, cfg)


def channel_vector(y: float, eta: int, paths: PathSet, cfg: ArrayConfig) -> ChannelVector:
    """Multipath channel at (y, eta): sum of gain-weighted steering vectors."""
    eta = cfg.validate_eta(eta)
    y = cfg.validate_position(y, eta)
    entries = np.zeros(cfg.N, dtype=np.complex128)
    for gain, theta in zip(paths.gains, paths.aoas):
        entries += gain * steering(y, eta, theta, cfg)
    return ChannelVector(entries=entries, y=y, eta=eta)


def sparse_steering_matrix(eta: int, aoas: np.ndarray, cfg: ArrayConfig) -> np.ndarray:
    """Stacked sparse-array responses, shape (L, N), row l for AoA aoas[l]."""
    eta = cfg.validate_eta(eta)
    n = np.arange(cfg.N)
    phase = 2.0 * np.pi * eta * cfg.d_bar * np.outer(np.sin(aoas), n)
    return np.exp(1j * phase)


def gain_weighted_shifts(y_values: np.ndarray, paths: PathSet,
                         cfg: ArrayConfig) -> np.ndarray:
    """Per-path gain times position phase for a batch of positions, (B, L).

    This table does not depend on the sparsity level, so dense (y, eta)
    scans compute it once and reuse it for every eta.
    """
    y_values = np.asarray(y_values, dtype=np.float64)
    shifts = np.exp(1j * (2.0 * np.pi / cfg.wavelength)
                    * np.outer(y_values, np.sin(paths.aoas)))
    return shifts * paths.gains


def channel_profile(y_values: np.ndarray, eta: int, paths: PathSet,
                    cfg: ArrayConfig) -> np.ndarray:
    """Channels at many reference positions in one shot, shape (B, N).

    Row b holds the channel at (y_values[b], eta). Positions are not
    range-checked here; grid builders only produce in-region values.
    """
    abar = sparse_steering_matrix(eta, paths.aoas, cfg)  # (L, N)
    return gain_weighted_shifts(y_values, paths, cfg) @ abar


def _as_int(value, name: str) -> int:
    if isinstance(value, bool):
        raise ValueError(f"{name} must be an integer, got bool")
    try:
        as_int = int(value)
    except (TypeError, ValueError):
        raise ValueError(f"{name} must be an integer, got {value!r}") from None
    if as_int != value:
        raise ValueError(f"{name} must be an integer, got {value!r}")
    return as_int
