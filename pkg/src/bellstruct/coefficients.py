"""Dual coefficient tables for generalized two-setting, d-outcome Bell functionals.

A functional is

    B = sum_{a,b} sum_n f_ab(n) C^(n)_ab = sum_{a,b} sum_alpha eps_ab(alpha) P(A_a = B_b + alpha)

where C^(n)_ab is the n-th order correlation function and P(A_a = B_b + alpha)
the probability that the two outcomes differ by alpha modulo d. The two tables
are related by a discrete Fourier transform over Z_d. Tables are indexed
``[a][b][k]`` with ``a, b`` in ``{0, 1}`` standing for settings 1 and 2, so the
flattened block order is (11, 12, 21, 22).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Literal

import numpy as np

from bellstruct.errors import InputError, InvalidInequalityError

Space = Literal["correlation", "probability"]
SPACES: tuple[str, ...] = ("correlation", "probability")
BLOCK_LABELS: tuple[str, ...] = ("11", "12", "21", "22")

EXACT_TOL = 1e-12
TRIG_TOL = 1e-9


def omega(d: int) -> complex:
    return complex(np.exp(2j * np.pi / d))


def _as_table(table: Any, d: int | None = None) -> np.ndarray:
    arr = np.asarray(table, dtype=complex)
    if arr.ndim != 3 or arr.shape[:2] != (2, 2):
        raise InputError(f"coefficient table must have shape (2, 2, d), got {arr.shape}")
    if arr.shape[2] < 2:
        raise InputError(f"local dimension must be >= 2, got {arr.shape[2]}")
    if d is not None and arr.shape[2] != d:
        raise InputError(f"table has last dimension {arr.shape[2]}, expected d={d}")
    return arr


def fourier_to_probability(f: Any, d: int | None = None) -> np.ndarray:
    """eps[a][b][alpha] = sum_n f[a][b][n] * omega**(n * alpha)."""
    arr = _as_table(f, d)
    # numpy's inverse DFT carries the +2*pi*i sign and a 1/d factor
    return np.fft.ifft(arr, axis=-1) * arr.shape[-1]


def fourier_to_correlation(epsilon: Any, d: int | None = None) -> np.ndarray:
    """f[a][b][n] = (1/d) * sum_alpha eps[a][b][alpha] * omega**(-n * alpha)."""
    arr = _as_table(epsilon, d)
    return np.fft.fft(arr, axis=-1) / arr.shape[-1]


@dataclass(frozen=True, eq=False)
class BellCoefficients:
    """A Bell functional in both coefficient representations.

    Build instances through :meth:`from_correlation` or :meth:`from_probability`
    so that the second table is derived from the first.
    """

    d: int
    f: np.ndarray = field(repr=False)
    epsilon: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if not isinstance(self.d, (int, np.integer)) or self.d < 2:
            raise InputError(f"d must be an integer >= 2, got {self.d!r}")
        f = _as_table(self.f, self.d).copy()
        eps = _as_table(self.epsilon, self.d).copy()
        scale = max(1.0, float(np.abs(f).max()) * self.d)
        if np.abs(fourier_to_probability(f) - eps).max() > EXACT_TOL * scale:
            raise InputError("correlation and probability tables are not Fourier duals")
        if abs(f[:, :, 0].sum()) > EXACT_TOL * scale:
            raise InputError("zeroth-order coefficients must sum to zero")
        f.setflags(write=False)
        eps.setflags(write=False)
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "epsilon", eps)

    @classmethod
    def from_correlation(cls, f: Any) -> BellCoefficients:
        arr = _as_table(f)
        return cls(arr.shape[2], arr, fourier_to_probability(arr))

    @classmethod
    def from_probability(cls, epsilon: Any) -> BellCoefficients:
        arr = _as_table(epsilon)
        return cls(arr.shape[2], fourier_to_correlation(arr), arr)

    @classmethod
    def zeros(cls, d: int) -> BellCoefficients:
        return cls.from_correlation(np.zeros((2, 2, d), dtype=complex))

    def max_imag(self) -> float:
        return float(np.abs(self.epsilon.imag).max())

    def is_real(self, tol: float = TRIG_TOL) -> bool:
        return self.max_imag() <= tol

    def real_epsilon(self, tol: float = TRIG_TOL) -> np.ndarray:
        """Real part of the probability table, after checking the reality condition."""
        if not self.is_real(tol):
            raise InvalidInequalityError(
                f"probability-space coefficients are not real (max |Im| = {self.max_imag():.3e})"
            )
        return self.epsilon.real.copy()

    def table(self, space: Space) -> np.ndarray:
        if space == "correlation":
            return self.f
        if space == "probability":
            return self.epsilon
        raise InputError(f"unknown space {space!r}; expected one of {SPACES}")

    def to_json(self, space: Space = "probability") -> dict[str, Any]:
        table = self.table(space).reshape(4, self.d)
        return {
            "d": self.d,
            "space": space,
            "coefficients": [[[float(z.real), float(z.imag)] for z in block] for block in table],
        }

    @classmethod
    def from_json(cls, doc: Any) -> BellCoefficients:
        if not isinstance(doc, dict):
            raise InputError("coefficient document must be a JSON object")
        missing = {"d", "space", "coefficients"} - set(doc)
        if missing:
            raise InputError(f"coefficient document is missing keys: {sorted(missing)}")
        d = doc["d"]
        if isinstance(d, bool) or not isinstance(d, int) or d < 2:
            raise InputError(f"'d' must be an integer >= 2, got {d!r}")
        space = doc["space"]
        if space not in SPACES:
            raise InputError(f"'space' must be one of {SPACES}, got {space!r}")
        blocks = doc["coefficients"]
        if not isinstance(blocks, list) or len(blocks) != 4:
            raise InputError("'coefficients' must hold 4 blocks ordered 11, 12, 21, 22")
        values = np.empty((4, d), dtype=complex)
        for i, block in enumerate(blocks):
            if not isinstance(block, list) or len(block) != d:
                raise InputError(f"block {BLOCK_LABELS[i]} must hold {d} entries")
            for k, pair in enumerate(block):
                if (
                    not isinstance(pair, list)
                    or len(pair) != 2
                    or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)
                ):
                    raise InputError(f"entry {BLOCK_LABELS[i]}[{k}] must be [re, im]")
                values[i, k] = complex(pair[0], pair[1])
        table = values.reshape(2, 2, d)
        if space == "correlation":
            return cls.from_correlation(table)
        return cls.from_probability(table)

    def allclose(self, other: BellCoefficients, atol: float = EXACT_TOL) -> bool:
        return self.d == other.d and bool(np.allclose(self.f, other.f, rtol=0, atol=atol))


def build_chsh() -> BellCoefficients:
    f = np.zeros((2, 2, 2), dtype=complex)
    f[:, :, 1] = [[1, 1], [-1, 1]]
    return BellCoefficients.from_correlation(f)


def cglmp_epsilon(d: int) -> np.ndarray:
    """Probability-space CGLMP table; the (alpha - 1) shift in block 12 wraps modulo d."""
    alpha = np.arange(d)
    eps = np.empty((2, 2, d))
    eps[0, 0] = 1 - 2 * alpha / (d - 1)
    eps[0, 1] = -1 + 2 * ((alpha - 1) % d) / (d - 1)
    eps[1, 0] = -1 + 2 * alpha / (d - 1)
    eps[1, 1] = 1 - 2 * alpha / (d - 1)
    return eps


def cglmp_correlation_closed_form(d: int) -> np.ndarray:
    w = omega(d)
    n = np.arange(1, d)
    c = 2 / (d - 1)
    f = np.zeros((2, 2, d), dtype=complex)
    f[0, 0, 1:] = c / (1 - w ** (-n))
    f[0, 1, 1:] = c / (1 - w**n)
    f[1, 0, 1:] = c / (w ** (-n) - 1)
    f[1, 1, 1:] = c / (1 - w ** (-n))
    return f


def build_cglmp(d: int) -> BellCoefficients:
    if int(d) != d or d < 2:
        raise InputError(f"CGLMP needs an integer d >= 2, got {d!r}")
    return BellCoefficients.from_probability(cglmp_epsilon(int(d)).astype(complex))


ALLOWED_ETA = (0.5, -0.5)


@dataclass(frozen=True)
class SLKParams:
    """Variant parameters of the SLK family.

    The default variant (delta=1/4, eta1=-1/2, eta2=+1/2) is the optimal one
    whose local maximizers fall into the residue families listed in
    :func:`bellstruct.polytope.slk_maximizer_families`.
    """

    delta: float = 0.25
    eta1: float = -0.5
    eta2: float = 0.5

    def __post_init__(self) -> None:
        if not math.isfinite(self.delta):
            raise InputError(f"delta must be finite, got {self.delta!r}")
        for name in ("eta1", "eta2"):
            if getattr(self, name) not in ALLOWED_ETA:
                raise InputError(f"{name} must be +1/2 or -1/2, got {getattr(self, name)!r}")

    @property
    def normalized_delta(self) -> float:
        """delta reduced into [0, 1/2); the local bound has period 1/2 in delta."""
        r = math.fmod(self.delta, 0.5)
        if r < 0:
            r += 0.5
        return 0.0 if r >= 0.5 else r

    def normalized(self) -> SLKParams:
        return SLKParams(self.normalized_delta, self.eta1, self.eta2)

    def shifts(self) -> np.ndarray:
        """Per-block shift of the argument: delta, delta+eta1, delta+eta2, delta+eta1+eta2."""
        dl, e1, e2 = self.delta, self.eta1, self.eta2
        return np.array([[dl, dl + e1], [dl + e2, dl + e1 + e2]])


def slk_kernel(x: Any, d: int) -> np.ndarray:
    """S(x) = (cot(pi x / d) sin(2 pi x) - cos(2 pi x) - 1) / 4, and (d - 1)/2 at x = 0 mod d."""
    x = np.asarray(x, dtype=float)
    wrapped = np.mod(x + d / 2, d) - d / 2
    at_zero = np.abs(wrapped) <= EXACT_TOL * max(1.0, d)
    safe = np.where(at_zero, 1.0, x)
    regular = 0.25 * (np.sin(2 * np.pi * safe) / np.tan(np.pi * safe / d) - np.cos(2 * np.pi * safe) - 1)
    return np.where(at_zero, 0.5 * (d - 1), regular)


def slk_correlation(d: int, params: SLKParams) -> np.ndarray:
    w = omega(d)
    n = np.arange(d)
    s = params.shifts()[:, :, None]
    f = (w ** (n * s) + w ** ((n - d) * s)) / 4
    f[:, :, 0] = 0
    return f


def slk_epsilon_closed_form(d: int, params: SLKParams) -> np.ndarray:
    alpha = np.arange(d)
    return slk_kernel(params.shifts()[:, :, None] + alpha, d)


def build_slk(d: int, params: SLKParams | None = None) -> BellCoefficients:
    """SLK functional built from its correlation-space definition.

    delta is used as given (not reduced); the probability table follows by
    transform and agrees with :func:`slk_epsilon_closed_form` to ~1e-9.
    """
    if int(d) != d or d < 2:
        raise InputError(f"SLK needs an integer d >= 2, got {d!r}")
    params = params if params is not None else SLKParams()
    return BellCoefficients.from_correlation(slk_correlation(int(d), params))


def build_named(family: str, **params: Any) -> BellCoefficients:
    """Builder lookup by name: "chsh", "cglmp" (d), "slk" (d, delta, eta1, eta2)."""
    family = family.lower()
    if family == "chsh":
        if params.get("d", 2) not in (2, None):
            raise InputError("CHSH is defined for d = 2 only")
        return build_chsh()
    if family == "cglmp":
        if params.get("d") is None:
            raise InputError("cglmp requires d")
        return build_cglmp(params["d"])
    if family == "slk":
        if params.get("d") is None:
            raise InputError("slk requires d")
        given = {k: params[k] for k in ("delta", "eta1", "eta2") if params.get(k) is not None}
        return build_slk(params["d"], SLKParams(**given))
    raise InputError(f"unknown family {family!r}; expected chsh, cglmp or slk")


@dataclass(frozen=True, eq=False)
class CorrelationWeight:
    d: int
    mu: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        mu = np.asarray(self.mu, dtype=complex)
        if mu.ndim != 2 or mu.shape[0] != mu.shape[1]:
            raise InputError(f"correlation weight must be a square table, got shape {mu.shape}")
        if mu.shape[0] != self.d:
            raise InputError(f"weight table is {mu.shape[0]}x{mu.shape[0]}, expected d={self.d}")
        object.__setattr__(self, "mu", mu)

    @classmethod
    def kernel(cls, d: int, n: int = 1) -> CorrelationWeight:
        k = np.arange(d)
        return cls(d, omega(d) ** (n * np.subtract.outer(k, k)))


@dataclass(frozen=True)
class WeightReport:
    c1: bool
    c2: bool
    c3: bool

    @property
    def all_pass(self) -> bool:
        return self.c1 and self.c2 and self.c3


def validate_weight(w: CorrelationWeight, tol: float = EXACT_TOL) -> WeightReport:
    """Check conditions C.1 (vanishing marginals), C.2 (translation invariance), C.3 (uniform steps).

    Index shifts in C.2 and C.3 wrap modulo d.
    """
    mu = w.mu
    d = w.d
    c1 = bool(np.abs(mu.sum(axis=0)).max() <= tol and np.abs(mu.sum(axis=1)).max() <= tol)
    c2 = all(
        np.abs(np.roll(mu, (-g, -g), axis=(0, 1)) - mu).max() <= tol for g in range(1, d)
    )
    step_k = np.abs(np.roll(mu, -1, axis=0) - mu)
    step_l = np.abs(np.roll(mu, -1, axis=1) - mu)
    c3 = bool(np.abs(step_k - step_l).max() <= tol)
    return WeightReport(c1, bool(c2), c3)
