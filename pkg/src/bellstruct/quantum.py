"""Quantum side: measurement settings, Bell operators, expectations and searches.

Each local measurement is a d-outcome projective measurement whose k-th basis
vector is a Fourier vector dressed with a diagonal of phases:

    Alice: u_k = (1/sqrt d) sum_j exp(i theta_j) omega**( j k) |j>
    Bob:   v_l = (1/sqrt d) sum_j exp(i theta_j) omega**(-j l) |j>

Bob's basis uses the conjugate Fourier kernel, so that the state
sum_j |jj> / sqrt(d) gives outcome statistics depending on k - l only.
Outcome k of either party corresponds to the unitary-observable value omega**k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, NamedTuple, Sequence

import numpy as np

from bellstruct.coefficients import BellCoefficients, SLKParams, build_slk, omega
from bellstruct.errors import AppendixBoundViolation, InputError, InvariantViolation
from bellstruct.localrealism import lr_bound

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-9
NORM_TOL = 1e-9
APPENDIX_TOL = 1e-8
MAX_APPENDIX_D = 8

STANDARD_ALICE = (0.0, 0.5)
STANDARD_BOB = (0.25, -0.25)

GOLDEN = (math.sqrt(5) - 1) / 2
LINE_GRID = 12
LINE_XTOL = 1e-10


def fourier_matrix(d: int, sign: int = 1) -> np.ndarray:
    j = np.arange(d)
    return omega(d) ** (sign * np.outer(j, j)) / math.sqrt(d)


@dataclass(frozen=True, eq=False)
class MeasurementSettings:
    """Two phase-dressed Fourier bases per party.

    Phase tables are indexed [setting][j]; the j = 0 phase of every setting is
    shifted to zero on construction since a global phase on a basis vector does
    not change its projector.
    """

    d: int
    alice_phases: np.ndarray
    bob_phases: np.ndarray

    def __post_init__(self) -> None:
        d = int(self.d)
        if d < 2:
            raise InputError(f"d must be >= 2, got {self.d!r}")
        tables = []
        for name in ("alice_phases", "bob_phases"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != (2, d):
                raise InputError(f"{name} must have shape (2, {d}), got {arr.shape}")
            arr = arr - arr[:, :1]
            arr.setflags(write=False)
            tables.append(arr)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "alice_phases", tables[0])
        object.__setattr__(self, "bob_phases", tables[1])

    @classmethod
    def from_linear(cls, d: int, alice: Sequence[float], bob: Sequence[float]) -> MeasurementSettings:
        """theta_j = 2 pi j phi / d for each setting's offset phi."""
        j = np.arange(d)
        return cls(d, [2 * np.pi * j * p / d for p in alice], [2 * np.pi * j * p / d for p in bob])

    @classmethod
    def from_free_phases(cls, d: int, x: Sequence[float]) -> MeasurementSettings:
        x = np.asarray(x, dtype=float).reshape(4, d - 1)
        full = np.hstack([np.zeros((4, 1)), x])
        return cls(d, full[:2], full[2:])

    def free_phases(self) -> np.ndarray:
        return np.vstack([self.alice_phases, self.bob_phases])[:, 1:].ravel().copy()

    def alice_basis(self, a: int) -> np.ndarray:
        return np.exp(1j * self.alice_phases[a])[:, None] * fourier_matrix(self.d, +1)

    def bob_basis(self, b: int) -> np.ndarray:
        return np.exp(1j * self.bob_phases[b])[:, None] * fourier_matrix(self.d, -1)

    def to_json(self) -> dict[str, Any]:
        return {
            "d": self.d,
            "alice_phases": self.alice_phases.tolist(),
            "bob_phases": self.bob_phases.tolist(),
        }


def standard_settings(d: int) -> MeasurementSettings:
    """Linear-phase settings with offsets (0, 1/2) for Alice and (1/4, -1/4) for Bob."""
    return MeasurementSettings.from_linear(d, STANDARD_ALICE, STANDARD_BOB)


def random_settings(d: int, rng: np.random.Generator) -> MeasurementSettings:
    return MeasurementSettings.from_free_phases(d, rng.uniform(0, 2 * np.pi, 4 * (d - 1)))


def _power_sum(basis: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """sum_k weights[k] |basis_k><basis_k|."""
    return (basis * weights) @ basis.conj().T


def correlation_operator(m: MeasurementSettings, a: int, b: int, n: int) -> np.ndarray:
    """C^(n)_ab = sum_{k,l} omega**(n(k-l)) P_a^k (x) P_b^l."""
    w = omega(m.d) ** (n * np.arange(m.d))
    return np.kron(_power_sum(m.alice_basis(a), w), _power_sum(m.bob_basis(b), w.conj()))


@dataclass(frozen=True, eq=False)
class BellOperator:
    d: int
    matrix: np.ndarray = field(repr=False)

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def hermiticity_error(self) -> float:
        return float(np.abs(self.matrix - self.matrix.conj().T).max())


def bell_operator(c: BellCoefficients, m: MeasurementSettings) -> BellOperator:
    if c.d != m.d:
        raise InputError(f"coefficients have d={c.d} but settings have d={m.d}")
    c.real_epsilon()
    d = c.d
    mat = np.zeros((d * d, d * d), dtype=complex)
    for a in range(2):
        for b in range(2):
            for n in range(d):
                if c.f[a, b, n] != 0:
                    mat += c.f[a, b, n] * correlation_operator(m, a, b, n)
    op = BellOperator(d, mat)
    err = op.hermiticity_error()
    if err > HERMITIAN_TOL:
        raise InvariantViolation(f"Bell operator is not Hermitian (error {err:.3e}); coefficients are not real")
    return op


def _check_state(psi: Any, d: int) -> np.ndarray:
    v = np.asarray(psi, dtype=complex).ravel()
    if v.shape != (d * d,):
        raise InputError(f"state must have length {d * d}, got {v.size}")
    if abs(np.linalg.norm(v) - 1) > NORM_TOL:
        raise InputError(f"state is not normalized (norm {np.linalg.norm(v):.12g})")
    return v


def expectation(op: BellOperator, psi: Any) -> float:
    v = _check_state(psi, op.d)
    value = np.vdot(v, op.matrix @ v)
    if abs(value.imag) > NORM_TOL:
        raise InvariantViolation(f"expectation has imaginary part {value.imag:.3e}")
    return float(value.real)


def white_noise_expectation(op: BellOperator, psi: Any, p: float) -> float:
    """Tr(B rho) for rho = p |psi><psi| + (1 - p) I / d^2."""
    return p * expectation(op, psi) + (1 - p) * op.trace.real / op.d**2


def quantum_max(op: BellOperator) -> tuple[float, np.ndarray]:
    """Largest eigenvalue of the Bell operator and a unit eigenvector for it."""
    try:
        vals, vecs = np.linalg.eigh(op.matrix)
    except np.linalg.LinAlgError as exc:
        raise InvariantViolation(f"eigensolver failed: {exc}") from exc
    return float(vals[-1]), vecs[:, -1]


def entangled_state(d: int, gamma: float = 1.0) -> np.ndarray:
    """(1/sqrt n)(sum_{k != mid} |kk> + gamma |mid mid>), mid = d // 2; gamma = 1 is maximally entangled."""
    if gamma < 0:
        raise InputError(f"gamma must be >= 0, got {gamma}")
    v = np.zeros(d * d, dtype=complex)
    v[np.arange(d) * (d + 1)] = 1.0
    v[(d // 2) * (d + 1)] = gamma
    return v / np.linalg.norm(v)


def maximally_entangled(d: int) -> np.ndarray:
    return entangled_state(d, 1.0)


def joint_probabilities(m: MeasurementSettings, psi: Any) -> np.ndarray:
    """P[a, b, k, l] = |<u_k^a (x) v_l^b | psi>|^2."""
    d = m.d
    amp = _check_state(psi, d).reshape(d, d)
    probs = np.empty((2, 2, d, d))
    for a in range(2):
        ua = m.alice_basis(a)
        for b in range(2):
            probs[a, b] = np.abs(ua.conj().T @ amp @ m.bob_basis(b).conj()) ** 2
    return probs


def difference_weights(c: BellCoefficients) -> np.ndarray:
    """W[a, b, k, l] = eps_ab((k - l) mod d)."""
    k = np.arange(c.d)
    return c.real_epsilon()[:, :, np.subtract.outer(k, k) % c.d]


def probability_expectation(c: BellCoefficients, m: MeasurementSettings, psi: Any) -> float:
    """The functional evaluated on quantum joint probabilities (probability-space route)."""
    return float((difference_weights(c) * joint_probabilities(m, psi)).sum())


def gamma_scan(
    c: BellCoefficients, m: MeasurementSettings, gammas: Sequence[float]
) -> list[tuple[float, float]]:
    op = bell_operator(c, m)
    return [(float(g), expectation(op, entangled_state(c.d, float(g)))) for g in gammas]


def scan_to_csv(rows: Sequence[tuple[float, float]]) -> str:
    lines = ["gamma,expectation"]
    lines.extend(f"{g:.12g},{v:.12g}" for g, v in rows)
    return "\n".join(lines) + "\n"


def noise_threshold(c: BellCoefficients, m: MeasurementSettings, tol: float = 1e-9) -> float | None:
    """Smallest weight p of the maximally entangled state that still violates; None if it never does."""
    bound = lr_bound(c).bound
    op = bell_operator(c, m)
    if abs(op.trace) > TRACE_TOL:
        raise InvariantViolation(f"Bell operator is not traceless (trace {op.trace:.3e})")
    value = expectation(op, maximally_entangled(c.d))
    if value <= bound + tol:
        return None
    return bound / value


class _FixedStateObjective:
    """Fast evaluation of the functional on a fixed state as the phases vary."""

    def __init__(self, c: BellCoefficients, psi: np.ndarray) -> None:
        d = c.d
        self.d = d
        self.amp = _check_state(psi, d).reshape(d, d)
        self.weights = difference_weights(c)
        self.f_alice = fourier_matrix(d, +1)
        self.f_bob_conj = fourier_matrix(d, -1).conj()

    def __call__(self, x: np.ndarray) -> float:
        d = self.d
        th = np.hstack([np.zeros((4, 1)), x.reshape(4, d - 1)])
        ph = np.exp(-1j * th)
        total = 0.0
        for a in range(2):
            left = self.f_alice.conj().T * ph[a]
            for b in range(2):
                amp = left @ self.amp @ (ph[2 + b][:, None] * self.f_bob_conj)
                total += float((self.weights[a, b] * (amp.real**2 + amp.imag**2)).sum())
        return total


def _golden_max(g: Callable[[float], float], lo: float, hi: float, xtol: float = LINE_XTOL) -> tuple[float, float]:
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    g1, g2 = g(x1), g(x2)
    while hi - lo > xtol:
        if g1 >= g2:
            hi, x2, g2 = x2, x1, g1
            x1 = hi - GOLDEN * (hi - lo)
            g1 = g(x1)
        else:
            lo, x1, g1 = x1, x2, g2
            x2 = lo + GOLDEN * (hi - lo)
            g2 = g(x2)
    return (x1, g1) if g1 >= g2 else (x2, g2)


def _line_search(objective: Callable[[np.ndarray], float], x: np.ndarray, i: int, current: float) -> float:
    """Maximize over coordinate i in place; never accepts a worse value."""
    start = x[i]

    def g(t: float) -> float:
        x[i] = t
        return objective(x)

    step = 2 * np.pi / LINE_GRID
    grid = start + step * np.arange(LINE_GRID)
    values = [current] + [g(t) for t in grid[1:]]
    j = int(np.argmax(values))
    t_best, v_best = _golden_max(g, grid[j] - step, grid[j] + step)
    if values[j] > v_best:
        t_best, v_best = grid[j], values[j]
    if v_best > current:
        x[i] = t_best
        return v_best
    x[i] = start
    return current


def _coordinate_ascent(
    objective: Callable[[np.ndarray], float], x: np.ndarray, tol: float, max_sweeps: int
) -> tuple[np.ndarray, float, list[float]]:
    x = np.array(x, dtype=float)
    value = objective(x)
    history = [value]
    for _ in range(max_sweeps):
        before = value
        for i in range(x.size):
            value = _line_search(objective, x, i, value)
        history.append(value)
        if value - before < tol:
            break
    return np.mod(x, 2 * np.pi), value, history


class PhaseOptimum(NamedTuple):
    settings: MeasurementSettings
    value: float
    history: list[float]


def optimize_phases(
    c: BellCoefficients,
    psi: Any = "eigen",
    *,
    restarts: int = 8,
    seed: int = 0,
    initial: MeasurementSettings | None = None,
    tol: float = 1e-10,
    max_sweeps: int = 500,
    max_rounds: int = 200,
) -> PhaseOptimum:
    """Search the 4(d - 1) free phases for the largest Bell value.

    With a fixed state the expectation on that state is maximized by coordinate
    ascent (grid bracket + golden-section refinement per phase). With
    ``psi="eigen"`` the search alternates between the top eigenvector of the
    current operator and a coordinate ascent for that vector, so the reported
    value is the largest eigenvalue. Restart 0 starts from ``initial`` (the
    standard settings by default); the others start from phases drawn with
    ``numpy.random.default_rng([seed, restart])``.
    """
    d = c.d
    see_saw = isinstance(psi, str)
    if see_saw and psi != "eigen":
        raise InputError(f"psi must be a state vector or 'eigen', got {psi!r}")
    start0 = initial if initial is not None else standard_settings(d)
    best: PhaseOptimum | None = None
    for r in range(max(1, restarts)):
        if r == 0:
            x0 = start0.free_phases()
        else:
            x0 = np.random.default_rng([seed, r]).uniform(0, 2 * np.pi, 4 * (d - 1))
        if see_saw:
            x, value, history = _see_saw(c, x0, tol, max_sweeps, max_rounds)
        else:
            x, value, history = _coordinate_ascent(_FixedStateObjective(c, psi), x0, tol, max_sweeps)
        if best is None or value > best.value:
            best = PhaseOptimum(MeasurementSettings.from_free_phases(d, x), value, history)
    assert best is not None
    return best


def _see_saw(
    c: BellCoefficients, x: np.ndarray, tol: float, max_sweeps: int, max_rounds: int
) -> tuple[np.ndarray, float, list[float]]:
    d = c.d
    history: list[float] = []
    for _ in range(max_rounds):
        value, vec = quantum_max(bell_operator(c, MeasurementSettings.from_free_phases(d, x)))
        if history and value - history[-1] < tol:
            history.append(max(value, history[-1]))
            break
        history.append(value)
        x, _, _ = _coordinate_ascent(_FixedStateObjective(c, vec), x, tol, max_sweeps)
    return x, history[-1], history


@dataclass(frozen=True)
class AppendixReport:
    d: int
    params: SLKParams
    trials: int
    seed: int
    max_observed: float
    max_settings: MeasurementSettings | None = field(repr=False)

    @property
    def bound(self) -> float:
        return float(self.d - 1)

    @property
    def passed(self) -> bool:
        return self.max_observed <= self.bound + APPENDIX_TOL

    def to_json(self) -> dict[str, Any]:
        return {
            "d": self.d,
            "delta": self.params.delta,
            "eta1": self.params.eta1,
            "eta2": self.params.eta2,
            "trials": self.trials,
            "seed": self.seed,
            "max_observed": self.max_observed,
            "bound": self.bound,
            "pass": self.passed,
            "max_settings": self.max_settings.to_json() if self.max_settings is not None else None,
        }


def appendix_trial(c: BellCoefficients, seed: int, trial: int) -> tuple[float, MeasurementSettings]:
    m = random_settings(c.d, np.random.default_rng([seed, trial]))
    return float(np.linalg.eigvalsh(bell_operator(c, m).matrix)[-1]), m


def verify_slk_appendix(d: int, params: SLKParams, trials: int, seed: int = 0) -> AppendixReport:
    """Sample random settings and check the SLK operator never exceeds d - 1.

    Raises AppendixBoundViolation (carrying the report) if any sample does.
    """
    if int(d) != d or not 2 <= d <= MAX_APPENDIX_D:
        raise InputError(f"d must be an integer in [2, {MAX_APPENDIX_D}], got {d!r}")
    if trials < 1:
        raise InputError(f"trials must be positive, got {trials}")
    c = build_slk(int(d), params)
    best_value = -math.inf
    best_settings = None
    for t in range(trials):
        value, m = appendix_trial(c, seed, t)
        if value > best_value:
            best_value, best_settings = value, m
    report = AppendixReport(int(d), params, trials, seed, best_value, best_settings)
    if not report.passed:
        err = AppendixBoundViolation(
            f"SLK operator reached {best_value:.12g} > d - 1 = {d - 1} (d={d}, {params})"
        )
        err.report = report  # type: ignore[attr-defined]
        raise err
    return report
