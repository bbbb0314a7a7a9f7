"""Randomized verification suites.

Seeded ensembles, one checker per inequality in scope, independent
oracles (central finite differences, adaptive quadrature), and the suite
runner that aggregates per-trial gap records into a report.

Sign convention: every record's ``gap`` (and each entry of
``extra_gaps``) is >= 0 when the inequality it tracks holds; a record is
a violation when its worst normalized gap falls below -tolerance.
"""

from __future__ import annotations

import concurrent.futures
import functools
import hashlib
import math
import os
import time
from dataclasses import dataclass, field

import numpy as np

from ._backend import BACKEND
from .channels import (
    QuantumChannel,
    apply_channel,
    pinching_of,
    unitary_mixture,
    validate_channel,
)
from .config import DEFAULT, Tolerances
from .divdiff import (
    ScalarFunction,
    div_diff2,
    divided_difference_kernel,
    fp_pair_sum,
    g_alpha,
    h_log,
    log_dd_kernel,
    power,
    power_abs,
)
from .errors import (
    DomainError,
    NumericalError,
    ParameterError,
    PreconditionError,
    SpconvexError,
)
from .matcore import (
    as_selfadjoint,
    as_square,
    eigh,
    eigvalsh,
    matrix_function,
    min_eigenvalue,
    schatten_norm,
    selfadjoint_embed,
)
from .opint import quad_form, quasi_entropy, trace_second_derivative
from .quadrature import mean_power_integral, power_tail_integral
from .serialize import inputs_digest

CHECK_TAGS = ("bcl", "key", "monotone", "convexity", "fp", "integral", "opmono")

GENERATOR_INFO = {
    "name": "numpy PCG64 (numpy.random.default_rng)",
    "derivation": (
        "trial_seed = first 8 bytes, little-endian, of "
        "SHA-256('{master_seed}|{check}:{param}|{trial_index}'); "
        "one generator per trial seeded with trial_seed"
    ),
}


# ---------------------------------------------------------------------------
# configuration / records


@dataclass(frozen=True)
class TrialConfig:
    """Suite configuration; defaults reproduce the standing acceptance run."""

    dim: int = 4
    trials: int = 1000
    master_seed: int = 42
    p_values: tuple = (1.1, 1.3, 1.5, 1.7, 1.9, 2.0)
    alpha_values: tuple = (0.25, 0.5, 0.75)
    tolerance: float = DEFAULT.gap_tolerance
    ensemble: str = "complex-ginibre"
    integral_alpha_values: tuple = (0.1, 0.3, 0.5, 0.7, 0.9)
    integral_s_values: tuple = (0.5, 1.0, 2.0)
    hlog_x_values: tuple = (0.5, 1.0, math.e, 10.0)
    mixture_size: int = 4

    def validate(self) -> None:
        if self.dim < 1:
            raise ParameterError("dim must be >= 1")
        if self.trials < 1:
            raise ParameterError("trials must be >= 1")
        if self.tolerance < 0.0:
            raise ParameterError("tolerance must be >= 0")
        for p in self.p_values:
            if p <= 1.0:
                raise ParameterError(f"p values must exceed 1, got {p}")
        for a in tuple(self.alpha_values) + tuple(self.integral_alpha_values):
            if not 0.0 < a < 1.0:
                raise ParameterError(f"alpha values must lie in (0, 1), got {a}")
        if self.ensemble not in ("complex-ginibre", "self-adjoint", "positive-definite"):
            raise ParameterError(f"unknown ensemble {self.ensemble!r}")

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "trials": self.trials,
            "master_seed": self.master_seed,
            "p_values": list(self.p_values),
            "alpha_values": list(self.alpha_values),
            "tolerance": self.tolerance,
            "ensemble": self.ensemble,
            "integral_alpha_values": list(self.integral_alpha_values),
            "integral_s_values": list(self.integral_s_values),
            "hlog_x_values": list(self.hlog_x_values),
            "mixture_size": self.mixture_size,
        }


@dataclass
class GapRecord:
    """One trial's inequality gap (gap >= 0 means the inequality holds)."""

    check: str
    param: object
    trial_seed: int
    gap: float
    normalizer: float
    normalized_gap: float
    extra_gaps: dict = field(default_factory=dict)
    info: dict = field(default_factory=dict)
    inputs_digest: str = ""
    inputs: dict | None = field(default=None, repr=False, compare=False)

    def worst(self) -> float:
        return min([self.normalized_gap, *self.extra_gaps.values()])

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "param": self.param,
            "trial_seed": self.trial_seed,
            "gap": self.gap,
            "normalizer": self.normalizer,
            "normalized_gap": self.normalized_gap,
            "extra_gaps": dict(self.extra_gaps),
            "info": dict(self.info),
            "inputs_digest": self.inputs_digest,
        }


@dataclass
class CheckSummary:
    check: str
    count: int = 0
    violations: int = 0
    failed: int = 0
    min_normalized_gap: float | None = None
    max_normalized_gap: float | None = None
    mean_normalized_gap: float | None = None
    worst_trial_seed: int = 0
    tolerance: float = DEFAULT.gap_tolerance
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "count": self.count,
            "violations": self.violations,
            "failed": self.failed,
            "min_normalized_gap": self.min_normalized_gap,
            "max_normalized_gap": self.max_normalized_gap,
            "mean_normalized_gap": self.mean_normalized_gap,
            "worst_trial_seed": self.worst_trial_seed,
            "tolerance": self.tolerance,
            "extra": dict(self.extra),
        }


@dataclass
class SuiteReport:
    config: TrialConfig
    summaries: dict
    records: list
    violations: list
    failures: list
    wall_clock: float
    backend: str = BACKEND

    @property
    def violation_count(self) -> int:
        return sum(s.violations for s in self.summaries.values())

    @property
    def failure_count(self) -> int:
        return len(self.failures)

    def to_json(self, include_records: bool = True) -> dict:
        out = {
            "schema": "spconvex-suite-report/1",
            "backend": self.backend,
            "generator": GENERATOR_INFO,
            "config": self.config.to_json(),
            "wall_clock_seconds": self.wall_clock,
            "checks": {name: s.to_json() for name, s in self.summaries.items()},
            "violation_count": self.violation_count,
            "failures": list(self.failures),
        }
        if include_records:
            out["records"] = [r.to_json() for r in self.records]
        out["violations"] = [r.to_json() for r in self.violations]
        return out


# ---------------------------------------------------------------------------
# seeded ensembles


def derive_trial_seed(master_seed: int, label: str, index: int) -> int:
    """Counter-based 64-bit per-trial seed (see GENERATOR_INFO)."""
    msg = f"{master_seed}|{label}|{index}".encode()
    return int.from_bytes(hashlib.sha256(msg).digest()[:8], "little")


def _ginibre(rng: np.random.Generator, n: int) -> np.ndarray:
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2.0)


def _selfadjoint_draw(rng: np.random.Generator, n: int) -> np.ndarray:
    G = _ginibre(rng, n)
    return 0.5 * (G + G.conj().T)


def _posdef_draw(rng: np.random.Generator, n: int, shift: float = DEFAULT.pd_shift) -> np.ndarray:
    G = _ginibre(rng, n)
    return G @ G.conj().T + shift * np.eye(n)


def _psd_draw(rng: np.random.Generator, n: int) -> np.ndarray:
    G = _ginibre(rng, n)
    return G @ G.conj().T


def _indefinite_draw(rng: np.random.Generator, n: int,
                     shift: float = DEFAULT.indefinite_shift) -> np.ndarray:
    """Self-adjoint with every eigenvalue pushed at least ``shift`` from 0."""
    S = _selfadjoint_draw(rng, n)
    dec = eigh(S)
    pushed = matrix_function(lambda x: x + math.copysign(shift, x) if x != 0.0 else shift, dec)
    return as_selfadjoint(pushed)


_ENSEMBLES = {
    "complex-ginibre": _ginibre,
    "self-adjoint": _selfadjoint_draw,
    "positive-definite": _posdef_draw,
    "indefinite-invertible": _indefinite_draw,
}


def sample_matrix(ensemble: str, dim: int, trial_seed: int) -> np.ndarray:
    """Deterministic matrix draw for (ensemble, dim, trial_seed)."""
    try:
        draw = _ENSEMBLES[ensemble]
    except KeyError:
        raise ParameterError(f"unknown ensemble {ensemble!r}") from None
    return draw(np.random.default_rng(trial_seed), dim)


# ---------------------------------------------------------------------------
# oracles


def fd_oracle(f: ScalarFunction, A, B, order: int = 2,
              step: float = DEFAULT.fd_step, tol: Tolerances = DEFAULT) -> float:
    """Central finite difference of psi(t) = Tr f(A + tB) at t = 0."""
    if order not in (1, 2):
        raise ParameterError(f"order must be 1 or 2, got {order}")
    Am = as_selfadjoint(A, tol.selfadjoint_rtol)
    Bm = as_selfadjoint(B, tol.selfadjoint_rtol)

    def psi(t: float) -> float:
        total = 0.0
        for lam in eigvalsh(Am + t * Bm, tol):
            f.check_domain(float(lam))
            total += f(float(lam))
        return total

    if order == 1:
        return (psi(step) - psi(-step)) / (2.0 * step)
    return (psi(step) - 2.0 * psi(0.0) + psi(-step)) / (step * step)


# ---------------------------------------------------------------------------
# individual checks


def _bcl_sides(A, B, p: float, tol: Tolerances) -> tuple[float, float]:
    """(gap, normalizer) for the two-point norm inequality at exponent p."""
    lhs = schatten_norm(A + B, p, tol) ** 2 + schatten_norm(A - B, p, tol) ** 2
    na = schatten_norm(A, p, tol)
    nb = schatten_norm(B, p, tol)
    base = lhs - 2.0 * na**2 - 2.0 * (p - 1.0) * nb**2
    gap = base if p <= 2.0 else -base
    normalizer = na**2 + nb**2
    return gap, (normalizer if normalizer > 0.0 else 1.0)


def check_bcl(A, B, p: float, trial_seed: int = 0, tol: Tolerances = DEFAULT) -> GapRecord:
    """Two-point power inequality for a matrix pair, plus its self-adjoint embedding.

    For p <= 2 the gap is LHS - RHS of
    ||A+B||_p^2 + ||A-B||_p^2 >= 2||A||_p^2 + 2(p-1)||B||_p^2,
    negated for p >= 2 where the inequality reverses.  The same check runs
    on the embedded pair; its normalized gap must agree with the original.
    """
    if p <= 1.0:
        raise ParameterError(f"check_bcl requires p > 1, got {p}")
    Am = as_square(A)
    Bm = as_square(B)
    gap, normalizer = _bcl_sides(Am, Bm, p, tol)
    egap, enorm = _bcl_sides(selfadjoint_embed(Am), selfadjoint_embed(Bm), p, tol)
    return GapRecord(
        check="bcl",
        param=p,
        trial_seed=trial_seed,
        gap=gap,
        normalizer=normalizer,
        normalized_gap=gap / normalizer,
        extra_gaps={"embedded": egap / enorm},
        info={
            "embedded_gap": egap,
            "embedded_normalizer": enorm,
            "embedding_consistency": abs(gap / normalizer - egap / enorm),
        },
        inputs_digest=inputs_digest(Am, Bm),
        inputs={"A": Am, "B": Bm},
    )


def check_key(A, B, p: float, trial_seed: int = 0, tol: Tolerances = DEFAULT) -> GapRecord:
    """Curvature lower bound d^2/dt^2 Tr|A+tB|^p >= p(p-1)||A||_p^(p-2)||B||_p^2.

    Also records the proof chain link by link in ``extra_gaps``:
    sign reduction (A -> |A|), pinching onto B's algebra, the commuting
    Hoelder step, and the norm contraction of the pinching.
    """
    if not 1.0 < p < 2.0:
        raise ParameterError(f"check_key requires p in (1, 2), got {p}")
    Am = as_selfadjoint(A, tol.selfadjoint_rtol)
    Bm = as_selfadjoint(B, tol.selfadjoint_rtol)
    dec = eigh(Am, tol=tol)
    min_abs = float(np.min(np.abs(dec.column_reps)))
    if min_abs < tol.invertibility_floor:
        raise PreconditionError(
            f"A must be invertible: min |eigenvalue| {min_abs:.3e} < {tol.invertibility_floor}"
        )
    f = power_abs(p)
    lhs = trace_second_derivative(f, dec, Bm, tol)
    norm_a = schatten_norm(Am, p, tol)
    norm_b = schatten_norm(Bm, p, tol)
    rhs = p * (p - 1.0) * norm_a ** (p - 2.0) * norm_b**2
    gap = lhs - rhs
    normalizer = norm_a ** (p - 2.0) * norm_b**2
    if normalizer <= 0.0:
        normalizer = 1.0

    # proof chain: |A| reduction, pinching, commuting Hoelder, norm monotonicity
    A_abs = as_selfadjoint(matrix_function(abs, dec, tol))
    lhs_abs = trace_second_derivative(f, A_abs, Bm, tol)
    pinch = pinching_of(Bm, tol)
    EA = as_selfadjoint(apply_channel(pinch, A_abs))
    dec_ea = eigh(EA, tol=tol)
    lhs_pinched = trace_second_derivative(f, dec_ea, Bm, tol)
    commuting = p * (p - 1.0) * float(
        np.trace(matrix_function(power(p - 2.0), dec_ea, tol) @ Bm @ Bm).real
    )
    norm_ea = schatten_norm(EA, p, tol)
    holder_rhs = p * (p - 1.0) * norm_ea ** (p - 2.0) * norm_b**2
    return GapRecord(
        check="key",
        param=p,
        trial_seed=trial_seed,
        gap=gap,
        normalizer=normalizer,
        normalized_gap=gap / normalizer,
        extra_gaps={
            "chain_abs": (lhs - lhs_abs) / normalizer,
            "chain_pinch": (lhs_abs - lhs_pinched) / normalizer,
            "chain_holder": (lhs_pinched - holder_rhs) / normalizer,
            "chain_norm_mono": (holder_rhs - rhs) / normalizer,
        },
        info={
            "lhs": lhs,
            "rhs": rhs,
            "commuting_residual": (lhs_pinched - commuting) / max(1.0, abs(commuting)),
        },
        inputs_digest=inputs_digest(Am, Bm),
        inputs={"A": Am, "B": Bm},
    )


def check_fp_lemma(p: float, r: float, s: float, trial_seed: int = 0,
                   tol: Tolerances = DEFAULT) -> GapRecord:
    """Sign-reduction inequality for the |x|^p curvature pair sums.

    gap = [pair sum at (r, s)] - [pair sum at (|r|, |s|)] >= 0, exactly 0
    for same-sign pairs.  Also asserts the coincident-point identity
    f^[2](r,r,r) = p(p-1)|r|^(p-2)/2 (info:``part1_residual``) and
    cross-checks the closed forms against raw divided differences.
    """
    if not 1.0 < p <= 2.0:
        raise ParameterError(f"check_fp_lemma requires p in (1, 2], got {p}")
    if r == 0.0 or s == 0.0:
        raise DomainError("check_fp_lemma requires nonzero r, s")
    lhs = fp_pair_sum(p, r, s, tol)
    rhs = fp_pair_sum(p, abs(r), abs(s), tol)
    f = power_abs(p)
    part1 = div_diff2(f, r, r, r, tol) - 0.5 * p * (p - 1.0) * abs(r) ** (p - 2.0)
    dd_residual = 0.0
    if abs(r - s) > tol.near_equal_rtol * max(1.0, abs(r), abs(s)):
        raw = div_diff2(f, r, s, r, tol) + div_diff2(f, s, r, s, tol)
        dd_residual = (raw - lhs) / max(1.0, abs(lhs))
    gap = lhs - rhs
    return GapRecord(
        check="fp",
        param=p,
        trial_seed=trial_seed,
        gap=gap,
        normalizer=rhs,
        normalized_gap=gap / rhs,
        info={"r": r, "s": s, "part1_residual": part1, "dd_residual": dd_residual},
        inputs_digest=inputs_digest(np.array([[r, s]])),
    )


_MONOTONE_KERNELS = ("f_alpha", "log_dd", "quasi_h")


def check_monotonicity(kernel_tag: str, A, B, X, channel: QuantumChannel,
                       alpha: float | None = None, theta: float = 1.0,
                       trial_seed: int = 0, tol: Tolerances = DEFAULT) -> GapRecord:
    """Data-processing inequality of the metric quadratic form under a channel.

    gap = <X, Q(X)>_{A,B} - <b(X), Q(b(X))>_{b(A),b(B)} >= 0 for unital
    trace-preserving b and positive definite A, B.  Kernels: ``f_alpha``
    (divided difference of x^alpha), ``log_dd`` (divided difference of
    log), ``quasi_h`` (quasi-entropy weights of (x-1)/log x at ``theta``).
    """
    if kernel_tag not in _MONOTONE_KERNELS:
        raise ParameterError(f"unknown kernel tag {kernel_tag!r}")
    validation = validate_channel(channel, tol)
    if not validation.passed:
        raise PreconditionError(
            "channel is not unital trace-preserving: "
            f"tp={validation.trace_residual:.2e} unital={validation.unital_residual:.2e}"
        )
    Am = as_selfadjoint(A, tol.selfadjoint_rtol)
    Bm = as_selfadjoint(B, tol.selfadjoint_rtol)
    for name, M in (("A", Am), ("B", Bm)):
        if min_eigenvalue(M, tol) <= 0.0:
            raise PreconditionError(f"{name} must be positive definite")

    bA = as_selfadjoint(apply_channel(channel, Am), 1e-10)
    bB = as_selfadjoint(apply_channel(channel, Bm), 1e-10)
    bX = apply_channel(channel, as_square(X))
    for name, M in (("channel(A)", bA), ("channel(B)", bB)):
        if min_eigenvalue(M, tol) <= 0.0:
            raise NumericalError(f"{name} lost positive definiteness")

    if kernel_tag == "f_alpha":
        if alpha is None or not 0.0 < alpha < 1.0:
            raise ParameterError(f"kernel f_alpha requires alpha in (0, 1), got {alpha}")
        kernel = divided_difference_kernel(power(alpha), tol)
        lhs = quad_form(kernel, Am, Bm, X, tol)
        rhs = quad_form(kernel, bA, bB, bX, tol)
        param: object = alpha
    elif kernel_tag == "log_dd":
        kernel = log_dd_kernel(tol)
        lhs = quad_form(kernel, Am, Bm, X, tol)
        rhs = quad_form(kernel, bA, bB, bX, tol)
        param = "log"
    else:
        lhs = quasi_entropy(lambda x: h_log(x, tol), theta, Am, Bm, X, tol)
        rhs = quasi_entropy(lambda x: h_log(x, tol), theta, bA, bB, bX, tol)
        param = f"quasi_h:{theta}"

    gap = lhs - rhs
    normalizer = lhs if lhs > 0.0 else 1.0
    return GapRecord(
        check="monotone",
        param=param,
        trial_seed=trial_seed,
        gap=gap,
        normalizer=normalizer,
        normalized_gap=gap / normalizer,
        info={"kernel": kernel_tag, "channel": channel.kind, "lhs": lhs, "rhs": rhs},
        inputs_digest=inputs_digest(Am, Bm, as_square(X)),
        inputs={"A": Am, "B": Bm, "X": as_square(X), "channel": channel},
    )


def check_midpoint_convexity(alpha: float, triple1, triple2, trial_seed: int = 0,
                             tol: Tolerances = DEFAULT) -> GapRecord:
    """Midpoint joint convexity of (A,B,X) -> <X, Q_{dd1[x^alpha]}(X)>."""
    if not 0.0 < alpha < 1.0:
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")
    kernel = divided_difference_kernel(power(alpha), tol)

    def phi(triple) -> float:
        A, B, X = triple
        Am = as_selfadjoint(A, tol.selfadjoint_rtol)
        Bm = as_selfadjoint(B, tol.selfadjoint_rtol)
        for name, M in (("A", Am), ("B", Bm)):
            if min_eigenvalue(M, tol) <= 0.0:
                raise PreconditionError(f"{name} must be positive definite")
        return quad_form(kernel, Am, Bm, X, tol)

    A1, B1, X1 = triple1
    A2, B2, X2 = triple2
    v1 = phi(triple1)
    v2 = phi(triple2)
    vm = phi((0.5 * (as_square(A1) + as_square(A2)),
              0.5 * (as_square(B1) + as_square(B2)),
              0.5 * (as_square(X1) + as_square(X2))))
    gap = 0.5 * (v1 + v2) - vm
    normalizer = 0.5 * (v1 + v2)
    if normalizer <= 0.0:
        normalizer = 1.0
    return GapRecord(
        check="convexity",
        param=alpha,
        trial_seed=trial_seed,
        gap=gap,
        normalizer=normalizer,
        normalized_gap=gap / normalizer,
        info={"phi1": v1, "phi2": v2, "phi_mid": vm},
        inputs_digest=inputs_digest(*[as_square(M) for M in (*triple1, *triple2)]),
        inputs={"A1": as_square(A1), "B1": as_square(B1), "X1": as_square(X1),
                "A2": as_square(A2), "B2": as_square(B2), "X2": as_square(X2)},
    )


def monotone_increment_min_eig(fn, A, B, tol: Tolerances = DEFAULT) -> float:
    """Min eigenvalue of fn(B) - fn(A); >= 0 iff the order A <= B is preserved."""
    FA = matrix_function(fn, as_selfadjoint(A, tol.selfadjoint_rtol), tol)
    FB = matrix_function(fn, as_selfadjoint(B, tol.selfadjoint_rtol), tol)
    return min_eigenvalue(as_selfadjoint(FB - FA, 1e-9), tol)


def check_operator_monotone(fn, name: str, dim: int, trials: int, master_seed: int,
                            tol: Tolerances = DEFAULT) -> "SuiteReport":
    """Sampled operator monotonicity of ``fn`` on ordered positive pairs.

    Draws A positive definite and B = A + (PSD increment) per trial and
    reports the minimum eigenvalue of fn(B) - fn(A); PASS means the worst
    trial stays above -opmono_tolerance.
    """
    start = time.perf_counter()
    records = [
        _opmono_trial(fn, name, dim, derive_trial_seed(master_seed, f"opmono:{name}", i),
                      tol=tol)
        for i in range(trials)
    ]
    summary = _aggregate("opmono", records, tol.opmono_tolerance)
    return SuiteReport(
        config=TrialConfig(dim=dim, trials=trials, master_seed=master_seed),
        summaries={"opmono": summary},
        records=records,
        violations=[r for r in records if r.worst() < -tol.opmono_tolerance],
        failures=[],
        wall_clock=time.perf_counter() - start,
    )


def _opmono_trial(fn, name: str, dim: int, seed: int,
                  negative_control: bool = False, tol: Tolerances = DEFAULT) -> GapRecord:
    rng = np.random.default_rng(seed)
    A = _posdef_draw(rng, dim)
    B = A + _psd_draw(rng, dim)
    gap = monotone_increment_min_eig(fn, A, B, tol)
    return GapRecord(
        check="opmono",
        param=name,
        trial_seed=seed,
        gap=gap,
        normalizer=1.0,
        normalized_gap=gap,
        info={"negative_control": negative_control},
        inputs_digest=inputs_digest(A, B),
        inputs={"A": A, "B": B},
    )


def check_integral_rep(alpha: float, s: float, tol: Tolerances = DEFAULT) -> GapRecord:
    """Quadrature arbitration of the power integral representation's prefactor.

    Reconstructs s^(alpha-1) from the improper integral of t^(alpha-1)/(t+s)
    with both candidate constants; gap = relerr(pi/sin) - relerr(sin/pi) is
    positive when the sin(alpha pi)/pi normalization is the correct one.
    ``extra_gaps['reconstruction']`` is the 1e-6 margin of the winning fit.
    """
    if not 0.0 < alpha < 1.0:
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")
    if s <= 0.0:
        raise ParameterError(f"s must be positive, got {s}")
    integral = power_tail_integral(alpha, s, tol.quadrature_abs_tol)
    target = s ** (alpha - 1.0)
    sin_factor = math.sin(alpha * math.pi) / math.pi
    c1 = integral / sin_factor  # the printed pi/sin(alpha pi) normalization
    c2 = integral * sin_factor
    r1 = abs(c1 - target) / target
    r2 = abs(c2 - target) / target
    return GapRecord(
        check="integral",
        param=alpha,
        trial_seed=0,
        gap=r1 - r2,
        normalizer=1.0,
        normalized_gap=r1 - r2,
        extra_gaps={"reconstruction": 1e-6 - r2},
        info={
            "s": s,
            "integral": integral,
            "c1_relerr": r1,
            "c2_relerr": r2,
            "matched_prefactor": "sin(alpha*pi)/pi" if r2 < r1 else "pi/sin(alpha*pi)",
            "printed_prefactor_matches": bool(r1 <= 1e-6),
        },
        inputs_digest="",
    )


def check_hlog_integral(x: float, tol: Tolerances = DEFAULT) -> GapRecord:
    """(x-1)/log x against the quadrature of the mean power integral (1e-8 margin)."""
    value = h_log(x, tol)
    oracle = mean_power_integral(x)
    resid = abs(value - oracle)
    return GapRecord(
        check="integral",
        param=x,
        trial_seed=0,
        gap=1e-8 - resid,
        normalizer=1.0,
        normalized_gap=1e-8 - resid,
        info={"kind": "h_log", "value": value, "quadrature": oracle, "residual": resid},
        inputs_digest="",
    )


def tightness_scan(p: float, eps_grid, tol: Tolerances = DEFAULT) -> list:
    """Constant-optimality probe along the commuting family A=I2, B=diag(e,-e).

    Records rho(e) = (||A+B||_p^2 + ||A-B||_p^2 - 2||A||_p^2) / (2||B||_p^2),
    which converges to p-1 from above at rate O(e^2) as e -> 0.
    """
    if p <= 1.0:
        raise ParameterError(f"tightness_scan requires p > 1, got {p}")
    eps_grid = list(eps_grid)
    for eps in eps_grid:
        if not 0.0 < eps <= 0.1:
            raise ParameterError(f"eps must lie in (0, 0.1], got {eps}")
    records = []
    for eps in eps_grid:
        A = np.eye(2, dtype=np.complex128)
        B = np.diag([eps, -eps]).astype(np.complex128)
        num = (
            schatten_norm(A + B, p, tol) ** 2
            + schatten_norm(A - B, p, tol) ** 2
            - 2.0 * schatten_norm(A, p, tol) ** 2
        )
        rho = num / (2.0 * schatten_norm(B, p, tol) ** 2)
        records.append(
            GapRecord(
                check="tightness",
                param=eps,
                trial_seed=0,
                gap=rho - (p - 1.0),
                normalizer=1.0,
                normalized_gap=rho - (p - 1.0),
                info={"p": p, "rho": rho},
                inputs_digest="",
            )
        )
    return records


# ---------------------------------------------------------------------------
# suite runner


def _plan(config: TrialConfig) -> dict:
    """Deterministic task lists per check tag."""
    plans: dict[str, list] = {tag: [] for tag in CHECK_TAGS}
    seed = config.master_seed

    for p in config.p_values:
        for i in range(config.trials):
            plans["bcl"].append(("bcl", p, derive_trial_seed(seed, f"bcl:{p}", i),
                                 {"dim": config.dim}))

    for p in (q for q in config.p_values if 1.0 < q < 2.0):
        for i in range(config.trials):
            ensemble = "positive-definite" if i % 2 == 0 else "indefinite-invertible"
            plans["key"].append(("key", p, derive_trial_seed(seed, f"key:{p}", i),
                                 {"dim": config.dim, "ensemble": ensemble}))

    for alpha in config.alpha_values:
        for i in range(config.trials):
            channel = "mixture" if i % 2 == 0 else "pinching"
            plans["monotone"].append(
                ("monotone", alpha, derive_trial_seed(seed, f"monotone:{alpha}", i),
                 {"dim": config.dim, "kernel": "f_alpha", "channel": channel,
                  "mixture_size": config.mixture_size}))
    for i in range(config.trials):
        channel = "mixture" if i % 2 == 0 else "pinching"
        plans["monotone"].append(
            ("monotone", "log", derive_trial_seed(seed, "monotone:log", i),
             {"dim": config.dim, "kernel": "log_dd", "channel": channel,
              "mixture_size": config.mixture_size}))

    for alpha in config.alpha_values:
        for i in range(config.trials):
            plans["convexity"].append(
                ("convexity", alpha, derive_trial_seed(seed, f"convexity:{alpha}", i),
                 {"dim": config.dim}))

    for p in (q for q in config.p_values if 1.0 < q <= 2.0):
        for i in range(config.trials):
            plans["fp"].append(("fp", p, derive_trial_seed(seed, f"fp:{p}", i), {}))

    for alpha in config.integral_alpha_values:
        for s in config.integral_s_values:
            plans["integral"].append(("integral", alpha, 0, {"s": s}))
    for x in config.hlog_x_values:
        plans["integral"].append(("integral", x, 0, {"hlog": True}))

    names = [(f"g_alpha:{a}", False) for a in config.alpha_values]
    names.append(("h_log", False))
    names.append(("square", True))
    for name, is_control in names:
        for i in range(config.trials):
            plans["opmono"].append(
                ("opmono", name, derive_trial_seed(seed, f"opmono:{name}", i),
                 {"dim": config.dim, "negative_control": is_control}))
    return plans


def _opmono_fn(name: str):
    if name.startswith("g_alpha:"):
        a = float(name.split(":", 1)[1])
        return lambda x: g_alpha(a, x)
    if name == "h_log":
        return h_log
    if name == "square":
        return lambda x: x * x
    raise ParameterError(f"unknown operator-monotone candidate {name!r}")


def _execute_task(task, tol: Tolerances = DEFAULT) -> GapRecord:
    check, param, seed, payload = task
    rng = np.random.default_rng(seed)
    if check == "bcl":
        n = payload["dim"]
        return check_bcl(_ginibre(rng, n), _ginibre(rng, n), param, seed, tol)
    if check == "key":
        n = payload["dim"]
        A = _ENSEMBLES[payload["ensemble"]](rng, n)
        B = _selfadjoint_draw(rng, n)
        rec = check_key(A, B, param, seed, tol)
        rec.info["ensemble"] = payload["ensemble"]
        return rec
    if check == "monotone":
        n = payload["dim"]
        A = _posdef_draw(rng, n)
        B = _posdef_draw(rng, n)
        X = _ginibre(rng, n)
        if payload["channel"] == "mixture":
            channel = unitary_mixture(n, payload["mixture_size"], int(rng.integers(2**63)), tol)
        else:
            channel = pinching_of(_selfadjoint_draw(rng, n), tol)
        alpha = param if payload["kernel"] == "f_alpha" else None
        return check_monotonicity(payload["kernel"], A, B, X, channel,
                                  alpha=alpha, trial_seed=seed, tol=tol)
    if check == "convexity":
        n = payload["dim"]
        t1 = (_posdef_draw(rng, n), _posdef_draw(rng, n), _ginibre(rng, n))
        t2 = (_posdef_draw(rng, n), _posdef_draw(rng, n), _ginibre(rng, n))
        return check_midpoint_convexity(param, t1, t2, seed, tol)
    if check == "fp":
        mag = 10.0 ** rng.uniform(-1.0, 0.5, size=2)
        sign = rng.choice([-1.0, 1.0], size=2)
        return check_fp_lemma(param, sign[0] * mag[0], sign[1] * mag[1], seed, tol)
    if check == "integral":
        if payload.get("hlog"):
            return check_hlog_integral(param, tol)
        return check_integral_rep(param, payload["s"], tol)
    if check == "opmono":
        return _opmono_trial(_opmono_fn(param), param, payload["dim"], seed,
                             payload["negative_control"], tol)
    raise ParameterError(f"unknown check tag {check!r}")


def _run_task_safe(task, tol: Tolerances = DEFAULT):
    try:
        return _execute_task(task, tol)
    except SpconvexError as exc:
        check, param, seed, _ = task
        return {"check": check, "param": param, "trial_seed": seed,
                "error": f"{type(exc).__name__}: {exc}"}


def _check_tolerance(check: str, config_tol: float, tol: Tolerances) -> float:
    if check == "fp":
        return tol.fp_gap_tolerance
    if check == "opmono":
        return tol.opmono_tolerance
    return config_tol


def _aggregate(check: str, records, tolerance: float) -> CheckSummary:
    summary = CheckSummary(check=check, tolerance=tolerance)
    gaps = []
    worst_value = math.inf
    for rec in records:
        gaps.append(rec.normalized_gap)
        is_control = bool(rec.info.get("negative_control"))
        w = rec.worst()
        if not is_control:
            if w < -tolerance:
                summary.violations += 1
            if w < worst_value:
                worst_value = w
                summary.worst_trial_seed = rec.trial_seed
        else:
            if w < -tolerance:
                summary.extra["negative_control_detected"] = True
    summary.count = len(records)
    live = [g for g, r in zip(gaps, records) if not r.info.get("negative_control")]
    if live:
        summary.min_normalized_gap = float(min(live))
        summary.max_normalized_gap = float(max(live))
        summary.mean_normalized_gap = float(np.mean(live))
    if check == "opmono" and "negative_control_detected" not in summary.extra:
        if any(r.info.get("negative_control") for r in records):
            summary.extra["negative_control_detected"] = False
    if check == "integral" and records:
        matched = {r.info.get("matched_prefactor") for r in records if "matched_prefactor" in r.info}
        summary.extra["matched_prefactor"] = sorted(matched)
        summary.extra["printed_prefactor_matches"] = any(
            r.info.get("printed_prefactor_matches") for r in records
        )
    return summary


def run_suite(config: TrialConfig, checks=CHECK_TAGS, threads: int = 1,
              tol: Tolerances = DEFAULT, keep_inputs: bool = False) -> SuiteReport:
    """Run the selected checks over the configured ensembles and aggregate.

    Trials are independent with precomputed per-trial seeds, so the report
    is identical for any ``threads`` (0 = one worker per CPU).  Per-trial
    errors become entries of ``failures`` instead of aborting the suite.
    """
    config.validate()
    unknown = [c for c in checks if c not in CHECK_TAGS]
    if unknown:
        raise ParameterError(f"unknown checks: {unknown}")
    start = time.perf_counter()
    plans = _plan(config)
    tasks = [t for tag in CHECK_TAGS if tag in checks for t in plans[tag]]

    if threads == 0:
        threads = os.cpu_count() or 1
    if threads > 1 and len(tasks) > 1:
        worker = functools.partial(_run_task_safe, tol=tol)
        with concurrent.futures.ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(worker, tasks, chunksize=64))
    else:
        results = [_run_task_safe(t, tol) for t in tasks]

    records: list[GapRecord] = []
    failures: list[dict] = []
    for res in results:
        if isinstance(res, GapRecord):
            records.append(res)
        else:
            failures.append(res)

    summaries = {}
    violations = []
    for tag in CHECK_TAGS:
        if tag not in checks:
            continue
        tag_records = [r for r in records if r.check == tag]
        tolerance = _check_tolerance(tag, config.tolerance, tol)
        summary = _aggregate(tag, tag_records, tolerance)
        summary.failed = sum(1 for f in failures if f["check"] == tag)
        summaries[tag] = summary
        violations.extend(
            r for r in tag_records
            if not r.info.get("negative_control") and r.worst() < -tolerance
        )
    if not keep_inputs:
        keep = set(id(r) for r in violations)
        for rec in records:
            if id(rec) not in keep:
                rec.inputs = None
    return SuiteReport(
        config=config,
        summaries=summaries,
        records=records,
        violations=violations,
        failures=failures,
        wall_clock=time.perf_counter() - start,
    )


__all__ = [
    "CHECK_TAGS",
    "CheckSummary",
    "GENERATOR_INFO",
    "GapRecord",
    "SuiteReport",
    "TrialConfig",
    "check_bcl",
    "check_fp_lemma",
    "check_hlog_integral",
    "check_integral_rep",
    "check_key",
    "check_midpoint_convexity",
    "check_monotonicity",
    "check_operator_monotone",
    "derive_trial_seed",
    "fd_oracle",
    "monotone_increment_min_eig",
    "run_suite",
    "sample_matrix",
    "tightness_scan",
]
