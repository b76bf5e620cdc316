"""Heavy-tailed matrix ensembles.

Entry laws are symmetric with a polynomial tail controlled on both sides:
for t >= t_zero,

    c_lower * t**(-alpha) <= P(|x| > t) <= c_upper * t**(-alpha).

Every law object can report certified values of (alpha, c_lower, c_upper,
t_zero) for downstream threshold formulas, or ``None`` when the tail decays
faster than any polynomial (Gaussian).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np
from numpy.random import Generator, Philox

__all__ = [
    "LawKind",
    "TailBounds",
    "TailLaw",
    "EnsembleConfig",
    "derive_stream",
    "sample_entry",
    "sample_matrix",
]

# Slack factor for laws whose tail constant is only asymptotic (Student t).
_TAIL_SLACK = 1.1


class LawKind(str, Enum):
    SYMMETRIC_PARETO = "symmetric_pareto"
    STUDENT_T = "student_t"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class TailBounds:
    """Certified two-sided polynomial tail envelope, valid for t >= t_zero."""

    alpha: float
    c_lower: float
    c_upper: float
    t_zero: float


def _student_t_tail_constant(alpha: float) -> float:
    # lim t->inf  P(|T_nu| > t) * t^nu  =  2 * c_nu * nu^((nu-1)/2),
    # c_nu = Gamma((nu+1)/2) / (sqrt(nu*pi) * Gamma(nu/2)).
    nu = alpha
    log_c = math.lgamma((nu + 1.0) / 2.0) - math.lgamma(nu / 2.0) - 0.5 * math.log(nu * math.pi)
    return 2.0 * math.exp(log_c + 0.5 * (nu - 1.0) * math.log(nu))


def _student_t_band_onset(alpha: float, c_inf: float) -> float:
    """Smallest grid point t0 with 2*sf(t)*t^alpha inside the slack band beyond t0."""
    from scipy.stats import t as student_t

    grid = np.geomspace(0.25, 1.0e5, 4096)
    ratio = 2.0 * student_t.sf(grid, df=alpha) * grid**alpha / c_inf
    ok = (ratio >= 1.0 / _TAIL_SLACK) & (ratio <= _TAIL_SLACK)
    # Want membership for every grid point from the onset outward.
    suffix_ok = np.logical_and.accumulate(ok[::-1])[::-1]
    idx = np.flatnonzero(suffix_ok)
    if idx.size == 0:
        raise ValueError(f"no certified tail onset found for student_t alpha={alpha}")
    return float(grid[idx[0]])


@dataclass(frozen=True)
class TailLaw:
    """Symmetric entry law.

    kind
        One of ``LawKind``. ``alpha`` is the tail index for the polynomial
        laws and is ignored for ``GAUSSIAN``.
    scale
        Multiplies the unit-form variate. For the Pareto law the unit form
        has support |x| >= 1 and P(|x| > t) = t^-alpha exactly, so ``scale``
        is also the support cutoff.
    normalize_variance
        Rescale so that E[x^2] = 1. Only legal when the second moment is
        finite (Gaussian, or alpha > 2). When set, the unit-variance
        requirement determines the overall magnitude and ``scale`` no longer
        affects the samples.
    """

    kind: LawKind
    alpha: float = math.inf
    scale: float = 1.0
    normalize_variance: bool = False

    def __post_init__(self) -> None:
        kind = LawKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is not LawKind.GAUSSIAN:
            if not (self.alpha > 0.0 and math.isfinite(self.alpha)):
                raise ValueError(f"tail index alpha must be finite and > 0, got {self.alpha}")
        if not (self.scale > 0.0 and math.isfinite(self.scale)):
            raise ValueError(f"scale must be finite and > 0, got {self.scale}")
        if self.normalize_variance and not math.isfinite(self._unit_second_moment()):
            raise ValueError(
                "normalize_variance requires a finite second moment "
                f"(law {kind.value}, alpha={self.alpha})"
            )

    def _unit_second_moment(self) -> float:
        """E[B^2] for the unit-form variate B (scale 1)."""
        if self.kind is LawKind.GAUSSIAN:
            return 1.0
        if self.alpha <= 2.0:
            return math.inf
        if self.kind is LawKind.SYMMETRIC_PARETO:
            return self.alpha / (self.alpha - 2.0)
        # Student t with nu > 2 degrees of freedom.
        return self.alpha / (self.alpha - 2.0)

    @property
    def multiplier(self) -> float:
        """Net factor applied to the unit-form variate."""
        if self.normalize_variance:
            return 1.0 / math.sqrt(self._unit_second_moment())
        return self.scale

    def second_moment(self) -> float:
        if self.normalize_variance:
            return 1.0
        return self.multiplier**2 * self._unit_second_moment()

    @cached_property
    def tail_bounds(self) -> TailBounds | None:
        """Certified envelope for the law as sampled (scaling folded in)."""
        m = self.multiplier
        if self.kind is LawKind.GAUSSIAN:
            return None
        if self.kind is LawKind.SYMMETRIC_PARETO:
            # Unit form is exact: P(|B| > t) = t^-alpha for t >= 1.
            return TailBounds(
                alpha=self.alpha,
                c_lower=m**self.alpha,
                c_upper=m**self.alpha,
                t_zero=m,
            )
        c_inf = _student_t_tail_constant(self.alpha)
        t0 = _student_t_band_onset(self.alpha, c_inf)
        return TailBounds(
            alpha=self.alpha,
            c_lower=c_inf / _TAIL_SLACK * m**self.alpha,
            c_upper=c_inf * _TAIL_SLACK * m**self.alpha,
            t_zero=t0 * m,
        )

    def tail_probability(self, t: float) -> float:
        """Exact P(|x| > t), for oracles and diagnostics."""
        if t < 0:
            raise ValueError("t must be >= 0")
        m = self.multiplier
        if self.kind is LawKind.SYMMETRIC_PARETO:
            return 1.0 if t < m else (t / m) ** (-self.alpha)
        if self.kind is LawKind.GAUSSIAN:
            from scipy.stats import norm

            return float(2.0 * norm.sf(t / m))
        from scipy.stats import t as student_t

        return float(2.0 * student_t.sf(t / m, df=self.alpha))

    def truncated_mean(self, cutoff: float) -> float:
        """E[x * 1{|x| <= cutoff}]; zero for these symmetric laws."""
        if cutoff <= 0:
            raise ValueError("cutoff must be > 0")
        return 0.0

    def tail_second_moment(self, cutoff: float) -> float:
        """E[x^2 * 1{|x| > cutoff}].

        This is the second moment of the recentred remainder produced by
        ``certificates.truncate_recenter`` (the truncated mean vanishes by
        symmetry). Infinite when alpha <= 2.
        """
        if cutoff <= 0:
            raise ValueError("cutoff must be > 0")
        m = self.multiplier
        u = cutoff / m
        if self.kind is LawKind.SYMMETRIC_PARETO:
            if self.alpha <= 2.0:
                return math.inf
            full = self.alpha / (self.alpha - 2.0)
            if u <= 1.0:
                return m**2 * full
            return m**2 * full * u ** (2.0 - self.alpha)
        if self.kind is LawKind.GAUSSIAN:
            from scipy.stats import norm

            # E[Z^2 1{|Z|>u}] = 2*(u*phi(u) + sf(u)) for standard normal Z.
            return m**2 * float(2.0 * (u * norm.pdf(u) + norm.sf(u)))
        if self.alpha <= 2.0:
            return math.inf
        from scipy.integrate import quad
        from scipy.stats import t as student_t

        val, _ = quad(lambda s: 2.0 * s * s * student_t.pdf(s, df=self.alpha), u, math.inf)
        return m**2 * float(val)

    def sample(self, stream: Generator, size: tuple[int, ...] | int) -> np.ndarray:
        """Draw samples, consuming the stream deterministically.

        The Pareto path consumes two uniforms per entry (magnitude, sign)
        in C order, so a (N, n) draw fills the matrix row by row.
        """
        m = self.multiplier
        if self.kind is LawKind.SYMMETRIC_PARETO:
            shape = (size,) if isinstance(size, int) else tuple(size)
            u = stream.random(shape + (2,))
            mag = (1.0 - u[..., 0]) ** (-1.0 / self.alpha)  # in (0,1] -> mag >= 1
            sign = np.where(u[..., 1] < 0.5, -1.0, 1.0)
            return m * sign * mag
        if self.kind is LawKind.GAUSSIAN:
            return m * stream.standard_normal(size)
        return m * stream.standard_t(self.alpha, size)


@dataclass(frozen=True)
class EnsembleConfig:
    """One matrix ensemble cell: X has ceil(aspect*n) rows and n columns."""

    n: int
    aspect: float
    law: TailLaw
    seed: int

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n!r}")
        if not (self.aspect > 1.0 and math.isfinite(self.aspect)):
            raise ValueError(f"aspect must be finite and > 1, got {self.aspect}")
        if not isinstance(self.seed, int) or not (0 <= self.seed < 2**64):
            raise ValueError("seed must be an integer in [0, 2**64)")

    @property
    def rows(self) -> int:
        # aspect > 1 guarantees rows > n.
        return math.ceil(self.aspect * self.n)


def derive_stream(seed: int, trial_index: int) -> Generator:
    """Independent, reproducible stream for (seed, trial_index).

    Counter-based generator keyed by the pair, so streams for different
    trial indices never overlap and any trial can be regenerated in
    isolation.
    """
    if not (0 <= seed < 2**64):
        raise ValueError("seed must be in [0, 2**64)")
    if not (0 <= trial_index < 2**64):
        raise ValueError("trial_index must be in [0, 2**64)")
    key = np.array([seed, trial_index], dtype=np.uint64)
    return Generator(Philox(key=key))


def sample_entry(law: TailLaw, stream: Generator) -> float:
    """Single draw; consumes the stream exactly like one entry of sample()."""
    return float(law.sample(stream, 1)[0])


def sample_matrix(config: EnsembleConfig) -> np.ndarray:
    """Sample the full matrix for a config, row-major entry order.

    Identical configs produce bitwise-identical matrices on any platform;
    the stream is keyed by (config.seed, 0).
    """
    stream = derive_stream(config.seed, 0)
    x = config.law.sample(stream, (config.rows, config.n))
    return np.ascontiguousarray(x, dtype=np.float64)
