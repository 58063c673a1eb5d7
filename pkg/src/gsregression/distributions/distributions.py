from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import special, stats

from gsregression.utils.custom_exceptions import InvalidDfError, InvalidProbabilityError

ALTERNATIVES = ("greater", "less", "two-sided")

_UNIFORM_BITS = 53
# largest double below 1; (2**53 - 1 + 0.5) / 2**53 rounds up to 1.0
_UNIFORM_MAX = float(np.nextafter(1.0, 0.0))


@dataclass(frozen=True)
class Rng:
    """
    Seed of a reproducible random stream.

    Attributes:
        seed (int): 64-bit unsigned master seed.
        stream (int): Index of the substream; replicate j of a simulation uses stream j.
    """

    seed: int
    stream: int = 0

    def substream(self, stream: int) -> "Rng":
        return Rng(seed=self.seed, stream=stream)

    def generator(self) -> np.random.Generator:
        """
        Return a fresh numpy Generator for this (seed, stream) pair.

        The bit generator is Philox, a counter-based generator, keyed through a SeedSequence
        whose spawn key is the stream index.
        """
        sequence = np.random.SeedSequence(
            entropy=int(self.seed) % 2**64, spawn_key=(int(self.stream),)
        )
        return np.random.Generator(np.random.Philox(sequence))


def _check_df(df: float):
    if not df >= 1:
        raise InvalidDfError(f"degrees of freedom must be >= 1, got {df}")


def t_pdf(x: float, df: int) -> float:
    _check_df(df)
    return float(stats.t.pdf(x, df))


def t_cdf(x: float, df: int) -> float:
    """
    Central Student-t distribution function via the regularised incomplete beta function.

    P(T <= x) = 1 - I_{df/(df+x^2)}(df/2, 1/2)/2 for x >= 0, and the mirror image below zero,
    so t_cdf(-x) + t_cdf(x) = 1 holds to rounding.

    Args:
        x (float): Point of evaluation.
        df (int): Degrees of freedom, at least 1.

    Returns:
        float: P(T <= x).
    """
    _check_df(df)
    x = float(x)
    if x == 0.0:
        return 0.5
    tail = 0.5 * special.betainc(df / 2.0, 0.5, df / (df + x * x))
    return float(1.0 - tail) if x > 0 else float(tail)


def t_sf(x: float, df: int) -> float:
    """Upper tail P(T > x), computed without cancellation."""
    return t_cdf(-x, df)


def t_quantile(p: float, df: int) -> float:
    """
    Inverse of t_cdf.

    Starts from scipy's stdtrit and applies Newton steps on t_cdf until the residual is
    below 1e-13.

    Raises:
        InvalidProbabilityError: If p is not strictly between 0 and 1.
    """
    if not 0.0 < p < 1.0:
        raise InvalidProbabilityError(f"probability must lie in (0, 1), got {p}")
    _check_df(df)
    if p == 0.5:
        return 0.0
    x = float(special.stdtrit(df, p))
    for _ in range(4):
        # residual taken in the tail nearest to p
        if p > 0.5:
            residual = (1.0 - p) - t_sf(x, df)
        else:
            residual = t_cdf(x, df) - p
        density = t_pdf(x, df)
        if density == 0.0 or abs(residual) < 1e-15:
            break
        x -= residual / density
    return x


def noncentral_t_sf(x: float, df: int, ncp: float) -> float:
    """
    Upper tail P(T' > x) of the noncentral t distribution.

    Args:
        x (float): Critical value.
        df (int): Degrees of freedom.
        ncp (float): Noncentrality parameter.

    Returns:
        float: The tail probability; the central t tail when ncp is zero.
    """
    _check_df(df)
    if ncp == 0:
        return t_sf(x, df)
    return float(stats.nct.sf(x, df, ncp))


def sample_normal(rng: Rng, n: int) -> np.ndarray:
    """
    Draw n standard normal variates by inversion of uniforms on (0, 1).

    The same Rng always yields the same draws.
    """
    if n < 0:
        raise ValueError(f"sample size must be non-negative, got {n}")
    if n == 0:
        return np.empty(0)
    integers = rng.generator().integers(0, 2**_UNIFORM_BITS, size=n, dtype=np.int64)
    uniforms = np.minimum((integers + 0.5) / 2.0**_UNIFORM_BITS, _UNIFORM_MAX)
    return special.ndtri(uniforms)


def p_values(
    t_stat: np.ndarray, df: int, alternative: str = "greater"
) -> Tuple[np.ndarray, np.ndarray]:
    """
    One-sided and two-sided p-values of t statistics on df degrees of freedom.

    Args:
        t_stat (np.ndarray): t statistics.
        df (int): Residual degrees of freedom.
        alternative (str): Direction of the one-sided p-value: "greater" (H1: coefficient > 0),
            "less", or "two-sided" (the one-sided column then repeats the two-sided p-value).

    Returns:
        Tuple[np.ndarray, np.ndarray]: (one-sided p-values, two-sided p-values).
    """
    if alternative not in ALTERNATIVES:
        raise ValueError(f"alternative must be one of {ALTERNATIVES}, got {alternative!r}")
    t_stat = np.atleast_1d(np.asarray(t_stat, dtype=float))
    upper = np.array([t_sf(t, df) for t in t_stat])
    lower = np.array([t_cdf(t, df) for t in t_stat])
    two_sided = 2.0 * np.minimum(upper, lower)
    if alternative == "greater":
        one_sided = upper
    elif alternative == "less":
        one_sided = lower
    else:
        one_sided = two_sided
    return one_sided, two_sided
