"""Closed-form constants for the far-vertex distance of the typical cell.

Everything here is deterministic double-precision arithmetic. Products of
gamma/beta factors are assembled in log space and exponentiated last, so the
formulas stay finite up to the supported dimension cap.
"""

import math

from .errors import AlphaOutOfRange, NegativeThreshold

MAX_DIM = 12


def validate_dim(d):
    if not isinstance(d, (int,)) or isinstance(d, bool):
        raise TypeError(f"dimension must be an integer, got {type(d).__name__}")
    if d < 2 or d > MAX_DIM:
        raise ValueError(f"dimension must be in [2, {MAX_DIM}], got {d}")
    return d


def validate_alpha(d, alpha):
    validate_dim(d)
    a = float(alpha)
    if not math.isfinite(a) or a <= -d:
        raise AlphaOutOfRange(f"alpha must satisfy alpha > -d = {-d}, got {alpha}")
    return a


def _log_beta(a, b):
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def unit_ball_volume(d):
    """Volume of the unit ball of R^d: pi^{d/2} / Gamma(d/2 + 1)."""
    validate_dim(d)
    return math.exp(0.5 * d * math.log(math.pi) - math.lgamma(0.5 * d + 1))


def sphere_surface(d):
    """Surface measure of the unit sphere of R^d, i.e. d * unit_ball_volume(d)."""
    return d * unit_ball_volume(d)


def c_d(d):
    """Mean simplex volume for sphere points under the hull-of-projections condition.

    Closed form: Gamma(d/2)^d / (2^{d-1} sqrt(pi) (d-1)! Gamma((d+1)/2)^{d-1}).
    """
    validate_dim(d)
    log = (
        d * math.lgamma(0.5 * d)
        - (d - 1) * math.log(2.0)
        - 0.5 * math.log(math.pi)
        - math.lgamma(d)
        - (d - 1) * math.lgamma(0.5 * (d + 1))
    )
    return math.exp(log)


def c_d_recursion_step(d):
    """One step of the recursion: c_d(d) = step(d) * c_d(d-1), d >= 3."""
    validate_dim(d)
    if d < 3:
        raise ValueError("recursion step needs d >= 3")
    log_ratio = _log_beta(0.5 * d, 0.5) - _log_beta(0.5 * (d - 1), 0.5)
    return math.exp((d - 1) * log_ratio) / (2.0 * (d - 1))


def k_d_alpha(d, alpha):
    """Radial-power measure of a unit ball adjacent to the origin.

    Equals (d-1) kappa_{d-1} 2^{d+alpha-1} / (d+alpha) * B((d-1)/2, (d+alpha+1)/2);
    reduces to unit_ball_volume(d) at alpha = 0.
    """
    a = validate_alpha(d, alpha)
    log = (
        math.log(d - 1.0)
        + 0.5 * (d - 1) * math.log(math.pi)
        - math.lgamma(0.5 * (d - 1) + 1)
        + (d + a - 1) * math.log(2.0)
        - math.log(d + a)
        + _log_beta(0.5 * (d - 1), 0.5 * (d + a + 1))
    )
    return math.exp(log)


def c_d_alpha(d, alpha):
    """Weighted conditioned mean simplex volume for the radial-power model.

    Closed form:
    2^{d^2 + d(alpha-2) + 1} / (pi^{d/2} (d-1)!) * Gamma(d/2)
      * B((d+alpha)/2, d/2)^d / B((d+alpha)/2, 1/2).
    Reduces to c_d(d) at alpha = 0.
    """
    a = validate_alpha(d, alpha)
    log = (
        (d * d + d * (a - 2) + 1) * math.log(2.0)
        - 0.5 * d * math.log(math.pi)
        - math.lgamma(d)
        + math.lgamma(0.5 * d)
        + d * _log_beta(0.5 * (d + a), 0.5 * d)
        - _log_beta(0.5 * (d + a), 0.5)
    )
    return math.exp(log)


def upper_incomplete_gamma_int(s, x):
    """Gamma(s, x) for integer s >= 1 via the exact finite sum.

    Gamma(s, x) = (s-1)! e^{-x} sum_{i=0}^{s-1} x^i / i!. Each term is computed
    as exp(i log x - x - log i!) so large x degrades gracefully to 0 instead of
    overflowing intermediates.
    """
    if not isinstance(s, int) or isinstance(s, bool) or s < 1:
        raise ValueError(f"s must be an integer >= 1, got {s}")
    x = float(x)
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    if x == 0.0:
        return math.gamma(s)
    logx = math.log(x)
    total = math.fsum(math.exp(i * logx - x - math.lgamma(i + 1)) for i in range(s))
    return math.gamma(s) * total


def expected_pointy_count(d, alpha, t):
    """Exact expected number of pointy vertices at distance >= t.

    (d kappa_d)^{d+1} C_{d,alpha} Gamma(d, K t^{d+alpha}) / ((d+alpha) K^d)
    with K = k_d_alpha(d, alpha). At alpha = 0 this equals the finite sum
    (d kappa_d)^d C_d sum_i t^{di} kappa_d^{i-d+1} (d-1)!/i! e^{-kappa_d t^d}.
    """
    a = validate_alpha(d, alpha)
    t = float(t)
    if t < 0:
        raise NegativeThreshold(f"t must be >= 0, got {t}")
    K = k_d_alpha(d, a)
    log_pref = (
        (d + 1) * math.log(sphere_surface(d))
        + math.log(c_d_alpha(d, a))
        - math.log(d + a)
        - d * math.log(K)
    )
    return math.exp(log_pref) * upper_incomplete_gamma_int(d, K * t ** (d + a))


def tail_asymptotic(d, alpha, t):
    """Leading-order tail of P(far-vertex distance >= t) for the alpha model.

    Equals the i = d-1 term of expected_pointy_count:
    (d kappa_d)^{d+1} C_{d,alpha} / ((d+alpha) K) * t^{(d+alpha)(d-1)} e^{-K t^{d+alpha}}.
    """
    a = validate_alpha(d, alpha)
    t = float(t)
    if t <= 0:
        raise NegativeThreshold(f"t must be > 0, got {t}")
    K = k_d_alpha(d, a)
    log_pref = (
        (d + 1) * math.log(sphere_surface(d))
        + math.log(c_d_alpha(d, a))
        - math.log(d + a)
        - math.log(K)
    )
    log_val = log_pref + (d + a) * (d - 1) * math.log(t) - K * t ** (d + a)
    return math.exp(log_val)


def tail_prefactor_explicit(d, alpha):
    """The fully expanded tail prefactor, for cross-checking tail_asymptotic.

    2^{d^2+d(alpha-2)-(alpha-2)} pi^{d(d-1)/2} / (d-1)!
      * (Gamma((d+alpha)/2) / Gamma(d+alpha/2))^{d-1}
    """
    a = validate_alpha(d, alpha)
    log = (
        (d * d + d * (a - 2) - (a - 2)) * math.log(2.0)
        + 0.5 * d * (d - 1) * math.log(math.pi)
        - math.lgamma(d)
        + (d - 1) * (math.lgamma(0.5 * (d + a)) - math.lgamma(d + 0.5 * a))
    )
    return math.exp(log)


def extremal_norm_constants(d):
    """Normalization constants (alpha1, alpha1', theta) for box maxima.

    alpha1  = 1/d! (sqrt(pi) Gamma(d/2+1) / Gamma((d+1)/2))^{d-1}
    alpha1' = d^d kappa_d C_d
    theta   = alpha1 / alpha1', which must equal 1/(2d).
    """
    validate_dim(d)
    log_a1 = -math.lgamma(d + 1) + (d - 1) * (
        0.5 * math.log(math.pi) + math.lgamma(0.5 * d + 1) - math.lgamma(0.5 * (d + 1))
    )
    alpha1 = math.exp(log_a1)
    alpha1_prime = d**d * unit_ball_volume(d) * c_d(d)
    theta = alpha1 / alpha1_prime
    assert abs(theta - 1.0 / (2 * d)) < 1e-12, theta
    return alpha1, alpha1_prime, theta


def miles_mean_simplex_volume(d):
    """Unconditioned mean simplex volume for d+1 uniform sphere points."""
    validate_dim(d)
    log = (
        -math.lgamma(d + 1)
        + math.lgamma(0.5 * (d * d + 1))
        - math.lgamma(0.5 * d * d)
        + math.lgamma(0.5 * d)
        - math.lgamma(0.5)
        + d * (math.lgamma(0.5 * d) - math.lgamma(0.5 * (d + 1)))
    )
    return math.exp(log)


def wendel_probability(d):
    """Probability that the projected unit vectors capture the origin: 2^{1-d}."""
    validate_dim(d)
    return 2.0 ** (1 - d)


def conditional_mean_ratio(d):
    """Ratio of the conditioned to the unconditioned mean simplex volume.

    d Gamma(d^2/2) Gamma((d+1)/2) / (Gamma((d^2+1)/2) Gamma(d/2)); always >= 1.
    """
    validate_dim(d)
    log = (
        math.log(d)
        + math.lgamma(0.5 * d * d)
        + math.lgamma(0.5 * (d + 1))
        - math.lgamma(0.5 * (d * d + 1))
        - math.lgamma(0.5 * d)
    )
    return math.exp(log)
