"""Closed-form spectral efficiency of the regular sparse ensemble.

Optimum (joint) decoding and per-user LMMSE filtering both admit closed
forms built from two algebraic kernels F and G of the derived ensemble
constants.  Every kernel and capacity expression here is arranged so that
small-SNR evaluation keeps full relative precision (conjugate forms plus
log1p), which the extreme-SNR validation relies on; an independent route
integrates log2(1 + snr*lam) against the limiting spectrum and serves as
the oracle for the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, NumericalError
from .spectral import (
    DerivedParams,
    SpectralDensity,
    SystemConfig,
    derive_params,
    integrate_against_density,
    spectral_density,
    stieltjes,
)
from .units import LN2

__all__ = [
    "CapacityResult",
    "MmseError",
    "kernel_F",
    "kernel_G",
    "capacity_optimum",
    "capacity_integral_oracle",
    "capacity_lmmse",
    "lmmse_error",
]


@dataclass(frozen=True)
class CapacityResult:
    """Spectral efficiency in bits/s/Hz for one config and receiver."""

    config: SystemConfig
    receiver: str  # "optimum" | "lmmse"
    spectral_efficiency: float
    route: str  # "closed_form" | "integral_oracle"


@dataclass(frozen=True)
class MmseError:
    """Large-system per-user LMMSE diagnostics: MMSE m1 and output SINR."""

    config: SystemConfig
    m1: float
    sinr: float


def _check_kernel_args(x: float, z: float) -> tuple[float, float]:
    x = float(x)
    z = float(z)
    if not math.isfinite(x) or x < 0.0:
        raise DomainError(f"kernel argument x must be finite and >= 0, got {x!r}")
    if not math.isfinite(z) or z < 0.0:
        raise DomainError(f"kernel argument z must be finite and >= 0, got {z!r}")
    return x, z


def kernel_F(x: float, z: float) -> float:
    """F(x, z) = (sqrt(x(1+sqrt z)^2 + 1) - sqrt(x(1-sqrt z)^2 + 1))^2.

    Evaluated via the conjugate form 16 x^2 z / (sum of the two roots)^2,
    which is exact for small x where the direct difference would cancel.
    """
    x, z = _check_kernel_args(x, z)
    rz = math.sqrt(z)
    a = (1.0 + rz) ** 2
    b = (1.0 - rz) ** 2
    s = math.sqrt(x * a + 1.0) + math.sqrt(x * b + 1.0)
    return 16.0 * x * x * z / (s * s)


def _kernel_G_excess(x: float, y: float, z: float) -> float:
    """G(x, y, z) - 1, accurate for small x where G -> 1.

    With A = y - (1-sqrt z)^2, B = y - (1+sqrt z)^2 the defining ratio is
    (num/den)^2, num = sqrt(A(x a + 1)) - sqrt(B(x b + 1)), den =
    sqrt(A) - sqrt(B).  num - den is computed term by term in conjugate
    form, then G - 1 = (num - den)(num + den)/den^2.
    """
    x, z = _check_kernel_args(x, z)
    y = float(y)
    if z == 0.0:
        raise DomainError("kernel_G requires z > 0")
    rz = math.sqrt(z)
    a = (1.0 + rz) ** 2
    b = (1.0 - rz) ** 2
    if not math.isfinite(y) or y < a:
        raise DomainError(f"kernel_G requires y >= (1 + sqrt z)^2 = {a!r}, got {y!r}")
    ra = math.sqrt(y - b)  # sqrt(A)
    rb = math.sqrt(y - a)  # sqrt(B)
    den = ra - rb
    # sqrt(1 + x a) - 1 without cancellation, likewise for b
    ea = x * a / (1.0 + math.sqrt(1.0 + x * a))
    eb = x * b / (1.0 + math.sqrt(1.0 + x * b))
    diff = ra * ea - rb * eb  # num - den
    return diff * (2.0 * den + diff) / (den * den)


def kernel_G(x: float, y: float, z: float) -> float:
    """Squared-ratio kernel; >= 1 for x >= 0 on its domain y >= (1+sqrt z)^2."""
    return 1.0 + _kernel_G_excess(x, y, z)


def _log1p_checked(u: float, what: str, config: SystemConfig) -> float:
    if not u > -1.0:
        raise NumericalError(
            f"log argument 1 + ({u!r}) <= 0 in {what} for d={config.d}, "
            f"beta_d={config.beta_d}, snr={config.snr!r}"
        )
    return math.log1p(u)


def capacity_optimum(config: SystemConfig) -> CapacityResult:
    """Optimum-decoding spectral efficiency, closed form, in bits/s/Hz."""
    p = derive_params(config)
    snr = config.snr
    d, beta_d = config.d, config.beta_d

    x = p.gamma * snr
    f4 = kernel_F(x, p.beta_tilde) / 4.0
    # coefficients are exact rationals of the two integers
    c1 = Fraction(beta_d * (d - 1) + d, 2 * d)  # (beta(d-1) + 1)/2
    c2 = Fraction(beta_d - d, d)  # beta - 1
    c3 = Fraction(beta_d * (d - 1) - d, 2 * d)  # (beta(d-1) - 1)/2

    nats = float(c1) * _log1p_checked((p.gamma + p.alpha) * snr - f4, "optimum term 1", config)
    if c2 != 0:
        nats += float(c2) * _log1p_checked(p.alpha * snr - f4, "optimum term 2", config)
    if c3 != 0:
        # log((1 + beta_d snr)^2 / G) split so both pieces use log1p
        g_excess = _kernel_G_excess(x, p.zeta, p.beta_tilde)
        nats -= float(c3) * (
            2.0 * math.log1p(beta_d * snr) - _log1p_checked(g_excess, "optimum term 3", config)
        )
    return CapacityResult(config, "optimum", nats / LN2, "closed_form")


def capacity_integral_oracle(config: SystemConfig) -> CapacityResult:
    """Independent route: integrate log2(1 + snr*lam) against the spectrum."""
    snr = config.snr
    density = spectral_density(config)
    value = integrate_against_density(density, lambda lam: np.log1p(snr * lam) / LN2)
    return CapacityResult(config, "optimum", value, "integral_oracle")


def capacity_lmmse(config: SystemConfig) -> CapacityResult:
    """LMMSE-then-single-user-decoding spectral efficiency, closed form."""
    p = derive_params(config)
    snr = config.snr
    d = config.d
    f4 = kernel_F(p.gamma * snr, p.beta_tilde) / 4.0
    nats = _log1p_checked(config.beta_d * snr, "lmmse numerator", config) - _log1p_checked(
        d * p.gamma * snr - d * f4, "lmmse denominator", config
    )
    return CapacityResult(config, "lmmse", p.beta * nats / LN2, "closed_form")


def lmmse_error(config: SystemConfig) -> MmseError:
    """Large-system limit m1 of the per-user MMSE, and the output SINR.

    m1 = (1/snr) * m_R(-1/snr), where m_R is the Stieltjes transform of the
    limiting law of the user-side Gram matrix (1/d) A^H A; that law is the
    resource-side law rescaled by 1/beta with the zero-padding mass moved
    accordingly.
    """
    p = derive_params(config)
    snr = config.snr
    if snr == 0.0:
        return MmseError(config, m1=1.0, sinr=0.0)
    z = -1.0 / snr
    beta = p.beta
    m_outer = stieltjes(p, z).m_outer
    m_user = m_outer / beta + (1.0 / beta - 1.0) / z
    if abs(m_user.imag) > 1e-13 * abs(m_user.real):
        raise NumericalError(f"user-side transform not real at z={z!r}: {m_user!r}")
    m1 = m_user.real / snr
    if not 0.0 < m1 <= 1.0 + 1e-12:
        raise NumericalError(f"m1={m1!r} outside (0, 1] for {config!r}")
    m1 = min(m1, 1.0)
    return MmseError(config, m1=m1, sinr=1.0 / m1 - 1.0)
