# SPDX-License-Identifier: GPL-3.0-or-later
# SPDX-FileCopyrightText: 2026 tclfit contributors
"""Analytic Karhunen-Loeve eigenpairs of two stationary kernels.

Time is normalized to x = t / t_train, so the training window is [0, 1].

Exponential kernel k(x, y) = sigma^2 exp(-|x - y| / kappa) on [0, 1].
Eigenvalues are 2 sigma^2 kappa / (1 + (kappa w)^2) where w runs over the
positive roots of

    (1 - kappa w tan(w / 2)) (kappa w + tan(w / 2)) = 0

Squared-exponential kernel k(x, y) = exp(-(x - y)^2 / (2 kappa^2)) with
closed-form eigenpairs under the Gaussian measure N(0, sigma^2). The
functions used by the models are those eigenfunctions orthonormalized on
the training window by Gauss-Legendre quadrature.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import StrEnum
from functools import cache
from math import factorial, pi, sqrt
from typing import TYPE_CHECKING

import numpy as np
from numpy.polynomial.hermite import hermvander
from numpy.polynomial.legendre import leggauss
from scipy.linalg import solve_triangular
from scipy.optimize import brentq

from .exceptions import InvalidConfigError, RootBracketError
from .tclfit_utils import SettingFieldMetadata

if TYPE_CHECKING:
    from numpy.typing import ArrayLike

    from .operators import RealArray


LOGGER = logging.getLogger(__name__)

ROOT_RESIDUAL_TOLERANCE = 1e-10
ROOT_POLISH_STEPS = 3
WINDOW_QUADRATURE_POINTS = 200
WINDOW_RANK_TOLERANCE = 1e-12


class KernelKind(StrEnum):
    EXPONENTIAL = "exponential"
    SQUARED_EXPONENTIAL = "squared-exponential"


@dataclass(frozen=True)
class KLConfig:
    kernel: KernelKind = field(
        default=KernelKind.EXPONENTIAL,
        metadata=SettingFieldMetadata(
            pretty_name="Kernel",
            description="Covariance kernel of the expansion.",
        ),
    )
    sigma: float = field(
        default=1.0,
        metadata=SettingFieldMetadata(
            pretty_name="Sigma",
            description=(
                "Kernel amplitude (exponential) or standard deviation of "
                "the weighting measure (squared exponential)."
            ),
        ),
    )
    kappa: float = field(
        default=1.0,
        metadata=SettingFieldMetadata(
            pretty_name="Kappa",
            description="Correlation length in normalized time.",
        ),
    )
    order: int = field(
        default=4,
        metadata=SettingFieldMetadata(
            pretty_name="Truncation order",
            description="Number of eigenfunctions kept per coefficient.",
        ),
    )
    t_train: float = field(
        default=1.0,
        metadata=SettingFieldMetadata(
            pretty_name="Training window",
            description="Physical time in microseconds mapped to x = 1.",
        ),
    )

    def __post_init__(self) -> None:
        object.__setattr__(self, "kernel", KernelKind(self.kernel))
        if not (self.sigma > 0.0 and self.kappa > 0.0):
            raise InvalidConfigError(
                f"Sigma and kappa must be positive, got {self.sigma}, {self.kappa}"
            )

        if self.order < 0:
            raise InvalidConfigError(
                f"Truncation order must be non-negative, got {self.order}"
            )

        if not self.t_train > 0.0:
            raise InvalidConfigError(
                f"Training window must be positive, got {self.t_train}"
            )

    def normalized_time(self, times: ArrayLike) -> RealArray:
        return np.asarray(times, dtype=np.float64) / self.t_train


@dataclass(frozen=True)
class KLEigenpair:
    index: int
    eigenvalue: float
    # Positive characteristic root, exponential kernel only
    root: float | None
    normalization: float


# region Exponential kernel


def _even_factor(omega: float, kappa: float) -> float:
    return float(np.cos(omega / 2) - kappa * omega * np.sin(omega / 2))


def _odd_factor(omega: float, kappa: float) -> float:
    return float(kappa * omega * np.cos(omega / 2) + np.sin(omega / 2))


def characteristic_residual(omega: ArrayLike, kappa: float) -> RealArray:
    """Characteristic equation multiplied by cos^2(w / 2).

    Free of the tangent poles, zero exactly at the roots.
    """
    w = np.asarray(omega, dtype=np.float64)
    half = w / 2
    return (np.cos(half) - kappa * w * np.sin(half)) * (
        kappa * w * np.cos(half) + np.sin(half)
    )


def tangent_residual(omega: float, kappa: float, index: int) -> float:
    """Factor of the tangent-form equation that root number index solves.

    Even roots solve 1 - kappa w tan(w / 2) = 0, odd roots
    kappa w + tan(w / 2) = 0.
    """
    tangent = float(np.tan(omega / 2))
    if index % 2 == 0:
        return 1.0 - kappa * omega * tangent
    return kappa * omega + tangent


def _tangent_slope(omega: float, kappa: float, index: int) -> float:
    tangent = float(np.tan(omega / 2))
    secant_squared = 1.0 + tangent * tangent
    if index % 2 == 0:
        return -kappa * tangent - kappa * omega * secant_squared / 2
    return kappa + secant_squared / 2


def exponential_kernel(
    x: ArrayLike,
    y: ArrayLike,
    sigma: float,
    kappa: float,
) -> RealArray:
    return sigma**2 * np.exp(
        -np.abs(np.subtract.outer(np.asarray(x), np.asarray(y))) / kappa
    )


def _exponential_root(index: int, kappa: float) -> float:
    # Root number i sits between i pi and (i + 1) pi, even i on the
    # cosine factor and odd i on the sine factor.
    factor = _even_factor if index % 2 == 0 else _odd_factor
    low = index * pi
    high = (index + 1) * pi
    try:
        root = brentq(
            factor,
            low,
            high,
            args=(kappa,),
            xtol=1e-14,
            rtol=4 * np.finfo(float).eps,
            maxiter=200,
        )
    except (ValueError, RuntimeError) as e:
        raise RootBracketError(
            f"No root {index} of the characteristic equation in "
            f"({low:.6g}, {high:.6g}) for kappa {kappa:g}"
        ) from e

    # Newton polish on the tangent form, kept inside the bracket
    for _ in range(ROOT_POLISH_STEPS):
        step = tangent_residual(root, kappa, index) / _tangent_slope(
            root, kappa, index
        )
        if not low < root - step < high:
            break
        root -= step

    residual = abs(tangent_residual(root, kappa, index))
    if not residual < ROOT_RESIDUAL_TOLERANCE:
        raise RootBracketError(
            f"Root {index} at {root:.15g} leaves residual {residual:.3g}"
        )

    return float(root)


def kl_exponential_eigens(cfg: KLConfig) -> list[KLEigenpair]:
    if cfg.kernel != KernelKind.EXPONENTIAL:
        raise InvalidConfigError(f"Expected the exponential kernel, got {cfg.kernel}")

    pairs = []
    for index in range(cfg.order):
        root = _exponential_root(index, cfg.kappa)
        correction = np.sin(root) / (2 * root)
        norm_squared = 0.5 + correction if index % 2 == 0 else 0.5 - correction
        pairs.append(
            KLEigenpair(
                index=index,
                eigenvalue=2 * cfg.sigma**2 * cfg.kappa / (1 + (cfg.kappa * root) ** 2),
                root=root,
                normalization=1 / sqrt(norm_squared),
            )
        )

    LOGGER.debug(
        "Exponential kernel roots for kappa %g: %s",
        cfg.kappa,
        [pair.root for pair in pairs],
    )
    return pairs


# endregion Exponential kernel

# region Squared-exponential kernel


@dataclass(frozen=True)
class _SqExpConstants:
    a: float
    b: float
    c: float

    @classmethod
    def of(cls, cfg: KLConfig) -> _SqExpConstants:
        a = 1 / (4 * cfg.sigma**2)
        b = 1 / (2 * cfg.kappa**2)
        return cls(a=a, b=b, c=sqrt(a * a + 2 * a * b))

    @property
    def big_a(self) -> float:
        return self.a + self.b + self.c

    @property
    def ratio(self) -> float:
        return self.b / self.big_a


def sqexp_kernel(x: ArrayLike, y: ArrayLike, kappa: float) -> RealArray:
    difference = np.subtract.outer(np.asarray(x), np.asarray(y))
    return np.exp(-(difference**2) / (2 * kappa**2))


def sqexp_measure(x: ArrayLike, sigma: float) -> RealArray:
    """Density of N(0, sigma^2)."""
    points = np.asarray(x, dtype=np.float64)
    return np.exp(-(points**2) / (2 * sigma**2)) / sqrt(2 * pi * sigma**2)


def kl_sqexp_eigens(cfg: KLConfig) -> list[KLEigenpair]:
    if cfg.kernel != KernelKind.SQUARED_EXPONENTIAL:
        raise InvalidConfigError(
            f"Expected the squared-exponential kernel, got {cfg.kernel}"
        )

    constants = _SqExpConstants.of(cfg)
    leading = sqrt(2 * constants.a / constants.big_a)
    scale = sqrt(constants.a / constants.c)
    return [
        KLEigenpair(
            index=index,
            eigenvalue=leading * constants.ratio**index,
            root=None,
            normalization=1 / sqrt(scale * 2**index * factorial(index)),
        )
        for index in range(cfg.order)
    ]


# endregion Squared-exponential kernel


@cache
def kl_eigens(cfg: KLConfig) -> tuple[KLEigenpair, ...]:
    match cfg.kernel:
        case KernelKind.EXPONENTIAL:
            return tuple(kl_exponential_eigens(cfg))
        case KernelKind.SQUARED_EXPONENTIAL:
            return tuple(kl_sqexp_eigens(cfg))


def _pairs_or_default(
    cfg: KLConfig,
    pairs: tuple[KLEigenpair, ...] | list[KLEigenpair] | None,
) -> tuple[KLEigenpair, ...] | list[KLEigenpair]:
    return kl_eigens(cfg) if pairs is None else pairs


def hermite_eigenfunctions(
    cfg: KLConfig,
    x: ArrayLike,
    pairs: tuple[KLEigenpair, ...] | list[KLEigenpair] | None = None,
) -> RealArray:
    """Squared-exponential eigenfunctions normalized in L2 of N(0, sigma^2)."""
    points = np.atleast_1d(np.asarray(x, dtype=np.float64))
    pairs = _pairs_or_default(cfg, pairs)
    if not pairs:
        return np.zeros((len(points), 0))

    constants = _SqExpConstants.of(cfg)
    envelope = np.exp(-(constants.c - constants.a) * points**2)
    hermite = hermvander(sqrt(2 * constants.c) * points, len(pairs) - 1)
    normalization = np.array([pair.normalization for pair in pairs])
    return envelope[:, np.newaxis] * hermite * normalization


@cache
def window_transform(cfg: KLConfig) -> RealArray:
    """Upper-triangular map making the Hermite functions orthonormal on [0, 1].

    Gram-Schmidt in index order through a QR factorization of the
    quadrature-weighted values, so function i stays in the span of the
    first i + 1 Hermite functions.
    """
    nodes, weights = leggauss(WINDOW_QUADRATURE_POINTS)
    nodes = (nodes + 1) / 2
    weights = weights / 2
    weighted = np.sqrt(weights)[:, np.newaxis] * hermite_eigenfunctions(cfg, nodes)
    triangle = np.linalg.qr(weighted, mode="r")
    diagonal = np.diag(triangle)
    if np.min(np.abs(diagonal)) < WINDOW_RANK_TOLERANCE * np.max(np.abs(diagonal)):
        raise InvalidConfigError(
            f"Truncation order {cfg.order} is too high to orthonormalize the "
            "squared-exponential eigenfunctions on the training window"
        )

    triangle = triangle * np.sign(diagonal)[:, np.newaxis]
    transform = solve_triangular(triangle, np.eye(len(diagonal)))
    LOGGER.debug(
        "Window normalization of %d squared-exponential functions, "
        "condition %.3g",
        len(diagonal),
        np.max(np.abs(diagonal)) / np.min(np.abs(diagonal)),
    )
    return transform


def eigenfunctions(
    cfg: KLConfig,
    x: ArrayLike,
    pairs: tuple[KLEigenpair, ...] | list[KLEigenpair] | None = None,
) -> RealArray:
    """Eigenfunctions phi_i(x), orthonormal on [0, 1], shape (len(x), order)."""
    points = np.atleast_1d(np.asarray(x, dtype=np.float64))
    pairs = _pairs_or_default(cfg, pairs)
    if not pairs:
        return np.zeros((len(points), 0))

    match cfg.kernel:
        case KernelKind.EXPONENTIAL:
            normalization = np.array([pair.normalization for pair in pairs])
            roots = np.array([pair.root for pair in pairs], dtype=np.float64)
            phase = np.multiply.outer(points - 0.5, roots)
            is_even = np.arange(len(pairs)) % 2 == 0
            values = np.where(is_even, np.cos(phase), np.sin(phase))
            return values * normalization
        case KernelKind.SQUARED_EXPONENTIAL:
            kept = [pair.index for pair in pairs]
            transform = window_transform(cfg)[np.ix_(kept, kept)]
            return hermite_eigenfunctions(cfg, points, pairs) @ transform


def scaled_eigenfunctions(cfg: KLConfig, times: ArrayLike) -> RealArray:
    """sqrt(lambda_i) phi_i(t / t_train), shape (len(times), order)."""
    pairs = kl_eigens(cfg)
    weights = np.sqrt([pair.eigenvalue for pair in pairs])
    return eigenfunctions(cfg, cfg.normalized_time(times), pairs) * weights
