"""Moments of free unitary Levy processes from their characteristic triplet.

The route: build the candidate S-transform as a truncated power series from
the triplet (drift, diffusivity, finite-atomic jump measure on the circle),
form the inverse moment generating function z*S(z)/(1+z), and extract the
moments by Lagrange compositional inversion.  All identities here are
formal power-series identities, exact order by order; arithmetic is
double-precision complex with guard terms beyond the requested order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

GUARD_TERMS = 8


class TripletError(ValueError):
    pass


@dataclass(frozen=True)
class CharTriplet:
    """Drift, diffusivity and finite-atomic circle measure sum w_j * delta
    at angle phi_j.  The measure may not charge the point 1 (angle 0)."""

    alpha: float
    b: float
    atoms: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if self.b < 0:
            raise TripletError("diffusivity b must be nonnegative")
        atoms = tuple((float(phi), float(w)) for phi, w in self.atoms)
        for phi, w in atoms:
            if w <= 0:
                raise TripletError("atom weights must be positive")
            if not (-math.pi < phi <= math.pi):
                raise TripletError(f"atom angle {phi} outside (-pi, pi]")
            if phi == 0:
                raise TripletError("jump measure may not charge the point 1")
        object.__setattr__(self, "atoms", atoms)

    @property
    def jump_rate(self) -> float:
        """Total mass of the jump measure."""
        return sum(w for _phi, w in self.atoms)

    def real_part_deficit(self) -> float:
        """integral of (Re(zeta) - 1) over the jump measure."""
        return sum(w * (math.cos(phi) - 1.0) for phi, w in self.atoms)

    def imag_compensator(self) -> float:
        """integral of Im(zeta) over the jump measure."""
        return sum(w * math.sin(phi) for phi, w in self.atoms)

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha,
            "b": self.b,
            "atoms": [{"angle": phi, "weight": w} for phi, w in self.atoms],
        }

    @classmethod
    def from_json(cls, data) -> "CharTriplet":
        if isinstance(data, str):
            data = json.loads(data)
        atoms = tuple((a["angle"], a["weight"]) for a in data.get("atoms", []))
        return cls(float(data["alpha"]), float(data["b"]), atoms)


# -- truncated power series helpers (coefficient arrays c[0..K]) --------------


def series_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    K = len(a) - 1
    return np.convolve(a, b)[: K + 1]


def series_exp(c: np.ndarray) -> np.ndarray:
    """exp of a series, via f' = c' f."""
    K = len(c) - 1
    f = np.zeros(K + 1, dtype=complex)
    f[0] = np.exp(c[0])
    for n in range(1, K + 1):
        f[n] = sum(j * c[j] * f[n - j] for j in range(1, n + 1)) / n
    return f


def series_reciprocal(a: np.ndarray) -> np.ndarray:
    """1/a for a series with a[0] != 0."""
    if a[0] == 0:
        raise ArithmeticError("series has no reciprocal: vanishing constant term")
    K = len(a) - 1
    r = np.zeros(K + 1, dtype=complex)
    r[0] = 1.0 / a[0]
    for n in range(1, K + 1):
        r[n] = -sum(a[j] * r[n - j] for j in range(1, n + 1)) / a[0]
    return r


def series_compose(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """f(g(z)) for g with g[0] = 0, by Horner in g."""
    if g[0] != 0:
        raise ArithmeticError("composition needs g(0) = 0")
    K = len(f) - 1
    out = np.zeros(K + 1, dtype=complex)
    out[0] = f[K]
    for n in range(K - 1, -1, -1):
        out = series_mul(out, g)
        out[0] += f[n]
    return out


def series_compositional_inverse(f: np.ndarray) -> np.ndarray:
    """The series g with f(g(z)) = z, via Lagrange inversion.

    Needs f[0] = 0, f[1] != 0.  g_n = (1/n) [w^(n-1)] (w/f(w))^n.
    """
    if f[0] != 0 or f[1] == 0:
        raise ArithmeticError("compositional inverse needs f(0)=0, f'(0)!=0")
    K = len(f) - 1
    h = series_reciprocal(f[1:])  # w/f(w) has coefficients of f shifted down
    g = np.zeros(K + 1, dtype=complex)
    power = np.zeros(K, dtype=complex)
    power[0] = 1.0
    for n in range(1, K + 1):
        power = np.convolve(power, h)[:K]
        g[n] = power[n - 1] / n
    return g


# -- the engine ----------------------------------------------------------------


@dataclass
class MomentSeries:
    """Moments m_0=1..m_K of the process at one time; negative indices are
    conjugates, by unitarity."""

    t: float
    values: np.ndarray = field(repr=False)

    def moment(self, n: int) -> complex:
        n = int(n)
        a = abs(n)
        if a >= len(self.values):
            raise IndexError(f"moment {n} beyond truncation order {len(self.values)-1}")
        v = complex(self.values[a])
        return v if n >= 0 else v.conjugate()

    @property
    def order(self) -> int:
        return len(self.values) - 1


def sigma_series(triplet: CharTriplet, t: float, order: int) -> np.ndarray:
    """Series of the S-transform of the process at time t, around z = 0.

    The exponent is linear in the triplet: -i*alpha*t + (b z + b/2) t plus,
    per atom, t*w*(i sin phi + (1-zeta)/(1 + z(1-zeta))) expanded
    geometrically in z.
    """
    if order < 0:
        raise ValueError("order must be nonnegative")
    E = np.zeros(order + 1, dtype=complex)
    E[0] = t * (-1j * triplet.alpha + triplet.b / 2.0)
    if order >= 1:
        E[1] += t * triplet.b
    for phi, w in triplet.atoms:
        one_minus = 1.0 - complex(math.cos(phi), math.sin(phi))
        E[0] += t * w * (1j * math.sin(phi) + one_minus)
        p = one_minus
        for n in range(1, order + 1):
            p *= -one_minus
            E[n] += t * w * p
    return series_exp(E)


def moments(triplet: CharTriplet, t: float, order: int) -> MomentSeries:
    """Moment sequence m_1..m_order at time t, via Lagrange inversion of
    z S(z)/(1+z)."""
    if order < 1:
        raise ValueError("order must be at least 1")
    if t == 0:
        return MomentSeries(t, np.ones(order + 1, dtype=complex))
    K = order + GUARD_TERMS
    S = sigma_series(triplet, t, K)
    one_plus_z = np.zeros(K + 1, dtype=complex)
    one_plus_z[0] = 1.0
    if K >= 1:
        one_plus_z[1] = 1.0
    inv_phi = series_mul(S, series_reciprocal(one_plus_z))
    inv_phi = np.concatenate([[0.0], inv_phi[:K]])  # multiply by z
    phi = series_compositional_inverse(inv_phi)
    values = phi[: order + 1].copy()
    values[0] = 1.0  # phi has no constant term; m_0 is 1 by unitality
    return MomentSeries(t, values)


def first_moment(triplet: CharTriplet, t: float) -> complex:
    """Closed form exp(i alpha t - b t/2 + t * sum w (cos phi - 1))."""
    return complex(
        np.exp(
            complex(0, triplet.alpha * t)
            - triplet.b * t / 2.0
            + t * triplet.real_part_deficit()
        )
    )


@dataclass(frozen=True)
class SupportArc:
    theta: float
    seminorm_dist: float
    halfwidth: float  # support is angles within halfwidth of alpha*t


def bm_support(alpha: float, b: float, t: float) -> SupportArc:
    """Spectral support data of the zero-jump process at time t.

    theta = |alpha| t + sqrt((4-bt)bt)/2 + arccos(1 - bt/2); the distance
    from 1 to the farthest support point is 2 sin(theta/2).  Only valid
    while the support is a proper arc (bt <= 4).
    """
    bt = b * t
    if bt > 4:
        raise ValueError("support wraps the circle: need b*t <= 4")
    halfwidth = math.sqrt((4.0 - bt) * bt) / 2.0 + math.acos(1.0 - bt / 2.0)
    theta = abs(alpha) * t + halfwidth
    return SupportArc(theta=theta, seminorm_dist=2.0 * math.sin(min(theta, math.pi) / 2.0), halfwidth=halfwidth)
