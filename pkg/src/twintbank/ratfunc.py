"""Polynomials and rational functions of the complex frequency s.

Everything downstream — the closed-form filter model, the netlist engine,
calibration — funnels through the two value types here.  Coefficients are
stored ascending (index k holds the s**k coefficient), matching the way
low-order-first transfer functions are written and making table-style
comparisons of individual coefficients literal.

All quantities are SI internally: ohms, farads, rad/s.  Display layers
convert to kHz/kohm/nF, never this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ToolkitError


class NoBracketError(ToolkitError):
    """A bracketing root search found no sign change on its interval."""


class PoleOnAxisError(ToolkitError):
    """Evaluation requested at a frequency where the denominator vanishes."""


class RealQuadraticError(ToolkitError):
    """The deflated quadratic factor has real roots, so Q is undefined."""


# Relative threshold below which a constant term is treated as zero when
# choosing the normalization pivot (denominator constant vs. leading).
_CONST_EPS = 1e-12


@dataclass(frozen=True)
class Polynomial:
    """Real-coefficient polynomial, ascending powers of s.

    Trailing exact zeros are trimmed on construction so the leading stored
    coefficient is nonzero unless the polynomial is identically zero.
    """

    coeffs: tuple[float, ...]

    def __post_init__(self) -> None:
        cs = [float(c) for c in self.coeffs]
        if not cs:
            cs = [0.0]
        while len(cs) > 1 and cs[-1] == 0.0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return self.coeffs == (0.0,)

    @property
    def leading(self) -> float:
        return self.coeffs[-1]

    def __call__(self, s: complex) -> complex:
        return poly_eval(self, s)

    def eval_real(self, x: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> Polynomial:
        if self.degree == 0:
            return Polynomial((0.0,))
        return Polynomial(tuple(k * c for k, c in enumerate(self.coeffs) if k))

    def scaled(self, k: float) -> Polynomial:
        return Polynomial(tuple(k * c for c in self.coeffs))

    def __neg__(self) -> Polynomial:
        return self.scaled(-1.0)

    def __add__(self, other: Polynomial) -> Polynomial:
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Polynomial(tuple(out))

    def __sub__(self, other: Polynomial) -> Polynomial:
        return self + (-other)

    def __mul__(self, other: Polynomial) -> Polynomial:
        if self.is_zero or other.is_zero:
            return Polynomial((0.0,))
        out = [0.0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0.0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(tuple(out))


@dataclass(frozen=True)
class RationalFunction:
    """sign * num(s) / den(s), with the overall minus of inverting stages
    carried in ``sign`` so both polynomials keep positive normalization."""

    num: Polynomial
    den: Polynomial
    sign: int = 1

    def __post_init__(self) -> None:
        num, den = self.num, self.den
        if not isinstance(num, Polynomial):
            object.__setattr__(self, "num", Polynomial(tuple(num)))
        if not isinstance(den, Polynomial):
            den = Polynomial(tuple(den))
            object.__setattr__(self, "den", den)
        if self.den.is_zero:
            raise ValueError("denominator is identically zero")
        if self.sign not in (-1, 1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign!r}")

    def normalized(self) -> RationalFunction:
        return _normalized(self.num, self.den, self.sign)


@dataclass(frozen=True)
class BandpassFactors:
    """Denominator factored as (s + a)(s**2 + (omega_n/q) s + omega_n**2),
    with gain_scale = sign * (num leading) / (den leading)."""

    a: float
    omega_n: float
    q: float
    gain_scale: float


def poly_eval(p: Polynomial, s: complex) -> complex:
    """Evaluate p at a complex frequency by nested multiplication."""
    acc: complex = 0.0
    for c in reversed(p.coeffs):
        acc = acc * s + c
    return acc


def ratfunc_eval(h: RationalFunction, omega: float) -> complex:
    """Evaluate H(j*omega).  omega is in rad/s."""
    s = 1j * omega
    d = poly_eval(h.den, s)
    if abs(d) < 1e-300:
        raise PoleOnAxisError(f"denominator vanishes at omega={omega!r} rad/s")
    return h.sign * poly_eval(h.num, s) / d


def real_roots_cubic(p: Polynomial) -> tuple[float, Polynomial]:
    """Factor one real root out of a degree-3 polynomial.

    Intended for denominators with all-positive coefficients, which have
    exactly one (negative) real root.  The root is located by bracketed
    bisection to 1e-12 relative width, polished with one Newton step, and
    divided out; returns ``(root, quadratic)`` with the quadratic
    satisfying (s - root) * quadratic == p up to rounding.

    The bracket starts from the Cauchy bound on root magnitude, widened to
    at least 10*|a2/a3| so shallow real roots far from the origin are
    covered too.
    """
    if p.degree != 3:
        raise ValueError(f"expected degree 3, got degree {p.degree}")
    c0, c1, c2, c3 = p.coeffs
    cauchy = 1.0 + max(abs(c0), abs(c1), abs(c2)) / abs(c3)
    lo = -max(cauchy, 10.0 * abs(c2 / c3))
    hi = 0.0
    flo = p.eval_real(lo)
    fhi = p.eval_real(hi)
    if flo == 0.0:
        root = lo
    elif flo * fhi > 0.0:
        raise NoBracketError(
            f"no sign change on [{lo:g}, 0): p({lo:g})={flo:g}, p(0)={fhi:g}")
    else:
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if hi - lo <= 1e-12 * max(abs(lo), abs(hi)):
                break
            fmid = p.eval_real(mid)
            if fmid == 0.0:
                lo = hi = mid
                break
            if (fmid < 0.0) == (flo < 0.0):
                lo, flo = mid, fmid
            else:
                hi = mid
        root = 0.5 * (lo + hi)
        slope = p.derivative().eval_real(root)
        if slope != 0.0:
            root -= p.eval_real(root) / slope

    q2 = c3
    q1 = c2 + root * q2
    q0 = c1 + root * q1
    return root, Polynomial((q0, q1, q2))


def to_bandpass_factors(h: RationalFunction) -> BandpassFactors:
    """Factor a degree-3 denominator into a real pole and a resonant pair.

    omega_n and q come from the monic quadratic factor:
    omega_n = sqrt(constant), q = omega_n / (linear coefficient).
    """
    if h.den.degree != 3:
        raise ValueError(f"denominator degree {h.den.degree}, expected 3")
    root, quad = real_roots_cubic(h.den)
    q0, q1, q2 = quad.coeffs
    if q1 * q1 - 4.0 * q2 * q0 >= 0.0:
        raise RealQuadraticError(
            "quadratic factor has real roots; no resonant pair")
    m0 = q0 / q2
    m1 = q1 / q2
    omega_n = math.sqrt(m0)
    return BandpassFactors(
        a=-root,
        omega_n=omega_n,
        q=omega_n / m1,
        gain_scale=h.sign * h.num.leading / h.den.leading,
    )


def cancel_pole_zero(h: RationalFunction, rel_tol: float) -> RationalFunction:
    """Remove one matching real pole/zero pair, if any.

    A zero z and pole p are considered matching when |z - p| is within
    rel_tol of max(|z|, |p|).  The best-matching pair is divided out and
    the result renormalized; when nothing matches, h is returned as-is.
    Real roots are searched for factors of degree <= 3 only.
    """
    if rel_tol <= 0.0:
        raise ValueError("rel_tol must be positive")
    zeros = _real_roots(h.num)
    poles = _real_roots(h.den)
    best: tuple[float, float, float] | None = None
    for z in zeros:
        for p in poles:
            scale = max(abs(z), abs(p))
            if scale == 0.0:
                continue
            gap = abs(z - p) / scale
            if best is None or gap < best[0]:
                best = (gap, z, p)
    if best is None or best[0] > rel_tol:
        return h
    _, z, p = best
    return _normalized(_deflate(h.num, z), _deflate(h.den, p), h.sign)


def _deflate(p: Polynomial, root: float) -> Polynomial:
    """Synthetic division of p by (s - root); the remainder is dropped."""
    cs = p.coeffs
    n = len(cs) - 1
    out = [0.0] * n
    out[n - 1] = cs[n]
    for k in range(n - 1, 0, -1):
        out[k - 1] = cs[k] + root * out[k]
    return Polynomial(tuple(out))


def _real_roots(p: Polynomial) -> list[float]:
    # Degrees above 3 are outside this toolkit's factoring scope and
    # return no candidates (the caller then leaves h unchanged).
    cs = p.coeffs
    if p.is_zero or p.degree == 0:
        return []
    if p.degree == 1:
        return [-cs[0] / cs[1]]
    if p.degree == 2:
        return _quadratic_real_roots(cs[0], cs[1], cs[2])
    if p.degree == 3:
        try:
            root, quad = real_roots_cubic(p)
        except NoBracketError:
            return []
        q0, q1, q2 = quad.coeffs
        return [root] + _quadratic_real_roots(q0, q1, q2)
    return []


def _quadratic_real_roots(c0: float, c1: float, c2: float) -> list[float]:
    disc = c1 * c1 - 4.0 * c2 * c0
    if disc < 0.0:
        return []
    sq = math.sqrt(disc)
    # Citardauq-style pairing avoids cancellation between -c1 and sq.
    t = -0.5 * (c1 + sq) if c1 >= 0.0 else -0.5 * (c1 - sq)
    if t == 0.0:
        return [0.0, 0.0]
    return [t / c2, c0 / t]


def _normalized(num: Polynomial, den: Polynomial,
                sign: int) -> RationalFunction:
    """Scale so the denominator constant term is 1 (or the leading term,
    for denominators with a zero at the origin) and the numerator leading
    coefficient is positive, folding any flip into sign."""
    dc = den.coeffs
    dmax = max(abs(c) for c in dc)
    if dmax == 0.0:
        raise ValueError("denominator is identically zero")
    use_const = abs(dc[0]) > _CONST_EPS * dmax
    pivot = dc[0] if use_const else dc[-1]
    new_den = list(c / pivot for c in dc)
    if use_const:
        new_den[0] = 1.0
    else:
        new_den[-1] = 1.0
    new_num = Polynomial(tuple(c / pivot for c in num.coeffs))
    if new_num.is_zero:
        return RationalFunction(new_num, Polynomial(tuple(new_den)), 1)
    if new_num.leading < 0.0:
        new_num = -new_num
        sign = -sign
    return RationalFunction(new_num, Polynomial(tuple(new_den)), sign)
