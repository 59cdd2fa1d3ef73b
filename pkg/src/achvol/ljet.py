"""Truncated Laurent series in the boundary defining function.

Every scalar geometric quantity in this package is a window of a Laurent
series ``sum_k c_k phi^k`` with complex coefficients.  A jet knows the
lowest power present (``min_deg``, negative powers allowed), its
coefficient array, and the first unknown power (``trunc``): powers at or
above ``trunc`` have been destroyed by truncation and may never be read.

Windows combine pessimistically, so coefficient validity is tracked
through arbitrary arithmetic:

* ``add``:  trunc = min(trunc_a, trunc_b)
* ``mul``:  trunc = min(trunc_a + min_b, trunc_b + min_a)
* ``differentiate``: trunc decreases by one

Exactly known data (structure constants, the normal-form entry
``(2 phi)^-2``) use the sentinel ``INF_TRUNC`` and never truncate their
partners.  Jets normalize on construction: leading coefficients below
``ZERO_EPS`` in magnitude are stripped, and an all-zero window collapses
to the canonical zero jet with ``min_deg == trunc``.
"""

from __future__ import annotations

import numpy as np

from .backend import conv_trunc, series_inv, series_sqrt
from .errors import LeadingZero, NonPositiveLeading, OddLeadingDegree, OutOfWindow

__all__ = ["LaurentJet", "INF_TRUNC", "ZERO_EPS"]

#: Sentinel truncation order for exactly known jets.
INF_TRUNC = 1 << 30

#: Coefficients at or below this magnitude collapse to exact zero.
ZERO_EPS = 1e-300

_EMPTY = np.zeros(0, dtype=np.complex128)


def _sat(x: int) -> int:
    """Clamp window bookkeeping integers at the exactness sentinel."""
    return INF_TRUNC if x >= INF_TRUNC else x


def _tadd(t: int, d: int) -> int:
    """Shift a truncation order by ``d``; INF_TRUNC is absorbing."""
    if t >= INF_TRUNC or d >= INF_TRUNC:
        return INF_TRUNC
    return _sat(t + d)


class LaurentJet:
    """One truncated Laurent series; immutable value semantics."""

    __slots__ = ("min_deg", "coeffs", "trunc")

    def __init__(self, min_deg: int, coeffs, trunc: int = INF_TRUNC):
        c = np.asarray(coeffs, dtype=np.complex128)
        trunc = _sat(trunc)
        if trunc < INF_TRUNC:
            c = c[: max(0, trunc - min_deg)]
        # strip exact-zero leading entries so min_deg names the true lead
        lead = 0
        while lead < c.shape[0] and abs(c[lead]) <= ZERO_EPS:
            lead += 1
        if lead == c.shape[0]:
            self.min_deg = trunc
            self.coeffs = _EMPTY
            self.trunc = trunc
            return
        min_deg += lead
        c = c[lead:]
        if trunc < INF_TRUNC:
            pad = trunc - min_deg - c.shape[0]
            if pad > 0:
                c = np.concatenate([c, np.zeros(pad, dtype=np.complex128)])
        else:
            # exact jets may drop trailing zeros (they are known zeros)
            tail = c.shape[0]
            while tail > 0 and abs(c[tail - 1]) <= ZERO_EPS:
                tail -= 1
            c = c[:tail]
        self.min_deg = min_deg
        self.coeffs = np.ascontiguousarray(c)
        self.trunc = trunc

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def zero(cls, trunc: int = INF_TRUNC) -> "LaurentJet":
        return cls(trunc, _EMPTY, trunc)

    @classmethod
    def const(cls, value, trunc: int = INF_TRUNC) -> "LaurentJet":
        return cls(0, [value], trunc)

    @classmethod
    def monomial(cls, value, power: int, trunc: int = INF_TRUNC) -> "LaurentJet":
        return cls(power, [value], trunc)

    @classmethod
    def variable(cls, trunc: int = INF_TRUNC) -> "LaurentJet":
        """The series ``phi`` itself."""
        return cls(1, [1.0], trunc)

    # ------------------------------------------------------------------
    # predicates and access

    @property
    def is_zero(self) -> bool:
        return self.coeffs.shape[0] == 0

    @property
    def is_exact(self) -> bool:
        return self.trunc >= INF_TRUNC

    def coefficient(self, k: int) -> complex:
        """Coefficient of ``phi^k``; 0 below the lead, error at/after trunc."""
        if k >= self.trunc:
            raise OutOfWindow(
                f"coefficient of phi^{k} was destroyed by truncation at {self.trunc}"
            )
        i = k - self.min_deg
        if i < 0 or i >= self.coeffs.shape[0]:
            return 0.0 + 0.0j
        return complex(self.coeffs[i])

    def window_coeffs(self, lo: int, hi: int) -> np.ndarray:
        """Coefficients of ``phi^lo .. phi^(hi-1)``; raises if any is unknown."""
        if hi > self.trunc:
            raise OutOfWindow(f"window [{lo},{hi}) exceeds truncation {self.trunc}")
        out = np.zeros(hi - lo, dtype=np.complex128)
        for k in range(lo, hi):
            i = k - self.min_deg
            if 0 <= i < self.coeffs.shape[0]:
                out[k - lo] = self.coeffs[i]
        return out

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.shape[0] else 0.0

    def evaluate(self, x: float) -> complex:
        """Value of the retained polynomial part at ``x`` (x != 0)."""
        acc = 0.0 + 0.0j
        for i in range(self.coeffs.shape[0] - 1, -1, -1):
            acc = acc * x + self.coeffs[i]
        return acc * x**self.min_deg

    # ------------------------------------------------------------------
    # arithmetic

    @staticmethod
    def _coerce(other) -> "LaurentJet":
        if isinstance(other, LaurentJet):
            return other
        return LaurentJet.const(other)

    def __add__(self, other) -> "LaurentJet":
        b = self._coerce(other)
        a = self
        trunc = min(a.trunc, b.trunc)
        if a.is_zero and b.is_zero:
            return LaurentJet.zero(trunc)
        if a.is_zero:
            return LaurentJet(b.min_deg, b.coeffs, trunc)
        if b.is_zero:
            return LaurentJet(a.min_deg, a.coeffs, trunc)
        lo = min(a.min_deg, b.min_deg)
        if trunc >= INF_TRUNC:
            hi = max(a.min_deg + a.coeffs.shape[0], b.min_deg + b.coeffs.shape[0])
        else:
            hi = trunc
        n = max(0, hi - lo)
        out = np.zeros(n, dtype=np.complex128)
        for src in (a, b):
            i0 = src.min_deg - lo
            m = min(src.coeffs.shape[0], n - i0)
            if m > 0:
                out[i0 : i0 + m] += src.coeffs[:m]
        return LaurentJet(lo, out, trunc)

    __radd__ = __add__

    def __neg__(self) -> "LaurentJet":
        return LaurentJet(self.min_deg, -self.coeffs, self.trunc)

    def __sub__(self, other) -> "LaurentJet":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "LaurentJet":
        return self._coerce(other) + (-self)

    def __mul__(self, other) -> "LaurentJet":
        b = self._coerce(other)
        a = self
        trunc = min(_tadd(a.trunc, b.min_deg), _tadd(b.trunc, a.min_deg))
        if a.is_zero or b.is_zero:
            # 0 * b is known-zero only as far as the window rule allows
            return LaurentJet.zero(trunc)
        lo = a.min_deg + b.min_deg
        if trunc >= INF_TRUNC:
            nout = a.coeffs.shape[0] + b.coeffs.shape[0] - 1
        else:
            nout = trunc - lo
        if nout <= 0:
            return LaurentJet.zero(trunc)
        out = conv_trunc(a.coeffs, b.coeffs, nout)
        return LaurentJet(lo, out, trunc)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "LaurentJet":
        b = self._coerce(other)
        if not isinstance(other, LaurentJet) and b.coeffs.shape[0] == 1:
            return LaurentJet(self.min_deg, self.coeffs / b.coeffs[0], self.trunc)
        return self * b.invert()

    def __rtruediv__(self, other) -> "LaurentJet":
        return self._coerce(other) * self.invert()

    def invert(self) -> "LaurentJet":
        """Reciprocal jet; two-sided inverse of ``mul`` to the window."""
        if self.is_zero:
            raise LeadingZero("cannot invert a jet that is zero to truncation")
        n = self.coeffs.shape[0]
        if self.is_exact and n > 1:
            raise LeadingZero(
                "cannot invert an exact non-monomial jet; truncate it first"
            )
        trunc = _tadd(self.trunc, -2 * self.min_deg)
        if n == 1:
            return LaurentJet(-self.min_deg, [1.0 / self.coeffs[0]], trunc)
        out = series_inv(self.coeffs, n)
        return LaurentJet(-self.min_deg, out, trunc)

    def sqrt(self, imag_tol: float = 1e-9) -> "LaurentJet":
        """Principal square root; requires even lead degree, positive lead."""
        if self.is_zero:
            raise NonPositiveLeading("square root of the zero jet is not supported")
        if self.min_deg % 2 != 0:
            raise OddLeadingDegree(f"leading degree {self.min_deg} is odd")
        lead = self.coeffs[0]
        if lead.real <= 0.0 or abs(lead.imag) > imag_tol * abs(lead.real):
            raise NonPositiveLeading(f"leading coefficient {lead} is not positive")
        half = self.min_deg // 2
        if self.is_exact and self.coeffs.shape[0] > 1:
            raise NonPositiveLeading(
                "square root of an exact non-monomial jet; truncate it first"
            )
        n = self.coeffs.shape[0]
        out = series_sqrt(self.coeffs, n)
        return LaurentJet(half, out, _tadd(self.trunc, half - self.min_deg))

    def differentiate(self) -> "LaurentJet":
        """Termwise d/dphi; the truncation order drops by one."""
        if self.is_zero:
            return LaurentJet.zero(_tadd(self.trunc, -1))
        powers = self.min_deg + np.arange(self.coeffs.shape[0])
        out = self.coeffs * powers
        return LaurentJet(self.min_deg - 1, out, _tadd(self.trunc, -1))

    def conjugate(self) -> "LaurentJet":
        """Coefficientwise complex conjugate (phi is a real variable)."""
        return LaurentJet(self.min_deg, np.conj(self.coeffs), self.trunc)

    def shift(self, p: int) -> "LaurentJet":
        """Multiply by ``phi^p`` exactly."""
        if self.is_zero:
            return LaurentJet.zero(_tadd(self.trunc, p))
        return LaurentJet(self.min_deg + p, self.coeffs, _tadd(self.trunc, p))

    def truncated(self, trunc: int) -> "LaurentJet":
        """Tighten the window to powers below ``trunc``."""
        return LaurentJet(self.min_deg, self.coeffs, min(self.trunc, trunc))

    # ------------------------------------------------------------------

    def __repr__(self) -> str:
        if self.is_zero:
            tail = "exact" if self.is_exact else f"O(phi^{self.trunc})"
            return f"<jet 0 ({tail})>"
        terms = []
        for i, c in enumerate(self.coeffs[:6]):
            k = self.min_deg + i
            if abs(c) == 0.0:
                continue
            terms.append(f"({c:.6g})phi^{k}")
        if self.coeffs.shape[0] > 6:
            terms.append("...")
        tail = "" if self.is_exact else f" + O(phi^{self.trunc})"
        return f"<jet {' + '.join(terms) or '0'}{tail}>"


def max_abs_diff(a: LaurentJet, b: LaurentJet) -> float:
    """Largest coefficient difference on the common validity window."""
    d = a - b
    return d.max_abs()


def jet_sum(jets) -> LaurentJet:
    """Sum a sequence of jets with a single window alignment."""
    jets = list(jets)
    if not jets:
        return LaurentJet.zero()
    trunc = min(j.trunc for j in jets)
    live = [j for j in jets if not j.is_zero]
    if not live:
        return LaurentJet.zero(trunc)
    lo = min(j.min_deg for j in live)
    if trunc >= INF_TRUNC:
        hi = max(j.min_deg + j.coeffs.shape[0] for j in live)
    else:
        hi = trunc
    out = np.zeros(max(0, hi - lo), dtype=np.complex128)
    for j in live:
        i0 = j.min_deg - lo
        m = min(j.coeffs.shape[0], out.shape[0] - i0)
        if m > 0:
            out[i0 : i0 + m] += j.coeffs[:m]
    return LaurentJet(lo, out, trunc)
