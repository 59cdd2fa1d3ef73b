"""Homogeneous almost pseudohermitian models.

A model is a real Lie algebra of dimension ``2n+1`` presented in a complex
frame ``(T, W_1..W_n, Wb_1..Wb_n)`` together with a positive Hermitian Levi
matrix ``h``.  The contact form is the dual of ``T``; its exterior
derivative is encoded in the ``T``-components of the brackets through the
convention

    [W_a, Wb_b]  has T-component  -i h_{ab},

which follows from ``dtheta(X, Y) = -theta([X, Y])`` together with the
wedge rule ``(x ^ y)(X, Y) = x(X) y(Y) - x(Y) y(X)``.  All geometric data
are constant in this invariant frame, so brackets are structure constants
and frame derivatives of coefficient functions vanish.

Frame index layout used throughout the package: ``0`` is ``T``, then the
holomorphic vectors ``1..n``, then the antiholomorphic ones ``n+1..2n``.
The conjugation ``sigma`` fixes ``T`` and swaps the two blocks;
antiholomorphic data are stored independently and reality is enforced by
validators, never by silent conjugation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    IncompatibleJ,
    JacobiViolation,
    ModelValidationError,
    NonPositiveLevi,
)

__all__ = [
    "PhmModel",
    "ValidationReport",
    "JFamily",
    "validate",
    "flat_heisenberg",
    "torsion_deformed",
    "custom",
    "rescale_contact_form",
    "deform_J",
    "sl2_aff_model",
    "model_to_dict",
    "model_from_dict",
    "frame_labels",
]

_VALIDATE_TOL = 1e-12


def frame_labels(n: int) -> list[str]:
    """Frame labels in storage order: T, W1..Wn, Wb1..Wbn."""
    return ["T"] + [f"W{i}" for i in range(1, n + 1)] + [f"Wb{i}" for i in range(1, n + 1)]


def sigma_index(n: int) -> np.ndarray:
    """Conjugation permutation on the frame: fixes T, swaps W_a <-> Wb_a."""
    idx = np.arange(2 * n + 1)
    idx[1 : n + 1] += n
    idx[n + 1 :] -= n
    return idx


@dataclass(frozen=True)
class PhmModel:
    """A homogeneous almost pseudohermitian structure.

    ``c[J, K, L]`` is the structure constant of ``[E_J, E_K]`` on ``E_L``
    over the frame ``(T, W_1..W_n, Wb_1..Wb_n)``; ``h`` is the n-by-n Levi
    matrix; ``vol_M`` the total contact volume of the compact model.
    """

    n: int
    c: np.ndarray
    h: np.ndarray
    vol_M: float = 1.0

    def __post_init__(self):
        c = np.ascontiguousarray(np.asarray(self.c, dtype=np.complex128))
        h = np.ascontiguousarray(np.asarray(self.h, dtype=np.complex128))
        d = 2 * self.n + 1
        if c.shape != (d, d, d):
            raise ModelValidationError(f"structure constants must be {d}^3, got {c.shape}")
        if h.shape != (self.n, self.n):
            raise ModelValidationError(f"Levi matrix must be {self.n}x{self.n}")
        c.setflags(write=False)
        h.setflags(write=False)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "h", h)

    # -- index helpers -------------------------------------------------

    @property
    def dim(self) -> int:
        return 2 * self.n + 1

    @property
    def nH(self) -> int:
        return 2 * self.n

    @property
    def sigma(self) -> np.ndarray:
        return sigma_index(self.n)

    @property
    def hinv(self) -> np.ndarray:
        """Inverse Levi matrix; ``hinv[b, a]`` pairs Wb_b with W_a."""
        return np.linalg.inv(self.h)

    def h_full(self) -> np.ndarray:
        """Levi pairing on all of H: blocks [[0, h], [h^T, 0]] (symmetric)."""
        nh = self.nH
        out = np.zeros((nh, nh), dtype=np.complex128)
        out[: self.n, self.n :] = self.h
        out[self.n :, : self.n] = self.h.T
        return out

    def h_full_inv(self) -> np.ndarray:
        return np.linalg.inv(self.h_full())


@dataclass(frozen=True)
class CheckResult:
    value: float
    tol: float
    ok: bool


@dataclass(frozen=True)
class ValidationReport:
    """Pass/fail residuals for every model invariant."""

    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.ok for r in self.checks.values())

    def failures(self) -> list[str]:
        return [k for k, r in self.checks.items() if not r.ok]

    def summary(self) -> str:
        rows = [
            f"{name}: {'ok' if r.ok else 'FAIL'} (value {r.value:.3e}, tol {r.tol:.1e})"
            for name, r in self.checks.items()
        ]
        return "\n".join(rows)

    def as_dict(self) -> dict:
        return {
            k: {"value": r.value, "tol": r.tol, "ok": r.ok} for k, r in self.checks.items()
        }


def validate(m: PhmModel, tol: float = _VALIDATE_TOL) -> ValidationReport:
    """Run every structural check and return the report (never raises)."""
    n, c, h = m.n, m.c, m.h
    checks: dict[str, CheckResult] = {}

    def put(name, value, ok=None, mytol=tol):
        checks[name] = CheckResult(float(value), mytol, bool(value <= mytol if ok is None else ok))

    put("antisymmetry", np.max(np.abs(c + np.swapaxes(c, 0, 1))))

    s = m.sigma
    put("reality", np.max(np.abs(c[np.ix_(s, s, s)] - np.conj(c))))

    jac = np.einsum("jkm,mln->jkln", c, c)
    jac = jac + np.transpose(jac, (1, 2, 0, 3)) + np.transpose(jac, (2, 0, 1, 3))
    put("jacobi", np.max(np.abs(jac)))

    hol = slice(1, n + 1)
    bar = slice(n + 1, 2 * n + 1)
    pairing = c[hol, bar, 0]
    put("contact_pairing", max(
        np.max(np.abs(pairing + 1j * h)),
        np.max(np.abs(c[hol, hol, 0])),
        np.max(np.abs(c[bar, bar, 0])),
    ))

    put("reeb", np.max(np.abs(c[0, :, 0])))

    put("levi_hermitian", np.max(np.abs(h - h.conj().T)))

    eigs = np.linalg.eigvalsh((h + h.conj().T) / 2)
    min_eig = float(eigs.min())
    put("levi_positive", min_eig, ok=min_eig > tol * max(1.0, float(eigs.max())))

    pair_full = c[1:, 1:, 0]
    sv = np.linalg.svd(pair_full, compute_uv=False)
    put("dtheta_nondegenerate", float(sv.min()), ok=sv.min() > tol * max(1.0, float(sv.max())))

    return checks and ValidationReport(checks)


def _validated(m: PhmModel, error=ModelValidationError) -> PhmModel:
    report = validate(m)
    if not report.passed:
        raise error(f"model validation failed: {report.failures()}", report)
    return m


def _check_levi(h: np.ndarray, n: int) -> np.ndarray:
    h = np.asarray(h, dtype=np.complex128)
    if h.shape != (n, n):
        raise NonPositiveLevi(f"Levi matrix must be {n}x{n}, got {h.shape}")
    if np.max(np.abs(h - h.conj().T)) > 1e-12 * max(1.0, np.max(np.abs(h))):
        raise NonPositiveLevi("Levi matrix is not Hermitian")
    if np.linalg.eigvalsh(h).min() <= 0:
        raise NonPositiveLevi("Levi matrix is not positive definite")
    return h


# ---------------------------------------------------------------------------
# constructors


def flat_heisenberg(n: int, h=None, vol_M: float = 1.0) -> PhmModel:
    """Heisenberg model: the only brackets pair W_a with Wb_b into -i h_ab T."""
    if h is None:
        h = np.eye(n)
    h = _check_levi(h, n)
    d = 2 * n + 1
    c = np.zeros((d, d, d), dtype=np.complex128)
    for a in range(n):
        for b in range(n):
            c[1 + a, 1 + n + b, 0] = -1j * h[a, b]
            c[1 + n + b, 1 + a, 0] = 1j * h[a, b]
    return _validated(PhmModel(n, c, h, vol_M))


def torsion_deformed(n: int, h=None, a=None, vol_M: float = 1.0) -> PhmModel:
    """Heisenberg brackets plus a Reeb action [T, W] rotating types.

    The extra brackets are ``[T, W_a] = a_a^bb Wb_b`` (indices raised with
    the Levi matrix) and the conjugate.  The resulting canonical-connection
    torsion is ``-a``.  The family satisfies the Jacobi identity only for
    ``n = 1``; for ``n >= 2`` any nonzero ``a`` is rejected with
    :class:`JacobiViolation` by the validator.
    """
    if h is None:
        h = np.eye(n)
    h = _check_levi(h, n)
    if a is None:
        a = np.zeros((n, n))
    a = np.asarray(a, dtype=np.complex128)
    if a.shape != (n, n) or np.max(np.abs(a - a.T)) > 1e-12 * max(1.0, np.max(np.abs(a))):
        raise ModelValidationError("torsion parameter must be a symmetric n-by-n matrix")
    base = flat_heisenberg(n, h, vol_M)
    c = np.array(base.c)
    hinv = np.linalg.inv(h)
    araised = a @ hinv.T  # a_a^bb = a_{ag} h^{g bb}
    for al in range(n):
        for be in range(n):
            c[0, 1 + al, 1 + n + be] = araised[al, be]
            c[1 + al, 0, 1 + n + be] = -araised[al, be]
            c[0, 1 + n + al, 1 + be] = np.conj(araised[al, be])
            c[1 + n + al, 0, 1 + be] = -np.conj(araised[al, be])
    return _validated(PhmModel(n, c, h, vol_M), error=JacobiViolation)


def custom(n: int, c, h, vol_M: float = 1.0) -> PhmModel:
    """Build a model from raw structure constants; validate before returning."""
    return _validated(PhmModel(n, np.asarray(c), np.asarray(h), vol_M))


def sl2_aff_model(vol_M: float = 1.0) -> PhmModel:
    """The sl(2,R) + aff(1) contact algebra with its compatible J (n = 2).

    The Reeb field is the sl(2) Cartan generator, so the model carries
    nonzero canonical-connection torsion; the chosen J is non-integrable
    (its (1,0)-(1,0) brackets have antiholomorphic components), so the
    Tanno tensor is nonzero as well.  Levi matrix normalized to the
    identity.
    """
    n = 2
    d = 2 * n + 1
    r2 = np.sqrt(2.0)
    c = np.zeros((d, d, d), dtype=np.complex128)

    def put(j, k, ell, val):
        c[j, k, ell] = val
        c[k, j, ell] = -val

    T, W1, W2, B1, B2 = 0, 1, 2, 3, 4
    put(T, W1, B1, 2.0)
    put(T, B1, W1, 2.0)
    put(W1, B1, T, -1j)
    put(W2, B2, T, -1j)
    put(W1, W2, B1, 1j * r2)
    put(B1, B2, W1, -1j * r2)
    put(W1, B2, B1, -1j * r2)
    put(B1, W2, W1, 1j * r2)
    put(W2, B2, W2, -1.0 / r2)
    put(W2, B2, B2, 1.0 / r2)
    return _validated(PhmModel(n, c, np.eye(n), vol_M))


# ---------------------------------------------------------------------------
# transformations


def _change_frame(m: PhmModel, U: np.ndarray, new_h: np.ndarray, new_vol: float) -> PhmModel:
    """Rewrite structure constants in the frame E'_J = U_J^K E_K."""
    Uinv = np.linalg.inv(U)
    c_new = np.einsum("jp,kq,pqr,rl->jkl", U, U, m.c, Uinv)
    return PhmModel(m.n, c_new, new_h, new_vol)


def rescale_contact_form(m: PhmModel, upsilon: float) -> PhmModel:
    """Model presenting the rescaled contact form exp(2 upsilon) theta.

    The new Reeb vector is ``exp(-2 upsilon) T``, the Levi matrix scales by
    ``exp(2 upsilon)``, and the contact volume by ``exp(2 (n+1) upsilon)``.
    """
    lam = np.exp(-2.0 * upsilon)
    U = np.eye(m.dim, dtype=np.complex128)
    U[0, 0] = lam
    new_h = np.exp(2.0 * upsilon) * m.h
    new_vol = float(m.vol_M * np.exp(2.0 * (m.n + 1) * upsilon))
    return _validated(_change_frame(m, U, new_h, new_vol))


@dataclass(frozen=True)
class JFamily:
    """A line of almost CR structures given by constant frame mixes.

    ``matrix(t)`` returns the H-frame change ``F(t)``: the new holomorphic
    frame is ``W'_a = W_a + t Q_ab Wb_b`` with the conjugate block forced
    by equivariance.  ``Q`` must satisfy ``h Q^T`` symmetric so the new
    frame stays isotropic for dtheta.
    """

    n: int
    Q: np.ndarray

    @staticmethod
    def symmetric_mix(m: PhmModel, S) -> "JFamily":
        """Family from a symmetric seed ``S``: Q = S conj(h^-1)."""
        S = np.asarray(S, dtype=np.complex128)
        if S.shape != (m.n, m.n) or np.max(np.abs(S - S.T)) > 1e-12 * max(1.0, np.max(np.abs(S))):
            raise IncompatibleJ("mix seed must be a symmetric n-by-n matrix")
        Q = S @ np.conj(np.linalg.inv(m.h))
        return JFamily(m.n, Q)

    def matrix(self, t: float) -> np.ndarray:
        n = self.n
        F = np.eye(2 * n, dtype=np.complex128)
        F[:n, n:] = t * self.Q
        F[n:, :n] = t * np.conj(self.Q)
        return F


def deform_J(m: PhmModel, family: JFamily, t: float) -> PhmModel:
    """Model with the same brackets in the mixed (1,0) frame of ``family``.

    Raises :class:`IncompatibleJ` when the induced Levi matrix fails to be
    positive definite or the new frame is not dtheta-isotropic.
    """
    F = family.matrix(t)
    try:
        Finv = np.linalg.inv(F)
    except np.linalg.LinAlgError as exc:
        raise IncompatibleJ(f"frame change is singular at t={t}") from exc
    del Finv
    U = np.eye(m.dim, dtype=np.complex128)
    U[1:, 1:] = F
    n = m.n
    c_new = np.einsum("jp,kq,pqr,rl->jkl", U, U, m.c, np.linalg.inv(U))
    iso = max(
        np.max(np.abs(c_new[1 : n + 1, 1 : n + 1, 0])),
        np.max(np.abs(c_new[n + 1 :, n + 1 :, 0])),
    )
    if iso > 1e-10 * max(1.0, np.max(np.abs(c_new))):
        raise IncompatibleJ(f"mixed frame is not dtheta-isotropic at t={t}")
    new_h = 1j * c_new[1 : n + 1, n + 1 :, 0]
    new_h = (new_h + new_h.conj().T) / 2
    if np.linalg.eigvalsh(new_h).min() <= 0:
        raise IncompatibleJ(f"induced Levi matrix is not positive definite at t={t}")
    return _validated(PhmModel(n, c_new, new_h, m.vol_M))


# ---------------------------------------------------------------------------
# serialization


def model_to_dict(m: PhmModel) -> dict:
    labels = frame_labels(m.n)
    brackets = []
    for j in range(m.dim):
        for k in range(j + 1, m.dim):
            for ell in range(m.dim):
                v = m.c[j, k, ell]
                if v != 0:
                    brackets.append(
                        {
                            "J": labels[j],
                            "K": labels[k],
                            "L": labels[ell],
                            "re": float(v.real),
                            "im": float(v.imag),
                        }
                    )
    return {
        "n": m.n,
        "vol_M": m.vol_M,
        "h": [[[float(v.real), float(v.imag)] for v in row] for row in m.h],
        "brackets": brackets,
    }


def model_from_dict(data: dict) -> PhmModel:
    """Parse the model file schema; raises ModelValidationError on bad input."""
    try:
        n = int(data["n"])
        vol_M = float(data.get("vol_M", 1.0))
        hraw = data["h"]
        h = np.array([[complex(v[0], v[1]) for v in row] for row in hraw])
        labels = frame_labels(n)
        index = {lab: i for i, lab in enumerate(labels)}
        d = 2 * n + 1
        c = np.zeros((d, d, d), dtype=np.complex128)
        seen = {}
        for item in data["brackets"]:
            j, k, ell = index[item["J"]], index[item["K"]], index[item["L"]]
            v = complex(float(item["re"]), float(item.get("im", 0.0)))
            for key, val in (((j, k, ell), v), ((k, j, ell), -v)):
                if key in seen and abs(seen[key] - val) > 1e-13 * max(1.0, abs(val)):
                    raise ModelValidationError(f"conflicting bracket entries at {key}")
                seen[key] = val
                c[key] = val
    except ModelValidationError:
        raise
    except Exception as exc:
        raise ModelValidationError(f"malformed model data: {exc}") from exc
    return custom(n, c, h, vol_M)
