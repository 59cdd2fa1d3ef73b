"""Jet-valued ACH metric in normal form and its Riemannian curvature.

The metric lives on the fixed frame ``(d/dphi, T, W_A)``: brackets are the
model's structure constants (extended by zero on the ``d/dphi`` row) and
only the first frame vector differentiates coefficient jets.  In the fixed
coframe the normal form reads

    G_phiphi = (2 phi)^-2                     (exact, by construction)
    G_TT     = phi^-2 s - phi ht_AB eta^A eta^B
    G_TA     = -ht_AB eta^B
    G_AB     = -phi^-1 ht_AB

obtained by substituting the shifted coframe ``theta^A + phi eta^A theta``
into the diagonal normal form.  The Levi-Civita connection comes from the
Koszul formula, curvature from the frame commutator expansion, and the
Ricci tensor from the trace of the mixed Riemann tensor (equal to the
inverse-metric contraction of the lowered one by the pair symmetry).

``crosscheck_connection_table`` rebuilds the connection in the moving
coframe ``(dphi, theta, theta~^A)`` from its closed-form table and compares
with the Koszul result transported to that frame; the two derivations are
independent, so their agreement certifies both.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BoundaryMismatch, LeadingZero
from .ljet import INF_TRUNC, LaurentJet, jet_sum
from .model import PhmModel
from .tanno import TannoConnection

__all__ = [
    "MetricJet",
    "ConnectionJet",
    "CurvatureJet",
    "assemble_metric",
    "koszul",
    "curvature",
    "riemann_mixed",
    "bianchi_residual",
    "metric_compat_residual",
    "torsion_identity_residual",
    "sigma_reality_residual",
    "jet_mat_inv",
    "jet_mat_det",
    "crosscheck_connection_table",
]

_ZERO = LaurentJet.zero()
_ONE = LaurentJet.const(1.0)


# ---------------------------------------------------------------------------
# jet linear algebra


def jet_mat_inv(M):
    """Invert a square matrix of jets by Gauss-Jordan with lead pivoting."""
    k = len(M)
    A = [list(row) for row in M]
    inv = [[_ONE if i == j else _ZERO for j in range(k)] for i in range(k)]
    for col in range(k):
        best, best_key = None, None
        for r in range(col, k):
            e = A[r][col]
            if e.is_zero:
                continue
            key = (e.min_deg, -abs(e.coeffs[0]))
            if best is None or key < best_key:
                best, best_key = r, key
        if best is None:
            raise LeadingZero(f"jet matrix is singular at column {col}")
        if best != col:
            A[col], A[best] = A[best], A[col]
            inv[col], inv[best] = inv[best], inv[col]
        piv = A[col][col].invert()
        A[col] = [piv * e for e in A[col]]
        inv[col] = [piv * e for e in inv[col]]
        for r in range(k):
            if r == col:
                continue
            f = A[r][col]
            if f.is_zero:
                continue
            A[r] = [A[r][j] - f * A[col][j] for j in range(k)]
            inv[r] = [inv[r][j] - f * inv[col][j] for j in range(k)]
    return inv


def jet_mat_det(M) -> LaurentJet:
    """Determinant of a square matrix of jets (Gaussian elimination)."""
    k = len(M)
    A = [list(row) for row in M]
    det = _ONE
    sign = 1.0
    for col in range(k):
        best, best_key = None, None
        for r in range(col, k):
            e = A[r][col]
            if e.is_zero:
                continue
            key = (e.min_deg, -abs(e.coeffs[0]))
            if best is None or key < best_key:
                best, best_key = r, key
        if best is None:
            raise LeadingZero(f"jet matrix is singular at column {col}")
        if best != col:
            A[col], A[best] = A[best], A[col]
            sign = -sign
        piv = A[col][col]
        det = det * piv
        piv_inv = piv.invert()
        for r in range(col + 1, k):
            f = A[r][col]
            if f.is_zero:
                continue
            fp = f * piv_inv
            A[r] = [A[r][j] - fp * A[col][j] for j in range(k)]
    return sign * det


# ---------------------------------------------------------------------------
# metric assembly


@dataclass(frozen=True)
class MetricJet:
    """Normal-form metric and its inverse over the fixed frame."""

    n: int
    G: list
    Ginv: list

    @property
    def dim(self) -> int:
        return 2 * self.n + 2


def assemble_metric(m: PhmModel, s: LaurentJet, ht, eta) -> MetricJet:
    """Assemble the normal-form metric from the state jets.

    ``ht`` is the symmetric 2n-by-2n matrix of jets with boundary value the
    full Levi pairing, ``eta`` the 2n-vector of shift jets.  Boundary data
    are checked: ``s(0) = 4`` and ``ht(0)`` equal to the Levi pairing.
    """
    n = m.n
    nh = 2 * n
    hfull = m.h_full()
    tol = 1e-9 * max(1.0, float(np.max(np.abs(hfull))))
    if abs(s.coefficient(0) - 4.0) > tol:
        raise BoundaryMismatch(f"s(0) = {s.coefficient(0)}, expected 4")
    for A in range(nh):
        for B in range(nh):
            if abs(ht[A][B].coefficient(0) - hfull[A, B]) > tol:
                raise BoundaryMismatch(
                    f"ht({A},{B})(0) = {ht[A][B].coefficient(0)}, "
                    f"expected {hfull[A, B]}"
                )

    d = nh + 2
    G = [[_ZERO for _ in range(d)] for _ in range(d)]
    G[0][0] = LaurentJet.monomial(0.25, -2)
    inv_phi2 = LaurentJet.monomial(1.0, -2)
    inv_phi = LaurentJet.monomial(-1.0, -1)
    phi = LaurentJet.variable()
    quad = jet_sum(
        ht[A][B] * eta[A] * eta[B] for A in range(nh) for B in range(nh)
    )
    G[1][1] = inv_phi2 * s - phi * quad
    for A in range(nh):
        col = -jet_sum(ht[A][B] * eta[B] for B in range(nh))
        G[1][2 + A] = col
        G[2 + A][1] = col
        for B in range(nh):
            G[2 + A][2 + B] = inv_phi * ht[A][B]

    # the phi-phi block decouples exactly, so its inverse is exact
    sub = [[G[1 + i][1 + j] for j in range(d - 1)] for i in range(d - 1)]
    sub_inv = jet_mat_inv(sub)
    Ginv = [[_ZERO for _ in range(d)] for _ in range(d)]
    Ginv[0][0] = LaurentJet.monomial(4.0, 2)
    for i in range(d - 1):
        for j in range(d - 1):
            Ginv[1 + i][1 + j] = sub_inv[i][j]
    return MetricJet(n, G, Ginv)


# ---------------------------------------------------------------------------
# connection and curvature


@dataclass(frozen=True)
class ConnectionJet:
    """Levi-Civita coefficients ``Gamma[J][K][L]`` in the fixed frame."""

    n: int
    Gamma: list


def _bracket_table(m: PhmModel, d: int):
    """Sparse brackets on the extended frame: list of (L, value) per (J, K)."""
    tab = [[[] for _ in range(d)] for _ in range(d)]
    c = m.c
    for j in range(m.dim):
        for k in range(m.dim):
            entries = [(1 + ell, c[j, k, ell]) for ell in range(m.dim) if c[j, k, ell] != 0]
            if entries:
                tab[1 + j][1 + k] = entries
    return tab


def koszul(mj: MetricJet, m: PhmModel) -> ConnectionJet:
    """Levi-Civita connection of the jet metric via the Koszul formula."""
    d = mj.dim
    G, Ginv = mj.G, mj.Ginv
    br = _bracket_table(m, d)
    dG = [[G[i][j].differentiate() for j in range(d)] for i in range(d)]

    K = [[[None] * d for _ in range(d)] for _ in range(d)]
    for J in range(d):
        for Kidx in range(d):
            bJK = br[J][Kidx]
            for L in range(d):
                terms = []
                if J == 0:
                    terms.append(dG[Kidx][L])
                if Kidx == 0:
                    terms.append(dG[J][L])
                if L == 0:
                    terms.append(-dG[J][Kidx])
                for (M_, v) in bJK:
                    g = G[M_][L]
                    if not g.is_zero:
                        terms.append(v * g)
                for (M_, v) in br[J][L]:
                    g = G[M_][Kidx]
                    if not g.is_zero:
                        terms.append((-v) * g)
                for (M_, v) in br[Kidx][L]:
                    g = G[M_][J]
                    if not g.is_zero:
                        terms.append((-v) * g)
                K[J][Kidx][L] = jet_sum(terms) if terms else _ZERO

    Gamma = [[[None] * d for _ in range(d)] for _ in range(d)]
    for J in range(d):
        for Kidx in range(d):
            KJK = K[J][Kidx]
            for Mi in range(d):
                terms = []
                for L in range(d):
                    gi = Ginv[Mi][L]
                    if gi.is_zero:
                        continue
                    kjkl = KJK[L]
                    if kjkl.is_zero:
                        continue
                    terms.append(gi * kjkl)
                Gamma[J][Kidx][Mi] = 0.5 * jet_sum(terms) if terms else _ZERO
    return ConnectionJet(mj.n, Gamma)


@dataclass(frozen=True)
class CurvatureJet:
    """Ricci, scalar and Einstein jets; mixed Riemann kept when requested."""

    n: int
    Ric: list
    Scal: LaurentJet
    Ein: list
    Riem: list | None = None


def riemann_mixed(cj: ConnectionJet, m: PhmModel):
    """Full mixed Riemann tensor R[J][K][L][M] (curvature operator frame)."""
    G_ = cj.Gamma
    d = 2 * cj.n + 2
    br = _bracket_table(m, d)
    dGamma = [
        [[G_[J][Kk][L].differentiate() for L in range(d)] for Kk in range(d)]
        for J in range(d)
    ]
    R = [[[[None] * d for _ in range(d)] for _ in range(d)] for _ in range(d)]
    for J in range(d):
        for Kk in range(d):
            for L in range(d):
                for Mi in range(d):
                    terms = []
                    if J == 0:
                        terms.append(dGamma[Kk][L][Mi])
                    if Kk == 0:
                        terms.append(-dGamma[J][L][Mi])
                    for N in range(d):
                        a = G_[Kk][L][N]
                        b = G_[J][N][Mi]
                        if not (a.is_zero or b.is_zero):
                            terms.append(a * b)
                        a2 = G_[J][L][N]
                        b2 = G_[Kk][N][Mi]
                        if not (a2.is_zero or b2.is_zero):
                            terms.append(-(a2 * b2))
                    for (N, v) in br[J][Kk]:
                        g = G_[N][L][Mi]
                        if not g.is_zero:
                            terms.append((-v) * g)
                    R[J][Kk][L][Mi] = jet_sum(terms) if terms else _ZERO
    return R


def curvature(
    cj: ConnectionJet, mj: MetricJet, m: PhmModel, with_riemann: bool = False
) -> CurvatureJet:
    """Ricci, scalar and Einstein tensors of the jet metric.

    The Ricci tensor is the trace of the mixed Riemann tensor over its
    first and last slots, computed without materializing the full tensor;
    ``with_riemann=True`` additionally stores the mixed Riemann tensor for
    symmetry and Bianchi diagnostics.
    """
    G_ = cj.Gamma
    d = mj.dim
    br = _bracket_table(m, d)

    trG = [jet_sum(G_[L][N][L] for L in range(d)) for N in range(d)]
    dtrG = [t.differentiate() for t in trG]

    Ric = [[None] * d for _ in range(d)]
    for J in range(d):
        for Kk in range(d):
            terms = [G_[J][Kk][0].differentiate()]
            if J == 0:
                terms.append(-dtrG[Kk])
            for N in range(d):
                a = G_[J][Kk][N]
                if not (a.is_zero or trG[N].is_zero):
                    terms.append(a * trG[N])
            for L in range(d):
                GLK = G_[L][Kk]
                for N in range(d):
                    # second quadratic term: -Gamma_{LK}^N Gamma_{JN}^L
                    a = GLK[N]
                    if not a.is_zero:
                        b = G_[J][N][L]
                        if not b.is_zero:
                            terms.append(-(a * b))
                for (N, v) in br[L][J]:
                    g = G_[N][Kk][L]
                    if not g.is_zero:
                        terms.append((-v) * g)
            Ric[J][Kk] = jet_sum(terms)

    Scal = jet_sum(
        mj.Ginv[J][Kk] * Ric[J][Kk]
        for J in range(d)
        for Kk in range(d)
        if not (mj.Ginv[J][Kk].is_zero or Ric[J][Kk].is_zero)
    )

    lam = 2.0 * (m.n + 2)
    Ein = [[Ric[J][Kk] + lam * mj.G[J][Kk] for Kk in range(d)] for J in range(d)]

    Riem = riemann_mixed(cj, m) if with_riemann else None
    return CurvatureJet(mj.n, Ric, Scal, Ein, Riem)


# ---------------------------------------------------------------------------
# diagnostics


def metric_compat_residual(cj: ConnectionJet, mj: MetricJet) -> float:
    """Max coefficient of nabla G: E_J G_KL - Gamma_JK^M G_ML - Gamma_JL^M G_KM."""
    d = mj.dim
    G, G_ = mj.G, cj.Gamma
    worst = 0.0
    for J in range(d):
        for Kk in range(d):
            for L in range(Kk, d):
                terms = []
                if J == 0:
                    terms.append(G[Kk][L].differentiate())
                for Mi in range(d):
                    a = G_[J][Kk][Mi]
                    if not (a.is_zero or G[Mi][L].is_zero):
                        terms.append(-(a * G[Mi][L]))
                    b = G_[J][L][Mi]
                    if not (b.is_zero or G[Kk][Mi].is_zero):
                        terms.append(-(b * G[Kk][Mi]))
                worst = max(worst, jet_sum(terms).max_abs() if terms else 0.0)
    return worst


def torsion_identity_residual(cj: ConnectionJet, m: PhmModel) -> float:
    """Max coefficient of Gamma_JK^L - Gamma_KJ^L - c_JK^L."""
    d = 2 * cj.n + 2
    br = _bracket_table(m, d)
    worst = 0.0
    for J in range(d):
        for Kk in range(J + 1, d):
            cvals = dict(br[J][Kk])
            for L in range(d):
                diff = cj.Gamma[J][Kk][L] - cj.Gamma[Kk][J][L] - cvals.get(L, 0.0)
                worst = max(worst, diff.max_abs())
    return worst


def bianchi_residual(Riem) -> float:
    """Max coefficient of the cyclic (first Bianchi) sum of mixed Riemann."""
    d = len(Riem)
    worst = 0.0
    for J in range(d):
        for Kk in range(J + 1, d):
            for L in range(Kk + 1, d):
                for Mi in range(d):
                    s = Riem[J][Kk][L][Mi] + Riem[Kk][L][J][Mi] + Riem[L][J][Kk][Mi]
                    worst = max(worst, s.max_abs())
    return worst


def sigma_reality_residual(T, n: int) -> float:
    """Max coefficient of X_{sJ sK} - conj(X_JK) for a frame 2-tensor of jets."""
    d = 2 * n + 2
    sig = list(range(d))
    for a in range(n):
        sig[2 + a] = 2 + n + a
        sig[2 + n + a] = 2 + a
    worst = 0.0
    for J in range(d):
        for Kk in range(d):
            diff = T[sig[J]][sig[Kk]] - T[J][Kk].conjugate()
            worst = max(worst, diff.max_abs())
    return worst


# ---------------------------------------------------------------------------
# moving-coframe connection table crosscheck


def crosscheck_connection_table(
    m: PhmModel,
    conn: TannoConnection,
    s: LaurentJet,
    ht,
    eta,
    gamma: ConnectionJet | None = None,
    detail: bool = False,
):
    """Compare the Koszul connection with its closed-form coframe table.

    The table expresses the Levi-Civita connection forms in the moving
    coframe ``(dphi, theta, theta~^A)`` through the state jets and the
    canonical-connection data; the Koszul result is transported to the
    moving frame and compared slot by slot.  Returns the max deviation
    over all components and retained orders.
    """
    n = m.n
    nh = 2 * n
    d = nh + 2
    mj = assemble_metric(m, s, ht, eta)
    if gamma is None:
        gamma = koszul(mj, m)
    G_ = gamma.Gamma

    phi = LaurentJet.variable()
    phi2 = LaurentJet.monomial(1.0, 2)
    inv_phi = LaurentJet.monomial(1.0, -1)

    # --- transported Koszul side -------------------------------------
    # moving frame rows over the fixed frame: U[J][P]
    U = [[_ZERO] * d for _ in range(d)]
    U[0][0] = _ONE
    U[1][1] = _ONE
    for A in range(nh):
        U[1][2 + A] = -(phi * eta[A])
        U[2 + A][2 + A] = _ONE
    dU = [[U[J][P].differentiate() for P in range(d)] for J in range(d)]

    transported = [[[None] * d for _ in range(d)] for _ in range(d)]  # [L][J][K]
    for L in range(d):
        for J in range(d):
            # nabla_{E~_L} E~_J over the fixed frame
            comp = []
            for R in range(d):
                terms = []
                for P in range(d):
                    uLP = U[L][P]
                    if uLP.is_zero:
                        continue
                    if P == 0 and not dU[J][R].is_zero:
                        terms.append(uLP * dU[J][R])
                    for Q in range(d):
                        uJQ = U[J][Q]
                        if uJQ.is_zero:
                            continue
                        g = G_[P][Q][R]
                        if not g.is_zero:
                            terms.append(uLP * (uJQ * g))
                comp.append(jet_sum(terms) if terms else _ZERO)
            # convert to moving frame: T = T~ + phi eta^A W_A
            out = [comp[0], comp[1]]
            for A in range(nh):
                out.append(comp[2 + A] + comp[1] * (phi * eta[A]))
            for Kk in range(d):
                transported[L][J][Kk] = out[Kk]

    # --- closed-form table side --------------------------------------
    w = conn.omega  # w[A][B][frame]
    A_up_full = np.zeros((nh, nh), dtype=np.complex128)  # A^B_C, capital indices
    A_up_full[:n, n:] = conn.A_up  # A^b_{ab}
    A_up_full[n:, :n] = np.conj(conn.A_up)  # A^bb_{a}

    ds = s.differentiate()
    s_inv = s.invert()
    dht = [[ht[A][B].differentiate() for B in range(nh)] for A in range(nh)]
    htinv = jet_mat_inv(ht)
    hfull = m.h_full()
    sgn = [1.0 if A < n else -1.0 for A in range(nh)]
    # index gymnastics on eta uses the boundary Levi pairing, not ht
    eta_low = [
        jet_sum(hfull[C, D] * eta[D] for D in range(nh) if hfull[C, D] != 0)
        for C in range(nh)
    ]
    e_vec = [eta[A] + phi * eta[A].differentiate() for A in range(nh)]
    ht_e = [jet_sum(ht[A][B] * e_vec[B] for B in range(nh)) for A in range(nh)]

    # g_mov[A][B] = -phi^-1 ht, inverse = -phi htinv
    dg_mov = [[(-(inv_phi * ht[A][B])).differentiate() for B in range(nh)] for A in range(nh)]

    # K[D][C] block entering psi_0^A and psi_A^B
    Kblk = [[None] * nh for _ in range(nh)]
    for D in range(nh):
        for C in range(nh):
            terms = [LaurentJet.const(-w[C, D, 0]), LaurentJet.const(A_up_full[D, C])]
            for E in range(nh):
                coef = w[C, D, 1 + E] - w[E, D, 1 + C]
                if coef != 0:
                    terms.append(phi * (coef * eta[E]))
            terms.append((1j * sgn[C]) * (phi2 * (eta[D] * eta_low[C])))
            Kblk[D][C] = jet_sum(terms)

    # psi_0^A theta^C-components (reused by psi_A^0 and psi_A^B)
    psi0_thetaC = [[None] * nh for _ in range(nh)]
    for Aa in range(nh):
        for C in range(nh):
            terms = []
            for B in range(nh):
                hAB = htinv[Aa][B]
                if hAB.is_zero:
                    continue
                inner = [
                    jet_sum(ht[B][D] * Kblk[D][C] for D in range(nh)),
                    jet_sum(ht[C][D] * Kblk[D][B] for D in range(nh)),
                    (-1j * sgn[C] * hfull[B, C]) * (s * inv_phi),
                ]
                terms.append(hAB * jet_sum(inner))
            psi0_thetaC[Aa][C] = 0.5 * jet_sum(terms)

    # table[L][J][K]: slots L = dphi/theta/theta~^C evaluated on the frame
    table = [[[_ZERO] * d for _ in range(d)] for _ in range(d)]

    # psi_inf^inf
    table[0][0][0] = LaurentJet.monomial(-1.0, -1)
    # psi_inf^0
    piv = LaurentJet.monomial(-1.0, -1) + 0.5 * (s_inv * ds)
    table[1][0][1] = piv
    for Aa in range(nh):
        table[2 + Aa][0][1] = -0.5 * (phi * (s_inv * ht_e[Aa]))
    # psi_inf^A
    for Aa in range(nh):
        table[1][0][2 + Aa] = 0.5 * e_vec[Aa]
        for C in range(nh):
            table[2 + C][0][2 + Aa] = 0.5 * (-(phi * jet_sum(
                htinv[Aa][B] * dg_mov[B][C] for B in range(nh)
            )))
    # psi_0^inf
    table[1][1][0] = 4.0 * (inv_phi * s) - 2.0 * ds
    for Aa in range(nh):
        table[2 + Aa][1][0] = 2.0 * (phi * ht_e[Aa])
    # psi_0^0
    table[0][1][1] = piv
    # psi_0^A
    for Aa in range(nh):
        table[0][1][2 + Aa] = -0.5 * e_vec[Aa]
        table[1][1][2 + Aa] = -1j * (s * jet_sum(
            (sgn[C] * htinv[Aa][C]) * eta_low[C] for C in range(nh)
        ))
        for C in range(nh):
            table[2 + C][1][2 + Aa] = psi0_thetaC[Aa][C]
    # psi_A^inf
    for Aa in range(nh):
        table[1][2 + Aa][0] = 2.0 * (phi * ht_e[Aa])
        for C in range(nh):
            table[2 + C][2 + Aa][0] = -2.0 * (phi2 * dg_mov[Aa][C])
    # psi_A^0
    for Aa in range(nh):
        table[0][2 + Aa][1] = -0.5 * (phi * (s_inv * ht_e[Aa]))
        table[1][2 + Aa][1] = (-1j * sgn[Aa]) * (phi * eta_low[Aa])
        for C in range(nh):
            table[2 + C][2 + Aa][1] = phi * (s_inv * jet_sum(
                ht[Aa][B] * psi0_thetaC[B][C] for B in range(nh)
            ))
    # psi_A^B; cp is the contact pairing c_{CA}^T and htl the ht-lowered eta
    cp = m.c[1:, 1:, 0]
    htl = [jet_sum(ht[X][E] * eta[E] for E in range(nh)) for X in range(nh)]
    for Aa in range(nh):
        for B in range(nh):
            table[0][2 + Aa][2 + B] = 0.5 * (phi * jet_sum(
                htinv[B][C] * (inv_phi * ht[Aa][C]).differentiate() for C in range(nh)
            ))
            table[1][2 + Aa][2 + B] = psi0_thetaC[B][Aa] - Kblk[B][Aa]
            for C in range(nh):
                terms = []
                for D in range(nh):
                    hBD = htinv[B][D]
                    if hBD.is_zero:
                        continue
                    inner2 = []
                    for E in range(nh):
                        cDC = w[D, E, 1 + C] - w[C, E, 1 + D]
                        if cDC != 0:
                            inner2.append((-cDC) * ht[Aa][E])
                        cDA = w[D, E, 1 + Aa] - w[Aa, E, 1 + D]
                        if cDA != 0:
                            inner2.append((-cDA) * ht[C][E])
                        cCA = w[C, E, 1 + Aa] - w[Aa, E, 1 + C]
                        if cCA != 0:
                            inner2.append((-cCA) * ht[D][E])
                    # shift-vector completion: contact pairing against eta
                    if cp[C, Aa] != 0:
                        inner2.append((cp[C, Aa] * phi) * htl[D])
                    if cp[C, D] != 0:
                        inner2.append((-cp[C, D] * phi) * htl[Aa])
                    if cp[Aa, D] != 0:
                        inner2.append((-cp[Aa, D] * phi) * htl[C])
                    if inner2:
                        terms.append(hBD * jet_sum(inner2))
                table[2 + C][2 + Aa][2 + B] = 0.5 * jet_sum(terms) if terms else _ZERO

    worst = 0.0
    diffs = {}
    for L in range(d):
        for J in range(d):
            for Kk in range(d):
                dval = (transported[L][J][Kk] - table[L][J][Kk]).max_abs()
                diffs[(L, J, Kk)] = dval
                worst = max(worst, dval)
    if detail:
        return worst, diffs, transported, table
    return worst
