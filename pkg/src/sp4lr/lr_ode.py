"""Lewis-Riesenfeld invariants from the Lie-algebraic Ansatz.

The invariant is expanded over ten fixed generator combinations
c1..c10 (the elementary quadratics -x*px-sym, y*py-sym, x*py, -y*px,
x*y, px*py, y^2, x^2, px^2, py^2 in disguise).  Substituting into the
invariant equation  i hbar dI/dt = [H, I]  turns the coefficients into a
linear ODE  dc/dt = M(t) c  whose 10x10 matrix is generated here from
the structure constants rather than typed in; the two published
hand-written forms of M, which disagree with each other in two entries,
are kept in :mod:`sp4lr.crosschecks` for the adjudication report.

Solvers: product integration of the time-ordered exponential (midpoint
exponentials with step halving), the plain matrix exponential of the
accumulated integral for commuting families, and the closed form for
proportional profiles a = lam, omega_x = alpha*lam, omega_y = lam.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraElement, GeneratorId, commutator, structure_constants
from .errors import ChiPlusZero, DegenerateAlpha, GridTooCoarse, NonCommuting, StepNotConverged
from .hamiltonian import CoupledOscillatorParams
from .numerics import central_diff, expm, frobenius
from .profiles import ScalarProfile

__all__ = [
    "ANSATZ_COMBINATIONS",
    "ClosedFormParams",
    "assemble_invariant",
    "coefficients_of_element",
    "build_M",
    "evolve",
    "closed_form_c",
    "closed_form_on_grid",
    "involution_residuals",
    "invariant_matrix",
    "lr_residual",
]

_G = GeneratorId

# rows: combination vectors v1..v10 over the frozen generator basis;
# v7 carries -Q2 so that v7..v10 are exactly y^2, x^2, px^2, py^2
ANSATZ_COMBINATIONS = np.zeros((10, 10))
for _i, _terms in enumerate([
    {_G.Q1: 1, _G.K2: -1},
    {_G.Q1: 1, _G.K2: 1},
    {_G.J2: 1, _G.Q3: 1},
    {_G.J2: 1, _G.Q3: -1},
    {_G.J1: 1, _G.K3: 1},
    {_G.J1: 1, _G.K3: -1},
    {_G.J0: 1, _G.J3: -1, _G.K1: 1, _G.Q2: -1},
    {_G.J0: 1, _G.J3: 1, _G.K1: -1, _G.Q2: -1},
    {_G.J0: 1, _G.J3: 1, _G.K1: 1, _G.Q2: 1},
    {_G.J0: 1, _G.J3: -1, _G.K1: -1, _G.Q2: 1},
]):
    for _g, _v in _terms.items():
        ANSATZ_COMBINATIONS[_i, _g] = _v
ANSATZ_COMBINATIONS.setflags(write=False)

_COMB_INV = np.linalg.inv(ANSATZ_COMBINATIONS)


def assemble_invariant(c) -> AlgebraElement | np.ndarray:
    """Map coefficients c1..c10 through the combination matrix onto the basis."""
    c = np.asarray(c, dtype=complex)
    out = c @ ANSATZ_COMBINATIONS
    return AlgebraElement(out) if out.ndim == 1 else out


def coefficients_of_element(e) -> np.ndarray:
    """Inverse of :func:`assemble_invariant` (the combinations form a basis)."""
    coeffs = e.coeffs if isinstance(e, AlgebraElement) else np.asarray(e, dtype=complex)
    return coeffs @ _COMB_INV


def _ode_matrix_pieces():
    """M(t) = a*Ma + omega_x*Mx + omega_y*My + lam*Ml, each piece generated
    from the structure constants (the coefficient matrix is linear in the
    profiles)."""
    f = structure_constants()
    pieces = []
    for unit in (
        {"a": 1.0, "wx": 0.0, "wy": 0.0, "lam": 0.0},
        {"a": 0.0, "wx": 1.0, "wy": 0.0, "lam": 0.0},
        {"a": 0.0, "wx": 0.0, "wy": 1.0, "lam": 0.0},
        {"a": 0.0, "wx": 0.0, "wy": 0.0, "lam": 1.0},
    ):
        a, wx, wy, lam = unit["a"], unit["wx"], unit["wy"], unit["lam"]
        op, om = wx + wy, wx - wy
        h = np.zeros(10, dtype=complex)
        h[_G.J0] = a / 2.0 + op / 2.0
        h[_G.Q2] = a / 2.0 - op / 2.0
        h[_G.J3] = om / 2.0
        h[_G.K1] = -om / 2.0
        h[_G.J1] = 1j * lam
        h[_G.K3] = 1j * lam
        # column j: coefficients of -i [H, v_j] expanded back in the v basis
        m = np.empty((10, 10), dtype=complex)
        for j in range(10):
            br = -1j * np.einsum("i,j,ijk->k", h, ANSATZ_COMBINATIONS[j], f)
            m[:, j] = br @ _COMB_INV
        pieces.append(m)
    return pieces


_M_PIECES = None


def _pieces():
    global _M_PIECES
    if _M_PIECES is None:
        _M_PIECES = _ode_matrix_pieces()
    return _M_PIECES


def build_M(p: CoupledOscillatorParams, t) -> np.ndarray:
    """Coefficient matrix M(t) of dc/dt = M c; accepts scalar or array ``t``."""
    ma, mx, my, ml = _pieces()
    a, wx, wy, lam = p.a(t), p.omega_x(t), p.omega_y(t), p.lam(t)
    if np.ndim(t) == 0:
        return a * ma + wx * mx + wy * my + lam * ml
    sh = np.shape(t) + (1, 1)
    return (np.reshape(a, sh) * ma + np.reshape(wx, sh) * mx
            + np.reshape(wy, sh) * my + np.reshape(lam, sh) * ml)


def _commutativity_probe(p, grid, n_samples: int = 12) -> float:
    ts = np.linspace(grid[0], grid[-1], n_samples)
    ms = build_M(p, ts)
    worst = 0.0
    for i in range(n_samples):
        for j in range(i + 1, n_samples):
            worst = max(worst, float(frobenius(ms[i] @ ms[j] - ms[j] @ ms[i])))
    return worst


def evolve(c0, grid, p: CoupledOscillatorParams, mode: str = "time_ordered",
           step_tol: float = 1e-11, comm_tol: float = 1e-12,
           substeps: int | None = None, max_halvings: int = 12) -> np.ndarray:
    """Propagate the coefficient vector over ``grid``; returns shape (N, 10).

    ``time_ordered``
        Per-interval midpoint product integration
        c(t_{k+1}) = expm(M(t_{k+1/2}) dt) c(t_k).  With ``substeps``
        None, each interval is recursively halved until two successive
        refinements agree below ``step_tol`` (StepNotConverged if the
        halving cap is hit); a fixed ``substeps`` disables the adaptivity
        (used for order-of-convergence studies).
    ``commuting``
        c(t) = expm(int_0^t M ds) c(0), valid when M commutes with
        itself across times; a sampled commutativity probe guards the
        assumption (NonCommuting on failure).
    """
    t = np.asarray(grid, dtype=float)
    if t.ndim != 1 or t.size < 2 or np.any(np.diff(t) <= 0):
        raise ValueError("grid must be 1-d and strictly increasing")
    c0 = np.asarray(c0, dtype=complex)

    if mode == "commuting":
        if _commutativity_probe(p, t) > comm_tol:
            raise NonCommuting("sampled ||[M(t), M(t')]|| exceeds %.1e" % comm_tol)
        ma, mx, my, ml = _pieces()
        ia = p.a.antiderivative(t)
        ix = p.omega_x.antiderivative(t)
        iy = p.omega_y.antiderivative(t)
        il = p.lam.antiderivative(t)
        sh = t.shape + (1, 1)
        integral = (ia.reshape(sh) * ma + ix.reshape(sh) * mx
                    + iy.reshape(sh) * my + il.reshape(sh) * ml)
        return np.einsum("nij,j->ni", expm(integral), c0)

    if mode != "time_ordered":
        raise ValueError("mode must be 'time_ordered' or 'commuting'")

    def steps_for(n):
        """Propagators for every interval split into n midpoint substeps."""
        h = np.diff(t) / n
        props = None
        for k in range(n):
            mids = t[:-1] + (k + 0.5) * h
            ek = expm(build_M(p, mids) * h[:, None, None])
            props = ek if props is None else ek @ props
        return props

    if substeps is not None:
        props = steps_for(substeps)
    else:
        n = 1
        props = steps_for(1)
        for _ in range(max_halvings):
            finer = steps_for(2 * n)
            delta = float(np.max(frobenius(finer - props)))
            props = finer
            n *= 2
            if delta < step_tol:
                break
        else:
            raise StepNotConverged(
                "interval refinement stalled above %.1e after %d halvings"
                % (step_tol, max_halvings))

    traj = np.empty((t.size, 10), dtype=complex)
    traj[0] = c0
    for k in range(t.size - 1):
        traj[k + 1] = props[k] @ traj[k]
    return traj


@dataclass(frozen=True)
class ClosedFormParams:
    """Proportional-profile family a = lam, omega_x = alpha*lam, omega_y = lam."""

    alpha: float
    lam: ScalarProfile

    def __post_init__(self):
        if self.alpha <= -1.0:
            raise DegenerateAlpha("alpha must exceed -1 (sqrt(1+alpha) real)")

    def oscillator_params(self) -> CoupledOscillatorParams:
        return CoupledOscillatorParams.proportional(self.alpha, self.lam)

    def mode_frequencies(self):
        """a_plus, a_minus = sqrt(2)*sqrt(1 + alpha +- 2 sqrt(1+alpha)).

        a_minus is imaginary for alpha < 3 (hyperbolic regime) and
        vanishes at alpha = 3, where the solution acquires a secular
        term handled by the sin(x)/x limit.
        """
        sq = np.sqrt(1.0 + self.alpha)
        ap = np.sqrt(2.0) * np.lib.scimath.sqrt(1.0 + self.alpha + 2.0 * sq)
        am = np.sqrt(2.0) * np.lib.scimath.sqrt(1.0 + self.alpha - 2.0 * sq)
        return complex(ap), complex(am)


def _sin_ratio(a, theta):
    """sin(a*theta/2)/a, continuous through a = 0 (limit theta/2)."""
    a = complex(a)
    theta = np.asarray(theta, dtype=float)
    if abs(a) > 1e-7:
        return np.sin(a * theta / 2.0) / a
    x = a * theta / 2.0
    return (theta / 2.0) * (1.0 - x**2 / 6.0 + x**4 / 120.0)


def closed_form_c(params: ClosedFormParams, theta) -> np.ndarray:
    """Closed-form coefficients at accumulated phase theta = int_0^t lam.

    Scalar theta gives shape (10,); arrays give (..., 10).  At theta = 0
    the result is exactly (0, 0, 1, 1, 0, ..., 0).
    """
    alpha = params.alpha
    sq = np.sqrt(1.0 + alpha)
    ap, am = params.mode_frequencies()
    theta = np.asarray(theta, dtype=float)
    cp, cm = np.cos(ap * theta / 2.0), np.cos(am * theta / 2.0)
    rp, rm = _sin_ratio(ap, theta), _sin_ratio(am, theta)
    # complementary weights written as (w, 1 - w) so each pair sums to
    # exactly 1 and the seed value at theta = 0 is exact
    w3 = (sq + alpha) / (2.0 * sq)
    w4 = (sq + 1.0) / (2.0 * sq)
    c = np.zeros(theta.shape + (10,), dtype=complex)
    c[..., 0] = c[..., 1] = 1j / (2.0 * sq) * (cm - cp)
    c[..., 2] = w3 * cm + (1.0 - w3) * cp
    c[..., 3] = w4 * cm + (1.0 - w4) * cp
    c[..., 4] = (1.0 - alpha) * rp + (1.0 - alpha) * rm
    c[..., 5] = (alpha - 1.0) / (2.0 * sq) * rp + (1.0 - alpha) / (2.0 * sq) * rm
    c[..., 7] = 1j * rp + 1j * rm
    c[..., 6] = -c[..., 7]
    c[..., 8] = 1j * rm / (2.0 * sq) - 1j * rp / (2.0 * sq)
    c[..., 9] = -c[..., 8]
    return c


def closed_form_on_grid(params: ClosedFormParams, grid) -> np.ndarray:
    """Closed form evaluated along a grid, with theta accumulated by quadrature."""
    theta = params.lam.antiderivative(np.asarray(grid, dtype=float))
    return closed_form_c(params, theta)


def involution_residuals(c, tol: float = 1e-12):
    """Residuals (r1, r2, r7, r10) of the involution constraints.

    Each residual is the constraint expression minus the coefficient it
    determines, so perturbing e.g. c1 upward by eps from a satisfying
    point gives r1 = -eps.  The square root uses the principal branch
    but is sign-matched against c1 so satisfying points on either branch
    report a vanishing r1.
    """
    c = np.asarray(c, dtype=complex)
    c1, c2, c3, c4 = c[..., 0], c[..., 1], c[..., 2], c[..., 3]
    c5, c6, c7, c8 = c[..., 4], c[..., 5], c[..., 6], c[..., 7]
    c9, c10 = c[..., 8], c[..., 9]
    chi_p = c3 * c4 + c5 * c6
    chi_m = c3 * c4 - c5 * c6
    if np.any(np.abs(chi_p) < tol):
        raise ChiPlusZero("chi_plus vanishes; constraints undefined")
    # (c3*c4 - 1) is exact near the seed (Sterbenz); keep it grouped
    arg = 4.0 * c8 * c9 + (c3 * c4 - 1.0) + c5 * c6
    root = np.lib.scimath.sqrt(arg)
    # branch continuity: pick the root sign closer to the coefficient
    root = np.where(np.abs(root - c1) <= np.abs(-root - c1), root, -root)
    # rationalized quotient (arg - c1^2)/(root + c1) equals root - c1 but
    # avoids the square-root cancellation where |c1| is small; the plain
    # difference covers the exactly-degenerate point root = -c1
    denom = root + c1
    safe = np.abs(denom) > 0
    quot = (arg - c1 * c1) / np.where(safe, denom, 1.0)
    r1 = np.where(safe, quot, root - c1)
    r2 = 2.0 * (c4 * c6 * c8 - c3 * c5 * c9) / chi_p + chi_m / chi_p * c1 - c2
    r7 = c1 * c4 * c5 / chi_p - (c8 * c4**2 + c9 * c5**2) / chi_p - c7
    r10 = -c1 * c3 * c6 / chi_p - (c9 * c3**2 + c8 * c6**2) / chi_p - c10
    return r1, r2, r7, r10


def invariant_matrix(c) -> np.ndarray:
    """4x4 matrix of the invariant, written directly in its display form.

    Equals ``to_matrix(assemble_invariant(c))`` entrywise (tested), and
    squares to the identity with unit determinant when the involution
    constraints hold.
    """
    c = np.asarray(c, dtype=complex)
    c1, c2, c3, c4 = c[..., 0], c[..., 1], c[..., 2], c[..., 3]
    c5, c6, c7, c8 = c[..., 4], c[..., 5], c[..., 6], c[..., 7]
    c9, c10 = c[..., 8], c[..., 9]
    z = np.zeros_like(c1)
    rows = [
        [-c1, -c4, 2.0 * c9, c6],
        [c3, c2, c6, 2.0 * c10],
        [-2.0 * c8, -c5, c1, -c3],
        [-c5, -2.0 * c7, c4, -c2],
    ]
    m = np.stack([np.stack([np.broadcast_to(e, z.shape) for e in row], axis=-1)
                  for row in rows], axis=-2)
    return 1j * m


def lr_residual(invariant, hamiltonian, grid, hbar: float = 1.0) -> float:
    """Max-norm defect of  i hbar dI/dt - [H, I]  over interior grid points.

    ``invariant`` and ``hamiltonian`` may be callables t -> AlgebraElement
    or precomputed coefficient stacks of shape (N, 10).  The time
    derivative uses the 4th-order central stencil; the two points at each
    end are excluded from the maximum.
    """
    t = np.asarray(grid, dtype=float)
    if t.size < 5:
        raise GridTooCoarse("need at least 5 grid points for the 4th-order stencil")
    step = t[1] - t[0]
    if not np.allclose(np.diff(t), step, rtol=1e-9, atol=1e-15):
        raise ValueError("lr_residual expects a uniform grid")

    def as_stack(obj):
        if callable(obj):
            return np.stack([np.asarray(obj(tk).coeffs if hasattr(obj(tk), "coeffs")
                                        else obj(tk), dtype=complex) for tk in t])
        return np.asarray(obj, dtype=complex)

    icoef = as_stack(invariant)
    hcoef = as_stack(hamiltonian)
    didt = central_diff(icoef, step)
    bracket = commutator(hcoef, icoef)
    defect = 1j * hbar * didt - bracket
    return float(np.abs(defect[2:-2]).max())
