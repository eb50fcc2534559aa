"""Wronskian machinery, partner potentials and extremal quartets.

Low-order Wronskian derivatives follow the row multi-index rule,
    W'  = det(rows 0..m-2, m)
    W'' = det(rows 0..m-3, m-1, m) + det(rows 0..m-2, m+1),
with LU-evaluated determinants (that is the wronskian() contract and the
fallback/oracle route). Full derivative jets, which operator chains need
to high order, come instead from the Taylor series of the determinant:
series coefficients track the function's own analytic scale, so the
cancellations stay benign where the multi-index sum would lose most of
its digits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .jets import (
    jet_from_taylor,
    series_diff,
    series_div,
    series_mul,
    taylor_from_jet,
)
from .oscillator import (
    ClosedFormSolution,
    DomainError,
    RadialPotential,
    SchrodingerSolution,
    SeedSpec,
    apply_b_plus,
    e0,
    physical_eigenfunction,
    seed_chain,
)

__all__ = [
    "SingularEvaluationError",
    "WronskianStack",
    "wronskian",
    "PartnerPotential",
    "partner_potential",
    "WronskianRatioState",
    "transformed_state",
    "ExtremalQuartet",
    "extremal_quartet",
    "radial_oscillator_quartet",
    "PerpSolution",
    "LinearCombination",
    "ground_style_state",
]

_TERM_CACHE: dict[tuple[int, int], list[dict[tuple[int, ...], float]]] = {}


class SingularEvaluationError(ArithmeticError):
    """Wronskian underflow at a node (potential singularity of V_k)."""


def _det_extended(mat: np.ndarray, rows: tuple[int, ...]) -> complex:
    """Determinant of the selected rows, by LU with partial pivoting.

    Runs in clongdouble: the stacked columns share their dominant
    exponential at large x, and 80-bit elimination keeps the cancellation
    from eating into the double-precision budget of the inputs.
    """
    m = len(rows)
    if m == 1:
        return complex(mat[rows[0], 0])
    a = mat[list(rows), :].copy()
    det = np.clongdouble(1.0)
    for j in range(m):
        p = j + int(np.argmax(np.abs(a[j:, j])))
        if a[p, j] == 0:
            return 0.0 + 0.0j
        if p != j:
            a[[j, p], :] = a[[p, j], :]
            det = -det
        det = det * a[j, j]
        for i in range(j + 1, m):
            a[i, j:] = a[i, j:] - (a[i, j] / a[j, j]) * a[j, j:]
    return complex(det)


def _term_maps(m: int, order: int) -> list[dict[tuple[int, ...], float]]:
    """Row multi-index expansions of W^(0..order) for an m-stack."""
    key = (m, order)
    maps = _TERM_CACHE.get(key)
    if maps is not None:
        return maps
    maps = [{tuple(range(m)): 1.0}]
    for _ in range(order):
        nxt: dict[tuple[int, ...], float] = {}
        for rows, coeff in maps[-1].items():
            for i in range(m):
                bumped = rows[i] + 1
                if i + 1 < m and bumped == rows[i + 1]:
                    continue  # duplicate rows: determinant vanishes
                new = rows[:i] + (bumped,) + rows[i + 1:]
                nxt[new] = nxt.get(new, 0.0) + coeff
        maps.append(nxt)
    _TERM_CACHE[key] = maps
    return maps


class WronskianStack:
    """Ordered solutions sharing one ell, with Wronskian jets at any point.

    The empty stack has W = 1 by convention so k = 1 formulas degenerate
    gracefully.
    """

    def __init__(self, solutions: list[SchrodingerSolution], require_distinct: bool = False):
        self.solutions = list(solutions)
        if self.solutions:
            ells = {s.ell for s in self.solutions}
            if len(ells) != 1:
                raise ValueError("stack members must share ell")
            if require_distinct:
                energies = [complex(s.energy) for s in self.solutions]
                for i in range(len(energies)):
                    for j in range(i + 1, len(energies)):
                        if abs(energies[i] - energies[j]) < 1e-12:
                            raise ValueError("stack energies must be pairwise distinct")
        self._det_cache: dict[tuple[float, tuple[int, ...]], complex] = {}
        self._jet_cache: dict[float, np.ndarray] = {}

    @property
    def size(self) -> int:
        return len(self.solutions)

    def jet(self, x: float, order: int) -> np.ndarray:
        """[W, W', ..., W^(order)] at x.

        Computed as the Taylor series of the determinant (series LU with
        partial pivoting, extended precision): coefficient magnitudes then
        follow the function's own analytic scale, which keeps high-order
        derivatives far better conditioned than the raw Leibniz expansion.
        """
        m = self.size
        if m == 0:
            out = np.zeros(order + 1, dtype=complex)
            out[0] = 1.0
            return out
        cached = self._jet_cache.get(x)
        if cached is not None and len(cached) > order:
            return np.asarray(cached[: order + 1], dtype=complex)
        max_row = m - 1 + order
        tser = self._taylor_det(x, order, max_row)
        if tser is None:
            out = self._jet_multiindex(x, order)
        else:
            out = jet_from_taylor(tser).astype(complex)
        self._jet_cache[x] = out
        return out

    def _jet_multiindex(self, x: float, order: int) -> np.ndarray:
        """Leibniz expansion over row multi-indices (fallback/oracle route)."""
        m = self.size
        max_row = m - 1 + order
        cols = [s.jet_values(x, max_row) for s in self.solutions]
        mat = np.column_stack(cols).astype(np.clongdouble)
        out = np.empty(order + 1, dtype=complex)
        for n, terms in enumerate(_term_maps(m, order)):
            acc = np.clongdouble(0.0)
            for rows, coeff in terms.items():
                key = (x, rows)
                d = self._det_cache.get(key)
                if d is None:
                    d = _det_extended(mat, rows)
                    self._det_cache[key] = d
                acc = acc + coeff * np.clongdouble(d)
            out[n] = complex(acc)
        return out

    def _taylor_det(self, x: float, order: int, max_row: int) -> np.ndarray:
        m = self.size
        tcols = []
        for s in self.solutions:
            t = taylor_from_jet(s.jet_values(x, max_row)).astype(np.clongdouble)
            tcols.append(t)
        # a[r][c] = Taylor series of u_c^(r), truncated at `order`
        a = [[None] * m for _ in range(m)]
        for c in range(m):
            cur = tcols[c]
            for r in range(m):
                a[r][c] = cur[: order + 1].copy()
                if r + 1 < m:
                    cur = series_diff(cur)
        det = np.zeros(order + 1, dtype=np.clongdouble)
        det[0] = 1.0
        sign = 1.0
        for j in range(m):
            p = max(range(j, m), key=lambda i: abs(a[i][j][0]))
            if p != j:
                a[j], a[p] = a[p], a[j]
                sign = -sign
            piv = a[j][j]
            if piv[0] == 0:
                if not any(a[i][j].any() for i in range(j, m)):
                    return np.zeros(order + 1, dtype=np.clongdouble)
                # leading coefficients vanish exactly (a node of the pivot
                # functions at x): fall back to the Leibniz expansion
                return None
            det = series_mul(det, piv, order)
            for i in range(j + 1, m):
                if abs(a[i][j][0]) == 0.0 and not a[i][j].any():
                    continue
                factor = series_div(a[i][j], piv, order)
                for c in range(j + 1, m):
                    a[i][c] = a[i][c] - series_mul(factor, a[j][c], order)
        return sign * det

    def row_scale(self, x: float) -> float:
        """Product of row norms of the base jet matrix (scale-aware zero test)."""
        m = self.size
        if m == 0:
            return 1.0
        cols = [s.jet_values(x, m - 1) for s in self.solutions]
        mat = np.column_stack(cols)
        scale = 1.0
        for r in range(m):
            scale *= float(np.linalg.norm(mat[r, :]))
        return scale


def wronskian(stack: WronskianStack, x: float, deriv_order: int = 0) -> complex:
    """W(u_1,...,u_m) or its first/second derivative at x.

    This is the row multi-index contract (W' = det(rows 0..m-2, m), etc.);
    the stack's series jets agree with it and extend to any order.
    """
    if deriv_order not in (0, 1, 2):
        raise ValueError("deriv_order must be 0, 1 or 2")
    if stack.size == 0:
        return 1.0 + 0.0j if deriv_order == 0 else 0.0 + 0.0j
    return complex(stack._jet_multiindex(x, deriv_order)[deriv_order])


class PartnerPotential:
    """V_k(x) = V0(x) - (ln W(u_1,...,u_k))'' and its derivatives.

    An empty chain needs an explicit ell and degenerates to V0 (the
    empty-stack Wronskian is 1).
    """

    def __init__(self, chain: list[SchrodingerSolution], ell: float | None = None):
        if not chain and ell is None:
            raise ValueError("an empty chain needs an explicit ell")
        self.ell = chain[0].ell if chain else float(ell)
        self.k = len(chain)
        self.stack = WronskianStack(chain)
        self.base = RadialPotential(self.ell)

    def deriv_jet(self, x: float, order: int) -> np.ndarray:
        if self.k == 0:
            return self.base.deriv_jet(x, order)
        wjet = self.stack.jet(x, order + 2)
        if abs(wjet[0]) < 1e-13 * self.stack.row_scale(x):
            raise SingularEvaluationError(f"W vanishes near x={x}: singular potential")
        tw = taylor_from_jet(wjet)
        logd = series_div(series_diff(tw), tw, order + 1)  # (ln W)' as a series
        lw2 = jet_from_taylor(series_diff(logd))           # (ln W)'' as a jet
        return self.base.deriv_jet(x, order) - lw2[: order + 1]

    def __call__(self, x: float) -> complex:
        return complex(self.deriv_jet(x, 0)[0])


def partner_potential(spec: SeedSpec, x: float) -> complex:
    """Convenience wrapper: build the chain for spec and evaluate V_k(x)."""
    return PartnerPotential(seed_chain(spec))(x)


class WronskianRatioState(SchrodingerSolution):
    """State of the transformed Hamiltonian, as a ratio of two Wronskians.

    value/derivative come from the Wronskian algebra alone; higher jet
    entries close under the partner-potential ODE at the state's energy.
    ratio_jet() bypasses the closure and differentiates the ratio itself,
    which is what the residual oracles use.
    """

    def __init__(self, numerator: WronskianStack, denominator: WronskianStack,
                 energy: complex, potential: PartnerPotential | RadialPotential,
                 label: str = ""):
        SchrodingerSolution.__init__(self, denominator.solutions[0].ell
                                     if denominator.size else numerator.solutions[0].ell,
                                     energy)
        self.potential = potential
        self.num = numerator
        self.den = denominator
        self.label = label

    def ratio_jet(self, x: float, order: int) -> np.ndarray:
        f = self.num.jet(x, order)
        g = self.den.jet(x, order)
        if abs(g[0]) < 1e-13 * self.den.row_scale(x):
            raise SingularEvaluationError(f"denominator Wronskian vanishes near x={x}")
        ratio = series_div(taylor_from_jet(f), taylor_from_jet(g), order)
        return jet_from_taylor(ratio)

    def value_and_derivative(self, x: float) -> tuple[complex, complex]:
        r = self.ratio_jet(x, 1)
        return complex(r[0]), complex(r[1])


def transformed_state(chain: list[SchrodingerSolution],
                      target: SchrodingerSolution,
                      potential: PartnerPotential | None = None) -> WronskianRatioState:
    """B_k^+ image of a target: W(u_1,...,u_k,target)/W(u_1,...,u_k).

    An empty chain is the identity transformation (the image is the
    target itself, in the base potential).
    """
    if potential is None:
        potential = PartnerPotential(chain, ell=getattr(target, "ell", None))
    if chain and target.ell != chain[0].ell:
        raise ValueError("target must share ell with the chain")
    return WronskianRatioState(WronskianStack(list(chain) + [target]),
                               WronskianStack(chain),
                               target.energy, potential, label="Bk+ image")


@dataclass
class ExtremalQuartet:
    """Four (state, energy) pairs in a chosen ordering, plus their potential.

    states expose value_and_derivative(x); all four are formal
    eigenfunctions of the Hamiltonian with potential `potential`.
    """

    states: tuple
    energies: tuple
    ordering_label: str
    potential: object
    ell: float
    meta: dict

    def pair_34(self):
        return self.states[2], self.states[3]


def extremal_quartet(spec: SeedSpec) -> ExtremalQuartet:
    """Canonical ("1234") extremal quartet of the k-th order partner.

    states: (B_k^+ b^+ u_1,  B_k^+ x^-l e^{-x^2/4},
             W(u_1..u_{k-1})/W(u_1..u_k),  B_k^+ x^{l+1} e^{-x^2/4})
    energies: (eps1 + 1, -E0 + 1, eps_k, E0).
    """
    chain = seed_chain(spec)
    ell = spec.ell
    vk = PartnerPotential(chain)
    full = WronskianStack(chain)
    raised = apply_b_plus(chain[0])
    psi1 = WronskianRatioState(WronskianStack(chain + [raised]), full,
                               spec.eps1 + 1.0, vk, "Bk+ b+ u1")
    phi2 = ground_style_state(ell, decaying=True, lower_branch=True)
    psi2 = WronskianRatioState(WronskianStack(chain + [phi2]), full,
                               -e0(ell) + 1.0, vk, "Bk+ x^-l gauss")
    psi3 = WronskianRatioState(WronskianStack(chain[:-1]), full,
                               spec.eps1 - (spec.k - 1), vk, "new ground")
    phi4 = ground_style_state(ell, decaying=True, lower_branch=False)
    psi4 = WronskianRatioState(WronskianStack(chain + [phi4]), full,
                               e0(ell) + 0.0j, vk, "Bk+ x^l+1 gauss")
    energies = (spec.eps1 + 1.0, -e0(ell) + 1.0 + 0.0j,
                spec.eps1 - (spec.k - 1), e0(ell) + 0.0j)
    return ExtremalQuartet((psi1, psi2, psi3, psi4), energies, "1234", vk, ell,
                           {"spec": spec, "chain": chain, "kind": "k-susy"})


def ground_style_state(ell: float, decaying: bool, lower_branch: bool) -> ClosedFormSolution:
    """x^{l+1} or x^{-l} times exp(-/+ x^2/4), with its exact energy.

    The four combinations are the formal states annihilated by the
    first-order factorization operators.
    """
    p = -ell if lower_branch else ell + 1.0
    s = -1.0 if decaying else 1.0
    if decaying:
        energy = -e0(ell) + 1.0 if lower_branch else e0(ell)
    else:
        energy = e0(ell) - 1.0 if lower_branch else -e0(ell)

    def fn(x: float, p=p, s=s):
        v = x**p * math.exp(s * 0.25 * x * x)
        return v, (p / x + s * 0.5 * x) * v

    tag = f"x^{p:g} exp({'+' if s > 0 else '-'}x^2/4)"
    return ClosedFormSolution(ell, energy, fn, label=tag)


class LinearCombination(SchrodingerSolution):
    """Pointwise linear combination of solutions sharing ell and energy."""

    def __init__(self, parts: list[SchrodingerSolution], coeffs: list[complex]):
        SchrodingerSolution.__init__(self, parts[0].ell, parts[0].energy, parts[0].potential)
        self.parts = parts
        self.coeffs = [complex(c) for c in coeffs]

    def value_and_derivative(self, x: float) -> tuple[complex, complex]:
        v = 0.0 + 0.0j
        dv = 0.0 + 0.0j
        for part, c in zip(self.parts, self.coeffs):
            pv, pdv = part.value_and_derivative(x)
            v += c * pv
            dv += c * pdv
        return v, dv


class PerpSolution(SchrodingerSolution):
    """Second solution at the same energy, Wronskian-normalized to 1.

    Built by reduction of order, phi = psi * int dt/psi^2 from an anchor.
    psi may have nodes; the integral representation is re-anchored on each
    inter-node segment and the connection constants are fixed by a Taylor
    (jet) continuation of the ODE across each node.
    """

    _TAYLOR_ORDER = 30

    def __init__(self, base: SchrodingerSolution, anchor: float = 1.0,
                 scan_hi: float = 12.0):
        SchrodingerSolution.__init__(self, base.ell, base.energy, base.potential)
        self.base = base
        nodes = self._find_nodes(1e-2, scan_hi)
        self._nodes = nodes
        self._segments = self._build_segments(anchor, nodes, scan_hi)

    def _find_nodes(self, lo: float, hi: float) -> list[float]:
        xs = np.geomspace(lo, hi, 600)
        vals = np.array([self.base.value_and_derivative(float(x))[0].real for x in xs])
        nodes = []
        for i in range(len(xs) - 1):
            if vals[i] == 0.0:
                nodes.append(float(xs[i]))
            elif vals[i] * vals[i + 1] < 0:
                a, b = float(xs[i]), float(xs[i + 1])
                fa = vals[i]
                for _ in range(80):
                    mid = 0.5 * (a + b)
                    fm = self.base.value_and_derivative(mid)[0].real
                    if fa * fm <= 0:
                        b = mid
                    else:
                        a, fa = mid, fm
                nodes.append(0.5 * (a + b))
        return nodes

    def _integrand(self, t: float) -> float:
        v = self.base.value_and_derivative(t)[0]
        return float((1.0 / (v * v)).real)

    def _build_segments(self, anchor: float, nodes: list[float], hi: float):
        # segment list: (lo, hi, anchor, offset C); phi = psi*(C + int_a^x psi^-2)
        bounds = [0.0] + nodes + [float("inf")]
        segments = []
        # place the first anchor inside the segment containing `anchor`
        for i in range(len(bounds) - 1):
            lo, up = bounds[i], bounds[i + 1]
            if lo < anchor < up:
                first = i
                break
        else:
            raise ValueError("anchor sits on a node")
        segments = [None] * (len(bounds) - 1)
        segments[first] = (bounds[first], bounds[first + 1], anchor, 0.0 + 0.0j)
        # continue to the right of the first segment
        for i in range(first + 1, len(bounds) - 1):
            node = bounds[i]
            prev = segments[i - 1]
            delta = min(0.4, 0.5 * (node - prev[0]),
                        0.5 * ((bounds[i + 1] if np.isfinite(bounds[i + 1]) else hi) - node))
            xl, xr = node - delta, node + delta
            phi_l, dphi_l = self._eval_in_segment(prev, xl)
            phi_r, dphi_r = self._taylor_step(xl, phi_l, dphi_l, xr)
            psi_r = self.base.value_and_derivative(xr)[0]
            segments[i] = (node, bounds[i + 1], xr, phi_r / psi_r)
        # and to the left
        for i in range(first - 1, -1, -1):
            node = bounds[i + 1]
            nxt = segments[i + 1]
            delta = min(0.4, 0.5 * (node - bounds[i]) if bounds[i] > 0 else 0.4,
                        0.25 * (nxt[1] - node) if np.isfinite(nxt[1]) else 0.4)
            xr, xl = node + delta, node - delta
            phi_r, dphi_r = self._eval_in_segment(nxt, xr)
            phi_l, dphi_l = self._taylor_step(xr, phi_r, dphi_r, xl)
            psi_l = self.base.value_and_derivative(xl)[0]
            segments[i] = (bounds[i], node, xl, phi_l / psi_l)
        return segments

    def _eval_in_segment(self, segment, x: float) -> tuple[complex, complex]:
        _, _, a, c_off = segment
        integral, _ = quad(self._integrand, a, x, limit=200, epsabs=1e-13, epsrel=1e-12)
        psi, dpsi = self.base.value_and_derivative(x)
        factor = c_off + integral
        return psi * factor, dpsi * factor + 1.0 / psi

    def _taylor_step(self, x0: float, phi: complex, dphi: complex, x1: float):
        """Continue (phi, phi') across a node using the ODE jet at x0."""
        carrier = ClosedFormSolution(self.ell, self.energy, lambda t: (phi, dphi))
        carrier.potential = self.potential
        jet = carrier.jet_values(x0, self._TAYLOR_ORDER)
        h = x1 - x0
        val = jet[self._TAYLOR_ORDER]
        for n in range(self._TAYLOR_ORDER - 1, -1, -1):
            val = jet[n] + val * h / (n + 1)
        der = jet[self._TAYLOR_ORDER]
        for n in range(self._TAYLOR_ORDER - 1, 0, -1):
            der = jet[n] + der * h / n
        return val, der

    def value_and_derivative(self, x: float) -> tuple[complex, complex]:
        if x <= 0:
            raise DomainError(f"evaluated at x={x} <= 0")
        for seg in self._segments:
            lo, up, _, _ = seg
            if lo < x < up or (x == up and not np.isfinite(up)):
                return self._eval_in_segment(seg, x)
        raise SingularEvaluationError(f"x={x} sits on a node of the base solution")


def radial_oscillator_quartet(ell: float, perp_admixture: complex = 0.0) -> ExtremalQuartet:
    """Extremal quartet of the plain radial oscillator.

    (x^{l+1}e^{-x^2/4}, x^{-l}e^{-x^2/4}, psi_1l, psi_1l_perp) with energies
    (E0, -E0+1, E1, E1); the perp state is Wronskian-normalized against
    psi_1l, W(psi_1l, perp) = 1, plus an explicit admixture of psi_1l.
    """
    s1 = ground_style_state(ell, decaying=True, lower_branch=False)
    s2 = ground_style_state(ell, decaying=True, lower_branch=True)
    s3 = physical_eigenfunction(1, 1, ell)
    perp = PerpSolution(s3, scan_hi=max(12.0, (2.0 * ell + 3.0) ** 0.5 + 4.0))
    s4 = LinearCombination([perp, s3], [1.0, perp_admixture]) if perp_admixture != 0 else perp
    energies = (e0(ell) + 0.0j, -e0(ell) + 1.0 + 0.0j, e0(ell) + 1.0 + 0.0j, e0(ell) + 1.0 + 0.0j)
    return ExtremalQuartet((s1, s2, s3, s4), energies, "1234", RadialPotential(ell), ell,
                           {"kind": "radial-oscillator", "perp_admixture": complex(perp_admixture)})
