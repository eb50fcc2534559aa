"""Published closed-form tables and their reproduction from the machinery.

Parameters are compared exactly, as rationals in (l, eps1, k). For the
w(z) columns each row is evaluated three ways where possible: the
machinery quartet output, the published cell, and (for rows where the
published cell is internally inconsistent) an independently derived
closed form that is certified against the PV residual. Rows whose cells
involve the generalized incomplete gamma are certified by residual only
and never matched symbolically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .oscillator import NU_INF, SeedSpec, e0
from .painleve import (
    CANONICAL_ORDERINGS,
    PVSolution,
    pv_params_exact,
    solution_from_quartet,
)
from .susy import extremal_quartet, radial_oscillator_quartet

__all__ = [
    "RowReport",
    "TableReport",
    "PERMUTATION_PARAMS",
    "ksusy_exact_params",
    "quartet_exact_params",
    "table_quartet",
    "table_param_entries",
    "table_w_cells",
    "reproduce_table",
    "params_table_report",
]

F = Fraction


# -- exact parameter formulas -------------------------------------------------

def PERMUTATION_PARAMS(label: str, ell: F, eps: F, k: int) -> tuple[F, F, F]:
    """(32a, 32b, 4c) of the six-permutation parameter table (rational eps)."""
    ell, eps = F(ell), F(eps)
    table = {
        "1234": ((2 * ell + 4 * eps + 3) ** 2,
                 -((-2 * ell + 4 * eps - 4 * k + 1) ** 2),
                 -2 * ell + 2 * k - 3),
        "1324": (F(16) * k * k, -4 * (2 * ell + 1) ** 2, 4 * eps - 2 * k),
        "1423": ((-2 * ell + 4 * eps + 1) ** 2,
                 -((2 * ell + 4 * eps - 4 * k + 3) ** 2),
                 2 * ell + 2 * k - 1),
        "2314": ((2 * ell + 4 * eps - 4 * k + 3) ** 2,
                 -((2 * ell - 4 * eps - 1) ** 2),
                 -2 * ell - 2 * k - 1),
        "2413": (4 * (2 * ell + 1) ** 2, -F(16) * k * k, -4 * eps + 2 * k - 4),
        "3412": ((2 * ell - 4 * eps + 4 * k - 1) ** 2,
                 -((2 * ell + 4 * eps + 3) ** 2),
                 2 * ell - 2 * k - 1),
    }
    return table[label]


def ksusy_exact_params(label: str, ell: F, eps: F, k: int) -> tuple[F, F, F]:
    """(32a, 32b, 4c) from the alpha route, exact, for the k-SUSY quartet."""
    p = pv_params_exact(F(ell), (F(eps), F(0)), k, label)
    assert p["a"][1] == 0 and p["b"][1] == 0 and p["c"][1] == 0
    return (32 * p["a"][0], 32 * p["b"][0], 4 * p["c"][0])


def quartet_exact_params(label: str, energies: list[F]) -> tuple[F, F, F]:
    """(8a, 8b, 4c) from explicit rational slot energies (alpha route)."""
    idx = [int(ch) - 1 for ch in label]
    e = [energies[i] for i in idx]
    a1 = e[0] - e[1]
    a3 = e[2] - e[3]
    a2 = e[1] - e[2]
    a4 = e[3] - e[0] + 1
    return (8 * a1 * a1 / 2, -8 * a3 * a3 / 2, 4 * (a2 - a4) / 2)


# -- table definitions --------------------------------------------------------

def table_param_entries(which: str, ell: F) -> dict[str, tuple[F, F, F]]:
    """Published (8a, 8b, 4c) entries of Tables 0/1/2 as rationals in l."""
    ell = F(ell)
    if which == "t0":
        return {
            "1234": ((2 * ell + 1) ** 2, F(0), -2 * ell - 7),
            "1324": (F(4), -((2 * ell + 3) ** 2), 2 * ell - 1),
            "1423": (F(4), -((2 * ell + 3) ** 2), 2 * ell - 1),
            "2314": ((2 * ell + 3) ** 2, F(-4), -2 * ell - 3),
            "2413": ((2 * ell + 3) ** 2, F(-4), -2 * ell - 3),
            "3412": (F(0), -((2 * ell + 1) ** 2), 2 * ell + 3),
        }
    if which == "t1":
        return {
            "1234": ((2 * ell + 3) ** 2, F(0), -2 * ell - 1),
            "1324": (F(4), -((2 * ell + 1) ** 2), 2 * ell + 1),
            "1423": (F(4), -((2 * ell + 1) ** 2), 2 * ell + 1),
            "2314": ((2 * ell + 1) ** 2, F(-4), -2 * ell - 5),
            "2413": ((2 * ell + 1) ** 2, F(-4), -2 * ell - 5),
            "3412": (F(0), -((2 * ell + 3) ** 2), 2 * ell - 3),
        }
    if which == "t2":
        return {
            "1234": ((2 * ell + 5) ** 2, F(0), -2 * ell + 1),
            "1324": (F(16), -((2 * ell + 1) ** 2), 2 * ell + 3),
            "1423": (F(16), -((2 * ell + 1) ** 2), 2 * ell + 3),
            "2314": ((2 * ell + 1) ** 2, F(-16), -2 * ell - 7),
            "2413": ((2 * ell + 1) ** 2, F(-16), -2 * ell - 7),
            "3412": (F(0), -((2 * ell + 5) ** 2), 2 * ell - 5),
        }
    raise ValueError(f"unknown table {which!r}")


def table_quartet(which: str, ell: float):
    """Quartet generating a table, plus its exact slot energies."""
    le = F(ell) if float(ell) == float(F(ell)) else None
    ez = F(1, 2) * F(ell) + F(3, 4) if le is not None else None
    if which == "t0":
        q = radial_oscillator_quartet(float(ell))
        energies = [ez, 1 - ez, ez + 1, ez + 1] if ez is not None else None
        return q, energies
    if which == "t1":
        spec = SeedSpec.from_nu(float(ell), e0(float(ell)), NU_INF, k=1,
                                mode="complex-over-real")
        q = extremal_quartet(spec)
        energies = [ez + 1, 1 - ez, ez, ez] if ez is not None else None
        return q, energies
    if which == "t2":
        spec = SeedSpec.from_nu(float(ell), e0(float(ell)) + 1.0, NU_INF, k=2,
                                mode="complex-over-real")
        q = extremal_quartet(spec)
        energies = [ez + 2, 1 - ez, ez, ez] if ez is not None else None
        return q, energies
    raise ValueError(f"unknown table {which!r}")


def table_w_cells(which: str, ell: float) -> dict[str, dict]:
    """w(z) column data: published cell and, where it differs, the
    independently derived machinery closed form (PV-residual certified)."""
    L = float(ell)
    if which == "t0":
        return {
            "1234": {"kind": "degenerate", "note": "w == 0"},
            "1324": {"kind": "residual-only",
                     "note": "incomplete-gamma cell; admixture-dependent"},
            "1423": {"kind": "closed", "paper": lambda z: 1.0 + z / (2 * L - 1),
                     "derived": None},
            "2314": {"kind": "residual-only",
                     "note": "incomplete-gamma cell; admixture-dependent"},
            "2413": {"kind": "closed", "paper": lambda z: 1.0 + (1 - 2 * L - z) / 2.0,
                     "derived": None},
            "3412": {"kind": "degenerate", "note": "w == inf"},
        }
    if which == "t1":
        def t1_2413_paper(z):
            num = z * (8 * L**3 - 4 * L**2 * (z - 1) - 2 * L * (5 * z * z + 2 * z + 2)
                       + 5 * (z - 3) * z * z)
            den = (-8 * L**3 * (z - 4) + 4 * L**2 * (z * z - 3 * z + 4)
                   + 2 * L * (5 * z**3 + 2 * z * z - 2 * z - 8) - 5 * (z - 1) * z**3)
            return 1.0 + num / den

        def t1_3412_paper(z):
            num = z * (8 * L**3 + 4 * L**2 - 2 * L * (2 + 5 * z * z) - 15 * z * z)
            den = 16 * L * (2 * L * L + L - 1)
            return 1.0 + num / den

        return {
            "1234": {"kind": "degenerate", "note": "w == 1"},
            "1324": {"kind": "degenerate", "note": "w == 1"},
            "1423": {"kind": "closed",
                     "paper": lambda z: 1.0 + z / (2 * L - z + 1), "derived": None},
            "2314": {"kind": "degenerate", "note": "w == 1"},
            "2413": {"kind": "closed", "paper": t1_2413_paper,
                     "derived": lambda z: 2.0 / (z - 2 * L - 1)},
            "3412": {"kind": "closed", "paper": t1_3412_paper,
                     "derived": None,
                     "note": "machinery output is degenerate (w == inf)"},
        }
    if which == "t2":
        def d2(z):
            return z * z - 2 * z * (2 * L + 1) + (2 * L + 1) * (2 * L + 3)

        return {
            "1234": {"kind": "degenerate", "note": "w == 1"},
            "1324": {"kind": "degenerate", "note": "w == 1"},
            "1423": {"kind": "closed",
                     "paper": lambda z: 4 * (z - 2 * L - 3) / (z * z - 2 * z * (2 * L + 1)
                                                               + 4 * L * L + 8 * L + 3),
                     "derived": lambda z: (2 * L + 1) * (2 * L + 3 - z) / d2(z)},
            "2314": {"kind": "degenerate", "note": "w == 1"},
            "2413": {"kind": "closed",
                     "paper": lambda z: (-z + 2 * L + 3) * (2 * L + 1)
                     / (z * z - 2 * z * (2 * L + 1) + 4 * L * (L - 2) + 3),
                     "derived": lambda z: 4 * (z - 2 * L - 3) / d2(z)},
            "3412": {"kind": "degenerate", "note": "w == inf"},
        }
    raise ValueError(f"unknown table {which!r}")


# -- reproduction reports -----------------------------------------------------

@dataclass
class RowReport:
    label: str
    params_exact: bool
    w_status: str  # matched | mismatch | residual-certified | degenerate
    w_error_paper: float | None = None
    w_error_derived: float | None = None
    machinery_residual: float | None = None
    classification: str = ""
    note: str = ""

    def ok(self) -> bool:
        return self.params_exact and self.w_status in ("matched", "residual-certified",
                                                       "degenerate")


@dataclass
class TableReport:
    which: str
    ell: float
    rows: list[RowReport] = field(default_factory=list)

    def all_ok(self) -> bool:
        return all(r.ok() for r in self.rows)


def _compare_w(sol: PVSolution, form, zs) -> float | None:
    errs = []
    for z in zs:
        s = sol.w_eval(float(z))
        if s.flag != "ok":
            continue
        try:
            ref = form(float(z))
        except ZeroDivisionError:
            continue
        errs.append(abs(s.w - ref) / max(1.0, abs(ref)))
    return max(errs) if errs else None


def reproduce_table(which: str, ell: float, n_points: int = 50,
                    w_tol: float = 1e-9) -> TableReport:
    """Recompute one table from the machinery and grade every row."""
    quartet, exact_energies = table_quartet(which, ell)
    params_published = table_param_entries(which, F(ell))
    cells = table_w_cells(which, ell)
    zs = np.geomspace(0.4, 18.0, n_points)
    report = TableReport(which, ell)
    for label in CANONICAL_ORDERINGS:
        pub = params_published[label]
        got = quartet_exact_params(label, exact_energies)
        params_ok = tuple(got) == tuple(pub)
        sol = solution_from_quartet(quartet, label)
        cell = cells[label]
        row = RowReport(label, params_ok, "", classification=sol.classification,
                        note=cell.get("note", ""))
        if sol.classification != "generic":
            row.w_status = "degenerate" if cell["kind"] != "closed" else "mismatch"
            report.rows.append(row)
            continue
        mr, _ = sol.residual_certificate(zs)
        row.machinery_residual = mr
        if cell["kind"] == "residual-only":
            row.w_status = "residual-certified" if mr <= 1e-8 else "mismatch"
        elif cell["kind"] == "degenerate":
            row.w_status = "mismatch"  # table says degenerate, machinery generic
        else:
            row.w_error_paper = _compare_w(sol, cell["paper"], zs)
            if cell.get("derived") is not None:
                row.w_error_derived = _compare_w(sol, cell["derived"], zs)
            err = row.w_error_paper
            row.w_status = "matched" if (err is not None and err <= w_tol) else "mismatch"
        report.rows.append(row)
    return report


def params_table_report(ells=(F(0), F(1), F(2), F(5, 2), F(5)),
                        epss=(F(-1, 2), F(0), F(3, 4), F(7, 4)),
                        ks=(1, 2, 3, 4)) -> list[tuple]:
    """Exact check of the six-permutation table over rational samples.

    Returns [(label, ok, n_samples)]; ok means the published 32a/32b/4c
    agree exactly with the alpha route at every sampled (l, eps1, k).
    """
    out = []
    for label in CANONICAL_ORDERINGS:
        ok = True
        count = 0
        for ell in ells:
            for eps in epss:
                for k in ks:
                    pub = PERMUTATION_PARAMS(label, ell, eps, k)
                    got = ksusy_exact_params(label, ell, eps, k)
                    count += 1
                    if tuple(pub) != tuple(got):
                        ok = False
        out.append((label, ok, count))
    return out
