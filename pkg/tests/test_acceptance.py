"""Acceptance suite: one test (or parametrized clause) per criterion.

Each criterion runs at its stated tolerance and prints a PASS/FAIL line.
Clauses that compare against published table cells are implemented
verbatim; a handful of those cells are internally inconsistent (they fail
the PV equation under their own row parameters, while the machinery's
residual-certified output passes), so the corresponding clauses fail
honestly with the evidence in the assertion message. The project notes
carry the full analysis.
"""

import math
import time
from fractions import Fraction as F

import numpy as np
import pytest

from susypv.hierarchies import crosscheck, detect
from susypv.operators import (
    check_commutator,
    check_factorization,
    check_intertwining,
    check_ladder_polynomial,
    check_new_level_annihilation,
    check_number_operator,
    check_shift_identities,
)
from susypv.oscillator import NU_INF, SeedSpec, e0, nu_lower_bound
from susypv.painleve import default_z_grid, pv_params_exact, solve
from susypv.specialfunctions import bessel_i, gamma, kummer_1f1, laguerre_l
from susypv.tables import (
    PERMUTATION_PARAMS,
    ksusy_exact_params,
    reproduce_table,
)

from oracles import mp_bessel_i, mp_hyp1f1


def _line(criterion: str, passed: bool, detail: str) -> str:
    tag = "PASS" if passed else "FAIL"
    msg = f"[{criterion}] {tag} {detail}"
    print(msg)
    return msg


# -- criterion 1: residual certificate over the regression matrix -----------


def test_criterion_1_residual_certificate():
    t0 = time.time()
    worst = 0.0
    worst_case = None
    for k in (1, 2, 3):
        for ell in (0.0, 1.0, 2.0, 5.0):
            eps1 = e0(ell) - 1.3
            nb = nu_lower_bound(ell, eps1)
            for dn in (0.2, 1.0, 10.0):
                spec = SeedSpec.from_nu(ell, eps1, nb + dn, k=k)
                sol = solve(spec)
                assert sol.classification == "generic"
                max_res, _ = sol.residual_certificate(default_z_grid(200, 0.1, 20.0))
                if max_res > worst:
                    worst, worst_case = max_res, (k, ell, dn)
    elapsed = time.time() - t0
    ok = worst <= 1e-8 and elapsed < 30.0
    _line("criterion-1", ok,
          f"36 solves, worst masked-grid residual {worst:.2e} at {worst_case}, "
          f"{elapsed:.1f}s")
    assert worst <= 1e-8
    assert elapsed < 30.0


# -- criterion 2: table reproduction -----------------------------------------

_W_ROWS = [("t1", "1423"), ("t1", "2413"), ("t1", "3412"),
           ("t2", "1423"), ("t2", "2413")]


@pytest.mark.parametrize("which,label", _W_ROWS, ids=[f"{w}-{l}" for w, l in _W_ROWS])
def test_criterion_2_closed_form_w_rows(which, label):
    """Published w(z) cells vs machinery, pointwise <= 1e-9 at 50 points."""
    failures = []
    for ell in (1.0, 2.0):
        rep = reproduce_table(which, ell, n_points=50)
        row = {r.label: r for r in rep.rows}[label]
        if row.w_status == "matched":
            continue
        detail = (f"l={ell}: published cell error "
                  f"{row.w_error_paper if row.w_error_paper is not None else 'n/a'}")
        if row.w_error_derived is not None and row.w_error_derived <= 1e-9:
            detail += (f"; machinery output equals a residual-certified closed form "
                       f"(err {row.w_error_derived:.1e}, residual "
                       f"{row.machinery_residual:.1e})")
        if row.classification != "generic":
            detail += f"; machinery output is {row.classification}"
        failures.append(detail)
    ok = not failures
    _line("criterion-2-w", ok, f"{which} row {label}"
          + ("" if ok else " -- published cell not reproduced: " + " | ".join(failures)))
    assert ok, (f"{which} row {label}: published cell does not satisfy its own "
                f"row parameters under the PV equation; {' | '.join(failures)}; "
                f"see the acceptance note in README.md")


def test_criterion_2_k_table_params_exact():
    for which in ("t0", "t1", "t2"):
        for ell in (F(0), F(1), F(2), F(5)):
            rep = reproduce_table(which, float(ell), n_points=8)
            for row in rep.rows:
                assert row.params_exact, (which, ell, row.label)
    _line("criterion-2-params", True, "Tables 0-2: all 8a/8b/4c entries exact "
                                      "as rationals at l in {0,1,2,5}")


_PERM_LABELS = ["1234", "1324", "1423", "2314", "2413", "3412"]


@pytest.mark.parametrize("label", _PERM_LABELS)
def test_criterion_2_permutation_table_exact(label):
    bad = []
    for ell in (F(0), F(1), F(5, 2), F(5)):
        for eps in (F(-1, 2), F(0), F(3, 4)):
            for k in (1, 2, 3, 4):
                pub = PERMUTATION_PARAMS(label, ell, eps, k)
                got = ksusy_exact_params(label, ell, eps, k)
                if tuple(pub) != tuple(got):
                    bad.append((ell, eps, k, pub[2], got[2]))
    ok = not bad
    _line("criterion-2-permutation-table", ok,
          f"row {label}" + ("" if ok else
                            f" -- published 4c off the alpha route by "
                            f"{bad[0][3] - bad[0][4]} (own k=1/k=2 tables agree "
                            f"with the alpha route)"))
    assert ok, (f"six-permutation table row {label}: published entry "
                f"disagrees with the alpha route and with the same table's "
                f"k=1/k=2 specializations; see the acceptance note in README.md")


def test_criterion_2_residual_certified_rows():
    for ell in (1.0, 2.0):
        rep = reproduce_table("t0", ell, n_points=50)
        rows = {r.label: r for r in rep.rows}
        for lab in ("1324", "2314"):
            assert rows[lab].w_status == "residual-certified"
            assert rows[lab].machinery_residual <= 1e-8
    _line("criterion-2-residual-rows", True,
          "Table-0 incomplete-gamma rows residual-certified (<= 1e-8)")


# -- criterion 3: complex regimes ---------------------------------------------


def test_criterion_3_complex_mixture_regimes():
    cases = [
        ("l=3 eps=0 kappa=100", SeedSpec.from_lambda_kappa(3.0, 0.0, 0.0, 100.0)),
        ("l=2 eps=2 kappa=G(-1/4)/G(7/4)",
         SeedSpec.from_lambda_kappa(2.0, 2.0, 0.0, (gamma(-0.25) / gamma(1.75)).real)),
    ]
    for name, spec in cases:
        sol = solve(spec)
        max_res, _ = sol.residual_certificate()
        assert max_res <= 1e-8, name
        # real parameters, equal to the closed forms
        ez, eps = e0(spec.ell), complex(spec.eps1)
        assert abs(sol.params.a - (eps + ez) ** 2 / 2) <= 1e-12
        assert abs(sol.params.b + (ez - eps) ** 2 / 2) <= 1e-12
        assert abs(sol.params.c - (1 - 2 * ez) / 2) <= 1e-12
        assert abs(sol.params.a.imag) <= 1e-12
    _line("criterion-3-mixtures", True,
          "complex-mixture regimes: residual <= 1e-8, real parameters exact")


def _complex_eps_solution():
    spec = SeedSpec.from_nu(3.0, 1 + 11j, 100j, k=1)
    return solve(spec)


def test_criterion_3_complex_eps_residual():
    sol = _complex_eps_solution()
    max_res, _ = sol.residual_certificate()
    _line("criterion-3-residual", max_res <= 1e-8,
          f"l=3 eps1=1+11i: residual {max_res:.2e}")
    assert max_res <= 1e-8


_PRINTED_COMPLEX = {
    "a": complex(-115 / 4, 429 / 16),
    "b": complex(1911 / 32, 55 / 4),
    "c": complex(49 / 4, 0),
}


@pytest.mark.parametrize("name", ["a", "b", "c"])
def test_criterion_3_complex_parameter_values(name):
    sol = _complex_eps_solution()
    got = complex(getattr(sol.params, name))
    want = _PRINTED_COMPLEX[name]
    ok = abs(got - want) <= 1e-12 * max(1.0, abs(want))
    _line("criterion-3-params", ok,
          f"{name}: machinery {got:.6g}, published {want:.6g}")
    assert ok, (f"published {name}={want} is not reproduced from l=3, "
                f"eps1=1+11i under any quartet ordering (machinery alpha "
                f"route gives {got}); see the acceptance note in README.md")


# -- criterion 4: operator-identity suite -------------------------------------


def test_criterion_4_operator_identities():
    worst = 0.0
    for k in (1, 2, 3):
        spec = SeedSpec.from_nu(1.0, -0.4, 0.8, k=k)
        for rep in (check_intertwining(spec), check_factorization(spec),
                    check_new_level_annihilation(spec)):
            assert rep.passed, rep.line()
            worst = max(worst, rep.max_error)
    for ell in (0.0, 1.0, 3.0):
        for rep in (check_commutator(ell), check_shift_identities(ell),
                    check_ladder_polynomial(ell)):
            assert rep.passed, rep.line()
            worst = max(worst, rep.max_error)
    for n in (0, 1, 2):
        rep = check_number_operator(SeedSpec.from_nu(0.0, -0.55, 1.0, k=1), n)
        assert rep.passed, rep.line()
        worst = max(worst, rep.max_error)
    _line("criterion-4-identities", True,
          f"intertwining/commutator/factorization/number-operator all <= 1e-6 "
          f"(worst {worst:.2e})")


def test_criterion_4_reduction_quartic():
    worst = 0.0
    for k in (2, 3):
        spec = SeedSpec.from_nu(1.0, -0.4, 0.8, k=k)
        for n in (1, 2, 3, 4):
            rep = check_number_operator(spec, n)
            assert rep.passed, rep.line()
            worst = max(worst, rep.details["quartic_error"])
    _line("criterion-4-quartic", True,
          f"measured L+L- eigenvalue / P^2 equals the reduced quartic for "
          f"k=2,3 at n=1..4 (worst {worst:.2e})")


# -- criterion 5: special-function oracles ------------------------------------


def test_criterion_5_special_function_oracles():
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(20):
        a = complex(rng.uniform(-4, 4), rng.uniform(-2, 2))
        b = complex(rng.uniform(0.4, 4), rng.uniform(-1, 1))
        x = complex(rng.uniform(-9, 9), rng.uniform(-4, 4))
        ref = complex(mp_hyp1f1(a, b, x))
        worst = max(worst, abs(kummer_1f1(a, b, x) - ref) / max(1e-30, abs(ref)))
    assert worst <= 1e-11
    worst_i = 0.0
    for mu, x in ((2.0, 3.7), (0.5, 12.0), (-0.75, 2.0), (4.0, 30.0)):
        ref = complex(mp_bessel_i(mu, x))
        worst_i = max(worst_i, abs(bessel_i(mu, x) - ref) / abs(ref))
    assert worst_i <= 1e-11
    worst_k = 0.0
    for _ in range(50):
        a = complex(rng.uniform(-3, 3), rng.uniform(-1, 1))
        b = complex(rng.uniform(0.5, 4), rng.uniform(-1, 1))
        x = complex(rng.uniform(-10, 10), rng.uniform(-3, 3))
        d = kummer_1f1(a, b, x) - np.exp(x) * kummer_1f1(b - a, b, -x)
        worst_k = max(worst_k, abs(d) / max(1.0, abs(kummer_1f1(a, b, x))))
    assert worst_k <= 1e-11
    worst_l = 0.0
    for n in range(9):
        alpha = rng.uniform(-0.9, 2.5)
        x = complex(rng.uniform(0, 5), rng.uniform(-2, 2))
        poch = 1.0
        for j in range(n):
            poch *= alpha + 1 + j
        ref = poch / math.factorial(n) * kummer_1f1(-n, alpha + 1.0, x)
        worst_l = max(worst_l, abs(laguerre_l(n, alpha, x) - ref) / max(1.0, abs(ref)))
    assert worst_l <= 1e-11
    _line("criterion-5", True,
          f"1F1 vs oracle {worst:.1e}; I_mu vs oracle {worst_i:.1e}; "
          f"Kummer transform {worst_k:.1e}; Laguerre identity {worst_l:.1e}")


# -- criterion 6: hierarchy cross-checks --------------------------------------


def test_criterion_6_hierarchies():
    notes = []
    # polynomial and exponential must match the machinery
    rep = crosscheck(SeedSpec.from_nu(2.0, 0.75, 0.0))
    assert rep.matched_forms and rep.matched_forms[0].error <= 1e-9
    notes.append(f"polynomial matched ({rep.matched_forms[0].convention}, "
                 f"{rep.matched_forms[0].error:.1e})")
    rep = crosscheck(SeedSpec.from_nu(0.5, 0.0, NU_INF, mode="complex-over-real"))
    matched = [f for f in rep.matched_forms]
    assert matched and min(f.error for f in matched) <= 1e-9
    assert rep.machinery_residual <= 1e-8
    notes.append(f"exponential form {matched[0].form} matched "
                 f"({matched[0].error:.1e}); form 0 recorded unmatched")
    # hermite / laguerre / bessel: matched with recorded convention, or
    # recorded loudly with the machinery output residual-certified
    for name, spec in (
        ("hermite", SeedSpec.from_nu(0.0, 1.25, 0.0, mode="complex-over-real")),
        ("laguerre", SeedSpec.from_nu(2.0, 0.25, 0.0)),
        ("bessel", SeedSpec.from_nu(1.0, 0.0, 0.0)),
    ):
        rep = crosscheck(spec)
        assert rep.tag.family == name
        assert rep.machinery_residual <= 1e-8, name
        assert rep.form_results, name
        for fm in rep.form_results:
            assert fm.matched or fm.error is not None  # no silent pass
        got = [f"form{f.form}:{'ok' if f.matched else f'unmatched({f.error:.0e})'}"
               for f in rep.form_results]
        notes.append(f"{name} " + ",".join(got))
    # weber: residual only
    rep = crosscheck(SeedSpec.from_nu(0.0, 0.37, 0.0, mode="complex-over-real"))
    assert rep.tag.family == "weber"
    assert rep.form_results == []
    assert rep.machinery_residual <= 1e-8
    notes.append(f"weber residual-certified ({rep.machinery_residual:.1e})")
    _line("criterion-6", True, "; ".join(notes))
