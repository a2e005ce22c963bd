"""One test per acceptance criterion; each prints a single PASS/FAIL line."""

import time

import pytest

from qpoisson.cartan import sl2, type_a2, type_b2
from qpoisson.double import Double, formula_33, straightening_suite
from qpoisson.dualseries import (
    UNCORRECTED_DIFFERS, sl2_dual_series, congruence_checks, membership_family,
    mu_coproduct_check, mu_relation_check, solve_antipode, solve_coproduct,
    verify_sl2_dual_series,
)
from qpoisson.pairing import (
    VARIANTS, diagonal_support_check, expected_poisson_table, hopf_pairing_check,
    orthogonality_check, poisson_table,
)
from qpoisson.pbw import rewrite_oracle
from qpoisson.specialize import (
    ClassicalTensor, ClassicalElement, adjointness_check, basis_over_Z0,
    classical_relations_check, co_poisson_check, co_poisson_delta, expected_cobracket,
    frobenius_morphism_check, quantum_generator, z0_centrality_check,
)


@pytest.fixture
def verdict(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print("\n%s criterion %d: %s" % ("PASS" if ok else "FAIL", n, detail))
        assert ok, detail
    return emit


def test_criterion_01_straightening_laws(verdict):
    start = time.time()
    counts, bad = [], []
    for lattice, flavor in (("P", "bar"), ("Q", "divided")):
        n, fails = straightening_suite(lattice, flavor, 3)
        counts.append(n)
        bad += fails
    secs = time.time() - start
    verdict(1, not bad and secs < 60,
            "%d monomial pairs on P and Q, %d mismatches, %.0f s" % (sum(counts), len(bad), secs))


def test_criterion_02_closed_form(verdict):
    alg = Double("P")
    n, bad = 0, []
    for r in range(5):
        for s in range(5):
            for which in ("EF", "FE"):
                word = ["E"] * r + ["F"] * s if which == "EF" else ["F"] * s + ["E"] * r
                lhs = rewrite_oracle(word, alg)
                rhs = None
                for c, w in formula_33(r, s, which):
                    term = rewrite_oracle(w, alg).scale(c)
                    rhs = term if rhs is None else rhs + term
                n += 1
                if lhs != rhs:
                    bad.append((which, r, s))
    verdict(2, not bad, "%d expansions with r, s <= 4, mismatches %s" % (n, bad))


# the finite formulas as (degree solved through, torus window); the window
# must exceed the largest torus exponent reached or sampling aliases
FINITE = {
    "P.coproduct.L(x)Li": (3, 2), "Q.coproduct.K(x)Ki": (4, 3),
    "P.antipode.L(x)Li": (4, 8), "Q.antipode.K(x)Ki": (4, 8),
}


def test_criterion_03_dual_series(verdict):
    start = time.time()
    reps = verify_sl2_dual_series(6, 6, "corrected")
    failing = sorted(k for k, r in reps.items() if not r.ok)
    uncorrected = verify_sl2_dual_series(6, 6, "uncorrected")
    uncorrected_failing = {k for k, r in uncorrected.items() if not r.ok}
    mismatched = []
    for sid, (T, W) in FINITE.items():
        kind, x, claimed = sl2_dual_series(T)[sid]
        solved = solve_coproduct(x, T, W) if kind == "coproduct" else solve_antipode(x, T, W)
        if solved != claimed.truncate(T):
            mismatched.append(sid)
    secs = time.time() - start
    ok = (len(reps) == 16 and not failing and not mismatched
          and uncorrected_failing == set(UNCORRECTED_DIFFERS) and secs < 300)
    verdict(3, ok, "%d/16 series pass at degree 6 (corrected reading); %d finite formulas "
            "solved term for term, mismatches %s; uncorrected reading fails on exactly the %d "
            "recorded entries; %.0f s" % (16 - len(failing), len(FINITE), mismatched,
                                          len(uncorrected_failing), secs))


def test_criterion_04_mu_embedding(verdict):
    rel = mu_relation_check()
    cop = mu_coproduct_check(6)
    checked = sum(r.checked for r in cop.values())
    ok = rel.ok and all(r.ok for r in cop.values()) and set(cop) == {"a", "b", "c", "d"}
    verdict(4, ok, "%d relation rows, %d coproduct checks on a, b, c, d to degree 6"
            % (rel.checked, checked))


def test_criterion_05_hopf_pairings(verdict):
    bad, total = [], 0
    for v in VARIANTS:
        rep = hopf_pairing_check(v, 200, 3)
        total += rep.checked
        if not rep.ok:
            bad.append(v)
    diag = 0
    for name, ctor in (("sl2", sl2), ("A2", type_a2), ("B2", type_b2)):
        rep = diagonal_support_check(ctor(), 3)
        diag += rep.checked
        if not rep.ok:
            bad.append(name)
    verdict(5, not bad, "%d axiom checks over 4 variants x 200 triples, %d diagonal-support "
            "checks on sl2/A2/B2 at exponents <= 3, failing %s" % (total, diag, bad))


def test_criterion_06_orthogonality(verdict):
    rep, witness = orthogonality_check(4)
    ok = rep.ok and not witness.is_laurent()
    verdict(6, ok, "%d basis pairs integral at exponents <= 4; non-integral witness %s"
            % (rep.checked, "detected" if not witness.is_laurent() else "missed"))


def test_criterion_07_classical_limits(verdict):
    rows = {side: classical_relations_check(side) for side in ("g", "h")}
    cob_g = co_poisson_check("g")
    # value of delta(h) on the h side from (Delta - Delta^op)/(q - 1), then compared
    oracle = co_poisson_delta(quantum_generator("H", "h"))
    e, f = ClassicalElement.generator("e", "h"), ClassicalElement.generator("f", "h")
    eight = (ClassicalTensor.of(e, f) - ClassicalTensor.of(f, e)).scale(8)
    ok = (all(r.ok for r in rows.values()) and cob_g.ok and oracle == eight
          and expected_cobracket("H", "h") == oracle)
    verdict(7, ok, "relations g %d/h %d rows; g-side cobracket on f, h, e exact; "
            "h-side delta(h) = %s" % (rows["g"].checked, rows["h"].checked, oracle))


def test_criterion_08_poisson_table(verdict):
    bad, n = [], 0
    for name, ctor in (("sl2", sl2), ("A2", type_a2), ("B2", type_b2)):
        c = ctor()
        got, want = poisson_table(c), expected_poisson_table(c)
        n += len(want)
        if got != want or len(want) != 9 * c.n ** 2:
            bad.append(name)
    verdict(8, not bad, "%d generator entries for sl2, A2, B2, failing %s" % (n, bad))


def test_criterion_09_frobenius(verdict):
    start = time.time()
    notes, ok = [], True
    for ell in (3, 5):
        for side in ("g", "h"):
            rep, cert = frobenius_morphism_check(side, ell)
            ok = ok and rep.ok and cert.ok
            notes.append("l=%d %s %d" % (ell, side, rep.checked))
        adj = adjointness_check(ell)
        ok = ok and adj.ok
        notes.append("adjoint l=%d %d" % (ell, adj.checked))
    for side in ("g", "h"):
        z = z0_centrality_check(3, side)
        b = basis_over_Z0(3, side)
        ok = ok and z.ok and b.ok and b.rank == 27
        notes.append("Z0 %s %d, basis %s rank %d" % (side, z.checked, side, b.rank))
    secs = time.time() - start
    verdict(9, ok and secs < 300, "; ".join(notes) + "; %.0f s" % secs)


def test_criterion_10_congruences(verdict):
    res = congruence_checks(4)
    bad = sorted(k for k, v in res.items() if v)
    verdict(10, not bad, "%d congruences checked through degree 4, failing %s" % (len(res), bad))


def test_criterion_11_membership(verdict):
    reps = [membership_family(2, lattice=lat) for lat in ("P", "Q")]
    ok = all(r.ok and not wrong for r, wrong in reps)
    verdict(11, ok, "%d pseudobasis elements pass; counterexamples passing: %s"
            % (sum(r.checked for r, _ in reps), [w for _, w in reps if w]))
