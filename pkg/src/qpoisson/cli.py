"""
Command-line front end: configuration, the expression grammar, pairings,
verification suites and reports.

Subcommands: normal-form, pair, verify, report.  Exit codes: 0 success,
1 verification failure, 2 usage or configuration error.
"""

import argparse
import json
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .cartan import CartanError, build_cartan, build_phi, zero_phi
from .pbw import (
    BAR, DIVIDED, HAT, PLAIN, BorelMinus, BorelPlus, Element, UnsupportedRank, Uqg, Uqh,
    k_divided, render,
)
from .qscalar import LaurentScalar, as_scalar, qpow, render_scalar, specialize_at_one

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEFAULT_REPORT = "qpoisson-report.jsonl"


class UsageError(ValueError):
    pass


class ParseError(UsageError):
    def __init__(self, pos, msg):
        UsageError.__init__(self, "parse error at position %d: %s" % (pos, msg))
        self.pos = pos


# ---------------------------------------------------------------------------
# Configuration


@dataclass
class RunConfig:
    cartan_matrix: tuple = ((2,),)
    w0_word: tuple = (1,)
    lattice: str = "Q"
    phi: tuple = None
    ell: int = 3
    truncation: int = 6
    suites: list = field(default_factory=list)

    def validate(self):
        try:
            self.cartan = build_cartan(self.cartan_matrix, self.w0_word)
            self.multiparam = (zero_phi(self.cartan) if self.phi is None
                               else build_phi(self.phi, self.cartan))
        except CartanError as exc:
            raise UsageError("invalid Cartan data: %s" % exc)
        if self.lattice not in ("P", "Q"):
            raise UsageError("lattice must be P or Q")
        if self.truncation < 1:
            raise UsageError("truncation must be at least 1")
        if self.ell < 3 or self.ell % 2 == 0:
            raise UsageError("ell must be an odd integer >= 3")
        unknown = [s for s in self.suites if s not in SUITES]
        if unknown:
            raise UsageError("unknown suite %s" % ", ".join(unknown))
        return self

    @property
    def rank(self):
        return len(self.cartan_matrix)


def _matrix(text, conv):
    rows = [r.strip() for r in text.split(";") if r.strip()]
    return tuple(tuple(conv(v.strip()) for v in r.split(",")) for r in rows)


def parse_config(text):
    """RunConfig from flat key=value lines; '#' starts a comment and matrix
    rows are separated by ';' with ',' between entries."""
    cfg = RunConfig()
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError("config line %d: expected key=value" % n)
        key, val = (s.strip() for s in line.split("=", 1))
        try:
            if key == "cartan_matrix":
                cfg.cartan_matrix = _matrix(val, int)
            elif key == "w0_word":
                cfg.w0_word = tuple(int(v) for v in val.split(",") if v.strip())
            elif key == "lattice":
                cfg.lattice = val
            elif key == "phi":
                cfg.phi = _matrix(val, Fraction) if val else None
            elif key == "ell":
                cfg.ell = int(val)
            elif key == "truncation":
                cfg.truncation = int(val)
            elif key == "suites":
                cfg.suites = [s.strip() for s in val.split(",") if s.strip()]
            else:
                raise UsageError("config line %d: unknown key %r" % (n, key))
        except ValueError as exc:
            if isinstance(exc, UsageError):
                raise
            raise UsageError("config line %d: %s" % (n, exc))
    return cfg.validate()


def load_config(path=None, **overrides):
    text = ""
    if path:
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError("cannot read config: %s" % exc)
    cfg = parse_config(text)
    for k, v in overrides.items():
        if v is not None:
            setattr(cfg, k, v)
    return cfg.validate()


# ---------------------------------------------------------------------------
# Expression grammar
#
#   expr    := ['-'] term (('+' | '-') term)*
#   term    := power (('*' | '/' | <juxtaposition>) power)*
#   power   := atom ['^' ['-'] integer]
#   atom    := integer | 'q' | '[' integer ']_q' | '(' expr ')'
#            | E | F | K | L | Eb | Fb | Ed(n) | Fd(n) | Kt(c,t)
#
# Products associate to the left; '/' needs a scalar right operand.  The
# unicode minus sign is accepted for '-'.

_TOKEN = re.compile(r"\s*(?:(\d+)|(\[\d+\]_q)|([A-Za-z]+)|(.))")
_ATOM_START = ("int", "qint", "name", "(")


def _tokenize(text):
    out = []
    pos = 0
    text = text.replace("−", "-")
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        start = m.start(m.lastindex) if m.lastindex else m.end()
        if m.group(1):
            out.append(("int", int(m.group(1)), start))
        elif m.group(2):
            out.append(("qint", int(m.group(2)[1:-3]), start))
        elif m.group(3):
            out.append(("name", m.group(3), start))
        elif m.group(4):
            if m.group(4).isspace():
                pos = m.end()
                continue
            out.append((m.group(4), m.group(4), start))
        pos = m.end()
    out.append(("end", None, len(text)))
    return out


class _Value(object):
    """Either a scalar or an algebra element (plain terms)."""

    __slots__ = ("scalar", "elem")

    def __init__(self, scalar=None, elem=None):
        self.scalar = scalar
        self.elem = elem

    def as_elem(self, alg):
        if self.elem is not None:
            return self.elem
        return Element(alg, {alg.unit_key: self.scalar})


class ExpressionParser(object):
    """Parse an expression into an element of `alg` (plain flavor) and
    record which generator flavors were used."""

    def __init__(self, alg):
        self.alg = alg
        self.flavors = set()

    def parse(self, text):
        self.toks = _tokenize(text)
        self.i = 0
        v = self._expr()
        kind, val, pos = self.toks[self.i]
        if kind != "end":
            raise ParseError(pos, "unexpected %r" % (val,))
        return v.as_elem(self.alg)

    def _peek(self):
        return self.toks[self.i]

    def _take(self, kind=None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            raise ParseError(tok[2], "expected %r" % kind)
        self.i += 1
        return tok

    def _expr(self):
        neg = False
        if self._peek()[0] == "-":
            self._take()
            neg = True
        v = self._term()
        if neg:
            v = self._neg(v)
        while self._peek()[0] in ("+", "-"):
            op = self._take()[0]
            w = self._term()
            v = self._add(v, self._neg(w) if op == "-" else w)
        return v

    def _term(self):
        v = self._power()
        while True:
            kind = self._peek()[0]
            if kind == "*":
                self._take()
                v = self._mul(v, self._power())
            elif kind == "/":
                tok = self._take()
                d = self._power()
                v = self._div(v, d, tok[2])
            elif kind in _ATOM_START:
                v = self._mul(v, self._power())
            else:
                return v

    def _power(self):
        start = self._peek()[2]
        v = self._atom()
        if self._peek()[0] == "^":
            self._take()
            sign = 1
            if self._peek()[0] == "-":
                self._take()
                sign = -1
            n = sign * self._take("int")[1]
            v = self._pow(v, n, start)
        return v

    def _atom(self):
        kind, val, pos = self._take()
        if kind == "int":
            return _Value(scalar=as_scalar(val))
        if kind == "qint":
            from .qscalar import q_int
            return _Value(scalar=q_int(val))
        if kind == "(":
            v = self._expr()
            self._take(")")
            return v
        if kind == "name":
            if val == "q":
                return _Value(scalar=qpow(1))
            return _Value(elem=self._generator(val, pos))
        if kind == "end":
            raise ParseError(pos, "unexpected end of input")
        raise ParseError(pos, "unexpected %r" % (val,))

    def _args(self, n):
        self._take("(")
        out = []
        for j in range(n):
            sign = 1
            if self._peek()[0] == "-":
                self._take()
                sign = -1
            out.append(sign * self._take("int")[1])
            if j < n - 1:
                self._take(",")
        self._take(")")
        return out

    def _slot_key(self, kind, v, pos):
        if kind not in self.alg.slots:
            raise ParseError(pos, "%s has no %s generator" % (self.alg.name, kind))
        key = [0] * len(self.alg.slots)
        key[self.alg.slots.index(kind)] = v
        return tuple(key)

    def _generator(self, name, pos):
        alg = self.alg
        if name in ("E", "F", "Eb", "Fb"):
            flavor = BAR if name.endswith("b") else PLAIN
            if flavor == BAR:
                self.flavors.add(BAR)
            key = self._slot_key(name[0], 1, pos)
            return Element(alg, alg.to_plain({key: 1}, flavor))
        if name in ("Ed", "Fd"):
            (n,) = self._args(1)
            if n < 0:
                raise ParseError(pos, "negative divided power")
            self.flavors.add(DIVIDED)
            key = self._slot_key(name[0], n, pos)
            return Element(alg, alg.to_plain({key: 1}, DIVIDED))
        if name == "K":
            return Element(alg, {self._slot_key("T", 2, pos): 1})
        if name == "L":
            if alg.lattice == "Q":
                raise ParseError(pos, "L is not in the root-lattice form; use K")
            return Element(alg, {self._slot_key("T", 1, pos): 1})
        if name == "Kt":
            c, t = self._args(2)
            if t < 0:
                raise ParseError(pos, "negative divided order")
            self.flavors.add(HAT)
            return Element(alg, {self._slot_key("T", 2 * j, pos): v
                                 for j, v in k_divided(c, t).items()})
        raise ParseError(pos, "unknown identifier %r" % name)

    def _neg(self, v):
        if v.elem is not None:
            return _Value(elem=-v.elem)
        return _Value(scalar=-v.scalar)

    def _add(self, v, w):
        if v.elem is None and w.elem is None:
            return _Value(scalar=v.scalar + w.scalar)
        return _Value(elem=v.as_elem(self.alg) + w.as_elem(self.alg))

    def _mul(self, v, w):
        if v.elem is None and w.elem is None:
            return _Value(scalar=v.scalar * w.scalar)
        if v.elem is None:
            return _Value(elem=w.elem.scale(v.scalar))
        if w.elem is None:
            return _Value(elem=v.elem.scale(w.scalar))
        return _Value(elem=v.elem * w.elem)

    def _scalar_of(self, v):
        if v.elem is None:
            return v.scalar
        terms = v.elem.terms
        if not terms:
            return as_scalar(0)
        if list(terms) == [self.alg.unit_key]:
            return terms[self.alg.unit_key]
        return None

    def _div(self, v, d, pos):
        s = self._scalar_of(d)
        if s is None:
            raise ParseError(pos, "division by a non-scalar")
        if s.is_zero():
            raise ParseError(pos, "division by zero")
        return self._mul(v, _Value(scalar=as_scalar(1) / s))

    def _pow(self, v, n, pos):
        if v.elem is None:
            return _Value(scalar=v.scalar ** n)
        if n >= 0:
            return _Value(elem=v.elem ** n)
        terms = v.elem.terms
        if len(terms) == 1:
            (key, c), = terms.items()
            kinds = [k for k, x in zip(self.alg.slots, key) if x]
            if kinds == ["T"] and c == 1:
                inv = Element(self.alg, {tuple(-x for x in key): 1})
                return _Value(elem=inv ** (-n))
        raise ParseError(pos, "negative power of a non-invertible element")


def output_flavor(flavors, alg):
    """Flavor for rendering from the generator flavors used."""
    if HAT in flavors and BAR not in flavors and alg.lattice == "Q" and "T" in alg.slots:
        return HAT
    if flavors == {DIVIDED}:
        return DIVIDED
    if flavors == {BAR}:
        return BAR
    return PLAIN


def parse_element(text, alg):
    """(element, preferred output flavor)."""
    p = ExpressionParser(alg)
    x = p.parse(text)
    return x, output_flavor(p.flavors, alg)


def _normal_form_algebra(cfg, which="uqg"):
    if cfg.rank != 1:
        raise UnsupportedRank("expressions are supported for sl2 data only (rank %d given)"
                              % cfg.rank)
    return Uqg(cfg.lattice) if which == "uqg" else Uqh(cfg.lattice)


def cmd_normal_form(expr, cfg, algebra="uqg"):
    alg = _normal_form_algebra(cfg, algebra)
    x, flavor = parse_element(expr, alg)
    return render(x.convert(flavor))


# ---------------------------------------------------------------------------
# Pairings

PAIR_KINDS = ("pi-", "pi+", "pibar-", "pibar+", "poisson", "rescaled-H", "rescaled-P")


def cmd_pair(kind, x_expr, y_expr, cfg):
    """Render the value of a pairing.

    pi-, pi+, pibar-, pibar+: DRT pairings of the sl2 Borel algebras with
    the lattices fixed by the variant.  poisson: pi_q(h, g) with h in
    U_q^M(h) and g in U_q^M'(sl2), M the configured lattice.  rescaled-H:
    (q - 1)^d pi_q(h, g) at q = 1 with h in the hat form of U_q^Q(h) (d its
    divided degree) and g in U_q^P(sl2).  rescaled-P: (q - 1)^-d pi_q(h, g)
    at q = 1 with h in the bar form of U_q^P(h) (d its bar degree) and g in
    U_q^Q(sl2).
    """
    from .pairing import _borel_algs, pair_elements, quantum_poisson_pair
    if kind not in PAIR_KINDS:
        raise UsageError("unknown pairing kind %r" % kind)
    if cfg.rank != 1:
        raise UnsupportedRank("pair expressions are supported for sl2 data only")
    if kind in ("pi-", "pi+", "pibar-", "pibar+"):
        ax, ay = _borel_algs(kind)
        x, _ = parse_element(x_expr, ax)
        y, _ = parse_element(y_expr, ay)
        return render_scalar(pair_elements(kind, x, y))
    if kind == "poisson":
        other = "P" if cfg.lattice == "Q" else "Q"
        h, _ = parse_element(x_expr, Uqh(cfg.lattice))
        g, _ = parse_element(y_expr, Uqg(other))
        return render_scalar(quantum_poisson_pair(h, g))
    if kind == "rescaled-H":
        ah, ag, flavor, sign = Uqh("Q"), Uqg("P"), HAT, 1
    else:
        ah, ag, flavor, sign = Uqh("P"), Uqg("Q"), BAR, -1
    h, _ = parse_element(x_expr, ah)
    g, _ = parse_element(y_expr, ag)
    qm1 = qpow(1) - 1
    total = as_scalar(0)
    for key, c in h.convert(flavor).terms.items():
        a, t, b = key
        deg = a + b + (t[1] if flavor == HAT else 0)
        mono = Element(ah, {key: 1}, flavor)
        total = total + c * quantum_poisson_pair(mono, g) * qm1 ** (sign * deg)
    return render_scalar(as_scalar(specialize_at_one(total)))


# ---------------------------------------------------------------------------
# Verification suites
#
# A suite is a list of row builders; each returns (id, anchor, params,
# passed, witness).  Rows are computed independently (fanned out over
# --jobs workers) and reported in declaration order.


def _w(x):
    """JSON-safe, deterministic rendering of a witness."""
    if x is None or isinstance(x, (bool, int, str)):
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, LaurentScalar):
        return render_scalar(x)
    if isinstance(x, (list, tuple)):
        return [_w(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _w(v) for k, v in sorted(x.items(), key=lambda kv: str(kv[0]))}
    return str(x)


def _report_row(rid, anchor, params, rep):
    failures = getattr(rep, "failures", [])
    witness = {"checked": rep.checked}
    if failures:
        witness["first_failure"] = _w(failures[0])
        witness["failed"] = getattr(rep, "failed", 0) or len(failures)
    return rid, anchor, params, rep.ok, witness


class _Simple(object):
    def __init__(self, checked, failures):
        self.checked = checked
        self.failures = list(failures)

    @property
    def ok(self):
        return not self.failures


def _dual_series_rows(cfg):
    from .double import straightening_suite
    from .dualseries import (
        sl2_dual_series, mu_coproduct_check, mu_relation_check, verify_sl2_dual_series,
    )
    T = cfg.truncation
    rows = []
    for lat, fl in (("P", BAR), ("Q", DIVIDED)):
        def law(lat=lat, fl=fl):
            n, f = straightening_suite(lat, fl, 3)
            return _report_row("straightening.%s.%s" % (lat, fl), "double straightening law",
                               {"lattice": lat, "flavor": fl, "max_exp": 3}, _Simple(n, f))
        rows.append(law)

    def closed_form():
        return _report_row("straightening.closed-form", "E^r F^s and F^s E^r expansions",
                           {"max_exp": 4}, _closed_form_report(4))
    rows.append(closed_form)

    def series(sid):
        def run():
            rep = verify_sl2_dual_series(T, 6, "corrected", ids={sid})[sid]
            return _report_row("series.%s" % sid, "dual Hopf structure series",
                               {"truncation": T, "degree_bound": 6}, rep)
        return run
    for sid in sorted(sl2_dual_series(1)):
        rows.append(series(sid))

    def mu_rel():
        return _report_row("mu.relations", "mu embedding relations", {}, mu_relation_check())
    rows.append(mu_rel)

    def mu_cop():
        reps = mu_coproduct_check(6)
        checked = sum(r.checked for r in reps.values())
        fails = [(g, r.failures[0]) for g, r in sorted(reps.items()) if r.failures]
        return _report_row("mu.coproduct", "mu embedding coproduct compatibility",
                           {"degree_bound": 6}, _Simple(checked, fails))
    rows.append(mu_cop)
    return rows


def _closed_form_report(max_exp):
    fails = []
    n = 0
    for r in range(max_exp + 1):
        for s in range(max_exp + 1):
            for which in ("EF", "FE"):
                n += 1
                if not _closed_form_ok(r, s, which):
                    fails.append((which, r, s))
    return _Simple(n, fails)


def _closed_form_ok(r, s, which):
    from .double import Double, formula_33
    from .pbw import rewrite_oracle
    alg = Double("P")
    lhs = rewrite_oracle(["E"] * r + ["F"] * s if which == "EF" else ["F"] * s + ["E"] * r, alg)
    rhs = None
    for c, word in formula_33(r, s, which):
        term = rewrite_oracle(word, alg).scale(c)
        rhs = term if rhs is None else rhs + term
    return lhs == rhs


def _hopf_rows(cfg):
    from .double import Double
    from .pbw import hopf_axioms_check
    rows = []
    for alg in (Uqg("P"), Uqg("Q"), Double("P"), Double("Q")):
        def run(alg=alg):
            n, f = hopf_axioms_check(alg, 40, 2)
            return _report_row("hopf.%s" % alg.name, "Hopf algebra axioms",
                               {"samples": 40, "max_exp": 2}, _Simple(n, f))
        rows.append(run)
    return rows


def _pairing_rows(cfg):
    from .pairing import VARIANTS, diagonal_support_check, hopf_pairing_check
    from .cartan import type_a2, type_b2, sl2
    rows = []
    for v in VARIANTS:
        def run(v=v):
            return _report_row("pairing.%s" % v, "Hopf pairing axioms",
                               {"samples": 200, "max_exp": 3}, hopf_pairing_check(v, 200, 3))
        rows.append(run)
    for name, ctor, e in (("sl2", sl2, 3), ("A2", type_a2, 3), ("B2", type_b2, 2)):
        def diag(name=name, ctor=ctor, e=e):
            return _report_row("pairing.diagonal.%s" % name, "diagonal support",
                               {"max_exp": e}, diagonal_support_check(ctor(), e))
        rows.append(diag)
    return rows


def _orthogonality_rows(cfg):
    from .pairing import orthogonality_check

    def run():
        rep, w = orthogonality_check(4)
        rid, anchor, params, ok, witness = _report_row(
            "orthogonality.integral", "hat/tilde integrality", {"max_exp": 4}, rep)
        return rid, anchor, params, ok, witness

    def witness():
        rep, w = orthogonality_check(1)
        return ("orthogonality.witness", "non-integral witness detected", {},
                not w.is_laurent(), {"value": render_scalar(w)})
    return [run, witness]


def _specialize_rows(cfg):
    from . import specialize as sp
    rows = []
    for side in ("g", "h"):
        rows.append(lambda side=side: _report_row(
            "specialize.relations.%s" % side, "classical limit relations",
            {"side": side}, sp.classical_relations_check(side)))
        rows.append(lambda side=side: _report_row(
            "specialize.cobracket.%s" % side, "cobracket from (Delta - Delta^op)/(q - 1)",
            {"side": side}, sp.co_poisson_check(side)))
        rows.append(lambda side=side: _report_row(
            "specialize.multiplicative.%s" % side, "specialization is multiplicative",
            {"side": side, "max_exp": 3}, sp.frobenius_morphism_check(side, 1, 3)[0]))
    rows.append(lambda: _report_row("specialize.tilde", "tilde limit is commutative", {},
                                    sp.tilde_commutative_check()))
    return rows


def _frobenius_rows(cfg):
    from . import specialize as sp
    ell = cfg.ell
    rows = []
    for side in ("g", "h"):
        def morph(side=side):
            rep, cert = sp.frobenius_morphism_check(side, ell)
            if not cert.ok:
                rep = _Simple(rep.checked, ["torus certification"] + cert.failures)
            return _report_row("frobenius.hat.%s" % side, "Frobenius morphism",
                               {"ell": ell, "side": side, "max_exp": 2 * ell}, rep)
        rows.append(morph)
        rows.append(lambda side=side: _report_row(
            "frobenius.tilde.%s" % side, "l-th power map morphism", {"ell": ell, "side": side},
            sp.frobenius_tilde_morphism_check(ell, side)))
        rows.append(lambda side=side: _report_row(
            "frobenius.z0.%s" % side, "Z0 central", {"ell": ell, "side": side},
            sp.z0_centrality_check(ell, side)))
        rows.append(lambda side=side: _report_row(
            "frobenius.basis.%s" % side, "free basis over Z0",
            {"ell": ell, "side": side, "rank": ell ** 3}, sp.basis_over_Z0(ell, side)))
    rows.append(lambda: _report_row("frobenius.adjoint", "adjointness", {"ell": ell},
                                    sp.adjointness_check(ell)))
    rows.append(lambda: _report_row("frobenius.function-side", "Frobenius on the function side",
                                    {"ell": ell}, sp.frobenius_tilde_H_check(ell)))
    return rows


def _poisson_table_rows(cfg):
    from .pairing import expected_poisson_table, poisson_table
    c = cfg.cartan
    got, want = poisson_table(c), expected_poisson_table(c)
    rows = []
    for key in sorted(want):
        def run(key=key):
            hk, i, gk, j = key
            ok = got[key] == want[key]
            return ("poisson.%s%d.%s%d" % (hk, i + 1, gk, j + 1), "rescaled pairing table",
                    {"i": i + 1, "j": j + 1}, ok, {"value": str(got[key]),
                                                  "expected": str(want[key])})
        rows.append(run)
    return rows


def _congruence_rows(cfg):
    from .dualseries import congruence_checks
    res = {}

    def compute():
        if not res:
            res.update(congruence_checks(4))
        return res
    from .dualseries import congruence_list
    rows = []
    for cid in congruence_list():
        def run(cid=cid):
            bad = compute()[cid]
            return ("congruence.%s" % cid, "congruence modulo powers of (q - 1)",
                    {"truncation": 4}, not bad, {"offending": _w(bad[:1])})
        rows.append(run)
    return rows


def _membership_rows(cfg):
    from .dualseries import membership_family

    def run():
        rep, wrong = membership_family()
        ok = rep.ok and not wrong
        witness = {"checked": rep.checked, "counterexamples_passing": _w(wrong)}
        if rep.failures:
            witness["first_failure"] = _w(rep.failures[0])
        return ("membership", "integral-form membership", {"max_exp": 1}, ok, witness)
    return [run]


SUITES = {
    "appendix": _dual_series_rows,
    "hopf-axioms": _hopf_rows,
    "pairing-axioms": _pairing_rows,
    "orthogonality": _orthogonality_rows,
    "specialize": _specialize_rows,
    "frobenius": _frobenius_rows,
    "poisson-table": _poisson_table_rows,
    "congruences": _congruence_rows,
    "membership": _membership_rows,
}


def run_suite(name, cfg, jobs=1):
    """Records {id, anchor, params, status, witness} in declaration order."""
    if name not in SUITES:
        raise UsageError("unknown suite %r" % name)
    builders = SUITES[name](cfg)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda b: b(), builders))
    else:
        results = [b() for b in builders]
    out = []
    for rid, anchor, params, ok, witness in results:
        out.append({"id": rid, "anchor": anchor, "params": _w(params),
                    "status": "pass" if ok else "fail", "witness": witness})
    return out


def dump_records(records):
    return "".join(json.dumps(r, sort_keys=True, ensure_ascii=False) + "\n" for r in records)


def render_records(records, fmt="text"):
    if fmt == "jsonl":
        return dump_records(records)
    lines = []
    for r in records:
        line = "%s %s" % (r["status"].upper(), r["id"])
        if r["status"] != "pass" and "first_failure" in r["witness"]:
            line += "  first failure: %s" % json.dumps(r["witness"]["first_failure"],
                                                       ensure_ascii=False)
        lines.append(line)
    return "".join(l + "\n" for l in lines)


def cmd_verify(suite, cfg, report_path=DEFAULT_REPORT, jobs=1):
    """Run a suite, write its jsonl report; returns (exit code, records)."""
    records = run_suite(suite, cfg, jobs)
    with open(report_path, "w") as fh:
        fh.write(dump_records(records))
    code = EXIT_OK if all(r["status"] == "pass" for r in records) else EXIT_FAIL
    return code, records


def cmd_report(fmt="text", report_path=DEFAULT_REPORT):
    if not os.path.exists(report_path):
        raise UsageError("no prior run (no report at %s)" % report_path)
    with open(report_path) as fh:
        records = [json.loads(l) for l in fh if l.strip()]
    if not records:
        raise UsageError("no prior run (report at %s is empty)" % report_path)
    return render_records(records, fmt)


# ---------------------------------------------------------------------------
# Entry point


_DEFAULTS = {"config": None, "truncation": None, "ell": None, "format": "text", "jobs": 1,
             "report": DEFAULT_REPORT}


def _common_flags():
    # accepted before or after the subcommand
    p = argparse.ArgumentParser(add_help=False)
    s = argparse.SUPPRESS
    p.add_argument("--config", default=s, help="key=value configuration file")
    p.add_argument("--truncation", type=int, default=s)
    p.add_argument("--ell", type=int, default=s)
    p.add_argument("--format", choices=("text", "jsonl"), default=s)
    p.add_argument("--jobs", type=int, default=s)
    p.add_argument("--report", default=s, help="report file for verify/report")
    return p


def _build_parser():
    common = _common_flags()
    p = argparse.ArgumentParser(prog="qpoisson", parents=[common])
    sub = p.add_subparsers(dest="command")
    nf = sub.add_parser("normal-form", parents=[common])
    nf.add_argument("expr")
    nf.add_argument("--algebra", choices=("uqg", "uqh"), default="uqg")
    pr = sub.add_parser("pair", parents=[common])
    pr.add_argument("kind", choices=PAIR_KINDS)
    pr.add_argument("x")
    pr.add_argument("y")
    ve = sub.add_parser("verify", parents=[common])
    ve.add_argument("--suite", action="append")
    sub.add_parser("report", parents=[common])
    return p


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    for k, v in _DEFAULTS.items():
        if not hasattr(args, k):
            setattr(args, k, v)
    try:
        if args.command == "report":
            out.write(cmd_report(args.format, args.report))
            return EXIT_OK
        cfg = load_config(args.config, truncation=args.truncation, ell=args.ell)
        if args.command == "normal-form":
            out.write(cmd_normal_form(args.expr, cfg, args.algebra) + "\n")
            return EXIT_OK
        if args.command == "pair":
            out.write(cmd_pair(args.kind, args.x, args.y, cfg) + "\n")
            return EXIT_OK
        suites = args.suite or cfg.suites
        if not suites:
            raise UsageError("no suite given (use --suite or suites= in the config)")
        for s in suites:
            if s not in SUITES:
                raise UsageError("unknown suite %r" % s)
        records = []
        for s in suites:
            records.extend(run_suite(s, cfg, args.jobs))
        with open(args.report, "w") as fh:
            fh.write(dump_records(records))
        out.write(render_records(records, args.format))
        return EXIT_OK if all(r["status"] == "pass" for r in records) else EXIT_FAIL
    except (UsageError, UnsupportedRank) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
