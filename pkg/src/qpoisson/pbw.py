"""
PBW monomials and finite linear combinations for the sl2-type algebras.

Every algebra stores elements as a dict {key: LaurentScalar}, where key is a
tuple of exponents in that algebra's normal order.  Lattice exponents are in
fundamental-weight units (L_m = L_{m omega}, so K = L_2); minus-side K powers
of the double are in K units.

Flavors are honest bases:
  plain    -- E^r, F^s, L_m
  bar      -- Eb^r = ((q - q^-1)E)^r, Fb^s likewise
  divided  -- E^(r) = E^r/[r]!, F^(s) likewise; torus plain
  hat      -- divided E/F and torus basis L^j (K;0 t) K^-Ent(t/2)
"""

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product as iproduct

from .qscalar import (
    LaurentScalar, MINUS, as_scalar, centered, one, q_binom, q_factorial, q_int,
    qdiff, qpow, recognize_q_number, render_scalar, _render_laurent, _pscale,
    _leading_sign, zero,
)

PLAIN, BAR, DIVIDED, HAT = "plain", "bar", "divided", "hat"
FLAVORS = (PLAIN, BAR, DIVIDED, HAT)


class UnsupportedRank(NotImplementedError):
    """A product needs root-vector straightening beyond rank one."""


class RewriteBudgetExceeded(RuntimeError):
    def __init__(self, steps, partial):
        RuntimeError.__init__(self, "rewrite budget of %d steps exceeded" % steps)
        self.steps = steps
        self.partial = partial


# ---------------------------------------------------------------------------
# Cached scalars


@lru_cache(maxsize=None)
def qp(n):
    return qpow(n)


@lru_cache(maxsize=None)
def binom(n, k):
    return q_binom(n, k)


@lru_cache(maxsize=None)
def qfact(n):
    return q_factorial(n)


@lru_cache(maxsize=None)
def kappa(n):
    """(q - q^-1)^n [n]!, the factor with Eb^n = kappa(n) E^(n)."""
    return qdiff() ** n * qfact(n)


@lru_cache(maxsize=None)
def ef_to_plain(n, flavor):
    """c with (flavored X^n) = c * X^n."""
    if flavor == PLAIN:
        return one()
    if flavor == BAR:
        return qdiff() ** n
    return one() / qfact(n)


@lru_cache(maxsize=None)
def ef_from_plain(n, flavor):
    """c with X^n = c * (flavored X^n)."""
    if flavor == PLAIN:
        return one()
    if flavor == BAR:
        return one() / qdiff() ** n
    return qfact(n)


@lru_cache(maxsize=None)
def two_var_bracket(c, t):
    """prod_{p=1}^t (q^{c-p+1} X - q^{-c+p-1} Y)/(q^p - q^-p) as {i: coeff}
    where i is the power of X (the power of Y is t - i)."""
    out = {0: one()}
    for p in range(1, t + 1):
        a = qp(c - p + 1)
        b = -qp(-c + p - 1)
        den = qdiff(p)
        nxt = {}
        for i, v in out.items():
            nxt[i + 1] = nxt.get(i + 1, zero()) + v * a
            nxt[i] = nxt.get(i, zero()) + v * b
        out = {i: v / den for i, v in nxt.items() if v}
    return out


@lru_cache(maxsize=None)
def k_divided(c, t):
    """(K;c t) = prod_{s=1}^t (K q^{c-s+1} - 1)/(q^s - 1) as {K-power: coeff}."""
    out = {0: one()}
    for s in range(1, t + 1):
        den = qp(s) - 1
        nxt = {}
        for j, v in out.items():
            nxt[j + 1] = nxt.get(j + 1, zero()) + v * qp(c - s + 1)
            nxt[j] = nxt.get(j, zero()) - v
        out = {j: v / den for j, v in nxt.items() if v}
    return out


def ent_half(t):
    return t // 2


@lru_cache(maxsize=None)
def hat_torus_to_k(t):
    """b_t = (K;0 t) K^{-Ent(t/2)} as {K-power: coeff}."""
    s = ent_half(t)
    return {j - s: v for j, v in k_divided(0, t).items()}


def _new_top(t):
    return (t + 1) // 2 if t % 2 else -(t // 2)


@lru_cache(maxsize=None)
def k_power_to_hat(n):
    """K^n as {t: coeff} in the basis b_t (triangular inversion)."""
    t = 2 * n - 1 if n > 0 else -2 * n
    bt = hat_torus_to_k(t)
    lead = bt[n]
    out = {t: one() / lead}
    for j, v in bt.items():
        if j == n:
            continue
        for u, w in k_power_to_hat(j).items():
            out[u] = out.get(u, zero()) - v * w / lead
    return {u: v for u, v in out.items() if v}


# ---------------------------------------------------------------------------
# Generic dict helpers


def add_into(acc, key, val):
    cur = acc.get(key)
    if cur is None:
        if val:
            acc[key] = val
    else:
        s = cur + val
        if s:
            acc[key] = s
        else:
            del acc[key]


def scale_terms(terms, c):
    if not c:
        return {}
    return {k: v * c for k, v in terms.items()}


# ---------------------------------------------------------------------------
# Monomial record used by the generic-rank pairing


@dataclass(frozen=True)
class PbwMonomial:
    """Ordered monomial F-part * lattice part * E-part.

    f_exps[r], e_exps[r] are the exponents of the root vectors for the r-th
    root of the convex order; lattice is in fundamental-weight coordinates.
    torus_divided holds (i, c, t) factors (K_i;c t), used only in the hat
    flavor.
    """
    f_exps: tuple = ()
    lattice: tuple = ()
    e_exps: tuple = ()
    torus_divided: tuple = ()
    flavor: str = PLAIN

    def __post_init__(self):
        if self.flavor not in FLAVORS:
            raise ValueError("unknown flavor %r" % (self.flavor,))
        if len(self.f_exps) != len(self.e_exps) and self.f_exps and self.e_exps:
            raise ValueError("exponent vectors of different length")
        if any(x < 0 for x in self.f_exps + self.e_exps):
            raise ValueError("negative PBW exponent")
        if self.torus_divided and self.flavor != HAT:
            raise ValueError("divided torus factors need the hat flavor")


def q_degree_of(mono, cartan=None):
    """Q-degree sum e_r alpha^r - sum f_r alpha^r, in simple-root coordinates.

    The lattice part has degree 0.  Without Cartan data the monomial is taken
    to be of rank one and the degree is an integer multiple of alpha.
    """
    if cartan is None:
        return sum(mono.e_exps) - sum(mono.f_exps)
    n = cartan.n
    out = [0] * n
    for r, beta in enumerate(cartan.positive_roots):
        e = mono.e_exps[r] if r < len(mono.e_exps) else 0
        f = mono.f_exps[r] if r < len(mono.f_exps) else 0
        for i in range(n):
            out[i] += (e - f) * beta[i]
    return tuple(out)


# ---------------------------------------------------------------------------
# Algebras


class Algebra(object):
    """Base class.  Subclasses set `slots`, a tuple naming each key entry:
    'E' and 'F' (root-vector powers), 'T' (torus in omega units, convertible
    to the hat basis) or 'Km' (minus-side K power of the double)."""

    slots = ()
    name = "algebra"
    lattice = "Q"
    native_flavors = (PLAIN,)

    # -- to be provided
    def mul_keys(self, a, b, flavor=PLAIN):
        raise NotImplementedError

    def generator_coproduct(self, g):
        raise NotImplementedError

    def generator_antipode(self, g):
        raise NotImplementedError

    def factorize(self, key):
        """Generator keys whose ordered product is exactly `key`."""
        out = []
        for pos, kind in enumerate(self.slots):
            v = key[pos]
            if kind in ("E", "F"):
                out.extend([self._unit_with(pos, 1)] * v)
            elif v:
                out.append(self._unit_with(pos, v))
        return out

    # -- shared
    @property
    def unit_key(self):
        return tuple(0 for _ in self.slots)

    def _unit_with(self, pos, v):
        k = [0] * len(self.slots)
        k[pos] = v
        return tuple(k)

    def check_key(self, key):
        if len(key) != len(self.slots):
            raise ValueError("bad key %r for %s" % (key, self.name))
        for kind, v in zip(self.slots, key):
            if kind in ("E", "F") and v < 0:
                raise ValueError("negative exponent in %r" % (key,))
            if kind == "T" and isinstance(v, tuple):
                j, t = v
                if j not in (0, 1) or t < 0 or (j and self.lattice == "Q"):
                    raise ValueError("bad hat torus index %r" % (v,))
            elif kind == "T" and self.lattice == "Q" and v % 2:
                raise ValueError("L_%d is not in the root lattice" % v)

    def q_degree_key(self, key):
        deg = 0
        for kind, v in zip(self.slots, key):
            if kind == "E":
                deg += v
            elif kind == "F":
                deg -= v
        return deg

    def counit_key(self, key):
        for kind, v in zip(self.slots, key):
            if kind in ("E", "F") and v:
                return zero()
        return one()

    # -- flavor conversions
    def _slot_to_plain(self, kind, v, flavor):
        if kind in ("E", "F"):
            return [(v, ef_to_plain(v, flavor))]
        if kind == "T" and flavor == HAT:
            j, t = v
            return [(j + 2 * n, c) for n, c in hat_torus_to_k(t).items()]
        return [(v, one())]

    def _slot_from_plain(self, kind, v, flavor):
        if kind in ("E", "F"):
            return [(v, ef_from_plain(v, flavor))]
        if kind == "T" and flavor == HAT:
            j = v % 2
            n = (v - j) // 2
            return [((j, t), c) for t, c in k_power_to_hat(n).items()]
        return [(v, one())]

    def _convert_key(self, key, flavor, direction):
        fn = self._slot_to_plain if direction == "to" else self._slot_from_plain
        parts = [fn(kind, v, flavor) for kind, v in zip(self.slots, key)]
        out = {}
        for combo in iproduct(*parts):
            c = one()
            for _, s in combo:
                c = c * s
            add_into(out, tuple(k for k, _ in combo), c)
        return out

    def to_plain(self, terms, flavor):
        if flavor == PLAIN:
            return dict(terms)
        out = {}
        for k, v in terms.items():
            for k2, c in self._convert_key(k, flavor, "to").items():
                add_into(out, k2, v * c)
        return out

    def from_plain(self, terms, flavor):
        if flavor == PLAIN:
            return dict(terms)
        if flavor == HAT and "T" not in self.slots:
            raise ValueError("%s has no torus slot for the hat flavor" % self.name)
        out = {}
        for k, v in terms.items():
            for k2, c in self._convert_key(k, flavor, "from").items():
                add_into(out, k2, v * c)
        return out

    # -- rendering
    def render_slot(self, kind, v, flavor):
        if kind in ("E", "F"):
            if not v:
                return None
            if flavor == BAR:
                return kind + "b" + ("^%d" % v if v != 1 else "")
            if flavor in (DIVIDED, HAT):
                return "%sd(%d)" % (kind, v)
            return kind + ("^%d" % v if v != 1 else "")
        if kind == "T" and flavor == HAT:
            j, t = v
            parts = []
            if j:
                parts.append("L")
            if t:
                parts.append("Kt(0,%d)" % t)
                s = ent_half(t)
                if s:
                    parts.append("K^%d" % -s)
            return "*".join(parts) if parts else None
        if kind == "T":
            return _render_torus(v, self.lattice)
        if kind == "Km":
            return _power("K", v)
        raise ValueError(kind)

    def render_key(self, key, flavor):
        parts = [self.render_slot(kind, v, flavor) for kind, v in zip(self.slots, key)]
        parts = [p for p in parts if p]
        return "*".join(parts) if parts else "1"

    def sort_key(self, key):
        deg = 0
        for kind, v in zip(self.slots, key):
            if kind in ("E", "F"):
                deg += v
        flat = []
        for v in key:
            flat.extend(v if isinstance(v, tuple) else (v,))
        return (-deg, tuple(-x for x in flat))


def _power(sym, n):
    if n == 0:
        return None
    if n == 1:
        return sym
    return "%s^%d" % (sym, n)


def _render_torus(m, lattice):
    if lattice == "Q" or m % 2 == 0 and lattice != "P":
        return _power("K", m // 2)
    return _power("L", m)


class Uqg(Algebra):
    """U_q^M(sl2) in the order F^s L_m E^r, key (s, m, r)."""

    slots = ("F", "T", "E")

    def __init__(self, lattice="Q"):
        if lattice not in ("P", "Q"):
            raise ValueError("lattice must be P or Q")
        self.lattice = lattice
        self.name = "U_q^%s(sl2)" % lattice

    def __eq__(self, other):
        return type(other) is Uqg and other.lattice == self.lattice

    def __hash__(self):
        return hash(("Uqg", self.lattice))

    def mul_keys(self, a, b, flavor=PLAIN):
        return _uqg_mul(a, b)

    def generator_coproduct(self, g):
        s, m, r = g
        if s:
            return {((1, 0, 0), (0, -2, 0)): one(), ((0, 0, 0), (1, 0, 0)): one()}
        if r:
            return {((0, 0, 1), (0, 0, 0)): one(), ((0, 2, 0), (0, 0, 1)): one()}
        return {((0, m, 0), (0, m, 0)): one()}

    def generator_antipode(self, g):
        s, m, r = g
        if s:
            return {(1, 2, 0): -one()}
        if r:
            return {(0, -2, 1): -one()}
        return {(0, -m, 0): one()}


@lru_cache(maxsize=None)
def _uqg_ef(r, s):
    """E^r F^s in F.T.E order as {(s', m, r'): coeff}."""
    out = {}
    for t in range(min(r, s) + 1):
        c = binom(r, t) * binom(s, t) * qfact(t) ** 2
        for i, v in two_var_bracket(2 * t - r - s, t).items():
            add_into(out, (s - t, 2 * (2 * i - t), r - t), c * v)
    return out


def _uqg_mul(a, b):
    s, m, r = a
    s2, m2, r2 = b
    if r == 0 or s2 == 0:
        c = qp(-m * s2 - m2 * r)
        return {(s + s2, m + m2, r + r2): c}
    out = {}
    for (fs, tm, er), c in _uqg_ef(r, s2).items():
        add_into(out, (s + fs, m + tm + m2, er + r2), c * qp(-m * fs - m2 * er))
    return out


class BorelMinus(Algebra):
    """U_q^M(b_-), key (f, m) = F^f L_m."""

    slots = ("F", "T")

    def __init__(self, lattice="Q"):
        self.lattice = lattice
        self.name = "U_q^%s(b-)" % lattice

    def __eq__(self, other):
        return type(other) is BorelMinus and other.lattice == self.lattice

    def __hash__(self):
        return hash(("Bm", self.lattice))

    def mul_keys(self, a, b, flavor=PLAIN):
        return {(a[0] + b[0], a[1] + b[1]): qp(-a[1] * b[0])}

    def generator_coproduct(self, g):
        f, m = g
        if f:
            return {((1, 0), (0, -2)): one(), ((0, 0), (1, 0)): one()}
        return {((0, m), (0, m)): one()}

    def generator_antipode(self, g):
        f, m = g
        if f:
            return {(1, 2): -one()}
        return {(0, -m): one()}


class BorelPlus(Algebra):
    """U_q^M(b_+), key (e, m) = E^e L_m."""

    slots = ("E", "T")

    def __init__(self, lattice="P"):
        self.lattice = lattice
        self.name = "U_q^%s(b+)" % lattice

    def __eq__(self, other):
        return type(other) is BorelPlus and other.lattice == self.lattice

    def __hash__(self):
        return hash(("Bp", self.lattice))

    def mul_keys(self, a, b, flavor=PLAIN):
        return {(a[0] + b[0], a[1] + b[1]): qp(a[1] * b[0])}

    def generator_coproduct(self, g):
        e, m = g
        if e:
            return {((1, 0), (0, 0)): one(), ((0, 2), (1, 0)): one()}
        return {((0, m), (0, m)): one()}

    def generator_antipode(self, g):
        e, m = g
        if e:
            # -L_{-2} E = -q^{-2} E L_{-2}
            return {(1, -2): -qp(-2)}
        return {(0, -m): one()}


class Uqh(Algebra):
    """U_q^M(h) at phi = 0, key (a, m, b) = F^a L_m E^b.

    E and F commute, L_m F = q^m F L_m and L_m E = q^m E L_m.  Its Hopf
    structure is formal and lives in the dual-series module.
    """

    slots = ("F", "T", "E")

    def __init__(self, lattice="Q"):
        self.lattice = lattice
        self.name = "U_q^%s(h)" % lattice

    def __eq__(self, other):
        return type(other) is Uqh and other.lattice == self.lattice

    def __hash__(self):
        return hash(("Uqh", self.lattice))

    def mul_keys(self, a, b, flavor=PLAIN):
        c = qp(a[1] * b[0] - b[1] * a[2])
        return {(a[0] + b[0], a[1] + b[1], a[2] + b[2]): c}

    def generator_coproduct(self, g):
        raise NotImplementedError("the coproduct of U_q(h) is a formal series; "
                                  "use the dual-series module")

    generator_antipode = generator_coproduct


class TensorAlgebra(Algebra):
    """A (x) B with componentwise product, key (ka, kb)."""

    def __init__(self, left, right):
        self.left, self.right = left, right
        self.name = "%s (x) %s" % (left.name, right.name)

    def __eq__(self, other):
        return (type(other) is TensorAlgebra and other.left == self.left
                and other.right == self.right)

    def __hash__(self):
        return hash(("T", self.left, self.right))

    @property
    def unit_key(self):
        return (self.left.unit_key, self.right.unit_key)

    def check_key(self, key):
        self.left.check_key(key[0])
        self.right.check_key(key[1])

    def mul_keys(self, a, b, flavor=PLAIN):
        fl, fr = _split_flavor(flavor)
        x = self.left.mul_keys(a[0], b[0], fl)
        y = self.right.mul_keys(a[1], b[1], fr)
        out = {}
        for k1, c1 in x.items():
            for k2, c2 in y.items():
                add_into(out, (k1, k2), c1 * c2)
        return out

    @property
    def native_flavors(self):
        return tuple(f for f in self.left.native_flavors if f in self.right.native_flavors)

    def q_degree_key(self, key):
        return self.left.q_degree_key(key[0]) + self.right.q_degree_key(key[1])

    def counit_key(self, key):
        return self.left.counit_key(key[0]) * self.right.counit_key(key[1])

    def to_plain(self, terms, flavor):
        return self._conv(terms, flavor, "to_plain")

    def from_plain(self, terms, flavor):
        return self._conv(terms, flavor, "from_plain")

    def _conv(self, terms, flavor, how):
        fl, fr = _split_flavor(flavor)
        if fl == PLAIN and fr == PLAIN:
            return dict(terms)
        out = {}
        for (a, b), v in terms.items():
            xa = getattr(self.left, how)({a: one()}, fl)
            xb = getattr(self.right, how)({b: one()}, fr)
            for ka, ca in xa.items():
                for kb, cb in xb.items():
                    add_into(out, (ka, kb), v * ca * cb)
        return out

    def render_key(self, key, flavor):
        fl, fr = _split_flavor(flavor)
        return "%s ⊗ %s" % (_wrap(self.left.render_key(key[0], fl)),
                            _wrap(self.right.render_key(key[1], fr)))

    def sort_key(self, key):
        return (self.left.sort_key(key[0]), self.right.sort_key(key[1]))


def _wrap(s):
    return "(" + s + ")" if "⊗" in s else s


def _split_flavor(flavor):
    if isinstance(flavor, tuple):
        return flavor
    return flavor, flavor


class TorusAlgebra(Algebra):
    """Group algebra of a lattice of any rank: keys are omega-coordinate
    vectors, L_x L_y = L_{x+y}."""

    def __init__(self, cartan, lattice="P"):
        self.cartan = cartan
        self.lattice = lattice
        self.name = "torus^%s" % lattice

    def __eq__(self, other):
        return (type(other) is TorusAlgebra and other.cartan is self.cartan
                and other.lattice == self.lattice)

    def __hash__(self):
        return hash(("Tor", id(self.cartan), self.lattice))

    @property
    def unit_key(self):
        return tuple(0 for _ in range(self.cartan.n))

    def check_key(self, key):
        if not self.cartan.lattice(self.lattice).contains(key):
            raise ValueError("%r not in lattice %s" % (key, self.lattice))

    def mul_keys(self, a, b, flavor=PLAIN):
        return {tuple(x + y for x, y in zip(a, b)): one()}

    def generator_coproduct(self, g):
        return {(g, g): one()}

    def generator_antipode(self, g):
        return {tuple(-x for x in g): one()}

    def factorize(self, key):
        return [key] if any(key) else []

    def q_degree_key(self, key):
        return 0

    def counit_key(self, key):
        return one()

    def to_plain(self, terms, flavor):
        return dict(terms)

    from_plain = to_plain

    def render_key(self, key, flavor):
        parts = []
        for i, v in enumerate(key):
            p = _power("L%d" % (i + 1), v)
            if p:
                parts.append(p)
        return "*".join(parts) if parts else "1"

    def sort_key(self, key):
        return tuple(-x for x in key)


def generic_commute_scalar(cartan, lam, gen, index):
    """Scalar s with L_lam X_i = s X_i L_lam, X = 'E' or 'F', any rank."""
    a = cartan.form(lam, cartan.alpha(index))
    sign = 1 if gen == "E" else -1
    if a.denominator != 1:
        raise ValueError("fractional exponent (lam|alpha_i) = %s" % a)
    return qpow(sign * int(a))


def generic_product(cartan, x, y):
    """Product of two factors in rank >= 1 where each factor is ('T', lam) or
    (gen, i).  Only torus*torus and torus*generator are supported; anything
    needing E-F or Serre straightening raises UnsupportedRank."""
    kx, ky = x[0], y[0]
    if kx == "T" and ky == "T":
        return {("T", tuple(a + b for a, b in zip(x[1], y[1]))): one()}
    if kx == "T" and ky in ("E", "F"):
        return {(y, x): generic_commute_scalar(cartan, x[1], ky, y[1])}
    if ky == "T" and kx in ("E", "F"):
        return {(x, y): one()}
    if cartan.n == 1 and kx == ky:
        return {(x, y): one()}
    raise UnsupportedRank("rank %d product %s*%s needs root-vector straightening"
                          % (cartan.n, x, y))


# ---------------------------------------------------------------------------
# Elements


class Element(object):
    """Finite combination of normal-order monomials of one algebra and flavor."""

    __slots__ = ("alg", "terms", "flavor")

    def __init__(self, alg, terms=None, flavor=PLAIN):
        self.alg = alg
        self.flavor = flavor
        self.terms = {k: as_scalar(v) for k, v in (terms or {}).items() if v}

    @classmethod
    def monomial(cls, alg, key, flavor=PLAIN, coeff=1):
        alg.check_key(key)
        return cls(alg, {key: as_scalar(coeff)}, flavor)

    @classmethod
    def unit(cls, alg, flavor=PLAIN):
        return cls(alg, {alg.unit_key: one()}, flavor)

    def _same(self, other):
        if not isinstance(other, Element) or other.alg != self.alg:
            raise ValueError("elements of different algebras")
        if other.flavor != self.flavor:
            other = other.convert(self.flavor)
        return other

    def __add__(self, other):
        if not isinstance(other, Element):
            other = Element(self.alg, {self.alg.unit_key: as_scalar(other)}, PLAIN)
        other = self._same(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            add_into(out, k, v)
        return Element(self.alg, out, self.flavor)

    __radd__ = __add__

    def __neg__(self):
        return Element(self.alg, {k: -v for k, v in self.terms.items()}, self.flavor)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        return Element(self.alg, scale_terms(self.terms, as_scalar(c)), self.flavor)

    def __mul__(self, other):
        if not isinstance(other, Element):
            return self.scale(other)
        other = self._same(other)
        return Element(self.alg, multiply_terms(self.alg, self.terms, other.terms,
                                                self.flavor), self.flavor)

    def __rmul__(self, c):
        return self.scale(c)

    def __pow__(self, n):
        out = Element.unit(self.alg, self.flavor)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Element):
            if other.alg != self.alg:
                return False
            if other.flavor != self.flavor:
                return self.convert(PLAIN).terms == other.convert(PLAIN).terms
            return self.terms == other.terms
        if not other:
            return not self.terms
        return self == Element(self.alg, {self.alg.unit_key: as_scalar(other)}, self.flavor)

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def is_zero(self):
        return not self.terms

    def convert(self, flavor):
        if flavor == self.flavor:
            return self
        plain = self.alg.to_plain(self.terms, self.flavor)
        return Element(self.alg, self.alg.from_plain(plain, flavor), flavor)

    def coproduct(self):
        return coproduct(self)

    def antipode(self):
        return antipode(self)

    def counit(self):
        return counit(self)

    def q_degrees(self):
        return sorted({self.alg.q_degree_key(k) for k in self.terms})

    def __repr__(self):
        return "Element(%s, %s)" % (self.alg.name, render(self))

    def __str__(self):
        return render(self)


def multiply_terms(alg, xs, ys, flavor=PLAIN):
    if flavor in alg.native_flavors:
        out = {}
        for a, ca in xs.items():
            for b, cb in ys.items():
                c = ca * cb
                for k, v in alg.mul_keys(a, b, flavor).items():
                    add_into(out, k, c * v)
        return out
    px = alg.to_plain(xs, flavor)
    py = alg.to_plain(ys, flavor)
    return alg.from_plain(multiply_terms(alg, px, py, PLAIN), flavor)


def tensor_square(alg):
    return TensorAlgebra(alg, alg)


_COPRODUCT_CACHE = {}
_ANTIPODE_CACHE = {}


def coproduct_key(alg, key):
    """Plain-flavor coproduct of one normal monomial, multiplicatively."""
    ck = (alg, key)
    hit = _COPRODUCT_CACHE.get(ck)
    if hit is not None:
        return hit
    t2 = tensor_square(alg)
    gens = alg.factorize(key)
    if not gens:
        out = {(alg.unit_key, alg.unit_key): one()}
    else:
        last = gens[-1]
        rest = {alg.unit_key: one()}
        for g in gens[:-1]:
            rest = multiply_terms(alg, rest, {g: one()})
        if len(rest) != 1 or list(rest.values())[0] != 1:
            raise AssertionError("factorization of %r is not exact" % (key,))
        prefix = coproduct_key(alg, list(rest)[0])
        out = multiply_terms(t2, prefix, alg.generator_coproduct(last))
    _COPRODUCT_CACHE[ck] = out
    return out


def antipode_key(alg, key):
    ck = (alg, key)
    hit = _ANTIPODE_CACHE.get(ck)
    if hit is not None:
        return hit
    out = {alg.unit_key: one()}
    for g in alg.factorize(key):
        out = multiply_terms(alg, alg.generator_antipode(g), out)
    _ANTIPODE_CACHE[ck] = out
    return out


def coproduct(x):
    """Delta(x) as an element of the tensor square, in x's flavor."""
    alg = x.alg
    plain = alg.to_plain(x.terms, x.flavor)
    out = {}
    for k, v in plain.items():
        for k2, c in coproduct_key(alg, k).items():
            add_into(out, k2, v * c)
    t2 = tensor_square(alg)
    return Element(t2, t2.from_plain(out, x.flavor), x.flavor)


def antipode(x):
    alg = x.alg
    plain = alg.to_plain(x.terms, x.flavor)
    out = {}
    for k, v in plain.items():
        for k2, c in antipode_key(alg, k).items():
            add_into(out, k2, v * c)
    return Element(alg, alg.from_plain(out, x.flavor), x.flavor)


def counit(x):
    plain = x.alg.to_plain(x.terms, x.flavor)
    out = zero()
    for k, v in plain.items():
        out = out + v * x.alg.counit_key(k)
    return out


def apply_tensor(f, g, x):
    """(f (x) g)(x) for linear maps on plain term dicts of the legs."""
    out = {}
    for (a, b), v in x.items():
        for ka, ca in f(a).items():
            for kb, cb in g(b).items():
                add_into(out, (ka, kb), v * ca * cb)
    return out


def multiply_legs(alg, x):
    """m: A (x) A -> A on plain term dicts."""
    out = {}
    for (a, b), v in x.items():
        for k, c in alg.mul_keys(a, b).items():
            add_into(out, k, v * c)
    return out


def convert_basis(x, flavor):
    return x.convert(flavor)


def random_key(alg, rng, max_exp=2, torus=2):
    """Random normal monomial: E/F exponents in [0, max_exp], torus
    exponents in [-torus, torus] (even on the root lattice)."""
    key = []
    for kind in alg.slots:
        if kind in ("E", "F"):
            key.append(rng.randint(0, max_exp))
        elif kind == "T":
            step = 2 if alg.lattice == "Q" else 1
            key.append(step * rng.randint(-torus, torus))
        else:
            key.append(rng.randint(-torus, torus))
    return tuple(key)


def _flatten_left(t3):
    return {(a1, a2, b): v for ((a1, a2), b), v in t3.items()}


def _flatten_right(t3):
    return {(a, b1, b2): v for (a, (b1, b2)), v in t3.items()}


def hopf_axioms_check(alg, samples=30, max_exp=2, seed=0):
    """Hopf axioms on random monomials x, y of alg: Delta multiplicative,
    coassociativity, both counit laws and both antipode laws.

    Returns (number of identities checked, failing (axiom, keys) pairs).
    """
    import random
    rng = random.Random(seed)
    t2 = tensor_square(alg)
    n = 0
    fails = []

    def ident(k):
        return {k: one()}

    def counit_left(k):
        v = alg.counit_key(k)
        return {alg.unit_key: v} if v else {}

    for _ in range(samples):
        x, y = random_key(alg, rng, max_exp), random_key(alg, rng, max_exp)
        dx = coproduct_key(alg, x)
        rows = []
        lhs = {}
        for k, v in multiply_terms(alg, {x: one()}, {y: one()}).items():
            for k2, c in coproduct_key(alg, k).items():
                add_into(lhs, k2, v * c)
        rows.append(("Delta(xy)", lhs == multiply_terms(t2, dx, coproduct_key(alg, y))))
        left = _flatten_left(apply_tensor(lambda k: coproduct_key(alg, k), ident, dx))
        right = _flatten_right(apply_tensor(ident, lambda k: coproduct_key(alg, k), dx))
        rows.append(("coassociativity", left == right))
        for name, f, g in (("counit left", counit_left, ident), ("counit right", ident, counit_left)):
            out = {}
            for (a, b), v in apply_tensor(f, g, dx).items():
                add_into(out, b if a == alg.unit_key else a, v)
            rows.append((name, out == {x: one()}))
        eps = {alg.unit_key: alg.counit_key(x)} if alg.counit_key(x) else {}
        s = lambda k: antipode_key(alg, k)
        for name, f, g in (("antipode left", s, ident), ("antipode right", ident, s)):
            out = {}
            for (a, b), v in apply_tensor(f, g, dx).items():
                for k, c in multiply_terms(alg, {a: one()}, {b: one()}).items():
                    add_into(out, k, v * c)
            rows.append((name, out == eps))
        for name, ok in rows:
            n += 1
            if not ok:
                fails.append((name, x, y))
    return n, fails


def q_degree(alg, key):
    return alg.q_degree_key(key)


# ---------------------------------------------------------------------------
# Rendering


def _norm_den(c):
    """(numerator dict, denominator dict) of c with the denominator centered
    and its leading coefficient positive."""
    if c.is_laurent():
        return dict(c.num), None
    num, den = centered(c)
    if _leading_sign(den) < 0:
        num, den = _pscale(num, -1), _pscale(den, -1)
    return num, den


def _coeff_times(num, mono):
    """Render num * mono with num a Laurent dict; returns (negative, text)."""
    if len(num) == 1:
        (e, c), = num.items()
        neg = c < 0
        a = -c if neg else c
        s = _render_laurent({e: a})
        if mono == "1":
            return neg, s
        if s == "1":
            return neg, mono
        return neg, s + " " + mono
    x = LaurentScalar.from_laurent(num)
    name = recognize_q_number(x)
    neg = False
    if name is None:
        if _leading_sign(num) < 0 and all(c < 0 for c in num.values()):
            neg = True
            num = _pscale(num, -1)
        name = "(" + _render_laurent(num) + ")"
    if mono == "1":
        # a pulled-out sign must keep the parentheses
        return neg, name[1:-1] if name.startswith("(") and not neg else name
    return neg, name + " " + mono


def _join(parts):
    out = ""
    for i, (neg, body) in enumerate(parts):
        if i == 0:
            out = (MINUS if neg else "") + body
        else:
            out += (" %s " % MINUS if neg else " + ") + body
    return out


def render_terms(alg, terms, flavor):
    if not terms:
        return "0"
    keys = sorted(terms, key=alg.sort_key)
    groups = []
    index = {}
    for k in keys:
        num, den = _norm_den(terms[k])
        dk = None if den is None else tuple(sorted(den.items()))
        if dk not in index:
            index[dk] = len(groups)
            groups.append((den, []))
        groups[index[dk]][1].append((num, alg.render_key(k, flavor)))
    parts = []
    for den, items in groups:
        if den is None:
            parts.extend(_coeff_times(n, m) for n, m in items)
            continue
        inner = _join([_coeff_times(n, m) for n, m in items])
        ds = _render_laurent(den)
        if len(den) > 1:
            ds = "(" + ds + ")"
        single = len(items) == 1 and len(items[0][0]) == 1
        if single:
            neg, body = _coeff_times(*items[0])
            mono = items[0][1]
            numtxt = body if mono == "1" else body[: len(body) - len(mono)].strip() or "1"
            text = "%s/%s" % (numtxt, ds)
            if mono != "1":
                text += " " + mono
            parts.append((neg, text))
        else:
            parts.append((False, "(%s)/%s" % (inner, ds)))
    return _join(parts)


def render(x):
    return render_terms(x.alg, x.terms, x.flavor)


# ---------------------------------------------------------------------------
# Rewrite oracle
#
# Independent ground truth: words are multiplied by inserting one letter at
# a time at the left of a normal monomial and applying a single defining
# relation per step.  Insertions are memoized per (algebra, basis, letter,
# monomial).


_LETTER_ALIASES = {"K^-1": "Ki", "L^-1": "Li", "E": "E", "F": "F"}

class _Oracle(object):
    def __init__(self, alg, basis, budget=10 ** 6):
        self.alg = alg
        self.basis = basis
        self.budget = budget
        self.steps = 0
        self.memo = {}

    def step(self):
        self.steps += 1
        if self.steps > self.budget:
            raise RewriteBudgetExceeded(self.budget, None)

    def insert(self, letter, key):
        ck = (letter, key)
        hit = self.memo.get(ck)
        if hit is None:
            hit = self._insert(letter, key)
            self.memo[ck] = hit
        return hit

    def apply(self, letter, terms):
        out = {}
        for k, v in terms.items():
            for k2, c in self.insert(letter, k).items():
                add_into(out, k2, v * c)
        return out

    def word(self, letters, start=None):
        terms = {self.alg.unit_key: one()} if start is None else dict(start)
        for letter in reversed(letters):
            terms = self.apply(letter, terms)
        return terms


class _UqgOracle(_Oracle):
    """Letters F, E, K, Ki, L, Li on U_q(sl2) in F.T.E order (plain basis)."""

    def _insert(self, x, key):
        s, m, r = key
        self.step()
        if x == "F":
            return {(s + 1, m, r): one()}
        if x in ("L", "Li", "K", "Ki"):
            j = {"L": 1, "Li": -1, "K": 2, "Ki": -2}[x]
            if j % 2 and self.alg.lattice == "Q":
                raise ValueError("L is not in U_q^Q")
            # L_j F = q^-j F L_j, once per F
            return {(s, m + j, r): qp(-j * s)}
        if x == "E":
            if s == 0:
                # E L_m = q^-m L_m E
                return {(0, m, r + 1): qp(-m)}
            # E F Y = F (E Y) + (K Y - Ki Y)/(q - q^-1)
            rest = (s - 1, m, r)
            out = {}
            for k, v in self.insert("E", rest).items():
                for k2, c in self.insert("F", k).items():
                    add_into(out, k2, v * c)
            inv = one() / qdiff()
            for k, v in self.insert("K", rest).items():
                add_into(out, k, v * inv)
            for k, v in self.insert("Ki", rest).items():
                add_into(out, k, -v * inv)
            return out
        raise ValueError("unknown letter %r" % x)


class _DoubleOracle(_Oracle):
    """Letters on the double in the order E^r L_m (x) K^k F^s.

    E, F, Eb, Fb are root vectors (bar letters when basis == 'bar'); L, Li
    are L_omega^{+-1} and Kp, Kpi are L_2^{+-1} on the plus side; K, Ki are
    K^{+-1} on the minus side.
    """

    def _insert(self, x, key):
        r, m, k, s = key
        self.step()
        if x in ("E", "Eb"):
            self._check_basis(x)
            return {(r + 1, m, k, s): one()}
        if x in ("L", "Li", "Kp", "Kpi"):
            j = {"L": 1, "Li": -1, "Kp": 2, "Kpi": -2}[x]
            # L_j E = q^j E L_j
            return {(r, m + j, k, s): qp(j * r)}
        if x in ("K", "Ki"):
            j = 1 if x == "K" else -1
            # K E = q^2 E K
            return {(r, m, k + j, s): qp(2 * j * r)}
        if x in ("F", "Fb"):
            self._check_basis(x)
            if r == 0:
                # F L_m = q^m L_m F, F K = q^2 K F
                return {(0, m, k, s + 1): qp(m + 2 * k)}
            # F E Y = E (F Y) - c (Kp Y - Ki Y), c = 1/(q - q^-1) or (q - q^-1)
            rest = (r - 1, m, k, s)
            out = {}
            e = "Eb" if self.basis == BAR else "E"
            for kk, v in self.insert(x, rest).items():
                for k2, c in self.insert(e, kk).items():
                    add_into(out, k2, v * c)
            c = qdiff() if self.basis == BAR else one() / qdiff()
            for kk, v in self.insert("Kp", rest).items():
                add_into(out, kk, -v * c)
            for kk, v in self.insert("Ki", rest).items():
                add_into(out, kk, v * c)
            return out
        raise ValueError("unknown letter %r" % x)

    def _check_basis(self, x):
        bar = x.endswith("b")
        if bar != (self.basis == BAR):
            raise ValueError("letter %s does not match the %s basis" % (x, self.basis))


_ORACLES = {}


def oracle_for(alg, basis=PLAIN):
    key = (alg, basis)
    o = _ORACLES.get(key)
    if o is None:
        if isinstance(alg, Uqg):
            if basis != PLAIN:
                raise ValueError("U_q(g) oracle works in the plain basis")
            o = _UqgOracle(alg, basis)
        elif alg.__class__.__name__ == "Double":
            o = _DoubleOracle(alg, basis)
        else:
            raise ValueError("no rewrite oracle for %s" % alg.name)
        _ORACLES[key] = o
    return o


def _normalize_word(word):
    out = []
    for w in word:
        out.append(_LETTER_ALIASES.get(w, w))
    return out


def rewrite_oracle(word, alg, flavor=None, budget=10 ** 6):
    """Normal form of a word in generator letters, one relation per step.

    Words containing bar letters (Eb, Fb) are rewritten in the bar basis,
    otherwise in the plain basis; the result is returned in `flavor`
    (default: the rewriting basis).
    """
    word = _normalize_word(word)
    basis = BAR if any(w in ("Eb", "Fb") for w in word) else PLAIN
    o = oracle_for(alg, basis)
    o.budget = budget
    o.steps = 0
    try:
        terms = o.word(word)
    except RewriteBudgetExceeded as exc:
        raise RewriteBudgetExceeded(budget, exc.partial)
    x = Element(alg, terms, basis)
    return x.convert(flavor) if flavor and flavor != basis else x


def monomial_word(alg, key, basis=PLAIN):
    """Letters whose product is the monomial `key` (in the given basis)."""
    if isinstance(alg, Uqg):
        s, m, r = key
        tor = _torus_letters(m, alg.lattice, "L", "Li", "K", "Ki")
        return ["F"] * s + tor + ["E"] * r
    r, m, k, s = key
    e, f = ("Eb", "Fb") if basis == BAR else ("E", "F")
    tor = _torus_letters(m, alg.lattice, "L", "Li", "Kp", "Kpi")
    minus = ["K"] * k if k > 0 else ["Ki"] * (-k)
    return [e] * r + tor + minus + [f] * s


def _torus_letters(m, lattice, l, li, k, ki):
    if lattice == "Q" or m % 2 == 0:
        n = m // 2
        return [k] * n if n > 0 else [ki] * (-n)
    return [l] * m if m > 0 else [li] * (-m)


def oracle_multiply_keys(alg, a, b, basis=PLAIN):
    """Product of two normal monomials (in `basis`) by the oracle."""
    o = oracle_for(alg, basis)
    return o.word(monomial_word(alg, a, basis), {b: one()})
