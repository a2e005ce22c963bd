"""
Exact scalars for quantum group computations.

A scalar is a rational function in a formal root v of q (q = v^d) with
rational coefficients.  Numerators are Laurent polynomials; denominators
are kept factored into cyclotomic pieces Psi_k (Psi_1 = 1 - v and
Psi_k = Phi_k(v) otherwise), plus a rare residual polynomial with no
cyclotomic factor.  Every scalar is stored in lowest terms, so structural
equality is mathematical equality.

Also provided: q-integers, q-factorials and q-binomials in both the
symmetric "bracket" normalization and the "paren" normalization,
specialization at q = 1, and reduction modulo the l-th cyclotomic
polynomial (CycloScalar).
"""

from fractions import Fraction
from functools import lru_cache


class PoleError(ArithmeticError):
    """Raised when a scalar has a pole at the requested specialization."""

    def __init__(self, order, where="q=1"):
        self.order = order
        self.where = where
        ArithmeticError.__init__(self, "pole of order %s at %s" % (order, where))


# ---------------------------------------------------------------------------
# Laurent polynomial helpers on dicts {exponent: coefficient}


def _norm_coeff(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def _padd(a, b, sign=1):
    if not b:
        return a
    out = dict(a)
    for e, c in b.items():
        v = out.get(e, 0) + sign * c
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


def _pmul(a, b):
    if not a or not b:
        return {}
    if len(a) == 1:
        (ea, ca), = a.items()
        return {ea + e: ca * c for e, c in b.items()}
    if len(b) == 1:
        (eb, cb), = b.items()
        return {eb + e: cb * c for e, c in a.items()}
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = ea + eb
            out[e] = out.get(e, 0) + ca * cb
    return {e: c for e, c in out.items() if c}


def _pscale(a, c, shift=0):
    if not c:
        return {}
    return {e + shift: c * x for e, x in a.items()}


def _dense(a):
    """Return (low exponent, coefficient list) of a nonzero Laurent polynomial."""
    lo = min(a)
    hi = max(a)
    out = [0] * (hi - lo + 1)
    for e, c in a.items():
        out[e - lo] = c
    return lo, out


def _sparse(lo, coeffs):
    return {lo + i: c for i, c in enumerate(coeffs) if c}


def _divmod_dense(num, den):
    """Long division of dense coefficient lists (low degree first)."""
    num = list(num)
    n, m = len(num) - 1, len(den) - 1
    if n < m:
        while num and not num[-1]:
            num.pop()
        return [], num
    lead = den[-1]
    quo = [0] * (n - m + 1)
    for i in range(n - m, -1, -1):
        c = num[i + m]
        if c:
            if lead == 1:
                qc = c
            elif lead == -1:
                qc = -c
            else:
                qc = Fraction(c) / lead
                qc = _norm_coeff(qc)
            quo[i] = qc
            for j in range(m + 1):
                if den[j]:
                    num[i + j] -= qc * den[j]
    rem = num[:m]
    while rem and not rem[-1]:
        rem.pop()
    return quo, rem


def _exact_div(a, den_dense):
    """Divide Laurent polynomial a by a polynomial (dense, constant term
    nonzero); return the quotient or None if the division is not exact."""
    lo, coeffs = _dense(a)
    quo, rem = _divmod_dense(coeffs, den_dense)
    if rem:
        return None
    return _sparse(lo, quo)


def _eval(a, x):
    return sum(c * x ** e for e, c in a.items()) if a else 0


# ---------------------------------------------------------------------------
# Cyclotomic polynomials


@lru_cache(maxsize=None)
def cyclotomic_poly(k):
    """Dense coefficients (low degree first) of the k-th cyclotomic polynomial."""
    if k < 1:
        raise ValueError("cyclotomic index must be positive")
    num = [-1] + [0] * (k - 1) + [1]
    for j in range(1, k):
        if k % j == 0:
            num, rem = _divmod_dense(num, list(cyclotomic_poly(j)))
            assert not rem
    return tuple(num)


@lru_cache(maxsize=None)
def _psi(k):
    """Normalized cyclotomic factor: constant term 1."""
    if k == 1:
        return (1, -1)
    return cyclotomic_poly(k)


@lru_cache(maxsize=None)
def _psi_sparse(k):
    return _sparse(0, list(_psi(k)))


@lru_cache(maxsize=None)
def _psi_power(k, e):
    if e == 0:
        return {0: 1}
    if e == 1:
        return _psi_sparse(k)
    half = _psi_power(k, e // 2)
    out = _pmul(half, half)
    if e % 2:
        out = _pmul(out, _psi_sparse(k))
    return out


@lru_cache(maxsize=None)
def totient(n):
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


@lru_cache(maxsize=None)
def _indices_with_totient_at_most(n):
    # phi(k) >= sqrt(k/2), so k <= 2 n^2 covers every candidate.
    return tuple(k for k in range(1, 2 * n * n + 3) if totient(k) <= n)


def _divisible_by_psi(a, k):
    """Fast test whether Psi_k divides the Laurent polynomial a."""
    red = [0] * k
    for e, c in a.items():
        red[e % k] += c
    _, rem = _divmod_dense(red, list(_psi(k)))
    return not rem


def _pgcd(a, b):
    """Monic gcd of two polynomials given as dense lists over Q."""
    a = [Fraction(x) for x in a]
    b = [Fraction(x) for x in b]
    while b and any(b):
        _, r = _divmod_dense(a, b)
        a, b = b, r
    while a and not a[-1]:
        a.pop()
    lead = a[-1]
    return [_norm_coeff(x / lead) for x in a]


@lru_cache(maxsize=4096)
def _factor_poly(key):
    """Split a polynomial (dense tuple, constant term nonzero) into
    content * prod Psi_k^e * residual with residual free of cyclotomic
    factors and normalized to constant term 1."""
    coeffs = list(key)
    fac = {}
    deg = len(coeffs) - 1
    if deg > 0:
        for k in _indices_with_totient_at_most(deg):
            if totient(k) > len(coeffs) - 1:
                continue
            while len(coeffs) - 1 >= totient(k):
                quo, rem = _divmod_dense(coeffs, list(_psi(k)))
                if rem:
                    break
                coeffs = quo
                fac[k] = fac.get(k, 0) + 1
            if len(coeffs) == 1:
                break
    content = coeffs[0]
    residual = None
    if len(coeffs) > 1:
        residual = tuple(_norm_coeff(Fraction(c) / content) for c in coeffs)
    return content, tuple(sorted(fac.items())), residual


# ---------------------------------------------------------------------------
# Scalars


class LaurentScalar(object):
    """
    Exact element of Q(v), q = v^d, in lowest terms.

    Attributes (read only):
      num   -- dict {v-exponent: coefficient}, the numerator
      fac   -- tuple of (k, e): the denominator contains Psi_k(v)^e
      other -- None, or a dense tuple for a residual denominator factor
      d     -- root degree, q = v^d
    """

    __slots__ = ("num", "fac", "other", "d", "_hash")

    def __init__(self, num=None, fac=(), other=None, d=1, _reduced=False):
        if num is None:
            num = {}
        if _reduced:
            self.num, self.fac, self.other, self.d = num, fac, other, d
        else:
            self.num, self.fac, self.other = _reduce(num, dict(fac), other)
            self.d = d
        self._hash = None

    # -- constructors
    @classmethod
    def const(cls, c, d=1):
        c = _norm_coeff(Fraction(c)) if not isinstance(c, int) else c
        return cls({0: c} if c else {}, (), None, d, _reduced=True)

    @classmethod
    def vpow(cls, e, c=1, d=1):
        return cls({e: c} if c else {}, (), None, d, _reduced=True)

    @classmethod
    def qpow(cls, n, c=1, d=1):
        return cls.vpow(d * n, c, d)

    @classmethod
    def from_laurent(cls, coeffs, d=1):
        return cls({e: c for e, c in coeffs.items() if c}, (), None, d, _reduced=True)

    # -- predicates and accessors
    def is_zero(self):
        return not self.num

    def is_laurent(self):
        return not self.fac and self.other is None

    def is_const(self):
        return self.is_laurent() and (not self.num or list(self.num) == [0])

    def const_value(self):
        if not self.is_const():
            raise ValueError("not a constant: %s" % self)
        return self.num.get(0, 0)

    def laurent_coeffs(self):
        if not self.is_laurent():
            raise ValueError("not a Laurent polynomial: %s" % self)
        return dict(self.num)

    def denominator(self):
        """Expanded denominator as a Laurent dict."""
        out = {0: 1}
        for k, e in self.fac:
            out = _pmul(out, _psi_power(k, e))
        if self.other is not None:
            out = _pmul(out, _sparse(0, list(self.other)))
        return out

    # -- arithmetic
    def _coerce(self, other):
        if isinstance(other, LaurentScalar):
            if other.d != self.d:
                raise ValueError("root degree mismatch: %d vs %d; rescale first"
                                 % (self.d, other.d))
            return other
        if isinstance(other, (int, Fraction)):
            return LaurentScalar.const(other, self.d)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.num:
            return self
        if not self.num:
            return other
        if self.fac == other.fac and self.other == other.other:
            if not self.fac and self.other is None:
                return LaurentScalar(_padd(self.num, other.num), (), None, self.d, _reduced=True)
            return LaurentScalar(_padd(self.num, other.num), self.fac, self.other, self.d)
        fa, fb = dict(self.fac), dict(other.fac)
        keys = set(fa) | set(fb)
        common = {k: max(fa.get(k, 0), fb.get(k, 0)) for k in keys}
        na, nb = self.num, other.num
        for k in keys:
            ea, eb = common[k] - fa.get(k, 0), common[k] - fb.get(k, 0)
            if ea:
                na = _pmul(na, _psi_power(k, ea))
            if eb:
                nb = _pmul(nb, _psi_power(k, eb))
        resid = None
        if self.other is not None or other.other is not None:
            oa, ob = self.other, other.other
            if oa is None:
                resid = ob
                na = _pmul(na, _sparse(0, list(ob)))
            elif ob is None:
                resid = oa
                nb = _pmul(nb, _sparse(0, list(oa)))
            elif oa == ob:
                resid = oa
            else:
                g = _pgcd(list(oa), list(ob))
                qa, _ = _divmod_dense(list(oa), g)
                qb, _ = _divmod_dense(list(ob), g)
                na = _pmul(na, _sparse(0, qb))
                nb = _pmul(nb, _sparse(0, qa))
                resid = tuple(_dense(_pmul(_sparse(0, list(oa)), _sparse(0, qb)))[1])
        return LaurentScalar(_padd(na, nb), tuple(sorted(common.items())), resid, self.d)

    __radd__ = __add__

    def __neg__(self):
        return LaurentScalar({e: -c for e, c in self.num.items()}, self.fac, self.other,
                             self.d, _reduced=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.num or not other.num:
            return LaurentScalar({}, (), None, self.d, _reduced=True)
        num = _pmul(self.num, other.num)
        if not self.fac and not other.fac and self.other is None and other.other is None:
            return LaurentScalar(num, (), None, self.d, _reduced=True)
        fac = dict(self.fac)
        for k, e in other.fac:
            fac[k] = fac.get(k, 0) + e
        resid = None
        if self.other is None:
            resid = other.other
        elif other.other is None:
            resid = self.other
        else:
            resid = tuple(_dense(_pmul(_sparse(0, list(self.other)),
                                       _sparse(0, list(other.other))))[1])
        return LaurentScalar(num, fac, resid, self.d)

    __rmul__ = __mul__

    def inverse(self):
        if not self.num:
            raise ZeroDivisionError("inverse of zero scalar")
        lo, coeffs = _dense(self.num)
        content, fac, resid = _factor_poly(tuple(coeffs))
        inv = Fraction(1) / content
        num = {e - lo: _norm_coeff(c * inv) for e, c in self.denominator().items()}
        return LaurentScalar(num, dict(fac), resid, self.d)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_const():
            c = other.const_value()
            if c == 0:
                raise ZeroDivisionError("division by zero scalar")
            inv = Fraction(1) / c
            return LaurentScalar({e: _norm_coeff(x * inv) for e, x in self.num.items()},
                                 self.fac, self.other, self.d, _reduced=True)
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        out = LaurentScalar.const(1, self.d)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- comparison
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_const() and self.const_value() == other
        if not isinstance(other, LaurentScalar):
            return NotImplemented
        return (self.d == other.d and self.num == other.num and self.fac == other.fac
                and self.other == other.other)

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.d, tuple(sorted(self.num.items())), self.fac, self.other))
        return self._hash

    def __bool__(self):
        return bool(self.num)

    # -- transformations
    def substitute_power(self, m):
        """Substitute v -> v^m (m >= 1); the root degree becomes d*m."""
        if m == 1:
            return self
        num = {e * m: c for e, c in self.num.items()}
        den = self.denominator()
        den = {e * m: c for e, c in den.items()}
        return LaurentScalar(num, (), None, self.d * m) / LaurentScalar(den, (), None, self.d * m)

    def with_root_degree(self, d):
        """Rewrite the same element of Q(v) with q = v_new^d."""
        if d % self.d:
            raise ValueError("root degree %d is not a multiple of %d" % (d, self.d))
        return self.substitute_power(d // self.d)

    def evaluate(self, x):
        """Evaluate at v = x (x an exact number)."""
        den = _eval(self.denominator(), x)
        if den == 0:
            raise PoleError("?", "v=%s" % x)
        return Fraction(_eval(self.num, x)) / den if isinstance(den, int) else _eval(self.num, x) / den

    def pole_order_at_one(self):
        return dict(self.fac).get(1, 0)

    def zero_order_at_one(self):
        out, num = 0, self.num
        while num and _divisible_by_psi(num, 1):
            num = _exact_div(num, [1, -1])
            out += 1
        return out

    def valuation_at_one(self):
        """Order of vanishing at q = 1 (negative for poles); infinite for 0."""
        if not self.num:
            return float("inf")
        return self.zero_order_at_one() - self.pole_order_at_one()

    def __repr__(self):
        return "LaurentScalar(%s)" % render_scalar(self)

    def __str__(self):
        return render_scalar(self)


RationalScalar = LaurentScalar


def _reduce(num, fac, other):
    """Cancel common factors so that num/den is in lowest terms."""
    if not num:
        return {}, (), None
    for k in sorted(fac):
        e = fac[k]
        while e and _divisible_by_psi(num, k):
            num = _exact_div(num, list(_psi(k)))
            e -= 1
        if e:
            fac[k] = e
        else:
            del fac[k]
    if other is not None:
        other = tuple(other)
        lo, coeffs = _dense(num)
        g = _pgcd(coeffs, list(other))
        if len(g) > 1:
            other = tuple(_divmod_dense(list(other), g)[0])
            num = _sparse(lo, _divmod_dense(coeffs, g)[0])
        if len(other) == 1:
            c = other[0]
            num = {e: _norm_coeff(Fraction(x) / c) for e, x in num.items()}
            other = None
        else:
            c = other[0]
            if c != 1:
                other = tuple(_norm_coeff(Fraction(x) / c) for x in other)
                num = {e: _norm_coeff(Fraction(x) / c) for e, x in num.items()}
    return num, tuple(sorted(fac.items())), other


# ---------------------------------------------------------------------------
# Convenience constructors


def one(d=1):
    return LaurentScalar.const(1, d)


def zero(d=1):
    return LaurentScalar.const(0, d)


def qpow(n, d=1):
    """q^n as a scalar with root degree d."""
    return LaurentScalar.qpow(n, 1, d)


def vpow(e, d=1):
    return LaurentScalar.vpow(e, 1, d)


def as_scalar(x, d=1):
    if isinstance(x, LaurentScalar):
        return x
    return LaurentScalar.const(x, d)


@lru_cache(maxsize=None)
def qdiff(b=1, d=1):
    """q^b - q^-b."""
    return LaurentScalar.from_laurent({d * b: 1, -d * b: -1}, d)


@lru_cache(maxsize=None)
def q_int(n, b=1, d=1):
    """Symmetric q-integer [n]_{q^b} = (q^{bn} - q^{-bn})/(q^b - q^{-b})."""
    if n < 0:
        return -q_int(-n, b, d)
    return LaurentScalar.from_laurent({d * b * (n - 1 - 2 * j): 1 for j in range(n)}, d)


@lru_cache(maxsize=None)
def q_paren(n, b=1, d=1):
    """Non-symmetric q-integer (n)_{q^b} = (q^{bn} - 1)/(q^b - 1)."""
    if n < 0:
        return -(qpow(-b * (-n), d) * q_paren(-n, b, d))
    return LaurentScalar.from_laurent({d * b * j: 1 for j in range(n)}, d)


@lru_cache(maxsize=None)
def q_factorial(n, kind="bracket", b=1, d=1):
    """[n]! or (n)! for n >= 0."""
    if n < 0:
        raise ValueError("factorial of negative integer")
    base = q_int if kind == "bracket" else q_paren
    out = one(d)
    for j in range(1, n + 1):
        out = out * base(j, b, d)
    return out


@lru_cache(maxsize=None)
def q_binom(n, k, kind="bracket", b=1, d=1):
    """Gaussian binomial [n k]_{q^b} or (n k)_{q^b}; n any integer, k >= 0."""
    if k < 0:
        return zero(d)
    if n >= 0 and k > n:
        return zero(d)
    base = q_int if kind == "bracket" else q_paren
    num, den = one(d), one(d)
    for s in range(1, k + 1):
        num = num * base(n - s + 1, b, d)
        den = den * base(s, b, d)
    out = num / den
    assert out.is_laurent()
    return out


def specialize_at_one(x):
    """Value at q = 1 as a Fraction; raises PoleError with the pole order."""
    x = as_scalar(x)
    order = x.pole_order_at_one()
    if order:
        raise PoleError(order)
    return Fraction(x.evaluate(1))


# ---------------------------------------------------------------------------
# Residues modulo a cyclotomic polynomial


def _poly_mod(dense, modulus):
    return _divmod_dense(dense, list(modulus))[1]


class CycloScalar(object):
    """Element of Q[q]/(Phi_l(q)) for odd l >= 3, stored as coefficients of
    1, q, ..., q^(phi(l)-1)."""

    __slots__ = ("ell", "coeffs")

    def __init__(self, ell, coeffs):
        n = totient(ell)
        coeffs = list(coeffs)
        if len(coeffs) > n:
            coeffs = _poly_mod(coeffs, cyclotomic_poly(ell))
        coeffs = [_norm_coeff(c) for c in coeffs] + [0] * (n - len(coeffs))
        self.ell = ell
        self.coeffs = tuple(coeffs[:n])

    @classmethod
    def const(cls, ell, c):
        return cls(ell, [c])

    def _coerce(self, other):
        if isinstance(other, CycloScalar):
            if other.ell != self.ell:
                raise ValueError("different cyclotomic moduli")
            return other
        if isinstance(other, (int, Fraction)):
            return CycloScalar.const(self.ell, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycloScalar(self.ell, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycloScalar(self.ell, [-a for a in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        prod = [0] * (2 * len(self.coeffs))
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        prod[i + j] += a * b
        return CycloScalar(self.ell, prod)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero residue")
        r0 = [Fraction(c) for c in cyclotomic_poly(self.ell)]
        r1 = [Fraction(c) for c in self.coeffs]
        while r1 and not r1[-1]:
            r1.pop()
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while len(r1) > 1:
            quo, rem = _divmod_dense(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, _poly_sub(s0, _poly_mul(quo, s1))
        return CycloScalar(self.ell, [x / r1[0] for x in s1])

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        out = CycloScalar.const(self.ell, 1)
        for _ in range(n):
            out = out * self
        return out

    def is_zero(self):
        return not any(self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycloScalar.const(self.ell, other)
        if not isinstance(other, CycloScalar):
            return NotImplemented
        return self.ell == other.ell and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ell, self.coeffs))

    def __repr__(self):
        return "CycloScalar(ell=%d, %s)" % (self.ell, str(self))

    def __str__(self):
        return _render_laurent({i: c for i, c in enumerate(self.coeffs) if c}, 1, "e") or "0"


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _poly_sub(a, b):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return [x - y for x, y in zip(a, b)]


def _reduce_laurent_mod(num, ell):
    red = [0] * ell
    for e, c in num.items():
        red[e % ell] += c
    return CycloScalar(ell, red)


def cyclotomic_reduce(x, ell):
    """Image of a scalar (root degree 1) in Q[q]/(Phi_l(q)).

    Raises PoleError if the denominator vanishes at a primitive l-th root of 1.
    """
    x = as_scalar(x)
    if ell < 3 or ell % 2 == 0:
        raise ValueError("ell must be odd and at least 3")
    if x.d != 1:
        raise ValueError("cyclotomic reduction needs root degree 1")
    out = _reduce_laurent_mod(x.num, ell)
    if x.is_laurent():
        return out
    fac = dict(x.fac)
    if fac.get(ell):
        raise PoleError(fac[ell], "q=primitive %d-th root of 1" % ell)
    den = _reduce_laurent_mod(x.denominator(), ell)
    if den.is_zero():
        raise PoleError(1, "q=primitive %d-th root of 1" % ell)
    return out / den


# ---------------------------------------------------------------------------
# Rendering

MINUS = "−"


def _render_exp(e, d, var):
    if d == 1:
        return "%s^%d" % (var, e) if e != 1 else var
    f = Fraction(e, d)
    if f.denominator == 1:
        return "%s^%d" % (var, f.numerator) if f != 1 else var
    return "%s^(%s)" % (var, f)


def _term_order(item):
    e, c = item
    return (c < 0, -e)


def _render_laurent(poly, d=1, var="q"):
    """Render a Laurent polynomial: positive terms first, each block by
    decreasing exponent."""
    if not poly:
        return ""
    parts = []
    for e, c in sorted(poly.items(), key=_term_order):
        neg = c < 0
        a = -c if neg else c
        if e == 0:
            body = _render_coeff(a, True)
        else:
            cs = _render_coeff(a, False)
            body = cs + _render_exp(e, d, var)
        parts.append((neg, body))
    out = (MINUS if parts[0][0] else "") + parts[0][1]
    for neg, body in parts[1:]:
        out += (" %s " % MINUS if neg else " + ") + body
    return out


def _render_coeff(a, alone):
    a = Fraction(a)
    if a.denominator == 1:
        if alone:
            return str(a.numerator)
        return "" if a == 1 else str(a.numerator)
    if alone:
        return "%d/%d" % (a.numerator, a.denominator)
    return "(%d/%d)" % (a.numerator, a.denominator)


def centered(x):
    """Return (numerator, denominator) Laurent dicts representing x with the
    denominator shifted to be centered around exponent 0."""
    den = x.denominator()
    hi = max(den)
    s = -(hi // 2)
    return _pscale(x.num, 1, s), _pscale(den, 1, s)


def _leading_sign(poly):
    e, c = sorted(poly.items(), key=lambda it: -it[0])[0]
    return -1 if c < 0 else 1


def recognize_q_number(x):
    """Return a short name ("[n]_q") if x is a symmetric q-integer n >= 2."""
    if not x.is_laurent() or x.d != 1 or not x.num:
        return None
    n = max(x.num) + 1
    if n >= 2 and x == q_int(n):
        return "[%d]_q" % n
    return None


def render_scalar(x):
    x = as_scalar(x)
    if not x.num:
        return "0"
    if x.is_laurent():
        return _render_laurent(x.num, x.d)
    num, den = centered(x)
    if _leading_sign(num) < 0:
        num = _pscale(num, -1)
        den = _pscale(den, -1)
    ns = _render_laurent(num, x.d)
    ds = _render_laurent(den, x.d)
    if len(num) > 1:
        ns = "(" + ns + ")"
    if len(den) > 1:
        ds = "(" + ds + ")"
    return ns + "/" + ds
