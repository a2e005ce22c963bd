"""
Cartan data: symmetrization, weight and root lattices, the bilinear forms,
dual lattices, convex orderings of positive roots from a reduced word of
the longest Weyl element, and the multiparameter twist phi with its
derived maps tau, r and r-bar.

Conventions: lattice vectors are integer (or rational) vectors in the basis
of fundamental weights; alpha_j = sum_i a_ij omega_i; (alpha_i|omega_j) =
delta_ij d_i.
"""

from fractions import Fraction
from functools import reduce
from math import gcd

import sympy


class CartanError(ValueError):
    pass


def ent_half(t):
    """Ent(t/2): integer part of t/2 (floor division)."""
    return t // 2


def _frac_matrix(m):
    return tuple(tuple(Fraction(int(x.p), int(x.q)) for x in row) for row in m.tolist())


def _matvec(m, v):
    return tuple(sum(Fraction(a) * b for a, b in zip(row, v)) for row in m)


class Lattice(object):
    """A lattice Q <= M <= P, stored as its image in the finite group P/Q."""

    def __init__(self, cartan, cosets, name=None):
        self.cartan = cartan
        self.cosets = frozenset(cosets)
        self.name = name

    def contains(self, x):
        return self.cartan.coset_key(x) in self.cosets

    def __le__(self, other):
        return self.cosets <= other.cosets

    def __eq__(self, other):
        return isinstance(other, Lattice) and self.cosets == other.cosets

    def __hash__(self):
        return hash(self.cosets)

    def __repr__(self):
        if self.name:
            return "Lattice(%s)" % self.name
        return "Lattice(index %d in P)" % (len(self.cartan.cosets_PQ) // len(self.cosets))


class CartanData(object):
    """Finite-type Cartan datum with a convex ordering of positive roots."""

    def __init__(self, A, w0_word):
        A = tuple(tuple(int(x) for x in row) for row in A)
        n = len(A)
        if any(len(row) != n for row in A):
            raise CartanError("Cartan matrix must be square")
        for i in range(n):
            if A[i][i] != 2:
                raise CartanError("diagonal entries must equal 2")
            for j in range(n):
                if i != j and A[i][j] > 0:
                    raise CartanError("off-diagonal entries must be <= 0")
                if (A[i][j] == 0) != (A[j][i] == 0):
                    raise CartanError("non-symmetrizable: a_ij = 0 iff a_ji = 0 fails")
        self.A = A
        self.n = n
        self.d = self._symmetrize()
        DA = sympy.Matrix(n, n, lambda i, j: self.d[i] * A[i][j])
        if not DA.is_symmetric():
            raise CartanError("non-symmetrizable Cartan matrix")
        if not DA.is_positive_definite:
            raise CartanError("symmetrized Cartan matrix is not positive definite")
        Am = sympy.Matrix(A)
        self.det = int(Am.det())
        self.A_inv = _frac_matrix(Am.inv())
        # Gram matrix of ( | ) in the omega basis: G = D A^-1
        self.gram = tuple(tuple(self.d[i] * self.A_inv[i][j] for j in range(n))
                          for i in range(n))
        self.w0_word = tuple(int(i) for i in w0_word)
        self.positive_roots = self._convex_order()
        self.N = len(self.positive_roots)
        self.root_d = tuple(self.root_norm(beta) for beta in self.positive_roots)
        self.cosets_PQ = self._enumerate_cosets()
        self.P = Lattice(self, self.cosets_PQ, "P")
        self.Q = Lattice(self, [self.coset_key((0,) * n)], "Q")

    # -- construction helpers
    def _symmetrize(self):
        n, A = self.n, self.A
        d = [None] * n
        for start in range(n):
            if d[start] is not None:
                continue
            d[start] = Fraction(1)
            stack = [start]
            while stack:
                i = stack.pop()
                for j in range(n):
                    if j != i and A[i][j] != 0:
                        dj = d[i] * A[i][j] / A[j][i]
                        if d[j] is None:
                            d[j] = dj
                            stack.append(j)
                        elif d[j] != dj:
                            raise CartanError("non-symmetrizable Cartan matrix")
        if any(x <= 0 for x in d):
            raise CartanError("symmetrizing vector not positive")
        den = reduce(lambda a, b: a * b // gcd(a, b), [x.denominator for x in d], 1)
        ints = [int(x * den) for x in d]
        g = reduce(gcd, ints)
        return tuple(x // g for x in ints)

    def reflect(self, i, beta):
        """Simple reflection s_i on a root given in alpha coordinates."""
        c = sum(beta[j] * self.A[i][j] for j in range(self.n))
        out = list(beta)
        out[i] -= c
        return tuple(out)

    def _all_positive_roots(self):
        simple = [tuple(int(i == j) for j in range(self.n)) for i in range(self.n)]
        seen = set(simple)
        todo = list(simple)
        while todo:
            beta = todo.pop()
            for i in range(self.n):
                g = self.reflect(i, beta)
                if all(x >= 0 for x in g) and g not in seen:
                    seen.add(g)
                    todo.append(g)
        return seen

    def _convex_order(self):
        word = self.w0_word
        if any(i < 1 or i > self.n for i in word):
            raise CartanError("w0 word uses an index outside 1..n")
        roots = []
        for r, ir in enumerate(word):
            beta = tuple(int(j == ir - 1) for j in range(self.n))
            for i in reversed(word[:r]):
                beta = self.reflect(i - 1, beta)
            roots.append(beta)
        expected = self._all_positive_roots()
        if len(set(roots)) != len(roots) or any(min(b) < 0 for b in roots):
            raise CartanError("w0 word is not reduced")
        if set(roots) != expected:
            raise CartanError("w0 word has length %d but there are %d positive roots"
                              % (len(word), len(expected)))
        return tuple(roots)

    def _enumerate_cosets(self):
        zero = (0,) * self.n
        reps = {self.coset_key(zero): zero}
        todo = [zero]
        while todo:
            x = todo.pop()
            for i in range(self.n):
                y = tuple(x[j] + (j == i) for j in range(self.n))
                k = self.coset_key(y)
                if k not in reps:
                    reps[k] = y
                    todo.append(y)
        self.coset_reps = reps
        return frozenset(reps)

    # -- coordinates
    def alpha(self, i):
        """Simple root alpha_i (0-based index) in omega coordinates."""
        return tuple(self.A[j][i] for j in range(self.n))

    def omega(self, i):
        return tuple(int(j == i) for j in range(self.n))

    def root_to_omega(self, beta):
        """alpha coordinates -> omega coordinates."""
        return tuple(sum(self.A[j][i] * beta[i] for i in range(self.n)) for j in range(self.n))

    def omega_to_root(self, x):
        """omega coordinates -> alpha coordinates (rational in general)."""
        return _matvec(self.A_inv, x)

    def in_Q(self, x):
        return all(c.denominator == 1 for c in self.omega_to_root(x))

    def coset_key(self, x):
        return tuple(c - (c.numerator // c.denominator) for c in self.omega_to_root(x))

    @property
    def rho(self):
        return (1,) * self.n

    @property
    def delta(self):
        return self.root_to_omega((1,) * self.n)

    # -- forms
    def form(self, x, y, which="paren"):
        """(x|y) for omega-coordinate vectors; "angle" gives <x, y> with x in Q
        expressed by its alpha coordinates paired against omega coordinates
        so that <alpha_i, omega_j> = delta_ij."""
        if which == "paren":
            out = sum(Fraction(x[i]) * self.gram[i][j] * y[j]
                      for i in range(self.n) for j in range(self.n))
        elif which == "angle":
            if not self.in_Q(x):
                raise CartanError("angle form needs its first argument in Q")
            xa = self.omega_to_root(x)
            out = sum(xa[i] * y[i] for i in range(self.n))
        else:
            raise ValueError("which must be 'paren' or 'angle'")
        return out.numerator if out.denominator == 1 else out

    def root_norm(self, beta):
        """d_beta = (beta|beta)/2 for beta in alpha coordinates."""
        b = self.root_to_omega(beta)
        v = self.form(b, b) / Fraction(2)
        if v.denominator != 1:
            raise CartanError("root length not integral")
        return int(v)

    # -- lattices
    def lattice(self, name):
        if isinstance(name, Lattice):
            return name
        if name == "P":
            return self.P
        if name == "Q":
            return self.Q
        raise CartanError("unknown lattice %r" % (name,))

    def lattice_generated(self, vectors):
        keys = {self.coset_key((0,) * self.n)}
        frontier = list(keys)
        gens = [self.coset_key(v) for v in vectors]
        while frontier:
            k = frontier.pop()
            for g in gens:
                s = tuple((a + b) - ((a + b).numerator // (a + b).denominator)
                          for a, b in zip(k, g))
                if s not in keys:
                    keys.add(s)
                    frontier.append(s)
        return Lattice(self, keys)

    def dual_lattice(self, M):
        """M' = {y in P : (M|y) integral}."""
        M = self.lattice(M)
        if not M.cosets <= self.P.cosets:
            raise CartanError("lattice is not between Q and P")
        reps_M = [self.coset_reps[k] for k in M.cosets]
        keys = set()
        for k, y in self.coset_reps.items():
            if all(Fraction(self.form(m, y)).denominator == 1 for m in reps_M):
                keys.add(k)
        name = None
        if keys == set(self.P.cosets):
            name = "P"
        elif len(keys) == 1:
            name = "Q"
        return Lattice(self, keys, name)

    def __repr__(self):
        return "CartanData(A=%s, d=%s, w0=%s)" % (list(map(list, self.A)), list(self.d),
                                                  list(self.w0_word))


def build_cartan(A, w0_word):
    return CartanData(A, w0_word)


SL2 = ((2,),)
A2 = ((2, -1), (-1, 2))
B2 = ((2, -1), (-2, 2))


def sl2():
    return build_cartan(SL2, [1])


def type_a2():
    return build_cartan(A2, [1, 2, 1])


def type_b2():
    return build_cartan(B2, [1, 2, 1, 2])


class MultiParam(object):
    """The twist phi (omega basis matrix acting on QP) with tau, r, r-bar."""

    def __init__(self, cartan, phi):
        n = cartan.n
        phi = tuple(tuple(Fraction(x) for x in row) for row in phi)
        if len(phi) != n or any(len(row) != n for row in phi):
            raise CartanError("phi must be an n x n matrix")
        self.cartan = cartan
        self.phi = phi
        self._check()
        I = sympy.eye(n)
        Pm = sympy.Matrix(n, n, lambda i, j: sympy.Rational(phi[i][j].numerator,
                                                             phi[i][j].denominator))
        self.r = _frac_matrix((I + Pm).inv())
        self.rbar = _frac_matrix((I - Pm).inv())
        self.tau = tuple(tuple(c / 2 for c in self.apply(cartan.alpha(i))) for i in range(n))

    def _check(self):
        c, phi, n = self.cartan, self.phi, self.cartan.n
        G = c.gram
        failures = []
        # antisymmetry: phi^T G = -G phi
        for i in range(n):
            for j in range(n):
                lhs = sum(phi[k][i] * G[k][j] for k in range(n))
                rhs = -sum(G[i][k] * phi[k][j] for k in range(n))
                if lhs != rhs:
                    failures.append("antisymmetry")
                    break
            if failures:
                break
        # phi(Q) in Q
        if not all(c.in_Q(self.apply(c.alpha(i))) for i in range(n)):
            failures.append("phi(Q) in Q")
        # (1/2)(phi(P)|P) integral
        if not all(Fraction(c.form(self.apply(c.omega(i)), c.omega(j))) / 2 == int(
                Fraction(c.form(self.apply(c.omega(i)), c.omega(j))) / 2)
                for i in range(n) for j in range(n)):
            failures.append("(1/2)(phi(P)|P) integral")
        # 2 A Y A^-1 integral, with tau_i = sum_j y_ji alpha_j
        Y = [[None] * n for _ in range(n)]
        for i in range(n):
            taua = c.omega_to_root(tuple(x / 2 for x in self.apply(c.alpha(i))))
            for j in range(n):
                Y[j][i] = taua[j]
        A = c.A
        AY = [[sum(A[i][k] * Y[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
        M = [[2 * sum(AY[i][k] * c.A_inv[k][j] for k in range(n)) for j in range(n)]
             for i in range(n)]
        if any(Fraction(x).denominator != 1 for row in M for x in row):
            failures.append("2AYA^-1 integral")
        I = sympy.eye(n)
        Pm = sympy.Matrix(n, n, lambda i, j: sympy.Rational(phi[i][j].numerator,
                                                             phi[i][j].denominator))
        if (I + Pm).det() == 0 or (I - Pm).det() == 0:
            failures.append("id +- phi invertible")
        if failures:
            raise CartanError("phi violates: " + ", ".join(failures))

    def apply(self, x):
        return _matvec(self.phi, x)

    def r_apply(self, x):
        return _matvec(self.r, x)

    def rbar_apply(self, x):
        return _matvec(self.rbar, x)

    def is_zero(self):
        return all(x == 0 for row in self.phi for x in row)


def build_phi(phi, cartan):
    return MultiParam(cartan, phi)


def zero_phi(cartan):
    return MultiParam(cartan, [[0] * cartan.n for _ in range(cartan.n)])


def antisymmetric_phi_basis(cartan):
    """Basis (omega-basis matrices) of phi antisymmetric for ( | ).

    phi is antisymmetric iff G phi is an antisymmetric matrix, so phi =
    G^-1 S for S antisymmetric."""
    n = cartan.n
    Gm = sympy.Matrix(n, n, lambda i, j: sympy.Rational(cartan.gram[i][j].numerator,
                                                         cartan.gram[i][j].denominator))
    Ginv = Gm.inv()
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            S = sympy.zeros(n, n)
            S[i, j], S[j, i] = 1, -1
            out.append(_frac_matrix(Ginv * S))
    return out
