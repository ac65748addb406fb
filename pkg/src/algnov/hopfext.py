"""Minimal free resolutions over graded connected Hopf algebras.

The algebra is presented through its dual: a polynomial coalgebra
F_p[g_1, g_2, ...] with given generator degrees and coproducts.  The two
instances used here are the mod-2 dual Steenrod algebra (xi_n of degree
2^n - 1, classical Adams input) and the mod-I quotient of the BP
cooperations (tbar_n of degree 2(p^n - 1)).

Multiplication on the dual-basis side is generated, not hardcoded: the
product of two dual-basis elements evaluates coproducts,

    <a * b, g^m> = <a (x) b, Delta(g^m)>,

and Delta(g^m) is expanded by factoring m into p-power digits, applying
Frobenius twists to the generator coproducts, and pruning to the requested
bidegree.

The resolution is minimal: new free generators are adjoined exactly where
the kernel of the previous differential exceeds the image already
generated, so generator counts in (s, t) equal dim Ext^{s,t}.  Products
with the polynomial-generator duals (the h_j family) read off the linear
part of the differential at the corresponding primitive.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .linalg import BitEchelon

__all__ = [
    "HopfPresentation",
    "classical_dual_steenrod",
    "bp_quotient_hopf",
    "MinimalResolution",
    "QWeightModule",
    "ext_dims",
]


@dataclass(frozen=True)
class HopfPresentation:
    """Dual presentation: generator degrees and coproduct terms.

    coproduct(n) returns the terms of Delta(g_n) as (mono_L, mono_R) pairs
    of exponent tuples over the generators (unit coefficient; the
    presentations used here have all structure constants 1).
    """

    p: int
    degrees: tuple[int, ...]
    name: str
    frobenius_side: str = "left"  # side carrying the p^i twist in Delta(g_n)

    def n_gens(self) -> int:
        return len(self.degrees)

    def deg(self, mono: tuple[int, ...]) -> int:
        return sum(e * d for e, d in zip(mono, self.degrees))

    def coproduct(self, n: int) -> list[tuple[tuple, tuple]]:
        """Delta(g_n) = sum over i+j=n of a twisted tensor of g_i and g_j."""
        N = self.n_gens()
        out = []
        for i in range(n + 1):
            j = n - i
            left = [0] * N
            right = [0] * N
            if self.frobenius_side == "left":
                # Delta(g_n) = sum g_{n-i}^{p^i} (x) g_i
                if j:
                    left[j - 1] = self.p**i
                if i:
                    right[i - 1] = 1
            else:
                # Delta(g_n) = sum g_i (x) g_{n-i}^{p^i}
                if i:
                    left[i - 1] = 1
                if j:
                    right[j - 1] = self.p**i
            out.append((tuple(left), tuple(right)))
        return out


def classical_dual_steenrod(t_max: int) -> HopfPresentation:
    """Mod-2 dual Steenrod algebra, xi_n in degree 2^n - 1, truncated."""
    degs = []
    n = 1
    while 2**n - 1 <= t_max:
        degs.append(2**n - 1)
        n += 1
    return HopfPresentation(2, tuple(degs), "A(2)-dual", frobenius_side="left")


def bp_quotient_hopf(p: int, t_max: int) -> HopfPresentation:
    """P = BP_*BP/I: tbar_n in degree 2(p^n - 1), truncated."""
    degs = []
    n = 1
    while 2 * (p**n - 1) <= t_max:
        degs.append(2 * (p**n - 1))
        n += 1
    return HopfPresentation(p, tuple(degs), f"P({p})", frobenius_side="right")


# ---------------------------------------------------------------------------
# dual-basis arithmetic


class DualAlgebra:
    """The graded dual of the presented coalgebra, in the monomial basis."""

    def __init__(self, pres: HopfPresentation, t_max: int):
        if pres.p != 2:
            raise NotImplementedError("resolution arithmetic is bit-packed; p = 2 only")
        self.pres = pres
        self.t_max = t_max
        self._basis: dict[int, list[tuple]] = {}
        self._index: dict[int, dict[tuple, int]] = {}
        self._blocks: dict[tuple[int, int], dict] = {}
        self._frob_cops: dict[tuple[int, int], list] = {}

    def basis(self, d: int) -> list[tuple]:
        if d not in self._basis:
            if d < 0 or d > self.t_max:
                self._basis[d] = []
            else:
                out = sorted(self._monos(d), key=lambda m: m)
                self._basis[d] = out
            self._index[d] = {m: i for i, m in enumerate(self._basis[d])}
        return self._basis[d]

    def index(self, d: int) -> dict:
        self.basis(d)
        return self._index[d]

    def dim(self, d: int) -> int:
        return len(self.basis(d))

    def _monos(self, d: int, k: int = 0, prefix=()):
        degs = self.pres.degrees
        if d == 0:
            yield prefix + (0,) * (len(degs) - k)
            return
        if k >= len(degs):
            return
        for e in range(d // degs[k] + 1):
            yield from self._monos(d - e * degs[k], k + 1, prefix + (e,))

    def _frob_cop(self, n: int, k: int):
        """Coproduct of g_n^(2^k): Frobenius twist of the generator coproduct."""
        key = (n, k)
        if key not in self._frob_cops:
            terms = []
            for left, right in self.pres.coproduct(n):
                terms.append(
                    (
                        tuple(e * 2**k for e in left),
                        tuple(e * 2**k for e in right),
                    )
                )
            self._frob_cops[key] = terms
        return self._frob_cops[key]

    def mult_block(self, a: int, b: int) -> dict:
        """Products of dual-basis elements: {(ra, rb): [m, ...]} over F_2.

        (ra, rb) are monomials of degrees a and b; the listed m of degree
        a + b are the terms of the product (coefficient 1 each).
        """
        key = (a, b)
        if key not in self._blocks:
            prod: dict = {}
            for m in self.basis(a + b):
                for (ra, rb), parity in self._expand(m, a).items():
                    if parity:
                        prod.setdefault((ra, rb), []).append(m)
            self._blocks[key] = prod
        return self._blocks[key]

    def _expand(self, m: tuple, a_cap: int) -> dict:
        """Bidegree-(a_cap, *) component of Delta(g^m) over F_2."""
        pres = self.pres
        terms = {((0,) * len(m), (0,) * len(m)): 1}
        for n0, e in enumerate(m):
            k = 0
            ee = e
            while ee:
                if ee & 1:
                    cop = self._frob_cop(n0 + 1, k)
                    nxt: dict = {}
                    for (la, ra) in terms:
                        dla = pres.deg(la)
                        for left, right in cop:
                            nl = tuple(x + y for x, y in zip(la, left))
                            if pres.deg(nl) > a_cap:
                                continue
                            nr = tuple(x + y for x, y in zip(ra, right))
                            kk = (nl, nr)
                            nxt[kk] = nxt.get(kk, 0) ^ terms[(la, ra)]
                    terms = {kk: v for kk, v in nxt.items() if v}
                ee >>= 1
                k += 1
        return {
            kk: v for kk, v in terms.items() if pres.deg(kk[0]) == a_cap
        }


# ---------------------------------------------------------------------------
# the minimal resolution


@dataclass
class Generator:
    s: int
    index: int  # index within F_s
    degree: int
    image: list  # d(g): list of (monomial, generator-index in F_{s-1})


class MinimalResolution:
    """Minimal resolution of F_2 over the dual algebra of a presentation.

    Generators are admitted lowest internal degree first (then by kernel
    echelon order), so names g(s, k) are deterministic.
    """

    def __init__(self, pres: HopfPresentation, s_max: int, t_max: int):
        self.algebra = DualAlgebra(pres, t_max)
        self.pres = pres
        self.s_max = s_max
        self.t_max = t_max
        self.gens: list[list[Generator]] = [[Generator(0, 0, 0, [])]]
        self._built_t = -1
        self._kernel_cache: dict = {}

    # module basis of F_s in degree t: pairs (monomial, generator)
    def module_basis(self, s: int, t: int):
        if s >= len(self.gens):
            return []
        out = []
        for g in self.gens[s]:
            if g.degree > t:
                continue
            for m in self.algebra.basis(t - g.degree):
                out.append((m, g.index))
        return out

    def build(self, t_upto: int | None = None):
        """Extend the resolution through internal degree t_upto."""
        t_upto = self.t_max if t_upto is None else min(t_upto, self.t_max)
        step = 1 if self.pres.degrees[0] % 2 else 2
        for t in range(self._built_t + 1, t_upto + 1):
            if t % step:
                continue
            for s in range(1, self.s_max + 1):
                self._process(s, t)
        self._built_t = t_upto

    def _process(self, s: int, t: int):
        while len(self.gens) <= s:
            self.gens.append([])
        # basis and index of F_{s-1} in degree t
        below = self.module_basis(s - 1, t)
        bidx = {bg: k for k, bg in enumerate(below)}
        # kernel of d_{s-1} in degree t (for s = 1: the whole positive part)
        if s == 1:
            kernel_rows = [1 << k for k in range(len(below))] if t > 0 else []
        else:
            kernel_rows = self._kernel(s - 1, t, below, bidx)
        # image of d_s from generators of lower degree
        ech = BitEchelon()
        for g in self.gens[s]:
            if g.degree >= t:
                continue
            a = t - g.degree
            for b_mono in self.algebra.basis(a):
                vec = self._act_image(b_mono, g, bidx)
                ech.add(vec)
        # adjoin new generators for the unreached kernel
        for vec in kernel_rows:
            res = ech.add(vec)
            if res is None:
                continue
            image = self._unpack(vec, below)
            gi = Generator(s, len(self.gens[s]), t, image)
            self.gens[s].append(gi)

    def _act_image(self, b_mono: tuple, g: Generator, bidx: dict) -> int:
        """Image d_s(b * g) = b * d_s(g), packed over the F_{s-1} basis."""
        alg = self.algebra
        a = alg.pres.deg(b_mono)
        vec = 0
        for m, gi in g.image:
            block = alg.mult_block(a, alg.pres.deg(m))
            for mm in block.get((b_mono, m), ()):
                vec ^= 1 << bidx[(mm, gi)]
        return vec

    def _kernel(self, s: int, t: int, below, bidx) -> list[int]:
        """Kernel of d_s: F_s^t -> F_{s-1}^t, packed over the F_s^t basis."""
        key = (s, t)
        if key in self._kernel_cache:
            return self._kernel_cache[key]
        basis_here = self.module_basis(s, t)
        tgt = self.module_basis(s - 1, t)
        tidx = {bg: k for k, bg in enumerate(tgt)}
        ech = BitEchelon(track=True)
        for k, (m, gi) in enumerate(basis_here):
            g = self.gens[s][gi]
            vec = self._act_image(m, g, tidx)
            ech.add(vec, 1 << k)
        kernel = list(ech.null_tags)
        self._kernel_cache[key] = kernel
        return kernel

    def _unpack(self, vec: int, basis):
        out = []
        k = 0
        while vec:
            if vec & 1:
                m, gi = basis[k]
                out.append((m, gi))
            vec >>= 1
            k += 1
        return out

    # -- Ext data ------------------------------------------------------------

    def ext_dim(self, s: int, t: int) -> int:
        """dim Ext^{s,t}(F_2, F_2) = number of generators of F_s in degree t."""
        if s == 0:
            return 1 if t == 0 else 0
        if s >= len(self.gens):
            return 0
        return sum(1 for g in self.gens[s] if g.degree == t)

    def ext_chart(self, stem_max: int, s_cap: int | None = None):
        """Dot counts per (stem, filtration) for stems <= stem_max."""
        out: dict[tuple[int, int], int] = {}
        s_cap = self.s_max if s_cap is None else s_cap
        for s in range(0, s_cap + 1):
            for t in range(0, self._built_t + 1):
                d = self.ext_dim(s, t)
                if d and 0 <= t - s <= stem_max:
                    out[(t - s, s)] = out.get((t - s, s), 0) + d
        return out

    def product_by_h(self, j: int, s: int, t: int):
        """Matrix of multiplication by h_j: Ext^{s,t} -> Ext^{s+1, t + 2^j}.

        In a minimal resolution the h_j-component of a product is the
        coefficient of (the dual of g_1^{2^j}) in the differential: entry
        (k, l) is that coefficient of generator g(s, k) inside d(g(s+1, l)).
        """
        h_mono = tuple(
            2**j if i == 0 else 0 for i in range(len(self.pres.degrees))
        )
        src = [g for g in self.gens[s] if g.degree == t] if s < len(self.gens) else []
        t2 = t + self.pres.degrees[0] * 2**j
        tgt = (
            [g for g in self.gens[s + 1] if g.degree == t2]
            if s + 1 < len(self.gens)
            else []
        )
        mat = [[0] * len(tgt) for _ in src]
        src_pos = {g.index: k for k, g in enumerate(src)}
        for l, G in enumerate(tgt):
            for m, gi in G.image:
                if m == h_mono and gi in src_pos:
                    mat[src_pos[gi]][l] ^= 1
        return mat


# ---------------------------------------------------------------------------
# Ext with coefficients in a weight piece of Q = F_p[q_0, q_1, ...]


class QWeightModule:
    """Weight-i piece of Q as a module over the dual of P.

    Basis in degree d: monomials in q_1.. of degree d and weight <= i (the
    q_0-power makes up the weight).  The action of a dual-basis element a
    is <a, tbar-part> against the coaction psi(q-monomial).
    """

    def __init__(self, pres: HopfPresentation, i: int, t_max: int):
        self.pres = pres
        self.i = i
        self.t_max = t_max
        self.p = pres.p
        self._basis: dict[int, list] = {}
        self._psi: dict[tuple, dict] = {}

    def basis(self, d: int):
        if d not in self._basis:
            out = []
            if 0 <= d <= self.t_max and d % 2 == 0:
                for m in self._monos(d):
                    if sum(m) <= self.i:
                        out.append(m)
            self._basis[d] = sorted(out)
        return self._basis[d]

    def _monos(self, d: int, k: int = 0, prefix=()):
        degs = self.pres.degrees
        if d == 0:
            yield prefix + (0,) * (len(degs) - k)
            return
        if k >= len(degs):
            return
        for e in range(d // degs[k] + 1):
            yield from self._monos(d - e * degs[k], k + 1, prefix + (e,))

    def psi(self, mono: tuple) -> dict:
        """Coaction on q_0^(i-|mono|) q^mono: {(mono', tbar-mono): coeff}.

        psi(q_n) = sum_k q_k (x) tbar_{n-k}^{p^k} with q_0 primitive; only
        the q_1.. part of the left side is recorded (weight bookkeeping is
        implicit).
        """
        if mono not in self._psi:
            p = self.p
            N = len(self.pres.degrees)
            out = {((0,) * N, (0,) * N): 1}
            for n0, e in enumerate(mono):
                for _ in range(e):
                    n = n0 + 1
                    nxt: dict = {}
                    for (qm, tm), c in out.items():
                        for k in range(n + 1):
                            jj = n - k
                            q2 = list(qm)
                            t2 = list(tm)
                            if k:
                                q2[k - 1] += 1
                            if jj:
                                t2[jj - 1] += p**k
                            kk = (tuple(q2), tuple(t2))
                            v = (nxt.get(kk, 0) + c) % p
                            if v:
                                nxt[kk] = v
                            elif kk in nxt:
                                del nxt[kk]
                    out = nxt
            self._psi[mono] = out
        return self._psi[mono]

    def act(self, a_mono: tuple, mono: tuple):
        """a * x for a dual-basis element a: list of target monomials (F_2)."""
        out = []
        for (qm, tm), c in self.psi(mono).items():
            if tm == a_mono and c % 2:
                out.append(qm)
        return out


def ext_dims(
    res: MinimalResolution, module: QWeightModule, s: int, t: int
) -> int:
    """dim Ext^{s,t}(F_2, module) from the Hom complex of the resolution."""
    alg = res.algebra

    def hom_basis(ss):
        out = []
        if ss >= len(res.gens):
            return out
        for g in res.gens[ss]:
            for m in module.basis(t - g.degree):
                out.append((g.index, m))
        return out

    def delta_matrix(ss):
        """Hom(F_ss, M) -> Hom(F_{ss+1}, M): (delta phi)(G) = phi(d G)."""
        src = hom_basis(ss)
        tgt = hom_basis(ss + 1)
        tidx = {x: l for l, x in enumerate(tgt)}
        rows = [0] * len(src)
        if ss + 1 >= len(res.gens):
            return rows, len(tgt)
        for k, (gi, m) in enumerate(src):
            vec = 0
            for G in res.gens[ss + 1]:
                for a_mono, gi2 in G.image:
                    if gi2 != gi:
                        continue
                    for qm in module.act(a_mono, m):
                        l = tidx.get((G.index, qm))
                        if l is not None:
                            vec ^= 1 << l
            rows[k] = vec
        return rows, len(tgt)

    rows_out, _ = delta_matrix(s)
    ech = BitEchelon(track=True)
    for k, vec in enumerate(rows_out):
        ech.add(vec, 1 << k)
    kernel_dim = len(ech.null_tags)
    if s == 0:
        return kernel_dim
    rows_in, _ = delta_matrix(s - 1)
    # image rank inside Hom(F_s, M)
    ech2 = BitEchelon()
    rank_in = 0
    for vec in rows_in:
        if ech2.add(vec) is not None:
            rank_in += 1
    return kernel_dim - rank_in
