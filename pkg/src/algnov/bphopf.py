"""The truncated Hopf algebroid of the Brown-Peterson spectrum at a prime p.

Coefficients BP_* = Z_(p)[v_1, v_2, ...] and cooperations BP_*BP =
BP_*[t_1, t_2, ...], with |v_n| = |t_n| = 2(p^n - 1), truncated to internal
degree <= t_max.  Generators are Hazewinkel's: with log coefficients m_0 = 1
and p * m_n = sum_{i<n} m_i v_{n-i}^{p^i}, the structure maps are determined
by

    eta_R(m_n) = sum_{i+j=n} m_i t_j^{p^i},
    sum_{i+j=n} m_i Delta(t_j)^{p^i}
        = sum_{i+j+k=n} m_i t_j^{p^i} (x) t_k^{p^{i+j}},
    sum_{i+j+k=n} m_i t_j^{p^i} c(t_k)^{p^{i+j}} = m_n.

All recursions run in exact rational arithmetic (denominators are p-powers);
every exported element is p-integral, which is asserted.

Element encodings (monomial dicts, coefficients Fraction internally / int on
export; exponent tuples have fixed length N):

* BP element:      {v_exponents: coeff}
* Gamma element:   {(v_exponents, t_exponents): coeff}          -- BP_*BP
* Gamma2 element:  {(v_exponents, t_left, t_right): coeff}      -- BP_*BP (x)_{BP_*} BP_*BP

In tensor products every v-coefficient is kept on the far left; moving a
coefficient leftward across a tensor factor is multiplication by eta_R of it
(`Gamma` is a BP_*-bimodule via eta_L and eta_R).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

__all__ = [
    "TruncationWindow",
    "StructureMaps",
    "IntegralityError",
    "log_coefficients",
    "right_unit",
    "coproduct",
    "conjugate",
    "gr_coaction",
    "mod_i_coproduct",
]


class IntegralityError(ArithmeticError):
    """A structure map failed to be p-integral after cancellation."""


class TruncationWindow:
    """Degree window: prime p, internal-degree cap t_max, precision K.

    N is the largest generator index with 2(p^N - 1) <= t_max.
    """

    __slots__ = ("p", "t_max", "K", "N", "v_degrees")

    def __init__(self, p: int, t_max: int, K: int = 1) -> None:
        if p < 2:
            raise ValueError(f"invalid prime {p}")
        if t_max < 0 or t_max % 2:
            raise ValueError(f"t_max must be even and >= 0, got {t_max}")
        if K < 1:
            raise ValueError(f"precision K must be >= 1, got {K}")
        self.p = p
        self.t_max = t_max
        self.K = K
        n = 0
        while 2 * (p ** (n + 1) - 1) <= t_max:
            n += 1
        self.N = n
        self.v_degrees = tuple(2 * (p**k - 1) for k in range(1, n + 1))

    def deg(self, expts: tuple[int, ...]) -> int:
        return sum(e * d for e, d in zip(expts, self.v_degrees))

    def zero_expts(self) -> tuple[int, ...]:
        return (0,) * self.N

    def unit_v(self, n: int) -> tuple[int, ...]:
        """Exponent tuple of v_n (or t_n)."""
        if not 1 <= n <= self.N:
            raise IndexError(f"generator index {n} outside window (N={self.N})")
        e = [0] * self.N
        e[n - 1] = 1
        return tuple(e)

    def __repr__(self) -> str:
        return f"TruncationWindow(p={self.p}, t_max={self.t_max}, K={self.K}, N={self.N})"

    def __eq__(self, other):
        return (
            isinstance(other, TruncationWindow)
            and (self.p, self.t_max, self.K) == (other.p, other.t_max, other.K)
        )

    def __hash__(self):
        return hash((self.p, self.t_max, self.K))


def _add_expts(a, b):
    return tuple(x + y for x, y in zip(a, b))


# -- polynomial helpers; every product truncates above t_max eagerly --------


def bp_mul(w: TruncationWindow, a: dict, b: dict) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        da = w.deg(ea)
        for eb, cb in b.items():
            if da + w.deg(eb) > w.t_max:
                continue
            e = _add_expts(ea, eb)
            c = out.get(e, 0) + ca * cb
            if c:
                out[e] = c
            elif e in out:
                del out[e]
    return out


def gam_deg(w: TruncationWindow, key) -> int:
    ev, et = key
    return w.deg(ev) + w.deg(et)


def gam_mul(w: TruncationWindow, a: dict, b: dict) -> dict:
    out: dict = {}
    for (va, ta), ca in a.items():
        da = w.deg(va) + w.deg(ta)
        for (vb, tb), cb in b.items():
            if da + w.deg(vb) + w.deg(tb) > w.t_max:
                continue
            key = (_add_expts(va, vb), _add_expts(ta, tb))
            c = out.get(key, 0) + ca * cb
            if c:
                out[key] = c
            elif key in out:
                del out[key]
    return out


def gam2_mul(w: TruncationWindow, a: dict, b: dict) -> dict:
    out: dict = {}
    for (va, la, ra), ca in a.items():
        da = w.deg(va) + w.deg(la) + w.deg(ra)
        for (vb, lb, rb), cb in b.items():
            if da + w.deg(vb) + w.deg(lb) + w.deg(rb) > w.t_max:
                continue
            key = (_add_expts(va, vb), _add_expts(la, lb), _add_expts(ra, rb))
            c = out.get(key, 0) + ca * cb
            if c:
                out[key] = c
            elif key in out:
                del out[key]
    return out


def _scale(elt: dict, c) -> dict:
    if c == 0:
        return {}
    return {k: v * c for k, v in elt.items()}


def _acc(out: dict, elt: dict, sign=1) -> None:
    for k, v in elt.items():
        c = out.get(k, 0) + sign * v
        if c:
            out[k] = c
        elif k in out:
            del out[k]


def _pow(w, mul, elt: dict, e: int, unit: dict) -> dict:
    out = unit
    for _ in range(e):
        out = mul(w, out, elt)
    return out


def _bp_to_gam(bp: dict, w: TruncationWindow) -> dict:
    z = w.zero_expts()
    return {(ev, z): c for ev, c in bp.items()}


def _assert_integral(elt: dict, what: str) -> dict:
    out = {}
    for k, c in elt.items():
        if isinstance(c, Fraction):
            if c.denominator != 1:
                raise IntegralityError(f"{what}: non-integral coefficient {c} at {k}")
            c = c.numerator
        out[k] = c
    return out


class StructureMaps:
    """Memoized structure-map table for one truncation window.

    Construction computes nothing; each map is computed on first use and
    cached.  The table is immutable from the caller's perspective and safe
    to share between threads.
    """

    def __init__(self, window: TruncationWindow) -> None:
        self.w = window
        self._m: list[dict] | None = None
        self._eta_v: dict[int, dict] = {}
        self._eta_mono: dict[tuple, dict] = {}
        self._cop_t: dict[int, dict] = {}
        self._cop_mono: dict[tuple, dict] = {}
        self._conj_t: dict[int, dict] = {}

    # -- log coefficients ---------------------------------------------------

    def log_coefficients(self) -> list[dict]:
        """m_0 .. m_N as rational BP polynomials (Hazewinkel recursion)."""
        if self._m is None:
            w = self.w
            m: list[dict] = [{w.zero_expts(): Fraction(1)}]
            for n in range(1, w.N + 1):
                acc: dict = {}
                for i in range(n):
                    v_pow = _pow(
                        w,
                        bp_mul,
                        {w.unit_v(n - i): Fraction(1)},
                        w.p**i,
                        {w.zero_expts(): Fraction(1)},
                    )
                    _acc(acc, bp_mul(w, m[i], v_pow))
                m.append(_scale(acc, Fraction(1, w.p)))
            self._m = m
        return self._m

    def _eta_r_m(self, k: int) -> dict:
        """eta_R(m_k) = sum_{i+j=k} m_i t_j^{p^i}, as a rational Gamma element."""
        w = self.w
        m = self.log_coefficients()
        out: dict = {}
        for i in range(k + 1):
            j = k - i
            if j == 0:
                t_pow = {(w.zero_expts(), w.zero_expts()): Fraction(1)}
            else:
                t_pow = _pow(
                    w,
                    gam_mul,
                    {(w.zero_expts(), w.unit_v(j)): Fraction(1)},
                    w.p**i,
                    {(w.zero_expts(), w.zero_expts()): Fraction(1)},
                )
            _acc(out, gam_mul(w, _bp_to_gam(m[i], w), t_pow))
        return out

    # -- right unit ----------------------------------------------------------

    def right_unit(self, n: int) -> dict:
        """eta_R(v_n) as a p-integral Gamma element."""
        if n == 0:
            return {(self.w.zero_expts(), self.w.zero_expts()): 1}
        if n not in self._eta_v:
            w = self.w
            if not 1 <= n <= w.N:
                raise IndexError(f"generator index {n} outside window (N={w.N})")
            # solve p*eta_R(m_n) = sum_{i<n} eta_R(m_i) eta_R(v_{n-i})^{p^i}
            acc = _scale(self._eta_r_m(n), Fraction(w.p))
            for i in range(1, n):
                ev_pow = _pow(
                    w,
                    gam_mul,
                    self._right_unit_rational(n - i),
                    w.p**i,
                    {(w.zero_expts(), w.zero_expts()): Fraction(1)},
                )
                _acc(acc, gam_mul(w, self._eta_r_m(i), ev_pow), -1)
            self._eta_v[n] = _assert_integral(acc, f"eta_R(v_{n})")
        return self._eta_v[n]

    def _right_unit_rational(self, n: int) -> dict:
        return {k: Fraction(c) for k, c in self.right_unit(n).items()}

    def right_unit_mono(self, alpha: tuple[int, ...]) -> dict:
        """eta_R(v^alpha), multiplicative on monomials, memoized."""
        if alpha not in self._eta_mono:
            w = self.w
            out = {(w.zero_expts(), w.zero_expts()): 1}
            for idx, e in enumerate(alpha):
                if e:
                    out = gam_mul(w, out, _pow(
                        w, gam_mul, self.right_unit(idx + 1), e,
                        {(w.zero_expts(), w.zero_expts()): 1},
                    ))
            self._eta_mono[alpha] = out
        return self._eta_mono[alpha]

    # -- coproduct -----------------------------------------------------------

    def coproduct(self, n: int) -> dict:
        """Delta(t_n) as a p-integral Gamma2 element (t_0 = 1)."""
        w = self.w
        if n == 0:
            return {(w.zero_expts(), w.zero_expts(), w.zero_expts()): 1}
        if n not in self._cop_t:
            if not 1 <= n <= w.N:
                raise IndexError(f"generator index {n} outside window (N={w.N})")
            m = self.log_coefficients()
            unit2 = {(w.zero_expts(), w.zero_expts(), w.zero_expts()): Fraction(1)}
            acc: dict = {}
            for i in range(n + 1):
                for j in range(n + 1 - i):
                    k = n - i - j
                    term = {
                        (ev, w.zero_expts(), w.zero_expts()): c for ev, c in m[i].items()
                    }
                    if j:
                        tj = _pow(
                            w, gam2_mul,
                            {(w.zero_expts(), w.unit_v(j), w.zero_expts()): Fraction(1)},
                            w.p**i, unit2,
                        )
                        term = gam2_mul(w, term, tj)
                    if k:
                        tk = _pow(
                            w, gam2_mul,
                            {(w.zero_expts(), w.zero_expts(), w.unit_v(k)): Fraction(1)},
                            w.p ** (i + j), unit2,
                        )
                        term = gam2_mul(w, term, tk)
                    _acc(acc, term)
            for i in range(1, n + 1):
                cop_pow = _pow(
                    w, gam2_mul, self._coproduct_rational(n - i), w.p**i, unit2
                )
                mi = {(ev, w.zero_expts(), w.zero_expts()): c for ev, c in m[i].items()}
                _acc(acc, gam2_mul(w, mi, cop_pow), -1)
            self._cop_t[n] = _assert_integral(acc, f"Delta(t_{n})")
        return self._cop_t[n]

    def _coproduct_rational(self, n: int) -> dict:
        return {k: Fraction(c) for k, c in self.coproduct(n).items()}

    def coproduct_mono(self, beta: tuple[int, ...]) -> dict:
        """Delta(t^beta), multiplicative, memoized."""
        if beta not in self._cop_mono:
            w = self.w
            out = {(w.zero_expts(), w.zero_expts(), w.zero_expts()): 1}
            for idx, e in enumerate(beta):
                if e:
                    out = gam2_mul(w, out, _pow(
                        w, gam2_mul, self.coproduct(idx + 1), e,
                        {(w.zero_expts(), w.zero_expts(), w.zero_expts()): 1},
                    ))
            self._cop_mono[beta] = out
        return self._cop_mono[beta]

    # -- conjugation ---------------------------------------------------------

    def conjugate(self, n: int) -> dict:
        """c(t_n), from sum_{i+j+k=n} m_i t_j^{p^i} c(t_k)^{p^{i+j}} = m_n."""
        w = self.w
        if n == 0:
            return {(w.zero_expts(), w.zero_expts()): 1}
        if n not in self._conj_t:
            if not 1 <= n <= w.N:
                raise IndexError(f"generator index {n} outside window (N={w.N})")
            m = self.log_coefficients()
            unit = {(w.zero_expts(), w.zero_expts()): Fraction(1)}
            acc = {(ev, w.zero_expts()): c for ev, c in m[n].items()}
            for i in range(n + 1):
                for j in range(n + 1 - i):
                    k = n - i - j
                    if (i, j, k) == (0, 0, n):
                        continue
                    term = _bp_to_gam(m[i], w)
                    if j:
                        term = gam_mul(w, term, _pow(
                            w, gam_mul,
                            {(w.zero_expts(), w.unit_v(j)): Fraction(1)},
                            w.p**i, unit,
                        ))
                    if k:
                        term = gam_mul(w, term, _pow(
                            w, gam_mul, self._conjugate_rational(k), w.p ** (i + j), unit
                        ))
                    _acc(acc, term, -1)
            self._conj_t[n] = _assert_integral(acc, f"c(t_{n})")
        return self._conj_t[n]

    def _conjugate_rational(self, n: int) -> dict:
        return {k: Fraction(c) for k, c in self.conjugate(n).items()}

    # -- counit and Delta on Gamma -------------------------------------------

    def counit(self, gam: dict) -> dict:
        """epsilon: BP_*BP -> BP_*, killing the t's."""
        z = self.w.zero_expts()
        return {ev: c for (ev, et), c in gam.items() if et == z}

    def coproduct_gamma(self, gam: dict) -> dict:
        """Delta extended to Gamma: Delta(v^a t^b) = v^a * Delta(t)^b."""
        w = self.w
        out: dict = {}
        for (ev, et), c in gam.items():
            term = self.coproduct_mono(et)
            _acc(out, {
                ((_add_expts(ev, tv)), tl, tr): c * cc
                for (tv, tl, tr), cc in term.items()
                if w.deg(_add_expts(ev, tv)) + w.deg(tl) + w.deg(tr) <= w.t_max
            })
        return out

    def tensor_right(self, gam: dict) -> dict:
        """1 (x) x in Gamma2: slides v-coefficients left through eta_R."""
        w = self.w
        out: dict = {}
        for (ev, et), c in gam.items():
            if any(ev):
                moved = self.right_unit_mono(ev)
                _acc(out, {
                    (mv, mt, et): c * cc
                    for (mv, mt), cc in moved.items()
                    if w.deg(mv) + w.deg(mt) + w.deg(et) <= w.t_max
                })
            else:
                _acc(out, {(ev, w.zero_expts(), et): c})
        return out

    # -- associated graded ----------------------------------------------------

    def gr_coaction(self, n: int) -> dict:
        """Coaction of P = BP_*BP/I on q_n in gr BP_* = F_p[q_0, q_1, ...].

        Computed by reducing eta_R(v_n) modulo I^2 (q_0 is the class of p).
        Returns {(k, t_expts): 1} meaning the term q_k (x) t-bar^expts; the
        result must match sum_i q_i (x) t-bar_{n-i}^{p^i}, which callers test.
        """
        w = self.w
        if n == 0:
            return {(0, w.zero_expts()): 1}
        eta = self.right_unit(n)
        out: dict = {}
        for (ev, et), c in eta.items():
            vp = _pval_int(c, w.p)
            weight = vp + sum(ev)
            if weight < 1:
                raise IntegralityError(
                    f"eta_R(v_{n}) has an I-weight-0 term {c}*v^{ev}t^{et}: "
                    "I is not invariant, upstream bug"
                )
            if weight > 1:
                continue
            # weight exactly 1: either c = p*unit and ev = 0 (gives q_0), or
            # unit coefficient with a single v_k (gives q_k)
            if vp == 1:
                k = 0
                unit = c // w.p
            else:
                k = next(i + 1 for i, e in enumerate(ev) if e)
                unit = c
            key = (k, et)
            coeff = (out.get(key, 0) + unit) % w.p
            if coeff:
                out[key] = coeff
            elif key in out:
                del out[key]
        return out

    def mod_i_coproduct(self, n: int) -> dict:
        """Delta(t_n) reduced mod I: {(t_left, t_right): coeff in F_p}."""
        w = self.w
        if n == 0:
            return {(w.zero_expts(), w.zero_expts()): 1}
        out: dict = {}
        for (ev, tl, tr), c in self.coproduct(n).items():
            if any(ev) or c % w.p == 0:
                continue
            key = (tl, tr)
            coeff = (out.get(key, 0) + c) % w.p
            if coeff:
                out[key] = coeff
            elif key in out:
                del out[key]
        return out


def _pval_int(c: int, p: int) -> int:
    c = abs(int(c))
    if c == 0:
        return 10**9
    v = 0
    while c % p == 0:
        c //= p
        v += 1
    return v


@lru_cache(maxsize=None)
def structure_maps(p: int, t_max: int, K: int = 1) -> StructureMaps:
    """Shared per-window structure-map table."""
    return StructureMaps(TruncationWindow(p, t_max, K))


# -- module-level operation wrappers ----------------------------------------


def log_coefficients(w: TruncationWindow) -> list[dict]:
    return StructureMaps(w).log_coefficients()


def right_unit(n: int, w: TruncationWindow) -> dict:
    return StructureMaps(w).right_unit(n)


def coproduct(n: int, w: TruncationWindow) -> dict:
    return StructureMaps(w).coproduct(n)


def conjugate(n: int, w: TruncationWindow) -> dict:
    return StructureMaps(w).conjugate(n)


def gr_coaction(n: int, w: TruncationWindow) -> dict:
    return StructureMaps(w).gr_coaction(n)


def mod_i_coproduct(n: int, w: TruncationWindow) -> dict:
    return StructureMaps(w).mod_i_coproduct(n)
