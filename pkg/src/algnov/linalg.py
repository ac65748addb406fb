"""Exact linear algebra over Z/p^K.

Row-vector convention throughout: a matrix M with shape (rows, cols) acts on
row vectors by x @ M, and the row span of M is the submodule it generates.
K = 1 gives the field case F_p.

The canonical row-span form is the Howell form: two matrices over Z/p^K have
equal row spans iff their Howell forms are identical, and membership in a row
span is decided by reduction against the Howell rows.  Smith-style
diagonalization is used only inside :func:`homology`, which needs cyclic
factors rather than span data.

Pivot selection is deterministic (lowest column first, then lowest row
index), so all outputs are reproducible.

A separate bit-packed representation (:class:`BitEchelon`) handles the large
GF(2) eliminations of the associated-graded complexes; rows are Python ints,
which keeps XOR at machine speed without a dense array footprint.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ModPkMatrix",
    "SubmoduleBasis",
    "normal_form",
    "kernel_basis",
    "solve",
    "homology",
    "smith_exponents",
    "BitEchelon",
    "bit_rank",
    "dump_matrix",
    "load_matrix",
]


def _pval(x: int, p: int, K: int) -> int:
    """p-adic valuation of x mod p^K; val(0) = K."""
    if x == 0:
        return K
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


class ModPkMatrix:
    """Immutable matrix over Z/p^K (F_p when K = 1).

    Entries are stored as a dense numpy int64 array with values in [0, p^K).
    p^K must stay below 2^31 so products of two entries fit in int64.
    """

    __slots__ = ("p", "K", "rows", "cols", "data", "modulus")

    def __init__(self, p: int, K: int, data) -> None:
        if p < 2:
            raise ValueError(f"prime must be >= 2, got {p}")
        if K < 1:
            raise ValueError(f"precision must be >= 1, got {K}")
        if p**K > 2**31:
            raise ValueError(f"p^K = {p}^{K} too large for exact int64 arithmetic")
        self.p = p
        self.K = K
        self.modulus = p**K
        arr = np.asarray(data, dtype=np.int64)
        if arr.ndim != 2:
            arr = arr.reshape(arr.shape[0] if arr.size else 0, -1)
        arr = np.mod(arr, self.modulus)
        arr.setflags(write=False)
        self.data = arr
        self.rows, self.cols = arr.shape

    @classmethod
    def zeros(cls, p: int, K: int, rows: int, cols: int) -> "ModPkMatrix":
        return cls(p, K, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, p: int, K: int, n: int) -> "ModPkMatrix":
        return cls(p, K, np.eye(n, dtype=np.int64))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ModPkMatrix)
            and self.p == other.p
            and self.K == other.K
            and self.data.shape == other.data.shape
            and bool(np.array_equal(self.data, other.data))
        )

    def __hash__(self):
        return hash((self.p, self.K, self.data.tobytes(), self.cols))

    def __repr__(self) -> str:
        return f"ModPkMatrix(p={self.p}, K={self.K}, {self.rows}x{self.cols})"

    def matmul(self, other: "ModPkMatrix") -> "ModPkMatrix":
        self._check_ring(other)
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        return ModPkMatrix(self.p, self.K, _matmul_mod(self.data, other.data, self.modulus))

    def apply_row(self, x: np.ndarray) -> np.ndarray:
        """x @ M for a single row vector, reduced mod p^K."""
        if len(x) != self.rows:
            raise ValueError(f"vector length {len(x)} != rows {self.rows}")
        return _matmul_mod(np.asarray(x, dtype=np.int64).reshape(1, -1), self.data, self.modulus)[0]

    def is_zero(self) -> bool:
        return not self.data.any()

    def _check_ring(self, other: "ModPkMatrix") -> None:
        if self.p != other.p or self.K != other.K:
            raise ValueError("mixed rings: %r vs %r" % (self, other))


def _matmul_mod(a: np.ndarray, b: np.ndarray, m: int) -> np.ndarray:
    # Block the inner dimension so accumulated sums stay below 2^63.
    # Each product is < m^2 <= 2^62; chunk of c terms needs c * m^2 < 2^63.
    if a.size == 0 or b.size == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    chunk = max(1, (2**62) // (m * m))
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for lo in range(0, a.shape[1], chunk):
        hi = min(lo + chunk, a.shape[1])
        out = (out + a[:, lo:hi] @ b[lo:hi, :]) % m
    return out


@dataclass(frozen=True)
class SubmoduleBasis:
    """Canonical (Howell) generators of a submodule of (Z/p^K)^ambient.

    ``gens`` rows are the Howell form of the submodule, so two equal
    submodules produce identical objects and membership is decidable by
    :meth:`reduce`.
    """

    p: int
    K: int
    ambient: int
    gens: ModPkMatrix

    @property
    def n_gens(self) -> int:
        return self.gens.rows

    def log_size(self) -> int:
        """log_p of the number of elements in the submodule."""
        K = self.K
        total = 0
        for j in range(self.gens.rows):
            row = self.gens.data[j]
            c = int(np.nonzero(row)[0][0])
            total += K - _pval(int(row[c]), self.p, K)
        return total

    def reduce(self, x) -> np.ndarray:
        """Canonical representative of x modulo the submodule."""
        return _reduce_row(np.asarray(x, dtype=np.int64) % self.gens.modulus, self.gens)

    def contains(self, x) -> bool:
        return not self.reduce(x).any()


# ---------------------------------------------------------------------------
# Howell form


def _howell_once(work: list[np.ndarray], p: int, K: int, cols: int, m: int):
    """One echelon pass; returns (pivot rows, pivot cols, pivot vals)."""
    rows = [r for r in work if r.any()]
    pivots: list[tuple[int, int, np.ndarray]] = []  # (col, val, row)
    for col in range(cols):
        best = None
        for idx, r in enumerate(rows):
            e = int(r[col])
            if e == 0:
                continue
            v = _pval(e, p, K)
            if best is None or v < best[0]:
                best = (v, idx)
        if best is None:
            continue
        v, idx = best
        prow = rows.pop(idx)
        # normalize: unit part of the pivot becomes 1
        u = int(prow[col]) // p**v
        prow = (prow * pow(u, -1, m)) % m
        nxt = []
        for r in rows:
            e = int(r[col])
            if e:
                q = e // p**v
                r = (r - q * prow) % m
            if r.any():
                nxt.append(r)
        rows = nxt
        pivots.append((col, v, prow))
    return pivots


def _howell_rows(rows_in: list[np.ndarray], p: int, K: int, cols: int) -> list[np.ndarray]:
    """Howell form rows (sorted by pivot column) of the span of rows_in."""
    m = p**K
    work = [r.copy() % m for r in rows_in]
    while True:
        pivots = _howell_once(work, p, K, cols, m)
        # closure: p^(K-v) * pivot row must lie in the span of the rows below
        extra = []
        piv_rows = [pr for _, _, pr in pivots]
        for col, v, prow in pivots:
            if v == 0:
                continue
            cand = (prow * p ** (K - v)) % m
            rem = _reduce_against(cand, pivots, p, K, m)
            if rem.any():
                extra.append(rem)
        if not extra:
            work = piv_rows
            break
        work = piv_rows + extra
    # canonical reduction: clear entries above each pivot down to [0, p^v)
    pivots = _howell_once(work, p, K, cols, m)
    pivots.sort(key=lambda t: t[0])
    out = [pr for _, _, pr in pivots]
    for i in range(len(pivots)):
        col, v, _ = pivots[i]
        pv = p**v
        for j in range(i):
            e = int(out[j][col])
            if e >= pv:
                out[j] = (out[j] - (e // pv) * out[i]) % m
    return out


def _reduce_against(x: np.ndarray, pivots, p: int, K: int, m: int) -> np.ndarray:
    r = x.copy()
    for col, v, prow in pivots:
        e = int(r[col])
        if e:
            q = e // p**v
            if q:
                r = (r - q * prow) % m
    return r


def _reduce_row(x: np.ndarray, H: ModPkMatrix) -> np.ndarray:
    """Reduce x against Howell rows H (pivot-sorted)."""
    p, K, m = H.p, H.K, H.modulus
    r = x.copy()
    for j in range(H.rows):
        row = H.data[j]
        nz = np.nonzero(row)[0]
        col = int(nz[0])
        v = _pval(int(row[col]), p, K)
        e = int(r[col])
        if e:
            q = e // p**v
            if q:
                r = (r - q * row) % m
    return r


def normal_form(M: ModPkMatrix) -> tuple[ModPkMatrix, ModPkMatrix]:
    """Canonical row-span (Howell) form of M with a transformation record.

    Returns (H, U) where H is the Howell form and U @ M == H, so normal-form
    rows are explicit combinations of the original rows.  Row spans are equal
    iff Howell forms are equal.
    """
    p, K, cols = M.p, M.K, M.cols
    # track transforms by augmenting with an identity block
    aug = np.hstack([M.data, np.eye(M.rows, dtype=np.int64)]) if M.rows else np.zeros((0, cols + M.rows), dtype=np.int64)
    rows = [aug[i].copy() for i in range(M.rows)]
    # Howell on the M-part only: pivot search restricted to the first `cols`
    # columns; the augmented tail just comes along for the ride.
    out = _howell_rows_augmented(rows, p, K, cols)
    H = ModPkMatrix(p, K, np.array([r[:cols] for r in out], dtype=np.int64).reshape(len(out), cols))
    U = ModPkMatrix(p, K, np.array([r[cols:] for r in out], dtype=np.int64).reshape(len(out), M.rows))
    return H, U


def _howell_rows_augmented(rows_in: list[np.ndarray], p: int, K: int, cols: int) -> list[np.ndarray]:
    """Howell pass where only the first `cols` columns count for pivots.

    Rows whose leading `cols` entries vanish are dropped (they record trivial
    combinations).
    """
    m = p**K
    work = [r.copy() % m for r in rows_in]
    while True:
        pivots = _howell_once_part(work, p, K, cols, m)
        extra = []
        for col, v, prow in pivots:
            if v == 0:
                continue
            cand = (prow * p ** (K - v)) % m
            rem = _reduce_against(cand, pivots, p, K, m)
            if rem[:cols].any():
                extra.append(rem)
        if not extra:
            work = [pr for _, _, pr in pivots]
            break
        work = [pr for _, _, pr in pivots] + extra
    pivots = _howell_once_part(work, p, K, cols, m)
    pivots.sort(key=lambda t: t[0])
    out = [pr for _, _, pr in pivots]
    for i in range(len(pivots)):
        col, v, _ = pivots[i]
        pv = p**v
        for j in range(i):
            e = int(out[j][col])
            if e >= pv:
                out[j] = (out[j] - (e // pv) * out[i]) % m
    return out


def _howell_once_part(work: list[np.ndarray], p: int, K: int, cols: int, m: int):
    rows = [r for r in work if r[:cols].any()]
    pivots = []
    for col in range(cols):
        best = None
        for idx, r in enumerate(rows):
            e = int(r[col])
            if e == 0:
                continue
            v = _pval(e, p, K)
            if best is None or v < best[0]:
                best = (v, idx)
        if best is None:
            continue
        v, idx = best
        prow = rows.pop(idx)
        u = int(prow[col]) // p**v
        prow = (prow * pow(u, -1, m)) % m
        nxt = []
        for r in rows:
            e = int(r[col])
            if e:
                q = e // p**v
                r = (r - q * prow) % m
            if r[:cols].any():
                nxt.append(r)
        rows = nxt
        pivots.append((col, v, prow))
    return pivots


def kernel_basis(M: ModPkMatrix) -> SubmoduleBasis:
    """Howell basis of {x : x @ M = 0}.

    Works on the graph [M | I]: Howell rows whose M-part vanishes have their
    identity-part spanning the kernel exactly.
    """
    p, K, m = M.p, M.K, M.modulus
    n = M.rows
    aug = np.hstack([M.data, np.eye(n, dtype=np.int64)]) if n else np.zeros((0, M.cols), dtype=np.int64)
    rows = [aug[i].copy() for i in range(n)]
    out = _howell_rows(rows, p, K, M.cols + n)
    ker = [r[M.cols :] for r in out if not r[: M.cols].any()]
    gens = np.array(ker, dtype=np.int64).reshape(len(ker), n)
    # re-normalize the projection: Howell of the extracted block
    ker_rows = _howell_rows([gens[i] for i in range(len(ker))], p, K, n)
    gens = np.array(ker_rows, dtype=np.int64).reshape(len(ker_rows), n)
    H = ModPkMatrix(p, K, gens)
    for j in range(H.rows):  # contract: generators multiply to zero exactly
        if M.apply_row(H.data[j]).any():
            raise AssertionError("kernel generator fails x @ M = 0")
    return SubmoduleBasis(p, K, n, H)


def solve(M: ModPkMatrix, b) -> np.ndarray | None:
    """A solution x of x @ M = b, or None if none exists.

    Deterministic: the Howell reduction picks a canonical solution.
    """
    b = np.asarray(b, dtype=np.int64) % M.modulus
    if b.shape != (M.cols,):
        raise ValueError(f"rhs length {b.shape} != cols {M.cols}")
    p, K, m = M.p, M.K, M.modulus
    H, U = normal_form(M)
    r = b.copy()
    x = np.zeros(M.rows, dtype=np.int64)
    for j in range(H.rows):
        row = H.data[j]
        nz = np.nonzero(row)[0]
        col = int(nz[0])
        v = _pval(int(row[col]), p, K)
        e = int(r[col])
        if e:
            q = e // p**v
            if q:
                r = (r - q * row) % m
                x = (x + q * U.data[j]) % m
    if r.any():
        return None
    return x


def span_contains(M: ModPkMatrix, x) -> bool:
    """True iff x lies in the row span of M."""
    return solve(M, x) is not None


# ---------------------------------------------------------------------------
# homology via Smith exponents


def smith_exponents(M: ModPkMatrix) -> list[int]:
    """Diagonal p-exponents of the Smith form of M over Z/p^K.

    Only the exponents are produced (no transforms); entries with exponent
    >= K are dropped since p^K = 0.
    """
    p, K, m = M.p, M.K, M.modulus
    a = M.data.copy()
    exps: list[int] = []
    r0, c0 = 0, 0
    rows, cols = a.shape
    while r0 < rows and c0 < cols:
        sub = a[r0:, c0:]
        nz = np.nonzero(sub)
        if len(nz[0]) == 0:
            break
        # entry of minimal valuation, lowest (row, col) to break ties
        vals = np.array([_pval(int(sub[i, j]), p, K) for i, j in zip(*nz)])
        k = int(np.lexsort((nz[1], nz[0], vals))[0])
        i, j = int(nz[0][k]) + r0, int(nz[1][k]) + c0
        v = int(vals[k])
        a[[r0, i], :] = a[[i, r0], :]
        a[:, [c0, j]] = a[:, [j, c0]]
        u = int(a[r0, c0]) // p**v
        a[r0, :] = (a[r0, :] * pow(u, -1, m)) % m
        for i2 in range(r0 + 1, rows):
            e = int(a[i2, c0])
            if e:
                a[i2, :] = (a[i2, :] - (e // p**v) * a[r0, :]) % m
        for j2 in range(c0 + 1, cols):
            e = int(a[r0, j2])
            if e:
                a[:, j2] = (a[:, j2] - (e // p**v) * a[:, c0]) % m
        exps.append(v)
        r0 += 1
        c0 += 1
    return [e for e in exps if e < K]


class CompositionError(ValueError):
    """d_in followed by d_out is not zero: upstream differential bug."""


def homology(d_in: ModPkMatrix, d_out: ModPkMatrix) -> list[int]:
    """Cyclic factor exponents of ker(d_out) / im(d_in).

    The complex is C_in --d_in--> C_mid --d_out--> C_out in row convention,
    so the precondition is d_in @ d_out = 0.  Returns the multiset {e_i}
    with the homology isomorphic to the direct sum of Z/p^min(e_i, K);
    factors are reported with exponent min(e_i, K) and sorted descending.
    """
    d_in._check_ring(d_out)
    if d_in.cols != d_out.rows:
        raise ValueError("middle dimensions differ")
    if not d_in.matmul(d_out).is_zero():
        raise CompositionError("d_in @ d_out != 0")
    p, K = d_in.p, d_in.K
    ker = kernel_basis(d_out)
    G = ker.gens
    mgen = G.rows
    if mgen == 0:
        return []
    im_rows = _howell_rows([d_in.data[i].copy() for i in range(d_in.rows)], p, K, d_in.cols)
    stacked = np.vstack([G.data] + [r.reshape(1, -1) for r in im_rows]) if im_rows else G.data
    S = ModPkMatrix(p, K, stacked)
    rel = kernel_basis(S)  # relations among [G; im-rows]
    R = rel.gens.data[:, :mgen] if rel.gens.rows else np.zeros((0, mgen), dtype=np.int64)
    exps = smith_exponents(ModPkMatrix(p, K, R.reshape(-1, mgen)))
    factors = [min(e, K) for e in exps if e > 0]
    factors += [K] * (mgen - len(exps))
    return sorted(factors, reverse=True)


# ---------------------------------------------------------------------------
# bit-packed GF(2) elimination


@dataclass
class BitEchelon:
    """Incremental row-echelon structure over GF(2) with bit-packed rows.

    Rows are Python ints; bit j is column j.  Pivot of a stored row is its
    lowest set bit.  `add` reduces an incoming row against the current
    echelon and, when nonzero survives, stores it and returns its pivot;
    optional `tag` payloads ride along (combination tracking is the caller's
    concern via tag XOR when `track` is on).
    """

    track: bool = False
    pivots: dict[int, int] = field(default_factory=dict)  # pivot col -> row
    tags: dict[int, int] = field(default_factory=dict)  # pivot col -> tag bits

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row: int, tag: int = 0) -> tuple[int, int]:
        piv = self.pivots
        tags = self.tags
        while row:
            c = row & -row  # lowest set bit as a power of two
            pr = piv.get(c)
            if pr is None:
                break
            row ^= pr
            if self.track:
                tag ^= tags[c]
        return row, tag

    def add(self, row: int, tag: int = 0) -> int | None:
        """Insert a row; returns its pivot bit-mask or None if dependent."""
        row, tag = self.reduce(row, tag)
        if not row:
            if self.track:
                self._null_tags.append(tag)
            return None
        c = row & -row
        self.pivots[c] = row
        if self.track:
            self.tags[c] = tag
        return c

    def __post_init__(self):
        self._null_tags: list[int] = []

    @property
    def null_tags(self) -> list[int]:
        """Tags of rows that reduced to zero (kernel combinations)."""
        return self._null_tags

    def contains(self, row: int) -> bool:
        return self.reduce(row)[0] == 0


def bit_rank(rows: list[int]) -> int:
    """Rank over GF(2) of bit-packed rows."""
    ech = BitEchelon()
    for r in rows:
        ech.add(r)
    return ech.rank


# ---------------------------------------------------------------------------
# plain-text debug dump


def dump_matrix(M: ModPkMatrix) -> str:
    """Debug format: header 'p K rows cols', then one row per line."""
    lines = [f"{M.p} {M.K} {M.rows} {M.cols}"]
    for i in range(M.rows):
        lines.append(" ".join(str(int(x)) for x in M.data[i]))
    return "\n".join(lines) + "\n"


def load_matrix(text: str) -> ModPkMatrix:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    p, K, rows, cols = map(int, lines[0].split())
    data = np.zeros((rows, cols), dtype=np.int64)
    for i in range(rows):
        vals = list(map(int, lines[1 + i].split()))
        if len(vals) != cols:
            raise ValueError(f"row {i} has {len(vals)} entries, expected {cols}")
        data[i] = vals
    return ModPkMatrix(p, K, data)
