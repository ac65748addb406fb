"""Spectral-sequence engine for filtered cochain complexes over Z/p^K.

The input complex is free in each bidegree (s, t) with a weight w_j on each
basis element; the filtration is F^i = {x : min_j (nu_p(x_j) + w_j) >= i}.
Differentials raise s by one, preserve t, and never lower valuations.

Page extraction follows the standard zig-zag

    Z_r^{s,i} = {x in F^i C^s : dx in F^{i+r}},   d_r[x] = [dx]:

* The first page at (s, i, t) is the cohomology of the valuation-graded
  complex.  One weight-staged echelon per (s, t) answers every filtration i
  at once: per-stage ranks give boundary dimensions, per-stage kernels give
  cocycle representatives.
* Every class carries an integral representative x with dx in F^{i+r}.
  d_r[x] reduces the leading graded part of dx at the target against
  graded boundaries, recorded images of earlier differentials, and the
  E_1 frame; absorbed parts are subtracted from dx through their recorded
  preimages, so classes with d_r[x] = 0 are refined in place to
  Z_{r+1}-representatives.

Pages at filtration <= i_max and page index <= r_max are exact provided
K >= i_max + r_max + 4; window construction enforces the bound and the
engine refuses pages beyond it.  Every integral differential row is
cross-checked against the independently assembled graded route on first
use, and page arithmetic (dim E_{r+1} = dim E_r - rank in - rank out) is
asserted throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import ModPkMatrix, SubmoduleBasis, homology, kernel_basis

__all__ = [
    "CobarSource",
    "ExplicitSource",
    "FilteredComplexWindow",
    "SSPages",
    "PrecisionExhausted",
    "CrossCheckError",
    "OracleGuardError",
    "compute_E1",
    "compute_page",
    "e_infinity",
    "total_homology_oracle",
]


class PrecisionExhausted(ArithmeticError):
    """K too small for the requested pages; raise K and rerun."""


class CrossCheckError(AssertionError):
    """Independent routes to the same data disagree (fatal)."""


class OracleGuardError(ValueError):
    pass


# ---------------------------------------------------------------------------
# sources


class CobarSource:
    """Adapter presenting a CobarComplex to the engine."""

    def __init__(self, cobar) -> None:
        self.cobar = cobar
        self.p = cobar.w.p
        self.K = cobar.w.K

    def dim(self, s, t):
        return self.cobar.dim(s, t)

    def weights(self, s, t):
        return self.cobar.valuations(s, t)

    def gr_rows(self, s, t):
        return self.cobar.gr_rows(s, t)

    def d_row(self, s, t, j):
        return self.cobar.d_rows(s, t)[j]

    def describe(self, s, t, j):
        return self.cobar.basis(s, t)[j]


class ExplicitSource:
    """Test source with explicit weights and integral rows per bidegree."""

    def __init__(self, p, K, dims, weights, rows):
        self.p = p
        self.K = K
        self._dims = dims
        self._weights = weights
        self._rows = rows

    def dim(self, s, t):
        return self._dims.get((s, t), 0)

    def weights(self, s, t):
        return self._weights.get((s, t), [0] * self.dim(s, t))

    def d_row(self, s, t, j):
        rows = self._rows.get((s, t))
        return rows[j] if rows else []

    def gr_rows(self, s, t):
        p = self.p
        ws = self.weights(s, t)
        wt = self.weights(s + 1, t)
        out = []
        for j in range(self.dim(s, t)):
            row = []
            for col, c in self.d_row(s, t, j):
                e = ws[j] - wt[col]
                if e >= 0 and c % p**e == 0:
                    digit = (c // p**e) % p
                    if digit:
                        row.append((col, e, digit))
            out.append(sorted(row))
        return out

    def describe(self, s, t, j):
        return (s, t, j)


# ---------------------------------------------------------------------------
# staged echelon of the graded differential of one bidegree


class StagedSlice:
    """Weight-staged echelon of the graded differential (s,t) -> (s+1,t).

    Rows are added in increasing weight; the echelon records, per pivot,
    the source combination and insertion stage, so that rank and image
    data of every fixed-filtration complex i <= cap are available from one
    elimination.  p = 2 packs vectors into Python ints; odd p uses dicts.
    """

    def __init__(self, p: int, stage_cap: int):
        self.p = p
        self.cap = max(stage_cap, 0)
        self.pivots: dict[int, tuple] = {}
        self.kernels: list[tuple[int, object]] = []
        self._rank_prefix: list[int] = [0] * (self.cap + 1)

    def reduce(self, vec, combo, max_stage):
        """Reduce against pivots of stage <= max_stage; tracks the combo."""
        if self.p == 2:
            done = 0
            while True:
                active = vec & ~done
                if not active:
                    return vec, combo
                low = active & -active
                hit = self.pivots.get(low)
                if hit is None or hit[2] > max_stage:
                    done |= low
                    continue
                vec ^= hit[0]
                combo ^= hit[1]
        p = self.p
        out = dict(vec)
        cmb = dict(combo)
        for col in sorted(out):
            c = out.get(col, 0) % p
            if not c:
                continue
            hit = self.pivots.get(col)
            if hit is None or hit[2] > max_stage:
                continue
            row, rcombo, _ = hit
            f = (c * pow(row[col], -1, p)) % p
            for k, v in row.items():
                out[k] = (out.get(k, 0) - f * v) % p
            for k, v in rcombo.items():
                cmb[k] = (cmb.get(k, 0) - f * v) % p
        return (
            {k: v for k, v in out.items() if v % p},
            {k: v % p for k, v in cmb.items() if v % p},
        )

    def add(self, vec, combo, stage):
        vec, combo = self.reduce(vec, combo, stage)
        if not vec:
            self.kernels.append((stage, combo))
            return
        low = (vec & -vec) if self.p == 2 else min(vec)
        if low in self.pivots:
            raise AssertionError("duplicate pivot after reduction")
        self.pivots[low] = (vec, combo, stage)

    def finalize(self):
        counts = [0] * (self.cap + 1)
        for _, (_, _, st) in self.pivots.items():
            counts[min(st, self.cap)] += 1
        total = 0
        prefix = []
        for c in counts:
            total += c
            prefix.append(total)
        self._rank_prefix = prefix

    def rank_at(self, i: int) -> int:
        if i < 0:
            return 0
        return self._rank_prefix[min(i, self.cap)] if self._rank_prefix else 0

    def kernel_count_at(self, i: int) -> int:
        return sum(1 for stg, _ in self.kernels if stg <= i)


def _build_slice(p, gr_rows, weights, stage_cap) -> StagedSlice:
    sl = StagedSlice(p, stage_cap)
    order = sorted(range(len(weights)), key=lambda j: (weights[j], j))
    for j in order:
        w = weights[j]
        if w > stage_cap:
            break
        if p == 2:
            vec = 0
            for col, _e0, c in gr_rows[j]:
                if c % 2:
                    vec |= 1 << col
            combo = 1 << j
        else:
            vec = {col: c % p for col, _e0, c in gr_rows[j] if c % p}
            combo = {j: 1}
        sl.add(vec, combo, w)
    sl.finalize()
    return sl


# ---------------------------------------------------------------------------
# per-tri-degree state


@dataclass
class PageClass:
    coords: dict  # coordinates in the tri-degree's E_1 frame, mod p
    x: dict  # integral representative {basis index: coeff mod p^K}
    dx: dict  # current differential of x, in (s+1, t) coordinates
    born: int = 1
    frozen: bool = False  # differential target left the tracked window


@dataclass
class TriState:
    s: int
    i: int
    t: int
    e1_dim: int = 0
    frame: dict = field(default_factory=dict)  # leading term -> (vector, idx)
    classes: list = field(default_factory=list)
    dead_targets: list = field(default_factory=list)  # (page, coords, u, du)
    dims: dict = field(default_factory=dict)
    d_rank: dict = field(default_factory=dict)
    stable_at: int | None = None


class SSPages:
    """Access to computed page data (dims, ranks, representatives)."""

    def __init__(self, window: "FilteredComplexWindow", max_page: int):
        self.window = window
        self.max_page = max_page

    def dim(self, r: int, s: int, i: int, t: int) -> int:
        st = self.window._states.get((s, i, t))
        return st.dims.get(r, 0) if st else 0

    def d_rank(self, r: int, s: int, i: int, t: int) -> int:
        st = self.window._states.get((s, i, t))
        return st.d_rank.get(r, 0) if st else 0

    def representatives(self, s: int, i: int, t: int):
        """Current (latest computed page) representative cochains."""
        st = self.window._states.get((s, i, t))
        return [dict(c.x) for c in st.classes] if st else []

    def nonzero(self, r: int):
        out = []
        for (s, i, t), st in sorted(self.window._states.items()):
            if self.window.tracked(s, i, t) and st.dims.get(r, 0):
                out.append((s, i, t, st.dims[r]))
        return out


# ---------------------------------------------------------------------------
# the engine


class FilteredComplexWindow:
    """Demand-driven spectral-sequence computation over a filtered source.

    Reported tri-degrees satisfy s <= s_max, i <= min(i_max, a_max - s)
    (when the chart cap a_max is set), t_min <= t <= t_max, and
    t - s <= stem_max when a stem cap is given.  One internal layer of
    extra cohomological degree and filtration absorbs differential targets
    so that ranks at the window edge are exact.
    """

    def __init__(
        self,
        source,
        s_max: int,
        t_max: int,
        i_max: int,
        r_max: int,
        stem_max: int | None = None,
        a_max: int | None = None,
        t_min: int = 0,
        stem_min: int | None = None,
    ):
        self.source = source
        self.p = source.p
        self.K = source.K
        self.s_max = s_max
        self.t_max = t_max
        self.i_max = i_max
        self.r_max = r_max
        self.stem_max = stem_max
        self.stem_min = stem_min
        self.a_max = a_max
        self.t_min = t_min
        if self.K < i_max + r_max + 4:
            raise PrecisionExhausted(
                f"precision K={self.K} below i_max + r_max + 4 = "
                f"{i_max + r_max + 4}; raise K and rerun"
            )
        self._states: dict[tuple[int, int, int], TriState] = {}
        self._slices: dict[tuple[int, int], StagedSlice] = {}
        self._drow_checked: set[tuple[int, int]] = set()
        self.computed_page = 0
        self._t_values = [t for t in range(t_min, t_max + 1) if t % 2 == 0]

    # -- window geometry -------------------------------------------------------

    def i_cap(self, s: int) -> int:
        cap = self.i_max
        if self.a_max is not None:
            cap = min(cap, self.a_max - s)
        return cap

    def _i_cap_internal(self, s: int) -> int:
        # must cover (a) all reported filtrations at s, (b) every target of
        # a reported differential from s-1, and (c) every graded-boundary
        # source absorbing such targets at the same cohomological degree
        base = self.i_cap(s)
        prev = self.i_cap(s - 1) if s > 0 else base
        return min(self.i_max + self.r_max, max(base, prev) + self.r_max)

    def tracked(self, s: int, i: int, t: int, internal: bool = False) -> bool:
        if t % 2 or not (self.t_min <= t <= self.t_max) or i < 0 or s < 0:
            return False
        if internal:
            if s > self.s_max + 1:
                return False
            if self.stem_min is not None and t - s < self.stem_min - 1:
                return False
            return i <= self._i_cap_internal(s)
        if s > self.s_max:
            return False
        if self.stem_max is not None and t - s > self.stem_max:
            return False
        if self.stem_min is not None and t - s < self.stem_min:
            return False
        return i <= self.i_cap(s)

    def reported(self):
        for (s, i, t) in sorted(self._states):
            if self.tracked(s, i, t):
                yield (s, i, t)

    # -- slices ------------------------------------------------------------------

    def _slice(self, s: int, t: int) -> StagedSlice:
        key = (s, t)
        if key not in self._slices:
            if s < 0 or self.source.dim(s, t) == 0:
                sl = StagedSlice(self.p, 0)
                sl.finalize()
                self._slices[key] = sl
                return sl
            weights = self.source.weights(s, t)
            cap_next = self._i_cap_internal(s + 1) if s + 1 <= self.s_max + 1 else 0
            cap = min(
                max(weights, default=0),
                max(self._i_cap_internal(min(s, self.s_max + 1)), cap_next),
            )
            self._slices[key] = _build_slice(
                self.p, self.source.gr_rows(s, t), weights, cap
            )
        return self._slices[key]

    def _d_row(self, s: int, t: int, j: int):
        row = self.source.d_row(s, t, j)
        if (s, t) not in self._drow_checked:
            # cross-check the whole bidegree once: jump-0 digits of the
            # integral rows must reproduce the graded route exactly
            self._drow_checked.add((s, t))
            p = self.p
            ws = self.source.weights(s, t)
            wt = self.source.weights(s + 1, t)
            grr = self.source.gr_rows(s, t)
            for jj in range(self.source.dim(s, t)):
                expect = {col: c % p for col, _e0, c in grr[jj] if c % p}
                got = {}
                for col, c in self.source.d_row(s, t, jj):
                    e = ws[jj] - wt[col]
                    if 0 <= e < self.K and c % p**e == 0:
                        digit = (c // p**e) % p
                        if digit:
                            got[col] = digit
                if expect != got:
                    raise CrossCheckError(
                        f"graded/integral differential mismatch at "
                        f"(s={s}, t={t}) row {jj}"
                    )
        return row

    # -- E_1 -----------------------------------------------------------------------

    def compute_e1(self) -> SSPages:
        if self.computed_page >= 1:
            return SSPages(self, self.computed_page)
        for t in self._t_values:
            for s in range(0, self.s_max + 2):
                if self.stem_max is not None and t - s > self.stem_max + 1:
                    continue
                for i in range(0, self._i_cap_internal(s) + 1):
                    if self.tracked(s, i, t, internal=True):
                        self._init_tridegree(s, i, t)
        self.computed_page = 1
        return SSPages(self, 1)

    def _init_tridegree(self, s: int, i: int, t: int):
        key = (s, i, t)
        if key in self._states:
            return
        st = TriState(s, i, t)
        self._states[key] = st
        if self.source.dim(s, t) == 0:
            st.dims[1] = 0
            return
        weights = self.source.weights(s, t)
        # beyond the maximal weights both the kernel set and the boundary
        # rank saturate, so higher filtrations are scaled copies of the
        # saturation level (the towers of the weight-0 generator)
        wprev = self.source.weights(s - 1, t) if s > 0 else []
        sat = max(max(weights, default=0), max(wprev, default=0))
        if i > sat:
            self._init_tridegree(s, sat, t)
            base = self._states[(s, sat, t)]
            st.e1_dim = base.e1_dim
            st.dims[1] = base.e1_dim
            st.frame = base.frame
            scale = self.p ** (i - sat)
            m = self.p**self.K
            for cls in base.classes:
                st.classes.append(
                    PageClass(
                        coords=dict(cls.coords),
                        x={k: (v * scale) % m for k, v in cls.x.items()},
                        dx={k: (v * scale) % m for k, v in cls.dx.items()},
                    )
                )
            return
        ker_slice = self._slice(s, t)
        img_slice = self._slice(s - 1, t)
        dim = ker_slice.kernel_count_at(i) - img_slice.rank_at(i)
        st.e1_dim = dim
        st.dims[1] = dim
        if dim == 0:
            return
        p = self.p
        for stage, combo in ker_slice.kernels:
            if stage > i:
                continue
            vec = combo if p == 2 else dict(combo)
            residue, _ = img_slice.reduce(vec, 0 if p == 2 else {}, i)
            residue = self._frame_reduce(st.frame, residue)
            if residue:
                idx = len(st.classes)
                lead = (residue & -residue) if p == 2 else min(residue)
                st.frame[lead] = (residue, idx)
                x = self._lift(s, t, combo, i, weights)
                st.classes.append(
                    PageClass(coords={idx: 1}, x=x, dx=self._apply_d(s, t, x))
                )
        if len(st.classes) != dim:
            raise CrossCheckError(
                f"E1 representative count {len(st.classes)} != dim {dim} at {key}"
            )

    def _frame_reduce(self, frame: dict, vec):
        p = self.p
        if p == 2:
            while vec:
                low = vec & -vec
                hit = frame.get(low)
                if hit is None:
                    return vec
                vec ^= hit[0]
            return vec
        out = dict(vec)
        changed = True
        while changed:
            changed = False
            for col in sorted(out):
                c = out.get(col, 0) % p
                if not c:
                    continue
                hit = frame.get(col)
                if hit is None:
                    continue
                row, _ = hit
                f = (c * pow(row[col], -1, p)) % p
                for k, v in row.items():
                    out[k] = (out.get(k, 0) - f * v) % p
                changed = True
        return {k: v for k, v in out.items() if v % p}

    def _frame_coords(self, st: TriState, vec):
        """Coordinates of a boundary-reduced cocycle vector in the frame."""
        p = self.p
        coords: dict = {}
        if p == 2:
            while vec:
                low = vec & -vec
                hit = st.frame.get(low)
                if hit is None:
                    return None
                vec ^= hit[0]
                coords[hit[1]] = (coords.get(hit[1], 0) + 1) % 2
            return {k: v for k, v in coords.items() if v}
        out = dict(vec)
        progress = True
        while progress and any(v % p for v in out.values()):
            progress = False
            for col in sorted(out):
                c = out.get(col, 0) % p
                if not c:
                    continue
                hit = st.frame.get(col)
                if hit is None:
                    return None
                row, idx = hit
                f = (c * pow(row[col], -1, p)) % p
                for k, v in row.items():
                    out[k] = (out.get(k, 0) - f * v) % p
                coords[idx] = (coords.get(idx, 0) + f) % p
                progress = True
        if any(v % p for v in out.values()):
            return None
        return {k: v for k, v in coords.items() if v}

    # -- integral helpers -------------------------------------------------------------

    def _lift(self, s, t, combo, i, weights):
        p, m = self.p, self.p**self.K
        x: dict = {}
        if p == 2:
            j = 0
            while combo:
                if combo & 1:
                    x[j] = (x.get(j, 0) + (1 << (i - weights[j]))) % m
                combo >>= 1
                j += 1
        else:
            for j, c in combo.items():
                x[j] = (x.get(j, 0) + c * p ** (i - weights[j])) % m
        return {k: v for k, v in x.items() if v}

    def _apply_d(self, s, t, x: dict) -> dict:
        m = self.p**self.K
        out: dict = {}
        for j in sorted(x):
            c = x[j]
            for col, v in self._d_row(s, t, j):
                w = (out.get(col, 0) + c * v) % m
                if w:
                    out[col] = w
                elif col in out:
                    del out[col]
        return out

    def _gr_project(self, s, t, y: dict, level: int):
        p = self.p
        weights = self.source.weights(s, t)
        vec = 0 if p == 2 else {}
        for j, c in y.items():
            nu = 0
            cc = c
            while cc % p == 0:
                cc //= p
                nu += 1
            val = nu + weights[j]
            if val < level:
                raise CrossCheckError(
                    f"vector claimed in F^{level} has valuation {val} at {j}"
                )
            if val == level:
                if p == 2:
                    vec |= 1 << j
                else:
                    vec[j] = cc % p
        return vec

    def _sub_scaled(self, y: dict, z: dict, scale: int) -> dict:
        """y - scale * z, sparse, mod p^K."""
        m = self.p**self.K
        out = dict(y)
        for k, v in z.items():
            w = (out.get(k, 0) - scale * v) % m
            if w:
                out[k] = w
            elif k in out:
                del out[k]
        return out

    # -- pages --------------------------------------------------------------------------

    def compute_pages(self, r_target: int) -> SSPages:
        if r_target - 1 > self.r_max:
            raise PrecisionExhausted(
                f"page {r_target} needs r_max >= {r_target - 1} "
                f"(configured r_max={self.r_max}); raise r_max/K and rerun"
            )
        self.compute_e1()
        while self.computed_page < r_target:
            self._advance_page(self.computed_page)
            self.computed_page += 1
        return SSPages(self, r_target)

    def _advance_page(self, r: int):
        order = sorted(self._states)
        transitions: dict = {}
        # pass 1: outgoing differentials.  Internal-layer sources matter too:
        # their images are the recorded boundaries that absorb longer
        # differentials of reported classes at shared targets.
        for key in order:
            st = self._states[key]
            s, i, t = key
            if not st.classes:
                continue
            target_ok = self.tracked(s + 1, i + r, t, internal=True)
            if not target_ok and self.tracked(s, i, t):
                raise CrossCheckError(
                    f"reported source {key} has untracked d_{r} target"
                )
            rows = []
            for cls in st.classes:
                if cls.frozen or not target_ok:
                    cls.frozen = True
                    rows.append((cls, {}, {}, dict(cls.dx)))
                    continue
                lam, u_total, y_res = self._reduce_to_page(cls.dx, s + 1, i + r, t)
                rows.append((cls, lam, u_total, y_res))
            lam_ech: dict = {}
            kernel_combos = []
            image_data = []
            p = self.p
            for idx, (cls, lam, u_total, y_res) in enumerate(rows):
                vec = dict(lam)
                combo = {idx: 1}
                for col in sorted(vec):
                    c = vec.get(col, 0) % p
                    if not c:
                        continue
                    hit = lam_ech.get(col)
                    if hit is None:
                        continue
                    hrow, hcombo = hit
                    f = (c * pow(hrow[col], -1, p)) % p
                    for k, v in hrow.items():
                        vec[k] = (vec.get(k, 0) - f * v) % p
                    for k, v in hcombo.items():
                        combo[k] = (combo.get(k, 0) - f * v) % p
                vec = {k: v for k, v in vec.items() if v % p}
                combo = {k: v for k, v in combo.items() if v % p}
                if vec:
                    lam_ech[min(vec)] = (vec, combo)
                    image_data.append((vec, combo))
                else:
                    kernel_combos.append(combo)
            transitions[key] = (rows, kernel_combos, image_data)
        # pass 2: record killed targets, rebuild source survivor lists
        for key in order:
            if key not in transitions:
                continue
            st = self._states[key]
            s, i, t = key
            rows, kernel_combos, image_data = transitions[key]
            st.d_rank[r] = len(image_data)
            tgt = self._states.get((s + 1, i + r, t))
            if image_data and tgt is not None:
                for vec, combo in image_data:
                    u: dict = {}
                    du: dict = {}
                    for idx, c in combo.items():
                        cls, lam, u_total, y_res = rows[idx]
                        xs = self._sub_scaled(cls.x, u_total, 1)
                        u = self._sub_scaled(u, xs, -c)
                        du = self._sub_scaled(du, y_res, -c)
                    tgt.dead_targets.append((r, vec, u, du))
            new_classes = []
            p = self.p
            for combo in kernel_combos:
                x: dict = {}
                dx: dict = {}
                coords: dict = {}
                frozen = False
                for idx, c in combo.items():
                    cls, lam, u_total, y_res = rows[idx]
                    frozen = frozen or cls.frozen
                    xs = self._sub_scaled(cls.x, u_total, 1)
                    x = self._sub_scaled(x, xs, -c)
                    dx = self._sub_scaled(dx, y_res, -c)
                    for k, v in cls.coords.items():
                        coords[k] = (coords.get(k, 0) + c * v) % p
                coords = {k: v for k, v in coords.items() if v}
                new_classes.append(
                    PageClass(coords=coords, x=x, dx=dx, born=r + 1, frozen=frozen)
                )
            st.classes = new_classes
        # pass 3: dims and incoming-kill trims everywhere
        for key in order:
            st = self._states[key]
            s, i, t = key
            src = self._states.get((s - 1, i - r, t))
            incoming = src.d_rank.get(r, 0) if src else 0
            outgoing = st.d_rank.get(r, 0)
            prev = st.dims.get(r, 0)
            st.dims[r + 1] = prev - outgoing - incoming
            if st.dims[r + 1] < 0:
                raise CrossCheckError(f"negative dimension at {key} page {r + 1}")
            if incoming:
                self._trim_killed(st, r)
            elif self.tracked(s, i, t) and st.dims[r + 1] != len(st.classes):
                raise CrossCheckError(
                    f"page arithmetic mismatch at {key} page {r + 1}: "
                    f"dim {st.dims[r + 1]} vs {len(st.classes)} survivors"
                )

    def _trim_killed(self, st: TriState, r: int):
        p = self.p
        dead_ech: dict = {}
        for page, vec, u, du in st.dead_targets:
            if page != r:
                continue
            v = self._coords_reduce(dead_ech, dict(vec))
            if not v:
                raise CrossCheckError(
                    f"dependent incoming image at {(st.s, st.i, st.t)} page {r}"
                )
            dead_ech[min(v)] = (v, None)
        taken = dict(dead_ech)
        survivors = []
        for cls in st.classes:
            vec = self._coords_reduce(taken, dict(cls.coords))
            if not vec:
                continue
            taken[min(vec)] = (vec, None)
            survivors.append(cls)
        st.classes = survivors
        if len(survivors) != st.dims.get(r + 1, 0):
            raise CrossCheckError(
                f"killed-direction trim mismatch at {(st.s, st.i, st.t)}: "
                f"{len(survivors)} survivors vs dim {st.dims.get(r + 1)}"
            )

    def _coords_reduce(self, ech: dict, vec: dict) -> dict:
        p = self.p
        progress = True
        while progress:
            progress = False
            for col in sorted(vec):
                c = vec.get(col, 0) % p
                if not c:
                    continue
                hit = ech.get(col)
                if hit is None:
                    continue
                row = hit[0]
                f = (c * pow(row[col], -1, p)) % p
                for k, v in row.items():
                    vec[k] = (vec.get(k, 0) - f * v) % p
                progress = True
        return {k: v for k, v in vec.items() if v % p}

    def _reduce_to_page(self, y: dict, s: int, i: int, t: int):
        """Express the class of y in the current page data at (s, i, t).

        Returns (lam, u_total, y_res) with y - d(u_total) = y_res, where
        lam are E_1-frame coordinates of the leading part of y_res after
        boundary and earlier-image absorption.
        """
        p = self.p
        u_total: dict = {}
        y_res = dict(y)
        if not y_res:
            return {}, u_total, y_res
        if not self.tracked(s, i, t, internal=True):
            raise PrecisionExhausted(
                f"differential target (s={s}, i={i}, t={t}) beyond tracked window"
            )
        vec = self._gr_project(s, t, y_res, i)
        if not vec:
            return {}, u_total, y_res
        img = self._slice(s - 1, t)
        residue, combo = img.reduce(vec, 0 if p == 2 else {}, i)
        if combo:
            # reduce() maintains residue = vec + combo * dbar, so the part
            # removed from vec is d of the lift of the NEGATED combination
            if p != 2:
                combo = {k: (-v) % p for k, v in combo.items()}
            weights = self.source.weights(s - 1, t)
            u = self._lift(s - 1, t, combo, i, weights)
            du = self._apply_d(s - 1, t, u)
            y_res = self._sub_scaled(y_res, du, 1)
            u_total = self._sub_scaled(u_total, u, -1)
        if not residue:
            return {}, u_total, y_res
        st = self._states.get((s, i, t))
        if st is None:
            raise CrossCheckError(f"missing state at target {(s, i, t)}")
        mu = self._frame_coords(st, residue)
        if mu is None:
            raise CrossCheckError(
                f"boundary-reduced cocycle escapes the E_1 frame at {(s, i, t)}"
            )
        if st.dead_targets and mu:
            dead_ech: dict = {}
            payloads: dict = {}
            for page, dvec, uu, ddu in st.dead_targets:
                v = self._coords_reduce(dead_ech, dict(dvec))
                if v:
                    dead_ech[min(v)] = (v, None)
                    payloads[min(v)] = (uu, ddu)
            progress = True
            while progress:
                progress = False
                for col in sorted(mu):
                    c = mu.get(col, 0) % p
                    if not c:
                        continue
                    hit = dead_ech.get(col)
                    if hit is None:
                        continue
                    row = hit[0]
                    f = (c * pow(row[col], -1, p)) % p
                    for k, v in row.items():
                        mu[k] = (mu.get(k, 0) - f * v) % p
                    uu, ddu = payloads[col]
                    y_res = self._sub_scaled(y_res, ddu, f)
                    u_total = self._sub_scaled(u_total, uu, -f)
                    progress = True
            mu = {k: v for k, v in mu.items() if v % p}
        return mu, u_total, y_res

    def class_coordinates(self, y: dict, s: int, i: int, t: int):
        """Coordinates of the class of y over the current survivors at
        (s, i, t), or None if y is not a combination of them (mod
        boundaries and dead directions).  y must lie in F^i with dy in the
        window's stable range."""
        if not y:
            return {}
        st = self._states.get((s, i, t))
        if st is None:
            return None
        lam, _u, _res = self._reduce_to_page(dict(y), s, i, t)
        if not lam:
            return {}
        p = self.p
        ech: dict = {}
        for k, cls in enumerate(st.classes):
            vec, combo = dict(cls.coords), {k: 1}
            progress = True
            while progress:
                progress = False
                for col in sorted(vec):
                    c = vec.get(col, 0) % p
                    if not c:
                        continue
                    hit = ech.get(col)
                    if hit is None:
                        continue
                    row, rcombo = hit
                    f = (c * pow(row[col], -1, p)) % p
                    for kk, v in row.items():
                        vec[kk] = (vec.get(kk, 0) - f * v) % p
                    for kk, v in rcombo.items():
                        combo[kk] = (combo.get(kk, 0) - f * v) % p
                    progress = True
            vec = {kk: v for kk, v in vec.items() if v % p}
            if vec:
                ech[min(vec)] = (vec, {kk: v % p for kk, v in combo.items() if v % p})
        out: dict = {}
        work = dict(lam)
        progress = True
        while progress:
            progress = False
            for col in sorted(work):
                c = work.get(col, 0) % p
                if not c:
                    continue
                hit = ech.get(col)
                if hit is None:
                    return None
                row, rcombo = hit
                f = (c * pow(row[col], -1, p)) % p
                for kk, v in row.items():
                    work[kk] = (work.get(kk, 0) - f * v) % p
                for kk, v in rcombo.items():
                    out[kk] = (out.get(kk, 0) + f * v) % p
                progress = True
        if any(v % p for v in work.values()):
            return None
        return {k: v for k, v in out.items() if v}

    # -- stabilization -------------------------------------------------------------------

    def stabilization_page(self, s: int, i: int, t: int) -> int | None:
        """Smallest page from which nothing happens through the computed
        range; None when activity continues to the last computed page."""
        st = self._states.get((s, i, t))
        if st is None:
            return 1
        last = self.computed_page
        r0 = 1
        for r in range(1, last):
            if st.d_rank.get(r, 0) or self._incoming_rank(s, i, t, r):
                r0 = r + 1
        return r0

    def _incoming_rank(self, s, i, t, r):
        src = self._states.get((s - 1, i - r, t))
        return src.d_rank.get(r, 0) if src else 0

    def collapse_report(self) -> dict:
        last = self.computed_page
        entries = []
        flagged = []
        for (s, i, t) in self.reported():
            st = self._states[(s, i, t)]
            if not st.e1_dim:
                continue
            stable = self.stabilization_page(s, i, t)
            dim = st.dims.get(last, 0)
            # a nonzero entry is assured stable only if no potential source
            # or target survives at any later page: tracked tri-degrees are
            # checked directly; beyond the tracked filtration range the
            # first page is constant in i from the maximal weight on, so the
            # top tracked level decides whether anything lives out there
            assured = True
            if dim:
                for r in range(last, i + 1):
                    src = self._states.get((s - 1, i - r, t))
                    if src and src.dims.get(last, 0):
                        assured = False
                        break
                if assured and self.source.dim(s + 1, t):
                    cap_next = self._i_cap_internal(s + 1)
                    for r in range(last, cap_next - i + 1):
                        tgt = self._states.get((s + 1, i + r, t))
                        if tgt and tgt.dims.get(last, 0):
                            assured = False
                            break
                    if assured:
                        maxw = max(self.source.weights(s + 1, t), default=0)
                        top = self._states.get((s + 1, cap_next, t))
                        top_e1 = top.e1_dim if top else 0
                        if cap_next < maxw or top_e1 > 0:
                            assured = False
            entries.append(
                {
                    "s": s,
                    "i": i,
                    "t": t,
                    "dim": dim,
                    "stable_at": stable,
                    "assured": assured,
                }
            )
            if dim and not assured:
                flagged.append((s, i, t))
        return {
            "page": last,
            "collapsed": not flagged,
            "flagged": flagged,
            "entries": entries,
        }


# ---------------------------------------------------------------------------
# public operations


def compute_E1(fc: FilteredComplexWindow) -> SSPages:
    """First page.  Dimensions are those of the graded complex; the
    integral and graded assembly routes are cross-checked row by row."""
    return fc.compute_e1()


def compute_page(fc: FilteredComplexWindow, r: int) -> SSPages:
    return fc.compute_pages(r)


def e_infinity(fc: FilteredComplexWindow):
    """Stable page within caps plus the collapse report (non-stabilized
    tri-degrees are flagged, never silently reported as final)."""
    pages = fc.compute_pages(fc.r_max + 1)
    return pages, fc.collapse_report()


def e1_dimension_table(source, s_cap: int, t_cap: int, i_cap: int) -> dict:
    """First-page dimensions for every tri-degree in the box, dims only.

    One staged elimination per bidegree; no representatives are built, so
    this scales to windows far beyond the page engine's reach.
    """
    out: dict[tuple[int, int, int], int] = {}
    slices: dict[tuple[int, int], StagedSlice] = {}

    def get_slice(s, t):
        if (s, t) not in slices:
            if s < 0 or source.dim(s, t) == 0:
                sl = StagedSlice(source.p, 0)
                sl.finalize()
            else:
                weights = source.weights(s, t)
                sl = _build_slice(
                    source.p, source.gr_rows(s, t), weights,
                    min(max(weights, default=0), i_cap),
                )
            slices[(s, t)] = sl
        return slices[(s, t)]

    for t in range(0, t_cap + 1, 2):
        for s in range(0, s_cap + 1):
            ker = get_slice(s, t)
            img = get_slice(s - 1, t)
            for i in range(0, i_cap + 1):
                out[(s, i, t)] = ker.kernel_count_at(i) - img.rank_at(i)
        # bidegree slices for this column are not reused later
        for s in range(-1, s_cap + 1):
            slices.pop((s, t), None)
    return out


def crosscheck_gr_vs_integral(source, s: int, t: int, K: int) -> int:
    """Entrywise comparison of the closed-form graded rows against the
    jump-0 digits of the integral differential at one bidegree; returns the
    number of rows checked, raising CrossCheckError on any mismatch."""
    p = source.p
    ws = source.weights(s, t)
    wt = source.weights(s + 1, t)
    grr = source.gr_rows(s, t)
    n = source.dim(s, t)
    for j in range(n):
        expect = {col: c % p for col, _e0, c in grr[j] if c % p}
        got = {}
        for col, c in source.d_row(s, t, j):
            e = ws[j] - wt[col]
            if 0 <= e < K and c % p**e == 0:
                digit = (c // p**e) % p
                if digit:
                    got[col] = digit
        if expect != got:
            raise CrossCheckError(
                f"graded/integral mismatch at (s={s}, t={t}) row {j}"
            )
    return n


# ---------------------------------------------------------------------------
# abutment oracle


def total_homology_oracle(fc: FilteredComplexWindow, guard: int = 20000):
    """Direct check that E_infinity is the associated graded of H(C).

    Computes H^{s,t} of the integral complex by Howell-form homology,
    filters by the induced valuation filtration, and compares graded
    dimensions with the stable page in every reported tri-degree.  Returns
    rows of (s, t, cyclic exponents, {i: graded dim}); raises
    CrossCheckError on any mismatch.
    """
    src = fc.source
    total = sum(src.dim(s, t) for t in fc._t_values for s in range(fc.s_max + 2))
    if total > guard:
        raise OracleGuardError(f"window basis size {total} exceeds guard {guard}")
    pages, report = e_infinity(fc)
    flagged = set(report["flagged"])
    last = fc.computed_page
    p, K = fc.p, fc.K
    m = p**K
    out = []
    for t in fc._t_values:
        for s in range(fc.s_max + 1):
            if fc.stem_max is not None and t - s > fc.stem_max:
                continue
            n = src.dim(s, t)
            if n == 0:
                for i in range(fc.i_cap(s) + 1):
                    if pages.dim(last, s, i, t):
                        raise CrossCheckError(f"nonzero page on empty bidegree {(s, i, t)}")
                continue
            d_here = _dense(src, s, t, p, K)
            if s > 0:
                d_prev = _dense(src, s - 1, t, p, K)
            else:
                d_prev = ModPkMatrix(p, K, np.zeros((0, n), dtype=np.int64))
            exps = homology(d_prev, d_here)
            cycles = kernel_basis(d_here)
            weights = src.weights(s, t)
            brows = [d_prev.data[j] for j in range(d_prev.rows)]
            sizes = {}
            for i in range(fc.i_cap(s) + 2):
                zf = _cycles_in_filtration(cycles, weights, i, p, K)
                gens = zf + brows
                if gens:
                    span = kernel_like_span(p, K, gens, n)
                    sizes[i] = span
                else:
                    sizes[i] = 0
            for i in range(fc.i_cap(s) + 1):
                gr_dim = sizes[i] - sizes[i + 1]
                got = pages.dim(last, s, i, t)
                if gr_dim != got:
                    # a flagged tri-degree may still support or receive
                    # differentials beyond r_max; only assured entries are
                    # final, and those must match exactly
                    if (s, i, t) in flagged:
                        continue
                    raise CrossCheckError(
                        f"abutment mismatch at (s={s}, i={i}, t={t}): "
                        f"graded H = {gr_dim}, E_inf = {got}"
                    )
            out.append((s, t, exps, {i: sizes[i] - sizes[i + 1] for i in range(fc.i_cap(s) + 1)}))
    return out


def _dense(src, s, t, p, K):
    n = src.dim(s, t)
    n2 = src.dim(s + 1, t)
    data = np.zeros((n, n2), dtype=np.int64)
    for j in range(n):
        for col, c in src.d_row(s, t, j):
            data[j, col] = c
    return ModPkMatrix(p, K, data)


def _cycles_in_filtration(cycles: SubmoduleBasis, weights, i, p, K):
    """Generators of ker(d) intersected with F^i."""
    m = p**K
    n = cycles.ambient
    fgens = np.zeros((n, n), dtype=np.int64)
    for j in range(n):
        fgens[j, j] = pow(p, max(0, i - weights[j]), m)
    if cycles.gens.rows == 0:
        return []
    stacked = np.vstack([cycles.gens.data, fgens])
    rel = kernel_basis(ModPkMatrix(p, K, stacked % m * np.int64(1)))
    # rows (u | v) with u*Z + v*F = 0; intersection is spanned by -v*F = u*Z
    nz = cycles.gens.rows
    outs = []
    for j in range(rel.gens.rows):
        u = rel.gens.data[j][:nz]
        vec = (u @ cycles.gens.data) % m
        if vec.any():
            outs.append(vec)
    return outs


def kernel_like_span(p, K, gens, n):
    """log_p of the size of the span of the given generator rows."""
    from .linalg import normal_form

    M = ModPkMatrix(p, K, np.array(gens, dtype=np.int64).reshape(len(gens), n))
    H, _ = normal_form(M)
    return SubmoduleBasis(p, K, n, H).log_size()
