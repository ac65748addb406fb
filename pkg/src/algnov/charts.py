"""Chart regrading, naming, verification, and emission.

Spectral-sequence data in tri-degree (s, i, t) is regraded to Adams chart
coordinates

    stem = t - s,   filtration a = s + i,   weight w = t / 2,

and differentials of filtration jump r draw as arrows of length r + 1
(one chart step left, r + 1 steps up).  Multiplication lines: vertical for
the weight-raising generator (h0-type), slope 1 and slope 1/3 for the
first two word generators (h1-, h2-type).

Charts serialize to SVG, TSV and JSON; emission is byte-deterministic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .names import CLASSICAL_NAMES, CTAU_NAMES

__all__ = [
    "regrade",
    "regrade_inverse",
    "differential_length",
    "chow_novikov",
    "ChartDoc",
    "Dot",
    "build_novikov_chart",
    "build_classical_chart",
    "DIFFERENTIAL_TABLE",
    "verify_table",
    "compare_miller",
    "emit",
    "parse_json_chart",
]


def regrade(s: int, i: int, t: int) -> tuple[int, int, int]:
    """(s, i, t) -> (stem, a-filtration, weight)."""
    if t % 2:
        raise ValueError(f"internal degree t={t} must be even")
    return (t - s, s + i, t // 2)


def regrade_inverse(stem: int, a: int, w: int) -> tuple[int, int, int]:
    """(stem, a, w) -> (s, i, t); inverse of regrade."""
    s = 2 * w - stem
    return (s, a - s, 2 * w)


def differential_length(r: int) -> int:
    """Chart length of the filtration-jump-r differential: one longer."""
    if r < 1:
        raise ValueError(f"filtration jump must be >= 1, got {r}")
    return r + 1


def chow_novikov(s_top: int, w: int) -> int:
    """Topological degree minus twice the weight."""
    return s_top - 2 * w


# ---------------------------------------------------------------------------
# chart documents


@dataclass
class Dot:
    id: str
    stem: int
    filt: int
    weight: int | None
    s: int | None = None
    i: int | None = None
    t: int | None = None
    name: str | None = None


@dataclass
class ChartDoc:
    meta: dict
    dots: list[Dot] = field(default_factory=list)
    lines: list[tuple[str, str, str]] = field(default_factory=list)  # kind, src, dst
    diffs: list[tuple[int, str, str]] = field(default_factory=list)  # length, src, dst
    warnings: list[str] = field(default_factory=list)

    def dot_index(self):
        return {d.id: d for d in self.dots}

    def counts(self):
        out: dict[tuple[int, int], int] = {}
        for d in self.dots:
            out[(d.stem, d.filt)] = out.get((d.stem, d.filt), 0) + 1
        return out

    def validate_geometry(self):
        """Slope and arrow-shape constraints; raises on violation."""
        pos = {d.id: d for d in self.dots}
        slopes = {"h0": None, "h1": 1, "h2": 3}
        for kind, a, b in self.lines:
            da, db = pos[a], pos[b]
            dx, dy = db.stem - da.stem, db.filt - da.filt
            if kind == "h0":
                ok = dx == 0 and dy == 1
            else:
                ok = dy == 1 and dx == slopes[kind]
            if not ok:
                raise ValueError(f"{kind} line {a}->{b} violates slope rule")
        for length, a, b in self.diffs:
            da, db = pos[a], pos[b]
            if db.stem - da.stem != -1 or db.filt - da.filt != length:
                raise ValueError(f"length-{length} arrow {a}->{b} has bad shape")
            if da.weight is not None and db.weight is not None and da.weight != db.weight:
                raise ValueError(f"arrow {a}->{b} changes the weight")


def _attach_names(doc: ChartDoc, registry: dict):
    by_pos: dict[tuple[int, int], list[Dot]] = {}
    for d in doc.dots:
        by_pos.setdefault((d.stem, d.filt), []).append(d)
    for pos, dots in sorted(by_pos.items()):
        names = registry.get(pos)
        if not names:
            continue
        if len(dots) == 1 and len(names) == 1:
            dots[0].name = names[0]
        elif len(dots) == len(names):
            for d, n in zip(dots, names):
                d.name = n
        else:
            doc.warnings.append(
                f"ambiguous naming at {pos}: {len(dots)} dots, {len(names)} names"
            )


# ---------------------------------------------------------------------------
# chart construction


def build_novikov_chart(
    fc,
    page: int | str,
    registry: dict | None = None,
    with_lines: bool = True,
    a_max: int | None = None,
) -> ChartDoc:
    """Chart of the regraded spectral sequence at the given page.

    `page` is a page number or "inf" for the last computed page.  Dots are
    every nonzero entry; length-(r+1) arrows are drawn for each nonzero
    d_r out of a charted position; h0-lines come from multiplication by
    the weight generator on representatives, h1/h2 lines from one-letter
    word concatenation (p = 2).
    """
    if registry is None:
        registry = CTAU_NAMES
    r = fc.computed_page if page == "inf" else int(page)
    doc = ChartDoc(
        meta={
            "engine": "novikov",
            "page": "inf" if page == "inf" else r,
            "prime": fc.p,
            "precision": fc.K,
            "s_max": fc.s_max,
            "t_max": fc.t_max,
            "i_max": fc.i_max,
            "r_max": fc.r_max,
            "stem_max": fc.stem_max,
        }
    )
    ids: dict[tuple[int, int, int, int], str] = {}
    for (s, i, t) in fc.reported():
        st = fc._states[(s, i, t)]
        dim = st.dims.get(r, 0)
        if not dim:
            continue
        stem, a, w = regrade(s, i, t)
        if a_max is not None and a > a_max:
            continue
        for k in range(dim):
            did = f"{stem}.{a}.{w}.{k}"
            ids[(s, i, t, k)] = did
            doc.dots.append(Dot(did, stem, a, w, s=s, i=i, t=t))
    # differential arrows at this page
    for (s, i, t) in fc.reported():
        st = fc._states[(s, i, t)]
        rank = st.d_rank.get(r, 0)
        if not rank:
            continue
        stem, a, w = regrade(s, i, t)
        tgt = (s + 1, i + r, t)
        for k in range(st.dims.get(r, 0)):
            src_id = ids.get((s, i, t, k))
            tgt_id = ids.get((*tgt, 0))
            if src_id and tgt_id:
                doc.diffs.append((differential_length(r), src_id, tgt_id))
                break  # one representative arrow per tri-degree
    if with_lines and fc.p == 2:
        _novikov_lines(fc, r, ids, doc)
    _attach_names(doc, registry)
    doc.validate_geometry()
    return doc


def _novikov_lines(fc, r, ids, doc):
    """h0/h1/h2 lines from products on representatives."""
    cobar = getattr(fc.source, "cobar", None)
    m = fc.p**fc.K
    for (s, i, t) in fc.reported():
        st = fc._states[(s, i, t)]
        if not st.classes:
            continue
        for k, cls in enumerate(st.classes):
            src_id = ids.get((s, i, t, k))
            if src_id is None:
                continue
            # h0: multiply the representative by p
            if fc.tracked(s, i + 1, t):
                y = {c: (v * fc.p) % m for c, v in cls.x.items()}
                y = {c: v for c, v in y.items() if v}
                coords = fc.class_coordinates(y, s, i + 1, t)
                if coords:
                    for k2 in sorted(coords):
                        dst = ids.get((s, i + 1, t, k2))
                        if dst:
                            doc.lines.append(("h0", src_id, dst))
            if cobar is None:
                continue
            # h1, h2: concatenate by the one-letter words t1, t1^2
            for kind, letter_exp, dt in (("h1", 1, 2), ("h2", 2, 4)):
                t2 = t + dt
                if t2 > fc.t_max or not fc.tracked(s + 1, i, t2):
                    continue
                y = _concat_letter(cobar, cls.x, s, t, letter_exp, dt)
                coords = fc.class_coordinates(y, s + 1, i, t2)
                if coords:
                    for k2 in sorted(coords):
                        dst = ids.get((s + 1, i, t2, k2))
                        if dst:
                            doc.lines.append((kind, src_id, dst))
    doc.lines.sort()


def _concat_letter(cobar, x: dict, s: int, t: int, letter_exp: int, dt: int):
    """Cobar product [t_1^letter_exp] * x.

    The v-coefficient of each term slides left across the new letter via
    the right unit (the bar tensors are over the coefficient ring), which
    the cobar slide machinery performs.
    """
    w = cobar.w
    m = w.p**w.K
    letter = tuple(letter_exp if idx == 0 else 0 for idx in range(w.N))
    src_basis = cobar.basis(s, t)
    tgt_index = cobar.index(s + 1, t + dt)
    out: dict = {}
    for col, c in x.items():
        alpha, word = src_basis[col]
        for dalpha, new_word, cc in cobar._slide(alpha, (letter,) + word, 1):
            j = tgt_index.get((dalpha, new_word))
            if j is None:
                raise KeyError("concatenation target missing from basis")
            v = (out.get(j, 0) + c * cc) % m
            if v:
                out[j] = v
            elif j in out:
                del out[j]
    return out


def build_classical_chart(res, stem_max: int, s_cap: int, registry: dict | None = None) -> ChartDoc:
    """Classical Ext chart from a minimal resolution, with h-lines."""
    if registry is None:
        registry = CLASSICAL_NAMES
    doc = ChartDoc(
        meta={
            "engine": "classical",
            "page": 2,
            "prime": 2,
            "stem_max": stem_max,
            "s_max": s_cap,
            "t_max": res._built_t,
        }
    )
    ids: dict[tuple[int, int, int], str] = {}
    gen_pos: dict[tuple[int, int], list[int]] = {}
    for s in range(0, s_cap + 1):
        if s >= len(res.gens):
            break
        for g in res.gens[s]:
            t = g.degree
            stem = t - s
            if 0 <= stem <= stem_max:
                gen_pos.setdefault((s, t), []).append(g.index)
    for (s, t), gis in sorted(gen_pos.items()):
        for k, gi in enumerate(gis):
            did = f"c{t - s}.{s}.{k}"
            ids[(s, t, gi)] = did
            doc.dots.append(Dot(did, t - s, s, None, s=s, t=t))
    for (s, t), gis in sorted(gen_pos.items()):
        for j, dt in ((0, 1), (1, 2), (2, 4)):
            mat = res.product_by_h(j, s, t)
            if not mat:
                continue
            tgt = [g.index for g in res.gens[s + 1] if g.degree == t + dt] if s + 1 < len(res.gens) else []
            for a, gi in enumerate(gis):
                for b, gi2 in enumerate(tgt):
                    if a < len(mat) and b < len(mat[a]) and mat[a][b]:
                        src_id = ids.get((s, t, gi))
                        dst_id = ids.get((s + 1, t + dt, gi2))
                        if src_id and dst_id:
                            doc.lines.append((f"h{j}", src_id, dst_id))
    doc.lines.sort()
    _attach_names(doc, registry)
    doc.validate_geometry()
    return doc


# ---------------------------------------------------------------------------
# the low-filtration differential table


# rows: (source name, target name, chart length, source stem, source filt,
#        seen_in_engine) -- the h2h5 row is established indirectly, through
# the stable-page identification rather than an engine differential, so the
# engine must see NO differential there.
DIFFERENTIAL_TABLE = [
    ("h4", "h0h3^2", 2, 15, 1, True),
    ("h0h4", "h0d0", 3, 15, 2, True),
    ("e0", "h1^2d0", 2, 17, 4, True),
    ("f0", "h0^2e0", 2, 18, 4, True),
    ("h5", "h0h4^2", 2, 31, 1, True),
    ("h0^3h5", "h0Deltah2^2", 3, 31, 4, True),
    ("h2h5", "h1d1", 3, 34, 2, False),
    ("h3h5", "h0x", 4, 38, 2, True),
    ("e1", "h1t", 3, 38, 4, True),
    ("c2", "h0f1", 2, 41, 3, True),
]


def verify_table(fc, rows=None) -> list[dict]:
    """Check the differential table against computed pages.

    For each row: the summed rank of the jump-(length-1) differential over
    all tri-degrees at the source chart position must be exactly 1 (or 0
    for rows established indirectly); the target position is one stem left
    and `length` up.  Rows whose source position is not fully inside the
    window report OUT-OF-WINDOW.
    """
    if rows is None:
        rows = DIFFERENTIAL_TABLE
    report = []
    for name, tgt_name, length, x, y, direct in rows:
        r = length - 1
        entry = {
            "source": name,
            "target": tgt_name,
            "length": length,
            "stem": x,
            "filt": y,
            "target_pos": (x - 1, y + length),
        }
        tris = [
            (s, i, t)
            for (s, i, t) in _positions(x, y)
            if fc.tracked(s, i, t)
        ]
        in_window = (
            tris
            and (fc.stem_max is None or x <= fc.stem_max)
            and all(fc.tracked(s + 1, i + r, t, internal=True) for s, i, t in tris)
            and fc.computed_page >= r + 1
        )
        if not in_window:
            entry["status"] = "OUT-OF-WINDOW"
            report.append(entry)
            continue
        rank = sum(fc._states[(s, i, t)].d_rank.get(r, 0) for (s, i, t) in tris)
        entry["rank"] = rank
        expected = 1 if direct else 0
        before = sum(fc._states[(s, i, t)].dims.get(r, 0) for (s, i, t) in tris)
        after = sum(fc._states[(s, i, t)].dims.get(r + 1, 0) for (s, i, t) in tris)
        entry["source_dims"] = (before, after)
        drop_ok = before - after >= rank  # incoming kills may add to the drop
        status_ok = rank == expected and (rank == 0 or drop_ok)
        if direct:
            entry["status"] = "PASS" if status_ok else "FAIL"
        else:
            entry["status"] = "PASS-INDIRECT" if status_ok else "FAIL"
        report.append(entry)
    return report


def _positions(x: int, y: int):
    """All tri-degrees regrading to chart position (x, y)."""
    out = []
    for s in range(0, y + 1):
        t = x + s
        i = y - s
        if t % 2 == 0 and i >= 0:
            out.append((s, i, t))
    return out


def compare_miller(fc, res, stem_cap: int | None = None) -> list[dict]:
    """ADVISORY coordinate-level comparison of length-2 differentials with
    the classical chart: a jump-1 differential at chart position (x, y)
    pairs with classical source/target dots at the same positions.  No map
    of towers is claimed."""
    out = []
    seen = set()
    for (s, i, t) in fc.reported():
        st = fc._states[(s, i, t)]
        rank = st.d_rank.get(1, 0)
        if not rank:
            continue
        x, y, _w = regrade(s, i, t)
        if stem_cap is not None and x > stem_cap:
            continue
        if (x, y) in seen:
            continue
        seen.add((x, y))
        src_dim = res.ext_dim(y, x + y)
        tgt_dim = res.ext_dim(y + 2, (x - 1) + (y + 2))
        out.append(
            {
                "position": (x, y),
                "target": (x - 1, y + 2),
                "classical_source_dim": src_dim,
                "classical_target_dim": tgt_dim,
                "consistent": bool(src_dim and tgt_dim),
                "advisory": True,
            }
        )
    return out


# ---------------------------------------------------------------------------
# emission


SVG_UNIT = 24
SVG_RADIUS = 3
SVG_COLORS = {
    "dot": "#000000",
    "h0": "#000000",
    "h1": "#000000",
    "h2": "#000000",
    "diff": "#cc0000",
}


def emit(doc: ChartDoc, fmt: str) -> str:
    if fmt == "json":
        return _emit_json(doc)
    if fmt == "tsv":
        return _emit_tsv(doc)
    if fmt == "svg":
        return _emit_svg(doc)
    raise ValueError(f"unknown format {fmt!r}")


def _emit_json(doc: ChartDoc) -> str:
    payload = {
        "meta": dict(sorted(doc.meta.items(), key=lambda kv: kv[0])),
        "dots": [
            {
                "id": d.id,
                "stem": d.stem,
                "filt": d.filt,
                "weight": d.weight,
                "s": d.s,
                "i": d.i,
                "t": d.t,
                "name": d.name,
            }
            for d in doc.dots
        ],
        "lines": [{"kind": k, "src": a, "dst": b} for k, a, b in doc.lines],
        "differentials": [
            {"length": l, "src": a, "dst": b} for l, a, b in doc.diffs
        ],
        "warnings": list(doc.warnings),
    }
    return json.dumps(payload, indent=1, sort_keys=True) + "\n"


def parse_json_chart(text: str) -> ChartDoc:
    payload = json.loads(text)
    doc = ChartDoc(meta=payload["meta"])
    for d in payload["dots"]:
        doc.dots.append(
            Dot(d["id"], d["stem"], d["filt"], d["weight"], d["s"], d["i"], d["t"], d["name"])
        )
    doc.lines = [(l["kind"], l["src"], l["dst"]) for l in payload["lines"]]
    doc.diffs = [(l["length"], l["src"], l["dst"]) for l in payload["differentials"]]
    doc.warnings = list(payload["warnings"])
    return doc


def _emit_tsv(doc: ChartDoc) -> str:
    lines = ["kind\tstem\tfiltration\tweight\ts\ti\tt\tname\textra"]

    def fmt(v):
        return "" if v is None else str(v)

    for d in doc.dots:
        lines.append(
            f"dot\t{d.stem}\t{d.filt}\t{fmt(d.weight)}\t{fmt(d.s)}\t{fmt(d.i)}\t{fmt(d.t)}\t{fmt(d.name)}\t"
        )
    idx = doc.dot_index()
    for kind, a, b in doc.lines:
        da = idx[a]
        lines.append(
            f"{kind}\t{da.stem}\t{da.filt}\t{fmt(da.weight)}\t{fmt(da.s)}\t{fmt(da.i)}\t{fmt(da.t)}\t\t{a}>{b}"
        )
    for length, a, b in doc.diffs:
        da = idx[a]
        lines.append(
            f"diff\t{da.stem}\t{da.filt}\t{fmt(da.weight)}\t{fmt(da.s)}\t{fmt(da.i)}\t{fmt(da.t)}\t\t{a}>{b}:{length}"
        )
    return "\n".join(lines) + "\n"


def _emit_svg(doc: ChartDoc) -> str:
    if doc.dots:
        xmax = max(d.stem for d in doc.dots) + 1
        ymax = max(d.filt for d in doc.dots) + 1
    else:
        xmax = ymax = 1
    W, H = (xmax + 1) * SVG_UNIT, (ymax + 1) * SVG_UNIT

    def px(stem, filt, jx=0):
        return ((stem + 0.5 + jx) * SVG_UNIT, H - (filt + 0.5) * SVG_UNIT)

    # jitter dots sharing a position, deterministically by id order
    by_pos: dict[tuple[int, int], list[Dot]] = {}
    for d in doc.dots:
        by_pos.setdefault((d.stem, d.filt), []).append(d)
    place = {}
    for pos, ds in sorted(by_pos.items()):
        n = len(ds)
        for k, d in enumerate(ds):
            off = (k - (n - 1) / 2) * 0.25 if n > 1 else 0.0
            place[d.id] = px(d.stem, d.filt, off)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}">',
        f'<!-- chart: {doc.meta.get("engine")} page {doc.meta.get("page")} -->',
        '<defs><marker id="arrow" markerWidth="6" markerHeight="6" refX="5" '
        'refY="3" orient="auto"><path d="M0,0 L6,3 L0,6 z" fill="#cc0000"/>'
        "</marker></defs>",
    ]
    for y in range(ymax + 1):
        _, yy = px(0, y)
        out.append(
            f'<line x1="0" y1="{yy:.1f}" x2="{W}" y2="{yy:.1f}" stroke="#eeeeee"/>'
        )
    for x in range(xmax + 1):
        xx, _ = px(x, 0)
        out.append(
            f'<line x1="{xx:.1f}" y1="0" x2="{xx:.1f}" y2="{H}" stroke="#eeeeee"/>'
        )
    for kind, a, b in doc.lines:
        (x1, y1), (x2, y2) = place[a], place[b]
        out.append(
            f'<line x1="{x1:.1f}" y1="{y1:.1f}" x2="{x2:.1f}" y2="{y2:.1f}" '
            f'stroke="{SVG_COLORS[kind]}" stroke-width="1"/>'
        )
    for length, a, b in doc.diffs:
        (x1, y1), (x2, y2) = place[a], place[b]
        out.append(
            f'<line x1="{x1:.1f}" y1="{y1:.1f}" x2="{x2:.1f}" y2="{y2:.1f}" '
            f'stroke="{SVG_COLORS["diff"]}" stroke-width="1" marker-end="url(#arrow)"/>'
        )
    for d in doc.dots:
        x, y = place[d.id]
        out.append(
            f'<circle cx="{x:.1f}" cy="{y:.1f}" r="{SVG_RADIUS}" fill="{SVG_COLORS["dot"]}"/>'
        )
        if d.name:
            out.append(
                f'<text x="{x + 4:.1f}" y="{y + 10:.1f}" font-size="8">{d.name}</text>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"
