"""Command-line orchestration: windows, pipeline runs, artifacts, checks.

Configuration comes from an optional TOML file plus flag overrides (flags
win), with two environment fallbacks: ALGNOV_THREADS and ALGNOV_OUT.  Every
artifact embeds the resolved configuration and engine version, and reruns
with an unchanged configuration write identical bytes regardless of the
thread count.

Exit codes for `verify`: 0 all mandatory checks pass, 2 mandatory rows
fell outside the configured window (no failures), 1 any failure.
"""

from __future__ import annotations

import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import click

try:
    import tomllib  # py >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from . import __version__
from .bphopf import TruncationWindow, structure_maps
from .charts import (
    DIFFERENTIAL_TABLE,
    build_classical_chart,
    build_novikov_chart,
    compare_miller,
    emit,
    verify_table,
)
from .cobar import CobarComplex, cobar_complex
from .hopfext import (
    MinimalResolution,
    QWeightModule,
    bp_quotient_hopf,
    classical_dual_steenrod,
    ext_dims,
)
from .koszul import koszul_check
from .linalg import dump_matrix
from .specseq import (
    CobarSource,
    FilteredComplexWindow,
    OracleGuardError,
    compute_E1,
    e_infinity,
    total_homology_oracle,
)

GUARD_BASIS_CAP = 2_000_000


@dataclass
class RunConfig:
    prime: int = 2
    stem_max: int = 20
    s_max: int = 10
    i_max: int = 14
    r_max: int = 5
    precision: int | None = None  # K; None = auto
    a_max: int | None = None
    out: str = "."
    formats: tuple[str, ...] = ("svg", "tsv", "json")
    threads: int = 0  # 0 = library/env default
    suite: str = "fast"
    force: bool = False

    @property
    def t_max(self) -> int:
        t = self.stem_max + self.s_max
        return t + (t % 2)

    @property
    def K(self) -> int:
        if self.precision is not None:
            return self.precision
        return self.i_max + self.r_max + 4

    def resolved(self) -> dict:
        d = asdict(self)
        d["t_max"] = self.t_max
        d["K"] = self.K
        d["K_rule"] = "auto: i_max + r_max + 4" if self.precision is None else "explicit"
        d["formats"] = list(self.formats)
        d["engine_version"] = __version__
        return d


def _load_config(path: str | None, overrides: dict) -> RunConfig:
    base: dict = {}
    if path:
        with open(path, "rb") as f:
            base.update(tomllib.load(f))
    base.update({k: v for k, v in overrides.items() if v is not None})
    if "formats" in base and isinstance(base["formats"], str):
        base["formats"] = tuple(base["formats"].split(","))
    if not base.get("out"):
        base["out"] = os.environ.get("ALGNOV_OUT", ".")
    if not base.get("threads"):
        base["threads"] = int(os.environ.get("ALGNOV_THREADS", "0") or 0)
    cfg = RunConfig(**base)
    if cfg.prime < 2:
        raise click.UsageError(f"invalid prime {cfg.prime}")
    return cfg


def _write(cfg: RunConfig, name: str, payload: str):
    os.makedirs(cfg.out, exist_ok=True)
    path = os.path.join(cfg.out, name)
    with open(path, "w", encoding="utf-8") as f:
        f.write(payload)
    click.echo(f"wrote {path}")


def _json_artifact(cfg: RunConfig, body: dict) -> str:
    return json.dumps(
        {"config": cfg.resolved(), **body}, indent=1, sort_keys=True
    ) + "\n"


def _threads(cfg: RunConfig) -> int:
    return cfg.threads if cfg.threads > 0 else (os.cpu_count() or 1)


def _warm_window(cx: CobarComplex, fc: FilteredComplexWindow, n_threads: int):
    """Pre-build bases and graded rows per internal degree, in parallel.

    The engine itself is deterministic and single-threaded; warming only
    populates caches, so results are independent of the thread count.
    """
    t_values = list(fc._t_values)

    def warm(t):
        lo = 0 if fc.stem_max is None else max(0, t - fc.stem_max - 1)
        for s in range(lo, fc.s_max + 2):
            cx.basis(s, t)
            cx.basis(s + 1, t)
            cx.gr_rows(s, t)
        return t

    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            list(pool.map(warm, t_values))
    else:
        for t in t_values:
            warm(t)


def _estimate_basis(cfg: RunConfig) -> int:
    cx = cobar_complex(cfg.prime, cfg.t_max, cfg.K)
    total = 0
    for t in range(0, cfg.t_max + 1, 2):
        lo = max(0, t - cfg.stem_max - 1)
        for s in range(lo, cfg.s_max + 2):
            total += _count_bidegree(cx, s, t)
    return total


def _count_bidegree(cx: CobarComplex, s: int, t: int) -> int:
    # counting only; avoids materializing the basis
    from functools import lru_cache

    w = cx.w

    @lru_cache(maxsize=None)
    def monos(d, k=0):
        if d == 0:
            return 1
        if k >= w.N or d < 0:
            return 0
        return sum(monos(d - e * w.v_degrees[k], k + 1) for e in range(d // w.v_degrees[k] + 1))

    @lru_cache(maxsize=None)
    def words(ss, d):
        if ss == 0:
            return 1 if d == 0 else 0
        total = 0
        for dl in range(2, d + 1, 2):
            c = monos(dl)
            if c:
                total += c * words(ss - 1, d - dl)
        return total

    return sum(monos(dv) * words(s, t - dv) for dv in range(0, t + 1, 2))


def _build_engine(cfg: RunConfig) -> tuple[CobarComplex, FilteredComplexWindow]:
    est = _estimate_basis(cfg)
    if est > GUARD_BASIS_CAP and not cfg.force:
        raise click.ClickException(
            f"estimated window basis size {est} exceeds the guardrail "
            f"({GUARD_BASIS_CAP}); rerun with --force to proceed"
        )
    cx = CobarComplex(TruncationWindow(cfg.prime, cfg.t_max, cfg.K))
    fc = FilteredComplexWindow(
        CobarSource(cx),
        s_max=cfg.s_max,
        t_max=cfg.t_max,
        i_max=cfg.i_max,
        r_max=cfg.r_max,
        stem_max=cfg.stem_max,
        a_max=cfg.a_max,
    )
    _warm_window(cx, fc, _threads(cfg))
    return cx, fc


def _pages_payload(fc: FilteredComplexWindow, report: dict) -> dict:
    pages = []
    for r in range(1, fc.computed_page + 1):
        entries = []
        for (s, i, t) in fc.reported():
            st = fc._states[(s, i, t)]
            dim = st.dims.get(r, 0)
            rank = st.d_rank.get(r, 0)
            if dim or rank:
                e = {"s": s, "i": i, "t": t, "dim": dim, "d_rank": rank}
                if rank:
                    e["d_targets"] = [s + 1, i + r, t]
                entries.append(e)
        pages.append({"r": r, "entries": entries})
    return {
        "window": {
            "prime": fc.p,
            "K": fc.K,
            "s_max": fc.s_max,
            "t_max": fc.t_max,
            "i_max": fc.i_max,
            "r_max": fc.r_max,
            "stem_max": fc.stem_max,
        },
        "pages": pages,
        "collapse_report": report,
    }


_config_option = click.option("--config", type=click.Path(exists=True), default=None)


def _common_options(f):
    for opt in reversed(
        [
            click.option("--prime", type=int, default=None),
            click.option("--stem-max", "stem_max", type=int, default=None),
            click.option("--s-max", "s_max", type=int, default=None),
            click.option("--i-max", "i_max", type=int, default=None),
            click.option("--r-max", "r_max", type=int, default=None),
            click.option("--precision", type=int, default=None),
            click.option("--a-max", "a_max", type=int, default=None),
            click.option("--out", type=str, default=None),
            click.option("--format", "formats", type=str, default=None),
            click.option("--suite", type=click.Choice(["fast", "extended", "full"]), default=None),
            click.option("--threads", type=int, default=None),
            click.option("--force", is_flag=True, default=None),
            _config_option,
        ]
    ):
        f = opt(f)
    return f


@click.group()
@click.version_option(__version__)
def main():
    """Spectral-sequence chart engine for the truncated BP window."""


@main.command("structure-maps")
@click.option("--tmax", type=int, default=16)
@_common_options
def cmd_structure_maps(tmax, config, **kw):
    """Dump right-unit and coproduct tables as JSON."""
    cfg = _load_config(config, kw)
    if tmax % 2:
        raise click.UsageError("tmax must be even")
    K = cfg.precision or 8
    sm = structure_maps(cfg.prime, tmax, K)
    w = sm.w
    # axiom spot-checks; nonzero exit on failure
    try:
        for n in range(1, w.N + 1):
            sm.right_unit(n)
            cop = sm.coproduct(n)
            z = w.zero_expts()
            left = {}
            for (ev, tl, tr), c in cop.items():
                if tl == z:
                    left[(ev, tr)] = left.get((ev, tr), 0) + c
            left = {k: c for k, c in left.items() if c}
            assert left == {(z, w.unit_v(n)): 1}, f"counit fails on t_{n}"
    except (AssertionError, ArithmeticError) as ex:
        click.echo(f"axiom check failed: {ex}", err=True)
        sys.exit(1)
    body = {
        "window": {"prime": cfg.prime, "t_max": tmax, "N": w.N, "K": K},
        "right_unit": {
            f"v{n}": [
                {"coefficient": int(c), "v": list(ev), "t": list(et)}
                for (ev, et), c in sorted(sm.right_unit(n).items())
            ]
            for n in range(1, w.N + 1)
        },
        "coproduct": {
            f"t{n}": [
                {
                    "coefficient": int(c),
                    "v": list(ev),
                    "t": list(tl),
                    "t_right": list(tr),
                }
                for (ev, tl, tr), c in sorted(sm.coproduct(n).items())
            ]
            for n in range(1, w.N + 1)
        },
    }
    _write(cfg, "structure_maps.json", _json_artifact(cfg, body))


@main.command("cobar-dump")
@click.option("--s", type=int, required=True)
@click.option("--t", type=int, required=True)
@click.option("--tmax", type=int, default=None)
@_common_options
def cmd_cobar_dump(s, t, tmax, config, **kw):
    """Dump one bidegree: basis, valuations, differential matrix."""
    cfg = _load_config(config, kw)
    tmax = tmax or max(t, cfg.t_max)
    cx = CobarComplex(TruncationWindow(cfg.prime, tmax, cfg.K))
    basis = cx.basis(s, t)
    lines = [f"# bidegree s={s} t={t} prime={cfg.prime} K={cfg.K}"]
    for k, (alpha, word) in enumerate(basis):
        val = sum(alpha)
        lines.append(f"{k}\tv{list(alpha)}\t{[list(b) for b in word]}\tval={val}")
    _write(cfg, f"cobar_basis_s{s}_t{t}.txt", "\n".join(lines) + "\n")
    _write(cfg, f"cobar_d_s{s}_t{t}.txt", dump_matrix(cx.differential_matrix(s, t)))


@main.command("novikov")
@_common_options
def cmd_novikov(config, **kw):
    """Full pipeline: structure maps, cobar window, pages, charts."""
    cfg = _load_config(config, kw)
    cx, fc = _build_engine(cfg)
    pages, report = e_infinity(fc)
    payload = _pages_payload(fc, report)
    _write(cfg, "pages.json", _json_artifact(cfg, payload))
    e2 = build_novikov_chart(fc, 1)
    einf = build_novikov_chart(fc, "inf")
    for fmt in cfg.formats:
        _write(cfg, f"chart-E2.{fmt}", _chart_with_config(e2, fmt, cfg))
        _write(cfg, f"chart-Einf.{fmt}", _chart_with_config(einf, fmt, cfg))
    rows = verify_table(fc)
    for row in rows:
        click.echo(
            f"{row['status']:>14}  d_{row['length']}({row['source']}) = "
            f"{row['target']} at ({row['stem']},{row['filt']})"
        )


def _chart_with_config(doc, fmt, cfg):
    doc.meta["config"] = cfg.resolved()
    blob = emit(doc, fmt)
    if fmt == "tsv":
        blob = f"# config {json.dumps(cfg.resolved(), sort_keys=True)}\n" + blob
    return blob


@main.command("adams")
@_common_options
def cmd_adams(config, **kw):
    """Classical Steenrod Ext chart via minimal resolution."""
    cfg = _load_config(config, kw)
    s_cap = max(cfg.s_max, 14)
    t_cap = cfg.stem_max + s_cap
    pres = classical_dual_steenrod(t_cap)
    res = MinimalResolution(pres, s_max=s_cap, t_max=t_cap)
    res.build()
    doc = build_classical_chart(res, stem_max=cfg.stem_max, s_cap=s_cap)
    for fmt in cfg.formats:
        _write(cfg, f"chart-classical.{fmt}", _chart_with_config(doc, fmt, cfg))


@main.command("chart")
@click.option("--page", default="inf")
@_common_options
def cmd_chart(page, config, **kw):
    """Recompute and emit a single chart at the requested page."""
    cfg = _load_config(config, kw)
    cx, fc = _build_engine(cfg)
    e_infinity(fc)
    doc = build_novikov_chart(fc, page if page == "inf" else int(page))
    for fmt in cfg.formats:
        _write(cfg, f"chart-p{page}.{fmt}", _chart_with_config(doc, fmt, cfg))


@main.command("verify")
@_common_options
def cmd_verify(config, **kw):
    """Consolidated checks: Koszul, oracles, differential table, Miller."""
    cfg = _load_config(config, kw)
    failures: list[str] = []
    skips: list[str] = []
    results: dict = {}

    # Koszul properties
    try:
        tor_caps = {"fast": (4, 16), "extended": (4, 16), "full": (5, 20)}[cfg.suite]
        results["koszul"] = koszul_check(
            cfg.prime, 16, tor_n_cap=tor_caps[0], tor_t_cap=tor_caps[1]
        )
        click.echo("          PASS  koszul: d1(tau_n) = q_n, E2 in i=0, Tor maps zero")
    except AssertionError as ex:
        failures.append(f"koszul: {ex}")
        click.echo(f"          FAIL  koszul: {ex}")

    # abutment oracle on a guarded window
    try:
        ocx = CobarComplex(TruncationWindow(cfg.prime, 14, 18))
        ofc = FilteredComplexWindow(
            CobarSource(ocx), s_max=6, t_max=14, i_max=7, r_max=7
        )
        rows = total_homology_oracle(ofc)
        results["abutment_oracle"] = {"bidegrees": len(rows)}
        click.echo(f"          PASS  abutment oracle on {len(rows)} bidegrees")
    except (AssertionError, OracleGuardError) as ex:
        failures.append(f"abutment oracle: {ex}")
        click.echo(f"          FAIL  abutment oracle: {ex}")

    # differential table on the configured window
    cx, fc = _build_engine(cfg)
    e_infinity(fc)
    rows = verify_table(fc)
    mandatory_stem = 18 if cfg.suite == "fast" else 41
    results["table"] = rows
    for row in rows:
        click.echo(
            f"{row['status']:>14}  d_{row['length']}({row['source']}) = "
            f"{row['target']} at ({row['stem']},{row['filt']})"
        )
        if row["stem"] > mandatory_stem:
            continue
        if row["status"].startswith("FAIL"):
            failures.append(f"table row {row['source']}")
        elif row["status"] == "OUT-OF-WINDOW":
            skips.append(f"table row {row['source']}")

    # Miller-square coordinate comparison (advisory)
    pres = classical_dual_steenrod(min(cfg.t_max, 34))
    res = MinimalResolution(pres, s_max=min(cfg.s_max + 4, 14), t_max=min(cfg.t_max, 34))
    res.build()
    miller = compare_miller(fc, res, stem_cap=min(cfg.stem_max, 20))
    bad = [r for r in miller if not r["consistent"]]
    results["miller"] = miller
    click.echo(
        f"      ADVISORY  miller square: {len(miller)} d_2 positions, "
        f"{len(bad)} inconsistent"
    )

    report = _json_artifact(cfg, {"results": results, "failures": failures, "skips": skips})
    _write(cfg, "verify.json", report)
    if failures:
        sys.exit(1)
    if skips:
        sys.exit(2)
    sys.exit(0)


if __name__ == "__main__":
    main()
