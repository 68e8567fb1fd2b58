"""Uniform meshes, the sampled table L of (x, g(x)) pairs, and its diagnostics."""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Optional, Sequence

import gmpy2

from .educated_map import MapConfig, MapResult, educated_g
from .mpcontext import MPReal, PrecContext, to_decimal

NULL_TEXT = "Null"


@dataclass(frozen=True)
class Mesh:
    a: MPReal
    b: MPReal
    h: MPReal
    nodes: tuple[MPReal, ...]

    def __len__(self) -> int:
        return len(self.nodes)

    def summary(self) -> dict:
        return {"a": to_decimal(self.a), "b": to_decimal(self.b), "h": to_decimal(self.h), "nodes": len(self)}


def uniform_mesh(a: MPReal, b: MPReal, h: MPReal) -> Mesh:
    """Nodes ``a + i*h`` (each rounded once), with the last node pinned to ``b``.

    ``(b - a) / h`` must lie within 0.1% of a positive integer.
    """
    ctx = a.ctx
    a, b, h = ctx.real(a), ctx.real(b), ctx.real(h)
    if not a < b:
        raise ValueError("mesh requires a < b")
    if not h > 0:
        raise ValueError("mesh width h must be positive")
    # h <= b - a is enforced by n >= 1 below, which tolerates rounding of b - a
    q = (b - a) / h
    n = int(gmpy2.rint_round(q.value))
    if n < 1 or abs(q - n) > gmpy2.mpfr("1e-3") * n:
        raise ValueError(f"(b - a)/h = {to_decimal(q, 10)} is not an integer; choose h dividing b - a")
    g = ctx.gmp
    nodes = [a] + [MPReal(g.fma(i, h.value, a.value), ctx) for i in range(1, n)] + [b]
    return Mesh(a, b, h, tuple(nodes))


@dataclass(frozen=True)
class SampleList:
    """The table L: one ``(x, g(x))`` pair per mesh node, ``g(x)`` possibly Null."""

    pairs: tuple[tuple[MPReal, MapResult], ...]

    def __iter__(self) -> Iterator[tuple[MPReal, MapResult]]:
        return iter(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def __getitem__(self, i):
        return self.pairs[i]

    def numeric(self) -> list[tuple[MPReal, MPReal]]:
        return [(x, y) for x, y in self.pairs if y is not None]


def sample_map(cfg: MapConfig, mesh: Mesh, threads: Optional[int] = None) -> SampleList:
    """Evaluate the educated map at every mesh node, preserving mesh order."""
    if mesh.a < cfg.a or mesh.b > cfg.b:
        raise ValueError("mesh must lie inside the map interval")
    if threads == 1 or len(mesh) < 2:
        ys = [educated_g(cfg, x) for x in mesh.nodes]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            ys = list(pool.map(lambda x: educated_g(cfg, x), mesh.nodes))
    return SampleList(tuple(zip(mesh.nodes, ys)))


def is_monotone_step(L: SampleList, tol) -> bool:
    ys = [y for _, y in L.numeric()]
    return all(y2 >= y1 - tol for y1, y2 in zip(ys, ys[1:]))


def default_invariance_tol(ctx: PrecContext) -> MPReal:
    return ctx.pow10(1 - ctx.prec_digits)


def samples_agree(L1: SampleList, L2: SampleList, tol) -> bool:
    """Same nodes, same Null pattern, numeric images within ``tol``."""
    if len(L1) != len(L2):
        return False
    for (x1, y1), (x2, y2) in zip(L1, L2):
        if x1 != x2 or (y1 is None) != (y2 is None):
            return False
        if y1 is not None and abs(y1 - y2) > tol:
            return False
    return True


def is_invariant(cfg: MapConfig, mesh: Mesh, tol=None, threads: Optional[int] = None) -> bool:
    """Whether folding once more (k -> k+1) leaves the table unchanged."""
    if tol is None:
        tol = default_invariance_tol(cfg.ctx)
    return samples_agree(
        sample_map(cfg, mesh, threads), sample_map(cfg.with_k(cfg.k + 1), mesh, threads), tol
    )


def samples_to_csv(L: SampleList, config: Optional[dict] = None) -> str:
    buf = io.StringIO()
    if config is not None:
        buf.write("# config: " + json.dumps(config, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "x", "y"])
    for i, (x, y) in enumerate(L):
        w.writerow([i, to_decimal(x), NULL_TEXT if y is None else to_decimal(y)])
    return buf.getvalue()


def samples_from_csv(text: str, ctx: PrecContext) -> SampleList:
    rows = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    pairs = []
    for row in list(csv.DictReader(rows)):
        y = None if row["y"] == NULL_TEXT else ctx.real(row["y"])
        pairs.append((ctx.real(row["x"]), y))
    return SampleList(tuple(pairs))


def write_samples_svg(L: SampleList, path: str | Path, title: str = "", bounds: Sequence = ()) -> None:
    """Scatter of the numeric pairs plus the bisector y = x."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "rootdistiller"
    pts = L.numeric()
    if bounds:
        lo, hi = float(bounds[0]), float(bounds[1])
    else:
        xs = [float(x) for x, _ in L]
        lo, hi = min(xs), max(xs)
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.plot([lo, hi], [lo, hi], color="0.6", lw=0.8, label="y = x")
    ax.scatter([float(x) for x, _ in pts], [float(y) for _, y in pts], s=12, color="C0", label="(x, g(x))")
    ax.set_xlim(lo, hi)
    ax.set_ylim(lo, hi)
    ax.set_xlabel("x")
    ax.set_ylabel("g(x)")
    if title:
        ax.set_title(title)
    ax.legend(loc="upper left")
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
