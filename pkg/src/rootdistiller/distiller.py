"""Filtering the sampled table into roots with error estimates.

Pipeline: numeric pairs -> near the bisector (data1) -> adjacent pairs with a
sign change of y - x (data2) -> deduplicated images (union) -> small residual
(finalA) -> small error estimate g(y) - y (final).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .educated_map import MapConfig, educated_g
from .grid_sampler import Mesh, SampleList, sample_map
from .mpcontext import MPReal, PrecContext, to_decimal
from .polynomial import Polynomial, compensated_horner_eval

Point = tuple[MPReal, MPReal]
Bracket = tuple[Point, Point]


@dataclass(frozen=True)
class FilterParams:
    bisector_c: MPReal
    residual_threshold: MPReal
    error_tol: MPReal
    dedup_tol: MPReal

    def __post_init__(self):
        for name in ("bisector_c", "residual_threshold", "error_tol", "dedup_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")

    @classmethod
    def defaults(cls, ctx: PrecContext, **overrides) -> "FilterParams":
        """Defaults scaled to the working precision ``p`` (decimal digits).

        bisector_c = 0.1, dedup_tol = 1e-p, error_tol = 1e(1-p) and
        residual_threshold = 1e(-ceil(p/2)). Overrides may be decimal strings.
        """
        p = ctx.prec_digits
        values = {
            "bisector_c": ctx.real("0.1"),
            "residual_threshold": ctx.pow10(-((p + 1) // 2)),
            "error_tol": ctx.pow10(1 - p),
            "dedup_tol": ctx.pow10(-p),
        }
        for key, v in overrides.items():
            if v is not None:
                values[key] = ctx.real(v)
        return cls(**values)

    def to_dict(self) -> dict:
        return {k: to_decimal(getattr(self, k), 10) for k in
                ("bisector_c", "residual_threshold", "error_tol", "dedup_tol")}


@dataclass(frozen=True)
class RootEstimate:
    root: MPReal
    error_estimate: MPReal
    residual: MPReal
    bracket: Optional[tuple[MPReal, MPReal]]

    def to_dict(self) -> dict:
        return {
            "root": to_decimal(self.root),
            "error_estimate": to_decimal(self.error_estimate),
            "residual": to_decimal(self.residual),
            "bracket": None if self.bracket is None else [to_decimal(v) for v in self.bracket],
        }


@dataclass
class RootReport:
    roots: list[RootEstimate]
    cfg: MapConfig
    params: FilterParams
    mesh: Mesh
    stage_counts: dict[str, int]
    samples: Optional[SampleList] = field(default=None, repr=False)

    def to_dict(self, run_config: Optional[dict] = None) -> dict:
        cfg = self.cfg
        out = {
            "roots": [r.to_dict() for r in self.roots],
            "root_count": len(self.roots),
            "stage_counts": dict(self.stage_counts),
            "map": {
                "a": to_decimal(cfg.a),
                "b": to_decimal(cfg.b),
                "k": cfg.k,
                "order": str(cfg.order),
                "prec_digits": cfg.ctx.prec_digits,
                "prec_bits": cfg.ctx.prec_bits,
                "degree": cfg.f.degree,
                "scheme": cfg.scheme,
            },
            "filter": self.params.to_dict(),
            "mesh": self.mesh.summary(),
        }
        if run_config is not None:
            out["config"] = run_config
        return out


def filter_near_bisector(L: Iterable, c) -> list[Point]:
    """Numeric pairs with ``|y - x|**2 < c``, in order."""
    return [(x, y) for x, y in L if y is not None and (y - x) * (y - x) < c]


def bracket_sign_changes(data1: Sequence[Point]) -> list[Bracket]:
    out = []
    for p, q in zip(data1, data1[1:]):
        if ((p[1] - p[0]) * (q[1] - q[0])).sign() < 0:
            out.append((p, q))
    return out


def _union_with_origin(data2: Sequence[Bracket], dedup_tol) -> list[tuple[MPReal, tuple[MPReal, MPReal]]]:
    """Ascending distinct images, each tagged with an originating bracket.

    Values within ``dedup_tol`` of a cluster's first (smallest) value join that
    cluster. The tag prefers a bracket whose nodes enclose the value.
    """
    tagged = []
    for order, (p, q) in enumerate(data2):
        for _, y in (p, q):
            tagged.append((y, order, (p[0], q[0])))
    tagged.sort(key=lambda t: (t[0].value, t[1]))
    clusters: list[list] = []
    for y, _, br in tagged:
        if clusters and y - clusters[-1][0] < dedup_tol:
            clusters[-1][1].append(br)
        else:
            clusters.append([y, [br]])
    out = []
    for rep, brs in clusters:
        enclosing = [br for br in brs if br[0] <= rep <= br[1]]
        out.append((rep, (enclosing or brs)[0]))
    return out


def dedup_union(data2: Sequence[Bracket], dedup_tol) -> list[MPReal]:
    return [y for y, _ in _union_with_origin(data2, dedup_tol)]


def residual_filter(union: Iterable[MPReal], f: Polynomial, residual_threshold,
                    evaluate=compensated_horner_eval) -> list[MPReal]:
    return [y for y in union if abs(evaluate(f, y)) < residual_threshold]


def error_estimate(cfg: MapConfig, y: MPReal) -> Optional[MPReal]:
    """``g(y) - y``, or None when ``g(y)`` is Null (estimate unavailable)."""
    gy = educated_g(cfg, y)
    return None if gy is None else gy - y


def error_filter(finalA: Sequence[MPReal], cfg: MapConfig, error_tol,
                 origins: Optional[dict] = None, threads: Optional[int] = None) -> list[RootEstimate]:
    origins = origins or {}
    if threads == 1 or len(finalA) < 2:
        errors = [error_estimate(cfg, y) for y in finalA]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            errors = list(pool.map(lambda y: error_estimate(cfg, y), finalA))
    out = []
    for y, err in zip(finalA, errors):
        if err is None or not abs(err) < error_tol:
            continue
        out.append(RootEstimate(y, err, abs(cfg.evaluate(cfg.f, y)), origins.get(y)))
    return out


def platform_representative(L: SampleList, dedup_tol=None) -> list[MPReal]:
    """One root per platform: the image closest to its node.

    A platform is a maximal run of consecutive nodes whose images agree within
    ``dedup_tol``; a Null node ends a run. Representatives from different
    platforms that agree within ``dedup_tol`` are reported once.
    """
    platforms: list[list[Point]] = []
    current: list[Point] = []
    for x, y in L:
        if y is None:
            if current:
                platforms.append(current)
            current = []
            continue
        if dedup_tol is None:
            dedup_tol = y.ctx.pow10(-y.ctx.prec_digits)
        if current and abs(y - current[-1][1]) > dedup_tol:
            platforms.append(current)
            current = []
        current.append((x, y))
    if current:
        platforms.append(current)
    reps = sorted((min(pl, key=lambda p: abs(p[1] - p[0]).value)[1] for pl in platforms),
                  key=lambda v: v.value)
    out: list[MPReal] = []
    for v in reps:
        if not out or v - out[-1] > dedup_tol:
            out.append(v)
    return out


def distill(cfg: MapConfig, mesh: Mesh, params: Optional[FilterParams] = None,
            threads: Optional[int] = None) -> RootReport:
    if params is None:
        params = FilterParams.defaults(cfg.ctx)
    L = sample_map(cfg, mesh, threads)
    data = L.numeric()
    data1 = filter_near_bisector(data, params.bisector_c)
    data2 = bracket_sign_changes(data1)
    tagged = _union_with_origin(data2, params.dedup_tol)
    union = [y for y, _ in tagged]
    finalA = residual_filter(union, cfg.f, params.residual_threshold, cfg.evaluate)
    final = error_filter(finalA, cfg, params.error_tol, origins=dict(tagged), threads=threads)
    counts = {
        "nodes": len(L),
        "data": len(data),
        "data1": len(data1),
        "data2": len(data2),
        "union": len(union),
        "finalA": len(finalA),
        "final": len(final),
    }
    return RootReport(final, cfg, params, mesh, counts, samples=L)
