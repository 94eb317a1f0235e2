"""Spectrum assembly over candidate triples.

Enumerates index triples (full census or the named qutrit list), evaluates
every map numerically with the analytic column alongside, checks the
dependency structure of the named qutrit maps, scores spectrum similarity,
and serializes spectra to CSV/JSON plus a dependency-free SVG bar chart.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass
from itertools import combinations, permutations
from multiprocessing import get_context

import numpy as np

from .fields import GridSpec, TripleSpec, triple_field
from .invariants import (CANONICAL_LABELS, QUAD_TOL, canonical_field,
                         singularity_class, singularity_class_label,
                         wrapping_analytic_d3, wrapping_analytic_triple,
                         wrapping_numeric)
from .states import QuditState

TRIVIAL_THRESHOLD = 0.1

_MODE_ALIASES = {"full": "full", "canonical18": "canonical18",
                 "canonical": "canonical18", "reduced": "canonical18"}


def normalize_mode(mode: str | None, d: int) -> str:
    if mode is None:
        mode = "canonical18" if d == 3 else "full"
    key = _MODE_ALIASES.get(str(mode).lower())
    if key is None:
        raise ValueError(f"unknown mode: {mode!r}")
    if key == "canonical18" and d != 3:
        raise ValueError("canonical18 mode needs d = 3")
    return key


def triple_count(d: int) -> int:
    """Number of candidate maps in a full census."""
    return math.comb(d * d - 1, 3)


def independent_count(d: int) -> int:
    """Linearly independent invariants among the nice-pair maps.

    The product formula vanishes at d = 2 through its (d-2) factor, yet
    the qubit map is a genuine invariant, so that dimension is counted
    by hand.
    """
    if d < 2:
        raise ValueError("need d >= 2")
    if d == 2:
        return 1
    return d * (d - 1) * (d - 2) * (d + 3) // 4


@dataclass(frozen=True)
class Capacity:
    """Binary-encoding levels carried by one state."""

    topo_levels: int
    oam_levels: int

    @property
    def topo_bits(self) -> float:
        return math.log2(self.topo_levels) if self.topo_levels > 0 else 0.0

    @property
    def oam_bits(self) -> float:
        return math.log2(self.oam_levels)


def capacity(d: int, independent_only: bool = False) -> Capacity:
    """Encoding capacity: one presence signal per candidate map vs d kets.

    independent_only counts only the provably independent maps instead of
    the full census.
    """
    topo = independent_count(d) if independent_only else triple_count(d)
    return Capacity(topo, d)


def _canonical_indices(label: str) -> tuple[int, int, int]:
    digits = [0 if ch == "*" else int(ch) for ch in label]
    return tuple(digits)


def enumerate_triples(d: int, mode: str | None = None) -> list[TripleSpec]:
    """Candidate triples in deterministic order.

    Full mode lists every index combination lexicographically; the named
    qutrit mode lists the 18 canonical maps, the two starred entries
    carrying the combined diagonal third.
    """
    mode = normalize_mode(mode, d)
    if mode == "full":
        return [TripleSpec(c) for c in combinations(range(1, d * d), 3)]
    return [TripleSpec(_canonical_indices(lab), canonical=lab)
            for lab in CANONICAL_LABELS]


@dataclass(frozen=True)
class SpectrumEntry:
    triple_label: str
    map_class: str
    raw: float
    glued: float
    analytic: float | None
    singular: bool
    trivial: bool
    converged: bool
    quadrature_error: float


@dataclass(frozen=True)
class TopologicalSpectrum:
    d: int
    mode: str
    entries: tuple[SpectrumEntry, ...]

    @property
    def labels(self) -> list[str]:
        return [e.triple_label for e in self.entries]

    def values(self, column: str = "glued") -> np.ndarray:
        out = []
        for e in self.entries:
            v = getattr(e, column)
            out.append(np.nan if v is None else float(v))
        return np.array(out)

    def entry(self, label: str) -> SpectrumEntry:
        for e in self.entries:
            if e.triple_label == label:
                return e
        raise KeyError(label)

    @property
    def nontrivial(self) -> list[SpectrumEntry]:
        return [e for e in self.entries if not e.trivial]

    @property
    def non_converged(self) -> list[str]:
        return [e.triple_label for e in self.entries if not e.converged]


def _is_clean(state) -> bool:
    amps = getattr(state, "amps", None)
    if amps is None:
        return False
    off = amps - np.diag(np.diag(amps))
    return not np.any(off)


_CTX: dict = {}


def _init_worker(state, mode, grid, tol, max_doublings, sign):
    _CTX.update(state=state, mode=mode, grid=grid, tol=tol,
                max_doublings=max_doublings, sign=sign,
                clean=_is_clean(state))


def _evaluate_position(item) -> tuple:
    pos, spec = item
    state: QuditState = _CTX["state"]
    l = state.l
    if spec.canonical is not None:
        field = canonical_field(state, spec.canonical)
        # the exponent catalog assumes clean structure; mixed or perturbed
        # sources get classified from their actual term content
        singular = (singularity_class_label(spec.canonical, l)
                    if _CTX["clean"] else singularity_class(field))
        ana = wrapping_analytic_d3(spec.canonical, l) if _CTX["clean"] else None
    else:
        field = triple_field(state, spec)
        singular = singularity_class(field)
        ana = (wrapping_analytic_triple(l, spec.indices, state.d)
               if _CTX["clean"] else None)
    res = wrapping_numeric(field, _CTX["grid"], singular=singular,
                           tol=_CTX["tol"], max_doublings=_CTX["max_doublings"])
    sign = _CTX["sign"]
    analytic = None if ana is None else sign * ana.glued
    glued = sign * res.glued
    return (pos, SpectrumEntry(spec.label, res.map_class.kind, sign * res.raw,
                               glued, analytic, res.singular,
                               abs(glued) < TRIVIAL_THRESHOLD,
                               res.converged, res.quadrature_error))


def default_workers() -> int:
    env = os.environ.get("TOPOSPEC_THREADS")
    cap = os.cpu_count() or 1
    if env:
        cap = min(cap, max(1, int(env)))
    return cap


def compute_spectrum(state: QuditState, mode: str | None = None,
                     grid: GridSpec | None = None, workers: int | None = None,
                     tol: float = QUAD_TOL, max_doublings: int = 2,
                     photon_swap: bool = False) -> TopologicalSpectrum:
    """Evaluate every candidate map of the state, in parallel.

    Entries keep enumeration order regardless of worker scheduling.  The
    analytic column is filled only for clean (diagonal-amplitude) states,
    where the closed forms apply.  photon_swap flips the orientation
    convention, negating the whole spectrum.
    """
    mode = normalize_mode(mode, state.d)
    specs = enumerate_triples(state.d, mode)
    if grid is None:
        grid = GridSpec(n_r=512 if mode == "canonical18" else 256)
    workers = default_workers() if workers is None else max(1, int(workers))
    sign = -1.0 if photon_swap else 1.0
    items = list(enumerate(specs))
    slots: list[SpectrumEntry | None] = [None] * len(items)
    if workers == 1 or len(items) <= 2:
        _init_worker(state, mode, grid, tol, max_doublings, sign)
        results = map(_evaluate_position, items)
        for pos, entry in results:
            slots[pos] = entry
    else:
        ctx = get_context("fork")
        chunk = max(1, len(items) // (workers * 8))
        with ctx.Pool(workers, initializer=_init_worker,
                      initargs=(state, mode, grid, tol, max_doublings, sign)) as pool:
            for pos, entry in pool.imap_unordered(_evaluate_position, items, chunk):
                slots[pos] = entry
    return TopologicalSpectrum(state.d, mode, tuple(slots))


# ---------------------------------------------------------------------------
# dependency structure

RELATIONS = (
    ("123 - 456 + 674", (("123", 1.0), ("456", -1.0), ("674", 1.0))),
    ("671 - 45* - 126", (("671", 1.0), ("45*", -1.0), ("126", -1.0))),
    ("67* + 451 - 124", (("67*", 1.0), ("451", 1.0), ("124", -1.0))),
)

PAIRWISE_IDENTITIES = (("124", "125"), ("126", "127"), ("451", "452"),
                       ("456", "457"), ("671", "672"), ("674", "675"))


@dataclass(frozen=True)
class RelationCheck:
    name: str
    max_residual: float
    holds: bool


@dataclass(frozen=True)
class DependencyReport:
    d: int
    l_range: int
    n_samples: int
    rank: int
    relations: tuple[RelationCheck, ...]
    pairwise: tuple[RelationCheck, ...]


def dependency_scan(l_range: int, d: int = 3) -> DependencyReport:
    """Rank of the canonical-map value vectors over an index box.

    Builds the 18-vector of closed-form values for every distinct mode
    triple in [-l_range, l_range]^3, reports the matrix rank, and checks
    the three linear dependences and six cos/sin equalities on every
    sample.
    """
    if d != 3:
        raise ValueError("the dependency scan is defined on the qutrit maps")
    if l_range < 3:
        raise ValueError("need l_range >= 3")
    pos = {lab: k for k, lab in enumerate(CANONICAL_LABELS)}
    rows = []
    rel_worst = [0.0] * len(RELATIONS)
    pair_worst = [0.0] * len(PAIRWISE_IDENTITIES)
    span = range(-l_range, l_range + 1)
    for l in permutations(span, 3):
        v = np.array([wrapping_analytic_d3(lab, l).glued
                      for lab in CANONICAL_LABELS])
        rows.append(v)
        for k, (_, combo) in enumerate(RELATIONS):
            s = sum(c * v[pos[lab]] for lab, c in combo)
            rel_worst[k] = max(rel_worst[k], abs(s))
        for k, (a, b) in enumerate(PAIRWISE_IDENTITIES):
            pair_worst[k] = max(pair_worst[k], abs(v[pos[a]] - v[pos[b]]))
    mat = np.array(rows)
    rank = int(np.linalg.matrix_rank(mat))
    relations = tuple(RelationCheck(name, rel_worst[k], rel_worst[k] == 0.0)
                      for k, (name, _) in enumerate(RELATIONS))
    pairwise = tuple(RelationCheck(f"{a} = {b}", pair_worst[k],
                                   pair_worst[k] == 0.0)
                     for k, (a, b) in enumerate(PAIRWISE_IDENTITIES))
    return DependencyReport(d, l_range, len(rows), rank, relations, pairwise)


# ---------------------------------------------------------------------------
# similarity

@dataclass(frozen=True)
class SimilarityScores:
    residual: float
    cosine: float


def similarity(a, e) -> SimilarityScores:
    """Residual and cosine scores between two spectrum vectors.

    residual = 1 - sum(|a| - |e|)^2 / sum|a|; cosine is taken between the
    L1-normalized vectors.  Zero vectors have no direction, so they are
    rejected.
    """
    a = np.asarray(a, dtype=float)
    e = np.asarray(e, dtype=float)
    if a.shape != e.shape:
        raise ValueError("spectrum vectors differ in length")
    l1_a = np.sum(np.abs(a))
    l1_e = np.sum(np.abs(e))
    if l1_a == 0.0 or l1_e == 0.0:
        raise ValueError("similarity of a zero spectrum is undefined")
    residual = 1.0 - float(np.sum((np.abs(a) - np.abs(e)) ** 2)) / l1_a
    ah = a / l1_a
    eh = e / l1_e
    cosine = float(ah @ eh / (np.linalg.norm(ah) * np.linalg.norm(eh)))
    return SimilarityScores(residual, cosine)


# ---------------------------------------------------------------------------
# artifacts

CSV_COLUMNS = ("triple_label", "map_class", "raw", "glued", "analytic",
               "singular", "trivial")


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def write_spectrum_csv(spectrum: TopologicalSpectrum, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for e in spectrum.entries:
            w.writerow([e.triple_label, e.map_class, _fmt(e.raw), _fmt(e.glued),
                        "" if e.analytic is None else _fmt(e.analytic),
                        str(e.singular).lower(), str(e.trivial).lower()])


def spectrum_to_dict(spectrum: TopologicalSpectrum, meta: dict | None = None) -> dict:
    entries = []
    for e in spectrum.entries:
        entries.append({"triple_label": e.triple_label, "map_class": e.map_class,
                        "raw": e.raw, "glued": e.glued, "analytic": e.analytic,
                        "singular": e.singular, "trivial": e.trivial})
    out = {"d": spectrum.d, "mode": spectrum.mode, "entries": entries,
           "meta": dict(meta or {})}
    out["meta"].setdefault("non_converged", spectrum.non_converged)
    return out


def write_spectrum_json(spectrum: TopologicalSpectrum, path,
                        meta: dict | None = None) -> None:
    with open(path, "w") as fh:
        json.dump(spectrum_to_dict(spectrum, meta), fh, indent=1)
        fh.write("\n")


def read_spectrum_values(path) -> tuple[list[str], np.ndarray]:
    """Labels and value column of a spectrum CSV.

    Accepts both the library schema (glued column) and bare comparison
    vectors with a value column.
    """
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ValueError(f"{path}: empty spectrum file")
        col = "glued" if "glued" in reader.fieldnames else "value"
        if col not in reader.fieldnames or "triple_label" not in reader.fieldnames:
            raise ValueError(f"{path}: need triple_label and glued/value columns")
        labels, values = [], []
        for row in reader:
            labels.append(row["triple_label"])
            values.append(float(row[col]))
    return labels, np.array(values)


def svg_bar_chart(labels, values, trivial, path, title: str = "") -> None:
    """Minimal self-contained bar chart of glued values.

    Trivial entries are grayed out.  Censuses wider than 160 bars are cut
    down to their nontrivial entries to stay readable.
    """
    labels = list(labels)
    values = [float(v) for v in values]
    trivial = list(trivial)
    if len(labels) > 160:
        keep = [k for k, t in enumerate(trivial) if not t]
        title = (title + " " if title else "") + \
            f"(nontrivial {len(keep)} of {len(labels)})"
        labels = [labels[k] for k in keep]
        values = [values[k] for k in keep]
        trivial = [False] * len(keep)
    n = max(1, len(labels))
    width, height, pad = 960, 420, 48
    span = max(1e-9, max(abs(v) for v in values) if values else 1.0)
    plot_h = (height - 2 * pad) / 2
    zero_y = pad + plot_h
    bar_w = (width - 2 * pad) / n
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
             f'height="{height}" viewBox="0 0 {width} {height}">',
             f'<rect width="{width}" height="{height}" fill="white"/>']
    if title:
        parts.append(f'<text x="{width / 2:.1f}" y="24" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="15">{title}</text>')
    parts.append(f'<line x1="{pad}" y1="{zero_y:.1f}" x2="{width - pad}" '
                 f'y2="{zero_y:.1f}" stroke="#444" stroke-width="1"/>')
    for k, (lab, v, triv) in enumerate(zip(labels, values, trivial)):
        h = abs(v) / span * plot_h
        x = pad + k * bar_w
        y = zero_y - h if v >= 0 else zero_y
        color = "#b0b0b0" if triv else ("#3b6ea5" if v >= 0 else "#a54242")
        parts.append(f'<rect x="{x + 0.1 * bar_w:.2f}" y="{y:.2f}" '
                     f'width="{0.8 * bar_w:.2f}" height="{h:.2f}" fill="{color}"/>')
        if n <= 40:
            tx = x + 0.5 * bar_w
            ty = height - pad + 14
            parts.append(f'<text x="{tx:.1f}" y="{ty:.1f}" text-anchor="end" '
                         f'font-family="sans-serif" font-size="9" '
                         f'transform="rotate(-55 {tx:.1f} {ty:.1f})">{lab}</text>')
    for v in (span, -span):
        yv = zero_y - v / span * plot_h
        parts.append(f'<text x="{pad - 6}" y="{yv + 4:.1f}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="10">{v:+.3g}</text>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
