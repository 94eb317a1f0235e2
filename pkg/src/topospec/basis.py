"""Generalized Gell-Mann basis of su(d) and its Cartan-Weyl structure.

All basis elements are Hermitian, traceless, and normalized to
Tr(T_a T_b) = 2 delta_ab.  For d=2 the basis is the Pauli triple, for d=3
the standard printed lambda_1..lambda_8 ordering is used.  For d >= 4 the
off-diagonal elements are grouped mode-pair by mode-pair (symmetric then
antisymmetric, consecutively) followed by the diagonal elements, so that
every cos/sin partner sits at adjacent indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class BasisElement:
    """One su(d) generator.

    index is 1-based (printed convention).  kind is "sym", "asym" or "diag".
    modes holds the (i, j) mode pair for root-type elements, None for
    diagonal ones.  level is the diagonal depth k for "diag" elements.
    """

    index: int
    kind: str
    matrix: np.ndarray = field(repr=False)
    modes: tuple[int, int] | None = None
    level: int | None = None


@dataclass(frozen=True)
class RootPair:
    """Cartan-Weyl root operator E = |i><j| with its Hermitian combinations.

    sym_index/asym_index are the 1-based positions of (E + E^dag) and
    -i(E - E^dag) inside build_basis(d).
    """

    modes: tuple[int, int]
    raising: np.ndarray = field(repr=False)
    sym_index: int = 0
    asym_index: int = 0


def _sym(d, i, j):
    m = np.zeros((d, d), dtype=np.complex128)
    m[i, j] = 1.0
    m[j, i] = 1.0
    return m


def _asym(d, i, j):
    m = np.zeros((d, d), dtype=np.complex128)
    m[i, j] = -1.0j
    m[j, i] = 1.0j
    return m


def _diag(d, k):
    # k ones followed by -k, scaled to trace-norm 2
    m = np.zeros((d, d), dtype=np.complex128)
    coeff = np.sqrt(2.0 / (k * (k + 1)))
    for i in range(k):
        m[i, i] = coeff
    m[k, k] = -k * coeff
    return m


def build_basis(d: int) -> list[BasisElement]:
    """Return the d^2 - 1 generators in canonical order."""
    if d < 2:
        raise ValueError("need d >= 2")
    out: list[BasisElement] = []
    if d in (2, 3):
        # printed order: for d=3 the first diagonal sits at index 3
        order: list[tuple[str, tuple[int, int] | int]] = [
            ("sym", (0, 1)), ("asym", (0, 1)), ("diag", 1)]
        if d == 3:
            order += [("sym", (0, 2)), ("asym", (0, 2)),
                      ("sym", (1, 2)), ("asym", (1, 2)), ("diag", 2)]
    else:
        order = []
        for i in range(d):
            for j in range(i + 1, d):
                order += [("sym", (i, j)), ("asym", (i, j))]
        order += [("diag", k) for k in range(1, d)]
    for idx, (kind, info) in enumerate(order, start=1):
        if kind == "diag":
            out.append(BasisElement(idx, kind, _diag(d, info), None, info))
        elif kind == "sym":
            out.append(BasisElement(idx, kind, _sym(d, *info), info))
        else:
            out.append(BasisElement(idx, kind, _asym(d, *info), info))
    return out


def nice_pairs(d: int) -> list[tuple[int, int]]:
    """1-based index pairs (cos-like, sin-like) sharing a mode pair."""
    basis = build_basis(d)
    by_modes: dict[tuple[int, int], dict[str, int]] = {}
    for b in basis:
        if b.modes is not None:
            by_modes.setdefault(b.modes, {})[b.kind] = b.index
    return [(v["sym"], v["asym"]) for _, v in sorted(by_modes.items())]


def cartan_weyl(d: int):
    """Split the basis into Cartan (diagonal) matrices and root pairs."""
    basis = build_basis(d)
    cartans = [b.matrix for b in basis if b.kind == "diag"]
    pairs = []
    for sym_idx, asym_idx in nice_pairs(d):
        i, j = basis[sym_idx - 1].modes
        e = np.zeros((d, d), dtype=np.complex128)
        e[i, j] = 1.0
        pairs.append(RootPair((i, j), e, sym_idx, asym_idx))
    return cartans, pairs
