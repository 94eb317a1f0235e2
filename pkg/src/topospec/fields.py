"""Bloch-vector component fields and unit-sphere triple maps.

Every generator expectation m_a(r, phi) = psi^dag T_a psi is a finite sum
of pair terms f_j(r) f_j'(r) (alpha cos(D phi) + beta sin(D phi)) with
D = l_j' - l_j, which gives exact radial and azimuthal derivatives for
free.  A UnitField bundles the three components of a triple in canonical
arrangement (cos-like, sin-like, third) together with the origin-fix
policy that repairs wedge discontinuities of root-type thirds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .basis import BasisElement, build_basis, nice_pairs
from .states import QuditState, radial_profile


@dataclass(frozen=True)
class GridSpec:
    """Integration grid.  n_r counts Simpson panels, phi uses midpoints.

    The radial integral runs over the full annulus [r_min, inf) through the
    compactification u = r / (1 + r); boundary limits are approached only
    algebraically (the Gaussian envelopes cancel inside the normalized
    field), so a finite cutoff would leave visible truncation errors on
    slowly closing maps.  r_max only anchors the classifier probes.
    """

    r_min: float = 1e-3
    r_max: float | None = None
    n_r: int = 4096
    n_phi: int | None = None
    tail_eps: float = 1e-6

    def resolve(self, l) -> "GridSpec":
        r_max = self.r_max
        if r_max is None:
            r_max = float(np.sqrt(max(abs(x) for x in l)) + 6.0) if any(l) else 6.0
        n_phi = self.n_phi
        if n_phi is None:
            spread = max(l) - min(l)
            n_phi = 64 * max(1, int(spread))
        return GridSpec(self.r_min, r_max, int(self.n_r), int(n_phi), self.tail_eps)

    def radial_rule(self, doublings: int = 0):
        """Simpson nodes r and weights (jacobian included) on the u-line."""
        n = self.n_r * (2 ** doublings)
        u0 = self.r_min / (1.0 + self.r_min)
        u = np.linspace(u0, 1.0 - self.tail_eps, n + 1)
        h = (u[-1] - u[0]) / n
        w = np.full(n + 1, 2.0)
        w[1::2] = 4.0
        w[0] = w[-1] = 1.0
        w *= h / 3.0
        r = u / (1.0 - u)
        return r, w / (1.0 - u) ** 2

    def phi_nodes(self) -> np.ndarray:
        n = self.n_phi
        return (np.arange(n) + 0.5) * (2.0 * np.pi / n)


@dataclass(frozen=True)
class TermField:
    """One component as pair terms over mode indices (j <= jp)."""

    l: tuple[int, ...]
    js: np.ndarray
    jps: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray

    def evaluate(self, r, phi, profiles=None, scaled=False):
        """Return (m, dm/dr, dm/dphi) on the outer-product grid.

        scaled=True drops the common Gaussian envelope from every term
        (and from the radial derivative).  Normalized quantities built
        through the tangent-projection quotient rule are unaffected, and
        the scaled fields stay representable at any radius.
        """
        r = np.asarray(r, dtype=float)
        phi = np.asarray(phi, dtype=float)
        if profiles is None:
            if scaled:
                profiles = {j: r ** abs(self.l[j])
                            for j in set(self.js) | set(self.jps)}
            else:
                profiles = {j: radial_profile(self.l[j], r)
                            for j in set(self.js) | set(self.jps)}
        m = np.zeros((r.size, phi.size))
        mr = np.zeros_like(m)
        mp = np.zeros_like(m)
        envelope = 0.0 if scaled else 4.0
        for j, jp, a, b in zip(self.js, self.jps, self.alpha, self.beta):
            prod = profiles[j] * profiles[jp]
            dprod = ((abs(self.l[j]) + abs(self.l[jp])) / r - envelope * r) * prod
            delta = self.l[jp] - self.l[j]
            c, s = np.cos(delta * phi), np.sin(delta * phi)
            ang = a * c + b * s
            dang = delta * (-a * s + b * c)
            m += prod[:, None] * ang[None, :]
            mr += dprod[:, None] * ang[None, :]
            mp += prod[:, None] * dang[None, :]
        return m, mr, mp


def term_field(source, matrix: np.ndarray, tol: float = 1e-14) -> TermField:
    """Pair-term representation of the generator expectation.

    source is a QuditState or anything exposing l and coeff(matrix); the
    density-matrix route plugs in through the same coefficient contract.
    """
    coeff = source.coeff(matrix)
    d = len(source.l)
    js, jps, alpha, beta = [], [], [], []
    for j in range(d):
        if abs(coeff[j, j].real) > tol:
            js.append(j); jps.append(j)
            alpha.append(coeff[j, j].real); beta.append(0.0)
        for jp in range(j + 1, d):
            a = 2.0 * coeff[j, jp].real
            b = -2.0 * coeff[j, jp].imag
            if abs(a) > tol or abs(b) > tol:
                js.append(j); jps.append(jp)
                alpha.append(a); beta.append(b)
    return TermField(tuple(source.l), np.array(js, dtype=int),
                     np.array(jps, dtype=int), np.array(alpha), np.array(beta))


def component_field(state: QuditState, index: int) -> TermField:
    """Field of the 1-based basis component index."""
    basis = build_basis(state.d)
    return term_field(state, basis[index - 1].matrix)


@dataclass(frozen=True)
class TripleSpec:
    """Three distinct 1-based basis indices defining a candidate map.

    canonical tags the triple as one of the named qutrit maps; the
    starred ones replace the third axis with a combined diagonal (index
    slot 0), so they must be built through the canonical-field
    constructor rather than straight from basis indices.
    """

    indices: tuple[int, int, int]
    canonical: str | None = None

    def __post_init__(self):
        idx = tuple(sorted(int(i) for i in self.indices))
        if len(set(idx)) != 3:
            raise ValueError("triple needs three distinct indices")
        if self.canonical is None and min(idx) < 1:
            raise ValueError("basis indices are 1-based")
        object.__setattr__(self, "indices", idx)

    @property
    def label(self) -> str:
        if self.canonical is not None:
            return self.canonical
        return "-".join(str(i) for i in self.indices)


@dataclass(frozen=True)
class UnitField:
    """Triple map in canonical arrangement with its fix policy.

    components are ordered (cos-like, sin-like, third) when a nice pair is
    present (an even rotation of the sorted triple, so orientation is
    unchanged), otherwise in sorted index order.  sigma = +-1 is the
    orientation gauge applied as third -> sigma*|third| for root-type
    thirds; sigma = 0 means no fix.
    """

    l: tuple[int, ...]
    terms: tuple[TermField, TermField, TermField]
    indices: tuple[int, int, int]
    arrangement: tuple[int, int, int]
    sigma: float
    pair_modes: tuple[int, int] | None
    omega: int

    def evaluate(self, r, phi, fix: bool = True, scaled: bool = False):
        """Stacked S-tilde and partials, shape (3, nr, nphi) each."""
        r = np.asarray(r, dtype=float)
        modes = set()
        for t in self.terms:
            modes |= set(t.js) | set(t.jps)
        if scaled:
            profiles = {j: r ** abs(self.l[j]) for j in modes}
        else:
            profiles = {j: radial_profile(self.l[j], r) for j in modes}
        m = np.empty((3, r.size, np.asarray(phi).size))
        mr = np.empty_like(m)
        mp = np.empty_like(m)
        for k, t in enumerate(self.terms):
            m[k], mr[k], mp[k] = t.evaluate(r, phi, profiles, scaled)
        if fix and self.sigma != 0.0:
            sgn = np.sign(m[2])
            sgn[sgn == 0.0] = 1.0
            m[2] = self.sigma * sgn * m[2]
            mr[2] = self.sigma * sgn * mr[2]
            mp[2] = self.sigma * sgn * mp[2]
        return m, mr, mp

    def unit(self, r, phi, fix: bool = True):
        """Normalized S and its partials via the tangent-projection rule.

        Works on envelope-free fields with a per-radius rescale first:
        both drop out of S and of the projected derivatives, while keeping
        every intermediate in floating-point range at any radius.
        """
        m, mr, mp = self.evaluate(r, phi, fix, scaled=True)
        peak = np.max(np.abs(m), axis=(0, 2))
        peak = np.where(peak == 0.0, 1.0, peak)[None, :, None]
        m, mr, mp = m / peak, mr / peak, mp / peak
        nrm = np.sqrt(np.sum(m * m, axis=0))
        nrm = np.where(nrm == 0.0, 1.0, nrm)
        s = m / nrm
        sr = (mr - s * np.sum(s * mr, axis=0)) / nrm
        sp = (mp - s * np.sum(s * mp, axis=0)) / nrm
        return s, sr, sp


def detect_nice_pair(d: int, indices: tuple[int, int, int], basis=None):
    """Positions (cos, sin, third) of a nice pair inside the triple, or None."""
    pairs = {p: k for k, p in enumerate(nice_pairs(d))}
    idx = list(indices)
    for a in range(3):
        for b in range(3):
            if a != b and (idx[a], idx[b]) in pairs:
                third = 3 - a - b
                return (a, b, third)
    return None


def triple_field(state: QuditState, spec: TripleSpec) -> UnitField:
    """Build the arranged unit-field for a basis-index triple."""
    if spec.canonical is not None:
        raise ValueError("canonical triples build through canonical_field")
    d = state.d
    basis = build_basis(d)
    idx = spec.indices
    found = detect_nice_pair(d, idx, basis)
    if found is None:
        arrangement = (0, 1, 2)
        sigma = 0.0
        pair_modes = None
        omega = 0
    else:
        arrangement = found
        third_el = basis[idx[found[2]] - 1]
        pair_modes = basis[idx[found[0]] - 1].modes
        omega = state.l[pair_modes[0]] - state.l[pair_modes[1]]
        if third_el.kind == "diag":
            sigma = 0.0
        elif d == 3 and idx[found[0]] == 4:
            sigma = -1.0   # (4,5)-family orientation gauge
        else:
            sigma = 1.0
    terms = tuple(term_field(state, basis[idx[k] - 1].matrix) for k in arrangement)
    return UnitField(state.l, terms, idx, arrangement, sigma, pair_modes, omega)


@dataclass(frozen=True)
class MapClass:
    """Boundary diagnostics of the (fixed) unit map."""

    kind: str               # "sphere" | "disk" | "degenerate"
    v_inner: float
    v_outer: float
    inner_point: bool
    outer_point: bool


def _ring_variance(field: UnitField, r: float, phi: np.ndarray) -> np.ndarray:
    s, _, _ = field.unit(np.array([r]), phi)
    return s[:, 0, :]


def classify_map(field: UnitField, grid: GridSpec, n_probe: int = 256) -> MapClass:
    """Trend-based boundary classification.

    A radial end maps to a point when the phi-variance of S decays toward
    it (ratio < 0.5 between an end ring and one at twice/half the radius),
    a surviving trace makes the map disk-like, and an image with no area
    at all (phi-independent, or r-independent) is degenerate.
    """
    g = grid.resolve(field.l)
    phi = (np.arange(n_probe) + 0.5) * (2.0 * np.pi / n_probe)
    rings = {}
    radii = {"in0": g.r_min, "in1": 2.0 * g.r_min,
             "mid0": 0.25 * g.r_max, "mid1": 0.5 * g.r_max, "out": g.r_max}
    for key, r in radii.items():
        rings[key] = _ring_variance(field, r, phi)

    def var(ring):
        return float(np.sum(np.var(ring, axis=1)))

    v_in, v_in1 = var(rings["in0"]), var(rings["in1"])
    v_out, v_out1 = var(rings["out"]), var(rings["mid1"])
    tiny = 1e-12
    inner_point = v_in < tiny or (v_in1 > 0 and v_in / v_in1 < 0.5)
    outer_point = v_out < tiny or (v_out1 > 0 and v_out / v_out1 < 0.5)

    all_tiny = all(var(rings[k]) < tiny for k in rings)
    r_indep = max(
        float(np.max(np.abs(rings["mid0"] - rings["mid1"]))),
        float(np.max(np.abs(rings["mid1"] - rings["out"]))),
        float(np.max(np.abs(rings["in0"] - rings["mid0"]))),
    ) < 1e-9
    if all_tiny or r_indep:
        kind = "degenerate"
    elif inner_point and outer_point:
        kind = "sphere"
    else:
        kind = "disk"
    return MapClass(kind, v_in, v_out, inner_point, outer_point)
