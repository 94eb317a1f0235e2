"""Projective coincidence tomography for biphoton mode states.

Simulates the per-photon projector censuses (basis kets plus four-phase
two-mode superpositions), reconstructs the joint density matrix by
factorized chi-square descent with optional entry thresholding, scores
the reconstruction, and feeds the density matrix back into the spectrum
pipeline through the shared coefficient contract.
"""

from __future__ import annotations

import json
import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .fields import GridSpec
from .spectrum import TopologicalSpectrum, compute_spectrum

THETAS = (0.0, 0.5 * np.pi, np.pi, 1.5 * np.pi)


@dataclass(frozen=True)
class ProjectionSet:
    """Per-photon projector census over a mode subspace.

    Holds the d basis kets first, then for every mode pair the four
    equal-weight superpositions with phases 0, pi/2, pi, 3pi/2.  The same
    census is used on both photons, giving K^2 coincidence settings.
    """

    d: int
    subspace_l: tuple[int, ...]
    projectors: np.ndarray        # K x d complex unit rows
    labels: tuple[str, ...]

    @property
    def K(self) -> int:
        return self.projectors.shape[0]


def projection_count(d: int) -> int:
    return 4 * math.comb(d, 2) + d


def projection_set(d: int, subspace_l) -> ProjectionSet:
    """Basis kets plus the four-phase pair superpositions, in census order."""
    subspace_l = tuple(int(x) for x in subspace_l)
    if len(subspace_l) != d:
        raise ValueError("subspace_l length must equal d")
    if len(set(subspace_l)) != d:
        raise ValueError("subspace_l entries must be distinct")
    rows = []
    labels = []
    for n, ln in enumerate(subspace_l):
        e = np.zeros(d, dtype=complex)
        e[n] = 1.0
        rows.append(e)
        labels.append(f"b{ln}")
    for n in range(d):
        for m in range(n + 1, d):
            for k, theta in enumerate(THETAS):
                v = np.zeros(d, dtype=complex)
                v[n] = 1.0
                v[m] = np.exp(1j * theta)
                rows.append(v / np.sqrt(2.0))
                labels.append(f"p{subspace_l[n]}_{subspace_l[m]}_t{k}")
    proj = np.array(rows)
    assert proj.shape[0] == projection_count(d)
    return ProjectionSet(d, subspace_l, proj, tuple(labels))


@dataclass(frozen=True)
class NoiseModel:
    """Counting-noise description for the forward model."""

    poisson: bool = True
    crosstalk_sigma: float | None = None
    crosstalk_amp: float = 0.01


def _joint_vector(state) -> np.ndarray:
    return np.asarray(state.amps, dtype=complex).reshape(-1)


@dataclass(frozen=True)
class CoincidenceMatrix:
    counts: np.ndarray            # K x K nonnegative
    labels: tuple[str, ...]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=float)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValueError("counts must be a square matrix")
        if np.any(c < 0):
            raise ValueError("counts must be nonnegative")
        if len(self.labels) != c.shape[0]:
            raise ValueError("one label per measurement setting is required")
        object.__setattr__(self, "counts", c)


def simulate_coincidences(source, pset: ProjectionSet, total_counts: float = 1e4,
                          noise: NoiseModel | str | None = None,
                          rng: np.random.Generator | None = None) -> CoincidenceMatrix:
    """Forward-model coincidence counts for a state or density matrix.

    The ideal rate of setting (m, n) is the squared overlap of projector
    m on the first photon and n on the second with the joint state, times
    total_counts.  Optional crosstalk adds a Gaussian mode-distance leak
    inside the basis block; Poisson noise then samples every entry.
    """
    if isinstance(noise, str):
        key = noise.lower()
        if key in ("none", ""):
            noise = None
        elif key == "poisson":
            noise = NoiseModel()
        elif key == "crosstalk":
            noise = NoiseModel(crosstalk_sigma=2.0)
        else:
            raise ValueError(f"unknown noise model: {noise!r}")
    P = pset.projectors
    if hasattr(source, "amps"):
        psi = np.asarray(source.amps, dtype=complex)
        amp = P.conj() @ psi @ P.conj().T
        rates = np.abs(amp) ** 2
    else:
        rho = source.rho if isinstance(source, BiphotonDensity) \
            else np.asarray(source, dtype=complex)
        d = pset.d
        if rho.shape != (d * d, d * d):
            raise ValueError("density matrix size does not match the census")
        rho4 = rho.reshape(d, d, d, d)
        # rate[m, n] = (p_m x p_n)^dag rho (p_m x p_n)
        rates = np.real(np.einsum("ma,nb,abcd,mc,nd->mn",
                                  P.conj(), P.conj(), rho4, P, P))
        rates = np.clip(rates, 0.0, None)
    meta = {"total_counts": float(total_counts), "noise": "none"}
    if noise is not None and noise.crosstalk_sigma:
        d = pset.d
        ls = np.array(pset.subspace_l, dtype=float)
        base = noise.crosstalk_amp * float(np.mean(np.diag(rates[:d, :d])))
        dl = ls[:, None] - ls[None, :]
        leak = base * np.exp(-dl ** 2 / (2.0 * noise.crosstalk_sigma ** 2))
        np.fill_diagonal(leak, 0.0)
        rates = rates.copy()
        rates[:d, :d] += leak
        meta["crosstalk_sigma"] = noise.crosstalk_sigma
    counts = rates * float(total_counts)
    if noise is not None and noise.poisson:
        rng = rng or np.random.default_rng()
        counts = rng.poisson(counts).astype(float)
        meta["noise"] = ("poisson+crosstalk" if noise.crosstalk_sigma
                         else "poisson")
    elif noise is not None and noise.crosstalk_sigma:
        meta["noise"] = "crosstalk"
    return CoincidenceMatrix(counts, pset.labels, meta)


def epsilon_from_crosstalk(C: CoincidenceMatrix, pset: ProjectionSet) -> float:
    """Threshold estimate: worst forbidden basis coincidence, as a fraction.

    Off-diagonal basis-block settings are dark for conjugate-mode pairs, so
    whatever shows up there measures the leak floor; dividing by the basis
    diagonal total puts it on the density-matrix entry scale.
    """
    d = pset.d
    block = C.counts[:d, :d]
    diag_total = float(np.trace(block))
    if diag_total <= 0:
        return 0.0
    off = block[~np.eye(d, dtype=bool)]
    return float(np.max(off)) / diag_total if off.size else 0.0


@dataclass(frozen=True)
class BiphotonDensity:
    """Joint density matrix over the d^2 two-photon mode basis."""

    rho: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError("rho must be square")
        if not np.allclose(rho, rho.conj().T, atol=1e-9):
            raise ValueError("rho must be Hermitian")
        if abs(np.trace(rho).real - 1.0) > 1e-8:
            raise ValueError("rho must have unit trace")
        if float(np.linalg.eigvalsh(rho).min()) < -1e-8:
            raise ValueError("rho must be positive semidefinite")
        object.__setattr__(self, "rho", rho)

    @property
    def d(self) -> int:
        return int(round(math.isqrt(self.rho.shape[0])))


def _psd_project(rho: np.ndarray) -> np.ndarray:
    rho = 0.5 * (rho + rho.conj().T)
    lam, u = np.linalg.eigh(rho)
    lam = np.clip(lam, 0.0, None)
    if lam.sum() == 0.0:
        raise ValueError("density projection collapsed to zero")
    rho = (u * lam) @ u.conj().T
    return rho / np.trace(rho).real


@dataclass(frozen=True)
class ReconstructionResult:
    rho: BiphotonDensity
    chi2: float
    n_iter: int
    grad_norm: float
    converged: bool


def _settings_matrix(pset: ProjectionSet) -> np.ndarray:
    """Columns are the joint projector vectors, settings in row-major order."""
    P = pset.projectors
    K, d = P.shape
    V = np.empty((d * d, K * K), dtype=complex)
    for m in range(K):
        for n in range(K):
            V[:, m * K + n] = np.kron(P[m], P[n])
    return V


def _linear_inversion(V: np.ndarray, y: np.ndarray, d2: int) -> np.ndarray:
    design = np.einsum("ai,bi->iab", V.conj(), V).reshape(len(y), d2 * d2)
    x, *_ = np.linalg.lstsq(design, y.astype(complex), rcond=None)
    return x.reshape(d2, d2)


def reconstruct(C: CoincidenceMatrix, pset: ProjectionSet, epsilon: float = 0.0,
                max_iters: int = 10_000, grad_tol: float = 1e-8) -> ReconstructionResult:
    """Chi-square fit of a PSD unit-trace density to measured coincidences.

    The density is parameterized as G^dag G / Tr(G^dag G), descended along
    the exact chi-square gradient with an adaptive step (halved whenever a
    step would increase chi-square, so accepted values never increase).
    The descent counts as converged at a small gradient, when no step of
    any size improves the fit, or when the fit value has stalled at
    relative machine precision for many consecutive iterations; only a
    budget exhausted while still making progress reports non-convergence.
    Afterwards entries at or below epsilon are zeroed and the matrix is
    projected back to the physical set; epsilon = 0 leaves the optimizer
    output untouched.
    """
    counts = C.counts.reshape(-1).astype(float)
    total = counts.sum()
    if total <= 0:
        raise ValueError("coincidence matrix is all zero")
    K = pset.K
    if C.counts.shape != (K, K):
        raise ValueError("coincidence matrix does not match the census")
    d2 = pset.d * pset.d
    y = counts / total
    V = _settings_matrix(pset)

    rho0 = _linear_inversion(V, y, d2)
    rho0 = 0.5 * (rho0 + rho0.conj().T)
    lam, u = np.linalg.eigh(rho0)
    lam = np.clip(lam, 0.0, None) + 1e-4
    lam /= lam.sum()
    G = (u * np.sqrt(lam)).conj().T

    floor = 1e-9

    def forward(Gm):
        X = Gm @ V
        t = np.sum(np.abs(X) ** 2, axis=0)
        S = t.sum()
        p = t / S
        pc = np.maximum(p, floor)
        chi = float(np.sum((y - p) ** 2 / pc))
        return t, S, p, pc, chi

    t, S, p, pc, chi = forward(G)
    step = 0.1
    gnorm = np.inf
    it = 0
    stall = 0
    stalled = False
    for it in range(1, max_iters + 1):
        resid = y - p
        g = np.where(p > floor,
                     -2.0 * resid / pc - resid ** 2 / pc ** 2,
                     -2.0 * resid / pc)
        q = (g - float(g @ p)) / S
        grad = 2.0 * (G @ ((V * q) @ V.conj().T))
        gnorm = float(np.linalg.norm(grad))
        if gnorm < grad_tol:
            break
        accepted = False
        chi_prev = chi
        while step > 1e-16:
            cand = G - step * grad
            t2, S2, p2, pc2, chi2 = forward(cand)
            if chi2 <= chi:
                G, t, S, p, pc, chi = cand, t2, S2, p2, pc2, chi2
                step *= 1.2
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        if chi_prev - chi <= 1e-12 * max(chi, 1e-30):
            stall += 1
            if stall >= 25:
                stalled = True
                break
        else:
            stall = 0
    H = G.conj().T @ G
    rho = H / np.trace(H).real
    if epsilon > 0.0:
        rho = np.where(np.abs(rho) <= epsilon, 0.0, rho)
        rho = _psd_project(rho)
    converged = gnorm < grad_tol or stalled or it < max_iters
    return ReconstructionResult(BiphotonDensity(rho), chi * total, it, gnorm,
                                converged)


# ---------------------------------------------------------------------------
# metrics

def _sqrtm_psd(m: np.ndarray) -> np.ndarray:
    lam, u = np.linalg.eigh(0.5 * (m + m.conj().T))
    lam = np.clip(lam, 0.0, None)
    return (u * np.sqrt(lam)) @ u.conj().T


def fidelity(rho_t: np.ndarray, rho_m: np.ndarray) -> float:
    """Uhlmann fidelity between two density matrices."""
    a = _sqrtm_psd(np.asarray(rho_t, dtype=complex))
    inner = _sqrtm_psd(a @ np.asarray(rho_m, dtype=complex) @ a)
    return float(np.real(np.trace(inner)) ** 2)


def purity(rho: np.ndarray) -> float:
    rho = np.asarray(rho, dtype=complex)
    return float(np.real(np.trace(rho @ rho)))


def concurrence(rho: np.ndarray) -> float:
    """Two-qubit-pair entanglement monotone from the spin-flipped overlap."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("concurrence is defined for a 4 x 4 density matrix")
    sy = np.array([[0.0, -1j], [1j, 0.0]])
    flip = np.kron(sy, sy)
    lam = np.linalg.eigvals(rho @ flip @ rho.conj() @ flip)
    lam = np.sqrt(np.clip(np.real(lam), 0.0, None))
    lam = np.sort(lam)[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


@dataclass(frozen=True)
class Metrics:
    fidelity: float
    purity: float
    concurrence: float | None


def metrics(rho_t, rho_m) -> Metrics:
    """Reconstruction quality: fidelity to target, purity, pair concurrence.

    Purity and concurrence describe the measured matrix; concurrence only
    exists for the two-mode biphoton (4 x 4) case and is None otherwise.
    """
    rho_t = rho_t.rho if isinstance(rho_t, BiphotonDensity) else np.asarray(rho_t)
    rho_m = rho_m.rho if isinstance(rho_m, BiphotonDensity) else np.asarray(rho_m)
    if rho_t.shape != rho_m.shape:
        raise ValueError("density matrices differ in size")
    conc = concurrence(rho_m) if rho_m.shape == (4, 4) else None
    return Metrics(fidelity(rho_t, rho_m), purity(rho_m), conc)


# ---------------------------------------------------------------------------
# density-matrix spectrum route

@dataclass(frozen=True)
class DensityCoeffs:
    """Coefficient source backed by a joint density matrix.

    Exposes the same l/coeff contract as a pure state, letting every
    field constructor run unchanged on mixed or reconstructed states.
    """

    l: tuple[int, ...]
    rho: np.ndarray

    @property
    def d(self) -> int:
        return len(self.l)

    def coeff(self, matrix: np.ndarray) -> np.ndarray:
        d = self.d
        rho4 = self.rho.reshape(d, d, d, d)
        return np.einsum("ab,cbda->dc", matrix, rho4)


def spectrum_from_density(rho, l, l_b=None, mode: str | None = None,
                          grid: GridSpec | None = None,
                          workers: int | None = 1, **kwargs) -> TopologicalSpectrum:
    """Topological spectrum carried by a joint density matrix.

    The spatial profiles follow the first photon's mode charges l; the
    second photon's charges l_b only label the conjugate kets and must
    simply match in count when given.
    """
    rho = rho.rho if isinstance(rho, BiphotonDensity) else np.asarray(rho, dtype=complex)
    l = tuple(int(x) for x in l)
    if l_b is not None and len(l_b) != len(l):
        raise ValueError("per-photon mode lists differ in length")
    d = len(l)
    if rho.shape != (d * d, d * d):
        raise ValueError("density matrix size does not match l")
    rho = 0.5 * (rho + rho.conj().T)
    source = DensityCoeffs(l, rho)
    return compute_spectrum(source, mode=mode, grid=grid, workers=workers,
                            **kwargs)


# ---------------------------------------------------------------------------
# artifacts

def write_coincidences_csv(C: CoincidenceMatrix, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["setting", *C.labels])
        for lab, row in zip(C.labels, C.counts):
            w.writerow([lab, *(format(x, ".12g") for x in row)])


def read_coincidences_csv(path) -> CoincidenceMatrix:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or len(rows) < 2:
        raise ValueError(f"{path}: empty coincidence file")
    labels = tuple(rows[0][1:])
    counts = np.array([[float(x) for x in row[1:]] for row in rows[1:]])
    return CoincidenceMatrix(counts, labels, {"source": str(path)})


def density_to_json(rho: BiphotonDensity | np.ndarray, meta: dict | None = None) -> dict:
    m = rho.rho if isinstance(rho, BiphotonDensity) else np.asarray(rho)
    return {"rho": [[[float(z.real), float(z.imag)] for z in row] for row in m],
            "meta": dict(meta or {})}


def density_from_json(doc: dict) -> BiphotonDensity:
    rho = np.array([[complex(re, im) for re, im in row] for row in doc["rho"]])
    return BiphotonDensity(rho)


def save_density(path, rho, meta: dict | None = None) -> None:
    with open(path, "w") as fh:
        json.dump(density_to_json(rho, meta), fh)
        fh.write("\n")


def load_density(path) -> BiphotonDensity:
    with open(path) as fh:
        return density_from_json(json.load(fh))
