"""Gram-path spectra: an m x m Hermitian matrix carries the whole nonzero
spectrum of the n^k-dimensional rank-m model, since X W X* and W^{1/2} X*X
W^{1/2} share nonzero eigenvalues. The k-fold structure collapses each Gram
entry into a product of k per-level inner products, so nothing of ambient
size is ever materialized outside the small dense oracle.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import reduce
from pathlib import Path

import numpy as np

from .config import ModelKind, ModelParams, TauScheme
from .sampling import BaseSample, norm_profile

log = logging.getLogger(__name__)

DENSE_DIM_CAP = 4096
HERMITIAN_RTOL = 1e-12
NEGATIVE_CLAMP_REL = 1e-9  # relative floor below which negatives are an error
NONZERO_THRESHOLD_REL = 1e-9  # separates rank zeros from genuine small atoms
RESIDUAL_RTOL = 1e-8


@dataclass(frozen=True)
class GramMatrix:
    order: int
    entries: np.ndarray  # (m, m) complex128, Hermitian by construction
    model: ModelKind


@dataclass(frozen=True)
class SpectralDistribution:
    """Eigenvalue atoms plus the implied point mass at zero.

    ``atoms`` carries the Gram eigenvalues actually present in the ambient
    spectrum (when m > N the structural rank zeros have been removed), and
    ``zero_mass`` the (N - m)/N of eigenvalues the rank bound pins at zero.
    """

    atoms: np.ndarray
    ambient_dim: int
    zero_mass: float

    @property
    def implied_zeros(self) -> int:
        return self.ambient_dim - len(self.atoms)

    def cdf(self, x):
        """F(x) = (#{atoms <= x} + implied zeros for x >= 0) / N."""
        x = np.asarray(x, dtype=float)
        counts = np.searchsorted(self.atoms, x, side="right")
        zeros = np.where(x >= 0.0, self.implied_zeros, 0)
        out = (counts + zeros) / self.ambient_dim
        return float(out) if out.ndim == 0 else out


def _tau_values(tau: TauScheme, m: int) -> np.ndarray:
    values = tau.as_array()
    if values.shape != (m,):
        raise ValueError(f"tau scheme has length {len(values)}, expected m={m}")
    return values


def _hermitize(product: np.ndarray, diag: np.ndarray) -> np.ndarray:
    # each unordered pair is computed once (the upper triangle) and mirrored
    # by conjugation, so Hermitian symmetry is exact rather than approximate
    upper = np.triu(product, 1)
    out = upper + upper.conj().T
    out[np.diag_indices_from(out)] = diag
    return out


def _level_ratio_product(sample: BaseSample, *, normalized: bool) -> np.ndarray:
    """Entrywise product over levels of per-level inner-product ratios.

    ``normalized`` divides each level by the geometric mean of the two level
    norms (each factor then has modulus <= 1 by Cauchy-Schwarz, making the
    k-fold product overflow-proof); otherwise each level is divided by n.
    For unit-modulus laws both choices coincide because ||y^(l)||^2 = n
    almost surely, and the exact value n is used so the two Gram
    constructions collapse bitwise.
    """
    entries = sample.entries
    m, k, n = entries.shape
    unit = sample.params.entry_law.unit_modulus
    profile = norm_profile(sample) if (normalized and not unit) else None
    product = np.ones((m, m), dtype=np.complex128)
    for level in range(k):
        block = entries[:, level, :]
        inner = block @ block.conj().T
        if normalized and not unit:
            sq = profile.level_sq_norms[:, level]
            product *= inner / np.sqrt(np.outer(sq, sq))
        else:
            product *= inner / n
    return product


def build_correlation_gram(sample: BaseSample, tau: TauScheme) -> GramMatrix:
    """Gram of the unit-normalized model: sqrt(tau_a tau_b) prod_l rho_l(a, b).

    The diagonal equals tau exactly; the trace of the whole ambient model is
    therefore sum(tau) with no stochastic term.
    """
    m = sample.entries.shape[0]
    values = _tau_values(tau, m)
    product = _level_ratio_product(sample, normalized=True)
    entries = np.sqrt(np.outer(values, values)) * product
    entries = _hermitize(entries, values)
    entries.setflags(write=False)
    return GramMatrix(order=m, entries=entries, model=ModelKind.CORRELATION)


def build_covariance_gram(sample: BaseSample, tau: TauScheme) -> GramMatrix:
    """Gram of the 1/n^k-normalized model: sqrt(tau_a tau_b) prod_l inner_l/n."""
    m, k, n = sample.entries.shape
    values = _tau_values(tau, m)
    product = _level_ratio_product(sample, normalized=False)
    entries = np.sqrt(np.outer(values, values)) * product
    if sample.params.entry_law.unit_modulus:
        diag = values.copy()  # ||y^(l)||^2 = n a.s., so the ratio product is 1
    else:
        profile = norm_profile(sample)
        diag = values * np.prod(profile.level_sq_norms / n, axis=1)
    entries = _hermitize(entries, diag)
    entries.setflags(write=False)
    return GramMatrix(order=m, entries=entries, model=ModelKind.COVARIANCE)


def build_normalized_level_gram(sample: BaseSample, tau: TauScheme) -> GramMatrix:
    """Gram built from explicitly unit-normalized level vectors.

    Independent construction route for the unit-sphere model: each level
    vector is rescaled to unit length first and raw inner products are taken
    afterwards. Mathematically identical to the correlation Gram.
    """
    m, k, n = sample.entries.shape
    values = _tau_values(tau, m)
    profile = norm_profile(sample)
    normed = sample.entries / np.sqrt(profile.level_sq_norms)[:, :, None]
    product = np.ones((m, m), dtype=np.complex128)
    for level in range(k):
        block = normed[:, level, :]
        product *= block @ block.conj().T
    entries = np.sqrt(np.outer(values, values)) * product
    diag = values * np.prod(
        np.einsum("alj,alj->al", normed, normed.conj()).real, axis=1
    )
    entries = _hermitize(entries, diag)
    entries.setflags(write=False)
    return GramMatrix(order=m, entries=entries, model=ModelKind.CORRELATION)


def eigenvalues(gram: GramMatrix | np.ndarray) -> np.ndarray:
    """All eigenvalues of a Hermitian matrix, ascending.

    Delegates the decomposition to LAPACK but verifies it: the input must be
    Hermitian to 1e-12 relative, and three sampled eigenpairs must satisfy
    ||Gv - wv|| <= 1e-8 ||G||.
    """
    entries = gram.entries if isinstance(gram, GramMatrix) else np.asarray(gram)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise ValueError("expected a square matrix")
    scale = float(np.max(np.abs(entries))) if entries.size else 0.0
    asym = float(np.max(np.abs(entries - entries.conj().T))) if entries.size else 0.0
    if asym > HERMITIAN_RTOL * max(scale, 1e-300):
        raise ValueError(f"matrix is not Hermitian: asymmetry {asym:.3e} at scale {scale:.3e}")
    w, v = np.linalg.eigh(entries)
    norm = float(np.max(np.abs(w))) if w.size else 0.0
    for idx in sorted({0, len(w) // 2, len(w) - 1}):
        residual = float(np.linalg.norm(entries @ v[:, idx] - w[idx] * v[:, idx]))
        if residual > RESIDUAL_RTOL * max(norm, 1e-300):
            raise ValueError(f"eigenpair residual {residual:.3e} exceeds {RESIDUAL_RTOL:.1e} * {norm:.3e}")
    return w


def nonzero_eigenvalues(eigs: np.ndarray) -> np.ndarray:
    """Atoms above the rank-deficiency threshold 1e-9 * max(1, largest)."""
    eigs = np.asarray(eigs, dtype=float)
    if eigs.size == 0:
        return eigs
    threshold = NONZERO_THRESHOLD_REL * max(1.0, float(np.max(eigs)))
    return eigs[eigs > threshold]


def esd(eigs, ambient_dim: int) -> SpectralDistribution:
    """Spectral distribution of the ambient model from the Gram eigenvalues.

    Small negatives (eigensolver noise) are clamped to zero; anything below
    -1e-9 times the spectral scale is an error. When m > N the m - N
    structural zeros forced by the rank bound are checked and removed.
    """
    atoms = np.sort(np.asarray(eigs, dtype=float))
    if ambient_dim < 1:
        raise ValueError("ambient dimension must be at least 1")
    m = len(atoms)
    if m == 0:
        raise ValueError("need at least one eigenvalue")
    scale = max(float(atoms[-1]), 1.0)
    floor = -NEGATIVE_CLAMP_REL * scale
    if atoms[0] < floor:
        raise ValueError(f"eigenvalue {atoms[0]:.3e} below the clamp floor {floor:.3e}")
    negatives = int(np.sum(atoms < 0.0))
    if negatives:
        log.debug("clamping %d small negative eigenvalues to zero", negatives)
        atoms = np.where(atoms < 0.0, 0.0, atoms)
    if m > ambient_dim:
        structural = m - ambient_dim
        threshold = NONZERO_THRESHOLD_REL * scale
        if np.any(atoms[:structural] > threshold):
            raise ValueError("rank bound violated: too few near-zero eigenvalues for m > N")
        atoms = atoms[structural:]
        zero_mass = 0.0
    else:
        zero_mass = (ambient_dim - m) / ambient_dim
    atoms.setflags(write=False)
    return SpectralDistribution(atoms=atoms, ambient_dim=ambient_dim, zero_mass=zero_mass)


def tensor_vector(sample: BaseSample, alpha: int) -> np.ndarray:
    """The explicit n^k-dimensional k-fold tensor product of sample alpha.

    Entry (j_1, ..., j_k) is the product over levels of the level entries,
    flattened row-major (j_1 most significant).
    """
    levels = [sample.entries[alpha, level] for level in range(sample.entries.shape[1])]
    return reduce(np.kron, levels)


def materialize_dense(sample: BaseSample, tau: TauScheme, model: ModelKind) -> np.ndarray:
    """Explicit ambient N x N matrix; the test oracle for the Gram path."""
    m, k, n = sample.entries.shape
    dim = n**k
    if dim > DENSE_DIM_CAP:
        raise ValueError(f"ambient dimension {dim} exceeds the dense cap {DENSE_DIM_CAP}")
    values = _tau_values(tau, m)
    out = np.zeros((dim, dim), dtype=np.complex128)
    for alpha in range(m):
        v = tensor_vector(sample, alpha)
        outer = np.outer(v, v.conj())
        if model is ModelKind.CORRELATION:
            sq = float(np.vdot(v, v).real)
            if sq <= 0.0:
                raise ValueError(f"degenerate tensor vector at sample {alpha}")
            out += (values[alpha] / sq) * outer
        else:
            out += (values[alpha] / dim) * outer
    return out


def write_eigenvalue_csv(path, rows, params: ModelParams) -> None:
    """Eigenvalue dump: comment header with the run dimensions, then one line
    per (replica, index, eigenvalue)."""
    lines = [
        f"# n={params.n} k={params.k} m={params.sample_count} N={params.ambient_dim} "
        f"model={params.model.value} seed={params.seed}",
        "replica,index,eigenvalue",
    ]
    for replica, eigs in rows:
        for index, value in enumerate(np.asarray(eigs, dtype=float)):
            lines.append(f"{replica},{index},{float(value)!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_eigenvalue_csv(path) -> tuple[dict, dict[int, np.ndarray]]:
    """Parse an eigenvalue dump back into (metadata, replica -> eigenvalues)."""
    meta: dict = {}
    per_replica: dict[int, list[float]] = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            for token in line[1:].split():
                key, _, value = token.partition("=")
                if not value:
                    continue
                meta[key] = value if key == "model" else int(value)
            continue
        if line.startswith("replica"):
            continue
        replica_s, _, value_s = line.split(",")
        per_replica.setdefault(int(replica_s), []).append(float(value_s))
    return meta, {r: np.asarray(v) for r, v in sorted(per_replica.items())}
