"""Country and product complexity scores plus the outlook indicators.

ECI/PCI come from the eigenvector form of the method of reflections: the
second eigenvector of the row-stochastic country-country matrix
M_{jj'} = sum_i x_ij x_ij' / (q_j s_i), and its product-side analogue.
Both solves go through the symmetric similarity transform B = S^{-1/2} X
Q^{-1/2}, whose Gram matrices share the spectrum of the row-stochastic
forms, so a plain symmetric eigendecomposition suffices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import DegeneracyError, InputError, SingularityError
from .product_space import DensityMatrix
from .rca import RcaMatrix
from .regression import FitResult, design_matrix, ols_fit

# Eigenvalues closer than this are treated as a tied pair, which makes the
# second eigenvector ambiguous.
EIGENGAP_TOL = 1e-10


@dataclass
class ComplexityScores:
    pci: np.ndarray  # standardized, length m
    eci: np.ndarray  # standardized, length n
    rank: int  # numerical rank of the bipartite similarity matrix
    pci_raw: np.ndarray  # second eigenvector before standardization
    eci_raw: np.ndarray
    products: list[str]
    countries: list[str]


@dataclass
class OutlookIndicators:
    ecoi: np.ndarray
    ecoi_bar: np.ndarray
    ecoi_net: np.ndarray
    mean_ubiquity_rca0: np.ndarray
    mean_ubiquity_rca1: np.ndarray
    countries: list[str]


def _component_listing(labels: np.ndarray, products, countries, m: int) -> str:
    parts = []
    for comp in range(labels.max() + 1):
        members = np.flatnonzero(labels == comp)
        prods = [str(products[i]) for i in members if i < m]
        ctys = [str(countries[i - m]) for i in members if i >= m]
        text = "products " + ",".join(prods[:6]) if prods else ""
        if ctys:
            text += ("; " if text else "") + "countries " + ",".join(ctys[:6])
        parts.append(f"[{text}]")
        if len(parts) == 5:
            parts.append("...")
            break
    return " ".join(parts)


def _standardize(v: np.ndarray) -> np.ndarray:
    sd = v.std()
    if sd == 0:
        raise DegeneracyError("complexity eigenvector is constant")
    return (v - v.mean()) / sd


def complexity_scores(rca: RcaMatrix) -> ComplexityScores:
    """Second-eigenvector complexity scores with fixed sign conventions.

    Signs: correlation(eci, diversity) > 0, and correlation of pci with the
    countries' eci averaged into each product, (x @ eci) / ubiquity, > 0.
    Disconnected bipartite structure or a tied second eigenvalue makes the
    scores ill-defined and raises :class:`DegeneracyError`.
    """
    x = rca.x.astype(np.float64)
    m, n = x.shape
    if m < 2 or n < 2:
        raise InputError("complexity scores need at least 2 products and 2 countries")

    s = rca.ubiquity.astype(np.float64)
    q = rca.diversity.astype(np.float64)
    if np.any(s == 0):
        bad = [rca.products[i] for i in np.flatnonzero(s == 0)[:5]]
        raise SingularityError(f"zero-ubiquity product(s): {', '.join(bad)}")
    if np.any(q == 0):
        bad = [rca.countries[j] for j in np.flatnonzero(q == 0)[:5]]
        raise SingularityError(f"zero-diversity country(ies): {', '.join(bad)}")

    # Bipartite connectivity: products are nodes 0..m-1, countries m..m+n-1.
    rows, cols = np.nonzero(rca.x)
    adj = csr_matrix(
        (np.ones(rows.size), (rows, cols + m)), shape=(m + n, m + n)
    )
    n_comp, labels = connected_components(adj, directed=False)
    if n_comp > 1:
        raise DegeneracyError(
            f"bipartite specialization graph has {n_comp} components: "
            + _component_listing(labels, rca.products, rca.countries, m)
        )

    b = x / np.sqrt(s)[:, None] / np.sqrt(q)[None, :]

    # Country side: eigenvectors of B'B map to those of the row-stochastic
    # country matrix via a Q^{-1/2} rescale.
    w_c, v_c = np.linalg.eigh(b.T @ b)
    if n >= 3 and w_c[-2] - w_c[-3] <= EIGENGAP_TOL:
        raise DegeneracyError(
            f"tied second eigenvalue ({w_c[-2]:.6g} vs {w_c[-3]:.6g}): "
            "second eigenvector is ambiguous"
        )
    eci_raw = v_c[:, -2] / np.sqrt(q)

    w_p, v_p = np.linalg.eigh(b @ b.T)
    if m >= 3 and w_p[-2] - w_p[-3] <= EIGENGAP_TOL:
        raise DegeneracyError(
            f"tied second eigenvalue ({w_p[-2]:.6g} vs {w_p[-3]:.6g}): "
            "second eigenvector is ambiguous"
        )
    pci_raw = v_p[:, -2] / np.sqrt(s)

    eci = _standardize(eci_raw)
    if eci @ (q - q.mean()) < 0:
        eci, eci_raw = -eci, -eci_raw
    pci = _standardize(pci_raw)
    # Product-side sign follows the country scores: a product is complex when
    # the countries exporting it are.
    anchor = (x @ eci) / s
    if pci @ (anchor - anchor.mean()) < 0:
        pci, pci_raw = -pci, -pci_raw

    rank = int((w_c > 1e-12).sum())
    return ComplexityScores(
        pci=pci,
        eci=eci,
        rank=rank,
        pci_raw=pci_raw,
        eci_raw=eci_raw,
        products=rca.products,
        countries=rca.countries,
    )


def ecoi(rca: RcaMatrix, d: DensityMatrix, pci: np.ndarray) -> OutlookIndicators:
    """Expected complexity gain/loss from the density-weighted score sums.

    ecoi_j = sum_i d_ij (1 - x_ij) pci_i, ecoi_bar_j = sum_i (1 - d_ij)
    x_ij pci_i, net = ecoi - ecoi_bar. Also returns the per-country mean
    ubiquity over the products outside (rca=0) and inside (rca=1) the
    specialization set; an empty set yields NaN.
    """
    pci = np.asarray(pci, dtype=np.float64)
    m, n = rca.x.shape
    if d.d.shape != (m, n) or not np.array_equal(d.products, rca.products):
        raise InputError("density and rca matrices are not aligned")
    if pci.shape != (m,):
        raise InputError(f"pci must have length {m}, got {pci.shape}")

    x = rca.x.astype(np.float64)
    ecoi_v = ((d.d * (1.0 - x)) * pci[:, None]).sum(axis=0)
    ecoi_bar_v = (((1.0 - d.d) * x) * pci[:, None]).sum(axis=0)

    s = rca.ubiquity.astype(np.float64)
    n_in = rca.diversity.astype(np.float64)
    n_out = m - n_in
    s_in = (x * s[:, None]).sum(axis=0)
    s_out = s.sum() - s_in
    with np.errstate(invalid="ignore", divide="ignore"):
        mean_out = np.where(n_out > 0, s_out / n_out, np.nan)
        mean_in = np.where(n_in > 0, s_in / n_in, np.nan)

    return OutlookIndicators(
        ecoi=ecoi_v,
        ecoi_bar=ecoi_bar_v,
        ecoi_net=ecoi_v - ecoi_bar_v,
        mean_ubiquity_rca0=mean_out,
        mean_ubiquity_rca1=mean_in,
        countries=rca.countries,
    )


def outlook_regressions(out: OutlookIndicators, diversity: np.ndarray) -> dict[str, FitResult]:
    """The six outlook OLS columns, keyed "1".."6".

    (1) ecoi ~ diversity, (2) ecoi ~ ubiquity, (3) ecoi ~ both,
    (4) ecoi_bar ~ diversity, (5) ecoi_bar ~ ubiquity + ubiquity_star,
    (6) ecoi_bar ~ all three. "ubiquity" is the mean over non-specialized
    products, "ubiquity_star" over specialized ones.
    """
    diversity = np.asarray(diversity, dtype=np.float64)
    if diversity.shape != out.ecoi.shape:
        raise InputError("diversity length does not match indicator vectors")

    # One shared estimation sample: countries with an undefined mean
    # ubiquity (nothing, or everything, specialized) drop from all columns.
    keep = (
        np.isfinite(diversity)
        & np.isfinite(out.mean_ubiquity_rca0)
        & np.isfinite(out.mean_ubiquity_rca1)
    )
    div = {"diversity": diversity[keep]}
    ub = {"ubiquity": out.mean_ubiquity_rca0[keep]}
    ub_star = {"ubiquity_star": out.mean_ubiquity_rca1[keep]}
    specs = {
        "1": (out.ecoi[keep], {**div}),
        "2": (out.ecoi[keep], {**ub}),
        "3": (out.ecoi[keep], {**div, **ub}),
        "4": (out.ecoi_bar[keep], {**div}),
        "5": (out.ecoi_bar[keep], {**ub, **ub_star}),
        "6": (out.ecoi_bar[keep], {**div, **ub, **ub_star}),
    }
    return {key: ols_fit(design_matrix(y, cols)) for key, (y, cols) in specs.items()}
