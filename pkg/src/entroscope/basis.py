"""Enumeration and indexing of fixed-Sz sectors of a spin-1/2 chain.

Configurations are bit masks with site 1 in the most significant bit
(bit N-k holds site k) and bit value 1 meaning up-spin.  With this
convention a full-space wavefunction reshapes directly into a
(2^l1, 2^(N-l1)) matrix whose row index enumerates sites 1..l1, so the
partial trace needs no permutation.
"""
import re
from dataclasses import dataclass, field
from math import comb

import numpy as np

# Above this the full 2^N scan (and everything downstream) stops fitting
# comfortably in memory.
N_SITES_CAP = 24


@dataclass(frozen=True)
class SpinBasis:
    """Ascending-sorted bit masks of one (n_sites, n_up) sector."""

    n_sites: int
    n_up: int
    states: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.states)

    @property
    def tag(self) -> str:
        return f"N{self.n_sites}_nup{self.n_up}"


def enumerate_sector(n_sites: int, n_up: int, cap: int = N_SITES_CAP) -> SpinBasis:
    """Enumerate all n_sites-bit masks with exactly n_up set bits, ascending.

    Raises ValueError if n_up is out of range or n_sites exceeds the cap
    (the cap guards against accidental memory blow-up).
    """
    if n_sites < 1:
        raise ValueError(f"n_sites must be >= 1, got {n_sites}")
    if n_sites > cap:
        raise ValueError(
            f"n_sites={n_sites} exceeds cap {cap}; full-space scan would "
            f"allocate 2^{n_sites} entries"
        )
    if not 0 <= n_up <= n_sites:
        raise ValueError(f"n_up={n_up} out of range [0, {n_sites}]")
    all_masks = np.arange(1 << n_sites, dtype=np.uint32)
    states = all_masks[np.bitwise_count(all_masks) == n_up].astype(np.int64)
    assert len(states) == comb(n_sites, n_up)
    states.setflags(write=False)
    return SpinBasis(n_sites=n_sites, n_up=n_up, states=states)


def index_of(basis: SpinBasis, mask: int) -> int:
    """Position of `mask` in the sorted sector enumeration (binary search)."""
    i = int(np.searchsorted(basis.states, mask))
    if i == basis.dim or basis.states[i] != mask:
        raise ValueError(
            f"mask {mask:#b} not in sector (n_sites={basis.n_sites}, "
            f"n_up={basis.n_up})"
        )
    return i


def indices_of(basis: SpinBasis, masks: np.ndarray) -> np.ndarray:
    """Vectorized index_of for masks already known to lie in the sector."""
    idx = np.searchsorted(basis.states, masks)
    # idx == dim marks masks above the enumeration; clamp before gathering
    safe = np.minimum(idx, basis.dim - 1)
    if np.any(basis.states[safe] != masks):
        raise ValueError("some masks are not members of the sector")
    return idx


def basis_from_tag(tag: str) -> SpinBasis:
    """Rebuild the sector enumeration named by a basis tag like 'N14_nup7'."""
    m = re.fullmatch(r"N(\d+)_nup(\d+)", tag)
    if m is None:
        raise ValueError(f"unrecognized basis tag {tag!r}")
    return enumerate_sector(int(m.group(1)), int(m.group(2)))
