"""Equal-width discretization of continuous datasets."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .simulate import Dataset


@dataclass(frozen=True)
class BinSpec:
    """Bin count k >= 2, or bin_count None meaning leave the data continuous."""

    bin_count: int | None = None

    def __post_init__(self):
        if self.bin_count is not None and self.bin_count < 2:
            raise ValueError(f"bin_count must be >= 2, got {self.bin_count}")

    @property
    def is_continuous(self) -> bool:
        return self.bin_count is None

    @property
    def label(self) -> str:
        return "continuous" if self.bin_count is None else str(self.bin_count)

    @classmethod
    def parse(cls, text: str) -> BinSpec:
        if text.strip().lower() == "continuous":
            return CONTINUOUS
        try:
            return cls(int(text))
        except ValueError:
            raise ValueError(f"bin condition must be 'continuous' or an integer >= 2, got {text!r}") from None


CONTINUOUS = BinSpec(None)


def bin_equal_width(data: Dataset, spec: BinSpec) -> Dataset:
    """Map each column onto integer bin indices 1..k over k equal-width
    intervals spanning the column's observed range; the column minimum lands
    in bin 1, the maximum in bin k, and a constant column becomes all ones.
    A continuous spec returns the input unchanged."""
    if spec.is_continuous:
        return data
    if data.provenance != "continuous":
        raise ValueError(f"refusing to re-bin data with provenance {data.provenance!r}")
    k = spec.bin_count
    out = np.empty_like(data.values)
    for j in range(data.p):
        col = data.values[:, j]
        lo = col.min()
        hi = col.max()
        if hi == lo:
            out[:, j] = 1.0
            continue
        width = (hi - lo) / k
        idx = np.ceil((col - lo) / width)
        out[:, j] = np.clip(idx, 1, k)
    return Dataset(out, data.column_labels, provenance=f"binned({k})")
