"""Finite control sets for points, lines, surfaces and volumes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Final, Mapping, Sequence, Tuple

import numpy as np

_MINIMUM_SIZE: Final[Mapping[int, int]] = {1: 2, 2: 3, 3: 2}


@dataclass(frozen=True, eq=False)
class ControlSet:
    """Control vectors in a component's tangent coordinates.

    ``vectors`` has shape ``(m, dimension)``. Dimension 1 stores scalars in
    ``[-1, 1]``; dimensions 2 and 3 store unit vectors. The dimension-0 set
    used by point components holds a single empty control.
    """

    dimension: int
    vectors: np.ndarray

    def __len__(self) -> int:
        return int(self.vectors.shape[0])

    def embed(self, axes: Sequence[int], ambient_dimension: int) -> np.ndarray:
        """Map the controls to ``R^N`` through the component's tangent axes."""

        if len(axes) != self.dimension:
            raise ValueError(f"{self.dimension}D controls need {self.dimension} tangent axes, got {len(axes)}")
        embedded = np.zeros((len(self), ambient_dimension))
        for column, axis in enumerate(axes):
            embedded[:, axis] = self.vectors[:, column]
        return embedded


def stationary() -> ControlSet:
    """The single "no motion" control of a point component."""

    return ControlSet(dimension=0, vectors=np.zeros((1, 0)))


def discretize(dimension: int, n: int) -> ControlSet:
    """Uniform discretisation of ``[-1, 1]``, the circle or the sphere.

    * dimension 1: ``n`` equispaced values in ``[-1, 1]`` including both ends;
    * dimension 2: angles ``2*pi*m/n``;
    * dimension 3: ``n`` meridians (azimuth ``2*pi*m/n``) times ``n`` parallels
      (polar angle ``pi*(p + 1/2)/n``), then the two poles, ``n*n + 2`` vectors.
    """

    if dimension not in _MINIMUM_SIZE:
        raise ValueError(f"control sets exist for dimensions 1, 2, 3, not {dimension}")
    minimum = _MINIMUM_SIZE[dimension]
    if n < minimum:
        raise ValueError(f"a {dimension}D control set needs at least {minimum} elements, got {n}")

    if dimension == 1:
        vectors = np.linspace(-1.0, 1.0, n).reshape(-1, 1)
    elif dimension == 2:
        angles = 2.0 * math.pi * np.arange(n) / n
        vectors = np.column_stack((np.cos(angles), np.sin(angles)))
    else:
        azimuth = 2.0 * math.pi * np.arange(n) / n
        polar = math.pi * (np.arange(n) + 0.5) / n
        theta, phi = np.meshgrid(polar, azimuth, indexing="ij")
        shell = np.column_stack(
            (
                (np.sin(theta) * np.cos(phi)).ravel(),
                (np.sin(theta) * np.sin(phi)).ravel(),
                np.cos(theta).ravel(),
            )
        )
        poles = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]])
        vectors = np.vstack((shell, poles))
    vectors.setflags(write=False)
    return ControlSet(dimension=dimension, vectors=vectors)


def control_sets(sizes: Sequence[int]) -> Tuple[ControlSet, ...]:
    """Control sets indexed by dimension, from the header's ``N_A`` values.

    Index 0 is the stationary set; index ``d`` uses ``sizes[d - 1]``.
    """

    return (stationary(),) + tuple(
        discretize(dimension, int(size)) for dimension, size in enumerate(sizes, start=1)
    )


__all__ = ["ControlSet", "stationary", "discretize", "control_sets"]
