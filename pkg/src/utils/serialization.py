"""
JSON helpers for complex vectors and matrices.

Complex numbers travel as ``[re, im]`` pairs; a vector is a list of pairs and a
matrix is a list of rows of pairs. Real numbers are accepted on input.
"""

from typing import Any, List, Sequence, Union

import numpy as np

from ..exceptions import DimensionMismatchError

ComplexPair = List[float]


def complex_to_pair(z: complex) -> ComplexPair:
    return [float(np.real(z)), float(np.imag(z))]


def pair_to_complex(value: Union[float, int, Sequence[float]]) -> complex:
    if isinstance(value, (int, float)):
        return complex(float(value), 0.0)
    if len(value) != 2:
        raise DimensionMismatchError(f"Expected [re, im] pair, got {value!r}")
    return complex(float(value[0]), float(value[1]))


def vector_to_json(x: np.ndarray) -> List[ComplexPair]:
    return [complex_to_pair(z) for z in np.asarray(x).ravel()]


def vector_from_json(values: Sequence[Any]) -> np.ndarray:
    return np.array([pair_to_complex(v) for v in values], dtype=complex)


def matrix_to_json(a: np.ndarray) -> List[List[ComplexPair]]:
    return [vector_to_json(row) for row in np.atleast_2d(a)]


def matrix_from_json(rows: Sequence[Sequence[Any]]) -> np.ndarray:
    matrix = [vector_from_json(row) for row in rows]
    widths = {len(row) for row in matrix}
    if len(widths) > 1:
        raise DimensionMismatchError(f"Ragged matrix rows: widths {sorted(widths)}")
    return np.array(matrix, dtype=complex)


def json_float(value: float) -> Union[float, str]:
    """Floats for JSON reports; non-finite values become strings."""
    value = float(value)
    if np.isfinite(value):
        return value
    return "inf" if value > 0 else ("-inf" if value < 0 else "nan")
