"""Unitary mode substitutions (beam splitters, phase shifters, mirrors) acting on one slot of a Ket.

Matrix orientation: column ``j`` is the image of ``inputs[j]`` expanded over ``outputs``,
so ``inputs[j] -> sum_i matrix[i, j] * outputs[i]``.
"""

from __future__ import annotations

import cmath
import enum
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .state import Ket, _build

UNITARY_TOL = 1e-12
_R = 1.0 / math.sqrt(2.0)


class OpticsError(ValueError):
    pass


class BeamSplitterKind(enum.Enum):
    SPLITTER = "splitter"
    RECOMBINER = "recombiner"


SPLITTER_MATRIX = np.array([[1, 1j], [1j, 1]]) * _R
# second-stage splitter with its pi phase shifters folded in
RECOMBINER_MATRIX = np.array([[1, -1j], [-1j, 1]]) * _R


@dataclass(frozen=True, eq=False)
class ModeMap:
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    matrix: np.ndarray

    def __post_init__(self):
        inputs, outputs = tuple(self.inputs), tuple(self.outputs)
        m = np.array(self.matrix, dtype=complex)
        if len(set(inputs)) != len(inputs):
            raise OpticsError(f"duplicate input modes {inputs}")
        if len(set(outputs)) != len(outputs):
            raise OpticsError(f"duplicate output modes {outputs}")
        if any(not isinstance(x, str) or not x for x in inputs + outputs):
            raise OpticsError("mode labels must be nonempty strings")
        if m.shape != (len(outputs), len(inputs)) or m.shape[0] != m.shape[1]:
            raise OpticsError(f"matrix shape {m.shape} does not fit {len(inputs)} modes")
        if not np.all(np.isfinite(m)):
            raise OpticsError("matrix has non-finite entries")
        defect = np.max(np.abs(m.conj().T @ m - np.eye(len(inputs))))
        if defect > UNITARY_TOL:
            raise OpticsError(f"matrix is not unitary (max |M^dag M - I| = {defect:.3g})")
        m.setflags(write=False)
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "outputs", outputs)
        object.__setattr__(self, "matrix", m)

    def image(self, mode: str) -> dict[str, complex]:
        """Expansion of an input mode over the outputs."""
        j = self.inputs.index(mode)
        return {out: complex(self.matrix[i, j]) for i, out in enumerate(self.outputs)}

    def __eq__(self, other):
        if not isinstance(other, ModeMap):
            return NotImplemented
        return (self.inputs == other.inputs and self.outputs == other.outputs
                and np.array_equal(self.matrix, other.matrix))

    def __hash__(self):
        return hash((self.inputs, self.outputs, self.matrix.tobytes()))


def make_beam_splitter(kind: BeamSplitterKind | str, inputs: Sequence[str],
                       outputs: Sequence[str]) -> ModeMap:
    kind = BeamSplitterKind(kind)
    if len(inputs) != 2 or len(outputs) != 2:
        raise OpticsError("a beam splitter takes exactly two input and two output modes")
    m = SPLITTER_MATRIX if kind is BeamSplitterKind.SPLITTER else RECOMBINER_MATRIX
    return ModeMap(tuple(inputs), tuple(outputs), m)


def make_phase(mode: str, phi: float) -> ModeMap:
    return ModeMap((mode,), (mode,), [[cmath.exp(1j * phi)]])


def make_mirror(mode_in: str, mode_out: str) -> ModeMap:
    """Mirrors only redirect the path; no phase is attached."""
    return ModeMap((mode_in,), (mode_out,), [[1.0]])


def identity(inputs: Sequence[str], outputs: Sequence[str] | None = None) -> ModeMap:
    inputs = tuple(inputs)
    return ModeMap(inputs, tuple(outputs) if outputs is not None else inputs,
                   np.eye(len(inputs)))


def compose(outer: ModeMap, inner: ModeMap) -> ModeMap:
    """``outer`` after ``inner``; outer's inputs must be inner's outputs (any order)."""
    if set(outer.inputs) != set(inner.outputs) or len(outer.inputs) != len(inner.outputs):
        raise OpticsError(f"cannot chain: {outer.inputs} does not match {inner.outputs}")
    perm = [outer.inputs.index(m) for m in inner.outputs]
    return ModeMap(inner.inputs, outer.outputs, outer.matrix[:, perm] @ inner.matrix)


def apply_to_slot(k: Ket, slot: int, m: ModeMap) -> Ket:
    """Linear extension of ``m`` to the whole ket, acting on one particle slot."""
    if not 0 <= slot < k.slots:
        raise OpticsError(f"slot {slot} out of range for a {k.slots}-slot ket")
    column = {mode: j for j, mode in enumerate(m.inputs)}
    pairs = []
    for label, amp in k.terms.items():
        j = column.get(label[slot])
        if j is None:
            pairs.append((label, amp))
            continue
        for i, out in enumerate(m.outputs):
            coeff = m.matrix[i, j]
            if coeff != 0:
                pairs.append((label[:slot] + (out,) + label[slot + 1:], amp * complex(coeff)))
    return _build(k.slots, pairs, k.consumed)
