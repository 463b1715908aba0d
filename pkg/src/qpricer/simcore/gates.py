"""Gate set, dense matrices, and decompositions into native entangling gates.

Conventions fixed here and relied on everywhere else:

- Qubit 0 is the least-significant bit of a basis-state index.
- For a multi-qubit gate, the first listed qubit is the least-significant
  bit of the gate's *local* basis index.
- ``pswap(a, b, theta)`` rotates amplitude within span{|a=1,b=0>, |a=0,b=1>}
  by theta/2; qubit ``a`` is the receiving side (sin goes to ``a``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


class Native(str, Enum):
    """Native two-qubit gate set available on the target device."""

    CNOT = "cnot"
    ISWAP = "iswap"
    MIXED = "mixed"


# kind -> arity
_ARITY = {
    "x": 1, "y": 1, "z": 1, "h": 1, "s": 1, "sdg": 1, "t": 1, "tdg": 1,
    "rx": 1, "ry": 1, "rz": 1,
    "cx": 2, "cz": 2, "cry": 2, "pswap": 2, "piswap": 2, "swap": 2,
    "ccx": 3,
}
_PARAMETRIC = {"rx", "ry", "rz", "cry", "pswap", "piswap"}
_SELF_INVERSE = {"x", "y", "z", "h", "cx", "cz", "swap", "ccx"}


@dataclass(frozen=True)
class Gate:
    """A single gate: kind, ordered qubit tuple, optional angle in radians."""

    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in _ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(self.qubits) != _ARITY[self.kind]:
            raise ValueError(f"{self.kind} expects {_ARITY[self.kind]} qubits, got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"duplicate qubit in {self.kind}{self.qubits}")
        if (self.angle is None) == (self.kind in _PARAMETRIC):
            raise ValueError(f"angle mismatch for {self.kind}")

    @property
    def arity(self) -> int:
        return _ARITY[self.kind]


# constructors

def x(q): return Gate("x", (q,))
def y(q): return Gate("y", (q,))
def z(q): return Gate("z", (q,))
def h(q): return Gate("h", (q,))
def s(q): return Gate("s", (q,))
def sdg(q): return Gate("sdg", (q,))
def t(q): return Gate("t", (q,))
def tdg(q): return Gate("tdg", (q,))
def rx(q, theta): return Gate("rx", (q,), float(theta))
def ry(q, theta): return Gate("ry", (q,), float(theta))
def rz(q, theta): return Gate("rz", (q,), float(theta))
def cx(c, tq): return Gate("cx", (c, tq))
def cz(a, b): return Gate("cz", (a, b))
def cry(c, tq, theta): return Gate("cry", (c, tq), float(theta))
def pswap(a, b, theta): return Gate("pswap", (a, b), float(theta))
def piswap(a, b, theta): return Gate("piswap", (a, b), float(theta))
def swap(a, b): return Gate("swap", (a, b))
def ccx(c1, c2, tq): return Gate("ccx", (c1, c2, tq))


_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_S = np.array([[1, 0], [0, 1j]], dtype=complex)
_T = np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex)

PAULIS_1Q = (_I2, _X, _Y, _Z)


def _ry_mat(theta):
    c, sn = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -sn], [sn, c]], dtype=complex)


def _rx_mat(theta):
    c, sn = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -1j * sn], [-1j * sn, c]], dtype=complex)


def _rz_mat(theta):
    return np.array([[np.exp(-1j * theta / 2), 0], [0, np.exp(1j * theta / 2)]], dtype=complex)


def matrix(gate: Gate) -> np.ndarray:
    """Dense unitary of ``gate`` in its local basis (first qubit = LSB)."""
    k, th = gate.kind, gate.angle
    if k == "x": return _X.copy()
    if k == "y": return _Y.copy()
    if k == "z": return _Z.copy()
    if k == "h": return _H.copy()
    if k == "s": return _S.copy()
    if k == "sdg": return _S.conj().T.copy()
    if k == "t": return _T.copy()
    if k == "tdg": return _T.conj().T.copy()
    if k == "rx": return _rx_mat(th)
    if k == "ry": return _ry_mat(th)
    if k == "rz": return _rz_mat(th)
    if k == "cx":
        # control = local bit 0, target = local bit 1
        m = np.zeros((4, 4), dtype=complex)
        m[0, 0] = m[2, 2] = 1
        m[3, 1] = m[1, 3] = 1
        return m
    if k == "cz":
        return np.diag([1, 1, 1, -1]).astype(complex)
    if k == "cry":
        m = np.eye(4, dtype=complex)
        r = _ry_mat(th)
        # rotate local bit 1 when local bit 0 (the control) is set
        m[1, 1], m[1, 3] = r[0, 0], r[0, 1]
        m[3, 1], m[3, 3] = r[1, 0], r[1, 1]
        return m
    if k == "pswap":
        c, sn = math.cos(th / 2), math.sin(th / 2)
        m = np.eye(4, dtype=complex)
        m[1, 1], m[1, 2] = c, sn
        m[2, 1], m[2, 2] = -sn, c
        return m
    if k == "piswap":
        c, sn = math.cos(th / 2), math.sin(th / 2)
        m = np.eye(4, dtype=complex)
        m[1, 1], m[1, 2] = c, -1j * sn
        m[2, 1], m[2, 2] = -1j * sn, c
        return m
    if k == "swap":
        m = np.eye(4, dtype=complex)[[0, 2, 1, 3]]
        return m.astype(complex)
    if k == "ccx":
        m = np.eye(8, dtype=complex)
        # controls = local bits 0,1; target = local bit 2
        m[[3, 7], :] = m[[7, 3], :]
        return m
    raise ValueError(k)


def dagger(gate: Gate) -> Gate:
    """Inverse of a single gate."""
    if gate.kind in _SELF_INVERSE:
        return gate
    if gate.kind in _PARAMETRIC:
        return Gate(gate.kind, gate.qubits, -gate.angle)
    pairs = {"s": "sdg", "sdg": "s", "t": "tdg", "tdg": "t"}
    return Gate(pairs[gate.kind], gate.qubits)


def dagger_circuit(gates: list[Gate]) -> list[Gate]:
    return [dagger(g) for g in reversed(gates)]


# -- decompositions -----------------------------------------------------------
#
# Identities used below (each is checked against dense matrices in the tests):
#   cry(c,t,th)    = ry(t,th/2) cx(c,t) ry(t,-th/2) cx(c,t)
#   pswap(a,b,th)  = cx(a,b) cry(b,a,th) cx(a,b)
#   pswap(a,b,th)  = sdg(a) piswap(a,b,th) s(a)
#   cx(c,t)        = [x(t) z(c)] iswap [h(c)] iswap [rx(t,pi/2) sdg(c)]   (2 iSWAPs, 5 singles)
#   ccx            = standard 6-CNOT construction (2 H + 7 T/Tdg)
#   ccry           = cry(c2,t,th/2) cx(c1,c2) cry(c2,t,-th/2) cx(c1,c2) cry(c1,t,th/2)


def _cx_via_iswap(c, tq):
    isw = piswap(c, tq, math.pi)
    return [x(tq), z(c), isw, h(c), isw, rx(tq, math.pi / 2), sdg(c)]


def _cry_via_cx(c, tq, th):
    return [ry(tq, th / 2), cx(c, tq), ry(tq, -th / 2), cx(c, tq)]


def _pswap_via_cx(a, b, th):
    return [cx(a, b)] + _cry_via_cx(b, a, th) + [cx(a, b)]


def _ccx_via_cx(c1, c2, tq):
    return [
        h(tq), cx(c2, tq), tdg(tq), cx(c1, tq), t(tq), cx(c2, tq), tdg(tq),
        cx(c1, tq), t(tq), t(c2), h(tq), cx(c1, c2), tdg(c2), cx(c1, c2), t(c1),
    ]


def ccry(c1, c2, tq, theta) -> list[Gate]:
    """Doubly-controlled RY as 3 controlled rotations and 2 CNOTs."""
    return [cry(c2, tq, theta / 2), cx(c1, c2), cry(c2, tq, -theta / 2),
            cx(c1, c2), cry(c1, tq, theta / 2)]


def decompose(gate: Gate, native: Native) -> list[Gate]:
    """Rewrite ``gate`` over the chosen native set.

    The returned list multiplies, in circuit order, to the same unitary up to
    global phase. Single-qubit gates are always passthrough.
    """
    native = Native(native)
    k = gate.kind
    q = gate.qubits
    if gate.arity == 1:
        return [gate]
    if native is Native.MIXED:
        # both entanglers available: keep cx/cz-style pieces on cx, swaps on iswap
        if k == "piswap":
            return [gate]
        if k == "pswap":
            return [sdg(q[0]), piswap(q[0], q[1], gate.angle), s(q[0])]
        return decompose(gate, Native.CNOT)
    if native is Native.CNOT:
        if k == "cx":
            return [gate]
        if k == "cz":
            return [h(q[1]), cx(q[0], q[1]), h(q[1])]
        if k == "cry":
            return _cry_via_cx(q[0], q[1], gate.angle)
        if k == "pswap":
            return _pswap_via_cx(q[0], q[1], gate.angle)
        if k == "piswap":
            return [s(q[0])] + _pswap_via_cx(q[0], q[1], gate.angle) + [sdg(q[0])]
        if k == "swap":
            return [cx(q[0], q[1]), cx(q[1], q[0]), cx(q[0], q[1])]
        if k == "ccx":
            return _ccx_via_cx(q[0], q[1], q[2])
        raise ValueError(f"cannot decompose {k} to CNOT native")
    if native is Native.ISWAP:
        if k == "piswap":
            return [gate]
        if k == "pswap":
            return [sdg(q[0]), piswap(q[0], q[1], gate.angle), s(q[0])]
        # everything else: rewrite over cx, then expand each cx
        out = []
        for g in decompose(gate, Native.CNOT):
            if g.kind == "cx":
                out.extend(_cx_via_iswap(*g.qubits))
            else:
                out.append(g)
        return out
    raise ValueError(native)


def compile_circuit(gates: list[Gate], native: Native | None) -> list[Gate]:
    """Decompose every gate of a circuit for the given native set (None = as-is)."""
    if native is None:
        return list(gates)
    out: list[Gate] = []
    for g in gates:
        out.extend(decompose(g, native))
    return out
