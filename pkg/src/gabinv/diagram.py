"""Deterministic SVG and ASCII renderings of a lattice pair and its mask B^(0).

Left panel: nodes of ``Lambda~`` in the closed box ``[0,4] x [0,2]`` with the
chosen generators in red.  Right panel: nodes of ``Lambda°`` in ``[0,1]^2``,
filled when they lie in ``Lambda~°`` and hollow otherwise, over the shaded
cells of ``B^(0)``.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .cases import default_marks
from .invariance import geometry
from .lattice import LatticeError, RationalLattice, adjoint, minimal_resolution

__all__ = ["DiagramData", "diagram_data", "render_svg", "render_ascii", "shaded_cells_from_svg"]

UNIT = 60  # pixels per unit, left panel
CELL = 240  # pixels per unit, right panel
MARGIN = 30
GAP = 60
NODE_R = 4


@dataclass(frozen=True)
class DiagramData:
    lam: RationalLattice
    tilde: RationalLattice
    marks: tuple
    left_box: tuple[Fraction, Fraction]
    tilde_nodes: list
    adj_nodes: list  # (point, filled)
    resolution: tuple[int, int]
    shaded: list  # sorted (i, j) cells


def _box_nodes(lat: RationalLattice, box: Sequence[Fraction]) -> list[tuple[Fraction, Fraction]]:
    """Lattice points in the closed box ``[0, box_0] x [0, box_1]``."""
    h = lat.basis
    out = []
    # lower-triangular basis: x = k0 h00, y = k0 h10 + k1 h11
    k0_max = int(box[0] / h[0][0])
    for k0 in range(0, k0_max + 1):
        x = k0 * h[0][0]
        y0 = k0 * h[1][0]
        lo = -((y0) // h[1][1]) - 1
        hi = int((box[1] - y0) / h[1][1]) + 1
        for k1 in range(int(lo), hi + 1):
            y = y0 + k1 * h[1][1]
            if 0 <= y <= box[1]:
                out.append((x, y))
    return sorted(set(out))


def diagram_data(lam: RationalLattice, tilde: RationalLattice, marks: Sequence[Sequence] | None = None) -> DiagramData:
    if lam.dim != 2 or tilde.dim != 2:
        raise LatticeError("unsupported dimension: diagrams need d = 1 lattices")
    marks = default_marks(lam, tilde) if marks is None else marks
    marks = tuple(tuple(Fraction(x) for x in m) for m in marks)
    for m in marks:
        if m not in tilde:
            raise LatticeError(f"marked point {m} is not in Lambda~")
    left_box = (max(Fraction(4), lam.basis[0][0]), max(Fraction(2), lam.basis[1][1]))
    geo = geometry(lam, tilde, minimal_resolution(adjoint(lam)))
    res = geo.resolution
    adj_nodes = [(p, p in geo.tilde_adj) for p in _box_nodes(geo.lam_adj, (Fraction(1), Fraction(1)))]
    shaded = sorted((int(i), int(j)) for i, j in zip(*np.nonzero(geo.masks.masks[0])))
    return DiagramData(lam, tilde, marks, left_box, _box_nodes(tilde, left_box), adj_nodes, res, shaded)


def _f(x) -> str:
    return f"{float(x):.4f}"


def render_svg(lam: RationalLattice, tilde: RationalLattice, marks=None, title: str | None = None) -> str:
    data = diagram_data(lam, tilde, marks)
    bw, bh = data.left_box
    left_w, left_h = float(bw) * UNIT, float(bh) * UNIT
    right_x0 = MARGIN + left_w + GAP
    panel_h = max(left_h, CELL)
    width = right_x0 + CELL + MARGIN
    height = MARGIN * 2 + panel_h
    base_y = MARGIN + panel_h  # y axis points up

    def lx(x):
        return _f(MARGIN + float(x) * UNIT)

    def ly(y):
        return _f(base_y - float(y) * UNIT)

    def rx(x):
        return _f(right_x0 + float(x) * CELL)

    def ry(y):
        return _f(base_y - float(y) * CELL)

    P, Q = data.resolution
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_f(width)}" height="{_f(height)}" '
        f'viewBox="0 0 {_f(width)} {_f(height)}">',
    ]
    if title:
        out.append(f"<title>{title}</title>")
    out.append(f'<desc>lambda={data.lam.to_text()} lambda_tilde={data.tilde.to_text()} grid={P}x{Q}</desc>')
    # left panel
    out.append('<g id="lattice">')
    out.append(f'<rect x="{lx(0)}" y="{ly(bh)}" width="{_f(left_w)}" height="{_f(left_h)}" '
               'fill="none" stroke="#999999" stroke-width="0.5"/>')
    out.append(f'<rect x="{lx(0)}" y="{ly(1)}" width="{_f(UNIT)}" height="{_f(UNIT)}" '
               'fill="none" stroke="#000000" stroke-width="1.5"/>')
    for x, y in data.tilde_nodes:
        red = (x, y) in data.marks
        color = "#cc0000" if red else "#000000"
        cls = "node mark" if red else "node"
        out.append(f'<circle class="{cls}" cx="{lx(x)}" cy="{ly(y)}" r="{NODE_R}" fill="{color}" stroke="{color}"/>')
    out.append("</g>")
    # right panel
    out.append('<g id="adjoint">')
    cw, ch = CELL / P, CELL / Q
    for i, j in data.shaded:
        out.append(f'<rect class="b0" data-i="{i}" data-j="{j}" x="{rx(Fraction(i, P))}" y="{ry(Fraction(j + 1, Q))}" '
                   f'width="{_f(cw)}" height="{_f(ch)}" fill="#bbbbbb" stroke="none"/>')
    out.append(f'<rect x="{rx(0)}" y="{ry(1)}" width="{_f(CELL)}" height="{_f(CELL)}" '
               'fill="none" stroke="#000000" stroke-width="3"/>')
    for p, filled in data.adj_nodes:
        if filled:
            out.append(f'<circle class="node filled" cx="{rx(p[0])}" cy="{ry(p[1])}" r="{NODE_R}" '
                       'fill="#000000" stroke="#000000"/>')
        else:
            out.append(f'<circle class="node hollow" cx="{rx(p[0])}" cy="{ry(p[1])}" r="{NODE_R}" '
                       'fill="#ffffff" stroke="#000000"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_ascii(lam: RationalLattice, tilde: RationalLattice, marks=None) -> str:
    """Text version: '●' filled node, '○' hollow node, '#' shaded cell, '*' marked generator."""
    data = diagram_data(lam, tilde, marks)
    lines = [f"Lambda~ = {data.tilde.to_text()}   marks: " +
             " ".join("(" + ",".join(str(v) for v in m) + ")" for m in data.marks)]
    bw, bh = data.left_box
    # left panel on the integer grid
    tn = set(data.tilde_nodes)
    for y in range(int(bh), -1, -1):
        row = []
        for x in range(int(bw) + 1):
            p = (Fraction(x), Fraction(y))
            row.append("*" if p in data.marks else ("●" if p in tn else "·"))
        lines.append(" ".join(row))
    lines.append("")
    P, Q = data.resolution
    filled = {p: f for p, f in data.adj_nodes}
    shaded = set(data.shaded)
    lines.append(f"Lambda° nodes on [0,1]^2, grid {P}x{Q}")
    for j in range(Q, -1, -1):
        row = []
        for i in range(P + 1):
            p = (Fraction(i, P), Fraction(j, Q))
            row.append("●" if filled.get(p) else ("○" if p in filled else "+"))
        lines.append("   ".join(row))
        if j > 0:
            cells = ["#" if (i, j - 1) in shaded else " " for i in range(P)]
            lines.append("  " + "   ".join(cells))
    return "\n".join(lines) + "\n"


def shaded_cells_from_svg(svg: str) -> set[tuple[int, int]]:
    root = ET.fromstring(svg.encode("utf-8"))
    out = set()
    for el in root.iter("{http://www.w3.org/2000/svg}rect"):
        if el.get("class") == "b0":
            out.add((int(el.get("data-i")), int(el.get("data-j"))))
    return out
