"""
SVG 1.1 line plots rendered from text templates
"""
import logging
import math
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..chain.geometry import ChainGeometry
from ..simulation.integrator import EnergyTrace
from ..spectrum.roots import SpectralRoot
from ..spectrum.transfer import asymptotic_char_fn, transfer_product
from ..utils.file_utils import write_text_file

logger = logging.getLogger(__name__)

NS_SVG = 'http://www.w3.org/2000/svg'
PALETTE = ['#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#ff7f0e', '#8c564b', '#e377c2', '#17becf']


def demangle(key: str) -> str:
    return key.replace('_', '-')


def rounder(x, prec: int = 3):
    if isinstance(x, float):
        xr = round(x, ndigits=prec)
        return int(xr) if xr % 1 == 0 else xr
    return x


def props_repr(attr: Dict) -> str:
    return ' '.join(f'{demangle(k)}="{rounder(v)}"' for k, v in attr.items())


def escape(text: str) -> str:
    return text.replace('&', '&amp;').replace('<', '&lt;').replace('>', '&gt;')


class Element:
    """One SVG tag; text becomes the escaped body"""

    def __init__(self, tag: str, text: Optional[str] = None, **attr):
        self.tag = tag
        self.text = text
        self.attr = attr

    def svg(self) -> str:
        props = props_repr(self.attr)
        pre = ' ' if props else ''
        if self.text is None:
            return f'<{self.tag}{pre}{props} />'
        return f'<{self.tag}{pre}{props}>{escape(self.text)}</{self.tag}>'


class Group(Element):
    def __init__(self, children: Optional[List[Element]] = None, **attr):
        super().__init__('g', **attr)
        self.children = children or []

    def add(self, child: Element) -> "Group":
        self.children.append(child)
        return self

    def svg(self) -> str:
        props = props_repr(self.attr)
        pre = ' ' if props else ''
        inside = '\n'.join(child.svg() for child in self.children)
        return f'<g{pre}{props}>\n{inside}\n</g>'


def linear_ticks(lo: float, hi: float, count: int = 6) -> List[Tuple[float, str]]:
    return [(float(v), f'{v:.3g}') for v in np.linspace(lo, hi, count)]


def decade_ticks(lo: float, hi: float) -> List[Tuple[float, str]]:
    """Integer powers of ten inside [lo, hi], in log10 units"""
    first, last = math.ceil(lo - 1e-9), math.floor(hi + 1e-9)
    if last < first:
        return linear_ticks(lo, hi, 3)
    return [(float(k), f'1e{k}') for k in range(first, last + 1)]


class LinePlot:
    """
    Fixed-size plot area with axes, polylines, markers and rug ticks

    Data passed to a log axis is already in log10 units; only the tick
    labels differ.
    """

    def __init__(self, x_range: Tuple[float, float], y_range: Tuple[float, float],
                 title: str = '', x_label: str = '', y_label: str = '',
                 log_x: bool = False, log_y: bool = False,
                 width: int = 720, height: int = 420, margin: int = 60):
        self.x_lo, self.x_hi = x_range
        self.y_lo, self.y_hi = y_range
        if not self.x_hi > self.x_lo:
            self.x_hi = self.x_lo + 1.0
        if not self.y_hi > self.y_lo:
            self.y_hi = self.y_lo + 1.0
        self.title = title
        self.x_label = x_label
        self.y_label = y_label
        self.log_x = log_x
        self.log_y = log_y
        self.width = width
        self.height = height
        self.margin = margin
        self.layers = Group(clip_path='url(#plot-area)')
        self.legend: List[Tuple[str, str]] = []

    def map_x(self, x):
        span = self.width - 2 * self.margin
        return self.margin + (np.asarray(x, dtype=np.float64) - self.x_lo) / (self.x_hi - self.x_lo) * span

    def map_y(self, y):
        span = self.height - 2 * self.margin
        return self.height - self.margin - (np.asarray(y, dtype=np.float64) - self.y_lo) / (self.y_hi - self.y_lo) * span

    def add_line(self, xs: Sequence[float], ys: Sequence[float], stroke: str,
                 label: Optional[str] = None, stroke_width: float = 1.5, dashed: bool = False):
        """Polyline, broken at non-finite values"""
        px, py = self.map_x(xs), self.map_y(ys)
        finite = np.isfinite(px) & np.isfinite(py)
        breaks = np.flatnonzero(np.diff(finite.astype(np.int8)) != 0) + 1
        extra = {'stroke_dasharray': '6 4'} if dashed else {}
        for segment in np.split(np.arange(px.size), breaks):
            if segment.size < 2 or not finite[segment[0]]:
                continue
            points = ' '.join(f'{px[i]:.2f},{py[i]:.2f}' for i in segment)
            self.layers.add(Element('polyline', points=points, fill='none', stroke=stroke,
                                    stroke_width=stroke_width, **extra))
        if label:
            self.legend.append((label, stroke))

    def add_points(self, xs: Sequence[float], ys: Sequence[float], fill: str,
                   label: Optional[str] = None, radius: float = 3.0):
        for x, y in zip(self.map_x(xs), self.map_y(ys)):
            if math.isfinite(x) and math.isfinite(y):
                self.layers.add(Element('circle', cx=float(x), cy=float(y), r=radius, fill=fill))
        if label:
            self.legend.append((label, fill))

    def add_rug(self, xs: Sequence[float], stroke: str, label: Optional[str] = None,
                row: int = 0, length: float = 8.0):
        """Short vertical ticks along the bottom of the plot area"""
        base = self.height - self.margin - row * (length + 2.0)
        for x in self.map_x(xs):
            self.layers.add(Element('line', x1=float(x), y1=base, x2=float(x), y2=base - length,
                                    stroke=stroke, stroke_width=1.0))
        if label:
            self.legend.append((label, stroke))

    def add_hline(self, y: float, stroke: str = '#999999'):
        py = float(self.map_y(y))
        self.layers.add(Element('line', x1=self.margin, y1=py, x2=self.width - self.margin, y2=py,
                                stroke=stroke, stroke_width=0.8))

    def _axes(self) -> Group:
        m, w, h = self.margin, self.width, self.height
        axes = Group(font_family='sans-serif', font_size=11)
        axes.add(Element('rect', x=m, y=m, width=w - 2 * m, height=h - 2 * m,
                         fill='none', stroke='#333333'))

        x_ticks = decade_ticks(self.x_lo, self.x_hi) if self.log_x else linear_ticks(self.x_lo, self.x_hi)
        for value, text in x_ticks:
            px = float(self.map_x(value))
            axes.add(Element('line', x1=px, y1=h - m, x2=px, y2=h - m + 5, stroke='#333333'))
            axes.add(Element('text', text, x=px, y=h - m + 18, text_anchor='middle'))

        y_ticks = decade_ticks(self.y_lo, self.y_hi) if self.log_y else linear_ticks(self.y_lo, self.y_hi)
        for value, text in y_ticks:
            py = float(self.map_y(value))
            axes.add(Element('line', x1=m - 5, y1=py, x2=m, y2=py, stroke='#333333'))
            axes.add(Element('text', text, x=m - 8, y=py + 4, text_anchor='end'))

        axes.add(Element('text', self.title, x=w / 2, y=m / 2, text_anchor='middle', font_size=14))
        axes.add(Element('text', self.x_label, x=w / 2, y=h - m / 4, text_anchor='middle'))
        axes.add(Element('text', self.y_label, x=m / 4, y=h / 2, text_anchor='middle',
                         transform=f'rotate(-90 {m / 4} {h / 2})'))

        for i, (label, color) in enumerate(self.legend):
            y = m + 14 + 14 * i
            axes.add(Element('rect', x=w - m - 150, y=y - 9, width=10, height=10, fill=color))
            axes.add(Element('text', label, x=w - m - 135, y=y))
        return axes

    def svg(self) -> str:
        m = self.margin
        clip = (f'<defs><clipPath id="plot-area"><rect x="{m}" y="{m}" '
                f'width="{self.width - 2 * m}" height="{self.height - 2 * m}" /></clipPath></defs>')
        head = (f'<svg {props_repr(dict(width=self.width, height=self.height))} '
                f'xmlns="{NS_SVG}" version="1.1">')
        body = '\n'.join([clip, self.layers.svg(), self._axes().svg()])
        return f'<?xml version="1.0" encoding="UTF-8"?>\n{head}\n{body}\n</svg>\n'

    def save(self, path: Path) -> Path:
        return write_text_file(path, self.svg())


def spectrum_plot(geom: ChainGeometry, z_min: float, z_max: float, roots: List[SpectralRoot],
                  predictions: List[Tuple[str, int, float]], samples: int = 4000) -> LinePlot:
    """
    Normalized characteristic function f(z)/(-z)^(N-1) with its leading-order
    counterpart, marked roots and a rug of family predictions per family
    """
    z = np.linspace(z_min, z_max, samples)
    M, _ = transfer_product(geom, z)
    scale = (-z) ** (geom.n_pairs - 1)
    f = M[..., 0, 1] / scale
    f_inf = asymptotic_char_fn(geom, z)

    bound = max(1.5, float(np.nanpercentile(np.abs(f), 95)) * 1.1)
    f = np.where(np.abs(f) <= 4.0 * bound, f, np.nan)

    plot = LinePlot((z_min, z_max), (-bound, bound), title=f'Characteristic function, N={geom.n_pairs}',
                    x_label='z', y_label='f(z) / (-z)^(N-1)')
    plot.add_hline(0.0)
    plot.add_line(z, f_inf, PALETTE[7], label='leading order', stroke_width=1.0, dashed=True)
    plot.add_line(z, f, PALETTE[0], label='f')
    plot.add_points([r.z for r in roots], [0.0] * len(roots), PALETTE[1], label='roots')

    labels = sorted({label for label, _, _ in predictions})
    for row, label in enumerate(labels):
        color = PALETTE[(row + 2) % len(PALETTE)]
        plot.add_rug([z for name, _, z in predictions if name == label], color, label=label, row=row)

    return plot


def energy_plot(trace: EnergyTrace, title: str = 'Energy') -> LinePlot:
    """log10 E against log10 t; samples with t <= 0 or E <= 0 are dropped"""
    t = np.asarray(trace.t, dtype=np.float64)
    e = np.asarray(trace.energy, dtype=np.float64)
    keep = (t > 0.0) & (e > 0.0)
    log_t, log_e = np.log10(t[keep]), np.log10(e[keep])
    if log_t.size == 0:
        log_t, log_e = np.array([0.0]), np.array([0.0])

    plot = LinePlot((float(log_t.min()), float(log_t.max())),
                    (float(log_e.min()) - 0.1, float(log_e.max()) + 0.1),
                    title=title, x_label='t', y_label='E(t)', log_x=True, log_y=True)
    plot.add_line(log_t, log_e, PALETTE[0], label='E')
    return plot
