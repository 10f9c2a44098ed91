"""
SVG-рисунки: фундаментальная область с орициклами и вставками шапочек,
раскадровка развертки.
"""
import logging
import math
from pathlib import Path

import matplotlib

matplotlib.use('Agg')

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.patches import Arc, Circle  # noqa: E402

from .constants import ReportConstants  # noqa: E402
from .hyperbolic_group import geodesic_point, reduce_many  # noqa: E402

logger = logging.getLogger('starfish')

EDGE_SAMPLES = 12
COLORS = ['#c0392b', '#2471a3', '#1e8449', '#7d3c98', '#b9770e']


def _configure():
    plt.rcParams.update({
        'svg.hashsalt': ReportConstants.SVG_HASHSALT,
        'svg.fonttype': 'none',
        'font.size': 8,
        'savefig.facecolor': 'white',
        'savefig.edgecolor': 'none',
    })


def _save(fig, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format='svg', metadata={'Date': None})
    plt.close(fig)
    logger.info(f'SVG записан: {path}')
    return path


def loop_trace(loop, samples=EDGE_SAMPLES):
    """Точки ребер петли в модели Γ(2), приведенные в фундаментальную область"""
    starts = loop.lifts()
    closing = loop.frame.inverse() @ loop.closing @ loop.frame
    ends = np.append(starts[1:], closing.apply(starts[0]))
    fractions = np.linspace(0.0, 1.0, samples)
    points = geodesic_point(starts[:, None], ends[:, None], fractions[None, :])
    reduced, _ = reduce_many(points.ravel())
    return reduced.reshape(points.shape)


def draw_fundamental_domain(ax):
    """Область -1 <= Re z <= 1 вне полуокружностей |2z ∓ 1| = 1 и орициклы высоты 1"""
    ax.plot([-1.0, -1.0], [0.0, 3.0], color='black', linewidth=0.8)
    ax.plot([1.0, 1.0], [0.0, 3.0], color='black', linewidth=0.8)
    for center in (-0.5, 0.5):
        ax.add_patch(Arc((center, 0.0), 1.0, 1.0, theta1=0.0, theta2=180.0,
                         color='black', linewidth=0.8))
    # Орициклы уровня log 2: Im z = 1 у ∞ и окружности |z - x|^2 = Im z у 0 и ±1
    ax.axhline(1.0, color='grey', linestyle='--', linewidth=0.6)
    for center in (-1.0, 0.0, 1.0):
        ax.add_patch(Circle((center, 0.5), 0.5, fill=False, color='grey',
                            linestyle='--', linewidth=0.6))
    ax.set_xlim(-1.1, 1.1)
    ax.set_ylim(0.0, 3.0)
    ax.set_aspect('equal')


def draw_loop(ax, loop, color, label=None):
    trace = loop_trace(loop)
    for index, edge in enumerate(trace):
        ax.plot(edge.real, edge.imag, color=color, linewidth=1.0,
                label=label if index == 0 else None)


def draw_cap_inset(ax, atlas, cusp):
    """Шапочка в развернутых координатах e^ρ·e^{iθ}: плоская зона и переходная полоса"""
    flat = math.exp(atlas.profile.flat_level)
    band = math.exp(atlas.rho_star)
    ax.add_patch(Circle((0.0, 0.0), band, fill=False, color='black', linewidth=0.6))
    ax.add_patch(Circle((0.0, 0.0), flat, fill=True, color='#d5dbdb', linewidth=0.0))
    ax.plot([0.0], [0.0], marker='.', color='black')
    ax.set_xlim(-1.2 * band, 1.2 * band)
    ax.set_ylim(-1.2 * band, 1.2 * band)
    ax.set_aspect('equal')
    ax.set_xticks([])
    ax.set_yticks([])
    ax.set_title(f'c{cusp}', fontsize=7)


def render_witnesses(atlas, witnesses, path):
    """Свидетели систолы на фоне фундаментальной области и три вставки шапочек"""
    _configure()
    fig = plt.figure(figsize=(7.0, 5.0))
    main = fig.add_axes([0.06, 0.08, 0.62, 0.86])
    draw_fundamental_domain(main)
    for index, record in enumerate(witnesses):
        draw_loop(main, record.loop, COLORS[index % len(COLORS)],
                  label=f'{record.word} ({record.length:.6f})')
    if witnesses:
        main.legend(loc='upper right', fontsize=6)
    main.set_title(f'rho* = {atlas.rho_star:g}')
    for cusp in (1, 2, 3):
        inset = fig.add_axes([0.74, 0.08 + 0.30 * (3 - cusp), 0.22, 0.26])
        draw_cap_inset(inset, atlas, cusp)
    return _save(fig, path)


def render_filmstrip(family, path, columns=ReportConstants.FILMSTRIP_COLUMNS):
    """Раскадровка: по одной панели на каждый кадр развертки"""
    _configure()
    count = len(family.times)
    rows = max(1, math.ceil(count / columns))
    fig, axes = plt.subplots(rows, columns, figsize=(1.2 * columns, 1.3 * rows), squeeze=False)
    for index, ax in enumerate(axes.ravel()):
        if index >= count:
            ax.axis('off')
            continue
        draw_fundamental_domain(ax)
        for position, loop in enumerate(family.cycles[index]):
            draw_loop(ax, loop, COLORS[position % len(COLORS)])
        ax.set_xticks([])
        ax.set_yticks([])
        ax.set_title(f't={family.times[index]:.3f}\nL={family.lengths[index]:.3f}', fontsize=5)
    return _save(fig, path)
