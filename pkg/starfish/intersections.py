"""
Подсчет самопересечений петли на поверхности.

Каждое ребро переносится в фундаментальную область элементом M_i
(по середине ребра) и сравнивается с образами n·(M_j·ребро j) для коротких
элементов n группы. Отрезки сравниваются в модели Клейна, где геодезические
прямолинейны. Каждая точка пересечения встречается дважды: (i, j, n) и (j, i, n^-1).
"""
import logging
from dataclasses import dataclass

import numpy as np

from .constants import ShorteningConstants
from .exceptions import DegeneracyError
from .hyperbolic_group import (
    IsometryPSL2,
    compose,
    from_hyperboloid,
    geodesic_midpoint,
    hyperbolic_distance,
    klein_coordinates,
    reduce_many,
    short_group_elements,
)

logger = logging.getLogger('starfish')


@dataclass(frozen=True)
class Crossing:
    """Пересечение ребра i с образом delta·(ребро j) в точке point (координаты подъема)"""

    first: int
    second: int
    delta: IsometryPSL2
    point: complex


def _apply_stack(mats, z):
    return (mats[..., 0, 0] * z + mats[..., 0, 1]) / (mats[..., 1, 0] * z + mats[..., 1, 1])


def _orientation(ax, ay, bx, by, cx, cy):
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def _neighbor_index(neighbors, matrix):
    target = matrix.as_array()
    difference = np.minimum(
        np.abs(neighbors - target).max(axis=(1, 2)),
        np.abs(neighbors + target).max(axis=(1, 2)),
    )
    best = int(np.argmin(difference))
    if difference[best] < 1e-6 * max(1.0, np.abs(target).max()):
        return best
    return None


def _lift_edges(loop):
    """Ребра петли в координатах H (z = frame^-1·w) и замыкающий элемент там же"""
    inverse = loop.frame.inverse()
    starts = inverse.apply(loop.vertices)
    closing = compose(compose(inverse, loop.closing), loop.frame)
    ends = np.append(starts[1:], closing.apply(starts[0]))
    return starts, ends, closing


def _excluded(neighbors, reductions, closing, count):
    """Пары соседних ребер, касающихся в общей вершине, для каждого n"""
    identity = _neighbor_index(neighbors, IsometryPSL2.identity())
    excluded = np.zeros((len(neighbors), count, count), dtype=bool)
    excluded[identity, np.arange(count), np.arange(count)] = True
    matrices = [IsometryPSL2.from_array(m) for m in reductions]
    for index in range(count):
        following = (index + 1) % count
        if following:
            delta = compose(matrices[index], matrices[following].inverse())
        else:
            delta = compose(compose(matrices[index], closing), matrices[0].inverse())
        forward = _neighbor_index(neighbors, delta)
        backward = _neighbor_index(neighbors, delta.inverse())
        if forward is not None:
            excluded[forward, index, following] = True
        if backward is not None:
            excluded[backward, following, index] = True
    return excluded


def find_crossings(loop):
    """
    Все упорядоченные тройки (i, j, n), где приведенное ребро i трансверсально
    пересекает n·(приведенное ребро j). Возвращает (crossings, degenerate).
    """
    starts, ends, closing = _lift_edges(loop)
    count = len(starts)
    _, reductions = reduce_many(geodesic_midpoint(starts, ends))
    reduced_a = _apply_stack(reductions, starts)
    reduced_b = _apply_stack(reductions, ends)
    reduced_mid = _apply_stack(reductions, geodesic_midpoint(starts, ends))
    half = np.asarray(hyperbolic_distance(reduced_a, reduced_b)) / 2.0
    neighbors = np.stack([element.as_array() for element in short_group_elements(3)])
    excluded = _excluded(neighbors, reductions, closing, count)

    ax, ay = klein_coordinates(reduced_a)
    bx, by = klein_coordinates(reduced_b)
    crossings = []
    degenerate = []
    for k, neighbor in enumerate(neighbors):
        image_a = _apply_stack(neighbor, reduced_a)
        image_b = _apply_stack(neighbor, reduced_b)
        image_mid = _apply_stack(neighbor, reduced_mid)
        # Необходимое условие: середины ближе суммы полудлин
        near = hyperbolic_distance(reduced_mid[:, None], image_mid[None, :]) \
            <= half[:, None] + half[None, :] + 1e-12
        near &= ~excluded[k]
        if not near.any():
            continue
        first, second = np.nonzero(near)
        cx, cy = klein_coordinates(image_a[second])
        dx, dy = klein_coordinates(image_b[second])
        o1 = _orientation(ax[first], ay[first], bx[first], by[first], cx, cy)
        o2 = _orientation(ax[first], ay[first], bx[first], by[first], dx, dy)
        o3 = _orientation(cx, cy, dx, dy, ax[first], ay[first])
        o4 = _orientation(cx, cy, dx, dy, bx[first], by[first])
        crossing = (o1 * o2 < 0) & (o3 * o4 < 0)
        eps = ShorteningConstants.ORIENTATION_EPS
        touching = ((np.abs(o1) < eps) | (np.abs(o2) < eps)) & (o3 * o4 <= 0) \
            | ((np.abs(o3) < eps) | (np.abs(o4) < eps)) & (o1 * o2 <= 0)
        for position in np.flatnonzero(touching):
            degenerate.append((int(first[position]), int(second[position]), k))
        for position in np.flatnonzero(crossing & ~touching):
            i, j = int(first[position]), int(second[position])
            # Точка пересечения прямых в модели Клейна
            t = o1[position] / (o1[position] - o2[position])
            kx = cx[position] + t * (dx[position] - cx[position])
            ky = cy[position] + t * (dy[position] - cy[position])
            scale = 1.0 / np.sqrt(1.0 - kx * kx - ky * ky)
            reduced_point = complex(from_hyperboloid(np.array([scale, kx * scale, ky * scale])))
            m_i = IsometryPSL2.from_array(reductions[i])
            m_j = IsometryPSL2.from_array(reductions[j])
            delta = compose(compose(m_i.inverse(), IsometryPSL2.from_array(neighbor)), m_j)
            crossings.append(Crossing(i, j, delta, complex(m_i.inverse().apply(reduced_point))))
    return crossings, degenerate


def self_intersections(atlas, loop, seed=0):
    """
    Число трансверсальных точек самопересечения петли.

    При вырожденном положении одна из вершин сдвигается на 1e-9
    в детерминированном направлении, и подсчет повторяется.
    """
    crossings, degenerate = find_crossings(loop)
    if degenerate:
        rng = np.random.default_rng([seed, len(loop)])
        first, _, _ = degenerate[0]
        vertices = loop.vertices.copy()
        angle = rng.uniform(0.0, 2.0 * np.pi)
        vertices[first] += ShorteningConstants.DEGENERACY_PERTURBATION \
            * vertices[first].imag * np.exp(1j * angle)
        logger.debug(f'Вырожденное положение у ребра {first}, вершина сдвинута')
        crossings, degenerate = find_crossings(loop.with_vertices(vertices))
        if degenerate:
            raise DegeneracyError(
                'Петля не в общем положении после возмущения',
                pairs=degenerate[:5],
            )
    if len(crossings) % 2:
        logger.warning(f'Нечетное число упорядоченных пересечений: {len(crossings)}')
    return (len(crossings) + 1) // 2


def primary_crossing(loop):
    """Пересечение (i, j, δ) с i < j для петли ровно с одной точкой самопересечения"""
    crossings, degenerate = find_crossings(loop)
    if degenerate:
        raise DegeneracyError('Петля не в общем положении', pairs=degenerate[:5])
    ordered = [crossing for crossing in crossings if crossing.first < crossing.second]
    return crossings, ordered
