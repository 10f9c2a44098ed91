"""
Развертка сферы по фигуре-восьмерке.

Восьмерка разрезается в точке самопересечения на две простые петли γ1, γ2.
t = 0: почти точечный цикл у вершины шапочки 3, t = 1/2: γ1 ∪ γ2,
t = 1: почти точечные циклы у вершин шапочек 1 и 2. Каждая область
заметается сдвигом петли вглубь своего каспа со сглаживанием Биркгофа.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .atlas import LEVEL_CHARTS, horo_levels, parabolic_frame
from .constants import GeodesicConstants, SweepoutConstants
from .exceptions import ConstructionError, DomainError, PreconditionError
from .hyperbolic_group import (
    IsometryKind,
    IsometryPSL2,
    classify,
    compose,
    hyperbolic_distance,
    in_fundamental_domain,
    reduce_many,
)
from .intersections import primary_crossing
from .shortening import PolylineLoop, birkhoff_step, loop_length, refine, snap_to_axis

logger = logging.getLogger('starfish')


class SweepTarget:
    CUSP_PAIR = 'cusp-pair'
    CUSP_SINGLE = 'cusp-single'

    CHOICES = [CUSP_PAIR, CUSP_SINGLE]


@dataclass
class RegionSweep:
    """Заметание одной области: кадры (списки петель) и их суммарные длины"""

    target: str
    frames: list
    lengths: list
    boundary_length: float
    offset_step: float
    slack: float
    cusps: list = field(default_factory=list)


@dataclass
class SweepoutFamily:
    times: np.ndarray
    cycles: list
    lengths: np.ndarray
    boundary_length: float
    waist_index: int
    slack: float
    offset_step: float
    max_frame_step: float
    coverage_parity: float = None

    @property
    def endpoint_lengths(self):
        return float(self.lengths[0]), float(self.lengths[-1])


# ============================================================================
# РАЗРЕЗАНИЕ ВОСЬМЕРКИ
# ============================================================================

def _peripheral_cusp(closing):
    if classify(closing).kind != IsometryKind.PARABOLIC:
        return None
    _, cusp, _ = parabolic_frame(closing)
    return cusp


def split_figure_eight(atlas, loop):
    """
    Две простые геодезические петли с общей вершиной в точке самопересечения.

    Если ребро i пересекает δ·(ребро j) в точке P, то γ1 = [P, z_{i+1}..z_j]
    с замыканием δ^-1, γ2 = [δ^-1·P, z_{j+1}..z_{n-1}, g·z_0..g·z_i] с замыканием g·δ.
    Перед разрезанием вершины проецируются на ось g, если проекция обходит тонкую часть.
    """
    base = snap_to_axis(atlas, loop.in_frame(IsometryPSL2.identity(), 1))
    crossings, ordered = primary_crossing(base)
    if len(ordered) != 1 or len(crossings) != 2:
        raise PreconditionError(
            f'Ожидалась ровно одна точка самопересечения, найдено {len(crossings) / 2:g}',
            intersections=len(crossings) / 2,
        )
    crossing = ordered[0]
    i, j, delta, point = crossing.first, crossing.second, crossing.delta, crossing.point
    vertices = base.vertices
    closing = base.closing
    first = PolylineLoop(
        vertices=np.concatenate([[point], vertices[i + 1:j + 1]]),
        closing=delta.inverse(),
        word=f'{loop.word}:1',
    )
    second = PolylineLoop(
        vertices=np.concatenate([
            [delta.inverse().apply(point)], vertices[j + 1:], closing.apply(vertices[:i + 1])
        ]),
        closing=compose(closing, delta),
        word=f'{loop.word}:2',
    )
    for part in (first, second):
        if _peripheral_cusp(part.closing) is None:
            raise ConstructionError(
                f'Петля {part.word} не периферическая', frame=part.to_dict()
            )
    total = loop_length(atlas, base)
    parts = loop_length(atlas, first) + loop_length(atlas, second)
    if abs(total - parts) > 1e-8:
        logger.warning(f'Сумма длин частей {parts:.12f} отличается от {total:.12f}')
    return first, second


def outer_boundary(gamma1, gamma2):
    """
    Граница области, содержащей касп 3: γ1, затем γ2 в обратном
    направлении, перенесенная замыканием γ2 в конец γ1.
    """
    tail = gamma2.closing.inverse().apply(gamma2.vertices[1:][::-1])
    candidates = [
        (np.concatenate([gamma1.vertices, [gamma2.vertices[0]], tail]),
         compose(gamma2.closing.inverse(), gamma1.closing)),
        (np.concatenate([gamma1.vertices, gamma2.vertices]),
         compose(gamma2.closing, gamma1.closing)),
    ]
    for vertices, closing in candidates:
        if _peripheral_cusp(closing) is not None:
            return PolylineLoop(vertices=vertices, closing=closing,
                                word=gamma1.word.split(':')[0] + ':outer')
    raise ConstructionError(
        'Граница внешней области не периферическая',
        frame={'first': gamma1.to_dict(), 'second': gamma2.to_dict()},
    )


# ============================================================================
# ЗАМЕТАНИЕ ОБЛАСТЕЙ
# ============================================================================

def push_loop(loop, amount):
    """Сдвиг вглубь каспа в его карте: w -> Re w + i·Im w·e^amount"""
    vertices = loop.vertices
    return loop.with_vertices(vertices.real + 1j * vertices.imag * math.exp(amount))


def _sweep_loop(atlas, loop, steps, smoothing_sweeps, step):
    chart, cusp, _ = parabolic_frame(compose(compose(loop.frame.inverse(), loop.closing),
                                             loop.frame))
    working = loop.in_frame(chart, cusp)
    boundary = loop_length(atlas, working, step, recompute=True)
    if boundary <= SweepoutConstants.ENDPOINT_LENGTH:
        return cusp, [working], [boundary], 0.0
    if len(working) % 2:
        working = refine(atlas, working, step)
    shallowest = math.log(2.0 / working.vertices.imag.min())
    final_length = SweepoutConstants.ENDPOINT_LENGTH / 4.0
    total_push = max(0.0, shallowest - atlas.profile.flat_level) \
        + math.log(boundary / final_length)
    increment = total_push / steps
    frames = [working]
    lengths = [boundary]
    current = working
    for _ in range(steps):
        current = push_loop(current, increment)
        for _ in range(smoothing_sweeps):
            current = birkhoff_step(atlas, current, 'even', step)
            current = birkhoff_step(atlas, current, 'odd', step)
        frames.append(current)
        lengths.append(loop_length(atlas, current, step))
    return cusp, frames, lengths, increment


def sweep_region(atlas, boundary, target, steps=SweepoutConstants.DEFAULT_HALF_STEPS,
                 smoothing_sweeps=SweepoutConstants.SMOOTHING_SWEEPS,
                 step=GeodesicConstants.DEFAULT_STEP):
    """
    Семейство от граничного цикла до почти точечного цикла у вершин шапочек.

    Суммарная длина каждого кадра не больше граничной длины плюс 5%.
    """
    if target not in SweepTarget.CHOICES:
        raise DomainError(f'Неизвестная цель {target!r}', code='invalid_target')
    expected = 2 if target == SweepTarget.CUSP_PAIR else 1
    if len(boundary) != expected:
        raise PreconditionError(
            f'Для цели {target} нужно {expected} граничных петель, получено {len(boundary)}'
        )
    if steps < 1:
        raise DomainError('steps должен быть положительным', code='invalid_steps')
    tracks = [_sweep_loop(atlas, loop, steps, smoothing_sweeps, step) for loop in boundary]
    width = max(len(track[1]) for track in tracks)
    frames = []
    lengths = []
    for index in range(width):
        cycle = []
        total = 0.0
        for _, track_frames, track_lengths, _ in tracks:
            position = min(index, len(track_frames) - 1)
            cycle.append(track_frames[position])
            total += track_lengths[position]
        frames.append(cycle)
        lengths.append(total)
    boundary_length = lengths[0]
    limit = boundary_length * (1.0 + SweepoutConstants.LENGTH_SLACK)
    for index, total in enumerate(lengths):
        if total > limit:
            logger.error(f'Кадр {index}: длина {total:.8f} больше допустимой {limit:.8f}')
            raise ConstructionError(
                f'Длина кадра {index} превышает границу на '
                f'{100.0 * (total / boundary_length - 1.0):.2f}%',
                frame=[loop.to_dict() for loop in frames[index]],
                index=index,
            )
    return RegionSweep(
        target=target,
        frames=frames,
        lengths=lengths,
        boundary_length=boundary_length,
        offset_step=max(track[3] for track in tracks),
        slack=max(0.0, max(lengths) - boundary_length),
        cusps=[track[0] for track in tracks],
    )


# ============================================================================
# ДИАГНОСТИКА
# ============================================================================

def frame_step(previous, current):
    """Наибольшее смещение соответственных вершин между кадрами одной области"""
    worst = 0.0
    for before, after in zip(previous, current):
        if len(before) != len(after):
            continue
        worst = max(worst, float(np.max(hyperbolic_distance(before.vertices, after.vertices))))
    return worst


def _lift_to_cusp_plane(points, loop):
    """Самый глубокий подъем точек в плоскость карты петли (касп на ∞)"""
    reduced, _ = reduce_many(points)
    levels = horo_levels(reduced)
    columns = {1: [0], 2: [1], 3: [2, 3]}[loop.cusp]
    choice = np.array(columns)[np.argmin(levels[:, columns], axis=1)]
    lifted = (LEVEL_CHARTS[choice, 0, 0] * reduced + LEVEL_CHARTS[choice, 0, 1]) \
        / (LEVEL_CHARTS[choice, 1, 0] * reduced + LEVEL_CHARTS[choice, 1, 1])
    probe = loop.frame.inverse().apply(1000j)
    probe_reduced, _ = reduce_many([probe])
    probe_levels = horo_levels(probe_reduced)[0]
    column = columns[int(np.argmin(probe_levels[columns]))]
    image = LEVEL_CHARTS[column]
    anchor = (image[0, 0] * probe_reduced[0] + image[0, 1]) \
        / (image[1, 0] * probe_reduced[0] + image[1, 1])
    return lifted - anchor.real


def _inside(points, loop):
    """Лежит ли подъем точки выше кривой петли (на стороне каспа)"""
    period = abs(loop.closing.b / loop.closing.d)
    order = np.argsort(loop.vertices.real % period)
    xs = loop.vertices.real[order] % period
    ys = loop.vertices.imag[order]
    curve = np.interp(points.real % period, xs, ys, period=period)
    return points.imag > curve


def coverage_parity(tracks, samples=SweepoutConstants.COVERAGE_SAMPLES, seed=0):
    """
    Доля случайных точек поверхности, пересекаемых семейством нечетное число раз.

    Эвристика степени: считается число смен стороны кривой между кадрами.
    """
    rng = np.random.default_rng(seed)
    points = []
    while len(points) < samples:
        candidates = rng.uniform(-1.0, 1.0, samples) \
            + 1j * np.exp(rng.uniform(math.log(0.05), math.log(4.0), samples))
        points.extend(candidates[in_fundamental_domain(candidates)])
    points = np.array(points[:samples])
    toggles = np.zeros(samples, dtype=int)
    for track in tracks:
        reference = track[0]
        lifted = _lift_to_cusp_plane(points, reference)
        previous = _inside(lifted, reference)
        for loop in track[1:]:
            current = _inside(lifted, loop)
            toggles += previous != current
            previous = current
    return float(np.mean(toggles % 2 == 1))


# ============================================================================
# РАЗВЕРТКА
# ============================================================================

def build_sweepout(atlas, loop, half_steps=SweepoutConstants.DEFAULT_HALF_STEPS,
                   smoothing_sweeps=SweepoutConstants.SMOOTHING_SWEEPS,
                   step=GeodesicConstants.DEFAULT_STEP, coverage_seed=0):
    """Полное семейство на сетке из 2·half_steps + 1 моментов с перемычкой в t = 1/2"""
    if 2 * half_steps + 1 < SweepoutConstants.MIN_SAMPLES:
        raise DomainError(
            f'Нужно не меньше {SweepoutConstants.MIN_SAMPLES} моментов времени',
            code='invalid_half_steps',
        )
    gamma1, gamma2 = split_figure_eight(atlas, loop)
    inner = sweep_region(atlas, [gamma1, gamma2], SweepTarget.CUSP_PAIR,
                         half_steps, smoothing_sweeps, step)
    outer = sweep_region(atlas, [outer_boundary(gamma1, gamma2)], SweepTarget.CUSP_SINGLE,
                         half_steps, smoothing_sweeps, step)
    outer_frames = _padded(outer.frames, half_steps + 1)
    outer_lengths = _padded(outer.lengths, half_steps + 1)
    inner_frames = _padded(inner.frames, half_steps + 1)
    inner_lengths = _padded(inner.lengths, half_steps + 1)

    waist = [gamma1, gamma2]
    waist_length = loop_length(atlas, gamma1, step) + loop_length(atlas, gamma2, step)
    cycles = outer_frames[:0:-1] + [waist] + inner_frames[1:]
    lengths = np.array(outer_lengths[:0:-1] + [waist_length] + inner_lengths[1:])
    times = np.linspace(0.0, 1.0, 2 * half_steps + 1)

    steps = [frame_step(a, b) for a, b in zip(outer.frames, outer.frames[1:])]
    steps += [frame_step(a, b) for a, b in zip(inner.frames, inner.frames[1:])]
    tracks = [[frame[0] for frame in outer.frames]]
    tracks += [[frame[k] for frame in inner.frames] for k in range(2)]
    family = SweepoutFamily(
        times=times,
        cycles=cycles,
        lengths=lengths,
        boundary_length=waist_length,
        waist_index=half_steps,
        slack=max(inner.slack, outer.slack),
        offset_step=max(inner.offset_step, outer.offset_step),
        max_frame_step=max(steps) if steps else 0.0,
        coverage_parity=coverage_parity(tracks, seed=coverage_seed),
    )
    logger.info(
        f'Развертка: {len(times)} кадров, перемычка {waist_length:.8f} в кадре '
        f'{family.waist_index}, максимум длины {family.lengths.max():.8f} '
        f'в кадре {int(np.argmax(lengths))}'
    )
    return family


def _padded(items, size):
    items = list(items)
    return items + [items[-1]] * (size - len(items))


def width_upper_bound(family):
    """Максимум суммарной длины цикла по семейству"""
    return float(np.max(family.lengths))
