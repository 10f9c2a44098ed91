"""
Укорачивание кривых методом Биркгофа на сфере с шапочками.

Петля хранится как подъем в верхнюю полуплоскость: вершины w_k в системе
координат frame (w = frame·z) и замыкающий элемент closing, так что
w_n = closing·w_0. Ребра в изометрической области - точные гиперболические
отрезки, в плоской шапочке - прямые в развертке, в полосе - стрельба RK4.
"""
import cmath
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .atlas import (
    CUSP_CHARTS,
    CorePoint,
    CuspPoint,
    chart_point,
    cusp_frames,
    horo_height,
    locate_in_frame,
    parabolic_frame,
)
from .constants import GeodesicConstants, GroupConstants, ShorteningConstants
from .exceptions import (
    DegeneracyError,
    DomainError,
    NonConvergenceError,
    ShootingError,
)
from .geodesics import GeodesicState, connect_in_chart, integrate, surface_gap
from .hyperbolic_group import (
    HomotopyWord,
    IsometryKind,
    IsometryPSL2,
    axis_projection,
    classify,
    compose,
    geodesic_direction,
    geodesic_midpoint,
    geodesic_point,
    hyperbolic_distance,
    peripheral_generators,
    reduce_to_domain,
    word_to_matrix,
)

logger = logging.getLogger('starfish')


# ============================================================================
# ПЕТЛИ
# ============================================================================

@dataclass(eq=False)
class PolylineLoop:
    """Замкнутая ломаная из геодезических отрезков, заданная подъемом"""

    vertices: np.ndarray
    closing: IsometryPSL2
    frame: IsometryPSL2 = field(default_factory=IsometryPSL2.identity)
    cusp: int = 1
    word: str = ''
    edge_lengths: np.ndarray = None

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=complex)
        if self.vertices.ndim != 1 or len(self.vertices) < ShorteningConstants.MIN_VERTICES:
            raise DomainError(
                f'Петля должна иметь не меньше {ShorteningConstants.MIN_VERTICES} вершин',
                code='too_few_vertices',
            )
        if np.any(self.vertices.imag <= 0):
            raise DomainError('Вершина вне верхней полуплоскости', code='not_in_half_plane')

    def __len__(self):
        return len(self.vertices)

    def successors(self):
        """w_{k+1} для каждой вершины, последняя переходит в closing·w_0"""
        return np.append(self.vertices[1:], self.closing.apply(self.vertices[0]))

    def predecessors(self):
        """w_{k-1} для каждой вершины, первая - closing^-1·w_{n-1}"""
        return np.insert(self.vertices[:-1], 0, self.closing.inverse().apply(self.vertices[-1]))

    def lifts(self):
        """Вершины в координатах верхней полуплоскости модели Γ(2)"""
        return self.frame.inverse().apply(self.vertices)

    def with_vertices(self, vertices, edge_lengths=None):
        return replace(self, vertices=np.asarray(vertices, dtype=complex),
                       edge_lengths=edge_lengths)

    def in_frame(self, frame, cusp):
        """Та же петля в другой системе координат карты"""
        change = compose(frame, self.frame.inverse())
        return PolylineLoop(
            vertices=change.apply(self.vertices),
            closing=compose(compose(change, self.closing), change.inverse()),
            frame=frame,
            cusp=cusp,
            word=self.word,
            edge_lengths=self.edge_lengths,
        )

    def surface_points(self, atlas):
        return [locate_in_frame(atlas, w, self.frame, self.cusp) for w in self.vertices]

    def to_dict(self):
        return {
            'word': self.word,
            'cusp': self.cusp,
            'frame': self.frame.to_list(),
            'closing': self.closing.to_list(),
            'vertices': [[float(w.real), float(w.imag)] for w in self.vertices],
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            vertices=np.array([complex(x, y) for x, y in data['vertices']]),
            closing=IsometryPSL2.from_array(data['closing']),
            frame=IsometryPSL2.from_array(data['frame']),
            cusp=data['cusp'],
            word=data.get('word', ''),
        )


# ============================================================================
# ГЕОМЕТРИЯ РЕБЕР
# ============================================================================

@dataclass
class EdgeGeometry:
    """
    Геодезические между парами точек петли.

    start_phase/end_phase - евклидовы направления в плоскости петли,
    start_angle/end_angle - углы в ортонормированном базисе (e_ρ, e_θ)
    карты каспа (nan для точных гиперболических ребер).
    """

    lengths: np.ndarray
    midpoints: np.ndarray
    start_phase: np.ndarray
    end_phase: np.ndarray
    start_angle: np.ndarray
    end_angle: np.ndarray
    exact: np.ndarray
    chart_min_level: np.ndarray


def _chart_phase(profile, rho, angle):
    """Направление единичного вектора карты в плоскости w = 2θ + 2i·e^{-ρ}"""
    value, _ = profile.evaluate_scalar(rho)
    return math.atan2(-math.cos(angle) / value, math.sin(angle))


def _chart_edge(atlas, loop, start, end, midpoint, step):
    if loop.cusp is not None and start.imag >= 1.0 and end.imag >= 1.0:
        chart = IsometryPSL2.identity()
    else:
        _, _, frames = cusp_frames([loop.frame.inverse().apply(midpoint)])
        chart = compose(IsometryPSL2.from_array(frames[0]), loop.frame.inverse())
    w_a, w_b = chart.apply(start), chart.apply(end)
    rho_a, rho_b = math.log(2.0 / w_a.imag), math.log(2.0 / w_b.imag)
    connection = connect_in_chart(
        atlas.profile, (rho_a, w_a.real / 2.0), (rho_b, w_b.real / 2.0), step
    )
    back = chart.inverse()
    middle = back.apply(complex(chart_point(*connection.midpoint)))
    start_phase = _chart_phase(atlas.profile, rho_a, connection.phi_start) \
        + cmath.phase(back.derivative(w_a))
    end_phase = _chart_phase(atlas.profile, rho_b, connection.phi_end) \
        + cmath.phase(back.derivative(w_b))
    return (connection.length, middle, start_phase, end_phase,
            connection.phi_start, connection.phi_end, float(connection.samples[:, 0].min()))


def edge_geometry(atlas, loop, starts, ends, step=GeodesicConstants.DEFAULT_STEP):
    """Длины, середины и направления геодезических starts[k] -> ends[k] в системе петли"""
    starts = np.asarray(starts, dtype=complex)
    ends = np.asarray(ends, dtype=complex)
    count = len(starts)
    lengths = np.array(hyperbolic_distance(starts, ends), dtype=float, ndmin=1)
    midpoints = np.array(geodesic_midpoint(starts, ends), dtype=complex, ndmin=1)
    inverse = loop.frame.inverse()
    levels = horo_height(inverse.apply(np.concatenate([starts, midpoints, ends])))
    levels = levels.reshape(3, count).min(axis=0)
    # Горофункция 1-липшицева: весь отрезок выше ρ*, если это верно с запасом L/4
    exact = levels - lengths / 4.0 >= atlas.rho_star
    start_phase = np.angle(np.array(geodesic_direction(starts, ends), ndmin=1))
    end_phase = np.angle(-np.array(geodesic_direction(ends, starts), ndmin=1))
    start_angle = np.full(count, np.nan)
    end_angle = np.full(count, np.nan)
    chart_min_level = np.full(count, np.nan)
    for index in np.flatnonzero(~exact):
        (lengths[index], midpoints[index], start_phase[index], end_phase[index],
         start_angle[index], end_angle[index], chart_min_level[index]) = _chart_edge(
            atlas, loop, starts[index], ends[index], midpoints[index], step
        )
    return EdgeGeometry(lengths, midpoints, start_phase, end_phase,
                        start_angle, end_angle, exact, chart_min_level)


def loop_edges(atlas, loop, step=GeodesicConstants.DEFAULT_STEP):
    geometry = edge_geometry(atlas, loop, loop.vertices, loop.successors(), step)
    loop.edge_lengths = geometry.lengths.copy()
    return geometry


def loop_length(atlas, loop, step=GeodesicConstants.DEFAULT_STEP, recompute=False):
    """Сумма длин ребер (из кэша, если он есть)"""
    if recompute or loop.edge_lengths is None:
        return float(loop_edges(atlas, loop, step).lengths.sum())
    return float(loop.edge_lengths.sum())


def turning_angles(atlas, loop, geometry=None, step=GeodesicConstants.DEFAULT_STEP):
    """Угол поворота в каждой вершине между входящим и исходящим ребром"""
    if geometry is None:
        geometry = loop_edges(atlas, loop, step)
    incoming_phase = np.roll(geometry.end_phase, 1)
    incoming_angle = np.roll(geometry.end_angle, 1)
    # Последнее ребро кончается в closing·w_0: переносим направление в w_0
    closed = loop.closing.apply(loop.vertices[0])
    incoming_phase[0] += cmath.phase(loop.closing.inverse().derivative(closed))
    use_chart = ~np.isnan(incoming_angle) & ~np.isnan(geometry.start_angle)
    outgoing = np.where(use_chart, geometry.start_angle, geometry.start_phase)
    incoming = np.where(use_chart, incoming_angle, incoming_phase)
    return np.abs(np.angle(np.exp(1j * (outgoing - incoming))))


def refine(atlas, loop, step=GeodesicConstants.DEFAULT_STEP):
    """Удвоение числа вершин вставкой середин ребер (геометрия петли не меняется)"""
    geometry = edge_geometry(atlas, loop, loop.vertices, loop.successors(), step)
    vertices = np.empty(2 * len(loop), dtype=complex)
    vertices[0::2] = loop.vertices
    vertices[1::2] = geometry.midpoints
    return loop.with_vertices(vertices, np.repeat(geometry.lengths / 2.0, 2))


# ============================================================================
# ЗАТРАВОЧНЫЕ ПЕТЛИ
# ============================================================================

def _letter_path(letter, count):
    """
    count точек пути буквы в карте ее каспа: вверх от i до орицикла
    уровня 0, вдоль него на ±2 и вниз к сдвинутой базовой точке.
    """
    height = ShorteningConstants.SEED_HOROCYCLE_HEIGHT
    base = ShorteningConstants.BASEPOINT.imag
    rise = math.log(height / base)
    across = GroupConstants.CUSP_WIDTH / height
    total = 2.0 * rise + across
    sign = 1.0 if letter > 0 else -1.0
    arclength = np.arange(count) * total / count
    points = np.empty(count, dtype=complex)
    up = arclength < rise
    flat = (arclength >= rise) & (arclength < rise + across)
    down = arclength >= rise + across
    points[up] = 1j * base * np.exp(arclength[up])
    points[flat] = sign * (arclength[flat] - rise) * height + 1j * height
    points[down] = sign * GroupConstants.CUSP_WIDTH + 1j * height * np.exp(rise + across - arclength[down])
    return points


def jitter_offsets(count, rng, modes=ShorteningConstants.JITTER_MODES):
    """Гладкое периодическое возмущение с модулем не больше 1"""
    phase = 2.0 * math.pi * np.arange(count) / count
    offsets = np.zeros(count, dtype=complex)
    for mode in range(1, modes + 1):
        cosine = complex(*rng.uniform(-1.0, 1.0, 2))
        sine = complex(*rng.uniform(-1.0, 1.0, 2))
        offsets += cosine * np.cos(mode * phase) + sine * np.sin(mode * phase)
    return offsets / (2.0 * math.sqrt(2.0) * modes)


def seed_loop_from_word(atlas, word, n, rng=None):
    """
    Затравка класса [w]: для каждой буквы обход орицикла уровня 0
    соответствующего каспа через общую базовую точку i.

    rng задает детерминированное возмущение амплитуды 0.1·Im z.
    """
    if isinstance(word, str):
        word = HomotopyWord.parse(word)
    if not word.letters:
        raise DomainError('Пустое слово не задает петлю', code='empty_word')
    minimum = ShorteningConstants.VERTICES_PER_LETTER * len(word)
    if n < minimum:
        raise DomainError(
            f'Для слова {word.compact} нужно не меньше {minimum} вершин, получено {n}',
            code='too_few_vertices',
        )
    if n % 2:
        raise DomainError('Число вершин должно быть четным', code='odd_vertex_count')
    c1, c2, _ = peripheral_generators()
    generators = {1: c1, -1: c1.inverse(), 2: c2, -2: c2.inverse()}
    letters = len(word)
    counts = [n // letters + (1 if index < n % letters else 0) for index in range(letters)]
    prefix = IsometryPSL2.identity()
    pieces = []
    for letter, count in zip(word.letters, counts):
        chart = CUSP_CHARTS[abs(letter)]
        mapping = compose(prefix, chart.inverse())
        pieces.append(mapping.apply(_letter_path(letter, count)))
        prefix = compose(prefix, generators[letter])
    vertices = np.concatenate(pieces)
    if rng is not None:
        vertices = vertices + ShorteningConstants.JITTER_MAGNITUDE * vertices.imag \
            * jitter_offsets(n, rng)
    return PolylineLoop(
        vertices=vertices,
        closing=word_to_matrix(word),
        frame=IsometryPSL2.identity(),
        cusp=1,
        word=word.canonical().compact,
    )


def coarse_vertex_count(word, vertices):
    """Начальное число вершин: делим пополам, пока не меньше 16·|w| и четно"""
    minimum = max(ShorteningConstants.VERTICES_PER_LETTER * len(word),
                  ShorteningConstants.MIN_VERTICES)
    if vertices < minimum:
        raise DomainError(
            f'vertices = {vertices} меньше {minimum} для слова {word.compact}',
            code='too_few_vertices',
        )
    count = vertices
    while count % 4 == 0 and count // 2 >= minimum:
        count //= 2
    return count + count % 2


# ============================================================================
# ПРОЦЕСС БИРКГОФА
# ============================================================================

def birkhoff_step(atlas, loop, parity, step=GeodesicConstants.DEFAULT_STEP):
    """Вершины заданной четности заменяются серединами геодесических между соседями"""
    if parity not in ('even', 'odd'):
        raise DomainError(f'Четность должна быть even или odd, получено {parity!r}',
                          code='invalid_parity')
    count = len(loop)
    if count % 2:
        raise DomainError('Число вершин должно быть четным', code='odd_vertex_count')
    before = loop_length(atlas, loop, step)
    indices = np.arange(0 if parity == 'even' else 1, count, 2)
    geometry = edge_geometry(
        atlas, loop, loop.predecessors()[indices], loop.successors()[indices], step
    )
    vertices = loop.vertices.copy()
    vertices[indices] = geometry.midpoints
    halves = geometry.lengths / 2.0
    edges = np.empty(count)
    edges[indices] = halves
    edges[(indices - 1) % count] = halves
    after = float(edges.sum())
    if after > before + ShorteningConstants.LENGTH_ROUNDOFF:
        raise NonConvergenceError(
            f'Длина выросла за полушаг: {before:.12f} -> {after:.12f}',
            code='length_increase', before=before, after=after,
        )
    return loop.with_vertices(vertices, edges)


@dataclass
class ClosedGeodesic:
    loop: PolylineLoop
    length: float
    max_turning_angle: float
    sweeps: int = 0

    kind = 'closed_geodesic'


@dataclass
class Collapsed:
    final_diameter: float
    sweeps: int = 0
    loop: PolylineLoop = None

    kind = 'collapsed'


def model_closing(loop):
    """Замыкающий элемент петли в координатах модели Γ(2)"""
    return compose(compose(loop.frame.inverse(), loop.closing), loop.frame)


def peripheral_chart(loop):
    """(карта, касп, сдвиг) для петли с параболическим замыканием, иначе None"""
    closing = model_closing(loop)
    if classify(closing).kind != IsometryKind.PARABOLIC:
        return None
    return parabolic_frame(closing)


def push_into_cap(atlas, loop, tol, step=GeodesicConstants.DEFAULT_STEP):
    """
    Периферическая петля, опущенная вдоль ρ на одну окружность плоской зоны.

    Вершины сохраняют θ в карте своего каспа, уровень выбирается так, чтобы
    длина была не больше COLLAPSE_FACTOR·tol / 2. Возвращает (петля, длина)
    или None, если замыкание не параболическое или длина не убывает.
    """
    found = peripheral_chart(loop)
    if found is None:
        return None
    chart, cusp, _ = found
    working = loop.in_frame(chart, cusp)
    thetas = np.append(working.vertices.real,
                       working.closing.apply(working.vertices[0]).real) / 2.0
    variation = float(np.abs(np.diff(thetas)).sum())
    deepest = math.log(2.0 / float(working.vertices.imag.max()))
    level = min(deepest, atlas.profile.flat_level,
                math.log(ShorteningConstants.COLLAPSE_FACTOR * tol / (2.0 * variation)))
    edges = np.array([
        connect_in_chart(atlas.profile, (level, a), (level, b), step).length
        for a, b in zip(thetas[:-1], thetas[1:])
    ])
    length = float(edges.sum())
    if length > loop_length(atlas, loop, step) + ShorteningConstants.LENGTH_ROUNDOFF:
        return None
    pushed = working.with_vertices(working.vertices.real + 2j * math.exp(-level), edges)
    return pushed, length


def shorten(atlas, loop, tol, vertices=None, max_sweeps=ShorteningConstants.MAX_SWEEPS,
            step=GeodesicConstants.DEFAULT_STEP, angle_tol=ShorteningConstants.ANGLE_TOL):
    """
    Чередование полушагов до убывания длины за проход меньше tol.

    Петля уточняется удвоением до vertices вершин; сертификат углов
    проверяется на итоговом разрешении. Диаметр оценивается половиной длины.
    Петля с параболическим замыканием каждые PUSH_INTERVAL проходов
    опускается в шапочку своего каспа, если это не увеличивает длину.
    """
    if tol <= 0:
        raise DomainError('tol должен быть положительным', code='invalid_tol')
    target = vertices or len(loop)
    current = loop
    length = loop_length(atlas, current, step)
    sweeps = 0
    level_sweeps = 0
    max_turning = math.inf
    peripheral = peripheral_chart(loop) is not None
    while True:
        if peripheral and sweeps % ShorteningConstants.PUSH_INTERVAL == 0:
            pushed = push_into_cap(atlas, current, tol, step)
            if pushed is not None:
                current, length = pushed
                logger.info(f'Петля {loop.word} стянулась к вершине шапочки '
                            f'за {sweeps} проходов')
                return Collapsed(final_diameter=length / 2.0, sweeps=sweeps, loop=current)
        if sweeps >= max_sweeps:
            raise NonConvergenceError(
                f'Нет сходимости за {max_sweeps} проходов: длина {length:.10f}, '
                f'максимальный угол {max_turning:.3e}',
                sweeps=sweeps, length=length, vertices=len(current),
                max_turning_angle=max_turning,
            )
        current = birkhoff_step(atlas, current, 'even', step)
        current = birkhoff_step(atlas, current, 'odd', step)
        sweeps += 1
        level_sweeps += 1
        previous, length = length, loop_length(atlas, current, step)
        if length / 2.0 < ShorteningConstants.COLLAPSE_FACTOR * tol:
            logger.info(f'Петля {loop.word} стянулась за {sweeps} проходов')
            return Collapsed(final_diameter=length / 2.0, sweeps=sweeps, loop=current)
        if previous - length >= tol or level_sweeps < ShorteningConstants.REFINE_SWEEPS:
            continue
        if 2 * len(current) <= target:
            current = refine(atlas, current, step)
            level_sweeps = 0
            logger.debug(
                f'Петля {loop.word}: {len(current)} вершин после {sweeps} проходов, '
                f'длина {length:.10f}'
            )
            continue
        max_turning = float(turning_angles(atlas, current, step=step).max())
        if max_turning <= angle_tol:
            logger.debug(f'Петля {loop.word}: геодезическая длины {length:.10f}')
            return ClosedGeodesic(current, length, max_turning, sweeps)


# ============================================================================
# СЕРТИФИКАТЫ
# ============================================================================

def vertex_state(atlas, loop, index, geometry):
    """Состояние геодезической в вершине index вдоль исходящего ребра"""
    w = loop.vertices[index]
    point = locate_in_frame(atlas, w, loop.frame, loop.cusp)
    if isinstance(point, CorePoint):
        inverse = loop.frame.inverse()
        z = inverse.apply(w)
        reduced, matrix = reduce_to_domain(z)
        direction = cmath.exp(1j * geometry.start_phase[index]) \
            * inverse.derivative(w) * matrix.derivative(z)
        velocity = direction / abs(direction) * reduced.imag
        return GeodesicState(point, (velocity.real, velocity.imag))
    angle = geometry.start_angle[index]
    if isinstance(point, CuspPoint):
        value, _ = atlas.profile.evaluate_scalar(point.rho)
        return GeodesicState(point, (math.cos(angle) / value, math.sin(angle) / math.exp(point.rho)))
    heading = cmath.exp(1j * (math.atan2(point.v, point.u) + angle))
    return GeodesicState(point, (heading.real, heading.imag))


def verify_reintegration(atlas, loop, samples=8, step=GeodesicConstants.DEFAULT_STEP):
    """Наибольшее расхождение при повторном интегрировании ребер из samples вершин"""
    geometry = loop_edges(atlas, loop, step)
    points = loop.surface_points(atlas)
    count = len(loop)
    worst = 0.0
    for index in np.unique(np.linspace(0, count - 1, min(samples, count)).astype(int)):
        state = vertex_state(atlas, loop, index, geometry)
        segment = integrate(atlas, state, float(geometry.lengths[index]),
                            min(step, GeodesicConstants.MAX_STEP))
        target = points[(index + 1) % count]
        worst = max(worst, surface_gap(atlas, segment.end.point, target))
    return worst


def vertex_levels(atlas, loop):
    return horo_height(loop.lifts())


def thin_avoidance_check(atlas, loop, rho_star, step=GeodesicConstants.DEFAULT_STEP):
    """Истина, если ни вершина, ни точка ребра (с шагом step) не лежит в C_i^{<=ρ*}"""
    if np.any(vertex_levels(atlas, loop) <= rho_star):
        return False
    geometry = loop_edges(atlas, loop, step)
    chart_levels = geometry.chart_min_level[~geometry.exact]
    if chart_levels.size and chart_levels.min() <= rho_star:
        return False
    starts, ends = loop.vertices, loop.successors()
    sampled = []
    for index in np.flatnonzero(geometry.exact):
        count = max(2, int(math.ceil(geometry.lengths[index] / step)) + 1)
        sampled.append(geodesic_point(starts[index], ends[index], np.linspace(0.0, 1.0, count)))
    if not sampled:
        return True
    levels = horo_height(loop.frame.inverse().apply(np.concatenate(sampled)))
    return bool(levels.min() > rho_star)


def snap_to_axis(atlas, loop, step=GeodesicConstants.DEFAULT_STEP):
    """
    Вершины петли, спроецированные на ось гиперболического замыкания,
    в координатах модели. Исходная петля возвращается, если замыкание
    не гиперболическое или проекция заходит в тонкую часть.
    """
    closing = model_closing(loop)
    if not classify(closing).is_hyperbolic:
        return loop
    snapped = PolylineLoop(
        vertices=axis_projection(closing, loop.lifts()),
        closing=closing,
        word=loop.word,
    )
    if not thin_avoidance_check(atlas, snapped, atlas.rho_star, step):
        logger.warning(f'Проекция петли {loop.word} на ось заходит в тонкую часть')
        return loop
    return snapped


# ============================================================================
# ПОИСК СИСТОЛЫ
# ============================================================================

class RunOutcome:
    CLOSED_GEODESIC = ClosedGeodesic.kind
    COLLAPSED = Collapsed.kind
    NON_CONVERGENCE = 'non_convergence'
    SHOOTING_FAILED = 'shooting_failed'

    CHOICES = [CLOSED_GEODESIC, COLLAPSED, NON_CONVERGENCE, SHOOTING_FAILED]


@dataclass
class RunRecord:
    word: str
    seed: int
    outcome: str
    length: float = None
    intersections: int = None
    thin_avoidance: bool = None
    isometric_vertices: bool = None
    max_turning_angle: float = None
    reintegration_gap: float = None
    sweeps: int = 0
    message: str = ''
    loop: PolylineLoop = None


@dataclass
class SystoleReport:
    rho_star: float
    words: list
    records: list = field(default_factory=list)
    min_length: float = None
    witnesses: list = field(default_factory=list)
    simple_geodesics: list = field(default_factory=list)

    @property
    def is_empty(self):
        return self.min_length is None


def run_seed(atlas, word, seed, vertices, tol, step=GeodesicConstants.DEFAULT_STEP,
             master_seed=0, max_sweeps=ShorteningConstants.MAX_SWEEPS):
    """Один запуск укорачивания для пары (слово, сид)"""
    from .intersections import self_intersections

    if isinstance(word, str):
        word = HomotopyWord.parse(word)
    canonical = word.canonical()
    name = canonical.compact
    coarse = coarse_vertex_count(canonical, vertices)
    rng = np.random.default_rng([master_seed, seed]) if seed else None
    loop = seed_loop_from_word(atlas, canonical, coarse, rng)
    try:
        outcome = shorten(atlas, loop, tol, vertices=vertices, max_sweeps=max_sweeps, step=step)
    except NonConvergenceError as exc:
        logger.warning(f'Слово {name}, сид {seed}: {exc}')
        return RunRecord(name, seed, RunOutcome.NON_CONVERGENCE,
                         sweeps=exc.details.get('sweeps', 0), message=str(exc))
    except ShootingError as exc:
        logger.warning(f'Слово {name}, сид {seed}: {exc}')
        return RunRecord(name, seed, RunOutcome.SHOOTING_FAILED, message=str(exc))

    if isinstance(outcome, Collapsed):
        return RunRecord(name, seed, RunOutcome.COLLAPSED, length=2.0 * outcome.final_diameter,
                         sweeps=outcome.sweeps)

    result = outcome.loop
    message = ''
    try:
        intersections = self_intersections(atlas, result, seed=master_seed)
    except DegeneracyError as exc:
        intersections = None
        message = str(exc)
    record = RunRecord(
        word=name,
        seed=seed,
        outcome=RunOutcome.CLOSED_GEODESIC,
        length=outcome.length,
        intersections=intersections,
        thin_avoidance=thin_avoidance_check(atlas, result, atlas.rho_star, step),
        isometric_vertices=bool(np.all(vertex_levels(atlas, result) >= atlas.rho_star)),
        max_turning_angle=outcome.max_turning_angle,
        reintegration_gap=verify_reintegration(atlas, result, step=step),
        sweeps=outcome.sweeps,
        message=message,
        loop=result,
    )
    logger.info(f'Слово {name}, сид {seed}: длина {record.length:.10f}, '
                f'пересечений {record.intersections}')
    return record


def expand_jobs(words, seeds_per_word):
    """Пары (слово, сид) без повторов классов; периферическим словам - один сид"""
    jobs = []
    seen = set()
    for word in words:
        if isinstance(word, str):
            word = HomotopyWord.parse(word)
        canonical = word.canonical()
        if canonical.compact in seen:
            continue
        seen.add(canonical.compact)
        seeds = seeds_per_word if classify(word_to_matrix(canonical)).is_hyperbolic else 1
        jobs.extend((canonical.compact, seed) for seed in range(seeds))
    return jobs


def assemble_report(atlas, words, records):
    """Сводка по запускам в порядке (слово, сид)"""
    order = {}
    for word in words:
        name = word if isinstance(word, str) else word.canonical().compact
        order.setdefault(HomotopyWord.parse(name).canonical().compact, len(order))
    records = sorted(records, key=lambda record: (order.get(record.word, len(order)),
                                                  record.word, record.seed))
    closed = [record for record in records if record.outcome == RunOutcome.CLOSED_GEODESIC]
    report = SystoleReport(rho_star=atlas.rho_star, words=list(order), records=records)
    if not closed:
        logger.warning('Замкнутые геодезические не найдены')
        return report
    report.min_length = min(record.length for record in closed)
    bound = report.min_length * (1.0 + ShorteningConstants.WITNESS_REL_TOL)
    best = {}
    for record in closed:
        if record.length <= bound and (record.word not in best
                                       or record.length < best[record.word].length):
            best[record.word] = record
    report.witnesses = [best[word] for word in order if word in best]
    report.simple_geodesics = [record for record in closed if record.intersections == 0]
    return report


def systole_search(atlas, words, seeds_per_word, tol, vertices=256,
                   step=GeodesicConstants.DEFAULT_STEP, master_seed=0,
                   max_sweeps=ShorteningConstants.MAX_SWEEPS, executor=None):
    """
    Поиск кратчайшей замкнутой геодезической по словам и сидам.

    executor(jobs) возвращает список RunRecord; по умолчанию запуски идут
    последовательно в текущем процессе.
    """
    if not words:
        return SystoleReport(rho_star=atlas.rho_star, words=[])
    jobs = expand_jobs(words, seeds_per_word)
    if executor is None:
        records = [
            run_seed(atlas, word, seed, vertices, tol, step, master_seed, max_sweeps)
            for word, seed in jobs
        ]
    else:
        records = executor(jobs)
    return assemble_report(atlas, words, records)
