"""
Атлас сферы с тремя шапочками.

Ядро - модель Γ(2) в верхней полуплоскости, три карты каспов (ρ, θ)
с периодом θ, равным 1, и плоские карты вершин шапочек.
Касп 1 находится в ∞, касп 2 в 0, касп 3 в 1.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .cap_profile import CapProfile
from .constants import AtlasConstants, GroupConstants, ProfileConstants
from .exceptions import ChartDomainError, DomainError
from .hyperbolic_group import (
    IsometryPSL2,
    compose,
    fixed_points,
    peripheral_generators,
    reduce_many,
)

logger = logging.getLogger('starfish')

CUSP_INDICES = (1, 2, 3)

# Отображения, переводящие касп i в ∞ так, что его стабилизатор - сдвиги на 2
CUSP_CHARTS = {
    1: IsometryPSL2(1.0, 0.0, 0.0, 1.0),
    2: IsometryPSL2(0.0, -1.0, 1.0, 0.0),
    3: IsometryPSL2(0.0, -1.0, 1.0, -1.0),
}

CUSP_POINTS = {1: math.inf, 2: 0.0, 3: 1.0}


# ============================================================================
# ТОЧКИ И ТЕНЗОРЫ
# ============================================================================

@dataclass(frozen=True)
class CorePoint:
    """Точка ядра: z в фундаментальной области"""

    z: complex
    chart = 'core'


@dataclass(frozen=True)
class CuspPoint:
    """Горициклические координаты каспа: ρ <= log 2, θ в [0, 1)"""

    cusp: int
    rho: float
    theta: float
    chart = 'cusp'


@dataclass(frozen=True)
class TipPoint:
    """Развернутые плоские координаты у вершины: u + iv = e^ρ·e^{iθ}"""

    cusp: int
    u: float
    v: float
    chart = 'tip'

    @property
    def radius(self):
        return math.hypot(self.u, self.v)


@dataclass(frozen=True)
class MetricTensor:
    g11: float
    g12: float
    g22: float

    @property
    def det(self):
        return self.g11 * self.g22 - self.g12 ** 2

    def as_array(self):
        return np.array([[self.g11, self.g12], [self.g12, self.g22]])

    def norm(self, vector):
        du, dv = vector
        return math.sqrt(self.g11 * du * du + 2.0 * self.g12 * du * dv + self.g22 * dv * dv)


@dataclass(frozen=True)
class Atlas:
    profile: CapProfile
    model: str = 'gamma2-upper-half-plane'
    generators: tuple = field(default_factory=lambda: tuple(
        m.to_list() for m in peripheral_generators()
    ))

    @property
    def rho_star(self):
        return self.profile.rho_star

    @property
    def charts(self):
        return {index: CUSP_CHARTS[index] for index in CUSP_INDICES}

    def to_dict(self):
        return {
            'profile': self.profile.to_dict(),
            'model': self.model,
            'cusps': [
                {'index': index, 'point': 'inf' if math.isinf(CUSP_POINTS[index])
                 else CUSP_POINTS[index], 'width': GroupConstants.CUSP_WIDTH}
                for index in CUSP_INDICES
            ],
            'generators': [list(map(list, matrix)) for matrix in self.generators],
        }


def assemble(profile):
    """Атлас: профиль, данные Γ(2) и три карты каспов ширины 2"""
    atlas = Atlas(profile=profile)
    logger.debug(f'Атлас собран для rho_star = {profile.rho_star}')
    return atlas


# ============================================================================
# КООРДИНАТЫ КАСПОВ
# ============================================================================

def chart_coordinates(w):
    """(ρ, θ) точки w в карте на ∞: ρ = log(2/Im w), θ = Re w / 2 (без взятия по модулю)"""
    w = np.asarray(w, dtype=complex)
    return np.log(2.0 / w.imag), w.real / 2.0


def chart_point(rho, theta):
    """Обратное к chart_coordinates: w = 2θ + 2i·e^{-ρ}"""
    return 2.0 * np.asarray(theta, dtype=float) + 2j * np.exp(-np.asarray(rho, dtype=float))


def developed(rho, theta):
    """Развернутые плоские координаты e^ρ·e^{iθ}"""
    return np.exp(np.asarray(rho, dtype=float) + 1j * np.asarray(theta, dtype=float))


def horo_levels(z):
    """
    Кандидаты уровня ρ для точки фундаментальной области:
    касп ∞, касп 0, касп 1 (справа) и касп 1 через сдвиг c1 (слева).
    """
    z = np.asarray(z, dtype=complex)
    y = z.imag
    return np.stack([
        np.log(2.0 / y),
        np.log(2.0 * np.abs(z) ** 2 / y),
        np.log(2.0 * np.abs(z - 1.0) ** 2 / y),
        np.log(2.0 * np.abs(z + 1.0) ** 2 / y),
    ], axis=-1)


_LEVEL_CUSPS = np.array([1, 2, 3, 3])


def _level_charts():
    c1 = peripheral_generators()[0]
    return np.stack([
        CUSP_CHARTS[1].as_array(),
        CUSP_CHARTS[2].as_array(),
        CUSP_CHARTS[3].as_array(),
        compose(CUSP_CHARTS[3], c1).as_array(),
    ])


LEVEL_CHARTS = _level_charts()


def cusp_frames(points):
    """
    Для массива точек H: уровень ρ ближайшего каспа, номер каспа
    и матрица карты C (N, 2, 2), так что C·z лежит в карте каспа.

    Уровень больше log 2 означает, что точка в ядре вне всех каспов.
    """
    reduced, mats = reduce_many(points)
    levels = horo_levels(reduced)
    choice = np.argmin(levels, axis=-1)
    rho = levels[np.arange(levels.shape[0]), choice]
    frames = np.einsum('nij,njk->nik', LEVEL_CHARTS[choice], mats)
    return rho, _LEVEL_CUSPS[choice], frames


def horo_height(points):
    """Уровень ρ (Γ(2)-инвариантный) для массива точек H"""
    rho, _, _ = cusp_frames(points)
    return rho


def apply_frames(frames, z):
    z = np.asarray(z, dtype=complex)
    return (frames[..., 0, 0] * z + frames[..., 0, 1]) / (frames[..., 1, 0] * z + frames[..., 1, 1])


def to_cusp_chart(atlas, z, cusp):
    """Горициклические координаты (ρ, θ) точки z относительно каспа cusp"""
    if cusp not in CUSP_INDICES:
        raise DomainError(f'Нет каспа с номером {cusp}', code='invalid_cusp')
    reduced, _ = reduce_many([complex(z)])
    levels = horo_levels(reduced)[0]
    if cusp == 3:
        column = 2 if levels[2] <= levels[3] else 3
    else:
        column = cusp - 1
    rho = float(levels[column])
    if rho > ProfileConstants.LOG2 + 1e-12:
        raise ChartDomainError(
            f'Точка {z} вне орошара каспа {cusp} (rho = {rho:.6f} > log 2)', cusp=cusp
        )
    w = complex(apply_frames(LEVEL_CHARTS[column], reduced[0]))
    return rho, (w.real / 2.0) % 1.0


def from_cusp_chart(atlas, cusp, rho, theta):
    """Точка ядра (приведенная), соответствующая координатам (ρ, θ) каспа"""
    if rho > ProfileConstants.LOG2 + 1e-12:
        raise ChartDomainError(f'rho = {rho} > log 2', cusp=cusp)
    w = complex(chart_point(rho, theta))
    z = CUSP_CHARTS[cusp].inverse().apply(w)
    reduced, _ = reduce_many([z])
    return complex(reduced[0])


# ============================================================================
# ТОЧКИ ПОВЕРХНОСТИ
# ============================================================================

def point_from_chart(atlas, cusp, rho, theta, z=None):
    """Выбор карты по уровню: ядро при ρ >= ρ*, касп в полосе, вершина в плоской зоне"""
    rho = float(rho)
    if rho >= atlas.rho_star:
        if z is None:
            z = from_cusp_chart(atlas, cusp, min(rho, ProfileConstants.LOG2), theta)
        return CorePoint(complex(z))
    if rho >= atlas.profile.flat_level:
        return CuspPoint(int(cusp), rho, float(theta) % 1.0)
    tip = complex(developed(rho, float(theta) % 1.0))
    return TipPoint(int(cusp), tip.real, tip.imag)


def locate(atlas, z):
    """Точка поверхности для точки z верхней полуплоскости (любого подъема)"""
    rho, cusps, frames = cusp_frames([complex(z)])
    reduced, _ = reduce_many([complex(z)])
    rho = float(rho[0])
    if rho >= atlas.rho_star:
        return CorePoint(complex(reduced[0]))
    w = complex(apply_frames(frames[0], complex(z)))
    return point_from_chart(atlas, int(cusps[0]), rho, w.real / 2.0)


def locate_in_frame(atlas, w, frame, cusp):
    """
    Точка поверхности для координаты w в системе frame (w = frame·z),
    где frame - карта каспа cusp. Глубокие точки читаются прямо из карты.
    """
    w = complex(w)
    if w.imag >= 1.0:
        rho = math.log(2.0 / w.imag)
        if rho < atlas.rho_star:
            return point_from_chart(atlas, cusp, rho, w.real / 2.0)
    return locate(atlas, frame.inverse().apply(w))


def surface_level(atlas, point):
    """Уровень ρ точки поверхности (для ядра - уровень ближайшего каспа)"""
    if isinstance(point, CuspPoint):
        return point.rho
    if isinstance(point, TipPoint):
        radius = point.radius
        return math.log(radius) if radius > 0 else -math.inf
    if isinstance(point, CorePoint):
        return float(horo_height([point.z])[0])
    raise DomainError(f'Неизвестный тип точки {point!r}', code='invalid_point')


def validate_point(atlas, point):
    if isinstance(point, CorePoint):
        if point.z.imag <= 0:
            raise DomainError('Точка ядра вне верхней полуплоскости', code='invalid_point')
        if surface_level(atlas, point) < atlas.rho_star - 1e-9:
            raise DomainError(
                'Точка ядра лежит ниже rho*: используйте карту каспа', code='invalid_point'
            )
    elif isinstance(point, CuspPoint):
        if point.cusp not in CUSP_INDICES or point.rho > ProfileConstants.LOG2 + 1e-12:
            raise DomainError(f'Недопустимая точка каспа {point}', code='invalid_point')
    elif isinstance(point, TipPoint):
        if point.cusp not in CUSP_INDICES:
            raise DomainError(f'Недопустимая точка вершины {point}', code='invalid_point')
        if point.radius >= math.exp(atlas.profile.flat_level):
            raise DomainError(
                'Координаты вершины допустимы только в плоской зоне', code='invalid_point'
            )
    else:
        raise DomainError(f'Неизвестный тип точки {point!r}', code='invalid_point')


def metric_at(atlas, point):
    """Метрический тензор в базисе активной карты"""
    validate_point(atlas, point)
    if isinstance(point, CorePoint):
        factor = 1.0 / point.z.imag ** 2
        return MetricTensor(factor, 0.0, factor)
    if isinstance(point, CuspPoint):
        value, _ = atlas.profile.evaluate(point.rho)
        return MetricTensor(value ** 2, 0.0, math.exp(2.0 * point.rho))
    return MetricTensor(1.0, 0.0, 1.0)


def in_isometric_region(atlas, point):
    """Истина на ядре и в каспах при ρ >= ρ* (там h* = h)"""
    if isinstance(point, CorePoint):
        return True
    if isinstance(point, CuspPoint):
        return point.rho >= atlas.rho_star
    return False


def in_thin_part(atlas, point, sigma):
    """Лежит ли точка в тонкой части C_i^{<=σ}"""
    if sigma > ProfileConstants.LOG2:
        raise DomainError('sigma должна быть не больше log 2', code='invalid_sigma')
    return surface_level(atlas, point) <= sigma


def to_lift(atlas, point):
    """Приведенный подъем точки поверхности в H (для вершины конуса подъема нет)"""
    if isinstance(point, CorePoint):
        return point.z
    if isinstance(point, CuspPoint):
        return from_cusp_chart(atlas, point.cusp, point.rho, point.theta)
    radius = point.radius
    if radius == 0:
        raise DomainError('Вершина шапочки не имеет подъема в H', code='cone_point')
    return from_cusp_chart(
        atlas, point.cusp, math.log(radius), math.atan2(point.v, point.u) % 1.0
    )


# ============================================================================
# ПАРАБОЛИЧЕСКИЕ СИСТЕМЫ КООРДИНАТ
# ============================================================================

def parabolic_frame(element):
    """
    Карта C (C·z - координата каспа) для параболического элемента Γ(2):
    неподвижная точка переходит в ∞, элемент - в сдвиг на ±2.

    Возвращает (C, номер каспа, сдвиг).
    """
    points = fixed_points(element)
    if len(points) != 1:
        raise DomainError('Элемент не параболический', code='not_parabolic')
    anchor = points[0]
    depth = 1e-3
    for _ in range(40):
        probe = 1j / depth if math.isinf(anchor) else anchor + 1j * depth
        rho, cusps, frames = cusp_frames([probe])
        if rho[0] <= ProfileConstants.LOG2 - 1.0:
            frame = IsometryPSL2.from_array(frames[0])
            conjugate = compose(compose(frame, element), frame.inverse())
            if conjugate.d < 0:
                conjugate = IsometryPSL2(-conjugate.a, -conjugate.b, -conjugate.c, -conjugate.d)
            if abs(conjugate.c) > 1e-6 * max(1.0, abs(conjugate.b)):
                raise DomainError('Не удалось сопрячь элемент со сдвигом', code='not_parabolic')
            return frame, int(cusps[0]), conjugate.b / conjugate.d
        depth /= 10.0
    raise DomainError('Неподвижная точка не является каспом Γ(2)', code='not_a_cusp')
