"""
Геодезический поток на сфере с шапочками.

В ядре геодезические точные (дуги окружностей, ортогональных границе),
в картах каспов - RK4 с фиксированным шагом, у вершины - прямые.
Переход между картами происходит в перекрытиях с гистерезисом.
"""
import cmath
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .atlas import (
    CUSP_CHARTS,
    CorePoint,
    CuspPoint,
    TipPoint,
    chart_point,
    cusp_frames,
    developed,
    horo_height,
    to_cusp_chart,
    to_lift,
)
from .constants import AtlasConstants, GeodesicConstants, ProfileConstants
from .exceptions import DomainError, ShootingError
from .hyperbolic_group import (
    IsometryPSL2,
    geodesic_direction,
    geodesic_point,
    geodesic_travel,
    hyperbolic_distance,
    reduce_many,
    short_group_elements,
)

logger = logging.getLogger('starfish')


@dataclass(frozen=True)
class GeodesicState:
    """Точка и скорость в базисе активной карты"""

    point: object
    velocity: tuple

    def reversed(self):
        return GeodesicState(self.point, (-self.velocity[0], -self.velocity[1]))


@dataclass
class GeodesicSegment:
    start: GeodesicState
    length: float
    trace: list = field(default_factory=list)
    end: GeodesicState = None


def speed_squared(atlas, state):
    """g(v, v) в активной карте"""
    point = state.point
    du, dv = state.velocity
    if isinstance(point, CorePoint):
        return (du * du + dv * dv) / point.z.imag ** 2
    if isinstance(point, CuspPoint):
        value, _ = atlas.profile.evaluate_scalar(point.rho)
        return value * value * du * du + math.exp(2.0 * point.rho) * dv * dv
    return du * du + dv * dv


# ============================================================================
# УРАВНЕНИЕ ГЕОДЕЗИЧЕСКИХ
# ============================================================================

def _cusp_rhs(profile, y):
    rho, theta, drho, dtheta = y
    value, slope = profile.evaluate_scalar(rho)
    return (
        drho,
        dtheta,
        -(slope / value) * drho * drho + (math.exp(2.0 * rho) / (value * value)) * dtheta * dtheta,
        -2.0 * drho * dtheta,
    )


def _rk4_step(profile, y, h):
    k1 = _cusp_rhs(profile, y)
    k2 = _cusp_rhs(profile, tuple(a + 0.5 * h * b for a, b in zip(y, k1)))
    k3 = _cusp_rhs(profile, tuple(a + 0.5 * h * b for a, b in zip(y, k2)))
    k4 = _cusp_rhs(profile, tuple(a + h * b for a, b in zip(y, k3)))
    return tuple(
        a + h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
        for a, b1, b2, b3, b4 in zip(y, k1, k2, k3, k4)
    )


def geodesic_ode_rhs(atlas, state):
    """
    Ускорения в карте каспа:
    ρ'' = -(f'/f)ρ'^2 + (e^{2ρ}/f^2)θ'^2, θ'' = -2ρ'θ'; в карте вершины - ноль.
    """
    point = state.point
    if isinstance(point, TipPoint):
        return 0.0, 0.0
    if isinstance(point, CuspPoint):
        rhs = _cusp_rhs(atlas.profile, (point.rho, point.theta) + tuple(state.velocity))
        return rhs[2], rhs[3]
    raise DomainError('В ядре используются точные геодезические', code='core_state')


def clairaut(atlas, state):
    """Первый интеграл e^{2ρ}·θ' вращательно-симметричной карты"""
    if not isinstance(state.point, CuspPoint):
        raise DomainError('Инвариант Клеро определен только в карте каспа', code='not_cusp_chart')
    return math.exp(2.0 * state.point.rho) * state.velocity[1]


def rk4_path(profile, y0, length, steps):
    """Траектория RK4 в карте каспа: массив (steps + 1, 4) состояний (ρ, θ, ρ', θ')"""
    h = length / steps
    path = [tuple(y0)]
    y = tuple(y0)
    for _ in range(steps):
        y = _rk4_step(profile, y, h)
        path.append(y)
    return np.array(path)


# ============================================================================
# ИНТЕГРИРОВАНИЕ С ПЕРЕХОДАМИ МЕЖДУ КАРТАМИ
# ============================================================================

class _Flow:
    """Внутреннее состояние интегратора с картой и вспомогательными данными"""

    def __init__(self, chart, cusp=None, frame=None, z=None, velocity=None, y=None,
                 position=None, theta0=0.0):
        self.chart = chart
        self.cusp = cusp
        self.frame = frame
        self.z = z
        self.velocity = velocity
        self.y = y
        self.position = position
        self.theta0 = theta0


def _flow_from_state(atlas, state):
    point = state.point
    du, dv = state.velocity
    if isinstance(point, CorePoint):
        return _Flow('core', z=complex(point.z), velocity=complex(du, dv))
    if isinstance(point, CuspPoint):
        return _Flow('cusp', cusp=point.cusp, frame=CUSP_CHARTS[point.cusp],
                     y=(point.rho, point.theta, du, dv))
    if isinstance(point, TipPoint):
        theta0 = math.atan2(point.v, point.u)
        turn = complex(math.cos(theta0), -math.sin(theta0))
        return _Flow('tip', cusp=point.cusp, frame=CUSP_CHARTS[point.cusp],
                     position=complex(point.radius, 0.0), velocity=complex(du, dv) * turn,
                     theta0=theta0)
    raise DomainError(f'Неизвестный тип точки {point!r}', code='invalid_point')


def _state_from_flow(flow):
    if flow.chart == 'core':
        return GeodesicState(CorePoint(flow.z), (flow.velocity.real, flow.velocity.imag))
    if flow.chart == 'cusp':
        rho, theta, drho, dtheta = flow.y
        return GeodesicState(CuspPoint(flow.cusp, rho, theta % 1.0), (drho, dtheta))
    # Развертка отсчитывается от луча θ0; в точке вершины угол берется по модулю 1
    offset = flow.theta0 % 1.0
    rotation = complex(math.cos(offset), math.sin(offset))
    position = flow.position * rotation
    velocity = flow.velocity * rotation
    return GeodesicState(TipPoint(flow.cusp, position.real, position.imag),
                         (velocity.real, velocity.imag))


def _normalize_core(flow):
    speed = abs(flow.velocity) / flow.z.imag
    flow.velocity = flow.velocity / speed
    return speed


def _core_to_cusp(flow, cusp, frame):
    matrix = IsometryPSL2.from_array(frame)
    w = matrix.apply(flow.z)
    dw = matrix.derivative(flow.z) * flow.velocity
    rho, theta = math.log(2.0 / w.imag), w.real / 2.0
    return _Flow('cusp', cusp=cusp, frame=matrix,
                 y=(rho, theta, -dw.imag / w.imag, dw.real / 2.0))


def _cusp_to_core(atlas, flow):
    rho, theta, drho, dtheta = flow.y
    w = complex(chart_point(rho, theta))
    dw = complex(2.0 * dtheta, -2.0 * math.exp(-rho) * drho)
    inverse = flow.frame.inverse()
    z = inverse.apply(w)
    velocity = inverse.derivative(w) * dw
    reduced, mats = reduce_many([z])
    reduction = IsometryPSL2.from_array(mats[0])
    core = _Flow('core', z=complex(reduced[0]), velocity=reduction.derivative(z) * velocity)
    drift = _normalize_core(core) - 1.0
    logger.debug(f'Переход Cusp -> Core, отклонение скорости {drift:.3e}')
    return core


def _cusp_to_tip(flow):
    rho, theta, drho, dtheta = flow.y
    position = complex(math.exp(rho), 0.0)
    velocity = position * complex(drho, dtheta)
    tip = _Flow('tip', cusp=flow.cusp, frame=flow.frame, position=position,
                velocity=velocity / abs(velocity), theta0=theta)
    logger.debug(f'Переход Cusp -> Tip у каспа {flow.cusp}')
    return tip


def _tip_to_cusp(profile, flow):
    position, velocity = flow.position, flow.velocity
    logarithmic = velocity / position
    rho = math.log(abs(position))
    theta = flow.theta0 + math.atan2(position.imag, position.real)
    drho, dtheta = logarithmic.real, logarithmic.imag
    value, _ = profile.evaluate_scalar(rho)
    speed = math.sqrt(value * value * drho * drho + math.exp(2.0 * rho) * dtheta * dtheta)
    return _Flow('cusp', cusp=flow.cusp, frame=flow.frame,
                 y=(rho, theta, drho / speed, dtheta / speed))


def integrate(atlas, state, length, step=GeodesicConstants.DEFAULT_STEP, handoff=True):
    """
    Интегрирование геодезической длины length с шагом step.

    handoff=False оставляет траекторию в исходной карте каспа
    (карта продолжается за log 2 гиперболической метрикой).
    """
    if length < 0:
        raise DomainError('Длина должна быть неотрицательной', code='negative_length')
    if not 0 < step <= GeodesicConstants.MAX_STEP:
        raise DomainError(
            f'Шаг {step} вне диапазона (0, {GeodesicConstants.MAX_STEP}]', code='invalid_step'
        )
    profile = atlas.profile
    flat_level = profile.flat_level
    flow = _flow_from_state(atlas, state)
    if flow.chart == 'core':
        _normalize_core(flow)
    trace = [state.point]
    travelled = 0.0
    while travelled < length - 1e-15:
        h = min(step, length - travelled)
        if flow.chart == 'core':
            direction = flow.velocity / abs(flow.velocity)
            z, new_direction = geodesic_travel(flow.z, direction, h)
            z, new_direction = complex(z), complex(new_direction)
            rho, cusps, frames = cusp_frames([z])
            flow.z = z
            flow.velocity = new_direction * z.imag
            if handoff and rho[0] <= AtlasConstants.CORE_TO_CUSP:
                flow = _core_to_cusp(flow, int(cusps[0]), frames[0])
                logger.debug(f'Переход Core -> Cusp {flow.cusp} при rho = {rho[0]:.4f}')
            else:
                reduced, mats = reduce_many([z])
                matrix = IsometryPSL2.from_array(mats[0])
                flow.velocity = matrix.derivative(z) * flow.velocity
                flow.z = complex(reduced[0])
        elif flow.chart == 'cusp':
            flow.y = _rk4_step(profile, flow.y, h)
            rho = flow.y[0]
            if handoff and rho >= AtlasConstants.CUSP_TO_CORE:
                flow = _cusp_to_core(atlas, flow)
            elif handoff and rho <= flat_level - AtlasConstants.TIP_ENTER_MARGIN:
                flow = _cusp_to_tip(flow)
        else:
            flow.position = flow.position + h * flow.velocity
            if abs(flow.position) >= math.exp(flat_level - AtlasConstants.TIP_EXIT_MARGIN):
                flow = _tip_to_cusp(profile, flow)
        travelled += h
        trace.append(_state_from_flow(flow).point)
    end = _state_from_flow(flow)
    drift = math.sqrt(speed_squared(atlas, end)) - 1.0
    if abs(drift) > 1e-7:
        logger.warning(f'Отклонение скорости {drift:.3e} на длине {length}')
    else:
        logger.debug(f'Отклонение скорости {drift:.3e} на длине {length}')
    end = _renormalized(atlas, end)
    return GeodesicSegment(start=state, length=length, trace=trace, end=end)


def _renormalized(atlas, state):
    speed = math.sqrt(speed_squared(atlas, state))
    if speed == 0:
        return state
    return GeodesicState(state.point, (state.velocity[0] / speed, state.velocity[1] / speed))


# ============================================================================
# СТРЕЛЬБА В КАРТЕ КАСПА
# ============================================================================

@dataclass
class ChartGeodesic:
    """Кратчайшая в карте каспа: длина, середина, начальный и конечный углы"""

    length: float
    midpoint: tuple
    phi_start: float
    phi_end: float
    samples: np.ndarray


def _orthonormal_angle(profile, rho, drho, dtheta):
    value, _ = profile.evaluate_scalar(rho)
    return math.atan2(math.exp(rho) * dtheta, value * drho)


def _flat_connection(start, end, step):
    rho_a, theta_a = start
    rho_b, theta_b = end
    spread = theta_b - theta_a
    p_a = complex(math.exp(rho_a), 0.0)
    p_b = complex(developed(rho_b, spread))
    if abs(spread) >= math.pi:
        # θ поднят без взятия по модулю: при |Δθ| >= π прямой в развертке нет,
        # кратчайшая в классе подъема проходит через вершину конуса
        length = abs(p_a) + abs(p_b)
        far_theta = theta_a if abs(p_a) >= abs(p_b) else theta_b
        radius = max(abs(abs(p_a) - abs(p_b)) / 2.0, 1e-300)
        samples = np.array([[rho_a, theta_a], [rho_b, theta_b]])
        return ChartGeodesic(length, (math.log(radius), far_theta), math.pi, 0.0, samples)
    chord = p_b - p_a
    length = abs(chord)
    count = max(2, int(math.ceil(length / step)) + 1)
    points = p_a + chord * np.linspace(0.0, 1.0, count)
    middle = (p_a + p_b) / 2.0
    midpoint = (math.log(abs(middle)), theta_a + cmath.phase(middle))
    samples = np.column_stack([np.log(np.abs(points)), theta_a + np.angle(points)])
    if length == 0:
        return ChartGeodesic(0.0, midpoint, 0.0, 0.0, samples)
    return ChartGeodesic(length, midpoint, cmath.phase(chord), cmath.phase(chord / p_b), samples)


def connect_in_chart(profile, start, end, step=GeodesicConstants.DEFAULT_STEP,
                     tol=GeodesicConstants.SHOOTING_TOL):
    """
    Кратчайшая между (ρ, θ)-точками одной карты каспа (θ без взятия по модулю).

    Плоская зона - точные прямые в развертке, иначе стрельба RK4
    по двум неизвестным (угол, длина).
    """
    rho_a, theta_a = start
    rho_b, theta_b = end
    if rho_a == rho_b and theta_a == theta_b:
        return ChartGeodesic(0.0, (rho_a, theta_a), 0.0, 0.0, np.array([[rho_a, theta_a]]))
    if max(rho_a, rho_b) <= profile.flat_level:
        return _flat_connection(start, end, step)

    rho_mid = 0.5 * (rho_a + rho_b)
    value_mid, _ = profile.evaluate_scalar(rho_mid)
    metric_rho = value_mid * (rho_b - rho_a)
    metric_theta = math.exp(rho_mid) * (theta_b - theta_a)
    guess_length = math.hypot(metric_rho, metric_theta)
    guess_angle = math.atan2(metric_theta, metric_rho)
    steps = max(GeodesicConstants.MIN_RK4_STEPS, int(math.ceil(guess_length / step)))
    steps += steps % 2
    scale_rho, _ = profile.evaluate_scalar(rho_b)
    scale_theta = math.exp(rho_b)

    def launch(angle):
        value, _ = profile.evaluate_scalar(rho_a)
        return (rho_a, theta_a, math.cos(angle) / value, math.sin(angle) / math.exp(rho_a))

    def residual(unknowns):
        angle, length = unknowns
        final = rk4_path(profile, launch(angle), length, steps)[-1]
        return [scale_rho * (final[0] - rho_b), scale_theta * (final[1] - theta_b)]

    solution = optimize.root(
        residual, [guess_angle, guess_length], method='hybr',
        options={'maxfev': 4 * GeodesicConstants.SHOOTING_MAX_ITER, 'xtol': 1e-13},
    )
    best = float(np.hypot(*residual(solution.x)))
    angle, length = map(float, solution.x)
    if best > max(tol, 1e-12 * guess_length) or length < 0:
        raise ShootingError(
            f'Стрельба не сошлась: невязка {best:.3e}', residual=best,
            start=start, end=end,
        )
    path = rk4_path(profile, launch(angle), length, steps)
    middle = path[steps // 2]
    final = path[-1]
    return ChartGeodesic(
        length=length,
        midpoint=(float(middle[0]), float(middle[1])),
        phi_start=angle,
        phi_end=_orthonormal_angle(profile, final[0], final[2], final[3]),
        samples=path[:, :2],
    )


# ============================================================================
# ДВУХТОЧЕЧНАЯ ЗАДАЧА НА ПОВЕРХНОСТИ
# ============================================================================

def _chart_coordinates_of(atlas, point):
    """(касп, ρ, θ) для точки, лежащей в некотором каспе, иначе None"""
    if isinstance(point, CuspPoint):
        return point.cusp, point.rho, point.theta
    if isinstance(point, TipPoint):
        radius = point.radius
        if radius == 0:
            return point.cusp, -math.inf, 0.0
        return point.cusp, math.log(radius), math.atan2(point.v, point.u)
    level = float(horo_height([point.z])[0])
    if level > ProfileConstants.LOG2:
        return None
    _, cusps, _ = cusp_frames([point.z])
    cusp = int(cusps[0])
    rho, theta = to_cusp_chart(atlas, point.z, cusp)
    return cusp, rho, theta


def nearest_image(z, w):
    """Ближайший к z образ g·w по коротким элементам Γ(2) и расстояние до него"""
    images = np.array([element.apply(w) for element in short_group_elements(3)])
    distances = hyperbolic_distance(z, images)
    best = int(np.argmin(distances))
    return complex(images[best]), float(distances[best])


def surface_gap(atlas, p, q):
    """Оценка сверху расстояния между точками поверхности по их подъемам в H"""
    if p == q:
        return 0.0
    _, distance = nearest_image(to_lift(atlas, p), to_lift(atlas, q))
    return distance


def _core_segment(atlas, p, q, step):
    z_p = to_lift(atlas, p)
    z_q, length = nearest_image(z_p, to_lift(atlas, q))
    count = max(2, int(math.ceil(length / step)) + 1)
    samples = geodesic_point(z_p, z_q, np.linspace(0.0, 1.0, count))
    levels = horo_height(samples)
    return z_p, z_q, length, samples, levels


def shoot_between(atlas, p, q, tol=1e-9, step=GeodesicConstants.DEFAULT_STEP):
    """Короткая геодезическая из p в q (локально минимизирующий режим, d <= 0.5)"""
    if p == q:
        return GeodesicSegment(start=GeodesicState(p, (0.0, 0.0)), length=0.0, trace=[p],
                               end=GeodesicState(q, (0.0, 0.0)))
    first = _chart_coordinates_of(atlas, p) if not isinstance(p, CorePoint) else None
    second = _chart_coordinates_of(atlas, q) if not isinstance(q, CorePoint) else None

    if first is None and second is None:
        z_p, z_q, length, samples, levels = _core_segment(atlas, p, q, step)
        if length > GeodesicConstants.SHOOTING_RANGE:
            raise ShootingError(
                f'Точки вне дальности стрельбы: d = {length:.4f}', residual=length
            )
        if levels.min() >= atlas.rho_star:
            direction = complex(geodesic_direction(z_p, z_q)) * z_p.imag
            end_direction = -complex(geodesic_direction(z_q, z_p)) * z_q.imag
            reduced, mats = reduce_many(samples)
            end_direction *= IsometryPSL2.from_array(mats[-1]).derivative(z_q)
            return GeodesicSegment(
                start=GeodesicState(p, (direction.real, direction.imag)),
                length=length,
                trace=[CorePoint(complex(z)) for z in reduced],
                end=GeodesicState(CorePoint(complex(reduced[-1])),
                                  (end_direction.real, end_direction.imag)),
            )

    first = first or _chart_coordinates_of(atlas, p)
    second = second or _chart_coordinates_of(atlas, q)
    if first is None or second is None or first[0] != second[0]:
        raise ShootingError('Точки не лежат в общей карте', residual=math.inf)
    cusp, rho_a, theta_a = first
    _, rho_b, theta_b = second
    theta_b = theta_a + ((theta_b - theta_a + 0.5) % 1.0) - 0.5
    connection = connect_in_chart(atlas.profile, (rho_a, theta_a), (rho_b, theta_b), step, tol)
    if connection.length > GeodesicConstants.SHOOTING_RANGE:
        raise ShootingError(
            f'Точки вне дальности стрельбы: d = {connection.length:.4f}',
            residual=connection.length,
        )
    value_a, _ = atlas.profile.evaluate_scalar(rho_a)
    start = GeodesicState(
        CuspPoint(cusp, rho_a, theta_a % 1.0),
        (math.cos(connection.phi_start) / value_a,
         math.sin(connection.phi_start) / math.exp(rho_a)),
    )
    trace = [CuspPoint(cusp, float(rho), float(theta) % 1.0) for rho, theta in connection.samples]
    return GeodesicSegment(start=start, length=connection.length, trace=trace)
