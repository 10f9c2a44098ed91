import math

import numpy as np
from django.test import TestCase

from starfish.atlas import CorePoint, CuspPoint, TipPoint, assemble, chart_point
from starfish.cap_profile import build_profile
from starfish.exceptions import DomainError, ShootingError
from starfish.geodesics import (
    GeodesicState,
    clairaut,
    connect_in_chart,
    geodesic_ode_rhs,
    integrate,
    rk4_path,
    shoot_between,
)
from starfish.hyperbolic_group import hyperbolic_distance, reduce_many


def unit_launch(profile, rho, angle):
    value, _ = profile.evaluate_scalar(rho)
    return (rho, 0.0, math.cos(angle) / value, math.sin(angle) / math.exp(rho))


class GeodesicEquationTestCase(TestCase):
    """Тесты уравнения геодезических и схемы RK4"""

    def setUp(self):
        self.profile = build_profile(-4.0)
        self.atlas = assemble(self.profile)

    def test_speed_and_clairaut_in_band(self):
        """Тест сохранения скорости и инварианта Клеро в полосе перехода"""
        path = rk4_path(self.profile, unit_launch(self.profile, -4.5, 0.3), 0.2, 200)
        values, _ = self.profile.evaluate(path[:, 0])
        speed = values ** 2 * path[:, 2] ** 2 + np.exp(2.0 * path[:, 0]) * path[:, 3] ** 2
        self.assertLess(float(np.max(np.abs(speed - 1.0))), 1e-6)
        momentum = np.exp(2.0 * path[:, 0]) * path[:, 3]
        self.assertLess(float(np.max(np.abs(momentum / momentum[0] - 1.0))), 1e-6)

    def test_tangent_launches_leave_thin_part(self):
        """Тест выпуклости окружностей: касательная геодезическая уходит к ядру"""
        rng = np.random.default_rng(11)
        for rho in rng.uniform(-5.0, math.log(2.0) - 0.5, 100):
            y0 = (float(rho), 0.0, 0.0, math.exp(-float(rho)))
            path = rk4_path(self.profile, y0, 0.05, 50)
            self.assertGreaterEqual(float(np.min(path[:, 0])), rho - 1e-12)
            self.assertGreater(path[-1, 0], rho)

    def test_fourth_order(self):
        """Тест четвертого порядка: уполовинивание шага уменьшает ошибку не менее чем в 8 раз"""
        y0 = unit_launch(self.profile, -2.0, 0.7)
        reference = rk4_path(self.profile, y0, 1.0, 2000)[-1]
        coarse = np.max(np.abs(rk4_path(self.profile, y0, 1.0, 10)[-1] - reference))
        fine = np.max(np.abs(rk4_path(self.profile, y0, 1.0, 20)[-1] - reference))
        self.assertGreater(coarse / fine, 8.0)

    def test_ode_rhs(self):
        """Тест правой части: ноль у вершины, отказ в ядре"""
        tip = GeodesicState(TipPoint(1, 1e-3, 0.0), (1.0, 0.0))
        self.assertEqual(geodesic_ode_rhs(self.atlas, tip), (0.0, 0.0))
        with self.assertRaises(DomainError):
            geodesic_ode_rhs(self.atlas, GeodesicState(CorePoint(1j), (0.0, 1.0)))

    def test_radial_geodesic(self):
        """Тест: радиальная геодезическая не имеет углового ускорения"""
        state = GeodesicState(CuspPoint(1, -4.5, 0.2), (1.0, 0.0))
        _, theta_acceleration = geodesic_ode_rhs(self.atlas, state)
        self.assertEqual(theta_acceleration, 0.0)
        self.assertEqual(clairaut(self.atlas, state), 0.0)
        with self.assertRaises(DomainError):
            clairaut(self.atlas, GeodesicState(CorePoint(1j), (0.0, 1.0)))


class IntegrateTestCase(TestCase):
    """Тесты интегрирования с переходами между картами"""

    def setUp(self):
        self.atlas = assemble(build_profile(-4.0))

    def test_core_vertical(self):
        """Тест движения вверх в ядре без перехода в карту каспа"""
        state = GeodesicState(CorePoint(1j), (0.0, 1.0))
        segment = integrate(self.atlas, state, 0.5, handoff=False)
        self.assertIsInstance(segment.end.point, CorePoint)
        self.assertAlmostEqual(abs(segment.end.point.z - 1j * math.exp(0.5)), 0.0, places=9)

    def test_core_to_cusp_handoff(self):
        """Тест перехода в карту каспа: ρ убывает с единичной скоростью"""
        state = GeodesicState(CorePoint(1j), (0.0, 1.0))
        segment = integrate(self.atlas, state, 3.0)
        end = segment.end.point
        self.assertIsInstance(end, CuspPoint)
        self.assertEqual(end.cusp, 1)
        self.assertAlmostEqual(end.rho, math.log(2.0) - 3.0, places=8)

    def test_tip_through_apex(self):
        """Тест прохождения через вершину конуса: радиус сохраняется"""
        radius = math.exp(-6.0)
        state = GeodesicState(TipPoint(1, radius, 0.0), (-1.0, 0.0))
        segment = integrate(self.atlas, state, 2.0 * radius)
        end = segment.end.point
        self.assertIsInstance(end, TipPoint)
        self.assertAlmostEqual(end.radius, radius, delta=1e-12)
        self.assertAlmostEqual(end.u, -radius, delta=1e-12)

    def test_invalid_arguments(self):
        """Тест отказа для отрицательной длины и недопустимого шага"""
        state = GeodesicState(CorePoint(1j), (0.0, 1.0))
        with self.assertRaises(DomainError):
            integrate(self.atlas, state, -1.0)
        with self.assertRaises(DomainError):
            integrate(self.atlas, state, 1.0, step=0.5)


class ShootingTestCase(TestCase):
    """Тесты двухточечной задачи"""

    def setUp(self):
        self.profile = build_profile(-4.0)
        self.atlas = assemble(self.profile)

    def test_flat_chord(self):
        """Тест плоской хорды: длина 2e^ρ·sin(Δθ/2)"""
        rho = -6.0
        connection = connect_in_chart(self.profile, (rho, 0.0), (rho, 0.5))
        self.assertAlmostEqual(connection.length, math.exp(rho) * 2.0 * math.sin(0.25), places=14)

    def test_flat_through_apex(self):
        """Тест: при раствор >= π кратчайшая проходит через вершину"""
        rho = -6.0
        connection = connect_in_chart(self.profile, (rho, 0.0), (rho, 3.5))
        self.assertAlmostEqual(connection.length, 2.0 * math.exp(rho), places=14)

    def test_lifted_spread_through_apex(self):
        """Тест подъема с раствором 4 на разных уровнях: длина r_a + r_b, направления радиальные"""
        start, end = (-6.0, 0.25), (-7.0, 4.25)
        connection = connect_in_chart(self.profile, start, end)
        self.assertAlmostEqual(connection.length, math.exp(-6.0) + math.exp(-7.0), places=14)
        self.assertEqual(connection.phi_start, math.pi)
        self.assertEqual(connection.phi_end, 0.0)
        self.assertEqual(connection.midpoint[1], 0.25)
        below = connect_in_chart(self.profile, start, (-7.0, 0.25 + math.pi - 0.1))
        self.assertLess(below.length, math.exp(-6.0) + math.exp(-7.0))

    def test_hyperbolic_zone_matches_distance(self):
        """Тест стрельбы в гиперболической зоне против формулы расстояния"""
        start, end = (-1.0, 0.1), (-0.7, 0.3)
        connection = connect_in_chart(self.profile, start, end)
        expected = float(hyperbolic_distance(complex(chart_point(*start)),
                                             complex(chart_point(*end))))
        self.assertAlmostEqual(connection.length, expected, places=8)

    def test_core_segment(self):
        """Тест короткого отрезка в ядре"""
        p, q = CorePoint(1j), CorePoint(0.1 + 1.1j)
        segment = shoot_between(self.atlas, p, q)
        self.assertAlmostEqual(segment.length, float(hyperbolic_distance(1j, 0.1 + 1.1j)),
                               places=12)

    def test_out_of_range(self):
        """Тест отказа для далеких точек"""
        with self.assertRaises(ShootingError):
            shoot_between(self.atlas, CorePoint(1j), CorePoint(3j))

    def test_same_point(self):
        """Тест нулевого отрезка"""
        point = CuspPoint(2, -4.5, 0.1)
        self.assertEqual(shoot_between(self.atlas, point, point).length, 0.0)


class GeodesicInvariantTestCase(TestCase):
    """Тесты обратимости, согласованности карт и сохраняющихся величин"""

    def setUp(self):
        self.profile = build_profile(-4.0)
        self.atlas = assemble(self.profile)

    def test_reversed_geodesic_retraces(self):
        """Тест: геодезическая с обращенной скоростью возвращается в начало"""
        value, _ = self.profile.evaluate_scalar(-4.5)
        cusp_state = GeodesicState(CuspPoint(1, -4.5, 0.2),
                                   (math.cos(0.5) / value, math.sin(0.5) / math.exp(-4.5)))
        forward = integrate(self.atlas, cusp_state, 0.8, handoff=False)
        back = integrate(self.atlas, forward.end.reversed(), 0.8, handoff=False).end.point
        self.assertAlmostEqual(back.rho, -4.5, delta=1e-8)
        self.assertLess(abs((back.theta - 0.2 + 0.5) % 1.0 - 0.5), 1e-8)

        z0 = 0.3 + 1.5j
        core_state = GeodesicState(CorePoint(z0), (0.6 * z0.imag, 0.8 * z0.imag))
        forward = integrate(self.atlas, core_state, 0.8, handoff=False)
        back = integrate(self.atlas, forward.end.reversed(), 0.8, handoff=False).end.point
        self.assertAlmostEqual(abs(back.z - z0), 0.0, delta=1e-9)

    def test_core_and_cusp_equations_agree(self):
        """Тест: точная геодезическая ядра совпадает с RK4 в гиперболической зоне карты"""
        z0 = -0.5 + 5.4j
        angle = 1.3
        core = integrate(self.atlas, GeodesicState(
            CorePoint(z0), (math.cos(angle) * z0.imag, math.sin(angle) * z0.imag)), 0.3,
            handoff=False)
        rho0, theta0 = math.log(2.0 / z0.imag), z0.real / 2.0
        y0 = (rho0, theta0, -math.sin(angle), math.cos(angle) * z0.imag / 2.0)
        rho, theta = rk4_path(self.profile, y0, 0.3, 300)[-1, :2]
        reduced, _ = reduce_many([complex(chart_point(rho, theta))])
        self.assertAlmostEqual(abs(complex(reduced[0]) - core.end.point.z), 0.0, delta=1e-8)

    def test_speed_drift_on_long_path(self):
        """Тест: отклонение скорости не больше 1e-7 на длине 10"""
        path = rk4_path(self.profile, unit_launch(self.profile, -4.5, 0.3), 10.0, 10000)
        values, _ = self.profile.evaluate(path[:, 0])
        speed = values ** 2 * path[:, 2] ** 2 + np.exp(2.0 * path[:, 0]) * path[:, 3] ** 2
        self.assertLess(float(np.max(np.abs(np.sqrt(speed) - 1.0))), 1e-7)

    def test_clairaut_on_long_path(self):
        """Тест сохранения инварианта Клеро на длине 3"""
        path = rk4_path(self.profile, unit_launch(self.profile, -4.6, 1.2), 3.0, 3000)
        momentum = np.exp(2.0 * path[:, 0]) * path[:, 3]
        self.assertLess(float(np.max(np.abs(momentum / momentum[0] - 1.0))), 1e-7)

    def test_chart_lengths_match_core_distance(self):
        """Тест: длина стрельбы в гиперболической зоне равна расстоянию в H"""
        rng = np.random.default_rng(29)
        for _ in range(10):
            rho = rng.uniform(-3.5, -0.5)
            start = (rho, rng.uniform(0.0, 1.0))
            end = (rho + rng.uniform(-0.2, 0.2), start[1] + rng.uniform(-0.2, 0.2) * math.exp(-rho))
            connection = connect_in_chart(self.profile, start, end)
            expected = float(hyperbolic_distance(complex(chart_point(*start)),
                                                 complex(chart_point(*end))))
            self.assertAlmostEqual(connection.length, expected, delta=1e-8)
