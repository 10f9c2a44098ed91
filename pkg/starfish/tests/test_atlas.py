import math

import numpy as np
from django.test import TestCase

from starfish.atlas import (
    CorePoint,
    CuspPoint,
    TipPoint,
    assemble,
    chart_point,
    from_cusp_chart,
    horo_levels,
    in_isometric_region,
    in_thin_part,
    locate,
    metric_at,
    parabolic_frame,
    point_from_chart,
    surface_level,
    to_cusp_chart,
    to_lift,
    validate_point,
)
from starfish.cap_profile import build_profile
from starfish.exceptions import ChartDomainError, DomainError
from starfish.hyperbolic_group import peripheral_generators, reduce_many


class CuspChartTestCase(TestCase):
    """Тесты карт каспов и переходов"""

    def setUp(self):
        self.atlas = assemble(build_profile(-4.0))

    def test_cusp_one_origin(self):
        """Тест: точка 2i имеет координаты (0, 0) в карте каспа 1"""
        rho, theta = to_cusp_chart(self.atlas, 2j, 1)
        self.assertAlmostEqual(rho, 0.0, places=14)
        self.assertAlmostEqual(theta, 0.0, places=14)

    def test_round_trip(self):
        """Тест кругового перехода (ρ, θ) -> H -> (ρ, θ) для каспов 1 и 2"""
        for cusp in (1, 2):
            z = from_cusp_chart(self.atlas, cusp, -0.5, 0.3)
            rho, theta = to_cusp_chart(self.atlas, z, cusp)
            self.assertAlmostEqual(rho, -0.5, places=9)
            self.assertAlmostEqual(theta, 0.3, places=9)

    def test_horoball_boundaries(self):
        """Тест: орошары уровня log 2 касаются в точках i и (±1 + i)/2"""
        levels = horo_levels(np.array([1j, 0.5 + 0.5j]))
        self.assertAlmostEqual(float(levels[0, 0]), math.log(2.0), places=14)
        self.assertAlmostEqual(float(levels[1, 1]), math.log(2.0), places=14)
        self.assertAlmostEqual(float(levels[1, 2]), math.log(2.0), places=14)

    def test_outside_horoball(self):
        """Тест отказа для точки вне орошара"""
        with self.assertRaises(ChartDomainError):
            to_cusp_chart(self.atlas, 0.5 + 0.9j, 1)
        with self.assertRaises(ChartDomainError):
            from_cusp_chart(self.atlas, 1, 1.0, 0.0)

    def test_invalid_cusp(self):
        """Тест отказа для несуществующего каспа"""
        with self.assertRaises(DomainError):
            to_cusp_chart(self.atlas, 2j, 4)

    def test_to_dict(self):
        """Тест описания атласа"""
        data = self.atlas.to_dict()
        self.assertEqual([cusp['index'] for cusp in data['cusps']], [1, 2, 3])
        self.assertEqual(data['cusps'][0]['point'], 'inf')
        self.assertEqual(data['profile']['rho_star'], -4.0)
        self.assertEqual(len(data['generators']), 3)


class SurfacePointTestCase(TestCase):
    """Тесты выбора карты, метрики и тонкой части"""

    def setUp(self):
        self.atlas = assemble(build_profile(-4.0))

    def test_point_from_chart_levels(self):
        """Тест выбора карты по уровню ρ"""
        self.assertIsInstance(point_from_chart(self.atlas, 1, -3.0, 0.2), CorePoint)
        self.assertIsInstance(point_from_chart(self.atlas, 1, -4.5, 0.2), CuspPoint)
        tip = point_from_chart(self.atlas, 1, -6.0, 0.2)
        self.assertIsInstance(tip, TipPoint)
        self.assertAlmostEqual(tip.radius, math.exp(-6.0), places=15)

    def test_locate(self):
        """Тест определения точки по подъему"""
        self.assertIsInstance(locate(self.atlas, 100j), CorePoint)
        deep = locate(self.atlas, 200j)
        self.assertIsInstance(deep, CuspPoint)
        self.assertEqual(deep.cusp, 1)
        self.assertAlmostEqual(deep.rho, math.log(0.01), places=12)

    def test_metric(self):
        """Тест метрического тензора в трех типах карт"""
        core = metric_at(self.atlas, CorePoint(2j))
        self.assertAlmostEqual(core.g11, 0.25, places=14)
        cusp = metric_at(self.atlas, CuspPoint(1, -4.0, 0.0))
        self.assertAlmostEqual(cusp.g11, 1.0, places=14)
        self.assertAlmostEqual(cusp.g22, math.exp(-8.0), places=14)
        tip = metric_at(self.atlas, TipPoint(1, 1e-3, 0.0))
        self.assertEqual(tip.as_array().tolist(), [[1.0, 0.0], [0.0, 1.0]])

    def test_validate_point(self):
        """Тест отказа для точек вне области карты"""
        with self.assertRaises(DomainError):
            validate_point(self.atlas, TipPoint(1, 0.5, 0.0))
        with self.assertRaises(DomainError):
            validate_point(self.atlas, CuspPoint(1, 1.0, 0.0))
        with self.assertRaises(DomainError):
            validate_point(self.atlas, CorePoint(500j))

    def test_regions(self):
        """Тест изометрической области и тонкой части"""
        self.assertTrue(in_isometric_region(self.atlas, CorePoint(1j)))
        self.assertTrue(in_isometric_region(self.atlas, CuspPoint(2, -3.0, 0.1)))
        self.assertFalse(in_isometric_region(self.atlas, CuspPoint(2, -4.5, 0.1)))
        self.assertTrue(in_thin_part(self.atlas, CuspPoint(1, -4.5, 0.0), -4.0))
        self.assertFalse(in_thin_part(self.atlas, CorePoint(1j), 0.0))
        with self.assertRaises(DomainError):
            in_thin_part(self.atlas, CorePoint(1j), 1.0)

    def test_surface_level(self):
        """Тест уровня точек разных карт"""
        self.assertAlmostEqual(surface_level(self.atlas, TipPoint(3, 0.0, math.exp(-7.0))),
                               -7.0, places=12)
        self.assertAlmostEqual(surface_level(self.atlas, CorePoint(1j)), math.log(2.0),
                               places=12)

    def test_lift_round_trip(self):
        """Тест подъема точки каспа и обратного чтения координат"""
        z = to_lift(self.atlas, CuspPoint(1, -4.5, 0.25))
        rho, theta = to_cusp_chart(self.atlas, z, 1)
        self.assertAlmostEqual(rho, -4.5, places=9)
        self.assertAlmostEqual(theta, 0.25, places=9)

    def test_cone_point_has_no_lift(self):
        """Тест: вершина шапочки не имеет подъема"""
        with self.assertRaises(DomainError):
            to_lift(self.atlas, TipPoint(1, 0.0, 0.0))


class ParabolicFrameTestCase(TestCase):
    """Тесты сопряжения параболических элементов со сдвигами"""

    def test_generators(self):
        """Тест карт для c1 и c2"""
        c1, c2, c3 = peripheral_generators()
        frame, cusp, shift = parabolic_frame(c1)
        self.assertEqual(cusp, 1)
        self.assertAlmostEqual(abs(shift), 2.0, places=9)
        _, cusp, shift = parabolic_frame(c2)
        self.assertEqual(cusp, 2)
        self.assertAlmostEqual(abs(shift), 2.0, places=9)
        _, cusp, _ = parabolic_frame(c3)
        self.assertEqual(cusp, 3)

    def test_hyperbolic_rejected(self):
        """Тест отказа для гиперболического элемента"""
        c1, c2, _ = peripheral_generators()
        with self.assertRaises(DomainError):
            parabolic_frame(c1 @ c2.inverse())


class ChartInvariantTestCase(TestCase):
    """Тесты согласованности карт на случайных точках"""

    def setUp(self):
        self.atlas = assemble(build_profile(-4.0))
        self.rng = np.random.default_rng(23)

    def test_random_round_trips(self):
        """Тест кругового перехода через карты всех трех каспов на 10^3 точках"""
        for cusp in (1, 2, 3):
            rhos = self.rng.uniform(-6.0, math.log(2.0) - 1e-3, 334)
            thetas = self.rng.uniform(0.0, 1.0, 334)
            for rho, theta in zip(rhos, thetas):
                z = from_cusp_chart(self.atlas, cusp, rho, theta)
                back_rho, back_theta = to_cusp_chart(self.atlas, z, cusp)
                self.assertAlmostEqual(back_rho, rho, delta=1e-9)
                shift = (back_theta - theta + 0.5) % 1.0 - 0.5
                self.assertLess(abs(shift), 1e-9)

    def test_horoballs_are_disjoint(self):
        """Тест: точка лежит строго внутри не более чем одного орошара уровня log 2"""
        points = self.rng.uniform(-3.0, 3.0, 10000) \
            + 1j * np.exp(self.rng.uniform(math.log(0.01), math.log(5.0), 10000))
        reduced, _ = reduce_many(points)
        levels = horo_levels(reduced)
        per_cusp = np.stack([levels[:, 0], levels[:, 1], levels[:, 2:].min(axis=1)], axis=1)
        inside = per_cusp < math.log(2.0) - 1e-12
        self.assertLessEqual(int(inside.sum(axis=1).max()), 1)
        self.assertTrue(bool(inside.any(axis=0).all()))

    def test_level_circle_length(self):
        """Тест: окружность уровня ρ имеет длину e^ρ в полосе и в ядре"""
        thetas = (np.arange(200) + 0.5) / 200 - 0.5
        for rho in (-4.8, -4.3):
            length = sum(metric_at(self.atlas, CuspPoint(1, rho, theta % 1.0)).norm((0.0, 1.0))
                         for theta in thetas) / len(thetas)
            self.assertAlmostEqual(length, math.exp(rho), delta=1e-12)
        for rho in (-2.0, 0.0, 0.5):
            # dw/dθ = 2 в карте на ∞
            length = sum(metric_at(self.atlas, CorePoint(complex(chart_point(rho, theta))))
                         .norm((2.0, 0.0)) for theta in thetas) / len(thetas)
            self.assertAlmostEqual(length, math.exp(rho), delta=1e-12)
