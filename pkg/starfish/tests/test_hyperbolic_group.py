import math

import numpy as np
import pytest
from django.test import TestCase

from starfish.exceptions import BudgetExceededError, DomainError
from starfish.hyperbolic_group import (
    HomotopyWord,
    IsometryKind,
    IsometryPSL2,
    axis_projection,
    canonical_key,
    classify,
    compose,
    enumerate_conjugacy_classes,
    figure_eight_length,
    figure_eight_words,
    fixed_points,
    geodesic_midpoint,
    geodesic_point,
    geodesic_travel,
    hyperbolic_distance,
    in_fundamental_domain,
    peripheral_generators,
    reduce_many,
    reduce_to_domain,
    short_group_elements,
    systole_by_words,
    translation_length_from_trace,
    word_to_matrix,
)


class IsometryTestCase(TestCase):
    """Тесты арифметики PSL(2, R) и образующих Γ(2)"""

    def setUp(self):
        self.c1, self.c2, self.c3 = peripheral_generators()

    def test_generators_relation(self):
        """Тест соотношения c1·c2·c3 = ±I"""
        product = compose(compose(self.c1, self.c2), self.c3)
        self.assertTrue(product.is_identity())

    def test_generators_are_parabolic(self):
        """Тест параболичности c1, c2, c3"""
        for generator in (self.c1, self.c2, self.c3):
            self.assertEqual(classify(generator).kind, IsometryKind.PARABOLIC)

    def test_fixed_points_of_generators(self):
        """Тест неподвижных точек: ∞, 0 и 1"""
        self.assertEqual(fixed_points(self.c1), (math.inf,))
        self.assertAlmostEqual(fixed_points(self.c2)[0], 0.0, places=12)
        self.assertAlmostEqual(fixed_points(self.c3)[0], 1.0, places=12)

    def test_identity_classification(self):
        """Тест классификации тождественного элемента"""
        self.assertEqual(classify(IsometryPSL2.identity()).kind, IsometryKind.IDENTITY)

    def test_elliptic_classification(self):
        """Тест эллиптического элемента (поворот z -> -1/z)"""
        self.assertEqual(classify(IsometryPSL2(0.0, -1.0, 1.0, 0.0)).kind, IsometryKind.ELLIPTIC)

    def test_inverse_and_normalization(self):
        """Тест обратного элемента и перенормировки определителя"""
        m = IsometryPSL2.from_array([[2.0, 2.0], [0.0, 2.0]])
        self.assertAlmostEqual(m.det, 1.0, places=14)
        self.assertTrue(compose(m, m.inverse()).is_identity())

    def test_negative_determinant_rejected(self):
        """Тест отказа для матрицы с отрицательным определителем"""
        with self.assertRaises(DomainError):
            IsometryPSL2.from_array([[0.0, 1.0], [1.0, 0.0]])

    def test_sign_equivalence(self):
        """Тест проективного равенства M и -M"""
        negated = IsometryPSL2(-self.c1.a, -self.c1.b, -self.c1.c, -self.c1.d)
        self.assertTrue(self.c1.is_close(negated))


class WordsTestCase(TestCase):
    """Тесты слов, канонических форм и длин сдвига"""

    def test_parse_formats(self):
        """Тест разбора компактной и развернутой записи"""
        self.assertEqual(HomotopyWord.parse('aB'), HomotopyWord.parse('c1 c2^-1'))
        self.assertEqual(HomotopyWord.parse('c1^2 c2').compact, 'aab')

    def test_not_cyclically_reduced(self):
        """Тест отказа для слова с сокращением"""
        with self.assertRaises(DomainError):
            HomotopyWord.parse('aA')
        with self.assertRaises(DomainError):
            HomotopyWord.parse('abA')

    def test_canonical_is_class_invariant(self):
        """Тест канонической формы: повороты и обращение дают одно и то же"""
        key = canonical_key('aB')
        for variant in ('Ba', 'bA', 'Ab'):
            self.assertEqual(canonical_key(variant), key)

    def test_figure_eight_trace(self):
        """Тест следа c1·c2^-1: матрица [[5, 2], [2, 1]] и след 6"""
        matrix = word_to_matrix(HomotopyWord.parse('aB'))
        self.assertTrue(matrix.is_close(IsometryPSL2(5.0, 2.0, 2.0, 1.0)))
        info = classify(matrix)
        self.assertTrue(info.is_hyperbolic)
        self.assertAlmostEqual(info.translation_length, 2.0 * math.acosh(3.0), places=12)

    def test_figure_eight_length_identity(self):
        """Тест равенства 2·arccosh 3 = 4·arcsinh 1"""
        self.assertAlmostEqual(figure_eight_length(), 4.0 * math.asinh(1.0), places=12)
        self.assertAlmostEqual(figure_eight_length(), 3.5254943, places=7)

    def test_peripheral_words(self):
        """Тест параболичности c1^2 и c1·c2"""
        for text in ('aa', 'ab', 'bb'):
            self.assertEqual(classify(word_to_matrix(HomotopyWord.parse(text))).kind,
                             IsometryKind.PARABOLIC)

    def test_enumeration_length_three(self):
        """Тест числа классов до длины 3"""
        self.assertEqual(len(enumerate_conjugacy_classes(3)), 12)

    def test_enumeration_length_two(self):
        """Тест: до длины 2 ровно один гиперболический класс"""
        hyperbolic = [word for word, info in enumerate_conjugacy_classes(2) if info.is_hyperbolic]
        self.assertEqual([word.compact for word in hyperbolic], [canonical_key('aB')])

    def test_enumeration_is_deterministic(self):
        """Тест детерминированного порядка перебора"""
        first = [word.compact for word, _ in enumerate_conjugacy_classes(4)]
        second = [word.compact for word, _ in enumerate_conjugacy_classes(4)]
        self.assertEqual(first, second)
        self.assertEqual(len(first), len(set(first)))

    def test_budget(self):
        """Тест ограничения длины перебора"""
        with self.assertRaises(BudgetExceededError):
            enumerate_conjugacy_classes(17)
        with self.assertRaises(DomainError):
            enumerate_conjugacy_classes(0)

    def test_systole_by_words(self):
        """Тест систолы по словам до длины 8: 2·arccosh 3 только у восьмерок"""
        minimum, witnesses = systole_by_words(8)
        self.assertAlmostEqual(minimum, 2.0 * math.acosh(3.0), delta=1e-12)
        self.assertEqual(sorted(word.compact for word in witnesses),
                         sorted(word.compact for word in figure_eight_words()))

    def test_systole_needs_two_letters(self):
        """Тест отказа систолы по словам длины 1"""
        with self.assertRaises(DomainError):
            systole_by_words(1)

    def test_short_elements_contain_generators(self):
        """Тест набора коротких элементов группы"""
        elements = short_group_elements(3)
        c1, c2, _ = peripheral_generators()
        self.assertTrue(any(element.is_identity() for element in elements))
        self.assertTrue(any(element.is_close(c1) for element in elements))
        self.assertTrue(any(element.is_close(c2.inverse()) for element in elements))


class FundamentalDomainTestCase(TestCase):
    """Тесты редукции к фундаментальной области и формул полуплоскости"""

    def test_reduce_translation(self):
        """Тест приведения точки сдвигом"""
        reduced, matrix = reduce_to_domain(complex(5.0, 0.3))
        self.assertTrue(in_fundamental_domain(reduced))
        self.assertAlmostEqual(abs(matrix.apply(complex(5.0, 0.3)) - reduced), 0.0, places=10)

    def test_reduce_many_points(self):
        """Тест векторной редукции случайных точек"""
        rng = np.random.default_rng(7)
        points = rng.uniform(-10.0, 10.0, 200) + 1j * rng.uniform(0.01, 3.0, 200)
        reduced, mats = reduce_many(points)
        self.assertTrue(np.all(in_fundamental_domain(reduced)))
        images = (mats[:, 0, 0] * points + mats[:, 0, 1]) / (mats[:, 1, 0] * points + mats[:, 1, 1])
        self.assertLess(np.max(np.abs(images - reduced)), 1e-8)

    def test_reduce_rejects_lower_half_plane(self):
        """Тест отказа для точки вне верхней полуплоскости"""
        with self.assertRaises(DomainError):
            reduce_many([complex(0.0, -1.0)])

    def test_distance_and_midpoint(self):
        """Тест расстояния и середины на мнимой оси"""
        self.assertAlmostEqual(float(hyperbolic_distance(1j, 2j)), math.log(2.0), places=12)
        self.assertAlmostEqual(abs(complex(geodesic_midpoint(1j, 4j)) - 2j), 0.0, places=12)

    def test_geodesic_travel_vertical(self):
        """Тест движения вверх по мнимой оси"""
        point, direction = geodesic_travel(1j, 1j, math.log(3.0))
        self.assertAlmostEqual(abs(complex(point) - 3j), 0.0, places=12)
        self.assertAlmostEqual(abs(complex(direction) - 1j), 0.0, places=12)

    def test_geodesic_travel_matches_distance(self):
        """Тест: пройденное расстояние равно заданной длине"""
        point, _ = geodesic_travel(complex(0.3, 1.2), complex(0.6, 0.8), 0.7)
        self.assertAlmostEqual(float(hyperbolic_distance(complex(0.3, 1.2), point)), 0.7, places=10)


@pytest.mark.unit
class IsometryPytestTestCase:
    """Тесты классификации по следу с pytest"""

    def test_translation_length_grows_with_trace(self):
        """Тест монотонности длины сдвига по следу"""
        lengths = [classify(IsometryPSL2(t, 1.0, t * t - 1.0, t)).translation_length
                   for t in (1.5, 2.0, 3.0)]
        assert lengths == sorted(lengths)


class GroupInvariantTestCase(TestCase):
    """Тесты инвариантов арифметики на длинных цепочках"""

    def setUp(self):
        self.c1, self.c2, self.c3 = peripheral_generators()

    def test_determinant_after_many_compositions(self):
        """Тест: после 10^4 умножений det = 1 и результат - ожидаемый поворот"""
        angle = 0.1
        rotation = IsometryPSL2(math.cos(angle), -math.sin(angle), math.sin(angle), math.cos(angle))
        product = IsometryPSL2.identity()
        for _ in range(10000):
            product = compose(compose(product, self.c1), rotation)
            product = compose(product, compose(rotation.inverse(), self.c1.inverse()))
            product = compose(product, rotation)
            self.assertLess(abs(product.det - 1.0), 1e-12)
        total = 10000 * angle
        expected = IsometryPSL2(math.cos(total), -math.sin(total), math.sin(total), math.cos(total))
        self.assertTrue(product.is_close(expected, tol=1e-8))

    def test_trace_length_round_trip(self):
        """Тест: след -> длина сдвига -> след"""
        for trace in (2.5, 3.0, 6.0, 18.0, 100.0):
            length = translation_length_from_trace(trace)
            self.assertAlmostEqual(2.0 * math.cosh(length / 2.0), trace, delta=1e-12 * trace)
            self.assertAlmostEqual(translation_length_from_trace(-trace), length, places=14)

    def test_length_is_conjugation_invariant(self):
        """Тест: длина сдвига не меняется при сопряжении короткими элементами"""
        for word in list(figure_eight_words()) + [HomotopyWord.parse('aaB')]:
            element = word_to_matrix(word)
            length = classify(element).translation_length
            for other in short_group_elements(2):
                conjugate = compose(compose(other, element), other.inverse())
                info = classify(conjugate)
                self.assertEqual(info.kind, IsometryKind.HYPERBOLIC)
                self.assertAlmostEqual(info.translation_length, length, places=9)

    def test_axis_projection(self):
        """Тест проекции на ось: образ лежит на оси и ближе исходной точки к ней"""
        element = word_to_matrix(HomotopyWord.parse('aB'))
        left, right = fixed_points(element)
        center, radius = (left + right) / 2.0, (right - left) / 2.0
        points = np.array([0.3 + 2.0j, -0.1 + 0.5j, 1.0 + 1.0j])
        projected = axis_projection(element, points)
        np.testing.assert_allclose(np.abs(projected - center), radius, atol=1e-12)
        np.testing.assert_allclose(axis_projection(element, projected), projected, atol=1e-12)
        for point, foot in zip(points, projected):
            for other in geodesic_point(foot, element.apply(foot), np.linspace(0.0, 1.0, 9)):
                self.assertLessEqual(float(hyperbolic_distance(point, foot)),
                                     float(hyperbolic_distance(point, other)) + 1e-12)

    def test_vertical_axis_projection(self):
        """Тест проекции на вертикальную ось и отказа для параболического элемента"""
        element = IsometryPSL2(2.0, 1.0, 0.0, 0.5)
        self.assertAlmostEqual(complex(axis_projection(element, 3.0 + 4.0j)),
                               complex(-2.0 / 3.0, math.hypot(3.0 + 2.0 / 3.0, 4.0)), places=12)
        with self.assertRaises(DomainError):
            axis_projection(self.c1, 1j)
