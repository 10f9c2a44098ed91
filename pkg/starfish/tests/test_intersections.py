from django.test import TestCase

from starfish.atlas import assemble
from starfish.cap_profile import build_profile
from starfish.hyperbolic_group import systole_by_words
from starfish.intersections import find_crossings, primary_crossing, self_intersections

from .loops import axis_loop, horocycle_loop, wavy_double_loop


class SelfIntersectionTestCase(TestCase):
    """Тесты подсчета самопересечений"""

    def setUp(self):
        self.atlas = assemble(build_profile(-4.0))

    def test_figure_eight(self):
        """Тест: ось c1·c2^-1 имеет одну точку самопересечения"""
        self.assertEqual(self_intersections(self.atlas, axis_loop()), 1)

    def test_horocycle_is_simple(self):
        """Тест: орицикл простой"""
        self.assertEqual(self_intersections(self.atlas, horocycle_loop()), 0)

    def test_double_horocycle(self):
        """Тест: волнистая петля класса c1^2 пересекает себя один раз"""
        self.assertEqual(self_intersections(self.atlas, wavy_double_loop()), 1)

    def test_crossings_come_in_pairs(self):
        """Тест симметрии упорядоченных пересечений"""
        crossings, degenerate = find_crossings(axis_loop())
        self.assertEqual(degenerate, [])
        self.assertEqual(len(crossings), 2)
        first, second = crossings
        self.assertEqual((first.first, first.second), (second.second, second.first))
        self.assertTrue(first.delta.is_close(second.delta.inverse(), tol=1e-6))

    def test_primary_crossing(self):
        """Тест выбора пересечения с i < j"""
        crossings, ordered = primary_crossing(axis_loop())
        self.assertEqual(len(crossings), 2)
        self.assertEqual(len(ordered), 1)
        self.assertLess(ordered[0].first, ordered[0].second)

    def test_word_systole_witnesses_cross_once(self):
        """Тест: ось каждого слова-свидетеля систолы до длины 8 пересекает себя один раз"""
        _, witnesses = systole_by_words(8)
        self.assertEqual(len(witnesses), 3)
        for word in witnesses:
            count = self_intersections(self.atlas, axis_loop(word.compact))
            self.assertEqual(count, 1, word.compact)
