"""
Арифметика гиперболической плоскости и группы Γ(2).

Верхняя полуплоскость H, преобразования Мёбиуса из PSL(2, R),
периферические образующие c1, c2, c3 трижды проколотой сферы,
классификация по следу и перебор классов сопряженности слов.
"""
import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .constants import GroupConstants
from .exceptions import BudgetExceededError, DomainError, ReductionError

logger = logging.getLogger('starfish')


# ============================================================================
# ИЗОМЕТРИИ
# ============================================================================

@dataclass(frozen=True)
class IsometryPSL2:
    """Матрица [[a, b], [c, d]] с det = 1, действует как z -> (az + b)/(cz + d)"""

    a: float
    b: float
    c: float
    d: float

    @classmethod
    def identity(cls):
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def from_array(cls, array):
        array = np.asarray(array, dtype=float)
        return cls(*map(float, array.reshape(4))).normalized()

    @classmethod
    def translation(cls, shift):
        return cls(1.0, float(shift), 0.0, 1.0)

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    @property
    def trace(self):
        return self.a + self.d

    def as_array(self):
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)

    def normalized(self):
        det = self.det
        if det <= 0:
            raise DomainError(
                f'Матрица с det = {det} не лежит в PSL(2, R)', code='non_positive_det'
            )
        if det == 1.0:
            return self
        scale = math.sqrt(det)
        return IsometryPSL2(self.a / scale, self.b / scale, self.c / scale, self.d / scale)

    def inverse(self):
        return IsometryPSL2(self.d, -self.b, -self.c, self.a)

    def __matmul__(self, other):
        return compose(self, other)

    def apply(self, z):
        """Действие на точку или массив точек верхней полуплоскости"""
        return (self.a * z + self.b) / (self.c * z + self.d)

    def derivative(self, z):
        """Комплексная производная 1/(cz + d)^2"""
        return 1.0 / (self.c * z + self.d) ** 2

    def is_close(self, other, tol=1e-9):
        """Равенство с точностью до знака (проективная эквивалентность)"""
        mine = self.as_array()
        theirs = other.as_array()
        return bool(
            np.allclose(mine, theirs, atol=tol, rtol=0.0)
            or np.allclose(mine, -theirs, atol=tol, rtol=0.0)
        )

    def is_identity(self, tol=GroupConstants.IDENTITY_TOL):
        return self.is_close(IsometryPSL2.identity(), tol)

    def to_list(self):
        return [[self.a, self.b], [self.c, self.d]]


def compose(m1, m2):
    """Произведение m1·m2 с перенормировкой определителя"""
    product = IsometryPSL2(
        m1.a * m2.a + m1.b * m2.c,
        m1.a * m2.b + m1.b * m2.d,
        m1.c * m2.a + m1.d * m2.c,
        m1.c * m2.b + m1.d * m2.d,
    )
    return product.normalized()


@lru_cache(maxsize=1)
def peripheral_generators():
    """
    Образующие c1, c2, c3 с соотношением c1·c2·c3 = ±I.

    c1 фиксирует ∞, c2 фиксирует 0, c3 = (c1·c2)^-1 фиксирует 1.
    """
    c1 = IsometryPSL2(1.0, 2.0, 0.0, 1.0)
    c2 = IsometryPSL2(1.0, 0.0, -2.0, 1.0)
    c3 = compose(c1, c2).inverse()
    return c1, c2, c3


def fixed_points(m):
    """Неподвижные точки на границе: корни c z^2 + (d - a) z - b = 0"""
    if abs(m.c) < GroupConstants.IDENTITY_TOL:
        if abs(m.a - m.d) < GroupConstants.IDENTITY_TOL:
            return (math.inf,)
        return (math.inf, m.b / (m.d - m.a))
    disc = (m.d - m.a) ** 2 + 4.0 * m.b * m.c
    if disc < 0:
        return ()
    root = math.sqrt(max(disc, 0.0))
    first = (m.a - m.d - root) / (2.0 * m.c)
    second = (m.a - m.d + root) / (2.0 * m.c)
    if root < GroupConstants.PARABOLIC_TOL:
        return ((m.a - m.d) / (2.0 * m.c),)
    return tuple(sorted((first, second)))


def axis_projection(m, z):
    """Ближайшие точки оси гиперболического элемента m"""
    points = fixed_points(m)
    if len(points) != 2:
        raise DomainError('Элемент не гиперболический', code='not_hyperbolic')
    z = np.asarray(z, dtype=complex)
    if math.isinf(points[0]):
        foot = points[1]
        return foot + 1j * np.abs(z - foot)
    q, p = points
    # (z - p)/(z - q) переводит ось в мнимую полуось
    w = 1j * np.abs((z - p) / (z - q))
    return (w * q - p) / (w - 1.0)


# ============================================================================
# КЛАССИФИКАЦИЯ
# ============================================================================

class IsometryKind:
    """Типы изометрий по модулю следа"""

    IDENTITY = 'identity'
    ELLIPTIC = 'elliptic'
    PARABOLIC = 'parabolic'
    HYPERBOLIC = 'hyperbolic'

    CHOICES = [IDENTITY, ELLIPTIC, PARABOLIC, HYPERBOLIC]


@dataclass(frozen=True)
class IsometryClass:
    kind: str
    translation_length: float = 0.0

    @property
    def is_hyperbolic(self):
        return self.kind == IsometryKind.HYPERBOLIC


def translation_length_from_trace(trace):
    return 2.0 * math.acosh(abs(trace) / 2.0)


def classify(m):
    """Тип по |trace| с допуском 1e-9 около 2 и длина сдвига 2·arccosh(|tr|/2)"""
    abs_trace = abs(m.trace)
    if m.is_identity():
        return IsometryClass(IsometryKind.IDENTITY)
    if abs(abs_trace - 2.0) <= GroupConstants.PARABOLIC_TOL:
        return IsometryClass(IsometryKind.PARABOLIC)
    if abs_trace < 2.0:
        return IsometryClass(IsometryKind.ELLIPTIC)
    return IsometryClass(IsometryKind.HYPERBOLIC, translation_length_from_trace(abs_trace))


def figure_eight_length():
    """2·arccosh 3 = 4·arcsinh 1"""
    return GroupConstants.FIGURE_EIGHT_LENGTH


# ============================================================================
# СЛОВА
# ============================================================================

# Буквы: 1 = c1, -1 = c1^-1, 2 = c2, -2 = c2^-1
LETTER_CODES = {1: 'a', -1: 'A', 2: 'b', -2: 'B'}
CODE_LETTERS = {code: letter for letter, code in LETTER_CODES.items()}
ALPHABET = (1, -1, 2, -2)


@dataclass(frozen=True)
class HomotopyWord:
    """Циклически редуцированное слово над {c1, c1^-1, c2, c2^-1}"""

    letters: tuple = ()

    def __post_init__(self):
        letters = tuple(int(letter) for letter in self.letters)
        object.__setattr__(self, 'letters', letters)
        for letter in letters:
            if letter not in LETTER_CODES:
                raise DomainError(f'Недопустимая буква {letter}', code='invalid_letter')
        count = len(letters)
        for index in range(count):
            following = letters[(index + 1) % count]
            if count > 1 and letters[index] == -following:
                raise DomainError(
                    f'Слово {self.compact} не является циклически редуцированным',
                    code='not_cyclically_reduced',
                )

    @classmethod
    def parse(cls, text):
        """Разбор компактной записи ('aB') или записи вида 'c1 c2^-1'"""
        text = text.strip()
        if not text or text in ('1', 'e'):
            return cls(())
        if all(char in CODE_LETTERS for char in text):
            return cls(tuple(CODE_LETTERS[char] for char in text))
        letters = []
        for token in text.replace('·', ' ').split():
            base, _, power = token.partition('^')
            generator = {'c1': 1, 'c2': 2}.get(base)
            if generator is None:
                raise DomainError(f'Не удалось разобрать букву {token!r}', code='invalid_letter')
            exponent = int(power) if power else 1
            sign = 1 if exponent > 0 else -1
            letters.extend([sign * generator] * abs(exponent))
        return cls(tuple(letters))

    def __len__(self):
        return len(self.letters)

    @property
    def compact(self):
        return ''.join(LETTER_CODES[letter] for letter in self.letters)

    def __str__(self):
        if not self.letters:
            return '1'
        parts = []
        for letter in self.letters:
            parts.append(f'c{abs(letter)}' + ('^-1' if letter < 0 else ''))
        return ' '.join(parts)

    def inverse(self):
        return HomotopyWord(tuple(-letter for letter in reversed(self.letters)))

    def canonical(self):
        return HomotopyWord(tuple(CODE_LETTERS[char] for char in canonical_key(self.compact)))


def _inverse_compact(compact):
    return compact[::-1].swapcase()


def canonical_key(compact):
    """Лексикографически минимальный поворот слова и обратного к нему"""
    if not compact:
        return compact
    candidates = []
    for text in (compact, _inverse_compact(compact)):
        candidates.extend(text[shift:] + text[:shift] for shift in range(len(text)))
    return min(candidates)


def word_to_matrix(word):
    """Упорядоченное произведение матриц образующих"""
    c1, c2, _ = peripheral_generators()
    generators = {1: c1, -1: c1.inverse(), 2: c2, -2: c2.inverse()}
    result = IsometryPSL2.identity()
    for letter in word.letters:
        result = compose(result, generators[letter])
    return result


def _cyclic_words(length):
    """Все циклически редуцированные слова данной длины"""
    def extend(prefix):
        if len(prefix) == length:
            if length == 1 or prefix[-1] != -prefix[0]:
                yield prefix
            return
        for letter in ALPHABET:
            if prefix and letter == -prefix[-1]:
                continue
            yield from extend(prefix + (letter,))

    yield from extend(())


def enumerate_conjugacy_classes(max_len):
    """
    Представители классов циклических слов длины <= max_len
    с точностью до поворота и обращения, с классификацией.

    Порядок детерминирован: по длине, затем по канонической записи.
    """
    if max_len < 1:
        raise DomainError('max_len должен быть положительным', code='invalid_max_len')
    if max_len > GroupConstants.MAX_WORD_LEN:
        raise BudgetExceededError(
            f'max_len = {max_len} превышает бюджет перебора {GroupConstants.MAX_WORD_LEN}',
            limit=GroupConstants.MAX_WORD_LEN,
        )
    classes = []
    for length in range(1, max_len + 1):
        representatives = []
        for letters in _cyclic_words(length):
            compact = ''.join(LETTER_CODES[letter] for letter in letters)
            if canonical_key(compact) == compact:
                representatives.append(compact)
        for compact in sorted(representatives):
            word = HomotopyWord.parse(compact)
            classes.append((word, classify(word_to_matrix(word))))
    logger.debug(f'Перебор слов до длины {max_len}: {len(classes)} классов')
    return classes


def systole_by_words(max_len):
    """Минимальная длина сдвига по гиперболическим классам и все слова-свидетели"""
    if max_len < 2:
        raise DomainError('Для систолы по словам нужен max_len >= 2', code='invalid_max_len')
    hyperbolic = [
        (word, info) for word, info in enumerate_conjugacy_classes(max_len)
        if info.is_hyperbolic
    ]
    if not hyperbolic:
        raise DomainError('Гиперболические классы не найдены', code='no_hyperbolic_class')
    minimum = min(info.translation_length for _, info in hyperbolic)
    witnesses = [
        word for word, info in hyperbolic
        if info.translation_length <= minimum + GroupConstants.PARABOLIC_TOL
    ]
    return minimum, witnesses


@lru_cache(maxsize=4)
def short_group_elements(max_len=3):
    """Все редуцированные (не циклически) слова длины <= max_len как матрицы, включая I"""
    c1, c2, _ = peripheral_generators()
    generators = {1: c1, -1: c1.inverse(), 2: c2, -2: c2.inverse()}
    elements = [IsometryPSL2.identity()]
    frontier = [((), IsometryPSL2.identity())]
    for _ in range(max_len):
        extended = []
        for letters, matrix in frontier:
            for letter in ALPHABET:
                if letters and letter == -letters[-1]:
                    continue
                product = compose(matrix, generators[letter])
                extended.append((letters + (letter,), product))
                elements.append(product)
        frontier = extended
    return tuple(elements)


def figure_eight_words():
    """Три класса фигур-восьмерок: c1 c2^-1, c1^2 c2, c2^2 c1 (канонические формы)"""
    return [HomotopyWord.parse(text).canonical() for text in ('aB', 'aab', 'bba')]


# ============================================================================
# ФУНДАМЕНТАЛЬНАЯ ОБЛАСТЬ
# ============================================================================

def in_fundamental_domain(z):
    """-1 <= Re z <= 1, |2z - 1| >= 1, |2z + 1| >= 1"""
    z = np.asarray(z, dtype=complex)
    return (
        (z.real >= -1.0) & (z.real <= 1.0)
        & (np.abs(2.0 * z - 1.0) >= 1.0) & (np.abs(2.0 * z + 1.0) >= 1.0)
    )


def reduce_many(points):
    """
    Векторная редукция массива точек к фундаментальной области.

    Возвращает (приведенные точки, матрицы m формы (N, 2, 2)) с z' = m·z.
    """
    z = np.array(points, dtype=complex, ndmin=1).copy()
    if np.any(z.imag <= 0):
        raise DomainError('Точка вне верхней полуплоскости', code='not_in_half_plane')
    count = z.shape[0]
    mats = np.zeros((count, 2, 2))
    mats[:, 0, 0] = 1.0
    mats[:, 1, 1] = 1.0
    for _ in range(GroupConstants.REDUCTION_CAP):
        shift = 2.0 * np.floor((z.real + 1.0) / 2.0)
        z = z - shift
        mats[:, 0, 0] -= shift * mats[:, 1, 0]
        mats[:, 0, 1] -= shift * mats[:, 1, 1]

        right = np.abs(z - 0.5) < 0.5
        left = np.abs(z + 0.5) < 0.5
        if not (right.any() or left.any()):
            return z, mats
        # c2: z -> z / (1 - 2z), c2^-1: z -> z / (2z + 1)
        z[right] = z[right] / (1.0 - 2.0 * z[right])
        mats[right, 1, 0] -= 2.0 * mats[right, 0, 0]
        mats[right, 1, 1] -= 2.0 * mats[right, 0, 1]
        z[left] = z[left] / (2.0 * z[left] + 1.0)
        mats[left, 1, 0] += 2.0 * mats[left, 0, 0]
        mats[left, 1, 1] += 2.0 * mats[left, 0, 1]
    raise ReductionError(
        f'Редукция не завершилась за {GroupConstants.REDUCTION_CAP} итераций'
    )


def reduce_to_domain(z):
    """Точка z' = m·z в фундаментальной области и элемент m группы Γ(2)"""
    reduced, mats = reduce_many([complex(z)])
    return complex(reduced[0]), IsometryPSL2.from_array(mats[0])


# ============================================================================
# ГЕОМЕТРИЯ ПОЛУПЛОСКОСТИ (векторные формулы)
# ============================================================================

def hyperbolic_distance(z, w):
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    ratio = np.abs(z - w) ** 2 / (2.0 * z.imag * w.imag)
    return np.arccosh(1.0 + ratio)


def to_hyperboloid(z):
    """Вложение H в гиперболоид X0^2 - X1^2 - X2^2 = 1"""
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    square = x * x + y * y
    return np.stack([(square + 1.0) / (2.0 * y), (square - 1.0) / (2.0 * y), x / y], axis=-1)


def from_hyperboloid(X):
    y = 1.0 / (X[..., 0] - X[..., 1])
    return X[..., 2] * y + 1j * y


def _minkowski(X, Y):
    return X[..., 0] * Y[..., 0] - X[..., 1] * Y[..., 1] - X[..., 2] * Y[..., 2]


def geodesic_point(z, w, fraction):
    """Точка геодезического отрезка [z, w] на доле fraction длины"""
    Xz = to_hyperboloid(z)
    Xw = to_hyperboloid(w)
    distance = np.asarray(hyperbolic_distance(z, w))
    fraction = np.asarray(fraction, dtype=float)
    safe = np.where(distance > 1e-300, distance, 1.0)
    small = distance < 1e-12
    first = np.where(small, 1.0 - fraction, np.sinh((1.0 - fraction) * safe) / np.sinh(safe))
    second = np.where(small, fraction, np.sinh(fraction * safe) / np.sinh(safe))
    X = first[..., None] * Xz + second[..., None] * Xw
    return from_hyperboloid(X)


def geodesic_midpoint(z, w):
    Xsum = to_hyperboloid(z) + to_hyperboloid(w)
    X = Xsum / np.sqrt(_minkowski(Xsum, Xsum))[..., None]
    return from_hyperboloid(X)


def klein_coordinates(z):
    """Модель Клейна: геодезические - прямые отрезки"""
    X = to_hyperboloid(z)
    return X[..., 1] / X[..., 0], X[..., 2] / X[..., 0]


def geodesic_direction(z, w):
    """Единичное (евклидово) направление геодезической из z в сторону w"""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    dx = w.real - z.real
    scale = np.maximum(np.abs(w - z), 1e-300)
    vertical = np.abs(dx) <= 1e-13 * np.maximum(scale, np.abs(z.imag))
    safe_dx = np.where(vertical, 1.0, dx)
    center = (np.abs(w) ** 2 - np.abs(z) ** 2) / (2.0 * safe_dx)
    tangent = 1j * (z - center)
    tangent = tangent / np.maximum(np.abs(tangent), 1e-300)
    sign = np.sign(np.real(np.conj(tangent) * (w - z)))
    sign = np.where(sign == 0, 1.0, sign)
    up = 1j * np.where(w.imag >= z.imag, 1.0, -1.0)
    return np.where(vertical, up, sign * tangent)


def geodesic_travel(z, direction, length):
    """
    Точка на расстоянии length от z вдоль направления direction
    и единичное направление в конце пути.
    """
    z = np.asarray(z, dtype=complex)
    direction = np.asarray(direction, dtype=complex)
    half = (np.angle(direction) - np.pi / 2.0) / 2.0
    cos_h, sin_h = np.cos(half), np.sin(half)
    w = 1j * np.exp(np.asarray(length, dtype=float))
    denominator = -sin_h * w + cos_h
    rotated = (cos_h * w + sin_h) / denominator
    point = z.real + z.imag * rotated
    velocity = z.imag * w / denominator ** 2
    return point, velocity / np.abs(velocity)
