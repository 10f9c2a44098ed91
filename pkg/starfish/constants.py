"""
Константы для модуля starfish.

Все числовые допуски и пороги собраны здесь, чтобы в вычислительном
коде не было магических чисел.
"""
import math


# ============================================================================
# ГРУППА И СИСТОЛА
# ============================================================================

class GroupConstants:
    """Константы арифметики PSL(2, R) и группы Γ(2)"""

    # Допуск на |det - 1| после перенормировки
    DETERMINANT_TOL = 1e-12

    # Допуск на | |trace| - 2 | для параболических элементов
    PARABOLIC_TOL = 1e-9

    # Допуск для тождественного элемента (|b|, |c|, |a - d| малы)
    IDENTITY_TOL = 1e-9

    # Максимальная длина слова при переборе классов сопряженности
    MAX_WORD_LEN = 16

    # Ограничение числа итераций редукции к фундаментальной области
    REDUCTION_CAP = 10000

    # Длина фигуры-восьмерки: 2·arccosh 3 = 4·arcsinh 1
    FIGURE_EIGHT_LENGTH = 2.0 * math.acosh(3.0)

    # Ширина каждого каспа (период трансляции в карте на бесконечности)
    CUSP_WIDTH = 2.0


# ============================================================================
# ПРОФИЛЬ ШАПОЧКИ
# ============================================================================

class ProfileConstants:
    """Константы профиля усечения f*"""

    LOG2 = math.log(2.0)

    # Строгая граница допустимости: rho_star < log 2 - 2·arccosh 3
    RHO_STAR_BOUND = math.log(2.0) - 2.0 * math.acosh(3.0)

    # Ширина переходной полосы [rho* - 1, rho*]
    BAND_WIDTH = 1.0

    TRANSITION_NAME = 'smoothstep-exp'


# ============================================================================
# АТЛАС И ГЕОДЕЗИЧЕСКИЕ
# ============================================================================

class AtlasConstants:
    """Константы карт и переходов между ними"""

    # Переход Core -> Cusp при rho <= log 2 - 0.05, обратно при rho >= log 2 - 0.01
    CORE_TO_CUSP = math.log(2.0) - 0.05
    CUSP_TO_CORE = math.log(2.0) - 0.01

    # Переход Cusp -> Tip внутри плоской зоны, обратно у ее границы
    TIP_ENTER_MARGIN = 0.05
    TIP_EXIT_MARGIN = 0.01

    # Допуск на круговой переход между картами
    ROUND_TRIP_TOL = 1e-9


class GeodesicConstants:
    """Константы интегрирования и стрельбы"""

    DEFAULT_STEP = 1e-3
    MAX_STEP = 0.05

    # Дальность стрельбы (локально минимизирующий режим)
    SHOOTING_RANGE = 0.5
    SHOOTING_MAX_ITER = 50
    SHOOTING_TOL = 1e-11

    # Минимальное число шагов RK4 на отрезке при стрельбе
    MIN_RK4_STEPS = 8


# ============================================================================
# УКОРАЧИВАНИЕ КРИВЫХ
# ============================================================================

class ShorteningConstants:
    """Константы процесса Биркгофа и поиска систолы"""

    MIN_VERTICES = 8
    VERTICES_PER_LETTER = 16

    # Предел числа проходов (пара полушагов четный/нечетный)
    MAX_SWEEPS = 100000

    # Сертификат геодезической: угол поворота в каждой вершине
    ANGLE_TOL = 1e-3
    REINTEGRATION_TOL = 1e-5

    # Коллапс: диаметр меньше COLLAPSE_FACTOR * tol
    COLLAPSE_FACTOR = 10.0

    # Амплитуда и число гармоник случайного возмущения затравки
    JITTER_MAGNITUDE = 0.1
    JITTER_MODES = 3

    # Свидетели: длина не больше min * (1 + WITNESS_REL_TOL)
    WITNESS_REL_TOL = 1e-6

    # Возмущение для вырожденных пересечений
    DEGENERACY_PERTURBATION = 1e-9
    ORIENTATION_EPS = 1e-15

    # Базовая точка затравочных петель
    BASEPOINT = 1j

    # Уровень орицикла затравки (rho = 0 <=> Im = 2 в карте каспа)
    SEED_HOROCYCLE_HEIGHT = 2.0

    # Проходы после каждого удвоения числа вершин
    REFINE_SWEEPS = 4

    # Период попыток опустить периферическую петлю в шапочку
    PUSH_INTERVAL = 50

    # Допуск округления при проверке монотонности длины
    LENGTH_ROUNDOFF = 1e-10


# ============================================================================
# РАЗВЕРТКА
# ============================================================================

class SweepoutConstants:
    """Константы построения развертки"""

    DEFAULT_HALF_STEPS = 32
    MIN_SAMPLES = 64
    SMOOTHING_SWEEPS = 3

    # Допустимое превышение длины границы (5%)
    LENGTH_SLACK = 0.05

    # Длина конечных кадров (почти точечные циклы)
    ENDPOINT_LENGTH = 1e-2

    # Допуск совпадения кадра t = 1/2 с γ1 ∪ γ2
    WAIST_TOL = 1e-6

    # Точки для эвристики покрытия
    COVERAGE_SAMPLES = 1000


# ============================================================================
# ОТЧЕТЫ
# ============================================================================

class ReportConstants:
    """Константы артефактов"""

    SCHEMA_VERSION = 1
    SVG_HASHSALT = 'starfish'
    FILMSTRIP_COLUMNS = 13

    # Коды выхода команд
    EXIT_INADMISSIBLE = 2
    EXIT_BUDGET = 3
    EXIT_CONSTRUCTION = 4
