"""
Исключения библиотеки starfish.

Каждое исключение несет машинный код (как ValidationError в валидаторах),
по которому команды выбирают код выхода и текст диагностики.
"""


class StarfishError(Exception):
    """Базовая ошибка вычислений на поверхности"""

    code = 'starfish_error'

    def __init__(self, message, code=None, **details):
        super().__init__(message)
        self.message = message
        if code is not None:
            self.code = code
        self.details = details

    def __str__(self):
        return self.message


class AdmissibilityError(StarfishError):
    """Параметр rho_star не удовлетворяет строгой границе log 2 - sys"""

    code = 'inadmissible_rho_star'


class ChartDomainError(StarfishError):
    """Точка вне области определения карты"""

    code = 'chart_domain'


class DomainError(StarfishError):
    """Операция не определена для данного объекта"""

    code = 'domain'


class BudgetExceededError(StarfishError):
    """Превышен комбинаторный бюджет перебора слов"""

    code = 'budget_exceeded'


class ReductionError(StarfishError):
    """Редукция к фундаментальной области не завершилась"""

    code = 'reduction_cap'


class ShootingError(StarfishError):
    """Метод стрельбы не сошелся; details['residual'] - лучшая невязка"""

    code = 'shooting_failed'


class NonConvergenceError(StarfishError):
    """Укорачивание не сошлось за отведенное число проходов"""

    code = 'non_convergence'


class DegeneracyError(StarfishError):
    """Петля не в общем положении даже после возмущения"""

    code = 'degenerate_position'


class PreconditionError(StarfishError):
    """Нарушено предусловие операции"""

    code = 'precondition'


class ConstructionError(StarfishError):
    """Развертка превысила допустимую длину; details['frame'] - кадр"""

    code = 'construction_failed'
