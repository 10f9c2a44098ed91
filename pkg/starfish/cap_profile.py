"""
Профиль усечения f* и его диагностика.

Метрика каспа после усечения: f*(ρ)^2 dρ^2 + e^{2ρ} dθ^2.
f* = 1 на [ρ*, log 2] (гиперболическая зона), f* = e^ρ при ρ <= ρ* - 1
(плоская шапочка), между ними гладкая ступенька на основе exp(-1/t).
"""
import math
from dataclasses import dataclass

import numpy as np

from .constants import ProfileConstants
from .exceptions import AdmissibilityError, ChartDomainError, DomainError


def smooth_step(t):
    """S(t) = s(t) / (s(t) + s(1 - t)), s(t) = exp(-1/t); возвращает (S, S')"""
    t = np.asarray(t, dtype=float)
    inner = np.clip(t, 1e-300, 1.0 - 1e-16)
    with np.errstate(over='ignore', divide='ignore', invalid='ignore'):
        ratio = np.exp(1.0 / inner - 1.0 / (1.0 - inner))
        value = 1.0 / (1.0 + ratio)
        slope = value * (1.0 - value) * (1.0 / inner ** 2 + 1.0 / (1.0 - inner) ** 2)
    value = np.where(t <= 0.0, 0.0, np.where(t >= 1.0, 1.0, value))
    slope = np.where((t <= 0.0) | (t >= 1.0), 0.0, np.nan_to_num(slope))
    return value, slope


@dataclass(frozen=True)
class CapProfile:
    rho_star: float
    transition: str = ProfileConstants.TRANSITION_NAME

    @property
    def band(self):
        return self.rho_star - ProfileConstants.BAND_WIDTH, self.rho_star

    @property
    def flat_level(self):
        """Верхняя граница плоской зоны ρ* - 1"""
        return self.rho_star - ProfileConstants.BAND_WIDTH

    def evaluate(self, rho):
        """
        (f*, f*') без проверки области; для ρ > log 2 продолжение единицей.

        Вне полосы возвращаются замкнутые формулы без интерполяции.
        """
        rho = np.asarray(rho, dtype=float)
        low = self.flat_level
        exp_rho = np.exp(rho)
        step, step_slope = smooth_step(rho - low)
        blended = exp_rho + (1.0 - exp_rho) * step
        blended_slope = exp_rho * (1.0 - step) + (1.0 - exp_rho) * step_slope
        value = np.where(rho >= self.rho_star, 1.0, np.where(rho <= low, exp_rho, blended))
        slope = np.where(rho >= self.rho_star, 0.0, np.where(rho <= low, exp_rho, blended_slope))
        if value.ndim == 0:
            return float(value), float(slope)
        return value, slope

    def evaluate_scalar(self, rho):
        """Скалярный вариант evaluate для правой части ОДУ"""
        if rho >= self.rho_star:
            return 1.0, 0.0
        exp_rho = math.exp(rho)
        t = rho - self.flat_level
        if t <= 0.0:
            return exp_rho, exp_rho
        exponent = 1.0 / t - 1.0 / (1.0 - t)
        if exponent > 700.0:
            return exp_rho, exp_rho
        step = 1.0 / (1.0 + math.exp(exponent))
        step_slope = step * (1.0 - step) * (1.0 / t ** 2 + 1.0 / (1.0 - t) ** 2)
        value = exp_rho + (1.0 - exp_rho) * step
        slope = exp_rho * (1.0 - step) + (1.0 - exp_rho) * step_slope
        return value, slope

    def to_dict(self):
        return {'rho_star': self.rho_star, 'transition': self.transition}


def build_profile(rho_star):
    """Профиль с проверкой строгой границы ρ* < log 2 - 2·arccosh 3"""
    rho_star = float(rho_star)
    if not math.isfinite(rho_star) or rho_star >= ProfileConstants.RHO_STAR_BOUND:
        raise AdmissibilityError(
            f'rho_star = {rho_star} недопустимо: требуется rho_star < '
            f'log 2 - 2·arccosh 3 = {ProfileConstants.RHO_STAR_BOUND:.7f}',
            bound=ProfileConstants.RHO_STAR_BOUND,
        )
    return CapProfile(rho_star=rho_star)


def admissibility_margin(rho_star):
    """log 2 - ρ* - 2·arccosh 3 (положительна для допустимых ρ*)"""
    return ProfileConstants.RHO_STAR_BOUND - float(rho_star)


def _check_domain(rho):
    if np.any(np.asarray(rho, dtype=float) > ProfileConstants.LOG2):
        raise ChartDomainError(
            f'rho > log 2 вне карты каспа: {np.max(rho)}', bound=ProfileConstants.LOG2
        )


def f_eval(profile, rho):
    """Значение f*(ρ) и производная f*'(ρ)"""
    _check_domain(rho)
    return profile.evaluate(rho)


def gauss_curvature(profile, rho):
    """K(ρ) = (f*' - f*) / f*^3"""
    value, slope = f_eval(profile, rho)
    return (slope - value) / value ** 3


def circle_geodesic_curvature(profile, rho):
    """Геодезическая кривизна окружности {ρ = const}: 1 / f*(ρ)"""
    value, _ = f_eval(profile, rho)
    return 1.0 / value


def thin_part_distance(rho_star):
    """Расстояние от ∂C_i до ∂C_i^{<=ρ*}: log 2 - ρ*"""
    rho_star = float(rho_star)
    if rho_star > ProfileConstants.LOG2:
        raise DomainError('rho_star должен быть не больше log 2', code='invalid_rho_star')
    return ProfileConstants.LOG2 - rho_star
