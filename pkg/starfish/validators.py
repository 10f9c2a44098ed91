import json
import math
from pathlib import Path

from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _

from .constants import GeodesicConstants, GroupConstants, ProfileConstants, ShorteningConstants


def validate_rho_star(value):
    """Строгая граница допустимости rho_star < log 2 - 2·arccosh 3"""
    if not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ValidationError(_('rho_star должен быть конечным числом.'), code='invalid_rho_star')
    if value >= ProfileConstants.RHO_STAR_BOUND:
        raise ValidationError(
            _('rho_star = %(value)s недопустимо: граница %(bound).7f.'),
            code='inadmissible_rho_star',
            params={'value': value, 'bound': ProfileConstants.RHO_STAR_BOUND},
        )


def validate_max_word_len(value):
    if not isinstance(value, int) or value < 1:
        raise ValidationError(_('max_word_len должен быть положительным целым.'),
                              code='invalid_max_word_len')
    if value > GroupConstants.MAX_WORD_LEN:
        raise ValidationError(
            _('max_word_len = %(value)s превышает бюджет %(limit)s.'),
            code='budget_exceeded',
            params={'value': value, 'limit': GroupConstants.MAX_WORD_LEN},
        )


def validate_positive_int(value, name):
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ValidationError(
            _('%(name)s должен быть положительным целым.'),
            code=f'invalid_{name}',
            params={'name': name},
        )


def validate_vertices(value):
    validate_positive_int(value, 'vertices')
    if value < ShorteningConstants.MIN_VERTICES or value % 2:
        raise ValidationError(
            _('vertices должен быть четным и не меньше %(minimum)s.'),
            code='invalid_vertices',
            params={'minimum': ShorteningConstants.MIN_VERTICES},
        )


def validate_tol(value):
    if not isinstance(value, (int, float)) or not (0.0 < value < 1.0):
        raise ValidationError(_('tol должен лежать в (0, 1).'), code='invalid_tol')


def validate_step(value):
    if not isinstance(value, (int, float)) or not (0.0 < value <= GeodesicConstants.MAX_STEP):
        raise ValidationError(
            _('step должен лежать в (0, %(maximum)s].'),
            code='invalid_step',
            params={'maximum': GeodesicConstants.MAX_STEP},
        )


def validate_master_seed(value):
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise ValidationError(_('seed должен быть неотрицательным целым.'), code='invalid_seed')


def load_config_file(path):
    """JSON-объект из файла --config"""
    path = Path(path)
    if not path.is_file():
        raise ValidationError(
            _('Файл конфигурации %(path)s не найден.'),
            code='config_not_found',
            params={'path': str(path)},
        )
    try:
        data = json.loads(path.read_text(encoding='utf-8'))
    except json.JSONDecodeError as exc:
        raise ValidationError(
            _('Файл конфигурации не является JSON: %(error)s'),
            code='config_not_json',
            params={'error': str(exc)},
        )
    if not isinstance(data, dict):
        raise ValidationError(_('Конфигурация должна быть JSON-объектом.'),
                              code='config_not_object')
    return data
