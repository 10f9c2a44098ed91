"""
Параметры запуска команд.

Порядок слияния: STARFISH из настроек < JSON-файл --config < флаги команды.
"""
import logging
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from django.conf import settings
from django.core.exceptions import ValidationError

from . import validators
from .atlas import assemble
from .cap_profile import build_profile

logger = logging.getLogger('starfish')


@dataclass(frozen=True)
class RunConfig:
    rho_star: float = -4.0
    max_word_len: int = 4
    seeds_per_word: int = 32
    vertices: int = 256
    tol: float = 1e-8
    step: float = 1e-3
    master_seed: int = 0
    half_steps: int = 32
    smoothing_sweeps: int = 3
    max_sweeps: int = 100000
    out: str = ''
    svg: str = ''

    def validate(self):
        validators.validate_rho_star(self.rho_star)
        validators.validate_max_word_len(self.max_word_len)
        validators.validate_positive_int(self.seeds_per_word, 'seeds_per_word')
        validators.validate_vertices(self.vertices)
        validators.validate_tol(self.tol)
        validators.validate_step(self.step)
        validators.validate_master_seed(self.master_seed)
        validators.validate_positive_int(self.half_steps, 'half_steps')
        validators.validate_positive_int(self.smoothing_sweeps, 'smoothing_sweeps')
        validators.validate_positive_int(self.max_sweeps, 'max_sweeps')
        return self

    def output_path(self, default_name):
        if self.out:
            return Path(self.out)
        return Path(settings.STARFISH_OUTPUT_DIR) / default_name

    def to_dict(self):
        data = asdict(self)
        data.pop('out')
        data.pop('svg')
        return data

    def cache_key(self, *names):
        """Ключ кэша по параметрам, влияющим на результат"""
        data = self.to_dict()
        parts = [f'{name}={data[name]!r}' for name in names]
        return ':'.join(parts)


# Флаги команд -> поля RunConfig
OPTION_FIELDS = {
    'rho_star': 'rho_star',
    'max_word_len': 'max_word_len',
    'seeds': 'seeds_per_word',
    'vertices': 'vertices',
    'tol': 'tol',
    'step': 'step',
    'seed': 'master_seed',
    'half_steps': 'half_steps',
    'out': 'out',
    'svg': 'svg',
}


def _coerce(name, value):
    kind = {field.name: field.type for field in fields(RunConfig)}[name]
    if kind is int:
        if isinstance(value, float) and value.is_integer():
            return int(value)
        return value
    if kind is float:
        return float(value) if isinstance(value, int) and not isinstance(value, bool) else value
    return value


def build_config(options=None, config_path=None):
    """RunConfig из настроек, файла и флагов команды, с проверкой"""
    known = {field.name for field in fields(RunConfig)}
    values = {}
    for name, value in getattr(settings, 'STARFISH', {}).items():
        if name in known:
            values[name] = value
    if config_path:
        data = validators.load_config_file(config_path)
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValidationError(
                'Неизвестные ключи конфигурации: %(keys)s',
                code='config_unknown_keys',
                params={'keys': ', '.join(unknown)},
            )
        values.update(data)
    for option, name in OPTION_FIELDS.items():
        value = (options or {}).get(option)
        if value is not None:
            values[name] = value
    values = {name: _coerce(name, value) for name, value in values.items()}
    run_config = RunConfig(**values).validate()
    logger.debug(f'Конфигурация запуска: {run_config.to_dict()}')
    return run_config


def build_atlas(run_config):
    return assemble(build_profile(run_config.rho_star))
