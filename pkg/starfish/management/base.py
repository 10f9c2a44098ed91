"""
Общая основа команд starfish_*: флаги RunConfig и коды выхода.
"""
import logging

from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from starfish.config import build_atlas, build_config
from starfish.constants import ReportConstants
from starfish.exceptions import (
    AdmissibilityError,
    BudgetExceededError,
    ConstructionError,
    PreconditionError,
    StarfishError,
)
from starfish.reporting import Reporter

logger = logging.getLogger('starfish')


class StarfishCommand(BaseCommand):
    """Базовая команда: разбор флагов, сборка RunConfig, отображение ошибок в коды выхода"""

    def add_arguments(self, parser):
        parser.add_argument('--rho-star', type=float, help='Уровень усечения rho* (по умолчанию -4)')
        parser.add_argument('--max-word-len', type=int, help='Максимальная длина слова')
        parser.add_argument('--seeds', type=int, help='Число сидов на слово')
        parser.add_argument('--vertices', type=int, help='Число вершин ломаной')
        parser.add_argument('--tol', type=float, help='Допуск сходимости укорачивания')
        parser.add_argument('--step', type=float, help='Шаг интегрирования RK4')
        parser.add_argument('--seed', type=int, help='Главный сид')
        parser.add_argument('--out', help='Путь JSON-отчета')
        parser.add_argument('--svg', help='Путь SVG-рисунка')
        parser.add_argument('--config', help='JSON-файл с параметрами запуска')

    def handle(self, *args, **options):
        try:
            run_config = build_config(options, options.get('config'))
            self.reporter = Reporter(self.stdout)
            return self.run(run_config, **options)
        except ValidationError as exc:
            code = getattr(exc, 'code', None)
            returncode = ReportConstants.EXIT_BUDGET if code == 'budget_exceeded' \
                else ReportConstants.EXIT_INADMISSIBLE
            raise CommandError('; '.join(exc.messages), returncode=returncode)
        except AdmissibilityError as exc:
            raise CommandError(str(exc), returncode=ReportConstants.EXIT_INADMISSIBLE)
        except BudgetExceededError as exc:
            raise CommandError(str(exc), returncode=ReportConstants.EXIT_BUDGET)
        except (ConstructionError, PreconditionError) as exc:
            self.dump_failure(exc)
            raise CommandError(str(exc), returncode=ReportConstants.EXIT_CONSTRUCTION)
        except StarfishError as exc:
            logger.error(f'{exc.code}: {exc}')
            raise CommandError(str(exc))

    def run(self, run_config, **options):
        raise NotImplementedError

    def atlas(self, run_config):
        return build_atlas(run_config)

    def dump_failure(self, exc):
        """Диагностика сбоя построения в stderr"""
        frame = exc.details.get('frame')
        if frame is not None:
            self.stderr.write(Reporter.dumps({'code': exc.code, 'frame': frame}))
