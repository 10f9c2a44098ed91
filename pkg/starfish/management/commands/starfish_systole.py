from django.core.management.base import CommandError

from starfish.cache_utils import store_witnesses
from starfish.hyperbolic_group import enumerate_conjugacy_classes, figure_eight_length
from starfish.management.base import StarfishCommand
from starfish.plots import render_witnesses
from starfish.reporting import sibling
from starfish.serializers import SystoleArtifactSerializer
from starfish.shortening import RunOutcome
from starfish.tasks import dispatch_systole_search


def search_words(run_config):
    """Канонические слова всех классов до max_word_len"""
    return [word.compact for word, _ in enumerate_conjugacy_classes(run_config.max_word_len)]


def systole_artifact(report, run_config):
    return SystoleArtifactSerializer({
        'rho_star': report.rho_star,
        'words': report.words,
        'config': run_config.to_dict(),
        'min_length': report.min_length,
        'figure_eight_length': figure_eight_length(),
        'witnesses': report.witnesses,
        'simple_geodesics': sorted({record.word for record in report.simple_geodesics}),
        'records': report.records,
    }).data


class Command(StarfishCommand):
    """
    Команда для поиска систолы укорачиванием Биркгофа.

    Для каждой пары (слово, сид) запускается задача shorten_seed; итог
    сводится в отчет со свидетелями, рисунок и кэш для starfish_sweepout.
    """

    help = 'Поиск кратчайшей замкнутой геодезической на сфере с шапочками'

    def run(self, run_config, **options):
        atlas = self.atlas(run_config)
        report = dispatch_systole_search(atlas, run_config, search_words(run_config))
        path = run_config.output_path('systole.json')
        self.reporter.write_json(path, systole_artifact(report, run_config))
        render_witnesses(atlas, report.witnesses, run_config.svg or sibling(path, '.svg'))

        failed = [record for record in report.records
                  if record.outcome in (RunOutcome.NON_CONVERGENCE, RunOutcome.SHOOTING_FAILED)]
        for record in failed:
            self.stderr.write(f'{record.word} сид {record.seed}: {record.outcome} {record.message}')
        if report.is_empty:
            raise CommandError('Ни один запуск не сошелся к замкнутой геодезической')

        store_witnesses(run_config, report)
        self.reporter.summary(f'min: {report.min_length:.10f}')
        for record in report.witnesses:
            self.reporter.summary(
                f'{record.word}: length {record.length:.10f}, '
                f'intersections {record.intersections}, thin_avoidance {record.thin_avoidance}'
            )
        self.reporter.summary(f'runs: {len(report.records)}, failed: {len(failed)}')
