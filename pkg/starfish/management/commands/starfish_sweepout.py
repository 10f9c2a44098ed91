import logging

from starfish.cache_utils import load_witnesses, store_witnesses
from starfish.exceptions import PreconditionError
from starfish.intersections import self_intersections
from starfish.management.base import StarfishCommand
from starfish.management.commands.starfish_systole import search_words
from starfish.plots import render_filmstrip
from starfish.reporting import sibling
from starfish.serializers import SweepoutArtifactSerializer, sweepout_payload
from starfish.sweepout import build_sweepout
from starfish.tasks import dispatch_systole_search

logger = logging.getLogger('starfish')


class Command(StarfishCommand):
    """
    Команда для построения развертки по фигуре-восьмерке.

    Берет свидетеля систолы из кэша (или запускает поиск), строит семейство
    циклов и печатает верхнюю оценку ширины и ее отношение к систоле.
    """

    help = 'Развертка сферы через свидетеля систолы и оценка ширины сверху'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--half-steps', type=int, help='Число кадров на половину развертки')

    def witness(self, atlas, run_config):
        cached = load_witnesses(run_config)
        if cached is None:
            logger.info('Свидетели не найдены в кэше, запускается поиск систолы')
            report = dispatch_systole_search(atlas, run_config, search_words(run_config))
            if report.is_empty:
                raise PreconditionError('Поиск систолы не нашел свидетелей')
            store_witnesses(run_config, report)
            cached = report.min_length, [(record.word, record.loop) for record in report.witnesses]
        systole, witnesses = cached
        for word, loop in witnesses:
            if self_intersections(atlas, loop) == 1:
                return systole, word, loop
        raise PreconditionError('Среди свидетелей нет фигуры-восьмерки')

    def run(self, run_config, **options):
        atlas = self.atlas(run_config)
        systole, word, loop = self.witness(atlas, run_config)
        family = build_sweepout(atlas, loop, run_config.half_steps,
                                run_config.smoothing_sweeps, run_config.step,
                                coverage_seed=run_config.master_seed)
        payload = sweepout_payload(atlas, family, systole)
        path = run_config.output_path('sweepout.json')
        self.reporter.write_json(path, SweepoutArtifactSerializer(payload).data)
        render_filmstrip(family, run_config.svg or sibling(path, '.svg'))

        self.reporter.summary(f'witness: {word}')
        self.reporter.summary(f'width_upper_bound: {payload["width_upper_bound"]:.10f}')
        self.reporter.summary(f'ratio: {payload["ratio"]:.6f}')
        self.reporter.summary(f'frames: {len(family.times)}')
