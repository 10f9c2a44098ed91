import logging
import multiprocessing
from concurrent.futures import ProcessPoolExecutor

from celery import group, shared_task
from django.conf import settings

from .atlas import assemble
from .cap_profile import build_profile
from .serializers import RunRecordSerializer, load_loop
from .shortening import RunRecord, run_seed, systole_search

logger = logging.getLogger('starfish')


def record_to_payload(record):
    """RunRecord -> JSON-совместимый словарь (результат задачи)"""
    payload = dict(RunRecordSerializer(record).data)
    payload['loop'] = record.loop.to_dict() if record.loop is not None else None
    return payload


def payload_to_record(payload):
    payload = dict(payload)
    loop = payload.pop('loop', None)
    return RunRecord(loop=load_loop(loop) if loop else None, **payload)


@shared_task(bind=True)
def shorten_seed(self, rho_star, word, seed, vertices, tol, step, master_seed, max_sweeps):
    """Один запуск укорачивания для пары (слово, сид)"""
    atlas = assemble(build_profile(rho_star))
    record = run_seed(atlas, word, seed, vertices, tol, step, master_seed, max_sweeps)
    return record_to_payload(record)


def eager_pool_size(job_count):
    """Число процессов для локального выполнения: не больше STARFISH_THREADS и числа задач"""
    return max(1, min(int(settings.STARFISH_THREADS), job_count))


def _run_eager(args):
    return shorten_seed.apply(args=args).get()


def run_eager(arguments):
    """
    Выполнение задач shorten_seed в пуле процессов без брокера.

    Порядок результатов совпадает с порядком аргументов.
    """
    workers = eager_pool_size(len(arguments))
    if workers == 1 or 'fork' not in multiprocessing.get_all_start_methods():
        return [_run_eager(args) for args in arguments]
    logger.info(f'Локальный пул из {workers} процессов')
    context = multiprocessing.get_context('fork')
    with ProcessPoolExecutor(max_workers=workers, mp_context=context) as pool:
        return list(pool.map(_run_eager, arguments))


def dispatch_systole_search(atlas, run_config, words):
    """
    Поиск систолы с раздачей пар (слово, сид) задачам shorten_seed.

    Без брокера (CELERY_TASK_ALWAYS_EAGER) задачи выполняются пулом из
    STARFISH_THREADS процессов, иначе уходят воркерам группой.
    """
    def executor(jobs):
        logger.info(f'Запуск {len(jobs)} задач укорачивания')
        arguments = [
            (atlas.rho_star, word, seed, run_config.vertices, run_config.tol,
             run_config.step, run_config.master_seed, run_config.max_sweeps)
            for word, seed in jobs
        ]
        if settings.CELERY_TASK_ALWAYS_EAGER:
            results = run_eager(arguments)
        else:
            results = group(shorten_seed.s(*args) for args in arguments).apply_async().get()
        return [payload_to_record(payload) for payload in results]

    return systole_search(
        atlas, words, run_config.seeds_per_word, run_config.tol,
        vertices=run_config.vertices, step=run_config.step,
        master_seed=run_config.master_seed, max_sweeps=run_config.max_sweeps,
        executor=executor,
    )
