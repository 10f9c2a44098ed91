"""
Утилиты для работы с кэшем свидетелей систолы
"""
import logging

from django.core.cache import cache

from .serializers import WitnessSerializer, load_loop

logger = logging.getLogger('starfish')

# Параметры, от которых зависит результат поиска
WITNESS_KEY_FIELDS = ('rho_star', 'max_word_len', 'seeds_per_word', 'vertices', 'tol', 'step',
                      'master_seed', 'max_sweeps')


def witness_cache_key(run_config):
    return f'starfish_witnesses:{run_config.cache_key(*WITNESS_KEY_FIELDS)}'


def store_witnesses(run_config, report):
    """Сохранить минимальную длину и петли-свидетели отчета"""
    if report.is_empty:
        return
    payload = {
        'min_length': report.min_length,
        'witnesses': WitnessSerializer(report.witnesses, many=True).data,
    }
    cache.set(witness_cache_key(run_config), payload, timeout=None)
    logger.debug(f'Свидетели сохранены в кэш: {len(report.witnesses)}')


def load_witnesses(run_config):
    """(min_length, [(word, loop), ...]) из кэша или None"""
    payload = cache.get(witness_cache_key(run_config))
    if not payload:
        return None
    witnesses = [(item['word'], load_loop(item['loop'])) for item in payload['witnesses']]
    return payload['min_length'], witnesses


def clear_witness_cache(run_config):
    cache.delete(witness_cache_key(run_config))
