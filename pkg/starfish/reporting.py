"""
Запись артефактов команд.

Все файлы пишутся через один Reporter: JSON с отсортированными ключами,
CSV с фиксированным порядком столбцов, без меток времени.
"""
import csv
import json
import logging
from pathlib import Path

from rest_framework.utils.encoders import JSONEncoder

logger = logging.getLogger('starfish')


class Reporter:
    def __init__(self, stdout=None):
        self.stdout = stdout
        self.written = []

    @staticmethod
    def dumps(data):
        return json.dumps(data, cls=JSONEncoder, sort_keys=True, indent=2, ensure_ascii=False) + '\n'

    def _prepare(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def write_json(self, path, data):
        path = self._prepare(path)
        path.write_text(self.dumps(data), encoding='utf-8')
        self.written.append(path)
        logger.info(f'JSON записан: {path}')
        return path

    def write_csv(self, path, rows, columns):
        path = self._prepare(path)
        with path.open('w', encoding='utf-8', newline='') as handle:
            writer = csv.DictWriter(handle, fieldnames=columns, extrasaction='ignore',
                                    lineterminator='\n')
            writer.writeheader()
            for row in rows:
                writer.writerow({column: _csv_value(row.get(column)) for column in columns})
        self.written.append(path)
        logger.info(f'CSV записан: {path}')
        return path

    def summary(self, line):
        if self.stdout is not None:
            self.stdout.write(line)


def _csv_value(value):
    if value is None:
        return ''
    if isinstance(value, float):
        return repr(value)
    return value


def sibling(path, suffix):
    """Путь рядом с основным артефактом с другим расширением"""
    return Path(path).with_suffix(suffix)
