from starfish.constants import GroupConstants
from starfish.hyperbolic_group import (
    enumerate_conjugacy_classes,
    systole_by_words,
    word_to_matrix,
)
from starfish.management.base import StarfishCommand
from starfish.reporting import sibling
from starfish.serializers import WordsArtifactSerializer

CSV_COLUMNS = ['word', 'letters', 'kind', 'trace', 'length', 'is_minimal']


class Command(StarfishCommand):
    """
    Команда для перебора классов сопряженности слов в Γ(2).

    Печатает таблицу классов с типом и длиной сдвига, минимум выделяется.
    JSON и CSV содержат одни и те же строки в одном порядке.
    """

    help = 'Таблица классов сопряженности до заданной длины слова и систола по словам'

    def run(self, run_config, **options):
        classes = enumerate_conjugacy_classes(run_config.max_word_len)
        minimum, witnesses = (None, [])
        if run_config.max_word_len >= 2:
            minimum, witnesses = systole_by_words(run_config.max_word_len)
        minimal = {word.compact for word in witnesses}
        rows = []
        for word, info in classes:
            rows.append({
                'word': word.compact,
                'letters': len(word),
                'kind': info.kind,
                'trace': abs(word_to_matrix(word).trace),
                'length': info.translation_length if info.is_hyperbolic else None,
                'is_minimal': word.compact in minimal,
            })
        artifact = WordsArtifactSerializer({
            'max_word_len': run_config.max_word_len,
            'min_length': minimum,
            'witnesses': sorted(minimal),
            'rows': rows,
        }).data
        path = run_config.output_path('words.json')
        self.reporter.write_json(path, artifact)
        self.reporter.write_csv(sibling(path, '.csv'), artifact['rows'], CSV_COLUMNS)

        for row in artifact['rows']:
            length = '-' if row['length'] is None else f"{row['length']:.10f}"
            line = f"{row['word']:<{GroupConstants.MAX_WORD_LEN}} {row['kind']:<10} " \
                   f"{row['trace']:>10.1f} {length}"
            self.reporter.summary(self.style.SUCCESS(line) if row['is_minimal'] else line)
        if minimum is not None:
            self.reporter.summary(f'min: {minimum:.10f} ({", ".join(sorted(minimal))})')
