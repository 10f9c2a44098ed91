import os
import tempfile

import django

# Настройка Django для pytest; отчеты тестов пишутся во временный каталог
os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'starfish_lab.settings')
os.environ.setdefault('STARFISH_OUTPUT_DIR', tempfile.mkdtemp(prefix='starfish-reports-'))
os.environ.setdefault('MPLBACKEND', 'Agg')
django.setup()
