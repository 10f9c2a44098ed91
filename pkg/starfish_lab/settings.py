"""
Django settings for starfish_lab project.

Проект объединяет библиотеку вычислений на "морской звезде" (сфера с тремя
усечёнными гиперболическими каспами) и консольные команды для поиска
систолы и построения развертки.
"""

from pathlib import Path
from decouple import config
import os
import sys

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Application version
VERSION = "1.0.0"

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = config(
    "SECRET_KEY",
    default="django-insecure-starfish-lab-local-key-not-for-production",
)

DEBUG = config("DEBUG", default=True, cast=bool)

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    "django.contrib.contenttypes",
    "django.contrib.auth",
    "rest_framework",
    "starfish",
]

DATABASES = {
    "default": {
        "ENGINE": "django.db.backends.sqlite3",
        "NAME": BASE_DIR / "db.sqlite3",
    }
}

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

LANGUAGE_CODE = "ru"
TIME_ZONE = "UTC"
USE_I18N = True
USE_TZ = True

# Cache
if "test" in sys.argv or "pytest" in sys.argv[0]:
    # Используем локальный кэш для тестов
    CACHES = {
        "default": {
            "BACKEND": "django.core.cache.backends.locmem.LocMemCache",
            "LOCATION": "starfish-tests",
        }
    }
else:
    # Файловый кэш переживает перезапуск команд: свидетели систолы
    # из starfish_systole доступны для starfish_sweepout.
    CACHES = {
        "default": {
            "BACKEND": "django.core.cache.backends.filebased.FileBasedCache",
            "LOCATION": config(
                "STARFISH_CACHE_DIR", default=str(BASE_DIR / ".starfish_cache")
            ),
            "KEY_PREFIX": "starfish",
            "TIMEOUT": None,
        }
    }

# ============================================================================
# ПАРАМЕТРЫ ЗАПУСКА
# ============================================================================

# Ограничение числа воркеров для поиска по парам (слово, сид)
STARFISH_THREADS = config("STARFISH_THREADS", default=os.cpu_count() or 1, cast=int)

# Каталог для отчетов по умолчанию
STARFISH_OUTPUT_DIR = config("STARFISH_OUTPUT_DIR", default=str(BASE_DIR / "reports"))

# Значения RunConfig по умолчанию (перекрываются --config и флагами команд)
STARFISH = {
    "rho_star": config("STARFISH_RHO_STAR", default=-4.0, cast=float),
    "max_word_len": 4,
    "seeds_per_word": 32,
    "vertices": 256,
    "tol": 1e-8,
    "step": 1e-3,
    "master_seed": 0,
    "half_steps": 32,
    "smoothing_sweeps": 3,
    "max_sweeps": 100000,
}

# ============================================================================
# CELERY
# ============================================================================

CELERY_BROKER_URL = config("CELERY_BROKER_URL", default="memory://")
CELERY_RESULT_BACKEND = config("CELERY_RESULT_BACKEND", default="cache+memory://")
CELERY_ACCEPT_CONTENT = ["json"]
CELERY_TASK_SERIALIZER = "json"
CELERY_RESULT_SERIALIZER = "json"
CELERY_TIMEZONE = TIME_ZONE
CELERY_ENABLE_UTC = True
# Без брокера задачи выполняются в процессе команды
CELERY_TASK_ALWAYS_EAGER = config("CELERY_TASK_ALWAYS_EAGER", default=True, cast=bool)
CELERY_TASK_EAGER_PROPAGATES = True
CELERY_WORKER_CONCURRENCY = STARFISH_THREADS

# ============================================================================
# REST FRAMEWORK (используются только сериализаторы артефактов)
# ============================================================================

REST_FRAMEWORK = {
    "COERCE_DECIMAL_TO_STRING": False,
    "UNAUTHENTICATED_USER": None,
}

# Logging
LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{levelname} {asctime} {module} {process:d} {thread:d} {message}",
            "style": "{",
        },
        "simple": {
            "format": "{levelname} {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "level": "INFO" if not DEBUG else "DEBUG",
            "class": "logging.StreamHandler",
            "stream": "ext://sys.stderr",
            "formatter": "simple",
        },
    },
    "root": {
        "handlers": ["console"],
        "level": "WARNING",
    },
    "loggers": {
        "django": {
            "handlers": ["console"],
            "level": "INFO",
            "propagate": False,
        },
        "celery": {
            "handlers": ["console"],
            "level": "WARNING",
            "propagate": False,
        },
        "starfish": {
            "handlers": ["console"],
            "level": config("STARFISH_LOG_LEVEL", default="INFO"),
            "propagate": False,
        },
    },
}
