# Приложение Celery загружается вместе с Django,
# чтобы shared_task использовали именно его.
from .celery import app as celery_app

__all__ = ('celery_app',)
