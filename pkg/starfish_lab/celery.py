import os
from celery import Celery

# Модуль настроек Django по умолчанию для программы 'celery'.
os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'starfish_lab.settings')

app = Celery('starfish_lab')

# Все ключи CELERY_* берутся из настроек Django.
app.config_from_object('django.conf:settings', namespace='CELERY')

# Задачи ищутся во всех зарегистрированных приложениях.
app.autodiscover_tasks()
