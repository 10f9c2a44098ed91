from django.apps import AppConfig


class StarfishConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'starfish'
    verbose_name = 'Starfish: систола и развертка'
