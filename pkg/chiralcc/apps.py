"""Django app configuration for Chiral Color Codes."""

from django.apps import AppConfig


class ChiralccConfig(AppConfig):
    """Configuration for the Chiral Color Codes application."""

    default_auto_field = 'django.db.models.BigAutoField'
    name = 'chiralcc'
    verbose_name = 'Chiral Color Codes'

    def ready(self):
        """Validate the CHIRALCC settings at startup."""
        from . import conf

        conf.get_thread_count()
        conf.get_block_size()
        conf.get_setting('DISTANCE_WEIGHT_CAP')
