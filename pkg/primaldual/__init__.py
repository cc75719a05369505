"""Preconditioned primal-dual gradient methods for nonconvex composite problems."""
import logging
import os

LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'


def configure(config_name=None):
    """Pick a configuration by name and set up logging for one run."""
    if config_name is None:
        config_name = os.environ.get('PRIMALDUAL_ENV', 'development')

    from config import config
    settings = config[config_name]()

    root = logging.getLogger('primaldual')
    root.setLevel(settings.LOG_LEVEL)
    if not root.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        root.addHandler(handler)

    return settings
