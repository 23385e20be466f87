"""
Django settings for the tubeflow project.

The project is a solver, not a website: no URL configuration, no middleware and
no static files. Django provides the settings layer, the management commands
that make up the CLI, the ORM used to archive runs, form validation for config
documents and the template engine that renders SVG plots.

Process-level values are read from the environment (or a .env file) through
python-decouple. Run-level values live in the per-run config document, see
shell/configfile.py.
"""

from pathlib import Path
from decouple import config
import dj_database_url

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# The key signs nothing in a CLI process, but Django refuses to start without one.
SECRET_KEY = config('SECRET_KEY', default='tubeflow-local-development-key')

DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    #apps,
    'kernels',
    'domain',
    'geometry',
    'flow',
    'verify',
    'shell',
]

MIDDLEWARE = []

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {},
    },
]


# Database
# Only used when a run asks for archiving (output.archive = true).

DATABASES = {
    'default': dj_database_url.parse(
        config('DATABASE_URL', default=f"sqlite:///{BASE_DIR / 'db.sqlite3'}")
    ),
}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


# Logging

TUBEFLOW_LOG_LEVEL = config('TUBEFLOW_LOG_LEVEL', default='INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'loggers': {
        name: {'handlers': ['console'], 'level': TUBEFLOW_LOG_LEVEL, 'propagate': False}
        for name in ('kernels', 'domain', 'geometry', 'flow', 'verify', 'shell')
    },
}


# Solver

# Worker cap for `tubeflow sweep`
TUBEFLOW_THREADS = config('TUBEFLOW_THREADS', default=1, cast=int)

# Default directory for OutputBundle files when a config does not name one
TUBEFLOW_OUTPUT_DIR = config('TUBEFLOW_OUTPUT_DIR', default='runs')

# Seed for `tubeflow check` when --seed is not given
TUBEFLOW_DEFAULT_SEED = config('TUBEFLOW_DEFAULT_SEED', default=20240601, cast=int)
