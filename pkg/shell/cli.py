"""Console entry point: `tubeflow <subcommand> ...` runs `manage.py tubeflow <subcommand> ...`."""
import os
import sys


def main(argv=None):
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'tubeflow_site.settings')
    from django.core.management import execute_from_command_line

    argv = sys.argv[1:] if argv is None else list(argv)
    execute_from_command_line(['tubeflow', 'tubeflow', *argv])


if __name__ == '__main__':
    main()
