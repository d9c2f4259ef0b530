from ._config import *
from ._commands import *
from ._main import *

__all__ = ['GlobalConfig',
           'PRESETS',
           'resolve_config',
           'load_config_file',
           'run',
           'main',
           'build_parser',
           'EXIT_OK',
           'EXIT_USAGE',
           'EXIT_DATA',
           'EXIT_NUMERIC']
