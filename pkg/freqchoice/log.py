import logging
import os
import sys
import time
from functools import wraps

import structlog

LOG_FORMAT = "%(message)s"
DEFAULT_STREAM = sys.stderr
ENV_LOG_LEVEL = "FREQCHOICE_LOG_LEVEL"


def clobber_root_handlers():
    [logging.root.removeHandler(handler) for handler in logging.root.handlers[:]]


class logme(object):
    """Log entry and exit of a long-running call, with elapsed seconds."""

    def __init__(self, level=logging.DEBUG, logger=None):
        self.level = level
        if not logger:
            self.logger = get_logger("freqchoice")
        else:
            self.logger = logger

    def __call__(self, func):
        @wraps(func)
        def wrapped(*args, **kwargs):
            self.logger.log(self.level, "Entering %s", func.__name__)
            started = time.perf_counter()
            response = func(*args, **kwargs)
            self.logger.log(
                self.level,
                "Exiting %s",
                func.__name__,
                elapsed_seconds=round(time.perf_counter() - started, 6),
            )
            return response

        return wrapped


def level_from_environment(default=logging.WARNING):
    """Resolve the log level from FREQCHOICE_LOG_LEVEL, if set."""
    value = os.environ.get(ENV_LOG_LEVEL)
    if not value:
        return default
    level = logging.getLevelName(value.upper())
    if not isinstance(level, int):
        return default
    return level


def bind_run_context(**kwargs):
    """Attach values (command, seed, ...) to every event logged afterwards."""
    structlog.contextvars.clear_contextvars()
    structlog.contextvars.bind_contextvars(**kwargs)


def _configure_logger(logger_factory=None, wrapper_class=None):

    if not logger_factory:
        logger_factory = structlog.stdlib.LoggerFactory()
    if not wrapper_class:
        wrapper_class = structlog.stdlib.BoundLogger

    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.contextvars.merge_contextvars,
            structlog.stdlib.add_log_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.PositionalArgumentsFormatter(),
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.processors.JSONRenderer(sort_keys=True),
        ],
        logger_factory=logger_factory,
        wrapper_class=wrapper_class,
        cache_logger_on_first_use=True,
    )


def setup_root_logger(level=logging.DEBUG, stream=DEFAULT_STREAM, logger_factory=None):
    _configure_logger(logger_factory=logger_factory)
    clobber_root_handlers()
    root_logger = logging.root
    stream_handler = logging.StreamHandler(stream)
    stream_handler.setLevel(level)
    stream_handler.setFormatter(logging.Formatter(fmt=LOG_FORMAT))
    root_logger.addHandler(stream_handler)
    root_logger.setLevel(level)


def get_logger(name=None, level=None, logger_factory=None, wrapper_class=None):
    """Configure structlog and return a bound logger.

    ``level`` sets the level of the underlying stdlib logger; without it the
    logger inherits from the root logger set up by :func:`setup_root_logger`.
    """
    _configure_logger(logger_factory=logger_factory, wrapper_class=wrapper_class)
    log = structlog.get_logger(name)
    if level:
        log.setLevel(level)
    return log
