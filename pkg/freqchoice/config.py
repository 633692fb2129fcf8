"""Configuration documents, estimation options and environment lookups.

Documents (model specs, initial parameters, simulation configs) may be JSON
or YAML. Text that starts with ``{`` is parsed as JSON; anything else goes
through ``yaml.safe_load``. JSON is tried first because PyYAML reads
exponent floats such as ``1e8`` as strings.
"""
import dataclasses
import json
import os

import yaml

from freqchoice.errors import ConfigError

ENV_THREADS = "FREQCHOICE_THREADS"


def parse_document(source):
    """Parse JSON or YAML text into Python objects."""
    source = source.strip()
    if not source:
        raise ConfigError("empty document")
    try:
        if source[0] == "{":
            return json.loads(source)
        return yaml.safe_load(source)
    except (ValueError, yaml.YAMLError) as exc:
        raise ConfigError(f"malformed document: {exc}")


def load_document(path):
    """Read a JSON/YAML file from disk."""
    config_path = os.path.abspath(path)
    try:
        with open(config_path, "r", encoding="utf-8") as data:
            return parse_document(data.read())
    except IOError as exc:
        raise ConfigError(str(exc))


def threads_from_environment(environ=None):
    """Worker cap from FREQCHOICE_THREADS; absent means single-threaded."""
    environ = os.environ if environ is None else environ
    value = environ.get(ENV_THREADS)
    if value is None or value.strip() == "":
        return 1
    try:
        threads = int(value)
    except ValueError:
        raise ConfigError(f'{ENV_THREADS} must be an integer, got "{value}"')
    if threads < 1:
        raise ConfigError(f"{ENV_THREADS} must be at least 1, got {threads}")
    return threads


@dataclasses.dataclass(frozen=True)
class EstimationOptions:
    max_iter: int = 500
    starts: int = 1
    seed: int = 0
    gradient_step: float = 1e-7
    hessian_step: float = 1e-4
    gradient_tol: float = 1e-6
    step_tol: float = 1e-10
    divergence_bound: float = 50.0
    start_jitter: float = 0.5
    separation_tol: float = 1e-6
    compute_se: bool = True
    chunk_size: int = 4096
    threads: int = dataclasses.field(default_factory=threads_from_environment)

    def __post_init__(self):
        if self.max_iter < 1:
            raise ConfigError("max_iter must be at least 1")
        if self.starts < 1:
            raise ConfigError("starts must be at least 1")
        if self.threads < 1:
            raise ConfigError("threads must be at least 1")
        if self.chunk_size < 1:
            raise ConfigError("chunk_size must be at least 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_dict(self):
        return dataclasses.asdict(self)
