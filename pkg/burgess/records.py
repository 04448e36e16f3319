"""Experiment configurations, canonical output and the result cache.

A run is described by an :class:`ExperimentConfig`: the command name and
every parameter, defaults included. Its digest is the SHA-256 of the
compact canonical JSON of ``(operation, params, version)``, which keys the
:class:`ResultCache`. A cache hit hands back the stored result, so the
rendered output is byte-identical to the first run.
"""

import csv
import hashlib
import io
import json
import logging
import os
import typing as t

from fractions import Fraction

import numpy as np

import burgess

from burgess.util import fraction_text

__all__ = ('ConfigError', 'ExperimentConfig', 'ResultCache', 'CACHE_ENV',
           'canonical', 'dumps', 'dumps_compact', 'load_config_file',
           'csv_text')

log = logging.getLogger(__name__)

#: Environment variable naming the cache directory.
CACHE_ENV = "BURGESS_CACHE_DIR"

Params = t.Dict[str, t.Any]


class ConfigError(ValueError):
    pass


def _default(value: t.Any) -> t.Any:
    if isinstance(value, Fraction):
        return fraction_text(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, (tuple, set, frozenset)):
        return list(value)
    raise TypeError("Can't serialize {!r}".format(value))


def dumps(data: t.Any) -> str:
    """Canonical, human readable JSON with a trailing newline."""
    return json.dumps(data, sort_keys=True, indent=2,
                      separators=(",", ": "), default=_default) + "\n"


def dumps_compact(data: t.Any) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"),
                      default=_default)


def canonical(data: t.Any) -> t.Any:
    """``data`` as it reads back from JSON: lists, strings and numbers."""
    return json.loads(dumps_compact(data))


def csv_text(header: t.Sequence[str], rows: t.Iterable[t.Sequence[t.Any]]
             ) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()


def load_config_file(path: str, command: str) -> Params:
    """Read a JSON config file.

    Top-level keys apply to every command; an object stored under the
    command's name overrides them.
    """
    with open(path) as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as exc:
            raise ConfigError("{}: {}".format(path, exc)) from exc
    if not isinstance(data, dict):
        raise ConfigError("{}: expected a JSON object".format(path))
    values = {k: v for k, v in data.items() if not isinstance(v, dict)}
    section = data.get(command, {})
    if not isinstance(section, dict):
        raise ConfigError("{}: section {!r} must be an object"
                          .format(path, command))
    values.update(section)
    return values


class ExperimentConfig:
    """Everything that determines the output of one command."""

    __slots__ = ('command', 'params')

    command: str
    params: Params

    def __init__(self, command: str, params: t.Mapping[str, t.Any]) -> None:
        object.__setattr__(self, 'command', command)
        object.__setattr__(self, 'params', canonical(dict(params)))

    @classmethod
    def merge(
        cls,
        command: str,
        defaults: t.Mapping[str, t.Any],
        file_values: t.Mapping[str, t.Any],
        flags: t.Mapping[str, t.Any],
    ) -> "ExperimentConfig":
        """Defaults, overridden by the file, overridden by given flags.

        File keys the command does not know are ignored.
        """
        params = dict(defaults)
        for key, value in file_values.items():
            if key in params:
                params[key] = value
            else:
                log.debug("Ignoring config key %r for %s", key, command)
        params.update((k, v) for k, v in flags.items() if v is not None)
        return cls(command, params)

    def __getitem__(self, key: str) -> t.Any:
        return self.params[key]

    def as_dict(self) -> t.Dict[str, t.Any]:
        return {'command': self.command, 'params': dict(self.params)}

    def dumps(self) -> str:
        return dumps(self.as_dict())

    @classmethod
    def loads(cls, text: str) -> "ExperimentConfig":
        data = json.loads(text)
        return cls(data['command'], data['params'])

    def digest(self, version: str = burgess.__version__) -> str:
        payload = {'operation': self.command, 'params': self.params,
                   'version': version}
        return hashlib.sha256(dumps_compact(payload).encode()).hexdigest()

    def __eq__(self, other: t.Any) -> t.Any:
        if self.__class__ is other.__class__:
            return self.as_dict() == other.as_dict()
        return NotImplemented

    def __repr__(self) -> str:
        return "ExperimentConfig({!r}, {!r})".format(self.command,
                                                     self.params)

    def __setattr__(self, key: str, value: object) -> None:
        raise TypeError("{} objects are immutable"
                        .format(self.__class__.__name__))


class ResultCache:
    """JSON records under ``root``, one file per config digest.

    A cache without ``root`` stores nothing.
    """

    def __init__(self, root: t.Optional[str] = None) -> None:
        self.root = root

    @classmethod
    def from_env(
        cls, root: t.Optional[str] = None, disabled: bool = False
    ) -> "ResultCache":
        if disabled:
            return cls(None)
        return cls(root or os.environ.get(CACHE_ENV) or None)

    @property
    def enabled(self) -> bool:
        return self.root is not None

    def path(self, config: ExperimentConfig) -> str:
        assert self.root is not None
        digest = config.digest()
        return os.path.join(self.root, digest[:2], digest + ".json")

    def get(self, config: ExperimentConfig) -> t.Optional[t.Dict[str, t.Any]]:
        """The stored result for ``config``, if any."""
        if not self.enabled:
            return None
        path = self.path(config)
        try:
            with open(path) as f:
                record = json.load(f)
        except FileNotFoundError:
            return None
        except json.JSONDecodeError:
            log.warning("Ignoring corrupt cache record %s", path)
            return None
        if record.get('config') != config.as_dict():
            log.warning("Digest collision at %s", path)
            return None
        log.info("Cache hit %s", path)
        return t.cast(t.Dict[str, t.Any], record['result'])

    def put(
        self, config: ExperimentConfig, result: t.Dict[str, t.Any]
    ) -> None:
        if not self.enabled:
            return
        params = config.params
        if params.get('samples') is not None and params.get('seed') is None:
            log.warning("Not caching a sampled result without a seed")
            return
        path = self.path(config)
        os.makedirs(os.path.dirname(path), exist_ok=True)
        record = {
            'digest': config.digest(),
            'version': burgess.__version__,
            'config': config.as_dict(),
            'result': result,
        }
        tmp = path + ".tmp"
        with open(tmp, 'w') as f:
            f.write(dumps(record))
        os.replace(tmp, path)
        log.debug("Stored %s", path)
