"""
TOML run file loading with field-level error reporting
"""
import json
import logging
import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, Optional, Union

import pydantic

from ..exceptions import ParseError, ValidationError
from .models import RunConfig

logger = logging.getLogger(__name__)

LINE_PATTERN = re.compile(r"line (\d+)")
NAMED_MESSAGE = re.compile(r"^([A-Za-z_][\w.]*): (.*)$", re.DOTALL)
VALUE_ERROR_PREFIX = "Value error, "


def _field_error(error: Dict[str, Any]) -> ValidationError:
    """First pydantic error as a dotted field path and a plain message"""
    location = [str(part) for part in error.get('loc', ())]
    message = error.get('msg', 'invalid value')
    if message.startswith(VALUE_ERROR_PREFIX):
        message = message[len(VALUE_ERROR_PREFIX):]

    named = NAMED_MESSAGE.match(message)
    if named:
        name, rest = named.groups()
        location = name.split('.') if '.' in name else location + [name]
        message = rest

    return ValidationError('.'.join(location) or '<root>', message)


def parse_config(data: Dict[str, Any]) -> RunConfig:
    """Validate an already parsed mapping"""
    try:
        return RunConfig.model_validate(data)
    except pydantic.ValidationError as e:
        errors = e.errors()
        first = _field_error(errors[0])
        if len(errors) > 1:
            logger.debug(f"{len(errors) - 1} further config errors: {errors[1:]}")
        raise first from e


def loads_config(text: str) -> RunConfig:
    """Parse and validate TOML text"""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        match = LINE_PATTERN.search(str(e))
        raise ParseError(int(match.group(1)) if match else None, str(e)) from e
    return parse_config(data)


def load_config(path: Union[str, Path]) -> RunConfig:
    """
    Load a run configuration file

    Raises:
        OSError: file missing or unreadable
        ParseError: not valid TOML
        ValidationError: a value is rejected; field names the dotted path
    """
    path = Path(path)
    config = loads_config(path.read_text(encoding="utf-8"))
    logger.info(f"Loaded run configuration from {path}")
    return config


def dump_config(config: RunConfig, indent: Optional[int] = 2) -> str:
    """JSON rendering of the resolved configuration for run logs"""
    return json.dumps(config.model_dump(mode="json"), indent=indent, sort_keys=True)
