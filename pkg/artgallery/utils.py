# Copyright 2024 The artgallery Authors. All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

# Imports
import os
import json
import math
import logging
import functools
from fractions import Fraction
from typing import Any, Optional, Union


LOG_LEVELS = {
    "debug": logging.DEBUG,
    "info": logging.INFO,
    "warning": logging.WARNING,
    "error": logging.ERROR
}


def configure_logging(level: Optional[str] = None) -> int:
    """
    Configure the root logger from `level` or the GALLERY_LOG environment variable
    (debug|info|warning|error, default warning).

    Returns:
        int: The logging level that was set
    """
    name = (level or os.environ.get("GALLERY_LOG", "warning")).lower()
    if name not in LOG_LEVELS:
        raise ValueError(f"unknown log level '{name}', expected one of {list(LOG_LEVELS)}")
    logging.basicConfig(format="%(asctime)s %(levelname)s %(message)s")
    logging.getLogger().setLevel(LOG_LEVELS[name])
    return LOG_LEVELS[name]


def progress_disabled() -> bool:
    """tqdm bars are only shown at log level info or below."""
    return logging.getLogger().getEffectiveLevel() > logging.INFO


def banner(message: str):
    logging.info("#"*50 + "\n" + message + "\n" + "#"*50)


# Handle deprecated arguments and naming (thanks to https://stackoverflow.com/a/74564394)
def re_arg(kwarg_map):
    def decorator(func):
        @functools.wraps(func)
        def wrapped(*args, **kwargs):
            new_kwargs = {}
            for k, v in kwargs.items():
                if k in kwarg_map:
                    logging.warning(f"DEPRECATION: keyword argument '{k}' is no longer valid and "
                                    f"will be removed in future releases. Use '{kwarg_map[k]}' instead.")
                new_kwargs[kwarg_map.get(k, k)] = v
            return func(*args, **new_kwargs)
        return wrapped
    return decorator


# Number formatting for JSON outputs
def to_json_number(v: Union[Fraction, float, int, None]) -> Any:
    """Integers stay integers, infinities become None, other values become floats."""
    if v is None:
        return None
    if isinstance(v, float) and math.isinf(v):
        return None
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else float(v)
    if isinstance(v, float) and v.is_integer():
        return int(v)
    return v


def format_rational(v: Union[Fraction, float, int]) -> str:
    if isinstance(v, Fraction) and v.denominator == 1:
        return str(v.numerator)
    return str(v)


def write_json(data: Any, path: str):
    directory = os.path.dirname(path)
    if directory and not os.path.exists(directory):
        os.makedirs(directory)
    with open(path, "w") as f:
        json.dump(data, f, indent=2)


def read_json(path: str) -> Any:
    with open(path, "r") as f:
        return json.load(f)
