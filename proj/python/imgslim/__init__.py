# Copyright 2026 The imgslim Authors
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
"""Python interface to the imgslim native core."""

import json
import os

from ._imgslim import (
    AnalysisError,
    ConsistencyError,
    Error,
    FormatError,
    IntegrityError,
    InvalidArgument,
    NotFoundError,
    SecurityError,
    __version__,
    default_search_dirs,
    default_sinks,
    resolve_chain,
    tokenize_shell,
)
from . import _imgslim

__all__ = [
    "AnalysisError",
    "ConsistencyError",
    "Error",
    "FormatError",
    "IntegrityError",
    "InvalidArgument",
    "NotFoundError",
    "SecurityError",
    "analyze_project",
    "analyze_source",
    "default_search_dirs",
    "default_sinks",
    "inspect",
    "model_listing",
    "resolve_chain",
    "slim",
    "tokenize_shell",
]


def analyze_project(project_dir, sinks=None):
    """Analyze a project directory; returns the analysis report as a dict."""
    return json.loads(_imgslim.analyze_project_json(os.fspath(project_dir), sinks))


def analyze_source(source, file="<source>"):
    """Exec-call data-flow results for one script source."""
    return json.loads(_imgslim.analyze_source_json(source, file))


def slim(input, output, tokens=(), policy="warn", layout="oci", gzip=False,
         search_dirs=None):
    """Slim an image archive; `tokens` is an iterable of CTL tokens or CTL text."""
    ctl_text = tokens if isinstance(tokens, str) else "".join(t + "\n" for t in tokens)
    return json.loads(_imgslim.slim_json(os.fspath(input), os.fspath(output), ctl_text,
                                         policy, layout, gzip, search_dirs))


def inspect(path):
    """Metadata, size and command count of an image archive."""
    return json.loads(_imgslim.inspect_json(os.fspath(path)))


def model_listing(listing, search_dirs=None):
    """Command model of a recorded directory listing."""
    return json.loads(_imgslim.model_listing_json(listing, search_dirs))
