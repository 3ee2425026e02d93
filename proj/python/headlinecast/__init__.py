"""Direction-of-move text models over disclosure headlines.

The heavy lifting lives in the compiled ``_core`` extension; this package
adds only thin conveniences on top of it.
"""

from __future__ import annotations

import json as _json
import os as _os
import tempfile as _tempfile

from ._core import (
    SequenceAutoencoder,
    TextForest,
    abnormal_return,
    default_stopwords,
    label_direction,
    metrics,
    relative_improvement,
    round_half_up,
    run_pipeline_file,
    tfidf,
    tokenize,
    write_synthetic_corpus,
)

__version__ = "1.0.0"

__all__ = [
    "SequenceAutoencoder",
    "TextForest",
    "abnormal_return",
    "default_stopwords",
    "label_direction",
    "metrics",
    "relative_improvement",
    "round_half_up",
    "run_pipeline",
    "run_pipeline_file",
    "tfidf",
    "tokenize",
    "write_synthetic_corpus",
]


def run_pipeline(config):
    """Run the end-to-end pipeline.

    ``config`` is either a path to a JSON config file or a mapping with the
    same keys (``headlines``, ``prices``, ``market``, ``out_dir``, optional
    scalars, and optional ``forest``/``rae`` sections). Mappings are checked
    by the same strict parser as files: unknown keys are rejected.
    """
    if isinstance(config, (str, _os.PathLike)):
        return run_pipeline_file(_os.fspath(config))

    fd, path = _tempfile.mkstemp(prefix="headlinecast-config-", suffix=".json")
    try:
        with _os.fdopen(fd, "w", encoding="utf-8") as handle:
            _json.dump(dict(config), handle)
        return run_pipeline_file(path)
    finally:
        _os.unlink(path)
