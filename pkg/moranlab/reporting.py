#!/usr/bin/env python3
"""
Report rendering - JSON and CSV bodies that embed the resolved run configuration
"""

import csv
import io
import json
import logging
import math
from typing import Any, Dict, List, Sequence

import numpy as np

logger = logging.getLogger(__name__)


def to_jsonable(value: Any) -> Any:
    """Convert numpy scalars/arrays and non-finite floats into plain JSON values."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return 'nan' if math.isnan(value) else ('inf' if value > 0 else '-inf')
    return value


def render_json(config: Dict[str, Any], result: Dict[str, Any]) -> str:
    """Byte-stable JSON body {"config": ..., "result": ...}."""
    payload = {'config': to_jsonable(config), 'result': to_jsonable(result)}
    return json.dumps(payload, indent=2, sort_keys=True) + '\n'


def render_csv(config: Dict[str, Any], header: Sequence[str], rows: List[List[Any]]) -> str:
    """CSV body starting with a '# config: <compact JSON>' line."""
    buffer = io.StringIO()
    buffer.write('# config: ' + json.dumps(to_jsonable(config), sort_keys=True, separators=(',', ':')) + '\n')
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(list(header))
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in to_jsonable(row)])
    return buffer.getvalue()


def read_config_echo(text: str) -> Dict[str, Any]:
    """Recover the embedded config from a JSON or CSV report body."""
    if text.startswith('# config: '):
        first_line = text.split('\n', 1)[0]
        return json.loads(first_line[len('# config: '):])
    return json.loads(text)['config']
