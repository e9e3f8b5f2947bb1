import csv
import json
import logging
import os

import numpy as np

logger = logging.getLogger(__name__)


def _fmt(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    return repr(float(value))


def write_csv(path, header, rows):
    """Write rows with full float precision so reruns produce identical bytes."""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    logger.debug('wrote {0} rows to {1}'.format(len(rows), path))
    return path


def _parse(value):
    try:
        return float(value)
    except ValueError:
        return value


def read_csv(path):
    """Header and rows; numeric cells come back as floats, the rest as strings."""
    with open(path, newline='') as f:
        reader = csv.reader(f)
        header = next(reader)
        rows = [[_parse(v) for v in row] for row in reader if row]
    return header, rows


def write_json(path, obj):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w') as f:
        json.dump(obj, f, indent=2, sort_keys=True)
        f.write('\n')
    return path


def read_json(path):
    with open(path) as f:
        return json.load(f)
