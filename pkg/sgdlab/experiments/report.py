import logging
import math
import os
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from sgdlab import __version__
from sgdlab.utils.errors import SgdLabError
from sgdlab.utils.io_utils import write_csv, write_json
from sgdlab.utils.sgdlab_enums import ExperimentId, ReportFormat

logger = logging.getLogger(__name__)


class ReportError(SgdLabError, ValueError):
    def __init__(self, msg, path=None):
        super().__init__(msg)
        self.path = path


def _plain(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else repr(value)
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_plain(v) for v in value]
    return value


@dataclass
class Report:
    """
    Outcome of one experiment run.

    ``metrics`` are the named scalars of the run, ``flags`` the pass/fail
    outcome of each acceptance check and ``tables`` the plot-ready CSVs
    (name -> (header, rows)) written by :func:`emit_report`.
    """
    experiment: ExperimentId
    metrics: Dict[str, float]
    flags: Dict[str, bool] = field(default_factory=dict)
    tables: Dict[str, Tuple[List[str], list]] = field(default_factory=dict, repr=False)
    artifacts: List[str] = field(default_factory=list)
    provenance: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        self.experiment = ExperimentId(self.experiment)
        if not self.metrics:
            msg = 'a {0} report needs at least one metric'.format(self.experiment.name)
            logger.error(msg)
            raise ReportError(msg)

    @property
    def passed(self):
        return all(bool(v) for v in self.flags.values())

    def to_dict(self):
        return {
            'experiment': self.experiment.name,
            'passed': self.passed,
            'metrics': _plain(self.metrics),
            'flags': _plain(self.flags),
            'artifacts': list(self.artifacts),
            'provenance': _plain(self.provenance),
        }


def provenance(config, timer=None, stages=()):
    """Config hash, seed, code version and per-stage wall times."""
    out = {'config_hash': config.config_hash(), 'seed': int(config.seed), 'version': __version__,
           'config': config.to_dict()}
    if timer is not None:
        out['timings'] = {name: timer.get_total_time(ident) for name, ident in stages}
    return out


def emit_report(report, output_dir, report_format=ReportFormat.csv_bundle):
    """
    Write ``report.json`` and, for ``csv_bundle``, one ``<name>.csv`` per
    table into ``output_dir``. Returns the written paths, report last.
    """
    report_format = ReportFormat(report_format)
    paths = []
    try:
        os.makedirs(output_dir, exist_ok=True)
        if report_format == ReportFormat.csv_bundle:
            for name in sorted(report.tables):
                header, rows = report.tables[name]
                paths.append(write_csv(os.path.join(output_dir, name + '.csv'), header, rows))
        report_path = os.path.join(output_dir, 'report.json')
        report.artifacts = paths + [report_path]
        write_json(report_path, report.to_dict())
    except OSError as err:
        path = getattr(err, 'filename', None) or output_dir
        msg = 'cannot write the {0} report to {1}: {2}'.format(report.experiment.name, path, err.strerror or err)
        logger.error(msg)
        raise ReportError(msg, path) from err
    logger.info('wrote {0} files for {1} to {2}'.format(len(report.artifacts), report.experiment.name, output_dir))
    return list(report.artifacts)
