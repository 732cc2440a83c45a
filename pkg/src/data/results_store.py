import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np
import pandas as pd

try:
    from ..utils.config import results_dir
    from ..utils.logger import logger
except ImportError:
    from utils.config import results_dir
    from utils.logger import logger


def _plain(value: Any) -> Any:
    """JSON-safe scalars; complex values are split by the callers."""
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in sorted(value.items(), key=lambda kv: str(kv[0]))}
    return value


class ResultsStore:
    """Writes result records as JSON, CSV or plot-data tables."""

    _instance = None
    _directory: Optional[Path] = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super(ResultsStore, cls).__new__(cls)
        return cls._instance

    def __init__(self):
        if self._directory is None:
            self.connect()

    def connect(self, directory: Optional[str] = None) -> bool:
        """Point the store at a results directory (FEYNLAB_RESULTS_DIR by default)"""
        try:
            self._directory = Path(directory) if directory else results_dir()
            self._directory.mkdir(parents=True, exist_ok=True)
            logger.info(f"ResultsStore initialized at {self._directory}")
            return True
        except OSError as e:
            logger.error(f"Cannot use results directory {directory}: {e}")
            self._directory = None
            return False

    @property
    def directory(self) -> Optional[Path]:
        return self._directory

    def is_connected(self) -> bool:
        return self._directory is not None

    def _resolve(self, path: str) -> Path:
        target = Path(path)
        if not target.is_absolute() and self._directory is not None and target.parent == Path("."):
            target = self._directory / target
        target.parent.mkdir(parents=True, exist_ok=True)
        return target

    # records

    @staticmethod
    def normalize(records: Iterable[Dict[str, Any]], include_time: bool = False) -> List[Dict[str, Any]]:
        rows = []
        for record in records:
            row = {k: _plain(v) for k, v in record.items() if include_time or k != "wall_time"}
            rows.append(row)
        return rows

    def to_json(self, records: Iterable[Dict[str, Any]], include_time: bool = False) -> str:
        return json.dumps(self.normalize(records, include_time), indent=2, sort_keys=True) + "\n"

    def to_csv(self, records: Iterable[Dict[str, Any]], include_time: bool = False) -> str:
        rows = self.normalize(records, include_time)
        if not rows:
            return ""
        frame = pd.DataFrame(rows)
        frame = frame[sorted(frame.columns)]
        for column in frame.columns:
            if frame[column].map(lambda v: isinstance(v, (list, dict))).any():
                frame[column] = frame[column].map(lambda v: json.dumps(v, sort_keys=True))
        return frame.to_csv(index=False, lineterminator="\n", float_format="%.12g")

    @staticmethod
    def plot_data(records: Iterable[Dict[str, Any]], x: str, y: str = "value_re", yerr: str = "error") -> str:
        """(x, y, yerr) triples, one per line."""
        lines = ["# x y yerr"]
        for record in records:
            lines.append(f"{float(record[x]):.12g} {float(record[y]):.12g} {float(record.get(yerr, 0.0)):.12g}")
        return "\n".join(lines) + "\n"

    def render(self, records: List[Dict[str, Any]], fmt: str, include_time: bool = False,
               axes: Optional[Tuple[str, str, str]] = None) -> str:
        if fmt == "csv":
            return self.to_csv(records, include_time)
        if fmt == "plot-data":
            return self.plot_data(records, *(axes or ("index", "value_re", "error")))
        return self.to_json(records, include_time)

    def save(self, records: List[Dict[str, Any]], path: str, fmt: str = "json", include_time: bool = False,
             axes: Optional[Tuple[str, str, str]] = None) -> bool:
        """Write records; False (and a logged error) when the file cannot be written"""
        try:
            target = self._resolve(path)
            target.write_text(self.render(records, fmt, include_time, axes))
            logger.info(f"saved {len(records)} records to {target}")
            return True
        except (OSError, KeyError, ValueError) as e:
            logger.error(f"Error saving results to {path}: {e}")
            return False

    def load(self, path: str) -> pd.DataFrame:
        """Read back a JSON or CSV results file"""
        try:
            target = self._resolve(path)
            if target.suffix == ".csv":
                return pd.read_csv(target)
            return pd.DataFrame(json.loads(target.read_text()))
        except (OSError, ValueError) as e:
            logger.error(f"Error loading results from {path}: {e}")
            return pd.DataFrame()


# Global results store instance
store = ResultsStore()
