import io
from typing import Dict, Any, List, Sequence

import numpy as np
import pandas as pd

from core.grid import GridFunction

FLOAT_FORMAT = '%.17g'


class CSVExporter:
    """Export densities, histograms and correlation sequences to CSV.

    Every table is written with a single header row and 17 significant
    digits, so reading a file back reproduces the in-memory floats exactly.
    """

    def __init__(self, float_format: str = FLOAT_FORMAT):
        self.float_format = float_format

    def _to_csv(self, df: pd.DataFrame) -> str:
        output = io.StringIO()
        df.to_csv(output, index=False, float_format=self.float_format, lineterminator='\n')
        return output.getvalue()

    def create_density_csv(self, h: GridFunction) -> str:
        """Header ``x,h`` and N+1 rows"""
        return self._to_csv(pd.DataFrame({'x': h.nodes, 'h': h.values}))

    def create_histogram_csv(self, edges: np.ndarray, masses: np.ndarray) -> str:
        """Header ``bin_left,bin_right,mass``"""
        return self._to_csv(pd.DataFrame({
            'bin_left': edges[:-1],
            'bin_right': edges[1:],
            'mass': masses,
        }))

    def create_correlation_csv(self, c: Sequence[float]) -> str:
        """Header ``n,c`` starting at n = 0"""
        return self._to_csv(pd.DataFrame({'n': np.arange(len(c)), 'c': np.asarray(c, dtype=float)}))

    def create_table_csv(self, rows: List[Dict[str, Any]]) -> str:
        """Any list of flat records, e.g. a density sweep or a report section"""
        return self._to_csv(pd.DataFrame(rows))

    @staticmethod
    def write(path: str, text: str) -> None:
        with open(path, 'w', encoding='utf-8', newline='') as handle:
            handle.write(text)

    @staticmethod
    def read_density_csv(path_or_buffer) -> GridFunction:
        """Read an ``x,h`` file back into a grid function."""
        df = pd.read_csv(path_or_buffer, float_precision='round_trip')
        if list(df.columns[:2]) != ['x', 'h']:
            raise ValueError(f"Expected columns x,h, got {','.join(df.columns)}")
        return GridFunction(df['h'].to_numpy(dtype=float))

    @staticmethod
    def read_table(path_or_buffer) -> pd.DataFrame:
        return pd.read_csv(path_or_buffer, float_precision='round_trip')
