import json
import math
import re
from fractions import Fraction
from typing import Dict, Any, Union

import numpy as np
from mpmath import mpf

from core.trace import ExpansionTrace

FLOAT_FORMAT = '%.17g'
_FLOAT_TOKEN = re.compile(r'"\\u0000f:([^"]+)"')


def _to_builtin(value: Any) -> Any:
    """Plain Python value for numpy, Fraction and mpmath values"""
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, mpf):
        return str(value)
    if hasattr(value, 'to_dict'):
        return value.to_dict()
    return str(value)


def _tokenise_floats(value: Any) -> Any:
    """Replace finite floats by placeholder strings holding their 17-digit text."""
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            return value
        return '\u0000f:' + FLOAT_FORMAT % value
    if isinstance(value, dict):
        return {key: _tokenise_floats(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_tokenise_floats(item) for item in value]
    if isinstance(value, (np.bool_, np.integer, np.floating, np.ndarray, Fraction, mpf)) or hasattr(value, 'to_dict'):
        return _tokenise_floats(_to_builtin(value))
    return str(value)


def dumps(data: Any, indent: int = 2) -> str:
    """json.dumps with every finite float written to 17 significant digits."""
    text = json.dumps(_tokenise_floats(data), indent=indent, ensure_ascii=False)
    return _FLOAT_TOKEN.sub(lambda match: match.group(1), text)


class JSONExporter:
    """Export traces, solver diagnostics, statistics and reports to JSON.

    Output carries no timestamps, so the same input always serialises to the
    same text. Floats are written with 17 significant digits.
    """

    def __init__(self, processed_data: Union[Dict[str, Any], ExpansionTrace, Any]):
        if hasattr(processed_data, 'to_dict'):
            processed_data = processed_data.to_dict()
        self.processed_data = processed_data

    def create_raw_export(self, indent: int = 2) -> str:
        """The data alone, with fixed key order as given"""
        return dumps(self.processed_data, indent)

    def create_export(self, indent: int = 2) -> str:
        """Report export: the sections plus a summary of every section's summary"""
        export_data = {
            'export_info': {
                'exporter': 'RandCF v1.0.0',
                'format_version': '1.0'
            },
            'sections': self.processed_data,
            'summary': self._generate_summary(),
        }
        return dumps(export_data, indent)

    def create_section_export(self, section: str, indent: int = 2) -> str:
        """Create a JSON export for a specific report section"""
        if section not in self.processed_data:
            return json.dumps({
                'error': f'Section "{section}" not found in processed data',
                'available_sections': list(self.processed_data.keys())
            }, indent=indent)

        section_data = {
            'export_info': {
                'exporter': 'RandCF v1.0.0',
                'section': section,
                'format_version': '1.0'
            },
            'data': self.processed_data[section]
        }
        return dumps(section_data, indent)

    def _generate_summary(self) -> Dict[str, Any]:
        summary = {
            'sections': list(self.processed_data.keys()),
            'total_sections': len(self.processed_data)
        }
        for section, data in self.processed_data.items():
            if isinstance(data, dict) and 'summary' in data:
                summary[section] = data['summary']
        return summary

    def save(self, path: str, report: bool = False) -> None:
        text = self.create_export() if report else self.create_raw_export()
        with open(path, 'w', encoding='utf-8') as handle:
            handle.write(text + '\n')

    @staticmethod
    def load(path: str) -> Dict[str, Any]:
        with open(path, 'r', encoding='utf-8') as handle:
            return json.load(handle)
