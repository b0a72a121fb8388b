import io
from datetime import datetime
from typing import Dict, Any

import pandas as pd

# Fixed creation date so repeated reports produce identical workbooks
_CREATED = datetime(2000, 1, 1)


class ExcelExporter:
    """Export a verification report to an Excel workbook, one sheet per section"""

    def __init__(self, processed_data: Dict[str, Any]):
        self.processed_data = processed_data
        self.workbook_buffer = io.BytesIO()

    def create_workbook(self) -> bytes:
        """Create a workbook with a summary sheet followed by the section sheets"""
        with pd.ExcelWriter(self.workbook_buffer, engine='xlsxwriter') as writer:
            workbook = writer.book
            workbook.set_properties({'title': 'RandCF verification report', 'created': _CREATED})

            header_format = workbook.add_format({
                'bold': True,
                'text_wrap': True,
                'valign': 'top',
                'fg_color': '#D7E4BC',
                'border': 1
            })
            fail_format = workbook.add_format({'font_color': '#9C0006', 'bg_color': '#FFC7CE'})

            self._create_summary_sheet(writer, header_format, fail_format)
            for section, data in self.processed_data.items():
                self._create_section_sheet(writer, section, data, header_format)

        self.workbook_buffer.seek(0)
        return self.workbook_buffer.getvalue()

    def _create_summary_sheet(self, writer, header_format, fail_format):
        rows = []
        for section, data in self.processed_data.items():
            summary = data.get('summary', {}) if isinstance(data, dict) else {}
            rows.append({
                'section': section,
                'passed': bool(summary.get('passed', False)),
                'checks': summary.get('checks', 0),
                'failures': summary.get('failures', 0),
            })
        df = pd.DataFrame(rows, columns=['section', 'passed', 'checks', 'failures'])
        df.to_excel(writer, sheet_name='Summary', index=False)
        worksheet = writer.sheets['Summary']

        for col_num, value in enumerate(df.columns.values):
            worksheet.write(0, col_num, value, header_format)
        for row_num, passed in enumerate(df['passed'], start=1):
            if not passed:
                worksheet.set_row(row_num, None, fail_format)
        worksheet.set_column(0, 0, 28)

    def _create_section_sheet(self, writer, section, data, header_format):
        rows = data.get('data', []) if isinstance(data, dict) else []
        df = pd.DataFrame(rows)
        if df.empty:
            df = pd.DataFrame(columns=['message'])

        # Excel sheet names are limited to 31 characters
        sheet_name = section[:31]
        df.to_excel(writer, sheet_name=sheet_name, index=False)
        worksheet = writer.sheets[sheet_name]

        for col_num, value in enumerate(df.columns.values):
            worksheet.write(0, col_num, value, header_format)

        # Auto-adjust column widths
        for i, col in enumerate(df.columns):
            max_len = max(df[col].astype(str).str.len().max() if not df.empty else 0, len(str(col)))
            worksheet.set_column(i, i, min(max_len + 2, 40))
