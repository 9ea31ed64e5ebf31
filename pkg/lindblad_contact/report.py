try:
    from fpdf import FPDF
    from fpdf.enums import XPos, YPos
except ImportError:
    print("Error importing fpdf. Please make sure it's installed with 'pip install fpdf2==2.8.2'")
    raise
import math
from typing import Dict, List, Optional, Sequence

from .metrics import RunSummary
from .presets import ExperimentPresets

SUMMARY_COLUMNS = [
    ('Scheme', 34),
    ('max trace drift', 30),
    ('max pos drift', 30),
    ('max |theta|', 30),
    ('max glob err', 30),
    ('diverged at', 26),
]


def latin1(text: str) -> str:
    """Core PDF fonts only cover latin-1."""
    return text.encode('latin-1', errors='replace').decode('latin-1')


def format_metric(value) -> str:
    if value is None:
        return '-'
    if isinstance(value, float):
        if math.isinf(value):
            return 'inf'
        return f"{value:.3e}"
    return str(value)


class SummaryReport(FPDF):
    """One-page PDF with the resolved configuration and the summary table."""

    def __init__(self, title: str, metadata: Dict, size_config: str = 'medium'):
        super().__init__(orientation='P', unit='mm', format='A4')
        self.report_title = latin1(title)
        self.metadata = metadata
        self.font_sizes = ExperimentPresets.get_report_font_sizes(size_config)
        self.set_auto_page_break(auto=True, margin=15)

    def header(self) -> None:
        self.set_font('Helvetica', 'B', self.font_sizes['title'])
        self.cell(0, 10, self.report_title, border=0, new_x=XPos.LMARGIN, new_y=YPos.NEXT, align='C')
        self.line(10, self.get_y(), self.w - 10, self.get_y())
        self.ln(4)

    def footer(self) -> None:
        self.set_y(-12)
        self.set_font('Helvetica', 'I', self.font_sizes['footer'])
        self.cell(0, 5, f'Page {self.page_no()}', border=0, new_x=XPos.RIGHT, new_y=YPos.TOP, align='C')

    def add_heading(self, text: str) -> None:
        self.set_font('Helvetica', 'B', self.font_sizes['heading'])
        self.cell(0, 8, latin1(text), border=0, new_x=XPos.LMARGIN, new_y=YPos.NEXT)

    def add_config_block(self) -> None:
        self.add_heading('Configuration')
        self.set_font('Courier', '', self.font_sizes['body'])
        for key, value in self.metadata.items():
            if value is None:
                continue
            self.cell(0, 5, latin1(f"{key} = {value}"), border=0, new_x=XPos.LMARGIN, new_y=YPos.NEXT)
        self.ln(4)

    def add_summary_table(self, summaries: Sequence[RunSummary]) -> None:
        self.add_heading('Summary')
        self.set_font('Helvetica', 'B', self.font_sizes['table'])
        for label, width in SUMMARY_COLUMNS:
            self.cell(width, 7, label, border=1, new_x=XPos.RIGHT, new_y=YPos.TOP, align='C')
        self.ln(7)

        self.set_font('Helvetica', '', self.font_sizes['table'])
        for summary in summaries:
            row = summary.as_row()
            cells = [row['scheme'], row['max_trace_drift'], row['max_pos_drift'],
                     row['max_abs_theta'], row['max_glob_err'], row['diverged_at']]
            for (_, width), value in zip(SUMMARY_COLUMNS, cells):
                self.cell(width, 7, latin1(format_metric(value)), border=1,
                          new_x=XPos.RIGHT, new_y=YPos.TOP, align='C')
            self.ln(7)
        self.ln(4)

    def add_notes(self, lines: List[str]) -> None:
        if not lines:
            return
        self.add_heading('Notes')
        self.set_font('Helvetica', '', self.font_sizes['body'])
        for line in lines:
            self.multi_cell(0, 5, latin1(line), border=0, new_x=XPos.LMARGIN, new_y=YPos.NEXT)


def write_summary_report(path: str, title: str, metadata: Dict,
                         summaries: Sequence[RunSummary],
                         notes: Optional[List[str]] = None) -> str:
    report = SummaryReport(title, metadata)
    report.add_page()
    report.add_config_block()
    report.add_summary_table(summaries)
    report.add_notes(notes or [])
    report.output(path)
    return path
