"""Tests for the PDF summary report."""

from pathlib import Path
import sys


PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.append(str(PROJECT_ROOT))


from lindblad_contact.integrators import Scheme  # noqa: E402
from lindblad_contact.metrics import RunSummary  # noqa: E402
from lindblad_contact.report import format_metric, latin1, write_summary_report  # noqa: E402


def test_format_metric():
    assert format_metric(None) == '-'
    assert format_metric(float('inf')) == 'inf'
    assert format_metric(1.5e-13) == '1.500e-13'
    assert format_metric(42) == '42'


def test_latin1_replaces_unsupported_characters():
    assert latin1('|theta| ≤ 5e-2') == '|theta| ? 5e-2'
    assert latin1('γ = 1') == '? = 1'


def test_write_summary_report(tmp_path):
    summaries = [
        RunSummary(Scheme.CONTACT_LGVI, 2e-15, 0.0, 1e-4, 3e-6),
        RunSummary(Scheme.RK2_HEUN, float('inf'), float('inf'), float('inf'), None, 17),
    ]

    path = write_summary_report(str(tmp_path / 'report.pdf'), 'Experiment summary: compare',
                                {'T': 10.0, 'gamma': 1.0, 'scheme': 'contact_lgvi'},
                                summaries, ['rk2_heun diverged at step 17'])

    data = Path(path).read_bytes()
    assert data[:4] == b'%PDF'
    assert len(data) > 500
