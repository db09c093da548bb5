"""
Export Service

Writes experiment output in the formats the commands promise: JSON-lines for
per-trial records and transcripts, CSV for aggregate summaries, and an optional
styled Excel workbook of the same summaries.

Usage:
    from chiralcc.services.export_services import summary_row, write_jsonl, write_summary_csv

    write_jsonl(stream, (record.to_dict() for record in summary.records))
    write_summary_csv(path, [summary_row(lattice, d, alpha, noise, summary)])
"""

import csv
import logging

from openpyxl import Workbook
from openpyxl.styles import Alignment, Font, PatternFill
from openpyxl.utils import get_column_letter

from ..utils import dumps, service_result, stamp
from .decoder_services import wilson_interval

logger = logging.getLogger(__name__)


# ===============================
# Column Configuration
# ===============================

SUMMARY_COLUMNS = ('L', 'd', 'alpha', 'p', 'q', 'trials', 'failures', 'ci_low', 'ci_high',
                   'max_residual_weight')

COLUMN_WIDTHS = {
    'L': 24,
    'ci_low': 14,
    'ci_high': 14,
    'max_residual_weight': 22,
}


# ===============================
# JSON-lines
# ===============================

def write_jsonl(stream, records):
    """
    Write one stamped, key-sorted JSON document per line.

    Returns:
        int: number of records written
    """
    count = 0
    for record in records:
        stream.write(dumps(stamp(record)) + '\n')
        count += 1
    return count


# ===============================
# Summaries
# ===============================

def summary_row(lattice, d, alpha, noise, summary):
    """One CSV row for an experiment summary."""
    return {
        'L': lattice.name,
        'd': d,
        'alpha': alpha,
        'p': noise.p,
        'q': noise.q,
        'trials': summary.trials,
        'failures': summary.failures,
        'ci_low': round(summary.ci_low, 6),
        'ci_high': round(summary.ci_high, 6),
        'max_residual_weight': summary.max_residual_weight,
    }


def prep_summary_row(lattice, d, alpha, transcripts):
    """
    Summary row for preparation runs: a failure is a run whose final syndrome is
    not zero, and the residual weight is the number of faces it left excited.
    """
    failures = sum(1 for t in transcripts if not t.verified)
    low, high = wilson_interval(failures, len(transcripts))
    return {
        'L': lattice.name,
        'd': d,
        'alpha': alpha,
        'p': 0.0,
        'q': 0.0,
        'trials': len(transcripts),
        'failures': failures,
        'ci_low': round(low, 6),
        'ci_high': round(high, 6),
        'max_residual_weight': max((t.final.weight for t in transcripts), default=0),
    }


def write_summary_csv(path, rows):
    with open(path, 'w', newline='', encoding='utf-8') as handle:
        writer = csv.DictWriter(handle, fieldnames=SUMMARY_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow({column: row[column] for column in SUMMARY_COLUMNS})
    logger.info(f"Wrote {len(rows)} summary rows to {path}")


def build_summary_workbook(rows, title="Single-Shot Decoding Summary"):
    """
    Styled workbook with a merged title row, a header row and one row per summary.

    Returns:
        openpyxl Workbook
    """
    wb = Workbook()
    ws = wb.active
    ws.title = "Summary"
    last = get_column_letter(len(SUMMARY_COLUMNS))

    ws.merge_cells(f"A1:{last}1")
    title_cell = ws["A1"]
    title_cell.value = title
    title_cell.font = Font(size=14, bold=True, color="FFFFFF")
    title_cell.fill = PatternFill(start_color="4F81BD", end_color="4F81BD", fill_type="solid")
    title_cell.alignment = Alignment(horizontal="center", vertical="center")

    header_fill = PatternFill(start_color="D9E1F2", end_color="D9E1F2", fill_type="solid")
    header_font = Font(bold=True, color="000000")
    for col_num, header in enumerate(SUMMARY_COLUMNS, 1):
        cell = ws.cell(row=2, column=col_num, value=header)
        cell.font = header_font
        cell.fill = header_fill
        cell.alignment = Alignment(horizontal="center", vertical="center")
        ws.column_dimensions[get_column_letter(col_num)].width = COLUMN_WIDTHS.get(header, 10)

    for row_num, row in enumerate(rows, 3):
        for col_num, column in enumerate(SUMMARY_COLUMNS, 1):
            ws.cell(row=row_num, column=col_num, value=row[column])
    return wb


def write_summary_workbook(path, rows, title="Single-Shot Decoding Summary"):
    build_summary_workbook(rows, title).save(path)
    logger.info(f"Wrote summary workbook {path}")


def export_summary_service(rows, csv_path=None, xlsx_path=None):
    """
    Write the requested summary files.

    Returns:
        dict from service_result listing the written paths
    """
    written = []
    try:
        if csv_path:
            write_summary_csv(csv_path, rows)
            written.append(str(csv_path))
        if xlsx_path:
            write_summary_workbook(xlsx_path, rows)
            written.append(str(xlsx_path))
    except OSError as exc:
        logger.exception(f"Summary export failed: {exc}")
        status = "partial_success" if written else "failed"
        return service_result(status, f"Could not write summary: {exc}", written=written)
    return service_result(message=f"Wrote {len(written)} summary files", written=written)
