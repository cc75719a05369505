"""Trace CSV and summary writers."""
import csv
import math
from dataclasses import astuple, fields

from primaldual.models import TraceRecord


def format_value(value):
    """Integers as-is, reals with 17 significant digits (exact round trip)."""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    value = float(value)
    if math.isnan(value):
        return 'nan'
    if math.isinf(value):
        return 'inf' if value > 0 else '-inf'
    return format(value, '.17g')


def write_trace_csv(path, records, record_type=None, comment=None):
    """Header row then one row per record, LF line endings.

    ``record_type`` fixes the header when ``records`` is empty. ``comment``
    is written first as a ``#`` line.
    """
    records = list(records)
    if record_type is None:
        record_type = type(records[0]) if records else TraceRecord
    header = [f.name for f in fields(record_type)]
    with open(path, 'w', newline='', encoding='utf-8') as f:
        if comment:
            f.write(f'# {comment}\n')
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(header)
        for record in records:
            writer.writerow([format_value(v) for v in astuple(record)])


def write_summary(path, values):
    """``key=value`` lines in insertion order."""
    with open(path, 'w', newline='', encoding='utf-8') as f:
        for key, value in values.items():
            text = value if isinstance(value, str) else format_value(value)
            f.write(f'{key}={text}\n')
