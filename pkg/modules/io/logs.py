"""
Measurement log: one CSV row per reading, rows sorted by time.

    t,kind,anchor_id,ref_anchor_id,value,sigma

RSS rows carry dBm/dB and an empty ref_anchor_id; TDOA rows carry a range difference and its
sigma in meters. Rows sharing a timestamp form one measurement batch.
"""
import csv
import io
import math
from typing import Iterable

from modules.io.formatting import format_number
from modules.models.measurements import MeasurementBatch, RssReading, TdoaReading
from modules.util.exceptions import OrderingError, ParseError, ValidationError

LOG_HEADER = ["t", "kind", "anchor_id", "ref_anchor_id", "value", "sigma"]

_KIND_RSS = "RSS"
_KIND_TDOA = "TDOA"


def _parse_float(raw: str, column: str, line: int) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ParseError(f"Column '{column}' is not a number: '{raw}'", line=line) from None
    if not math.isfinite(value):
        raise ParseError(f"Column '{column}' must be finite", line=line)
    return value


def _parse_row(row: list[str], line: int):
    if len(row) != len(LOG_HEADER):
        raise ParseError(f"Expected {len(LOG_HEADER)} columns, found {len(row)}", line=line)
    raw_t, kind, anchor_id, ref_anchor_id, raw_value, raw_sigma = (field.strip() for field in row)

    t = _parse_float(raw_t, "t", line)
    value = _parse_float(raw_value, "value", line)
    sigma = _parse_float(raw_sigma, "sigma", line)
    if not anchor_id:
        raise ParseError("Column 'anchor_id' cannot be empty", line=line)
    if sigma <= 0:
        raise ParseError("Column 'sigma' must be positive", line=line)

    try:
        if kind == _KIND_RSS:
            if ref_anchor_id:
                raise ParseError("RSS rows must leave 'ref_anchor_id' empty", line=line)
            return t, RssReading(anchor_id, value, sigma)
        if kind == _KIND_TDOA:
            if not ref_anchor_id:
                raise ParseError("TDOA rows need a 'ref_anchor_id'", line=line)
            return t, TdoaReading(anchor_id, ref_anchor_id, value, sigma)
    except ValidationError as e:
        raise ParseError(str(e), line=line) from None
    raise ParseError(f"Unknown measurement kind '{kind}' (expected {_KIND_RSS} or {_KIND_TDOA})", line=line)


def read_measurement_log(text: str) -> list[MeasurementBatch]:
    """
    Parse a measurement log into time-ordered batches. Any row breaking the schema is an error.
    """
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != LOG_HEADER:
        raise ParseError(f"Expected header '{','.join(LOG_HEADER)}'", line=1)

    feed: list[MeasurementBatch] = []
    current_t, rss, tdoa = None, [], []
    for row in reader:
        line = reader.line_num
        if not row:
            raise ParseError("Empty row", line=line)
        t, reading = _parse_row(row, line)

        if current_t is not None and t < current_t:
            raise OrderingError("Measurement log is not sorted by time", timestamp=t, line=line)
        if current_t is not None and t != current_t:
            feed.append(MeasurementBatch(current_t, rss, tdoa))
            rss, tdoa = [], []
        current_t = t
        (rss if isinstance(reading, RssReading) else tdoa).append(reading)

    if current_t is not None:
        feed.append(MeasurementBatch(current_t, rss, tdoa))
    return feed


def write_measurement_log(feed: Iterable[MeasurementBatch]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(LOG_HEADER)
    for batch in feed:
        t = format_number(batch.timestamp)
        for r in batch.rss:
            writer.writerow([t, _KIND_RSS, r.anchor_id, "", format_number(r.value), format_number(r.sigma)])
        for r in batch.tdoa:
            writer.writerow([t, _KIND_TDOA, r.anchor_id, r.ref_anchor_id, format_number(r.value), format_number(r.sigma)])
    return buffer.getvalue()
