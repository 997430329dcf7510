"""Artifact writers: field dumps and curve CSVs."""

from axifb.exporter.curves import (
    read_curve_csv,
    read_profile_csv,
    write_curve_csv,
    write_profile_csv,
)
from axifb.exporter.fields import (
    FieldHeader,
    load_field,
    read_field,
    write_field,
    write_field_csv,
)

__all__ = [
    "read_curve_csv",
    "read_profile_csv",
    "write_curve_csv",
    "write_profile_csv",
    "FieldHeader",
    "load_field",
    "read_field",
    "write_field",
    "write_field_csv",
]
