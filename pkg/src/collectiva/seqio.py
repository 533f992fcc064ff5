"""Sequence ingestion: raw bit-packed, ASCII characters, CSV rows, rationals."""

from __future__ import annotations

import csv
from fractions import Fraction
from pathlib import Path

import numpy as np

from .collectives import BINARY, LabelAlphabet, TrialSequence
from .errors import InputError

FORMATS = ("raw", "ascii", "csv")


def read_sequence(path, fmt: str, alphabet: LabelAlphabet | None = None) -> TrialSequence:
    """Load a trial sequence.

    raw: each byte is 8 trials, most-significant bit first, alphabet 0/1.
    ascii: one character per trial, newlines ignored.
    csv: one label per row.
    """
    p = Path(path)
    try:
        blob = p.read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if fmt == "raw":
        if not blob:
            raise InputError(f"{path}: empty input")
        bits = np.unpackbits(np.frombuffer(blob, dtype=np.uint8))
        return TrialSequence(BINARY, bits.astype(np.int64))
    if fmt == "ascii":
        text = blob.decode("utf-8", errors="strict").replace("\n", "").replace("\r", "")
        if not text:
            raise InputError(f"{path}: empty input")
        return TrialSequence.from_labels(alphabet or _inferred(text), text)
    if fmt == "csv":
        rows = [r for r in csv.reader(blob.decode("utf-8").splitlines()) if r]
        if not rows:
            raise InputError(f"{path}: empty input")
        vals = [r[0].strip() for r in rows]
        return TrialSequence.from_labels(alphabet or _inferred(vals), vals)
    raise InputError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def _inferred(values) -> LabelAlphabet:
    uniq = tuple(sorted(set(values)))
    return LabelAlphabet(uniq) if len(uniq) >= 2 else _padded(uniq)


def _padded(labels: tuple) -> LabelAlphabet:
    """A constant input still needs a 2-letter alphabet; pad with a sentinel."""
    pad = "\x00" if "\x00" not in labels else "\x01"
    return LabelAlphabet(tuple(labels) + (pad,))


def read_rationals(path) -> list[Fraction]:
    """One rational per row: "n/d", integer, or decimal."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    out = []
    for i, row in enumerate(csv.reader(text.splitlines())):
        if not row:
            continue
        s = row[0].strip()
        if not s:
            continue
        try:
            out.append(Fraction(s))
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"{path} row {i + 1}: bad rational {s!r}: {exc}") from exc
    if not out:
        raise InputError(f"{path}: empty input")
    return out
