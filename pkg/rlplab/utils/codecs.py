"""
Plain-text codecs
Readers and writers for signal, family and sparse-family files
"""

import logging
from typing import List

import numpy as np

from ..core.exceptions import ReportIOException, ValidationException
from ..schemas import FrequencyInterval, GridInterval, IntervalFamily, Signal, SparseFamily, SparseMember

logger = logging.getLogger(__name__)


def _read_lines(path: str) -> List[str]:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read().splitlines()
    except OSError as e:
        logger.error(f"Failed to read {path}: {str(e)}")
        raise ReportIOException(f"Cannot read {path}: {str(e)}")


def _write_lines(path: str, lines: List[str]) -> str:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write("\n".join(lines) + "\n")
    except OSError as e:
        logger.error(f"Failed to write {path}: {str(e)}")
        raise ReportIOException(f"Cannot write {path}: {str(e)}")
    return path


def _content(lines: List[str]) -> List[str]:
    return [line.strip() for line in lines if line.strip() and not line.lstrip().startswith("#")]


def parse_signal(lines: List[str]) -> Signal:
    """
    Parse the column format: header 'N domain_length', then one 're im' per line

    Raises:
        ValidationException: On malformed content
    """
    rows = _content(lines)
    if not rows:
        raise ValidationException("Signal file is empty")
    try:
        header = rows[0].split()
        n = int(header[0])
        domain_length = float(header[1]) if len(header) > 1 else 1.0
        values = np.array([[float(x) for x in row.split()[:2]] for row in rows[1:]])
    except (ValueError, IndexError) as e:
        raise ValidationException(f"Malformed signal file: {str(e)}")
    if values.shape != (n, 2):
        raise ValidationException(f"Signal file declares N={n} but holds {len(rows) - 1} samples")
    try:
        return Signal(samples=values[:, 0] + 1j * values[:, 1], domain_length=domain_length)
    except ValueError as e:
        raise ValidationException(f"Invalid signal: {str(e)}")


def format_signal(f: Signal) -> List[str]:
    lines = [f"{f.n} {f.domain_length!r}"]
    lines.extend(f"{float(v.real)!r} {float(v.imag)!r}" for v in f.samples)
    return lines


def read_signal(path: str) -> Signal:
    return parse_signal(_read_lines(path))


def write_signal(path: str, f: Signal) -> str:
    return _write_lines(path, format_signal(f))


def read_family_intervals(path: str) -> List[FrequencyInterval]:
    """One 'a b' pair per line"""
    intervals = []
    for row in _content(_read_lines(path)):
        try:
            a, b = (int(x) for x in row.split()[:2])
            intervals.append(FrequencyInterval(a=a, b=b))
        except ValueError as e:
            raise ValidationException(f"Malformed family line {row!r}: {str(e)}")
    if not intervals:
        raise ValidationException(f"Family file {path} holds no intervals")
    return intervals


def write_family(path: str, family: IntervalFamily) -> str:
    return _write_lines(path, [f"{w.a} {w.b}" for w in family.intervals])


def format_sparse(family: SparseFamily) -> List[str]:
    lines = [f"# n {family.n} domain_length {family.domain_length!r} eta {family.eta!r}"]
    for member in family.members:
        witness = " ".join(str(int(i)) for i in member.witness)
        lines.append(f"{member.interval.start} {member.interval.length} | {witness}")
    return lines


def parse_sparse(lines: List[str], eta: float = None) -> SparseFamily:
    """
    Parse 'start length | witness indices...' lines under a '# n N domain_length D' header

    Raises:
        ValidationException: On malformed content
    """
    n = None
    domain_length = 1.0
    declared_eta = None
    members = []
    for line in lines:
        text = line.strip()
        if not text:
            continue
        if text.startswith("#"):
            tokens = text.lstrip("#").split()
            for key, value in zip(tokens[::2], tokens[1::2]):
                if key == "n":
                    n = int(value)
                elif key == "domain_length":
                    domain_length = float(value)
                elif key == "eta":
                    declared_eta = float(value)
            continue
        if n is None:
            raise ValidationException("Sparse file lacks the '# n <N>' header")
        head, _, tail = text.partition("|")
        try:
            start, length = (int(x) for x in head.split()[:2])
            witness = [int(x) for x in tail.split()]
            interval = GridInterval(start=start, length=length, n=n, domain_length=domain_length)
        except ValueError as e:
            raise ValidationException(f"Malformed sparse line {text!r}: {str(e)}")
        members.append(SparseMember(interval=interval, witness=witness))
    if n is None:
        raise ValidationException("Sparse file lacks the '# n <N>' header")
    chosen = eta if eta is not None else (declared_eta if declared_eta is not None else 1.0)
    return SparseFamily(members=tuple(members), eta=chosen, n=n, domain_length=domain_length)


def read_sparse(path: str, eta: float = None) -> SparseFamily:
    return parse_sparse(_read_lines(path), eta)


def write_sparse(path: str, family: SparseFamily) -> str:
    return _write_lines(path, format_sparse(family))


def write_rows(path: str, lines: List[str]) -> str:
    """Write preformatted lines"""
    return _write_lines(path, lines)
