from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field
from pathlib import Path
from tempfile import NamedTemporaryFile
from threading import Lock
from typing import Iterable, Optional, Sequence


class CsvStoreError(RuntimeError):
    """Base error for CSV store failures."""


class CsvCorruptedError(CsvStoreError):
    """Raised when a CSV file exists but its content is not what the reader expects."""


@dataclass
class CsvStore:
    """
    A single CSV file with atomic replacement on write:
      - rows are serialised in memory first
      - written to a temp file in the same directory and fsynced
      - moved over the target with os.replace
    A threading.Lock serialises access within the process.
    """

    path: Path

    _mutex: Lock = field(default_factory=Lock, repr=False, compare=False)

    def __post_init__(self) -> None:
        self.path = Path(self.path)
        self.path.parent.mkdir(parents=True, exist_ok=True)

    def exists(self) -> bool:
        return self.path.exists()

    def read_rows(self) -> list[list[str]]:
        """
        All rows including the header; an empty list when the file is missing.
        """
        with self._mutex:
            if not self.path.exists():
                return []
            try:
                with self.path.open("r", encoding="utf-8", newline="") as handle:
                    return [row for row in csv.reader(handle) if row]
            except csv.Error as e:
                raise CsvCorruptedError(f"CSV file corrupted: {self.path}") from e
            except OSError as e:
                raise CsvStoreError(f"Failed to read CSV file: {self.path}") from e

    def write_rows(self, rows: Iterable[Sequence[str]]) -> None:
        buffer = io.StringIO()
        csv.writer(buffer, lineterminator="\n").writerows(rows)
        self.write_text(buffer.getvalue())

    def write_text(self, payload: str) -> None:
        with self._mutex:
            tmp_path: Optional[Path] = None
            try:
                with NamedTemporaryFile(
                    mode="w",
                    encoding="utf-8",
                    dir=str(self.path.parent),
                    delete=False,
                    prefix=f".{self.path.name}.",
                    suffix=".tmp",
                    newline="",
                ) as tmp:
                    tmp_path = Path(tmp.name)
                    tmp.write(payload)
                    tmp.flush()
                    os.fsync(tmp.fileno())
                os.replace(str(tmp_path), str(self.path))
                self._fsync_dir(self.path.parent)
            except OSError as e:
                raise CsvStoreError(f"Failed to write CSV file: {self.path}") from e
            finally:
                try:
                    if tmp_path and tmp_path.exists():
                        tmp_path.unlink(missing_ok=True)
                except OSError:
                    pass

    @staticmethod
    def _fsync_dir(directory: Path) -> None:
        """Makes the rename durable on POSIX; skipped where directories cannot be opened."""
        try:
            dir_fd = os.open(str(directory), os.O_RDONLY)
        except OSError:
            return
        try:
            os.fsync(dir_fd)
        except OSError:
            pass
        finally:
            os.close(dir_fd)
