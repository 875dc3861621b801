from app.adapters.datasources.csv_store import CsvCorruptedError, CsvStore, CsvStoreError

__all__ = ["CsvCorruptedError", "CsvStore", "CsvStoreError"]
