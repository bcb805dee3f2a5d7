"""IO layer: schemas, serialization, fixtures and reports."""
