"""Data models, schemas and exact constants."""
