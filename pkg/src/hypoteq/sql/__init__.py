"""SQL frontend: lexer/parser, AST, printer, resolver and schemas."""

from . import ast
from .parser import parse_sql
from .printer import format_query, format_statement
from .resolver import Catalog, RQuery, infer_schema, resolve
from .types import ColumnType, RelationSchema, SchemaColumn, Value, parse_type

__all__ = [
    "ast", "parse_sql", "format_query", "format_statement",
    "Catalog", "RQuery", "infer_schema", "resolve",
    "ColumnType", "RelationSchema", "SchemaColumn", "Value", "parse_type",
]
