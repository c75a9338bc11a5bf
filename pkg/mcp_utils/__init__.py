"""Shared utilities for the qwalk-action tools."""

from .path_utils import get_input_path, get_output_dir, get_output_path
from .session import get_session, reset_session, Session, DatasetInfo, classify

__all__ = [
    "get_input_path", "get_output_dir", "get_output_path",
    "get_session", "reset_session", "Session", "DatasetInfo", "classify",
]
