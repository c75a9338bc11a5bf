"""
Output locations for qwalk-action tools.

Tools save CSV/JSON/PNG artifacts under QWALK_OUTPUT_DIR (default ./qwalk_output in the
working directory); the example run configurations ship in the package's data/ directory.
"""

import os
import sys


def get_input_path(filename):
    """
    Get the full path for a run configuration.

    Absolute paths and paths with separators are returned as-is. Bare filenames are looked
    up in the working directory, then in the package data/ directory, then in the
    installed data-files location.

    Args:
        filename: Name of the file or full path

    Returns:
        str: Full path to the file

    Raises:
        FileNotFoundError: If the file is not found
    """
    if os.path.isabs(filename) or os.sep in filename or (os.altsep and os.altsep in filename):
        if not os.path.exists(filename):
            raise FileNotFoundError(f"File not found: {filename}")
        return filename

    candidates = [
        os.path.join(os.getcwd(), filename),
        os.path.join(os.path.dirname(os.path.dirname(__file__)), 'data', filename),
        os.path.join(sys.prefix, 'qwalk_action_data', filename),
    ]
    for path in candidates:
        if os.path.exists(path):
            return path
    raise FileNotFoundError(
        f"File '{filename}' not found in: {', '.join(os.path.dirname(c) for c in candidates)}"
    )


def get_output_dir():
    return os.environ.get('QWALK_OUTPUT_DIR') or os.path.join(os.getcwd(), 'qwalk_output')


def get_output_path(filename=None):
    """
    Get the full path for an output file.

    Bare filenames go into get_output_dir(), which is created if missing; absolute paths
    and paths with separators are returned as-is.

    Args:
        filename: Optional name of the file or full path. If None, returns None.

    Returns:
        str: Full path to the output file, or None if filename is None
    """
    if filename is None:
        return None

    if os.path.isabs(filename) or os.sep in filename or (os.altsep and os.altsep in filename):
        return filename

    output_dir = get_output_dir()
    os.makedirs(output_dir, exist_ok=True)
    return os.path.join(output_dir, filename)
