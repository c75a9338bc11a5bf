"""
CSV and JSON artifacts of the CLI and the tools.

Complex columns are split into `<name>_re` / `<name>_im` pairs and floats are written with
17 significant digits, so identical runs give byte-identical files.
"""

import json
import os

import numpy as np
import pandas as pd

FLOAT_FORMAT = "%.17g"


def _split_complex(rows):
    out = []
    for row in rows:
        flat = {}
        for key, value in row.items():
            if isinstance(value, (complex, np.complexfloating)):
                flat[f"{key}_re"] = float(np.real(value))
                flat[f"{key}_im"] = float(np.imag(value))
            elif isinstance(value, np.generic):
                flat[key] = value.item()
            else:
                flat[key] = value
        out.append(flat)
    return out


def to_frame(rows):
    """DataFrame from a list of dicts, complex entries split into re/im columns."""
    return pd.DataFrame(_split_complex(rows))


def write_csv(rows, directory, filename):
    """
    Write rows to directory/filename.

    Returns:
        str: path of the written file
    """
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, filename)
    to_frame(rows).to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def field_rows(values, name="value"):
    """Rows (j, p, value) of a (J, N) per-site array."""
    values = np.asarray(values)
    return [{"j": j, "p": p, name: values[j, p]}
            for j in range(values.shape[0]) for p in range(values.shape[1])]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(np.real(obj)), "im": float(np.imag(obj))}
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def write_json(data, directory, filename):
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, filename)
    with open(path, "w") as f:
        json.dump(_jsonable(data), f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def dumps(data):
    """JSON text for tool results."""
    return json.dumps(_jsonable(data), indent=2)
