"""Tools for inspecting and managing walk objects held in the session."""

import numpy as np
from smolagents import tool
from mcp_utils.session import get_session


def _arrays(data):
    """Named arrays of a session object; None when it holds none."""
    if isinstance(data, np.ndarray):
        return {"values": data}
    if isinstance(data, dict):
        return {k: np.asarray(v) for k, v in data.items()
                if isinstance(v, (np.ndarray, list))}
    for attr in ("slices", "matrices", "amplitudes"):
        if hasattr(data, attr):
            return {attr: getattr(data, attr)}
    if hasattr(data, "epsilons"):
        return {"epsilons": np.asarray(data.epsilons), "errors": np.asarray(data.errors)}
    if hasattr(data, "q") and hasattr(data, "p"):
        out = {"q": np.asarray(data.q), "p": np.asarray(data.p)}
        if data.extended:
            out.update(t=np.asarray(data.t), Pi=np.asarray(data.Pi))
        return out
    return None


def _json_values(arr, n):
    arr = np.asarray(arr)[:n]
    if np.iscomplexobj(arr):
        return {"re": arr.real.tolist(), "im": arr.imag.tolist()}
    return arr.tolist()


@tool
def list_datasets() -> dict:
    """
    List all objects in the session (coins, states, trajectories, tables, runs).

    Returns:
        Dictionary with count and list of summaries
    """
    session = get_session()
    datasets = session.entries()
    return {
        "count": len(datasets),
        "datasets": [
            {
                "name": info.name,
                "kind": info.kind,
                "length": info.length,
                "labels": info.labels,
                "source": f"derived from {info.parent}" if info.parent else "created",
            }
            for info in datasets
        ],
    }


@tool
def describe_dataset(name: str) -> dict:
    """
    Get detailed info about a session object.

    Args:
        name: Name of the object

    Returns:
        Dictionary with metadata, including the transform that produced derived objects
    """
    session = get_session()
    info = session.info(name)
    data = session.get(name)
    arrays = _arrays(data) or {}
    return {
        "name": info.name,
        "type": type(data).__name__,
        "kind": info.kind,
        "length": info.length,
        "labels": info.labels,
        "shapes": {k: list(v.shape) for k, v in arrays.items()},
        "parent": info.parent,
        "transform": info.transform,
    }


@tool
def delete_dataset(name: str) -> str:
    """
    Delete an object from the session.

    Args:
        name: Name of the object to delete

    Returns:
        Confirmation message
    """
    if get_session().remove(name):
        return f"Deleted '{name}'"
    return f"Dataset '{name}' not found"


@tool
def clear_session() -> str:
    """
    Clear all objects from the session.

    Returns:
        Confirmation message
    """
    session = get_session()
    count = len(session.entries())
    session.clear()
    return f"Cleared {count} datasets"


@tool
def preview_dataset(name: str, n: int = 5) -> dict:
    """
    Preview the leading entries of each array in a session object.

    Args:
        name: Name of the object
        n: Number of leading entries along the first axis (default: 5, max: 20)

    Returns:
        Dictionary with JSON-safe previews; complex arrays are split into re/im lists
    """
    n = min(n, 20)
    data = get_session().get(name)
    arrays = _arrays(data)
    if arrays is None:
        return {"name": name, "type": type(data).__name__, "preview": str(data)[:500]}
    return {
        "name": name,
        "type": type(data).__name__,
        "preview": {k: _json_values(v, n) for k, v in arrays.items()},
    }


@tool
def compute_statistics(name: str) -> dict:
    """
    Summary statistics of each array in a session object. Complex arrays are summarized
    by their modulus.

    Args:
        name: Name of the object

    Returns:
        Dictionary with min, max, mean, std and count per array
    """
    data = get_session().get(name)
    arrays = _arrays(data)
    if arrays is None:
        return {"name": name, "error": "Statistics not available for this type"}

    stats = {}
    for key, arr in arrays.items():
        arr = np.abs(arr) if np.iscomplexobj(arr) else np.asarray(arr, dtype=float)
        stats[key] = {
            "min": float(np.min(arr)),
            "max": float(np.max(arr)),
            "mean": float(np.mean(arr)),
            "std": float(np.std(arr)),
            "count": int(arr.size),
        }
    return {"name": name, "type": type(data).__name__, "stats": stats}
