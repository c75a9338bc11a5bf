"""Run a whole CLI experiment from a configuration file."""

from smolagents import tool


@tool
def run_experiment(config: str, overrides: list = None) -> str:
    """
    Run one qwalk-action experiment (simulate, conserve, extended, lorentz, continuum or
    mechanics) exactly as the command line does.

    Args:
        config: Configuration file. Bare names such as 'conserve.conf' are looked up in the
            working directory and then in the shipped example configurations
        overrides: Optional list of 'key=value' strings applied after the file

    Returns:
        JSON with exit_code (0 all assertions passed, 1 an assertion failed), the PASS/FAIL
        lines, the artifact directory (under QWALK_OUTPUT_DIR) and the run report
    """
    import contextlib
    import dataclasses
    import io
    import json
    import os

    from codes.cli_runner import run, threads_from_env
    from codes.export import dumps
    from codes.run_config import parse_config
    from mcp_utils import get_input_path, get_output_path

    with open(get_input_path(config), encoding="utf-8") as f:
        spec = parse_config(f.read(), list(overrides or []))
    out = get_output_path(os.path.basename(os.path.normpath(spec.output_path)))
    spec = dataclasses.replace(spec, output_path=out)

    # stdout carries the MCP protocol
    captured = io.StringIO()
    with contextlib.redirect_stdout(captured):
        code = run(spec, threads_from_env())
    with open(os.path.join(out, "report.json"), encoding="utf-8") as f:
        report = json.load(f)
    return dumps({
        "exit_code": code,
        "lines": captured.getvalue().splitlines(),
        "output_path": out,
        "report": report,
    })
