"""MCP stdio server exposing the quantum walk tools in ``tools``."""

import asyncio
import importlib
import inspect
import logging
import pkgutil
from typing import Any

from mcp.server import Server
from mcp.types import Tool, TextContent
import mcp.server.stdio

import tools

logger = logging.getLogger(__name__)

app = Server("qwalk-action")
_TOOLS_CACHE = None


def discover_tools() -> dict[str, callable]:
    """Collect every smolagents tool defined in the ``tools`` package."""
    discovered = {}
    for _, modname, _ in pkgutil.walk_packages(tools.__path__, f'{tools.__name__}.',
                                               lambda x: None):
        try:
            module = importlib.import_module(modname)
        except Exception as e:
            logger.warning("skipping %s: %s", modname, e)
            continue
        for name, obj in inspect.getmembers(module, callable):
            if hasattr(obj, 'inputs') and hasattr(obj, 'name'):
                discovered[getattr(obj, 'name', name)] = obj
    return discovered


def _property(info: dict) -> dict:
    """JSON schema of one smolagents input: its type and description."""
    prop = {"type": info.get("type", "string")}
    if info.get("description"):
        prop["description"] = info["description"]
    return prop


def build_mcp_tool(name: str, func: callable) -> Tool:
    doc = getattr(func, 'description', None) or inspect.getdoc(func) or name
    inputs = getattr(func, 'inputs', {})
    properties = {param: _property(info) for param, info in inputs.items()}
    required = [param for param, info in inputs.items() if not info.get("nullable", False)]
    return Tool(name=name, description=doc,
                inputSchema={"type": "object", "properties": properties, "required": required})


def get_tools() -> dict[str, callable]:
    global _TOOLS_CACHE
    if _TOOLS_CACHE is None:
        _TOOLS_CACHE = discover_tools()
    return _TOOLS_CACHE


def call_tool_sync(name: str, arguments: dict) -> str:
    """Run one tool and render its result as text; errors become an 'Error: ...' string."""
    tools_dict = get_tools()
    if name not in tools_dict:
        return f"Error: Tool '{name}' not found"
    try:
        result = tools_dict[name](**(arguments or {}))
    except Exception as e:
        logger.info("tool %s failed: %s", name, e)
        return f"Error: {e}"
    if isinstance(result, str):
        return result
    from codes.export import dumps
    return dumps(result)


@app.list_tools()
async def list_tools() -> list[Tool]:
    return [build_mcp_tool(name, func) for name, func in get_tools().items()]


# smolagents declares list inputs as 'array' while clients may send other JSON shapes
@app.call_tool(validate_input=False)
async def call_tool(name: str, arguments: Any) -> list[TextContent]:
    return [TextContent(type="text", text=call_tool_sync(name, arguments))]


async def _main():
    get_tools()
    async with mcp.server.stdio.stdio_server() as (read, write):
        await app.run(read, write, app.create_initialization_options())


def main():
    logging.basicConfig(level=logging.WARNING)
    asyncio.run(_main())


if __name__ == "__main__":
    main()
