"""
aniso Command Registry - named verification, predicate and oracle commands

Sweeps and the oracle subcommand reach library code only through here, so
every command takes keyword parameters and answers with a result dict.
"""

import inspect
from dataclasses import dataclass, field
from typing import Any, Callable

from utils import log_debug, log_error
from utils.error_handling import AnisoError


@dataclass(frozen=True)
class Command:
    """A registered handler with the parameter names it accepts."""

    name: str
    handler: Callable[..., Any]
    parameters: list[str]
    required: list[str] = field(default_factory=list)

    @property
    def description(self) -> str:
        doc = inspect.getdoc(self.handler) or "No description available"
        return doc.splitlines()[0]

    def info(self) -> dict[str, Any]:
        return {
            "command": self.name,
            "description": self.description,
            "parameters": list(self.parameters),
            "required": list(self.required),
            "handler": self.handler.__name__,
            "module": self.handler.__module__,
        }


def _signature_parameters(handler: Callable) -> tuple[list[str], list[str]]:
    """Named parameters of handler, looking through decorators, and those without defaults."""
    names, required = [], []
    for name, parameter in inspect.signature(inspect.unwrap(handler)).parameters.items():
        if parameter.kind in (parameter.VAR_POSITIONAL, parameter.VAR_KEYWORD):
            continue
        names.append(name)
        if parameter.default is parameter.empty:
            required.append(name)
    return names, required


class CommandRegistry:
    """Registry of named command handlers."""

    def __init__(self):
        self.commands: dict[str, Command] = {}

    def register_command(self, name: str, handler: Callable, params: list[str] | None = None):
        """Register a handler under name.

        Args:
            name: Command name
            handler: Function taking keyword parameters
            params: Accepted parameter names (read from the signature if None)
        """
        names, required = _signature_parameters(handler)
        if params is not None:
            required = [p for p in required if p in params]
            names = list(params)
        self.commands[name] = Command(name, handler, names, required)
        log_debug(f"Registered command: {name} with params: {names}")

    def dispatch(self, command: str, params: dict[str, Any]) -> dict[str, Any]:
        """Run command with the subset of params it declares.

        Returns:
            The handler's result dict, a {"success": True, "result": ...}
            wrapper for plain values, or an error dict
        """
        entry = self.commands.get(command)
        if entry is None:
            return {"success": False, "error": f"Unknown command: {command}", "code": "unknown_command"}

        missing = [p for p in entry.required if p not in params]
        if missing:
            return {
                "success": False,
                "error": f"Missing required parameters: {missing}",
                "code": "usage",
                "expected": list(entry.parameters),
            }

        try:
            result = entry.handler(**{p: params[p] for p in entry.parameters if p in params})
        except AnisoError as e:
            log_error(f"Command {command} failed: {e.message}")
            return e.to_dict()

        if not isinstance(result, dict):
            result = {"success": True, "result": result}
        return result

    def get_command_info(self, command: str) -> dict[str, Any] | None:
        entry = self.commands.get(command)
        return entry.info() if entry else None

    def list_commands(self) -> list[dict[str, Any]]:
        """Information on every registered command, sorted by name."""
        return [self.commands[name].info() for name in sorted(self.commands)]


_registry = None


def get_registry() -> CommandRegistry:
    """The global registry, populated on first use."""
    global _registry
    if _registry is None:
        _registry = CommandRegistry()
        register_all_operations(_registry)
    return _registry


def register_all_operations(registry: CommandRegistry):
    """Register the verification, predicate and oracle commands."""
    from ops import oracle, suites

    for name, (handler, params) in suites.verify_commands().items():
        registry.register_command(name, handler, params)

    registry.register_command("predicate_embeds", suites.embeds_command)
    registry.register_command("predicate_trace_order", suites.trace_order_command)

    registry.register_command("oracle_weighted_lp", oracle.oracle_weighted_lp)
    registry.register_command("oracle_dense", oracle.oracle_dense)
    registry.register_command("oracle_k_brute", oracle.oracle_k_brute)

    log_debug(f"Registered {len(registry.commands)} commands")


def dispatch_command(command: str, params: dict[str, Any]) -> dict[str, Any]:
    """Dispatch through the global registry."""
    return get_registry().dispatch(command, params)
