"""Model documents, the bindings and property languages, and system manifests."""

from .bindings import parse_bindings, serialize_bindings
from .diagnostics import ConfigError, Diagnostic
from .manifest import LoadedSystem, build_system, load_properties, load_system
from .models import load_model, parse_model, serialize_model
from .properties import PropertyFile, parse_goal, parse_ltl, parse_properties, serialize_properties

__all__ = [
    "parse_bindings", "serialize_bindings", "ConfigError", "Diagnostic", "LoadedSystem", "build_system",
    "load_properties", "load_system", "load_model", "parse_model", "serialize_model", "PropertyFile",
    "parse_goal", "parse_ltl", "parse_properties", "serialize_properties",
]
