"""Domain error hierarchy shared by all modules.

Every error carries a machine-readable ``code`` so the HTTP gateway and the
CLI can map failures to status codes without string matching.
"""

from __future__ import annotations


class DomainError(Exception):
    """Base class for all expected, user-facing failures."""

    code = "DOMAIN_ERROR"
