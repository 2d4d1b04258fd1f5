"""Access to the versioned audit-grid configuration shipped with the package."""

import json
from importlib import resources


def audit_grid():
    """The frozen parameter grids used by audits and acceptance runs."""
    ref = resources.files("prodnorm.data") / "audit_grid.json"
    return json.loads(ref.read_text())


def output_schema():
    """JSON schema of the CLI output envelope."""
    ref = resources.files("prodnorm.data") / "cli_output.schema.json"
    return json.loads(ref.read_text())
