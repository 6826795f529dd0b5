from __future__ import annotations

from importlib import import_module
from pathlib import Path
from types import ModuleType

from entrypoint import entrypoint
from named import get_name

import happymine

MODULES = (
    "attacks",
    "axioms",
    "config",
    "documents",
    "entry",
    "errors",
    "model",
    "revaluation",
    "scenario",
    "solver",
    "sweeps",
    "thresholds",
    "verifier",
)

REFERENCE = Path(__file__).parent.parent / "docs" / "reference"

MARKDOWN = ".md"

CHECKING_EXPORTS = "checking exports of `{}`..."
checking_exports = CHECKING_EXPORTS.format

NOT_EXPORTED = "`{}` is not exported from `{}`"
not_exported = NOT_EXPORTED.format

MISSING_REFERENCE = "`{}` has no reference page"
missing_reference = MISSING_REFERENCE.format


def check_module(module: ModuleType) -> None:
    name = get_name(module)

    print(checking_exports(name))

    exported = set(happymine.__all__)

    for item in module.__all__:
        if item not in exported:
            print(not_exported(item, get_name(happymine)))

    page = REFERENCE / (name.rpartition(".")[2] + MARKDOWN)

    if not page.exists():
        print(missing_reference(name))


@entrypoint(__name__)
def main() -> None:
    for name in MODULES:
        check_module(import_module(f"{get_name(happymine)}.{name}"))
