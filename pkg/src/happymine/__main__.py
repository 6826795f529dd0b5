from __future__ import annotations

from entrypoint import entrypoint

from happymine.cli import main


@entrypoint(__name__)
def run() -> None:
    raise SystemExit(main())
