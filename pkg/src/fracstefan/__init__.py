import sys


def main() -> None:
    from fracstefan.cli import main as cli_main

    sys.exit(cli_main())
