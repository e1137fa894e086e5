import sys

from dsn_hiercode.cli.commands import run


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
