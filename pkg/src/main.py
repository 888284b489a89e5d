import sys

from cli.commands import run


def main(argv=None) -> int:
    try:
        return run(argv)
    except KeyboardInterrupt:
        print("\nInterrupted", file=sys.stderr)
        return 130


if __name__ == "__main__":
    exit_code = main()
    sys.exit(exit_code)
