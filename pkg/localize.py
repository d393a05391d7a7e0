import sys
from typing import Optional, Sequence

from modules.args.parser import ArgParser
from modules.cli.commands import COMMANDS
from modules.util.logger import Logger

# Conventional exit code of a process stopped with Ctrl-C
EXIT_INTERRUPTED = 130


def main(argv: Optional[Sequence[str]] = None) -> int:
    # Parse + validate arguments
    args = ArgParser().parse(argv)

    # (Re)initialize logger singleton with passed settings
    Logger.reset()
    Logger(args.log_dir, debug=args.verbose, is_silent=args.silent)

    Logger().debug(f"Running command '{args.command}'.")
    try:
        return COMMANDS[args.command](args)
    except KeyboardInterrupt:
        Logger().fatal("Interrupted by the user.", code=EXIT_INTERRUPTED)


if __name__ == "__main__":
    sys.exit(main())
