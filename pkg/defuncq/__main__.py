import logging

import click

from defuncq.bench import bench
from defuncq.compile import compile
from defuncq.corpus import corpus
from defuncq.diff import diff
from defuncq.fuzz import fuzz
from defuncq.run import run

LOG_LEVELS = (logging.WARNING, logging.INFO, logging.DEBUG)


@click.group()
@click.option("-v", "--verbose", count=True, help="Log more; repeat for debug logs.")
def main(verbose):
    """Defunctionalizing compiler and differential interpreter."""
    logging.basicConfig(
        level=LOG_LEVELS[min(verbose, len(LOG_LEVELS) - 1)],
        format="%(levelname)s %(name)s: %(message)s",
    )


main.add_command(compile.compile)
main.add_command(run.run)
main.add_command(diff.diff)
main.add_command(bench.bench)
main.add_command(fuzz.fuzz)
main.add_command(corpus.corpus)

if __name__ == "__main__":
    main()
