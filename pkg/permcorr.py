"""Command line front end: `python permcorr.py <verb> ...`

stdout carries JSON or CSV only; diagnostics go to stderr. Exit codes are 0
on success, 1 on an invariant violation and 2 on bad input.
"""
import functools
import io
import json
import os
import random
import sys

import click

import engine
from families import FamilySpec
from measures import measure_from_json
from orders import OrderKind
from selfcheck import DEFAULT_SEED, run_selfcheck
from utils import InputError, InvariantViolation, parse_int_list, print_error, print_info

UNIFORM = '{"measure": "uniform"}'
SEED_MAX = 2**64 - 1


def handle_errors(command):
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except InputError as err:
            print_error(str(err))
            sys.exit(2)
        except InvariantViolation as err:
            print_error(str(err), kind="INVARIANT VIOLATION")
            sys.exit(1)

    return wrapper


def load_json(text: str, what: str):
    """Reads a JSON file if text names one, otherwise parses text itself"""
    try:
        if os.path.isfile(text):
            with open(text, "rt", encoding="utf-8") as f:
                return json.load(f)
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise InputError(f"{what} is not valid JSON: {err}") from None


def emit_json(data):
    click.echo(json.dumps(data, indent=2))


def write_table(path: str, columns, rows):
    """CSV to a file, or to stdout for -"""
    if path == "-":
        buffer = io.StringIO()
        engine.write_csv(columns, rows, buffer)
        click.echo(buffer.getvalue(), nl=False)
        return
    with open(path, "wt", newline="", encoding="utf-8") as f:
        engine.write_csv(columns, rows, f)
    print_info(f"wrote {path}")


def check_seed(seed):
    if seed is not None and not 0 <= seed <= SEED_MAX:
        raise InputError(f"seed {seed} is not a 64-bit unsigned integer")


@click.group()
def cli():
    """Correlation of up-sets in the symmetric group"""


@cli.command()
@click.option("--n", "n", type=int, required=True)
@click.option("--measure", default=UNIFORM, show_default=True, help="JSON file or inline JSON")
@click.option("--family-a", required=True, help="JSON file or inline JSON")
@click.option("--family-b", required=True, help="JSON file or inline JSON")
@click.option("--exact/--float", "exact", default=True, show_default=True)
@click.option("--table", is_flag=True, help="print a table instead of JSON")
@handle_errors
def correlate(n, measure, family_a, family_b, exact, table):
    """mu(A & B) against mu(A) mu(B)"""
    mu = measure_from_json(load_json(measure, "--measure"), n)
    if not exact:
        mu = mu.to_float()
    spec_a = FamilySpec.from_json(load_json(family_a, "--family-a"))
    spec_b = FamilySpec.from_json(load_json(family_b, "--family-b"))
    report = engine.correlate(mu, spec_a.build(n), spec_b.build(n), spec_a.label(), spec_b.label())
    if table:
        click.echo(str(report))
    else:
        emit_json(report.to_json())


@cli.command()
@click.option("--n", "n", type=int, required=True)
@click.option("--order", default="strong", show_default=True, help="strong, weak, grid or t:K")
@click.option("--measure", default=UNIFORM, show_default=True)
@click.option("--mode", type=click.Choice(["exhaustive", "random"]), default="exhaustive")
@click.option("--pairs", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--limit", type=int, default=None, help="stop enumerating after this many up-sets")
@click.option("--density", type=float, default=engine.DEFAULT_DENSITY, show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--progress", is_flag=True)
@handle_errors
def scan(n, order, measure, mode, pairs, seed, limit, density, workers, progress):
    """Minimum slack over pairs of up-sets"""
    kind = OrderKind.parse(order)
    kind.gap(n)
    mu = measure_from_json(load_json(measure, "--measure"), n)
    check_seed(seed)
    if mode == "random":
        if seed is None:
            raise InputError("--mode random needs --seed")
        scan_mode = engine.RandomPairs(pairs, seed, density)
    else:
        scan_mode = engine.Exhaustive(limit)
    report = engine.scan_up_set_pairs(n, kind, mu, scan_mode, workers=workers, progress=progress)
    if report.witness is not None:
        report.recheck(mu)
    emit_json(report.to_json())


@cli.command()
@click.option("--alpha", default="1/2", show_default=True)
@click.option("--beta", default="1/2", show_default=True)
@click.option("--n-list", default="4,6,8,10", show_default=True)
@click.option("--out", default="-", show_default=True, help="CSV path, - for stdout")
@click.option(
    "--golden", default=None, help="golden file: written on first run, compared afterwards"
)
@click.option("--samples", type=int, default=None, help="Monte Carlo samples for n above 10")
@click.option("--seed", type=int, default=None)
@click.option("--progress", is_flag=True)
@handle_errors
def thm2(alpha, beta, n_list, out, golden, samples, seed, progress):
    """Sizes of the anti-correlated weak up-sets A and B"""
    check_seed(seed)
    rng = random.Random(seed) if seed is not None else None
    rows = engine.thm2_sweep(alpha, beta, parse_int_list(n_list), samples, rng, progress)
    if golden is not None:
        written = engine.compare_golden(rows, golden, alpha, beta)
        if written:
            print_info(f"golden values for n = {written} written to {golden}")
    write_table(out, engine.THM2_COLUMNS, (row.csv_row() for row in rows))


@cli.command()
@click.option("--q", "question", type=click.IntRange(1, 3), required=True)
@click.option("--n", "n", type=int, required=True)
@click.option("--qparam", default="1/2", show_default=True)
@click.option(
    "--source",
    type=click.Choice(["structured", "exhaustive", "random"]),
    default="structured",
    show_default=True,
)
@click.option("--pairs", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--limit", type=int, default=None)
@click.option("--workers", type=int, default=1, show_default=True)
@handle_errors
def openq(question, n, qparam, source, pairs, seed, limit, workers):
    """Evidence for the open-question measures; the sign is reported, not asserted"""
    check_seed(seed)
    report = engine.open_question_experiment(
        question, n, qparam, source, pairs=pairs, seed=seed, limit=limit, workers=workers
    )
    emit_json(report.to_json())


@cli.command()
@click.option("--n", "n", type=int, required=True)
@click.option("--t-list", default=None, help="comma-separated t values, default 1..n")
@click.option("--trials", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--density", type=float, default=engine.DEFAULT_DENSITY, show_default=True)
@click.option("--out", default="-", show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
@handle_errors
def tscan(n, t_list, trials, seed, density, out, workers):
    """Slack statistics of random t-up-set pairs under the uniform measure"""
    check_seed(seed)
    ts = parse_int_list(t_list) if t_list else list(range(1, n + 1))
    rows = engine.t_up_set_experiment(n, ts, trials, seed, density, workers)
    write_table(out, engine.TSCAN_COLUMNS, (row.csv_row() for row in rows))


@cli.command()
@click.option("--quick", is_flag=True, help="smaller sample counts")
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)
@click.option("--progress", is_flag=True)
@handle_errors
def selfcheck(quick, seed, progress):
    """Runs the invariant suite"""
    suite = run_selfcheck(quick, seed, progress)
    click.echo(str(suite))


if __name__ == "__main__":
    cli()
