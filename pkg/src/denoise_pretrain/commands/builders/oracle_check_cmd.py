ORACLE_HELP = """
    score-matching vs denoising gradient check on a Gaussian mixture

    usage: denoise-pretrain oracle-check [--centers N] [--atoms N] [--sigma S] [--samples M] [--hidden H]

    Draws a random mixture over mean-centered structures and a small score
    network, then compares the gradients of the score-matching and the
    denoising objectives on common random numbers. Prints one CSV row with
    the normalized gap and the Monte-Carlo standard error of the parameter
    with the largest z score.
    """

import argparse
import sys

from denoise_pretrain.adapters.io.csv_rows import rows_to_text
from denoise_pretrain.bridges.checks.oracle import OracleBridge, Request, Result
from denoise_pretrain.commands.bridge import BridgeCommand, RequestBuilder, ResultReporter
from denoise_pretrain.commands.context import CommandContext
from denoise_pretrain.interface import face


class BuildOracleRequest(RequestBuilder[Request]):
    help = ORACLE_HELP

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--centers", type=int, default=3, help="mixture centers (default 3)")
        parser.add_argument("--atoms", type=int, default=4, help="atoms per structure (default 4)")
        parser.add_argument("--sigma", type=float, default=0.1, help="noise scale (default 0.1)")
        parser.add_argument("--samples", type=int, default=100_000, help="Monte-Carlo samples (default 100000)")
        parser.add_argument("--hidden", type=int, default=16, help="score network width (default 16)")
        parser.add_argument("--spread", type=float, default=None, help="center spread (default sigma)")

    def from_args(self, args: argparse.Namespace, ctx: CommandContext) -> Request:
        return Request(
            n_centers=args.centers,
            n_atoms=args.atoms,
            sigma=args.sigma,
            n_samples=args.samples,
            seed=ctx.seed,
            hidden=args.hidden,
            spread=args.spread,
            run_tree=ctx.run_tree,
        )


class OracleReporter(ResultReporter[Result]):
    def report(self, result: Result) -> int:
        sys.stdout.write(rows_to_text([result.row]))
        report = result.report
        face.row("J1/J2 gradient gap", f"{report.gap:.3e} (standard error {report.standard_error:.3e})")
        threshold = report.z_threshold(3.0)
        face.row("max |z|", f"{report.max_z:.2f} over {report.n_params} parameters (bound {threshold:.2f})")
        if result.within:
            face.success("every parameter gap within its 3-sigma family-wise bound")
        else:
            face.warning("a parameter gap exceeds its 3-sigma family-wise bound")
        return result.code


OracleCheckCommand = BridgeCommand(
    name="oracle-check",
    builder=BuildOracleRequest(),
    bridge=OracleBridge(),
    reporter=OracleReporter(),
)
